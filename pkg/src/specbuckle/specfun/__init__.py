from .bessel import (
    HalfIntegerOrder,
    as_twice_nu,
    bessel_j,
    bessel_j_prime,
    bessel_pair,
    order_table,
    ultraspherical_j,
)
from .gamma import gamma_half, log_gamma_half, unit_ball_volume
from .zeros import (
    BesselZero,
    ZeroCache,
    bessel_zero,
    bessel_zeros,
    default_cache,
    dump_zero_table,
    mcmahon_guess,
    refine_zeros,
    zeros_below,
)
