import json
import math
import subprocess
import sys

import pytest

from specbuckle import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_csv_ball(capsys):
    code, out, _ = run(capsys, "spectrum", "--domain", "ball", "--dim", "2", "--z-max", "60")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "d,kind,l,n,value,multiplicity"
    assert lines[1] == "2,buckling,0,1,14.681970642123892,1"


def test_spectrum_json_interval(capsys):
    code, out, _ = run(capsys, "spectrum", "--domain", "interval", "--kind", "bilaplacian",
                       "--jmax", "3", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1 and doc["count"] == 3
    assert doc["values"][0] == pytest.approx(500.56390174043247, rel=1e-15)
    # 17 significant digits on the wire
    assert "500.56390174043247" in out


def test_spectrum_plotdata_and_out(tmp_path, capsys):
    p = tmp_path / "s.dat"
    code, out, _ = run(capsys, "spectrum", "--domain", "interval", "--jmax", "5",
                       "--format", "plotdata", "--out", str(p))
    rows = p.read_text().splitlines()
    assert code == 0 and out == "" and len(rows) == 5
    assert float(rows[0].split()[1]) == pytest.approx(4 * math.pi**2, rel=1e-15)


def test_output_is_deterministic(capsys):
    a = run(capsys, "counting", "--dim", "3", "--z-max", "5000", "--format", "json")
    b = run(capsys, "counting", "--dim", "3", "--z-max", "5000", "--format", "json")
    assert a == b


def test_counting_and_riesz_tables(capsys):
    code, out, _ = run(capsys, "counting", "--domain", "interval", "--z-max", "1e4", "--points", "5")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "z,N,N_model" and len(lines) == 6
    code, out, _ = run(capsys, "riesz", "--domain", "interval", "--z-max", "1e4", "--points", "5",
                       "--p", "2")
    assert code == 0 and out.splitlines()[0] == "z,R_2"


def test_verify_interval_passes(capsys):
    code, out, _ = run(capsys, "verify", "--domain", "interval", "--length", "1", "--jmax", "500")
    doc = json.loads(out)
    assert code == 0 and doc["failures"] == 0 and doc["checks"] > 3000


def test_verify_broken_tolerance_exits_one(capsys):
    code, out, _ = run(capsys, "verify", "--domain", "interval", "--jmax", "20", "--require-margin", "10")
    assert code == 1 and json.loads(out)["failures"] > 0


def test_verify_ball(capsys):
    code, out, _ = run(capsys, "verify", "--domain", "ball", "--dim", "3", "--z-max", "2000")
    assert code == 0 and json.loads(out)["failures"] == 0


def test_asymptotics_json(capsys):
    code, out, err = run(capsys, "asymptotics", "--dim", "2", "--z-max", "1e5", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["target"] == "N" and "c1_hat" in err
    assert doc["c1_hat"] == pytest.approx(doc["c1_model"], rel=0.02)


def test_avp_command(capsys):
    code, out, _ = run(capsys, "avp", "--n-models", "20", "--dim", "8", "--seed", "1")
    doc = json.loads(out)
    assert code == 0 and doc["models"] == 20 and doc["failures"] == 0


@pytest.mark.parametrize("argv", [
    ["spectrum", "--domain", "ball", "--dim", "1"],
    ["spectrum", "--domain", "ball", "--kind", "bilaplacian"],
    ["counting", "--z-max", "-3"],
    ["spectrum", "--domain", "interval", "--dim", "3"],
    ["asymptotics", "--windows", "2"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["spectrum", "--format", "xml"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "specbuckle.cli", "spectrum", "--domain", "interval",
                          "--jmax", "2"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.splitlines()[0] == "j,kind,L,value,aux"


def test_to_json_formats():
    s = cli.to_json({"a": [0.1, 1, float("nan")], "b": True, "c": None})
    assert '"a": [0.10000000000000001, 1, null]' in s and '"b": true' in s
