import csv
import io
import json
import subprocess
import sys

import pytest

from rhdexact.cli import main, parse_params, parse_region
from rhdexact.cli import UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0 and "standing-n2" in out and "mondip" in out
    code, out, _ = run(capsys, "list", "--json")
    data = json.loads(out)
    assert data["schema"] == 1 and len(data["entries"]) == 17
    code, out, _ = run(capsys, "list", "--eos", "linear", "--json")
    assert {e["id"] for e in json.loads(out)["entries"]} == {"linear-scaling", "selfsimilar"}


def test_eval_plane_scaling(capsys):
    code, out, _ = run(capsys, "eval", "plane-scaling", "A=1", "--t-range", "1,2", "--x-range=-0.9,0.9",
                       "--resolution", "3,5")
    assert code == 0 and out.startswith("# rhdexact")
    rows = rows_of(out)
    assert len(rows) == 15
    for r in rows:
        t, x = float(r["t"]), float(r["r"])
        assert float(r["eps"]) == pytest.approx(2 / (t * t - x * x), rel=1e-13)
        assert r["class"] == "Physical" and r["in_domain"] == "true"


def test_eval_flags_out_of_domain_rows(capsys):
    code, out, _ = run(capsys, "eval", "plane-scaling", "--t-range", "1,2", "--x-range", "0,3",
                       "--resolution", "2,7")
    rows = rows_of(out)
    assert len(rows) == 14 and any(r["in_domain"] == "false" for r in rows)


@pytest.mark.parametrize("kappa", ["0.4", "0.5", "0.6"])
def test_eval_selfsimilar_slices(capsys, kappa):
    code, out, _ = run(capsys, "eval", "selfsimilar", "n=2", f"kappa={kappa}", "--resolution", "3,6")
    assert code == 0 and len(rows_of(out)) == 18


def test_eval_mondip_polar_slice(capsys):
    code, out, _ = run(capsys, "eval", "mondip", "b=0.5", "--theta", "0.7", "--resolution", "3,4")
    assert code == 0 and all(r["theta"] == "0.7" for r in rows_of(out))


def test_verify_quick_all(capsys):
    code, _, err = run(capsys, "verify", "--all", "--quick", "--jobs", "2")
    assert code == 0 and err.count("PASS") == 17


def test_verify_json_report(capsys, tmp_path):
    out_file = tmp_path / "rep.json"
    code, _, _ = run(capsys, "verify", "standing-n4", "--quick", "--out", str(out_file))
    data = json.loads(out_file.read_text())
    assert code == 0 and data["schema"] == 1 and data["passed"]
    assert abs(data["reports"][0]["estimated_order"] - 2.0) < 0.3


def test_verify_region_outside_cone(capsys):
    code, out, _ = run(capsys, "verify", "plane-scaling", "--region", "x>t", "--quick", "--json")
    rep = json.loads(out)["reports"][0]
    assert code == 0 and rep["fraction_physical"] == 0.0


def test_verify_with_params(capsys):
    code, out, _ = run(capsys, "verify", "selfsimilar", "kappa=1/2", "n=2", "--quick", "--json")
    rep = json.loads(out)["reports"][0]
    assert code == 0 and rep["params"]["kappa"] == 0.5


def test_solve(capsys):
    code, out, _ = run(capsys, "solve", "linear-scaling", "kappa=1/3", "n=0", "--resolutions", "100,200,400")
    rows = rows_of(out)
    assert code == 0 and [r["resolution"] for r in rows] == ["100", "200", "400"]
    assert all(float(r["order_estimate"]) >= 0.8 for r in rows[1:])
    assert list(rows[0]) == ["resolution", "l1_eps", "linf_eps", "l1_v", "order_estimate"]


def test_solve_static_profile(capsys):
    code, out, _ = run(capsys, "solve", "selfsimilar", "kappa=0.5", "n=2", "--resolutions", "50,100")
    assert code == 0 and len(rows_of(out)) == 2


def test_solve_min_order_gate(capsys):
    code, _, _ = run(capsys, "solve", "linear-scaling", "kappa=1/3", "--resolutions", "20,40",
                     "--min-order", "5")
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["solve", "linear-scaling", "n=0"],
    ["solve", "plane-scaling", "kappa=0.5"],
    ["eval", "no-such-id"],
    ["eval", "plane-scaling", "A"],
    ["eval", "plane-scaling", "A=abc"],
    ["eval", "standing", "n=2.5"],
    ["eval", "plane-scaling", "zzz=1"],
    ["verify"],
    ["verify", "--all", "A=1"],
    ["verify", "plane-scaling", "--region", "y>t"],
    ["eval", "plane-scaling", "--t-range", "2,1"],
    ["domain-scan", "mondip", "--levels", "2"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_solver_blowup_exit_3(capsys, monkeypatch):
    import rhdexact.cli as cli
    from rhdexact.solver import UnrecoverableStateError

    def boom(*a, **k):
        raise UnrecoverableStateError("no subluminal primitive state in 1 cell(s)", t=1.25)

    monkeypatch.setattr(cli, "run_comparison", boom)
    code, _, err = run(capsys, "solve", "linear-scaling", "kappa=1/3")
    assert code == 3 and "last good time t=1.25" in err


def test_solve_range_outside_domain(capsys):
    code, _, err = run(capsys, "solve", "linear-scaling", "kappa=0.9", "--t-start", "0.5001")
    assert code == 2 and "leaves the domain" in err


def test_domain_scan(capsys):
    code, out, _ = run(capsys, "domain-scan", "spherical-outgoing", "--resolution", "4,6")
    rows = rows_of(out)
    assert code == 0 and len(rows) == 24
    assert "residual_field" in rows[0] and "in_domain" in rows[0]
    code, out, _ = run(capsys, "domain-scan", "mondip", "--json", "--resolution", "3")
    assert json.loads(out)["report"]["schema"] == 1


def test_reproducible_outputs(capsys):
    argv = ["verify", "quadip", "--quick", "--json", "--seed", "7"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv, "--jobs", "3")
    assert a == b
    argv = ["domain-scan", "log-flow", "--resolution", "4"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
    _, c, _ = run(capsys, "verify", "quadip", "--quick", "--json", "--seed", "8")
    assert c != a


def test_csv_header_records_version_and_seed(capsys):
    _, out, _ = run(capsys, "eval", "standing-n1", "--seed", "99", "--resolution", "2")
    header = [line for line in out.splitlines() if line.startswith("#")]
    assert header[0].startswith("# rhdexact ") and "# seed: 99" in header
    assert any(line.startswith("# spec:") for line in header)


def test_param_parsing():
    assert parse_params(["kappa=1/3", "n=2"]) == {"kappa": 1 / 3, "n": 2}
    with pytest.raises(UsageError):
        parse_params(["n=1/2"])
    lo, hi = parse_region("x>t")(2.0)
    assert 2.0 < lo < hi
    lo, hi = parse_region("|x|<t")(1.0)
    assert -1 < lo < hi < 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rhdexact", "list", "--eos", "log"],
                          capture_output=True, text=True, check=True)
    assert "log-flow" in proc.stdout
