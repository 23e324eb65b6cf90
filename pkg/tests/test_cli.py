import json
import math
import subprocess
import sys

import pytest

import tailorder as to
from tailorder.cli import main
from tailorder.report import ReportDocument


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "tailorder.cli", *args],
        capture_output=True, text=True,
    )
    return proc.returncode, proc.stdout, proc.stderr


@pytest.fixture(scope="module")
def drift_csv(tmp_path_factory):
    # order ratio drifts downward across the whole grid: honest Undecided
    path = tmp_path_factory.mktemp("data") / "drift.csv"
    lines = ["x,logvalue"]
    u0, u1 = math.log(10.0), math.log(1e6)
    for i in range(300):
        u = u0 + (u1 - u0) * i / 299.0
        r = 2.0 * (1.0 - 0.75 * u / u1)
        lines.append(f"{math.exp(u)!r},{r * u!r}")
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture(scope="module")
def unsorted_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "bad.csv"
    path.write_text("x,value\n10,1\n5,2\n30,3\n40,1\n50,2\n60,3\n70,1\n80,2\n")
    return str(path)


def test_classify_decided_exit_zero():
    code, out, _ = run_cli("classify", "--fn", "power_tail", "--param", "alpha=-2")
    assert code == 0
    doc = json.loads(out)
    assert doc["class"] == {"tag": "M", "rho": -2.0}
    assert doc["estimates"]["kappa"]["value"] == pytest.approx(2.0, abs=0.01)


def test_classify_oscillating_decided():
    code, out, _ = run_cli("classify", "--fn", "x_pow_sin_x")
    assert code == 0
    assert json.loads(out)["class"]["tag"] == "Oscillating"


def test_usage_exit_one():
    code, _, _ = run_cli("classify")
    assert code == 1


def test_unknown_function_exit_two():
    code, _, _ = run_cli("classify", "--fn", "no_such_fn")
    assert code == 2


def test_unsorted_csv_exit_two(unsorted_csv):
    code, _, _ = run_cli("classify", "--data", unsorted_csv)
    assert code == 2


def test_undecided_exit_three(drift_csv):
    code, out, _ = run_cli("classify", "--data", drift_csv)
    assert code == 3
    assert json.loads(out)["class"]["tag"] == "Undecided"


def test_numeric_failure_exit_four():
    code, _, _ = run_cli("report", "--fn", "two_plus_sin", "--tauberian")
    assert code == 4


def test_simulate_requires_seed_for_big_runs():
    code, _, _ = run_cli("simulate", "--fn", "pareto_tail", "--param", "alpha=1",
                         "--reps", "2000")
    assert code == 1


def test_simulate_rejects_non_tail():
    code, _, _ = run_cli("simulate", "--fn", "two_plus_sin", "--reps", "10",
                         "--seed", "1")
    assert code == 2


def test_report_peter_paul_k3_and_ratio_witness():
    code, out, _ = run_cli("report", "--fn", "peter_paul", "--r", "1", "--b", "2")
    assert code == 0
    doc = json.loads(out)
    conds = {c["condition"]: c for c in doc["conditions"]}
    assert conds["K3*"]["passed"]
    assert conds["K3*"]["measured"]["ratio_regular"] is False
    assert not conds["RATIO-SCALING"]["passed"]


def test_report_exp_neg_inf_representation():
    code, out, _ = run_cli("report", "--fn", "exp_neg")
    assert code == 0
    doc = json.loads(out)
    conds = {c["condition"]: c for c in doc["conditions"]}
    assert conds["REP-INF"]["passed"]
    assert doc["evt"]["domain_attraction"]["kind"] == "GumbelInfCandidate"


def test_report_tauberian_flag():
    code, out, _ = run_cli("report", "--fn", "power_tail", "--param", "alpha=1.0",
                           "--tauberian")
    assert code == 0
    conds = {c["condition"]: c for c in json.loads(out)["conditions"]}
    assert conds["TAUBERIAN"]["passed"]


def test_simulate_deterministic_bytes(tmp_path):
    args = ["simulate", "--fn", "pareto_tail", "--param", "alpha=1",
            "--n", "2000", "--reps", "1000", "--seed", "7"]
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(p1)]) == 0
    assert main(args + ["--out", str(p2)]) == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_report_document_round_trip(tmp_path):
    p = tmp_path / "doc.json"
    assert main(["classify", "--fn", "peter_paul", "--out", str(p)]) == 0
    doc = ReportDocument.from_json(p.read_text())
    assert ReportDocument.from_json(doc.to_json()) == doc


def test_report_document_rejects_unknown_fields():
    doc = ReportDocument(input={}, class_label={"tag": "Undecided"}, estimates={})
    payload = json.loads(doc.to_json())
    payload["surprise"] = 1
    with pytest.raises(to.FormatError):
        ReportDocument.from_dict(payload)


def test_plots_emission(tmp_path):
    out = tmp_path / "plots"
    assert main(["plots", "--fn", "power_tail", "--param", "alpha=-2",
                 "--plots", str(out)]) == 0
    orders = (out / "orders.csv").read_text().splitlines()
    assert orders[0] == "x,log_u_over_log_x"
    ratios = [float(line.split(",")[1]) for line in orders[1:]]
    assert all(abs(v + 2.0) < 1e-9 for v in ratios)
    ktrace = (out / "kappa_trace.csv").read_text().splitlines()
    assert ktrace[0] == "r,verdict,log_partial_integral"
    verdicts = {line.split(",")[0]: line.split(",")[1] for line in ktrace[1:]}
    assert verdicts["1.0"] == "Convergent" and verdicts["3.0"] == "Divergent"
    assert (out / "ratio.csv").read_text().startswith("t,x,ratio")


def test_plots_sawtooth_for_step_tail(tmp_path):
    out = tmp_path / "plots"
    assert main(["plots", "--fn", "peter_paul", "--plots", str(out)]) == 0
    rows = (out / "orders.csv").read_text().splitlines()[1:]
    vals = [float(r.split(",")[1]) for r in rows]
    assert min(vals) >= -1.0 - 1e-12
    assert max(vals) < -0.75  # n/(n+1) ceiling over the plotted range
