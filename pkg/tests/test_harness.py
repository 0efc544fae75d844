"""Campaign machinery: channel sampling, sweep determinism, CSV schema,
and the command-line front end (driven as real subprocesses).
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from seecr.harness import (ROW_FIELDS, SCHEMES, SUMMARY_FIELDS,
                           instance_rows, rows_to_csv, run_sweep,
                           sample_channels, summarize, summary_to_csv)
from seecr.model import SystemParams


def run_cli(*args):
    proc = subprocess.run([sys.executable, "-m", "seecr.cli", *args],
                          capture_output=True, text=True, timeout=600)
    return proc


def test_channel_sampler_statistics():
    # entries are unit-variance complex normals: per-component variance 0.5
    n = 4000
    zs = np.concatenate([sample_channels(1234, t, 3).h_s for t in range(n)])
    for part in (zs.real, zs.imag):
        m = part.mean()
        v = part.var()
        # 3 sigma on 12000 samples
        assert abs(m) < 3 * np.sqrt(0.5 / part.size)
        assert abs(v - 0.5) < 3 * np.sqrt(2.0 / part.size) * 0.5 + 0.01
    # distinct trials and seeds decorrelate
    a = sample_channels(5, 0, 3)
    b = sample_channels(5, 1, 3)
    c = sample_channels(6, 0, 3)
    assert not np.array_equal(a.h_s, b.h_s)
    assert not np.array_equal(a.h_s, c.h_s)
    # same key reproduces bit for bit
    again = sample_channels(5, 0, 3)
    for name in ("h_s", "h_e", "h_p"):
        assert np.array_equal(getattr(a, name), getattr(again, name))


def test_schema_is_pinned():
    assert ROW_FIELDS == ("sweep_var", "sweep_value", "trial", "scheme",
                          "status", "see", "rate", "power", "rank",
                          "outer_iters", "inner_iters_total")
    assert SUMMARY_FIELDS == ("sweep_var", "sweep_value", "scheme", "trials",
                              "feasible", "mean_see_all", "mean_see_feasible")
    assert SCHEMES == ("see_max", "power_min", "rate_max")


def sweep_args():
    return dict(sweep_var="r_d", sweep_values=[0.5, 1.0], n_t=3, trials=4,
                seed=77, base={"e_s": 1.0, "p_tx": 10 ** 1.3})


def test_sweep_deterministic_and_ordered():
    rows1 = run_sweep(**sweep_args())
    rows2 = run_sweep(**sweep_args())
    assert rows1 == rows2
    assert rows_to_csv(rows1) == rows_to_csv(rows2)
    # trial-major, then sweep value, then scheme in declared order
    key = [(r["trial"], r["sweep_value"], r["scheme"]) for r in rows1]
    expect = [(t, v, s) for t in range(4) for v in (0.5, 1.0)
              for s in SCHEMES]
    assert key == expect
    # csv is newline-terminated with the pinned header
    text = rows_to_csv(rows1)
    assert text.splitlines()[0] == ",".join(ROW_FIELDS)
    assert text.endswith("\n") and "\r" not in text


def test_sweep_jobs_parity():
    serial = run_sweep(**sweep_args(), jobs=1)
    parallel = run_sweep(**sweep_args(), jobs=2)
    assert serial == parallel


def test_summarize_hand_check():
    rows = [
        {"sweep_var": "r_d", "sweep_value": 0.5, "trial": 0,
         "scheme": "see_max", "status": "Optimal", "see": 0.4},
        {"sweep_var": "r_d", "sweep_value": 0.5, "trial": 1,
         "scheme": "see_max", "status": "Infeasible", "see": 0.0},
        {"sweep_var": "r_d", "sweep_value": 0.5, "trial": 2,
         "scheme": "see_max", "status": "Optimal", "see": 0.2},
    ]
    out = summarize(rows)
    assert len(out) == 1
    s = out[0]
    assert s["trials"] == 3 and s["feasible"] == 2
    assert abs(s["mean_see_all"] - 0.2) < 1e-15      # infeasible counts as 0
    assert abs(s["mean_see_feasible"] - 0.3) < 1e-15  # and is excluded here
    text = summary_to_csv(out)
    assert text.splitlines()[0] == ",".join(SUMMARY_FIELDS)


def test_summarize_handles_all_infeasible():
    rows = [{"sweep_var": "e_s", "sweep_value": 2.0, "trial": 0,
             "scheme": "see_max", "status": "Infeasible", "see": 0.0}]
    s = summarize(rows)[0]
    assert s["mean_see_all"] == 0.0
    assert np.isnan(s["mean_see_feasible"])


def test_instance_rows_rank_column():
    ch = sample_channels(3, 4, 3)
    pr = SystemParams(n_t=3, r_d=0.5, e_s=1.0, p_tx=10 ** 1.3)
    rows = instance_rows(ch, pr)
    assert [r["scheme"] for r in rows] == list(SCHEMES)
    for r in rows:
        if r["status"] == "Optimal":
            assert r["rank"] >= 1
            assert r["see"] == pytest.approx(r["rate"] / r["power"])
        else:
            assert r["rank"] == 0 and r["see"] == 0.0


# ---------------------------------------------------------------------------
# CLI


def test_cli_solve_seeded_json():
    proc = run_cli("solve", "--seed", "42", "--trial", "3", "--n-t", "3")
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    assert doc["status"] == "Optimal"
    assert doc["see"] > 0
    assert doc["certificate"]["passed"] is True
    # covariance serialized as [re, im] pairs, PSD trace
    q = np.array(doc["q"])
    assert q.shape == (3, 3, 2)


def test_cli_solve_instance_file_and_infeasible_exit(tmp_path):
    # an instance that cannot meet the harvesting floor -> exit code 2
    doc = {
        "n_t": 2,
        "channels": {
            "h_s": [[1.0, 0.0], [0.0, 0.0]],
            "h_e": [[0.0, 0.0], [0.0, 0.0]],
            "h_p": [[0.0, 0.0], [1.0, 0.0]],
        },
        "params": {"r_d": 0.5, "e_s": 2.0, "p_tx": 10.0},
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    proc = run_cli("solve", "--instance", str(path))
    assert proc.returncode == 2
    out = json.loads(proc.stdout)
    assert out["status"] == "Infeasible"


def test_cli_error_exit():
    proc = run_cli("solve", "--seed", "1", "--trial", "0", "--n-t", "3",
                   "--r-d", "-2")
    assert proc.returncode == 1
    proc2 = run_cli("solve", "--instance", "/nonexistent/inst.json")
    assert proc2.returncode == 1


def test_cli_trace_sections():
    proc = run_cli("trace", "--seed", "42", "--trial", "3", "--n-t", "3")
    assert proc.returncode == 0, proc.stderr
    assert "# outer" in proc.stdout and "# inner" in proc.stdout
    lines = proc.stdout.splitlines()
    outer_header = lines[lines.index("# outer") + 1]
    assert outer_header == "outer,lam,rate,power,see,delta_f,inner_iters"


def test_cli_sweep_files_byte_identical(tmp_path):
    args = ("sweep", "--var", "r_d", "--values", "0.5,1.0", "--trials", "3",
            "--n-t", "3", "--seed", "7", "--e-s-db", "0", "--p-tx-db", "13")
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    sum1 = tmp_path / "a_sum.csv"
    p1 = run_cli(*args, "--out", str(out1), "--summary", str(sum1))
    assert p1.returncode == 0, p1.stderr
    p2 = run_cli(*args, "--out", str(out2))
    assert p2.returncode == 0
    assert out1.read_bytes() == out2.read_bytes()
    head = out1.read_text().splitlines()[0]
    assert head == ",".join(ROW_FIELDS)
    assert sum1.read_text().splitlines()[0] == ",".join(SUMMARY_FIELDS)


def test_cli_compare_and_oracle():
    proc = run_cli("compare", "--seed", "42", "--trial", "3", "--n-t", "3")
    assert proc.returncode == 0, proc.stderr
    lines = proc.stdout.strip().splitlines()
    assert lines[0] == ",".join(ROW_FIELDS)
    assert len(lines) == 4  # header + three schemes
    proc2 = run_cli("oracle", "--seed", "42", "--trial", "5", "--n-t", "2",
                    "--against-solver", "--refine", "2")
    assert proc2.returncode == 0, proc2.stderr
    doc = json.loads(proc2.stdout)
    assert doc["found"] is True
    assert doc["solver_status"] == "Optimal"
    assert doc["abs_diff"] <= max(1e-3, doc["slack"])
    assert doc["abs_diff"] == pytest.approx(
        abs(doc["solver_value"] - doc["value"]))
