#!/usr/bin/env python3
"""End-to-end checks of the twentyq CLI: exit codes, determinism, CSV shape."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

FAILURES = []


def check(name, cond, extra=""):
    status = "ok" if cond else "FAIL"
    print(f"[{status}] {name} {extra}")
    if not cond:
        FAILURES.append(name)


def run(cli, *args, cwd=None):
    return subprocess.run([cli, *args], capture_output=True, text=True, cwd=cwd)


def main():
    cli = sys.argv[1]
    tmp = Path(tempfile.mkdtemp(prefix="twentyq_cli_"))

    base = {
        "schema_version": 1,
        "channel": {"family": "mdBSC", "nu": 0.5, "f": {"a": 0.1, "b": 0.3}},
        "procedure": "alg1",
        "engine": {
            "bins_per_dim": 16,
            "dim": 1,
            "design_q": "capacity-argmax",
            "lambda": {"target_eps": 0.1},
            "max_steps": 20000,
        },
        "experiment": {"n_trials": 300, "master_seed": 5, "delta_eval": 0.0625},
        "analysis": {
            "eps_grid": {"start": 0.0, "stop": 0.8, "step": 0.1},
            "nu_values": [0.25, 0.5],
        },
        "continuity": {"q": 0.4, "xi": 0.01, "c": 10.0},
    }
    cfg = tmp / "config.json"
    cfg.write_text(json.dumps(base))

    # missing config file: nonzero exit, diagnostic on stderr
    r = run(cli, "simulate", "--config", str(tmp / "nope.json"))
    check("missing config exits 2", r.returncode == 2, r.stderr.strip())

    # unknown config key: hard error
    bad = dict(base)
    bad["extra_section"] = {}
    bad_path = tmp / "bad.json"
    bad_path.write_text(json.dumps(bad))
    r = run(cli, "capacity", "--config", str(bad_path))
    check("unknown config key exits 2", r.returncode == 2, r.stderr.strip())

    # unknown flag: hard error
    r = run(cli, "capacity", "--config", str(cfg), "--frobnicate")
    check("unknown flag exits 2", r.returncode == 2)

    # capacity CSV
    r = run(cli, "capacity", "--config", str(cfg))
    lines = r.stdout.strip().splitlines()
    check("capacity exits 0", r.returncode == 0, r.stderr.strip())
    check("capacity has a header", lines and lines[0] == "quantity,value,unit,argmax_q,tolerance")
    check("capacity reports both code paths",
          sum(1 for ln in lines if ln.startswith("capacity_")) == 2)
    vals = {ln.split(",")[0]: float(ln.split(",")[1]) for ln in lines[1:]}
    check("capacity paths agree",
          abs(vals["capacity_bsc"] - vals["capacity_general"]) < 1e-8)

    # bits flag rescales by log 2
    r2 = run(cli, "capacity", "--config", str(cfg), "--bits")
    bits = {ln.split(",")[0]: float(ln.split(",")[1])
            for ln in r2.stdout.strip().splitlines()[1:]}
    check("bits conversion", abs(bits["capacity_bsc"] * 0.6931471805599453
                                 - vals["capacity_bsc"]) < 1e-12)

    # rate curves: header, nu sweep present, sorted_pm flat
    r = run(cli, "rate-curves", "--config", str(cfg))
    check("rate-curves exits 0", r.returncode == 0, r.stderr.strip())
    lines = r.stdout.strip().splitlines()
    check("rate-curves header", lines[0] == "procedure,nu,epsilon,rate_nats,argmax_q")
    rows = [ln.split(",") for ln in lines[1:]]
    check("rate-curves covers the nu sweep", {row[1] for row in rows} == {"0.25", "0.5"})
    pm_rates = {row[3] for row in rows if row[0] == "sorted_pm" and row[1] == "0.5"}
    check("sorted_pm flat in epsilon", len(pm_rates) == 1)
    alg2 = [float(row[3]) for row in rows if row[0] == "alg2" and row[1] == "0.5"]
    check("alg2 strictly increasing", all(b > a for a, b in zip(alg2, alg2[1:])))

    # simulate: per-trial CSV determinism, byte for byte
    out1, out2 = tmp / "t1.csv", tmp / "t2.csv"
    r1 = run(cli, "simulate", "--config", str(cfg), "--out", str(out1))
    r2 = run(cli, "simulate", "--config", str(cfg), "--out", str(out2))
    check("simulate exits 0", r1.returncode == 0 and r2.returncode == 0,
          (r1.stderr or r2.stderr).strip())
    check("identical seeds give byte-identical CSVs",
          out1.read_bytes() == out2.read_bytes())
    check("identical summaries on stdout", r1.stdout == r2.stdout)
    header = out1.read_text().splitlines()[0]
    check("per-trial CSV header",
          header == "trial,tau,terminated,capped,true_bin,decoded_bin,"
                    "linf_error,excess,mean_query_size")
    check("per-trial CSV row count", len(out1.read_text().splitlines()) == 301)

    # seed override changes the stream
    r3 = run(cli, "simulate", "--config", str(cfg), "--seed", "6")
    check("seed override changes results", r3.stdout != r1.stdout)

    # procedure override onto sorted PM
    pm_cfg = dict(base)
    pm_cfg["sorted_pm"] = {"bins": 256, "stop": {"rule": "fixed-n", "n": 20}}
    pm_path = tmp / "pm.json"
    pm_path.write_text(json.dumps(pm_cfg))
    r = run(cli, "simulate", "--config", str(pm_path), "--procedure", "sorted_pm")
    check("sorted PM simulate exits 0", r.returncode == 0, r.stderr.strip())

    # validate-t1 small run exits 0 and reports both bounds
    r = run(cli, "validate-t1", "--config", str(cfg), "--trials", "400", "--pairs", "400")
    check("validate-t1 exits 0", r.returncode == 0, r.stderr.strip())
    check("validate-t1 reports the bounds",
          "l_bound_holds,1" in r.stdout and "eps_bound_holds,1" in r.stdout)

    # validate-t1 cap contamination path exits 3
    capped = json.loads(json.dumps(base))
    capped["engine"]["lambda"] = 40.0
    capped["engine"]["max_steps"] = 10
    capped_path = tmp / "capped.json"
    capped_path.write_text(json.dumps(capped))
    r = run(cli, "validate-t1", "--config", str(capped_path), "--trials", "50", "--pairs", "50")
    check("cap contamination exits 3", r.returncode == 3, r.stderr.strip())

    # check-continuity
    r = run(cli, "check-continuity", "--config", str(cfg))
    check("check-continuity exits 0", r.returncode == 0, r.stderr.strip())
    check("continuity header", r.stdout.splitlines()[0] == "q,xi,lhs,bound_c,satisfied")
    check("continuity satisfied for a generous constant",
          r.stdout.splitlines()[1].endswith(",1"))

    # capacity on a tabulated channel: only the enumerated path applies
    tab = {
        "schema_version": 1,
        "channel": {"family": "tabulated", "anchors": [
            {"state": 0.0, "rows": [[0.9, 0.1], [0.1, 0.9]]},
            {"state": 1.0, "rows": [[0.7, 0.3], [0.3, 0.7]]},
        ]},
    }
    tab_path = tmp / "tab.json"
    tab_path.write_text(json.dumps(tab))
    r = run(cli, "capacity", "--config", str(tab_path))
    check("tabulated capacity exits 0", r.returncode == 0, r.stderr.strip())
    rows = [ln.split(",")[0] for ln in r.stdout.strip().splitlines()[1:]]
    check("tabulated capacity has only the enumerated path",
          rows == ["capacity_general"])
    r = run(cli, "rate-curves", "--config", str(tab_path))
    check("rate-curves rejects tabulated channels", r.returncode == 2)

    # budget sweep (Fig. 2 style data)
    sweep = json.loads(json.dumps(base))
    sweep["budget_sweep"] = {"targets": [30, 60], "target_eps": 0.1,
                             "trials_per_point": 200}
    sweep_path = tmp / "sweep.json"
    sweep_path.write_text(json.dumps(sweep))
    r = run(cli, "simulate", "--config", str(sweep_path))
    check("budget sweep exits 0", r.returncode == 0, r.stderr.strip())
    lines = r.stdout.strip().splitlines()
    check("budget sweep header",
          lines[0] == "procedure,target_budget,mean_queries,neg_log_resolution,"
                      "quantile_level,capped_fraction,trials")
    check("budget sweep rows", len(lines) == 3)

    if FAILURES:
        print(f"{len(FAILURES)} CLI check(s) failed")
        return 1
    print("all CLI checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
