"""Command-line runner: ``muhankel --config exp.json --out results/``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on a
config error (unreadable file, schema violation, undeclared reference, bad
``MU_HANKEL_THREADS``).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .checks import REGISTRY, CheckResult, RunContext, jsonable, run_check
from .config import ConfigError, Experiment, load_config

LOGGER = logging.getLogger("muhankel")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def thread_count() -> int:
    raw = os.environ.get("MU_HANKEL_THREADS")
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ConfigError("MU_HANKEL_THREADS", f"expected an integer >= 1, got {raw!r}")
    return n


def _dump(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _write_table(path: Path, table) -> None:
    header, rows = table
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _jobs(exps: List[Experiment]):
    return [(exp, i) for exp in exps for i in range(len(exp.checks))]


def execute(exps: List[Experiment], tol_scale: float = 1.0, threads: int = 1) -> List[CheckResult]:
    """Run every check; results come back in config order whatever the thread count."""

    def one(job):
        exp, i = job
        ctx = RunContext(tol_scale, exp.seed, exp.offset + i)
        return run_check(exp, exp.checks[i], ctx, f"{exp.prefix}checks[{i}]")

    jobs = _jobs(exps)
    if threads <= 1 or len(jobs) <= 1:
        return [one(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, jobs))


def summarize(exps: List[Experiment], results: List[CheckResult]) -> dict:
    entries, residuals = [], {}
    for (exp, i), res in zip(_jobs(exps), results):
        cid = exp.check_id(i)
        entries.append({"id": cid, "op": exp.checks[i]["op"], "pass": res.passed, **res.headline})
        if "max_abs_residual" in res.report:
            residuals[cid] = res.report["max_abs_residual"]
    n_pass = sum(r.passed for r in results)
    return {
        "total": len(results),
        "passed": n_pass,
        "failed": len(results) - n_pass,
        "max_residuals": residuals,
        "checks": entries,
    }


def write_outputs(out: Path, exps: List[Experiment], results: List[CheckResult], summary: dict, meta: dict) -> None:
    (out / "reports").mkdir(parents=True, exist_ok=True)
    tables = out / "tables"
    for (exp, i), res in zip(_jobs(exps), results):
        cid = exp.check_id(i)
        (out / "reports" / f"{cid}.json").write_text(_dump(res.report), encoding="utf-8")
        if res.table is not None:
            tables.mkdir(exist_ok=True)
            _write_table(tables / f"{cid}.csv", res.table)
    (out / "summary.json").write_text(_dump(summary), encoding="utf-8")
    (out / "metadata.json").write_text(_dump(meta), encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="muhankel", description="Run (mu;nu)-Hankel operator checks from a JSON config.")
    p.add_argument("--config", type=Path, help="experiment config (JSON)")
    p.add_argument("--out", type=Path, default=Path("results"), help="output directory (default: results)")
    p.add_argument("--tol-scale", type=float, default=1.0, metavar="FACTOR",
                   help="multiply every tolerance by FACTOR (exploratory runs)")
    p.add_argument("--list-checks", action="store_true", help="list available checks and exit")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if args.list_checks:
        width = max(len(k) for k in REGISTRY)
        for name, (_, doc) in REGISTRY.items():
            print(f"{name:<{width}}  {doc}")
        return EXIT_OK
    if args.config is None:
        print("error: --config is required", file=sys.stderr)
        return EXIT_CONFIG
    if not args.tol_scale > 0:
        print("error: --tol-scale must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        threads = thread_count()
        exps = load_config(args.config, REGISTRY)
        results = execute(exps, args.tol_scale, threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    summary = summarize(exps, results)
    meta = {
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": str(args.config),
        "package_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "threads": threads,
        "tol_scale": args.tol_scale,
        "seeds": [exp.seed for exp in exps],
    }
    write_outputs(args.out, exps, results, summary, meta)
    for e in summary["checks"]:
        extras = ", ".join(f"{k}={_fmt(v)}" for k, v in e.items() if k not in ("id", "op", "pass"))
        print(f"{'PASS' if e['pass'] else 'FAIL'}  {e['id']}  {extras}")
    print(f"{summary['passed']}/{summary['total']} checks passed; reports in {args.out}")
    return EXIT_OK if summary["failed"] == 0 else EXIT_FAILED


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.9g}"
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, float) for x in v):
        return f"{v[0]:.9g}" if v[1] == 0 else f"{v[0]:.9g}{v[1]:+.9g}j"
    return str(v)


if __name__ == "__main__":
    raise SystemExit(main())
