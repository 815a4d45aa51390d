"""Reproduce the headline experiment tables for one scenario file.

Writes one CSV per experiment into the output directory, using the same
table format as the command line tool, so every file carries the effective
configuration and its hash.

    python3 scripts/run_experiments.py --scenario scenarios/tent.json --outdir results

Experiments: convergence (discounted values against the long-run level as
patience grows), patience (stationary-weighted row values against the
discount), rate_response (values against the revelation rate at a few
beliefs), strategies (Monte Carlo estimates for the bundled strategies
against their solver targets).
"""

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from persuasionlab import (  # noqa: E402
    asymptotic_value,
    estimate_discounted,
    estimate_renewal_average,
    interpolate,
    row_average_value,
    solve,
    strategy_couple_down,
    strategy_optimal,
    strategy_renewal_optimal,
)
from persuasionlab.cli import ResultTable, canonical_json, config_hash, effective_config, scenario_from_config  # noqa: E402
from persuasionlab.sim import FullRevealStrategy, NullStrategy  # noqa: E402

EXPERIMENTS = ("convergence", "patience", "rate_response", "strategies")


def _table(columns, cfg, name):
    table = ResultTable(columns)
    table.add_meta("experiment", name)
    table.add_meta("scenario_sha256", config_hash(cfg))
    table.add_meta("effective", canonical_json(cfg))
    return table


def _write(table, outdir: Path, name: str) -> None:
    path = outdir / f"{name}.csv"
    with open(path, "w", encoding="utf-8") as fh:
        table.write(fh)
    print(f"wrote {path}")


def run_convergence(sc, cfg, outdir):
    table = _table(["x", "lambda", "sup_gap", "prior_value", "asymptotic"], cfg, "convergence")
    prior = sc.initial_prior()
    for rate in (0.3, 0.5, 1.0):
        limit = asymptotic_value(rate, sc)
        for lam in (0.5, 0.8, 0.9, 0.95, 0.99, 0.995):
            res = solve(replace(sc, discount=lam, reveal_rate=rate), "reveal")
            gap = float(np.max(np.abs(res.value.values - limit)))
            table.add_row(rate, lam, gap, interpolate(res.value, prior), limit)
    _write(table, outdir, "convergence")


def run_patience(sc, cfg, outdir):
    table = _table(["lambda", "row_average"], cfg, "patience")
    for lam in [0.1 * i for i in range(10)] + [0.95, 0.99]:
        table.add_row(lam, row_average_value(lam, sc))
    _write(table, outdir, "patience")


def run_rate_response(sc, cfg, outdir):
    beliefs = [sc.initial_prior()] + [sc.chain.M[ell] for ell in range(sc.chain.k)]
    columns = ["lambda", "x", "value_prior"] + [f"value_reboot_{ell}" for ell in range(sc.chain.k)]
    table = _table(columns, cfg, "rate_response")
    for lam in (0.5, 0.9):
        for xi in range(1, 11):
            rate = 0.1 * xi
            value = solve(replace(sc, discount=lam, reveal_rate=rate), "reveal").value
            table.add_row(lam, rate, *(interpolate(value, p) for p in beliefs))
    _write(table, outdir, "rate_response")


def run_strategies(sc, cfg, outdir, samples, horizon):
    table = _table(["scored_stages", "mean", "std_error", "target"], cfg, "strategies")
    prior = sc.initial_prior()
    solved = solve(sc, "reveal" if sc.reveal_rate > 0 else "no_reveal")
    target = interpolate(solved.value, prior)

    for name, strat in (("null", NullStrategy(sc)), ("full", FullRevealStrategy(sc)),
                        ("optimal", strategy_optimal(sc))):
        est = estimate_discounted(sc, strat, samples=samples)
        table.add_meta(f"{name}_mean", est.mean)
        table.add_row(est.horizon, est.mean, est.std_error, target)

    if 0.0 < sc.reveal_rate <= 1.0:
        est = estimate_renewal_average(sc, strategy_renewal_optimal(sc), horizon=horizon,
                                       samples=samples)
        level = asymptotic_value(sc.reveal_rate, sc)
        table.add_meta("renewal_mean", est.mean)
        table.add_row(est.horizon, est.mean, est.std_error, level)

    if 0.0 < sc.reveal_rate < 0.7:
        res_y = solve(replace(sc, reveal_rate=0.7), "reveal")
        strat = strategy_couple_down(res_y.policy, sc.reveal_rate, 0.7, sc)
        est = estimate_discounted(sc, strat, samples=samples)
        table.add_meta("couple_0.7_mean", est.mean)
        table.add_row(est.horizon, est.mean, est.std_error, interpolate(res_y.value, prior))

    _write(table, outdir, "strategies")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scenario", default="scenarios/tent.json", metavar="PATH")
    parser.add_argument("--outdir", default="results", metavar="DIR")
    parser.add_argument("--experiment", choices=EXPERIMENTS + ("all",), default="all")
    parser.add_argument("--samples", type=int, default=2000,
                        help="replications per Monte Carlo estimate (default 2000)")
    parser.add_argument("--horizon", type=int, default=2000,
                        help="stages per renewal-average replication (default 2000)")
    args = parser.parse_args(argv)

    with open(args.scenario, encoding="utf-8") as fh:
        cfg = effective_config(json.load(fh))
    sc = scenario_from_config(cfg)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    wanted = EXPERIMENTS if args.experiment == "all" else (args.experiment,)
    for name in wanted:
        start = time.monotonic()
        if name == "convergence":
            run_convergence(sc, cfg, outdir)
        elif name == "patience":
            run_patience(sc, cfg, outdir)
        elif name == "rate_response":
            run_rate_response(sc, cfg, outdir)
        else:
            run_strategies(sc, cfg, outdir, args.samples, args.horizon)
        print(f"  {name}: {time.monotonic() - start:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
