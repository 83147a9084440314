"""Command-line entry point: run analytics and verification experiments.

Subcommands are thin wrappers over the library, plus a config-driven
``run`` mode for reproducible experiment manifests (TOML).  Machine-readable
outputs: CSV tables (header line, full-precision floats, byte-identical for
identical config and seed) and a JSON report carrying the config echo,
per-suite tables, pass flags, wall-clock and RNG provenance.

Exit codes: 0 all requested checks passed, 2 at least one suite failed,
1 configuration or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import analytics
from .aggregation import REGIMES, CenteringMode
from .limits import sample_limit_path
from .models import AtomsMixing, BetaMixing, Degenerate, InarModel, RandomizedModel
from .rng import RngStream
from .sampling import simulate_inar_path, simulate_randomized_ensemble
from .verification import SUITES, SuiteBudget, default_model, regime_suite

FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 1


def _parse_mixing(text: str):
    """Mixing-law mini-syntax: degenerate:a0 | beta:a,b | atoms:p1,w1,p2,w2,..."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "degenerate":
            return Degenerate(float(rest))
        if kind == "beta":
            a, b = (float(x) for x in rest.split(","))
            return BetaMixing(a, b)
        if kind == "atoms":
            vals = [float(x) for x in rest.split(",")]
            pts, wts = vals[0::2], vals[1::2]
            return AtomsMixing(pts, wts)
    except (ValueError, IndexError) as exc:
        raise ValueError(f"malformed mixing spec {text!r}") from exc
    raise ValueError(f"unknown mixing kind {kind!r} (degenerate | beta | atoms)")


def _model_from_args(args) -> InarModel | RandomizedModel:
    if args.mixing is None:
        if args.alpha is None:
            raise ValueError("need --alpha (deterministic) or --mixing")
        return InarModel(args.lam, args.alpha)
    return RandomizedModel(args.lam, _parse_mixing(args.mixing))


def _csv_cell(x) -> str:
    if isinstance(x, str):
        return x
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def _emit(args, payload: dict, csv_rows=None, csv_header=None) -> None:
    payload = {"format_version": FORMAT_VERSION, **payload}
    if args.out:
        out = Path(args.out)
        if args.format == "csv":
            if csv_rows is None:
                raise ValueError("this subcommand has no CSV representation")
            _write_csv(out, csv_header, csv_rows)
        else:
            out.write_text(json.dumps(payload, indent=2) + "\n")
        print(f"wrote {out}")
    else:
        print(json.dumps(payload, indent=2))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_simulate(args) -> int:
    model = _model_from_args(args)
    rng = RngStream(args.seed)
    if isinstance(model, InarModel):
        path = simulate_inar_path(model, args.length, rng)
        rows = [(k, x) for k, x in enumerate(path)]
        _emit(args, {"command": "simulate", "seed": args.seed, "path": path.tolist()},
              csv_rows=rows, csv_header=["k", "x"])
    else:
        alphas, paths = simulate_randomized_ensemble(model, args.copies, args.length, rng)
        rows = []
        for j in range(args.copies):
            for k in range(args.length + 1):
                rows.append((j, k, paths[j, k]))
        _emit(args, {"command": "simulate", "seed": args.seed,
                     "alphas": alphas.tolist(), "paths": paths.tolist()},
              csv_rows=rows, csv_header=["copy", "k", "x"])
    return 0


def _cmd_pgf(args) -> int:
    model = InarModel(args.lam, args.alpha)
    z = [complex(part) for part in args.z.split(",")]
    val = analytics.joint_pgf(model, z)
    _emit(args, {"command": "pgf", "z": [str(c) for c in z],
                 "value_re": val.real, "value_im": val.imag},
          csv_rows=[(val.real, val.imag)], csv_header=["re", "im"])
    return 0


def _cmd_constants(args) -> int:
    if args.mixing is not None:
        rmodel = RandomizedModel(args.lam, _parse_mixing(args.mixing))
        consts = analytics.limit_constants(rmodel)
    elif args.psi1 is not None:
        if args.beta is None:
            return _fail("--psi1 needs --beta")
        consts = analytics.limit_constants_from(args.beta, args.psi1, args.lam)
    elif args.beta is not None:
        consts = analytics.limit_constants(
            RandomizedModel(args.lam, BetaMixing(args.a, args.beta))
        )
    else:
        return _fail("need --mixing, or --beta (Beta law), or --beta with explicit --psi1")
    table = {
        "c_fbm": consts.c_fbm,
        "K_beta": consts.K_beta,
        "k_beta": consts.k_beta,
        "sigma2": consts.sigma2,
        "w_var_43": consts.w_var_43,
        "w_var_411": consts.w_var_411,
    }
    rows = [(k, v) for k, v in table.items() if v is not None]
    for name, val in rows:
        print(f"{name} = {val:.7f}")
    _emit(args, {"command": "constants", "constants": {k: v for k, v in rows}},
          csv_rows=rows, csv_header=["constant", "value"])
    return 0


def _cmd_markov_gap(args) -> int:
    rmodel = RandomizedModel(args.lam, _parse_mixing(args.mixing))
    rpt = analytics.markov_gap(rmodel)
    print(f"p_cond2 = {rpt.p_cond2:.10f}")
    print(f"p_cond1 = {rpt.p_cond1:.10f}")
    print(f"gap     = {rpt.gap:.10f}")
    _emit(args, {"command": "markov-gap", "p_cond2": rpt.p_cond2,
                 "p_cond1": rpt.p_cond1, "gap": rpt.gap},
          csv_rows=[(rpt.p_cond2, rpt.p_cond1, rpt.gap)],
          csv_header=["p_cond2", "p_cond1", "gap"])
    return 0


def _cmd_fbm_check(args) -> int:
    val = analytics.fbm_variance_check(args.beta)
    print(f"{val:.6f}")
    _emit(args, {"command": "fbm-check", "beta": args.beta, "value": val},
          csv_rows=[(args.beta, val)], csv_header=["beta", "value"])
    return 0 if abs(val - 1.0) <= 1e-6 else 2


def _cmd_sample_limit(args) -> int:
    suite = SUITES.get(args.regime)
    if suite is None:
        return _fail(f"unknown regime {args.regime!r}; known: {sorted(SUITES)}")
    model = default_model(args.regime)
    law = suite.law_builder(model)
    t_grid = np.asarray([float(x) for x in args.t_grid.split(",")])
    draws = sample_limit_path(law, t_grid, RngStream(args.seed), size=args.samples)
    rows = [tuple(row) for row in draws]
    _emit(args, {"command": "sample-limit", "regime": args.regime,
                 "t_grid": t_grid.tolist(), "samples": draws.tolist()},
          csv_rows=rows, csv_header=[f"t={t:g}" for t in t_grid])
    return 0


def _suite_csv_rows(report_dict: dict):
    rows = []

    def walk(checks):
        for c in checks:
            if c.get("kind") == "order":
                walk(c["checks"])
            elif c.get("kind") == "cov":
                for (a, b), e, t, s in zip(c["pairs"], c["empirical"], c["theoretical"], c["se"]):
                    rows.append(("cov", a, b, e, t, s))
            elif c.get("kind") == "cf":
                for i, th in enumerate(c["theta_grid"]):
                    for j, t in enumerate(c["t_grid"]):
                        rows.append(("cf_re", th, t, c["empirical_re"][i][j],
                                     c["theoretical_re"][i][j], c["se"][i][j]))
                        rows.append(("cf_im", th, t, c["empirical_im"][i][j],
                                     c["theoretical_im"][i][j], c["se"][i][j]))
            elif c.get("kind") == "ks_at_1":
                rows.append(("ks", 1.0, 1.0, c["statistic"], c["threshold"], 0.0))
            elif c.get("kind") == "bridge_zero_at_1":
                rows.append(("bridge_zero", 1.0, 1.0, float(c["passed"]), 1.0, 0.0))
    walk(report_dict["checks"])
    return rows


def _run_suites(suite_ids, seed, out_prefix, fmt, budget_overrides=None) -> int:
    reports = []
    all_pass = True
    wall = {}
    for sid in suite_ids:
        if sid not in SUITES:
            return _fail(f"unknown suite {sid!r}; known: {sorted(SUITES)}")
        budget = None
        if budget_overrides and sid in budget_overrides:
            budget = budget_overrides[sid]
        t0 = time.time()
        rpt = regime_suite(sid, rng=RngStream(seed), budget=budget)
        wall[sid] = time.time() - t0
        reports.append(rpt)
        all_pass &= rpt.passed
        print(f"suite {sid}: {'PASS' if rpt.passed else 'FAIL'} ({wall[sid]:.1f}s)")
    payload = {
        "command": "verify",
        "seed": seed,
        "rng": {"kind": "pcg64", "seed": seed},
        "wall_clock_s": wall,
        "suites": [r.to_dict() for r in reports],
        "all_passed": bool(all_pass),
    }
    if out_prefix:
        out = Path(out_prefix)
        out.parent.mkdir(parents=True, exist_ok=True)
        report_path = out.with_suffix(".json")
        report_path.write_text(json.dumps({"format_version": FORMAT_VERSION, **payload}, indent=2) + "\n")
        print(f"wrote {report_path}")
        if fmt == "csv":
            for r in reports:
                rows = _suite_csv_rows(r.to_dict())
                csv_path = out.parent / f"{out.name}_{r.suite}.csv"
                _write_csv(csv_path, ["kind", "key1", "key2", "empirical", "theoretical", "se"], rows)
                print(f"wrote {csv_path}")
    else:
        print(json.dumps({"format_version": FORMAT_VERSION, **payload}, indent=2))
    return 0 if all_pass else 2


def _cmd_verify(args) -> int:
    if args.config:
        return _run_config(args.config)
    suite_ids = args.regime.split(",") if args.regime else sorted(SUITES)
    return _run_suites(suite_ids, args.seed, args.out, args.format)


def _budget_from_table(table: dict, base: SuiteBudget) -> SuiteBudget:
    known = {"N", "n", "replicates", "t_grid", "theta_grid", "gate", "rel_tol", "lags",
             "N_ladder", "n_ladder"}
    bad = set(table) - known
    if bad:
        raise ValueError(f"unknown budget keys {sorted(bad)}")
    kwargs = {}
    for key in known & set(table):
        val = table[key]
        kwargs[key] = tuple(val) if isinstance(val, list) else val
    from dataclasses import replace
    return replace(base, **kwargs)


def _run_config(path: str) -> int:
    """Config-driven run; validates everything before any simulation starts."""
    p = Path(path)
    if not p.is_file():
        return _fail(f"config file {path!r} not found")
    try:
        cfg = tomllib.loads(p.read_text())
    except tomllib.TOMLDecodeError as exc:
        return _fail(f"malformed config: {exc}")

    problems = []
    seed = cfg.get("seed", 2024)
    if not isinstance(seed, int) or seed < 0:
        problems.append("seed must be a nonnegative integer")
    suites_cfg = cfg.get("suites", sorted(SUITES))
    if isinstance(suites_cfg, str):
        suites_cfg = [suites_cfg]
    for sid in suites_cfg:
        if sid not in SUITES:
            problems.append(f"unknown suite {sid!r}")
    out_prefix = cfg.get("out", None)
    fmt = cfg.get("format", "json")
    if fmt not in ("json", "csv"):
        problems.append("format must be 'json' or 'csv'")

    budgets = {}
    models = {}
    for sid in suites_cfg:
        if sid not in SUITES:
            continue
        table = cfg.get(sid, {})
        if not isinstance(table, dict):
            problems.append(f"[{sid}] must be a table")
            continue
        model_tbl = table.pop("model", None)
        try:
            if model_tbl is not None:
                lam = float(model_tbl.get("lambda", 1.0))
                if "mixing" in model_tbl:
                    models[sid] = RandomizedModel(lam, _parse_mixing(model_tbl["mixing"]))
                else:
                    models[sid] = InarModel(lam, float(model_tbl["alpha"]))
            if table:
                budgets[sid] = _budget_from_table(table, SUITES[sid].budget)
        except (ValueError, KeyError, TypeError) as exc:
            problems.append(f"[{sid}]: {exc}")
    # fail fast: validate model/regime compatibility before simulating
    for sid, model in models.items():
        reg_id = SUITES[sid].regime_id
        if reg_id in REGIMES:
            try:
                REGIMES[reg_id].check_model(model)
            except ValueError as exc:
                problems.append(f"[{sid}]: {exc}")
        if SUITES[sid].centering is CenteringMode.UNCONDITIONAL or (
            reg_id in REGIMES and REGIMES[reg_id].centering is CenteringMode.UNCONDITIONAL
        ):
            if isinstance(model, RandomizedModel):
                beta = model.mixing.beta
                if beta is not None and beta <= 0.0:
                    problems.append(
                        f"[{sid}]: unconditional centering needs a finite mean, "
                        f"i.e. beta > 0 (E((1-alpha)^-1) is finite iff beta > 0); got beta={beta}"
                    )
    if problems:
        for msg in problems:
            print(f"config error: {msg}", file=sys.stderr)
        return 1

    all_pass = True
    reports = []
    wall = {}
    for sid in suites_cfg:
        t0 = time.time()
        rpt = regime_suite(sid, model=models.get(sid), rng=RngStream(seed),
                           budget=budgets.get(sid))
        wall[sid] = time.time() - t0
        reports.append(rpt)
        all_pass &= rpt.passed
        print(f"suite {sid}: {'PASS' if rpt.passed else 'FAIL'} ({wall[sid]:.1f}s)")
    payload = {
        "format_version": FORMAT_VERSION,
        "command": "verify",
        "config": cfg,
        "seed": seed,
        "rng": {"kind": "pcg64", "seed": seed},
        "wall_clock_s": wall,
        "suites": [r.to_dict() for r in reports],
        "all_passed": bool(all_pass),
    }
    if out_prefix:
        out = Path(out_prefix)
        out.parent.mkdir(parents=True, exist_ok=True)
        report_path = out.with_suffix(".json")
        report_path.write_text(json.dumps(payload, indent=2) + "\n")
        print(f"wrote {report_path}")
        if fmt == "csv":
            for r in reports:
                rows = _suite_csv_rows(r.to_dict())
                csv_path = out.parent / f"{out.name}_{r.suite}.csv"
                _write_csv(csv_path, ["kind", "key1", "key2", "empirical", "theoretical", "se"], rows)
                print(f"wrote {csv_path}")
    else:
        print(json.dumps(payload, indent=2))
    return 0 if all_pass else 2


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(sp) -> None:
    sp.add_argument("--seed", type=int, default=2024)
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="inarlab",
        description="Simulation and verification lab for aggregated randomized INAR(1) processes",
    )
    sub = ap.add_subparsers(dest="command")

    sp = sub.add_parser("simulate", help="simulate stationary paths or ensembles")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--mixing", type=str, default=None,
                    help="degenerate:a0 | beta:a,b | atoms:p1,w1,...")
    sp.add_argument("--length", type=int, default=100)
    sp.add_argument("--copies", type=int, default=1)
    _add_common(sp)
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("pgf", help="evaluate the joint generating function")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--z", type=str, required=True, help="comma-separated complex values")
    _add_common(sp)
    sp.set_defaults(func=_cmd_pgf)

    sp = sub.add_parser("constants", help="limit-law constants for a mixing law")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--a", type=float, default=0.0)
    sp.add_argument("--psi1", type=float, default=None,
                    help="optional cross-check against the mixing law's own psi1")
    sp.add_argument("--mixing", type=str, default=None)
    _add_common(sp)
    sp.set_defaults(func=_cmd_constants)

    sp = sub.add_parser("markov-gap", help="conditional-probability gap of the randomized model")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--mixing", type=str, required=True)
    _add_common(sp)
    sp.set_defaults(func=_cmd_markov_gap)

    sp = sub.add_parser("fbm-check", help="normalized fractional-Brownian variance integral (= 1)")
    sp.add_argument("--beta", type=float, required=True)
    _add_common(sp)
    sp.set_defaults(func=_cmd_fbm_check)

    sp = sub.add_parser("sample-limit", help="draw reference samples from a regime's limit law")
    sp.add_argument("--regime", type=str, required=True)
    sp.add_argument("--t-grid", type=str, default="0.25,0.5,0.75,1.0")
    sp.add_argument("--samples", type=int, default=1000)
    _add_common(sp)
    sp.set_defaults(func=_cmd_sample_limit)

    sp = sub.add_parser("verify", help="run verification suites")
    sp.add_argument("--regime", type=str, default=None,
                    help="comma-separated suite ids (default: all)")
    sp.add_argument("--config", type=str, default=None, help="TOML experiment manifest")
    _add_common(sp)
    sp.set_defaults(func=_cmd_verify)

    return ap


def main(argv=None) -> int:
    import os

    threads = os.environ.get("INARLAB_THREADS")
    if threads is not None:
        # the only supported environment override: caps BLAS/OpenMP pools
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:  # argparse prints usage itself
        return 0 if exc.code in (0, None) else 1
    if args.command is None:
        ap.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except (ValueError, KeyError, TypeError, ArithmeticError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
