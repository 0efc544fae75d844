"""Command-line front end.

Subcommands: ``solve`` (one instance, JSON result), ``trace`` (per-
iteration CSV tables), ``sweep`` (randomized campaign, CSV rows +
optional summary), ``compare`` (all schemes on one instance), ``oracle``
(exhaustive two-antenna reference). Instances come from a JSON file
(--instance) or a seeded random draw (--seed/--trial). Exit codes:
0 success, 2 infeasible instance on single-instance commands, 1 error.

The compute backend is chosen by the SEECR_BACKEND environment variable
("numba" by default, "numpy" for the plain fallback).
"""

import argparse
import json
import sys

import numpy as np

from .baselines import power_min, rate_max
from .harness import (ROW_FIELDS, SCHEMES, instance_rows, rows_to_csv,
                      run_sweep, sample_channels, summarize, summary_to_csv)
from .hermitian import complex_to_pairs, numeric_rank
from .model import (covariance_to_pairs, db_to_linear, dump_instance,
                    load_instance, params_from_dict)
from .optimizer import maximize_see
from .oracle import GridSpec, grid_feasibility, grid_search

_DB_VARS = ("e_s", "p_tx", "p_f")


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; keep 2 reserved for "infeasible"
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(1)


def _add_instance_args(p):
    g = p.add_argument_group("instance")
    g.add_argument("--instance", help="JSON instance file")
    g.add_argument("--seed", type=int, default=0,
                   help="campaign seed for the random draw")
    g.add_argument("--trial", type=int, default=0,
                   help="trial index within the seed")
    g.add_argument("--n-t", type=int, default=3, dest="n_t",
                   help="transmit antennas for the random draw")
    q = p.add_argument_group("parameters (linear unless _db)")
    q.add_argument("--r-d", type=float, default=None, dest="r_d")
    q.add_argument("--e-s", type=float, default=None, dest="e_s")
    q.add_argument("--e-s-db", type=float, default=None, dest="e_s_db")
    q.add_argument("--p-tx", type=float, default=None, dest="p_tx")
    q.add_argument("--p-tx-db", type=float, default=None, dest="p_tx_db")
    q.add_argument("--p-f", type=float, default=None, dest="p_f")
    q.add_argument("--p-f-db", type=float, default=None, dest="p_f_db")
    q.add_argument("--p-c", type=float, default=None, dest="p_c")
    q.add_argument("--eta-eh", type=float, default=None, dest="eta_eh")
    q.add_argument("--xi", type=float, default=None, dest="xi")
    q.add_argument("--eps-outer", type=float, default=None, dest="eps_outer")
    q.add_argument("--zeta-inner", type=float, default=None,
                   dest="zeta_inner")


def _params_raw(args):
    raw = {}
    for key in ("r_d", "e_s", "e_s_db", "p_tx", "p_tx_db", "p_f", "p_f_db",
                "p_c", "eta_eh", "xi", "eps_outer", "zeta_inner"):
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    # keep single-instance runs usable with no flags at all
    if "r_d" not in raw:
        raw["r_d"] = 0.5
    if "e_s" not in raw and "e_s_db" not in raw:
        raw["e_s_db"] = 0.0
    if "p_tx" not in raw and "p_tx_db" not in raw:
        raw["p_tx_db"] = 13.0
    return raw


def _instance(args):
    if args.instance:
        return load_instance(args.instance)
    ch = sample_channels(args.seed, args.trial, args.n_t)
    return ch, params_from_dict(args.n_t, _params_raw(args))


def _cert_doc(cert):
    if cert is None:
        return None
    return {
        "passed": bool(cert.passed),
        "rank": int(cert.rank),
        "eig_ratio": float(cert.eig_ratio),
        "stationarity_residual": float(cert.stationarity_residual),
        "multipliers": {k: float(v) for k, v in cert.multipliers.items()},
        "active": {k: bool(v) for k, v in cert.active.items()},
        "beamformer": (complex_to_pairs(cert.beamformer)
                       if cert.beamformer is not None else None),
    }


def _solution_doc(sol):
    doc = {
        "status": sol.status,
        "see": float(sol.see),
        "rate": float(sol.rate),
        "power": float(sol.power),
        "lam": float(sol.lam),
        "outer_iters": int(sol.outer_iters),
        "inner_iters_total": int(sol.inner_iters_total),
        "metadata": {k: (float(v) if isinstance(v, (int, float))
                         and not isinstance(v, bool) else v)
                     for k, v in sol.metadata.items()},
    }
    if sol.q is not None:
        doc["q"] = covariance_to_pairs(sol.q)
        doc["rank"] = int(numeric_rank(sol.q.matrix))
    doc["certificate"] = _cert_doc(sol.certificate)
    return doc


def _emit(doc, out):
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_solve(args):
    ch, params = _instance(args)
    sol = maximize_see(ch, params, warm_start=not args.cold,
                       polish=not args.no_polish,
                       run_certification=not args.no_certify)
    doc = _solution_doc(sol)
    if args.echo_instance:
        doc["instance"] = dump_instance(ch, params)
    _emit(doc, args.out)
    return 2 if sol.status == "Infeasible" else 0


def _trace_tables(sol):
    outer = [{
        "outer": o.idx, "lam": float(o.lam), "rate": float(o.rate),
        "power": float(o.power), "see": float(o.see),
        "delta_f": float(o.delta_f), "inner_iters": len(o.inner),
    } for o in sol.trace.outer]
    inner = [{
        "outer": o.idx, "inner": it.idx, "eta": float(it.eta),
        "surrogate": float(it.surrogate),
        "newton_iters": int(it.newton_iters),
    } for o in sol.trace.outer for it in o.inner]
    return outer, inner


_OUTER_FIELDS = ("outer", "lam", "rate", "power", "see", "delta_f",
                 "inner_iters")
_INNER_FIELDS = ("outer", "inner", "eta", "surrogate", "newton_iters")


def _cmd_trace(args):
    ch, params = _instance(args)
    sol = maximize_see(ch, params, warm_start=not args.cold,
                       polish=not args.no_polish, run_certification=False)
    if sol.status == "Infeasible":
        print("instance infeasible; no iterations to trace", file=sys.stderr)
        return 2
    outer, inner = _trace_tables(sol)
    if args.out_prefix:
        rows_to_csv(outer, args.out_prefix + "_outer.csv", _OUTER_FIELDS)
        rows_to_csv(inner, args.out_prefix + "_inner.csv", _INNER_FIELDS)
    else:
        print("# outer")
        print(rows_to_csv(outer, None, _OUTER_FIELDS), end="")
        print("# inner")
        print(rows_to_csv(inner, None, _INNER_FIELDS), end="")
    return 0


def _cmd_sweep(args):
    values = [float(v) for v in args.values.split(",") if v.strip() != ""]
    if not values:
        print("error: --values is empty", file=sys.stderr)
        return 1
    display = None
    if args.db:
        if args.var not in _DB_VARS:
            print(f"error: --db applies to {', '.join(_DB_VARS)}",
                  file=sys.stderr)
            return 1
        display = values
        values = [db_to_linear(v) for v in values]
    raw = _params_raw(args)
    raw.pop(args.var, None)
    raw.pop(args.var + "_db", None)
    base_params = params_from_dict(args.n_t, {**raw, args.var: values[0]})
    base = {k: getattr(base_params, k) for k in (
        "r_d", "e_s", "p_tx", "p_f", "p_c", "eta_eh", "xi", "eps_outer",
        "zeta_inner")}
    schemes = tuple(s.strip() for s in args.schemes.split(","))
    rows = run_sweep(args.var, values, n_t=args.n_t, trials=args.trials,
                     seed=args.seed, base=base, schemes=schemes,
                     display_values=display, jobs=args.jobs)
    text = rows_to_csv(rows, args.out)
    if args.out is None:
        print(text, end="")
    if args.summary:
        summary_to_csv(summarize(rows), args.summary)
    return 0


def _cmd_compare(args):
    ch, params = _instance(args)
    rows = instance_rows(ch, params)
    text = rows_to_csv(rows, args.out)
    if args.out is None:
        print(text, end="")
    see_row = next(r for r in rows if r["scheme"] == "see_max")
    return 2 if see_row["status"] == "Infeasible" else 0


def _cmd_oracle(args):
    ch, params = _instance(args)
    grid = GridSpec(theta_steps=args.theta_steps, phi_steps=args.phi_steps,
                    power_steps=args.power_steps, mix_steps=args.mix_steps,
                    refine_passes=args.refine)
    if args.objective == "feasibility":
        feasible, res = grid_feasibility(ch, params, grid)
        doc = {"feasible": bool(feasible), "margin": float(res.value),
               "theta": float(res.theta), "phi": float(res.phi),
               "mu": float(res.mu), "p": float(res.p)}
        _emit(doc, args.out)
        return 0 if feasible else 2
    res = grid_search(ch, params, args.objective, grid, lam=args.lam)
    doc = {
        "objective": res.objective,
        "found": bool(res.found),
        "value": float(res.value),
        "slack": float(res.slack),
        "theta": float(res.theta), "phi": float(res.phi),
        "mu": float(res.mu), "p": float(res.p),
        "q": covariance_to_pairs(res.q) if res.q is not None else None,
    }
    if args.against_solver:
        sol = {"see": maximize_see, "rate": rate_max,
               "power": power_min}.get(args.objective)
        if sol is not None:
            s = sol(ch, params)
            ref = {"see": s.see, "rate": s.rate,
                   "power": s.q.trace() if s.q is not None else 0.0}
            doc["solver_value"] = float(ref[args.objective])
            doc["solver_status"] = s.status
            doc["abs_diff"] = abs(doc["solver_value"] - doc["value"])
    _emit(doc, args.out)
    return 0 if res.found else 2


def build_parser():
    p = _Parser(prog="seecr", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="maximize the rate/power ratio")
    _add_instance_args(s)
    s.add_argument("--cold", action="store_true",
                   help="re-anchor every outer round at the phase-I point")
    s.add_argument("--no-polish", action="store_true")
    s.add_argument("--no-certify", action="store_true")
    s.add_argument("--echo-instance", action="store_true",
                   help="include the solved instance in the output")
    s.add_argument("--out", help="write JSON here instead of stdout")
    s.set_defaults(fn=_cmd_solve)

    s = sub.add_parser("trace", help="per-iteration CSV tables")
    _add_instance_args(s)
    s.add_argument("--cold", action="store_true")
    s.add_argument("--no-polish", action="store_true")
    s.add_argument("--out-prefix",
                   help="write <prefix>_outer.csv and <prefix>_inner.csv")
    s.set_defaults(fn=_cmd_trace)

    s = sub.add_parser("sweep", help="randomized campaign over one variable")
    _add_instance_args(s)
    s.add_argument("--var", required=True,
                   choices=("r_d", "e_s", "p_tx", "p_f"))
    s.add_argument("--values", required=True,
                   help="comma-separated sweep values")
    s.add_argument("--db", action="store_true",
                   help="values are dB; converted for e_s/p_tx/p_f")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--schemes", default=",".join(SCHEMES))
    s.add_argument("--jobs", type=int, default=None)
    s.add_argument("--out", help="rows CSV path (stdout when omitted)")
    s.add_argument("--summary", help="also write per-value averages here")
    s.set_defaults(fn=_cmd_sweep)

    s = sub.add_parser("compare", help="all schemes on one instance")
    _add_instance_args(s)
    s.add_argument("--out")
    s.set_defaults(fn=_cmd_compare)

    s = sub.add_parser("oracle", help="exhaustive 2-antenna reference")
    _add_instance_args(s)
    s.add_argument("--objective", default="see",
                   choices=("see", "dinkelbach", "power", "rate",
                            "feasibility"))
    s.add_argument("--lam", type=float, default=0.0)
    s.add_argument("--refine", type=int, default=1)
    s.add_argument("--theta-steps", type=int, default=64)
    s.add_argument("--phi-steps", type=int, default=64)
    s.add_argument("--power-steps", type=int, default=128)
    s.add_argument("--mix-steps", type=int, default=8)
    s.add_argument("--against-solver", action="store_true")
    s.add_argument("--out")
    s.set_defaults(fn=_cmd_oracle)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
