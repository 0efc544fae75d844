"""Reproducible batch experiments over random channel draws.

Channels are sampled from a counter-based generator keyed by
``(seed, trial)``, so any trial can be regenerated in isolation and the
same seed always produces the same campaign, independent of scheme list,
sweep order, or worker count. Each channel entry is complex Gaussian with
unit variance (both quadratures at variance one half).

``run_sweep`` fixes the channel set per trial and re-solves it across the
swept parameter values and schemes, emitting one row per
(trial, value, scheme) in a stable order with a fixed column layout.
Floats are written through ``repr`` so identical runs produce
byte-identical CSV files.
"""

import csv
import io
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .baselines import power_min, rate_max
from .hermitian import numeric_rank
from .model import ChannelSet, SystemParams
from .optimizer import maximize_see

ROW_FIELDS = ("sweep_var", "sweep_value", "trial", "scheme", "status",
              "see", "rate", "power", "rank", "outer_iters",
              "inner_iters_total")
SUMMARY_FIELDS = ("sweep_var", "sweep_value", "scheme", "trials", "feasible",
                  "mean_see_all", "mean_see_feasible")
SCHEMES = ("see_max", "power_min", "rate_max")


def sample_channels(seed, trial, n_t):
    """Draw the (main, eavesdropper, primary) channel triple for a trial."""
    rng = np.random.Generator(np.random.Philox(key=[int(seed), int(trial)]))
    z = rng.standard_normal((3, n_t, 2)) * np.sqrt(0.5)
    h = z[..., 0] + 1j * z[..., 1]
    return ChannelSet(h_s=h[0], h_e=h[1], h_p=h[2])


def solve_scheme(scheme, ch, params):
    if scheme == "see_max":
        return maximize_see(ch, params)
    if scheme == "power_min":
        return power_min(ch, params)
    if scheme == "rate_max":
        return rate_max(ch, params)
    raise ValueError(f"unknown scheme {scheme!r}")


def _row(sweep_var, display_value, trial, scheme, sol):
    return {
        "sweep_var": sweep_var,
        "sweep_value": float(display_value),
        "trial": int(trial),
        "scheme": scheme,
        "status": sol.status,
        "see": float(sol.see),
        "rate": float(sol.rate),
        "power": float(sol.power),
        "rank": numeric_rank(sol.q.matrix) if sol.q is not None else 0,
        "outer_iters": int(sol.outer_iters),
        "inner_iters_total": int(sol.inner_iters_total),
    }


def instance_rows(ch, params, schemes=SCHEMES, sweep_var="none",
                  sweep_value=0.0, trial=0):
    """Rows for one channel draw across schemes (shared column layout)."""
    return [_row(sweep_var, sweep_value, trial, s,
                 solve_scheme(s, ch, params)) for s in schemes]


def _trial_rows(args):
    (seed, trial, n_t, sweep_var, values, display, base, schemes) = args
    ch = sample_channels(seed, trial, n_t)
    rows = []
    for value, shown in zip(values, display):
        params = SystemParams(n_t=n_t, **{**base, sweep_var: value})
        for scheme in schemes:
            rows.append(_row(sweep_var, shown, trial, scheme,
                             solve_scheme(scheme, ch, params)))
    return rows


def run_sweep(sweep_var, sweep_values, n_t, trials, seed, base=None,
              schemes=SCHEMES, display_values=None, jobs=None):
    """Solve every (trial, sweep value, scheme) cell; rows in trial order.

    ``base`` holds the non-swept SystemParams fields (linear units).
    ``display_values`` optionally replaces the sweep_value column content
    (e.g. the dB figures the values came from) without affecting the
    solve. ``jobs`` > 1 distributes trials over processes; the row order
    and content are identical either way.
    """
    base = dict(base or {})
    base.pop(sweep_var, None)
    values = [float(v) for v in sweep_values]
    display = ([float(v) for v in display_values]
               if display_values is not None else values)
    if len(display) != len(values):
        raise ValueError("display_values must match sweep_values")
    for s in schemes:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s!r}")
    tasks = [(seed, t, n_t, sweep_var, values, display, base, tuple(schemes))
             for t in range(trials)]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_trial = list(pool.map(_trial_rows, tasks))
    else:
        per_trial = [_trial_rows(t) for t in tasks]
    return [row for rows in per_trial for row in rows]


def summarize(rows):
    """Per (sweep value, scheme) averages, in first-appearance order.

    ``mean_see_all`` counts infeasible trials as zero ratio (the usual
    reporting convention); ``mean_see_feasible`` averages the solved
    trials only and is nan when every trial was infeasible.
    """
    groups = {}
    order = []
    for r in rows:
        key = (r["sweep_var"], r["sweep_value"], r["scheme"])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r)
    out = []
    for key in order:
        rs = groups[key]
        sees = [r["see"] for r in rs]
        feas = [r["see"] for r in rs if r["status"] != "Infeasible"]
        out.append({
            "sweep_var": key[0],
            "sweep_value": key[1],
            "scheme": key[2],
            "trials": len(rs),
            "feasible": len(feas),
            "mean_see_all": float(np.mean(sees)) if sees else float("nan"),
            "mean_see_feasible": (float(np.mean(feas)) if feas
                                  else float("nan")),
        })
    return out


def _format(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(rows, fields, out):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(fields)
    for r in rows:
        writer.writerow([_format(r[f]) for f in fields])


def rows_to_csv(rows, path=None, fields=ROW_FIELDS):
    """Write rows (or any dicts with ``fields``) as deterministic CSV."""
    if path is None:
        buf = io.StringIO()
        _write_csv(rows, fields, buf)
        return buf.getvalue()
    with open(path, "w", newline="") as fh:
        _write_csv(rows, fields, fh)
    return None


def summary_to_csv(rows, path=None):
    return rows_to_csv(rows, path=path, fields=SUMMARY_FIELDS)
