"""Exhaustive grid reference for two-antenna instances.

Any 2x2 covariance can be written p (mu u u^H + (1 - mu) u_perp u_perp^H)
with u = (cos theta, e^{i phi} sin theta), its orthogonal complement
u_perp, trace p and principal weight mu in [1/2, 1] -- global phases drop
out of every quadratic form. Scanning (theta, phi, mu, p) therefore
covers the whole feasible set up to grid resolution, which gives an
optimizer-free reference answer to compare the solver against.

The scan reports the best grid value plus a local sensitivity estimate
(``slack``): the largest objective change over one-step probes around the
winner on the final (refined) grid. Comparisons against the solver should
allow max(tolerance, slack).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .backend import BACKEND
from .hermitian import HermitianMatrix
from .model import LN2

MARGIN_THRESHOLD = 1e-6  # min-margin level that counts as strictly feasible

_OBJ_CODES = {
    "see": _kernels.OBJ_SEE,
    "dinkelbach": _kernels.OBJ_DINKELBACH,
    "power": _kernels.OBJ_MIN_TRACE,
    "rate": _kernels.OBJ_RATE,
    "margin": _kernels.OBJ_MIN_MARGIN,
}


@dataclass(frozen=True)
class GridSpec:
    """Resolution of the (theta, phi, mu, p) scan."""

    theta_steps: int = 64
    phi_steps: int = 64
    power_steps: int = 128
    mix_steps: int = 8
    power_max: float | None = None
    refine_passes: int = 1
    feas_slack: float = 1e-9

    def __post_init__(self):
        for name in ("theta_steps", "phi_steps", "power_steps", "mix_steps"):
            if int(getattr(self, name)) < 2:
                raise ValueError(f"{name} must be at least 2")
        if self.refine_passes < 0:
            raise ValueError("refine_passes must be non-negative")
        if self.power_max is not None and self.power_max <= 0:
            raise ValueError("power_max must be positive")


@dataclass
class OracleResult:
    value: float
    q: HermitianMatrix | None
    found: bool
    theta: float
    phi: float
    mu: float
    p: float
    slack: float
    objective: str


def rank_two_candidate(theta, phi, mu, p):
    """Covariance p (mu u u^H + (1 - mu) u_perp u_perp^H) as a matrix."""
    u = np.array([np.cos(theta), np.exp(1j * phi) * np.sin(theta)])
    v = np.array([-np.exp(-1j * phi) * np.sin(theta), np.cos(theta)])
    q = p * (mu * np.outer(u, u.conj()) + (1.0 - mu) * np.outer(v, v.conj()))
    return HermitianMatrix.from_matrix(q)


def _tables(ch, theta_vals, phi_vals):
    """|h^H u|^2 and |h^H u_perp|^2 per (theta, phi), flattened theta-major."""
    ct = np.cos(theta_vals)[:, None]
    st = np.sin(theta_vals)[:, None]
    eip = np.exp(1j * phi_vals)[None, :]
    out = []
    for h in (ch.h_s, ch.h_e, ch.h_p):
        hu = np.conj(h[0]) * ct + np.conj(h[1]) * eip * st
        hv = -np.conj(h[0]) * np.conj(eip) * st + np.conj(h[1]) * ct
        out.append(np.ascontiguousarray(np.abs(hu).ravel() ** 2))
        out.append(np.ascontiguousarray(np.abs(hv).ravel() ** 2))
    return out


def _scan(ch, params, axes, obj_code, lam, include_rate, feas_slack):
    theta_vals, phi_vals, mu_vals, p_vals = axes
    tabs = _tables(ch, theta_vals, phi_vals)
    fn = _kernels.grid_scan if BACKEND == "numba" else _kernels.grid_scan_numpy
    found, bd, bu, bp, best = fn(
        tabs[0], tabs[1], tabs[2], tabs[3], tabs[4], tabs[5],
        np.ascontiguousarray(p_vals), np.ascontiguousarray(mu_vals),
        obj_code, lam, 2.0 ** params.r_d, params.e_s, params.eta_eh,
        params.p_f, params.p_tx, params.p_c, params.xi,
        1 if include_rate else 0, feas_slack)
    if not found:
        return False, best, (np.nan, np.nan, np.nan, np.nan)
    it, ip = divmod(bd, phi_vals.size)
    point = (float(theta_vals[it]), float(phi_vals[ip]),
             float(mu_vals[bu]), float(p_vals[bp]))
    return True, best, point


def _point_value(ch, params, obj_code, lam, include_rate, feas_slack,
                 theta, phi, mu, p):
    """Objective at one candidate, matching the kernel formulas exactly."""
    hs, he, hp = ch.h_s, ch.h_e, ch.h_p
    u = np.array([np.cos(theta), np.exp(1j * phi) * np.sin(theta)])
    v = np.array([-np.exp(-1j * phi) * np.sin(theta), np.cos(theta)])
    qs = p * (mu * abs(np.vdot(hs, u)) ** 2 + (1 - mu) * abs(np.vdot(hs, v)) ** 2)
    qe = p * (mu * abs(np.vdot(he, u)) ** 2 + (1 - mu) * abs(np.vdot(he, v)) ** 2)
    qp = p * (mu * abs(np.vdot(hp, u)) ** 2 + (1 - mu) * abs(np.vdot(hp, v)) ** 2)
    m1 = (1.0 + qs) - 2.0 ** params.r_d * (1.0 + qe)
    m2 = params.eta_eh * (qe + 1.0) - params.e_s
    m3 = params.p_f - qp
    m4 = params.p_tx - p
    if obj_code == _kernels.OBJ_MIN_MARGIN:
        vals = [m2, m3, m4, p * (1.0 - mu)]
        if include_rate:
            vals.append(m1)
        return True, min(vals)
    feas = m2 >= -feas_slack and m3 >= -feas_slack and m4 >= -feas_slack
    if include_rate:
        feas = feas and m1 >= -feas_slack
    if not feas:
        return False, -np.inf
    if obj_code == _kernels.OBJ_MIN_TRACE:
        return True, -p
    rate = (np.log1p(qs) - np.log1p(qe)) / LN2
    if obj_code == _kernels.OBJ_RATE:
        return True, rate
    power = (p + params.p_c) / params.xi
    if obj_code == _kernels.OBJ_SEE:
        return True, rate / power
    return True, rate - lam * power


SHRINK = 1.0 / 3.0  # per-pass window contraction


def _refined_axes(sizes, point, widths, bounds):
    """Axes re-centered on the incumbent with the given half-widths.

    The window shrinks by a fixed factor per pass rather than collapsing
    to a few grid steps at once: constraints couple the axes (the best
    power shifts by several coarse steps as the direction moves within
    one cell), so an aggressive window loses the true peak and later
    passes cannot recover it. A gentle schedule keeps the peak inside
    the window at every scale; the caller keeps the best value seen, so
    extra passes never hurt.
    """
    out = []
    for size, x, w, (lo, hi, periodic) in zip(sizes, point, widths, bounds):
        a, b = x - w, x + w
        if not periodic:
            a, b = max(lo, a), min(hi, b)
        out.append(np.linspace(a, b, size))
    return out


def _slack_probe(ch, params, obj_code, lam, include_rate, feas_slack,
                 axes, point, bounds, best):
    """Largest objective change over one-step single-axis probes."""
    slack = 1e-9
    for k, vals in enumerate(axes):
        step = (vals[-1] - vals[0]) / (vals.size - 1) if vals.size > 1 else 0.0
        if step == 0.0:
            continue
        lo, hi, periodic = bounds[k]
        for sgn in (-1.0, 1.0):
            probe = list(point)
            probe[k] = point[k] + sgn * step
            if not periodic:
                probe[k] = min(max(probe[k], lo), hi)
            ok, val = _point_value(ch, params, obj_code, lam, include_rate,
                                   feas_slack, *probe)
            if ok and np.isfinite(val):
                slack = max(slack, abs(val - best))
    return slack


def _orient(obj_code, value):
    # the kernel always maximizes; trace minimization is scanned as -p
    return -value if obj_code == _kernels.OBJ_MIN_TRACE else value


def _search(ch, params, objective, grid, lam, include_rate):
    if ch.n_t != 2:
        raise ValueError("the exhaustive reference only supports two antennas")
    grid = grid if grid is not None else GridSpec()
    obj_code = _OBJ_CODES[objective]
    p_max = grid.power_max if grid.power_max is not None else params.p_tx
    axes = [
        np.linspace(0.0, np.pi / 2, grid.theta_steps),
        np.linspace(0.0, 2.0 * np.pi, grid.phi_steps, endpoint=False),
        np.linspace(0.5, 1.0, grid.mix_steps),
        np.linspace(0.0, p_max, grid.power_steps),
    ]
    bounds = [(0.0, np.pi / 2, False), (0.0, 2.0 * np.pi, True),
              (0.5, 1.0, False), (0.0, p_max, False)]

    found, best, point = _scan(ch, params, axes, obj_code, lam,
                               include_rate, grid.feas_slack)
    cur_axes = axes
    sizes = [a.size for a in axes]
    widths = [np.pi / 4, np.pi, 0.25, p_max / 2]  # half-spans of the box
    for _ in range(grid.refine_passes):
        if not found:
            break
        widths = [w * SHRINK for w in widths]
        cur_axes = _refined_axes(sizes, point, widths, bounds)
        ok, val, pt = _scan(ch, params, cur_axes, obj_code, lam,
                            include_rate, grid.feas_slack)
        if ok and val > best:  # refinement keeps the global best
            best, point = val, pt
    if not found:
        return OracleResult(value=-np.inf, q=None, found=False,
                            theta=np.nan, phi=np.nan, mu=np.nan, p=np.nan,
                            slack=np.inf, objective=objective)
    slack = _slack_probe(ch, params, obj_code, lam, include_rate,
                         grid.feas_slack, cur_axes, point, bounds, best)
    return OracleResult(value=_orient(obj_code, best),
                        q=rank_two_candidate(*point), found=True,
                        theta=point[0], phi=point[1], mu=point[2], p=point[3],
                        slack=slack, objective=objective)


def grid_search(ch, params, objective="see", grid=None, lam=0.0,
                include_rate=None):
    """Scan the rank-two grid for the best covariance under ``objective``.

    Objectives: ``see`` (rate ratio), ``dinkelbach`` (rate - lam * power),
    ``power`` (smallest feasible trace; ``value`` is the trace), ``rate``
    (secrecy rate with the rate-target row dropped). All modes except
    ``rate`` enforce the rate target; pass ``include_rate`` to override.
    """
    if objective not in ("see", "dinkelbach", "power", "rate"):
        raise ValueError(f"unknown objective {objective!r}")
    if include_rate is None:
        include_rate = objective != "rate"
    return _search(ch, params, objective, grid, lam, include_rate)


def grid_feasibility(ch, params, grid=None, include_rate=True):
    """Maximize the smallest constraint margin over the grid.

    Returns (feasible, result): feasible when the best achievable margin
    (counting the smallest covariance eigenvalue) clears
    ``MARGIN_THRESHOLD``, mirroring the strict-interior criterion of the
    phase-I solve.
    """
    res = _search(ch, params, "margin", grid, 0.0, include_rate)
    return bool(res.value >= MARGIN_THRESHOLD), res
