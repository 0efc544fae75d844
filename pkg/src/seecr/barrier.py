"""Interior-point machinery for the convex pieces of the design problem.

Every convex solve in this package is an instance of one template:

    minimize    c_lin . x  -  w_log * ln(1 + c_s . x)
    subject to  four (or fewer) linear inequalities in x
                Q(x) positive semidefinite

where x is the real coordinate vector of the transmit covariance. The
template covers the convexified subproblem of the efficiency optimizer
(log term active), trace minimization (no log term), and the phase-I
feasibility problem (extra scalar that uniformly relaxes every constraint;
minimizing it decides strict feasibility and yields an interior starting
point). The heavy lifting happens in ``_kernels.barrier_solve``, a damped
Newton path-following method over a log-det plus log-slack barrier.

Solves are deterministic: no randomness, fixed schedules (t from 1, times
10 per stage, until nu / t <= 1e-8 with nu the barrier parameter), so a
given problem instance always produces bit-identical output.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .hermitian import HermitianMatrix, quadratic_form
from .model import LN2

BARRIER_T0 = 1.0
BARRIER_T_MULT = 10.0
BARRIER_GAP_TOL = 1e-8
NEWTON_TOL = 1e-9  # threshold on decrement^2 / 2
NEWTON_CAP = 200
STAGE_CAP = 60
START_PULL = 1e-6  # identity pull factor for phase-II starting points
STRICT_MARGIN = 1e-6  # smallest accepted feasibility margin

STATUS_OPTIMAL = "Optimal"
STATUS_INFEASIBLE = "Infeasible"
STATUS_MAXITER = "MaxIter"

_KERNEL_STATUS = {0: STATUS_OPTIMAL, 1: STATUS_MAXITER}


@dataclass(frozen=True)
class LinearizedSubproblem:
    """One convexified subproblem: concave rate term, linearized leakage.

    The non-convex part of the secrecy rate (the eavesdropper log) is
    replaced by its tangent at ``q_anchor``; ``grad_coeff`` is the tangent
    slope 1 / ((1 + h_e^H Q_k h_e) ln 2). ``lam`` prices total power.
    """

    ch: object
    params: object
    lam: float
    q_anchor: object  # HermitianMatrix or ndarray
    include_rate: bool = True
    grad_coeff: float = field(init=False)
    qe_anchor: float = field(init=False)

    def __post_init__(self):
        anchor = np.asarray(self.q_anchor, dtype=np.complex128)
        qe = quadratic_form(self.ch.h_e, anchor)
        object.__setattr__(self, "qe_anchor", float(qe))
        object.__setattr__(self, "grad_coeff", 1.0 / ((1.0 + qe) * LN2))
        if self.lam < 0:
            raise ValueError("lam must be non-negative")


@dataclass
class SolverReport:
    """Outcome of one barrier solve."""

    q_opt: HermitianMatrix | None
    objective: float
    status: str
    newton_iters: int
    barrier_stages: int
    kkt_residual: float
    duality_gap: float
    infeasibility: float | None = None
    phi_trace: np.ndarray | None = field(default=None, repr=False)


@dataclass
class Phase1Result:
    feasible: bool
    q: HermitianMatrix | None
    margin: float  # smallest strict constraint margin of the returned point
    max_violation: float  # minimized uniform relaxation (<= 0 when feasible)
    newton_iters: int


def _constraint_rows(ch, params, include_rate):
    """Linear inequality rows a . x + b >= 0 over covariance coordinates."""
    n = params.n_t
    rows = []
    if include_rate:
        rd_lin = 2.0 ** params.r_d
        a = _kernels.qf_coords(ch.h_s) - rd_lin * _kernels.qf_coords(ch.h_e)
        rows.append((a, 1.0 - rd_lin))
    rows.append((_kernels.qf_coords(ch.h_e), 1.0 - params.e_s / params.eta_eh))
    rows.append((-_kernels.qf_coords(ch.h_p), params.p_f))
    rows.append((-_kernels.trace_coords(n), params.p_tx))
    return rows


def _stack_rows(rows, extra):
    ncols = rows[0][0].size + (1 if extra else 0)
    a = np.zeros((len(rows), ncols))
    b = np.empty(len(rows))
    for j, (aj, bj) in enumerate(rows):
        a[j, : aj.size] = aj
        if extra:
            a[j, -1] = 1.0
        b[j] = bj
    return a, b


def _run(nmat, extra, a, b, c_lin, w_log, c_log, g0, y0, record_trace):
    trace = np.zeros((NEWTON_CAP * 4, 3)) if record_trace else np.zeros((1, 3))
    out = _kernels.barrier_solve(
        nmat, 1 if extra else 0, a, b, c_lin, w_log, c_log, g0, y0,
        BARRIER_T0, BARRIER_T_MULT, BARRIER_GAP_TOL, NEWTON_TOL,
        NEWTON_CAP, STAGE_CAP, trace, 1 if record_trace else 0)
    y, status, newton_total, stages, gap, kkt, trace_len = out
    if status == 4:
        raise RuntimeError("barrier solve started outside the domain")
    return y, status, newton_total, stages, gap, kkt, trace[:trace_len].copy()


def phase1_feasible_point(ch, params, include_rate=True, record_trace=False):
    """Decide strict feasibility and produce an interior point.

    Minimizes a single relaxation u added to every constraint (including a
    u I shift of the semidefinite cone). A negative optimum certifies a
    strictly feasible point with margin -u; a non-negative optimum is the
    smallest uniform violation any covariance must incur.
    """
    n = params.n_t
    ncq = n * n
    rows = _constraint_rows(ch, params, include_rate)
    a, b = _stack_rows(rows, extra=True)
    c_lin = np.zeros(ncq + 1)
    c_lin[-1] = 1.0
    c_log = np.zeros(ncq + 1)

    y0 = np.zeros(ncq + 1)
    u0 = max(1.0, 1.5 * max(0.0, -float(b.min())) + 1.0)
    y0[-1] = u0

    y, status, newton_total, _stages, gap, _kkt, _tr = _run(
        n, True, a, b, c_lin, 0.0, c_log, 1.0, y0, record_trace)
    u = float(y[-1])
    # Barrier iterates are strictly inside the relaxed constraints, so the
    # returned point certifies feasibility whenever u clears the strict
    # margin, even if the last centering stage ran out of iterations. Only
    # the opposite verdict (no interior point exists) needs the solve to
    # have converged; an unconverged non-negative u is inconclusive, and
    # treating it as infeasible would discard provably solvable instances.
    feasible = u <= -STRICT_MARGIN
    if not feasible and status != 0:
        # one restart from a fresh, larger relaxation before giving up
        y0[-1] = 10.0 * u0
        y, status, extra, _stages, gap, _kkt, _tr = _run(
            n, True, a, b, c_lin, 0.0, c_log, 1.0, y0, record_trace)
        newton_total += extra
        u = float(y[-1])
        feasible = u <= -STRICT_MARGIN
    q = HermitianMatrix(y[:ncq], n) if feasible else None
    return Phase1Result(feasible=feasible, q=q, margin=-u,
                        max_violation=u + gap, newton_iters=newton_total)


def _pulled_start(q_feas, params, a, b, c_lin, w_log, c_log):
    """Blend a feasible point toward a scaled identity, keeping it interior."""
    n = params.n_t
    eps = START_PULL * params.p_tx / n
    x_feas = q_feas.coords.copy()
    for _ in range(40):
        x = x_feas.copy()
        x[:n] += eps
        ok, _phi = _kernels._phi_eval(x, n, 0, a, b, c_lin, w_log, c_log,
                                      1.0, 1.0)
        if ok:
            return x
        eps *= 0.1
    return x_feas


def _coords_of(q):
    if isinstance(q, HermitianMatrix):
        return q.coords.copy()
    return _kernels.mat_to_coords(np.asarray(q, dtype=np.complex128))


def solve_linearized(sub, q_start=None, q_interior=None, record_trace=False):
    """Solve one convexified subproblem to the barrier's gap target.

    ``q_start`` may carry a strictly feasible interior point (e.g. the
    previous iterate); if it sits on the boundary and ``q_interior`` is
    given, the start is blended toward that interior reference instead of
    re-running phase-I. Reported objective is the full surrogate value at
    the solution, constants included, in maximization orientation.
    """
    ch, params = sub.ch, sub.params
    n = params.n_t
    ncq = n * n
    rows = _constraint_rows(ch, params, sub.include_rate)

    # constant rows (zero gradient) either hold for every Q or for none
    kept = []
    for aj, bj in rows:
        if float(np.abs(aj).max()) == 0.0:
            if bj <= 0.0:
                return SolverReport(
                    q_opt=None, objective=-np.inf, status=STATUS_INFEASIBLE,
                    newton_iters=0, barrier_stages=0, kkt_residual=np.inf,
                    duality_gap=np.inf, infeasibility=-bj)
        else:
            kept.append((aj, bj))
    a, b = _stack_rows(kept, extra=False)

    c_s = _kernels.qf_coords(ch.h_s)
    c_e = _kernels.qf_coords(ch.h_e)
    c_tr = _kernels.trace_coords(n)
    lam_eff = sub.lam / params.xi
    c_lin = sub.grad_coeff * c_e + lam_eff * c_tr
    hs_zero = float(np.abs(c_s).max()) == 0.0
    w_log = 0.0 if hs_zero else 1.0 / LN2

    def interior_ok(x):
        ok, _ = _kernels._phi_eval(x, n, 0, a, b, c_lin, w_log, c_s, 1.0, 1.0)
        return ok

    x0 = None
    if q_start is not None:
        x = _coords_of(q_start)
        if interior_ok(x):
            x0 = x
        elif q_interior is not None:
            xi_ref = _coords_of(q_interior)
            delta = 1e-7
            while delta <= 1.0:
                cand = (1.0 - delta) * x + delta * xi_ref
                if interior_ok(cand):
                    x0 = cand
                    break
                delta *= 10.0
    if x0 is None and q_interior is not None:
        x = _coords_of(q_interior)
        if interior_ok(x):
            x0 = x
    if x0 is None:
        p1 = phase1_feasible_point(ch, params, include_rate=sub.include_rate)
        if not p1.feasible:
            return SolverReport(
                q_opt=None, objective=-np.inf, status=STATUS_INFEASIBLE,
                newton_iters=p1.newton_iters, barrier_stages=0,
                kkt_residual=np.inf, duality_gap=np.inf,
                infeasibility=max(p1.max_violation, 0.0))
        x0 = _pulled_start(p1.q, params, a, b, c_lin, w_log, c_s)

    y, status, newton_total, stages, gap, kkt, phi_trace = _run(
        n, False, a, b, c_lin, w_log, c_s, 1.0, x0, record_trace)

    q = HermitianMatrix(y[:ncq], n)
    x = q.coords
    obj = (float(np.log1p(float(c_s @ x))) / LN2
           - float(np.log1p(sub.qe_anchor)) / LN2
           - sub.grad_coeff * (float(c_e @ x) - sub.qe_anchor)
           - lam_eff * (float(c_tr @ x) + params.p_c))
    return SolverReport(
        q_opt=q, objective=obj, status=_KERNEL_STATUS[status],
        newton_iters=newton_total, barrier_stages=stages, kkt_residual=kkt,
        duality_gap=gap, phi_trace=phi_trace if record_trace else None)


def minimize_trace(ch, params, q_start=None, record_trace=False):
    """Minimize tr(Q) over the full constraint set (rate row included)."""
    n = params.n_t
    ncq = n * n
    rows = _constraint_rows(ch, params, include_rate=True)
    kept = []
    for aj, bj in rows:
        if float(np.abs(aj).max()) == 0.0:
            if bj <= 0.0:
                return SolverReport(
                    q_opt=None, objective=np.inf, status=STATUS_INFEASIBLE,
                    newton_iters=0, barrier_stages=0, kkt_residual=np.inf,
                    duality_gap=np.inf, infeasibility=-bj)
        else:
            kept.append((aj, bj))
    a, b = _stack_rows(kept, extra=False)
    c_lin = _kernels.trace_coords(n)
    c_log = np.zeros(ncq)

    x0 = None
    if q_start is not None:
        x = np.asarray(
            q_start.coords if isinstance(q_start, HermitianMatrix)
            else _kernels.mat_to_coords(np.asarray(q_start, dtype=np.complex128)))
        ok, _ = _kernels._phi_eval(x, n, 0, a, b, c_lin, 0.0, c_log, 1.0, 1.0)
        if ok:
            x0 = x
    if x0 is None:
        p1 = phase1_feasible_point(ch, params, include_rate=True)
        if not p1.feasible:
            return SolverReport(
                q_opt=None, objective=np.inf, status=STATUS_INFEASIBLE,
                newton_iters=p1.newton_iters, barrier_stages=0,
                kkt_residual=np.inf, duality_gap=np.inf,
                infeasibility=max(p1.max_violation, 0.0))
        x0 = _pulled_start(p1.q, params, a, b, c_lin, 0.0, c_log)

    y, status, newton_total, stages, gap, kkt, phi_trace = _run(
        n, False, a, b, c_lin, 0.0, c_log, 1.0, x0, record_trace)
    q = HermitianMatrix(y[:ncq], n)
    return SolverReport(
        q_opt=q, objective=q.trace(), status=_KERNEL_STATUS[status],
        newton_iters=newton_total, barrier_stages=stages, kkt_residual=kkt,
        duality_gap=gap, phi_trace=phi_trace if record_trace else None)


def barrier_phi_grad(x, t, sub, q_start_domain_check=True):
    """Barrier-augmented objective and its analytic gradient (diagnostic).

    Mirrors the kernel's phase-II assembly in plain numpy so tests can
    compare the gradient against finite differences. x must be strictly
    inside the domain.
    """
    ch, params = sub.ch, sub.params
    n = params.n_t
    rows = [r for r in _constraint_rows(ch, params, sub.include_rate)
            if float(np.abs(r[0]).max()) > 0.0]
    a, b = _stack_rows(rows, extra=False)
    c_s = _kernels.qf_coords(ch.h_s)
    c_e = _kernels.qf_coords(ch.h_e)
    c_tr = _kernels.trace_coords(n)
    c_lin = sub.grad_coeff * c_e + (sub.lam / params.xi) * c_tr
    w_log = 0.0 if float(np.abs(c_s).max()) == 0.0 else 1.0 / LN2

    x = np.asarray(x, dtype=np.float64)
    q = _kernels.coords_to_mat(x, n)
    ok, l = _kernels.chol_factor(q)
    if not ok:
        raise ValueError("point is outside the positive-definite cone")
    s = a @ x + b
    if np.any(s <= 0):
        raise ValueError("point violates a linear constraint strictly")
    arg = 1.0 + float(c_s @ x)
    phi = t * (float(c_lin @ x) - (w_log * np.log(arg) if w_log else 0.0))
    phi -= _kernels.chol_logdet(l)
    phi -= float(np.log(s).sum())

    k = _kernels.lower_inv(l)
    qinv = _kernels.inv_from_chol(k)
    grad = t * c_lin.copy()
    if w_log:
        grad -= (t * w_log / arg) * c_s
    grad -= _kernels.tr_coords(qinv)
    grad -= (a / s[:, None]).sum(axis=0)
    return float(phi), grad
