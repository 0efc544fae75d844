"""Secrecy-energy-efficiency maximization.

The objective is a ratio (secrecy rate over total consumed power), so the
solver runs Dinkelbach's parametric scheme: at price lam it maximizes
rate - lam * power, then resets lam to the achieved ratio, stopping when
the parametric value |rate - lam * power| falls below ``eps_outer``. The
parametric problem is still non-convex through the eavesdropper log, which
a difference-of-convex inner loop handles: linearize that log at the
current anchor, solve the convex surrogate with the barrier method, and
re-anchor until the true parametric value moves less than ``zeta_inner``.

With warm starts (default) each inner loop is anchored at the previous
outer solution, whose parametric value at the fresh price is exactly zero;
since every re-anchoring step can only increase the true value, both the
inner values and the price sequence are monotone by construction, not just
empirically. ``warm_start=False`` re-anchors every outer round at the
phase-I point instead.

Converged solutions get an optional fixed-point polish (re-solving the
subproblem at the achieved ratio until the covariance stops moving), which
can only improve the ratio, and an a-posteriori certificate (rank-one
shape plus stationarity residual).
"""

from dataclasses import dataclass, field

import numpy as np

from .barrier import (LinearizedSubproblem, STATUS_INFEASIBLE, STATUS_MAXITER,
                      STATUS_OPTIMAL, phase1_feasible_point, solve_linearized)
from .backend import BACKEND
from .certification import certify
from .model import secrecy_rate, transmit_power

POLISH_ROUNDS = 8
POLISH_STEP_TOL = 1e-9


@dataclass
class InnerIterate:
    outer: int
    idx: int
    eta: float  # true parametric value rate - lam * power at the iterate
    surrogate: float  # subproblem objective at its own solution
    newton_iters: int


@dataclass
class OuterIterate:
    idx: int
    lam: float
    rate: float
    power: float
    see: float
    delta_f: float  # |rate - lam * power| at the inner solution
    inner: list = field(default_factory=list)


@dataclass
class SolveTrace:
    outer: list = field(default_factory=list)
    polish_rounds: int = 0
    polish_gain: float = 0.0


@dataclass
class Solution:
    status: str
    see: float
    rate: float
    power: float
    q: object  # HermitianMatrix or None
    lam: float
    outer_iters: int
    inner_iters_total: int
    trace: SolveTrace | None
    certificate: object | None
    metadata: dict = field(default_factory=dict)


def _infeasible_solution(p1, trace):
    return Solution(
        status=STATUS_INFEASIBLE, see=0.0, rate=0.0, power=0.0, q=None,
        lam=0.0, outer_iters=0, inner_iters_total=0, trace=trace,
        certificate=None,
        metadata={"max_violation": max(p1.max_violation, 0.0),
                  "backend": BACKEND})


def _dc_inner(ch, params, lam, anchor, interior, outer_idx, max_inner,
              include_rate=True):
    """Re-anchored convex surrogates until the true value settles."""
    eta_prev = (secrecy_rate(ch, anchor)
                - lam * transmit_power(params, anchor))
    q = anchor
    iters = []
    capped = True
    for k in range(max_inner):
        sub = LinearizedSubproblem(ch=ch, params=params, lam=lam, q_anchor=q,
                                   include_rate=include_rate)
        rep = solve_linearized(sub, q_start=q, q_interior=interior)
        if rep.status == STATUS_INFEASIBLE:
            raise RuntimeError("surrogate infeasible after a feasible anchor")
        q = rep.q_opt
        eta = secrecy_rate(ch, q) - lam * transmit_power(params, q)
        iters.append(InnerIterate(outer=outer_idx, idx=k, eta=eta,
                                  surrogate=rep.objective,
                                  newton_iters=rep.newton_iters))
        if abs(eta - eta_prev) <= params.zeta_inner:
            eta_prev = eta
            capped = False
            break
        eta_prev = eta
    return q, eta_prev, iters, capped


def maximize_see(ch, params, warm_start=True, max_outer=30, max_inner=60,
                 polish=True, run_certification=True):
    """Maximize secrecy rate per unit of consumed power.

    Returns a Solution; status ``Infeasible`` (with zero rate/power/see)
    when no strictly interior covariance satisfies the constraint set,
    ``MaxIter`` when the price iteration hits ``max_outer`` without the
    parametric value reaching ``eps_outer``.
    """
    trace = SolveTrace()
    p1 = phase1_feasible_point(ch, params)
    if not p1.feasible:
        return _infeasible_solution(p1, trace)
    q0 = p1.q

    lam = 0.0
    anchor = q0
    q = q0
    rate = power = see_val = 0.0
    status = STATUS_MAXITER
    inner_capped = False
    for i in range(max_outer):
        start = anchor if warm_start else q0
        q, eta, inner, capped = _dc_inner(ch, params, lam, start, q0, i,
                                          max_inner)
        inner_capped = inner_capped or capped
        rate = secrecy_rate(ch, q)
        power = transmit_power(params, q)
        see_val = rate / power
        delta_f = abs(rate - lam * power)
        trace.outer.append(OuterIterate(idx=i, lam=lam, rate=rate,
                                        power=power, see=see_val,
                                        delta_f=delta_f, inner=inner))
        anchor = q
        if delta_f <= params.eps_outer:
            status = STATUS_OPTIMAL
            break
        lam = see_val

    if polish and status == STATUS_OPTIMAL:
        gain0 = see_val
        for _ in range(POLISH_ROUNDS):
            sub = LinearizedSubproblem(ch=ch, params=params, lam=see_val,
                                       q_anchor=q)
            rep = solve_linearized(sub, q_start=q, q_interior=q0)
            if rep.status != STATUS_OPTIMAL:
                break
            qn = rep.q_opt
            rate_n = secrecy_rate(ch, qn)
            power_n = transmit_power(params, qn)
            see_n = rate_n / power_n
            trace.polish_rounds += 1
            if see_n < see_val:
                break  # numerically exhausted; keep the better iterate
            step = float(np.linalg.norm(qn.coords - q.coords))
            q, rate, power, see_val = qn, rate_n, power_n, see_n
            if step <= POLISH_STEP_TOL * (1.0 + float(np.linalg.norm(q.coords))):
                break
        trace.polish_gain = see_val - gain0

    lam_final = see_val
    cert = None
    if run_certification and status == STATUS_OPTIMAL:
        cert = certify(ch, params, q, lam_final)

    return Solution(
        status=status, see=see_val, rate=rate, power=power, q=q,
        lam=lam_final, outer_iters=len(trace.outer),
        inner_iters_total=sum(len(o.inner) for o in trace.outer),
        trace=trace, certificate=cert,
        metadata={
            "warm_start": warm_start,
            "phase1_margin": p1.margin,
            "inner_capped": inner_capped,
            "backend": BACKEND,
            "iterate_convention": (
                "reported covariance is the last inner iterate, after the "
                "fixed-point polish when enabled"),
        })
