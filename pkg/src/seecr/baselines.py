"""Reference transmission schemes the ratio maximizer is compared against.

``power_min`` spends as little transmit power as the constraints allow (a
single convex solve: the rate requirement is an exact linear row at the
target), ``rate_max`` spends whatever helps the secrecy rate (the price-0
parametric problem without the rate row). Both return the same Solution
shape as the main solver so sweep tooling can treat every scheme alike.

When the best achievable secrecy rate of ``rate_max`` still misses the
target, the instance is infeasible for every scheme; following the usual
reporting convention the result is then flagged Infeasible with zero
ratio rather than reporting the unattainable operating point.
"""

from .barrier import (STATUS_INFEASIBLE, STATUS_OPTIMAL,
                      minimize_trace, phase1_feasible_point)
from .certification import certify
from .model import secrecy_rate, transmit_power
from .optimizer import SolveTrace, Solution, _dc_inner
from .backend import BACKEND


def _infeasible(extra):
    meta = {"backend": BACKEND}
    meta.update(extra)
    return Solution(status=STATUS_INFEASIBLE, see=0.0, rate=0.0, power=0.0,
                    q=None, lam=0.0, outer_iters=0, inner_iters_total=0,
                    trace=None, certificate=None, metadata=meta)


def power_min(ch, params, run_certification=False):
    """Smallest-trace covariance meeting every constraint."""
    rep = minimize_trace(ch, params)
    if rep.status == STATUS_INFEASIBLE:
        return _infeasible({"max_violation": rep.infeasibility})
    q = rep.q_opt
    rate = secrecy_rate(ch, q)
    power = transmit_power(params, q)
    see_val = rate / power
    cert = certify(ch, params, q, see_val) if run_certification else None
    return Solution(
        status=rep.status, see=see_val, rate=rate, power=power, q=q,
        lam=0.0, outer_iters=0, inner_iters_total=0, trace=None,
        certificate=cert,
        metadata={"backend": BACKEND, "newton_iters": rep.newton_iters,
                  "duality_gap": rep.duality_gap, "scheme": "power_min"})


def rate_max(ch, params, max_inner=60):
    """Largest secrecy rate under the harvesting/leakage/power rows.

    The rate target itself is not enforced during the solve; if even the
    maximized rate misses it, no covariance can meet it and the scheme
    reports Infeasible.
    """
    p1 = phase1_feasible_point(ch, params, include_rate=False)
    if not p1.feasible:
        return _infeasible({"max_violation": max(p1.max_violation, 0.0)})
    q, _eta, inner, capped = _dc_inner(ch, params, 0.0, p1.q, p1.q, 0,
                                       max_inner, include_rate=False)
    rate = secrecy_rate(ch, q)
    if rate < params.r_d:
        return _infeasible({"best_rate": rate, "inner_iters": len(inner)})
    power = transmit_power(params, q)
    trace = SolveTrace()
    return Solution(
        status=STATUS_OPTIMAL, see=rate / power, rate=rate, power=power,
        q=q, lam=0.0, outer_iters=0, inner_iters_total=len(inner),
        trace=trace, certificate=None,
        metadata={"backend": BACKEND, "inner_capped": capped,
                  "scheme": "rate_max"})
