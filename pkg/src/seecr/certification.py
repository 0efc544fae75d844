"""A-posteriori optimality evidence for a solver output.

Two independent checks on a candidate covariance at ratio price ``lam``:

* spectral shape: the covariance should be (numerically) rank one, so a
  single beamformer sqrt(w1) v1 carries the whole transmission;
* first-order stationarity: on the range of Q the gradient of the priced
  Lagrangian must vanish for some non-negative multipliers on the active
  constraints. The multipliers are fitted by least squares and clamped
  at zero, and the remaining residual is reported.

Both are computed from the candidate alone (plus the instance), so they
do not trust any solver internals.
"""

from dataclasses import dataclass, field

import numpy as np

from .hermitian import eig_hermitian, numeric_rank, quadratic_form
from .model import LN2

ACTIVE_TOL = 1e-5
RANK_REL_TOL = 1e-4
RESIDUAL_TOL = 1e-4
EIG_RATIO_TOL = 1e-4

_CONSTRAINTS = ("rate", "harvest", "leakage", "power")


@dataclass
class CertReport:
    passed: bool
    rank: int
    eig_ratio: float
    stationarity_residual: float
    residual_scale: float
    multipliers: dict
    active: dict
    beamformer: np.ndarray | None
    metadata: dict = field(default_factory=dict)


def _nonneg_lstsq(a, b):
    """Exact non-negative least squares for a handful of columns.

    Enumerates every support set (at most 2^4 here), solves the free least
    squares on each, and keeps the best candidate whose coefficients are
    all non-negative. Unlike clamping a plain least-squares fit this finds
    the true constrained minimum.
    """
    m = a.shape[1]
    best_x = np.zeros(m)
    best_r = float(np.linalg.norm(b))
    for mask in range(1, 1 << m):
        idx = [j for j in range(m) if mask >> j & 1]
        sol, *_ = np.linalg.lstsq(a[:, idx], b, rcond=None)
        if np.any(sol < 0.0):
            continue
        x = np.zeros(m)
        x[idx] = sol
        r = float(np.linalg.norm(a @ x - b))
        if r < best_r - 1e-15:
            best_x, best_r = x, r
    return best_x


def _margins(ch, params, qm, tr):
    qs = quadratic_form(ch.h_s, qm)
    qe = quadratic_form(ch.h_e, qm)
    qp = quadratic_form(ch.h_p, qm)
    rd_lin = 2.0 ** params.r_d
    return {
        "rate": ((1.0 + qs) - rd_lin * (1.0 + qe), rd_lin),
        "harvest": (params.eta_eh * (qe + 1.0) - params.e_s, params.e_s),
        "leakage": (params.p_f - qp, params.p_f),
        "power": (params.p_tx - tr, params.p_tx),
    }, qs, qe


def certify(ch, params, q, lam, active_tol=ACTIVE_TOL,
            residual_tol=RESIDUAL_TOL, rank_rel_tol=RANK_REL_TOL):
    """Check rank-one shape and first-order stationarity of a candidate.

    ``lam`` is the ratio value the candidate claims (rate over total
    power); stationarity is tested for the objective rate - lam * power.
    """
    qm = np.asarray(q, dtype=np.complex128)
    n = qm.shape[0]
    w, v = eig_hermitian(qm)
    rank = numeric_rank(qm, rel_tol=rank_rel_tol)
    eig_ratio = float(w[1] / w[0]) if n > 1 and w[0] > 0.0 else 0.0
    beam = np.sqrt(max(w[0], 0.0)) * v[:, 0]

    tr = float(np.real(np.trace(qm)))
    margins, qs, qe = _margins(ch, params, qm, tr)
    active = {k: m <= active_tol * (1.0 + abs(r))
              for k, (m, r) in margins.items()}

    # range-space basis of the candidate
    cutoff = rank_rel_tol * max(w[0], 0.0)
    r = max(int(np.sum(w > cutoff)), 1)
    vr = v[:, :r]

    g_s = np.outer(ch.h_s, ch.h_s.conj()) / ((1.0 + qs) * LN2)
    g_e = np.outer(ch.h_e, ch.h_e.conj()) / ((1.0 + qe) * LN2)
    he_outer = np.outer(ch.h_e, ch.h_e.conj())
    hp_outer = np.outer(ch.h_p, ch.h_p.conj())
    eye = np.eye(n)

    # Let M be the gradient of the priced Lagrangian,
    #   M = (1+a)(G_s - G_e) + b*eta*he he^H - c*hp hp^H - (lam/xi + m) I.
    # Optimality forces M = -Z with Z >= 0 and Z Q = 0, hence the whole
    # column block M V must vanish on the range of Q (cross terms
    # included), for some non-negative multipliers on active rows.
    base = (g_s - g_e - (lam / params.xi) * eye) @ vr
    cols = {
        "rate": (g_s - g_e) @ vr,
        "harvest": params.eta_eh * (he_outer @ vr),
        "leakage": -(hp_outer @ vr),
        "power": -vr,
    }

    def ravel(mat):
        return np.concatenate([mat.real.ravel(), mat.imag.ravel()])

    names = [k for k in _CONSTRAINTS if active[k]]
    mult = {k: 0.0 for k in _CONSTRAINTS}
    if names:
        a = np.stack([ravel(cols[k]) for k in names], axis=1)
        fit = _nonneg_lstsq(a, -ravel(base))
        mult.update((k, float(x)) for k, x in zip(names, fit))
    resid_mat = base + sum(mult[k] * cols[k] for k in _CONSTRAINTS)
    residual = float(np.linalg.norm(np.asarray(resid_mat)))
    scale = float(np.linalg.norm(base))

    grad_mat = (g_s - g_e - (lam / params.xi) * eye
                + mult["rate"] * (g_s - g_e)
                + mult["harvest"] * params.eta_eh * he_outer
                - mult["leakage"] * hp_outer
                - mult["power"] * eye)
    dual_excess = float(np.linalg.eigvalsh(grad_mat).max())

    passed = rank <= 1 and residual <= residual_tol * (1.0 + scale)
    return CertReport(
        passed=passed, rank=rank, eig_ratio=eig_ratio,
        stationarity_residual=residual, residual_scale=scale,
        multipliers=mult, active=active,
        beamformer=beam if rank <= 1 else None,
        metadata={
            "gradient_convention": (
                "rate terms carry 1/((1 + h^H Q h) ln 2); harvesting and "
                "leakage rows enter linearly in Q"),
            "active_tol": active_tol,
            "residual_tol": residual_tol,
            # largest eigenvalue of the full Lagrangian gradient; a clearly
            # positive value would expose a feasible ascent direction
            "dual_excess": dual_excess,
        })
