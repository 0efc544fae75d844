"""System model: parameters, channels, and the physical quantities.

A multi-antenna secondary transmitter sends a confidential message to a
single-antenna receiver while an energy-harvesting node (a potential
eavesdropper) and a primary receiver listen. Everything downstream scores a
transmit covariance Q through the functions here:

    secrecy rate   R_s(Q) = log2(1 + h_s^H Q h_s) - log2(1 + h_e^H Q h_e)
    total power    P_t(Q) = (tr Q + P_c) / xi
    efficiency     SEE(Q) = R_s(Q) / P_t(Q)
    harvested      E(Q)   = eta_eh * (h_e^H Q h_e + 1)
    leakage        L(Q)   = h_p^H Q h_p

All quantities are linear-scale; dB conversion happens only at the CLI /
JSON boundary, where keys carrying dB values wear a ``_db`` suffix.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .hermitian import (HermitianMatrix, StructuralError, _as_matrix,
                        complex_to_pairs, complex_vector, eig_hermitian,
                        pairs_to_complex, quadratic_form)

LN2 = float(np.log(2.0))


class ContractViolationError(ValueError):
    """An argument violates a documented precondition (e.g. non-PSD Q)."""


def db_to_linear(x_db):
    return 10.0 ** (float(x_db) / 10.0)


def linear_to_db(x):
    if x <= 0:
        raise ValueError("only positive values have a dB representation")
    return 10.0 * float(np.log10(x))


@dataclass(frozen=True)
class SystemParams:
    """Scenario constants, all linear scale.

    n_t        transmit antennas
    r_d        target secrecy rate, bps/Hz
    e_s        harvested-energy floor at the energy receiver
    p_tx       transmit power budget, tr(Q) <= p_tx
    p_f        interference cap at the primary receiver
    p_c        constant circuit power (> 0 keeps total power positive)
    eta_eh     energy harvesting efficiency, in (0, 1]
    xi         power amplifier efficiency, in (0, 1]
    eps_outer  ratio-update loop tolerance
    zeta_inner convexified inner loop tolerance
    """

    n_t: int
    r_d: float
    e_s: float
    p_tx: float
    p_f: float = 1.0
    p_c: float = 1.0
    eta_eh: float = 0.5
    xi: float = 1.0
    eps_outer: float = 1e-3
    zeta_inner: float = 1e-3

    def __post_init__(self):
        if int(self.n_t) < 1:
            raise ValueError("n_t must be a positive integer")
        object.__setattr__(self, "n_t", int(self.n_t))
        for name in ("r_d", "e_s", "p_tx", "p_f", "p_c", "eta_eh", "xi",
                     "eps_outer", "zeta_inner"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.r_d < 0:
            raise ValueError("r_d must be non-negative")
        if self.e_s < 0:
            raise ValueError("e_s must be non-negative")
        if self.p_tx <= 0:
            raise ValueError("p_tx must be positive")
        if self.p_f <= 0:
            raise ValueError("p_f must be positive")
        if self.p_c <= 0:
            raise ValueError("p_c must be positive (total power must stay positive)")
        if not 0 < self.eta_eh <= 1:
            raise ValueError("eta_eh must lie in (0, 1]")
        if not 0 < self.xi <= 1:
            raise ValueError("xi must lie in (0, 1]")
        if self.eps_outer <= 0 or self.zeta_inner <= 0:
            raise ValueError("loop tolerances must be positive")


@dataclass(frozen=True)
class ChannelSet:
    """One channel realization: secondary user, energy receiver, primary."""

    h_s: np.ndarray
    h_e: np.ndarray
    h_p: np.ndarray

    def __post_init__(self):
        hs = complex_vector(self.h_s)
        he = complex_vector(self.h_e, hs.size)
        hp = complex_vector(self.h_p, hs.size)
        object.__setattr__(self, "h_s", hs)
        object.__setattr__(self, "h_e", he)
        object.__setattr__(self, "h_p", hp)

    @property
    def n_t(self):
        return self.h_s.size


def _checked_psd(q, n_t=None):
    """Return the matrix after verifying PSD-ness within tolerance."""
    a = _as_matrix(q)
    if n_t is not None and a.shape[0] != n_t:
        raise StructuralError(
            f"covariance is {a.shape[0]}x{a.shape[0]}, expected {n_t}")
    w, _ = eig_hermitian(a)
    lmax = max(float(w[0]), 0.0) if w.size else 0.0
    if w.size and float(w[-1]) < -1e-8 * max(lmax, 1.0):
        raise ContractViolationError(
            f"covariance is not PSD (smallest eigenvalue {w[-1]:.3e})")
    return a


def secrecy_rate(ch, q):
    """R_s(Q) in bps/Hz; negative when the eavesdropper link is stronger."""
    a = _checked_psd(q, ch.n_t)
    gs = quadratic_form(ch.h_s, a)
    ge = quadratic_form(ch.h_e, a)
    return float(np.log1p(max(gs, 0.0)) - np.log1p(max(ge, 0.0))) / LN2


def transmit_power(params, q):
    """(tr Q + P_c) / xi; strictly positive for any PSD Q."""
    a = _checked_psd(q, params.n_t)
    return (float(np.trace(a).real) + params.p_c) / params.xi


def see(params, ch, q):
    """Secrecy rate per unit total power."""
    return secrecy_rate(ch, q) / transmit_power(params, q)


def harvested_energy(params, ch, q):
    """eta_eh * (h_e^H Q h_e + 1); the unit term is the harvested noise."""
    a = _checked_psd(q, params.n_t)
    return params.eta_eh * (quadratic_form(ch.h_e, a) + 1.0)


def interference_leakage(ch, q):
    """Received power at the primary receiver."""
    a = _checked_psd(q, ch.n_t)
    return quadratic_form(ch.h_p, a)


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    margins: dict = field(default_factory=dict)


def is_feasible(params, ch, q, slack=1e-9):
    """Check all design constraints with a uniform additive slack.

    Margins are signed (>= 0 means satisfied): rate above target, harvested
    energy above floor, interference headroom, power headroom, smallest
    eigenvalue of Q.
    """
    a = _as_matrix(q)
    if a.shape[0] != params.n_t:
        raise StructuralError(
            f"covariance is {a.shape[0]}x{a.shape[0]}, expected {params.n_t}")
    w, _ = eig_hermitian(a)
    gs = max(quadratic_form(ch.h_s, a), 0.0)
    ge = max(quadratic_form(ch.h_e, a), 0.0)
    rate = float(np.log1p(gs) - np.log1p(ge)) / LN2
    margins = {
        "rate": rate - params.r_d,
        "harvested": params.eta_eh * (quadratic_form(ch.h_e, a) + 1.0) - params.e_s,
        "interference": params.p_f - quadratic_form(ch.h_p, a),
        "power": params.p_tx - float(np.trace(a).real),
        "psd": float(w[-1]),
    }
    feasible = all(m >= -slack for m in margins.values())
    return FeasibilityReport(feasible=bool(feasible), margins=margins)


# ---------------------------------------------------------------------------
# instance JSON


_DB_KEYS = ("p_f", "p_tx", "e_s")


def params_from_dict(n_t, raw):
    """Build SystemParams from a JSON-ish dict; ``*_db`` keys are converted."""
    kw = {}
    for key, value in raw.items():
        if key.endswith("_db"):
            base = key[:-3]
            if base not in _DB_KEYS:
                raise ValueError(f"dB form not accepted for {base!r}")
            if base in raw:
                raise ValueError(f"both {base!r} and {key!r} given")
            kw[base] = db_to_linear(value)
        else:
            kw[key] = value
    return SystemParams(n_t=n_t, **kw)


def load_instance(source):
    """Read one problem instance (channels + parameters).

    Accepts a dict, a JSON string, or a path to a JSON file with layout
    {"n_t": ..., "channels": {"h_s": [[re, im], ...], ...},
     "params": {...}}.
    """
    if isinstance(source, dict):
        doc = source
    else:
        text = None
        s = str(source)
        if s.lstrip().startswith("{"):
            text = s
        else:
            with open(s, "r", encoding="utf-8") as fh:
                text = fh.read()
        doc = json.loads(text)
    try:
        n_t = int(doc["n_t"])
        chans = doc["channels"]
        ch = ChannelSet(
            h_s=complex_vector(pairs_to_complex(chans["h_s"]), n_t),
            h_e=complex_vector(pairs_to_complex(chans["h_e"]), n_t),
            h_p=complex_vector(pairs_to_complex(chans["h_p"]), n_t),
        )
        params = params_from_dict(n_t, doc["params"])
    except KeyError as exc:
        raise StructuralError(f"instance is missing key {exc}") from exc
    return ch, params


def dump_instance(ch, params):
    """Inverse of load_instance (linear-scale parameter keys)."""
    fields = {k: getattr(params, k) for k in (
        "r_d", "e_s", "p_tx", "p_f", "p_c", "eta_eh", "xi", "eps_outer",
        "zeta_inner")}
    return {
        "n_t": params.n_t,
        "channels": {
            "h_s": complex_to_pairs(ch.h_s),
            "h_e": complex_to_pairs(ch.h_e),
            "h_p": complex_to_pairs(ch.h_p),
        },
        "params": fields,
    }


def covariance_to_pairs(q):
    """Covariance -> row-major nested [re, im] pairs for JSON output."""
    if isinstance(q, HermitianMatrix):
        q = q.matrix
    return complex_to_pairs(np.asarray(q, dtype=np.complex128))
