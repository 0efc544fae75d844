"""Solution structure certificates: rank, stationarity, multipliers."""

import math

import numpy as np
from scipy.optimize import nnls

from seecr.certification import _nonneg_lstsq, certify
from seecr.harness import sample_channels
from seecr.model import ChannelSet, SystemParams
from seecr.optimizer import maximize_see


def test_nonneg_lstsq_matches_scipy():
    rng = np.random.default_rng(13)
    for _ in range(40):
        m = rng.integers(1, 5)
        rows = rng.integers(2, 30)
        a = rng.standard_normal((rows, m))
        b = rng.standard_normal(rows)
        x1 = _nonneg_lstsq(a, b)
        x2, r2 = nnls(a, b)
        r1 = np.linalg.norm(a @ x1 - b)
        assert np.all(x1 >= 0)
        assert abs(r1 - r2) < 1e-8 * max(1.0, r2), (r1, r2)
        assert np.abs(x1 - x2).max() < 1e-6 * max(1.0, np.abs(x2).max())


def test_solver_output_certifies():
    pr = SystemParams(n_t=3, r_d=0.5, e_s=1.0, p_tx=10 ** 1.3)
    seen = 0
    for trial in range(8):
        ch = sample_channels(7, trial, 3)
        sol = maximize_see(ch, pr)
        if sol.status != "Optimal":
            continue
        cert = sol.certificate
        assert cert.passed
        assert cert.rank == 1 and cert.eig_ratio <= 1e-4
        assert cert.stationarity_residual <= 1e-4 * (1 + cert.residual_scale)
        assert all(v >= 0 for v in cert.multipliers.values())
        # the full dual matrix stays negative semidefinite at the optimum
        assert cert.metadata["dual_excess"] <= 1e-8
        # beamformer reconstructs the covariance
        v = cert.beamformer
        assert np.abs(np.outer(v, v.conj()) - sol.q.matrix).max() < 1e-6
        seen += 1
    assert seen >= 5


def test_power_multiplier_hand_value():
    """Budget cap below the unconstrained optimum: mu = 1/((1+P)ln2) - lam
    from the stationarity equation along the beam, everything else slack."""
    ch = ChannelSet(h_s=np.array([1.0 + 0j, 0j]),
                    h_e=np.array([0j, 0j]),
                    h_p=np.array([0j, 1.0 + 0j]))
    pr = SystemParams(n_t=2, r_d=0.0, e_s=0.1, p_tx=1.0)
    sol = maximize_see(ch, pr)
    assert sol.status == "Optimal"
    assert abs(sol.q.trace() - 1.0) < 1e-5  # cap binds
    cert = sol.certificate
    assert cert.passed
    lam = sol.lam
    mu_ref = 1.0 / (2.0 * math.log(2.0)) - lam
    assert mu_ref > 0
    got = cert.multipliers["power"]
    print(f"power multiplier {got:.6f} vs hand value {mu_ref:.6f}")
    assert abs(got - mu_ref) < 1e-3
    assert cert.multipliers.get("rate", 0.0) == 0.0
    assert cert.multipliers.get("leakage", 0.0) == 0.0


def test_full_rank_candidate_fails():
    ch = sample_channels(40, 0, 3)
    pr = SystemParams(n_t=3, r_d=0.5, e_s=1.0, p_tx=10 ** 1.3)
    cert = certify(ch, pr, np.eye(3, dtype=complex), lam=0.2)
    assert not cert.passed
    assert cert.rank == 3
    assert cert.eig_ratio > 1e-4


def test_non_stationary_candidate_fails():
    # rank one and feasible, but half the optimal power: no nonnegative
    # multipliers can zero the gradient there
    ch = ChannelSet(h_s=np.array([1.0 + 0j, 0j]),
                    h_e=np.array([0j, 0j]),
                    h_p=np.array([0j, 1.0 + 0j]))
    pr = SystemParams(n_t=2, r_d=0.0, e_s=0.1, p_tx=20.0)
    sol = maximize_see(ch, pr)
    assert sol.status == "Optimal"
    q_bad = 0.5 * sol.q.matrix
    cert = certify(ch, pr, q_bad, lam=sol.lam)
    assert cert.rank == 1  # structure alone is not enough
    assert not cert.passed
    assert cert.stationarity_residual > 1e-3 * (1 + cert.residual_scale)


def test_zero_matrix_rejected():
    ch = sample_channels(41, 0, 2)
    pr = SystemParams(n_t=2, r_d=0.5, e_s=1.0, p_tx=10.0)
    cert = certify(ch, pr, np.zeros((2, 2), dtype=complex), lam=0.0)
    assert not cert.passed
    assert cert.rank == 0
