"""Physical quantities and instance (de)serialization."""

import json
import math

import numpy as np
import pytest

from seecr.model import (ChannelSet, ContractViolationError, SystemParams,
                         db_to_linear, dump_instance, harvested_energy,
                         interference_leakage, is_feasible, linear_to_db,
                         load_instance, params_from_dict, secrecy_rate,
                         see, transmit_power)
from seecr.hermitian import StructuralError


def simple_instance():
    ch = ChannelSet(h_s=np.array([1.0 + 0j, 1.0j]),
                    h_e=np.array([0.5 + 0j, 0.0j]),
                    h_p=np.array([0.0j, 2.0 + 0j]))
    pr = SystemParams(n_t=2, r_d=0.5, e_s=0.2, p_tx=10.0, p_f=1.0, p_c=1.0,
                      eta_eh=0.5, xi=0.8)
    return ch, pr


def test_hand_computed_quantities():
    ch, pr = simple_instance()
    q = np.diag([2.0, 1.0]).astype(complex)
    # h_s^H Q h_s = 2*1 + 1*1 = 3 ; h_e^H Q h_e = 2*0.25 = 0.5
    assert abs(secrecy_rate(ch, q) - (math.log2(4.0) - math.log2(1.5))) < 1e-12
    # (tr Q + P_c)/xi = 4/0.8
    assert abs(transmit_power(pr, q) - 5.0) < 1e-12
    assert abs(see(pr, ch, q)
               - (math.log2(4.0) - math.log2(1.5)) / 5.0) < 1e-12
    # eta*(0.5 + 1)
    assert abs(harvested_energy(pr, ch, q) - 0.75) < 1e-12
    # h_p^H Q h_p = 1*4
    assert abs(interference_leakage(ch, q) - 4.0) < 1e-12


def test_secrecy_rate_sign():
    ch, _ = simple_instance()
    # stronger eavesdropper direction -> negative rate
    flipped = ChannelSet(h_s=ch.h_e, h_e=ch.h_s, h_p=ch.h_p)
    q = np.eye(2, dtype=complex)
    assert secrecy_rate(flipped, q) < 0 < secrecy_rate(ch, q)
    assert secrecy_rate(ch, np.zeros((2, 2))) == 0.0


def test_db_helpers():
    assert abs(db_to_linear(13.0) - 10 ** 1.3) < 1e-12
    assert abs(db_to_linear(0.0) - 1.0) == 0.0
    assert abs(linear_to_db(100.0) - 20.0) < 1e-12
    assert abs(linear_to_db(db_to_linear(-20.0)) + 20.0) < 1e-10
    with pytest.raises(ValueError):
        linear_to_db(0.0)


def test_psd_contract():
    ch, pr = simple_instance()
    bad = np.diag([1.0, -0.2]).astype(complex)
    with pytest.raises(ContractViolationError):
        secrecy_rate(ch, bad)
    with pytest.raises(ContractViolationError):
        transmit_power(pr, bad)
    with pytest.raises(StructuralError):
        secrecy_rate(ch, np.eye(3))  # wrong size


def test_params_validation():
    with pytest.raises(ValueError):
        SystemParams(n_t=0, r_d=0.5, e_s=1.0, p_tx=10.0)
    with pytest.raises(ValueError):
        SystemParams(n_t=2, r_d=-0.1, e_s=1.0, p_tx=10.0)
    with pytest.raises(ValueError):
        SystemParams(n_t=2, r_d=0.5, e_s=1.0, p_tx=0.0)
    with pytest.raises(ValueError):
        SystemParams(n_t=2, r_d=0.5, e_s=1.0, p_tx=10.0, eta_eh=1.5)
    with pytest.raises(ValueError):
        SystemParams(n_t=2, r_d=0.5, e_s=1.0, p_tx=10.0, xi=0.0)
    with pytest.raises(ValueError):
        SystemParams(n_t=2, r_d=0.5, e_s=1.0, p_tx=10.0, p_c=0.0)


def test_channel_shape_checks():
    with pytest.raises(StructuralError):
        ChannelSet(h_s=np.ones(2, dtype=complex),
                   h_e=np.ones(3, dtype=complex),
                   h_p=np.ones(2, dtype=complex))


def test_params_from_dict_db_keys():
    pr = params_from_dict(3, {"r_d": 0.5, "e_s_db": 0.0, "p_tx_db": 13.0})
    assert pr.n_t == 3
    assert abs(pr.e_s - 1.0) < 1e-15
    assert abs(pr.p_tx - 10 ** 1.3) < 1e-12
    with pytest.raises(ValueError):
        params_from_dict(3, {"r_d": 0.5, "e_s": 1.0, "e_s_db": 0.0,
                             "p_tx": 10.0})
    with pytest.raises(ValueError):
        params_from_dict(3, {"r_d_db": 0.5, "e_s": 1.0, "p_tx": 10.0})


def test_is_feasible_margins():
    ch, pr = simple_instance()
    q = np.diag([0.4, 0.0]).astype(complex)
    # rate = log2(1.4) - log2(1.1) = 0.3479 < 0.5 -> infeasible via rate
    rep = is_feasible(pr, ch, q)
    assert not rep.feasible
    assert rep.margins["rate"] < 0
    assert rep.margins["harvested"] > 0  # 0.5*1.1 - 0.2
    assert rep.margins["interference"] == pytest.approx(1.0)
    assert rep.margins["power"] == pytest.approx(9.6)
    q2 = np.diag([3.0, 0.0]).astype(complex)
    rep2 = is_feasible(pr, ch, q2)
    assert rep2.feasible, rep2.margins


def test_instance_roundtrip(tmp_path):
    ch, pr = simple_instance()
    doc = dump_instance(ch, pr)
    ch2, pr2 = load_instance(doc)
    assert np.array_equal(ch2.h_s, ch.h_s)
    assert np.array_equal(ch2.h_e, ch.h_e)
    assert np.array_equal(ch2.h_p, ch.h_p)
    assert pr2 == pr
    # JSON string and file forms agree with the dict form
    text = json.dumps(doc)
    ch3, pr3 = load_instance(text)
    assert pr3 == pr and np.array_equal(ch3.h_s, ch.h_s)
    path = tmp_path / "inst.json"
    path.write_text(text, encoding="utf-8")
    ch4, pr4 = load_instance(str(path))
    assert pr4 == pr and np.array_equal(ch4.h_p, ch.h_p)


def test_load_instance_missing_key():
    with pytest.raises(StructuralError):
        load_instance({"n_t": 2, "channels": {}, "params": {}})
