import numpy as np
import pytest

from levybarrier.contours import default_contour_set
from levybarrier.engine import (BarrierEngine, CauchyMatrices, PayoffSpec, WhatPair,
                                build_transfer_matrices, final_kernels, initial_what, next_what,
                                sum_series_resolvent, sum_series_truncated)
from levybarrier.pricing import PriceRequest, price
from levybarrier.tables import SPOTS
from levybarrier.wiener_hopf import FactorSolver

Q = np.array([3.0, 1.0 + 4.0j, 20.0])


def _setup(model, payoff, T=0.25, width=None):
    cs = default_contour_set(model, payoff.h_minus, payoff.h_plus, [0.0], T=T,
                             kind=payoff.kind, a=payoff.a)
    fs = FactorSolver(model, cs.L_plus, cs.L_minus, cs.L_plus_fine, cs.L_minus_fine,
                      need_minus_i=payoff.kind == "call")
    whf = fs.tables(Q)
    return cs, whf


def test_notouch_initial_vector_closed_form(kobol12):
    p = PayoffSpec.no_touch(-0.05, 0.05)
    cs, whf = _setup(kobol12, p)
    w1 = initial_what(p, cs, whf)
    i0 = cs.L_minus.n_half
    chi0 = cs.L_minus.points[i0]
    assert w1.w_plus[0, i0] == -1j / chi0


def test_payoff_validation():
    with pytest.raises(ValueError):
        PayoffSpec.digital_put(0.06, -0.05, 0.05)
    with pytest.raises(ValueError):
        PayoffSpec("notouch", 0.05, -0.05)


def test_transfer_matrix_tails_decay(kobol12):
    p = PayoffSpec.no_touch(-0.05, 0.05)
    cs, whf = _setup(kobol12, p)
    K_mp, K_pm = build_transfer_matrices(p, cs, whf)
    col = np.abs(K_mp[0]).max(axis=0)
    assert col[0] < 1e-15 and col[-1] < 1e-15
    col = np.abs(K_pm[0]).max(axis=0)
    assert col[0] < 1e-15 and col[-1] < 1e-15


def test_wider_corridor_smaller_kernel(kobol12):
    narrow, wide = PayoffSpec.no_touch(-0.05, 0.05), PayoffSpec.no_touch(-0.1, 0.1)
    cs, whf = _setup(kobol12, narrow)
    Kn, _ = build_transfer_matrices(narrow, cs, whf)
    Kw, _ = build_transfer_matrices(wide, cs, whf)
    nz = np.abs(Kn) > 1e-300
    assert np.all(np.abs(Kw)[nz] < np.abs(Kn)[nz])


def test_iterates_contract(kobol12):
    p = PayoffSpec.no_touch(-0.05, 0.05)
    cs, whf = _setup(kobol12, p)
    K_mp, K_pm = build_transfer_matrices(p, cs, whf)
    w = initial_what(p, cs, whf)
    norms = []
    for _ in range(6):
        norms.append(np.abs(w.w_plus).max(axis=-1))
        w = next_what(w, K_mp, K_pm)
    norms = np.array(norms)
    assert np.all(norms[1:] < norms[:-1])


def test_truncated_sum_edge_cases(kobol12):
    p = PayoffSpec.no_touch(-0.05, 0.05)
    cs, whf = _setup(kobol12, p)
    K_mp, K_pm = build_transfer_matrices(p, cs, whf)
    w1 = initial_what(p, cs, whf)
    s0 = sum_series_truncated(w1, K_mp, K_pm, M0=0)
    assert np.array_equal(s0.w_plus, -w1.w_plus) and np.array_equal(s0.w_minus, -w1.w_minus)
    with pytest.raises(ValueError):
        sum_series_truncated(w1, K_mp, K_pm, M0=-1)


@pytest.mark.parametrize("T", [0.004, 0.25])
def test_truncated_sum_saturates(kobol12, T):
    # Extra terms are corridor re-crossings: visible in the transform at small |q|,
    # negligible once inverted at short maturities.
    p = PayoffSpec.no_touch(-0.05, 0.05)
    v9 = price(PriceRequest(kobol12, p, T, SPOTS, M0=9)).values
    v12 = price(PriceRequest(kobol12, p, T, SPOTS, M0=12)).values
    assert np.abs(v9 - v12).max() <= 1e-15


def test_resolvent_matches_truncated(kobol12):
    p = PayoffSpec.no_touch(-0.05, 0.05)
    cs, whf = _setup(kobol12, p)
    K_mp, K_pm = build_transfer_matrices(p, cs, whf)
    w1 = initial_what(p, cs, whf)
    w2 = next_what(w1, K_mp, K_pm)
    st = sum_series_truncated(w1, K_mp, K_pm, M0=30)
    for mode in ("solve", "inverse"):
        sr = sum_series_resolvent(w1, w2, K_mp, K_pm, mode=mode)
        assert np.abs(sr.w_plus - st.w_plus).max() <= 1e-12
        assert np.abs(sr.w_minus - st.w_minus).max() <= 1e-12


def test_resolvent_with_zero_kernel():
    rng = np.random.default_rng(1)
    w1 = WhatPair(rng.standard_normal((2, 5)) + 0j, rng.standard_normal((2, 4)) + 0j, 1)
    w2 = WhatPair(rng.standard_normal((2, 5)) + 0j, np.zeros((2, 4), complex), 2)
    K_mp, K_pm = np.zeros((2, 5, 4), complex), np.zeros((2, 4, 5), complex)
    s = sum_series_resolvent(w1, w2, K_mp, K_pm)
    assert np.allclose(s.w_plus, w2.w_plus - w1.w_plus, atol=0)
    assert np.allclose(s.w_minus, w2.w_minus - w1.w_minus, atol=0)


def test_final_kernels_decay_and_reject_outside(kobol12):
    p = PayoffSpec.no_touch(-0.05, 0.05)
    xs = [-0.049, 0.0, 0.049]
    cs = default_contour_set(kobol12, -0.05, 0.05, xs, T=0.25)
    Ep, Em = final_kernels(cs, p, xs)
    assert np.abs(Ep[:, [0, -1]]).max() < 1e-15 and np.abs(Em[:, [0, -1]]).max() < 1e-15
    with pytest.raises(ValueError):
        final_kernels(cs, p, [0.05])


@pytest.mark.parametrize("kind", ["notouch", "digital", "call"])
def test_conjugate_symmetry_in_q(kobol12, kind):
    p = {"notouch": PayoffSpec.no_touch(-0.05, 0.05),
         "digital": PayoffSpec.digital_put(-0.01, -0.05, 0.05),
         "call": PayoffSpec.call(0.0, -0.05, 0.05)}[kind]
    xs = [-0.03, 0.0, 0.02]
    cs = default_contour_set(kobol12, -0.05, 0.05, xs, T=0.25, kind=kind, a=p.a)
    eng = BarrierEngine(kobol12, p, xs, cs)
    q = np.array([1.0 + 4.0j, 7.0 - 2.0j])
    v, vc = eng(q), eng(np.conj(q))
    assert np.abs(vc - np.conj(v)).max() <= 1e-13 * max(1.0, np.abs(v).max())


def test_cauchy_matrices_shapes():
    c = CauchyMatrices.build(np.array([1j, 2 + 1j, -2 + 1j]), np.array([-1j, 1 - 1j]))
    assert c.D_mp.shape == (2, 3) and c.D_pm.shape == (3, 2)
