import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdeco.channels import ChannelMatrix, QoChannel, named_channel, qo_snapshot
from qdeco.errors import ValidationError
from qdeco.ghz import (
    GhzDiagonal,
    blockwise_lower_M,
    blockwise_qo_upper_M,
    blockwise_upper_M,
    blockwise_upper_M_from_kt,
    blockwise_upper_M_small_kt,
    blockwise_upper_m,
    ghz_depol_coeffs,
    ghz_depolarize,
    ghz_distill_time_estimate,
    ghz_lambda_product_monotonicity,
    ghz_lifetime,
    ghz_ppt_condition,
    ghz_qo_coeffs,
    ghz_qo_distillable_lower,
)
from qdeco.graphs import Bipartition
from qdeco.oracle import (
    apply_uniform_channel,
    dense_ghz,
    ghz_structure,
    is_ppt_dense,
)

QO = QoChannel(B=1.0, C=0.8, s=0.3)


# --- Coefficient formulas vs the dense oracle -------------------------------


@pytest.mark.parametrize("n", [2, 3, 5, 6])
@pytest.mark.parametrize("p", [0.15, 0.6, 0.93])
def test_depolarizing_coefficients_match_dense(n, p):
    d = ghz_depol_coeffs(n, p)
    noisy = apply_uniform_channel(
        dense_ghz(n), ChannelMatrix.from_pauli(named_channel("depolarizing", p))
    )
    lam, mu = ghz_structure(noisy)
    assert np.allclose(lam, d.lam, atol=1e-12)
    assert mu == pytest.approx(d.mu, abs=1e-12)
    assert d.symmetric


@pytest.mark.parametrize("n", [2, 4, 5])
@pytest.mark.parametrize("t", [0.13, 0.9, 2.7])
def test_qo_coefficients_match_dense(n, t):
    d = ghz_qo_coeffs(n, QO, t)
    noisy = apply_uniform_channel(
        dense_ghz(n), ChannelMatrix.from_qo_snapshot(qo_snapshot(QO, t))
    )
    lam, mu = ghz_structure(noisy)
    assert np.allclose(lam, d.lam, atol=1e-12)
    assert mu == pytest.approx(d.mu, abs=1e-12)
    # An asymmetric bath (s != 1/2) breaks the k <-> n-k symmetry.
    assert not d.symmetric


def test_validation_of_diagonal_state():
    with pytest.raises(ValidationError):
        GhzDiagonal(2, (0.5, 0.1), 0.0, True)  # wrong length
    with pytest.raises(ValidationError):
        GhzDiagonal(2, (0.5, 0.25, -0.5), 0.0, True)
    with pytest.raises(ValidationError):
        GhzDiagonal(2, (0.5, 0.0, 0.5), 0.9, True)


# --- Partial-transpose condition --------------------------------------------


@pytest.mark.parametrize("n,k", [(4, 1), (4, 2), (5, 2)])
def test_ppt_condition_matches_dense_partial_transpose(n, k):
    crit = ghz_lifetime(n, k).value
    for p in (crit - 0.02, crit + 0.02):
        d = ghz_depol_coeffs(n, p)
        noisy = apply_uniform_channel(
            dense_ghz(n), ChannelMatrix.from_pauli(named_channel("depolarizing", p))
        )
        # Any size-k subset will do; the state is permutation invariant.
        part = Bipartition((1 << k) - 1, n)
        assert ghz_ppt_condition(d, k) == is_ppt_dense(noisy, part)


def test_two_qubit_lifetime_is_inverse_sqrt_three():
    r = ghz_lifetime(2, 1)
    assert r.sign_change_found
    assert r.value == pytest.approx(1 / math.sqrt(3), abs=1e-9)
    assert r.kt == pytest.approx(0.5 * math.log(3), abs=1e-8)


def test_one_vs_rest_is_most_fragile():
    # The single-party transpose turns positive at the largest p, i.e.
    # earliest in time; balanced splits survive longest.
    p1 = ghz_lifetime(6, 1).value
    p2 = ghz_lifetime(6, 2).value
    p3 = ghz_lifetime(6, 3).value
    assert p1 > p2 > p3


def test_lifetime_shrinks_with_n_for_one_vs_rest():
    # In time units the one-vs-rest lifetime shrinks as parties are added
    # (the critical p rises), monotonically from n = 3 on.  n = 2 -> 3 is
    # the lone exception: 4p^3 + p^2 - 1 = 0 sits below 1/sqrt(3).
    values = [ghz_lifetime(n, 1).value for n in range(3, 9)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert ghz_lifetime(3, 1).value == pytest.approx(0.55669, abs=1e-4)
    assert ghz_lifetime(3, 1).value < ghz_lifetime(2, 1).value


def test_qo_lifetime_brackets_dense_flip():
    t_crit = ghz_lifetime(3, 1, QO).value
    for t, expect_ppt in ((t_crit - 0.01, False), (t_crit + 0.01, True)):
        noisy = apply_uniform_channel(
            dense_ghz(3), ChannelMatrix.from_qo_snapshot(qo_snapshot(QO, t))
        )
        assert is_ppt_dense(noisy, Bipartition(0b001, 3)) == expect_ppt


def test_lifetime_rejects_bad_group():
    with pytest.raises(ValidationError):
        ghz_lifetime(4, 0)
    with pytest.raises(ValidationError):
        ghz_lifetime(4, 4)
    with pytest.raises(ValidationError):
        ghz_lifetime(4, 1, channel="bitflip")


# --- Symmetrization and structure -------------------------------------------


def test_depolarize_symmetrizes_and_is_idempotent():
    d = ghz_qo_coeffs(5, QO, 0.4)
    sym = ghz_depolarize(d)
    assert sym.symmetric
    assert sym.mu == d.mu
    again = ghz_depolarize(sym)
    assert np.allclose(again.lam, sym.lam)


@given(
    st.integers(min_value=2, max_value=8),
    st.floats(min_value=0.01, max_value=0.99),
)
@settings(max_examples=60, deadline=None)
def test_product_monotonicity_for_depolarizing(n, p):
    assert ghz_lambda_product_monotonicity(ghz_depol_coeffs(n, p))


@given(
    st.integers(min_value=2, max_value=7),
    st.floats(min_value=0.05, max_value=3.0),
)
@settings(max_examples=60, deadline=None)
def test_product_monotonicity_for_qo(n, t):
    assert ghz_lambda_product_monotonicity(ghz_depolarize(ghz_qo_coeffs(n, QO, t)))


def test_qo_distillable_certificate_is_sufficient():
    n = 5
    for t in (0.02, 0.1, 0.3, 0.7):
        if ghz_qo_distillable_lower(n, QO, t):
            d = ghz_depolarize(ghz_qo_coeffs(n, QO, t))
            for k in range(1, n // 2 + 1):
                assert not ghz_ppt_condition(d, k)


def test_qo_certificate_eventually_fails():
    assert ghz_qo_distillable_lower(4, QO, 0.01)
    assert not ghz_qo_distillable_lower(4, QO, 5.0)


# --- Blockwise bounds ---------------------------------------------------------


def test_blockwise_reference_values():
    assert blockwise_upper_M(math.exp(-0.8049)) == pytest.approx(2.0, abs=5e-3)
    assert blockwise_upper_M(math.exp(-0.01)) == pytest.approx(1057.0, abs=1.0)


def test_blockwise_from_kt_matches_plain_form():
    for kt in (1e-6, 1e-3, 0.05, 0.5, 2.0, 5.0):
        a = blockwise_upper_M_from_kt(kt)
        b = blockwise_upper_M(math.exp(-kt))
        assert a == pytest.approx(b, rel=1e-9)


def test_blockwise_from_kt_stable_at_extreme_times():
    # Near kt = 1e-73 the plain form would see p == 1.0 and blow up; the
    # stable form must keep growing smoothly.
    tiny = blockwise_upper_M_from_kt(1e-73)
    tinier = blockwise_upper_M_from_kt(1e-150)
    assert 0 < tiny < tinier < math.inf
    # Asymptotics: M(kt) ~ [ln(2/kt)] / [kt/2] for tiny kt.
    kt = 1e-100
    expected = math.log(2.0 / kt) / (kt / 2.0)
    assert blockwise_upper_M_from_kt(kt) == pytest.approx(expected, rel=1e-2)


def test_blockwise_ordering_and_block_size_identity():
    for p in (0.2, 0.5, 0.9, 0.99):
        up = blockwise_upper_M(p)
        lo = blockwise_lower_M(p)
        assert lo < up
        n = 120
        m_size = blockwise_upper_m(n, p)
        assert n / m_size == pytest.approx(up, rel=1e-12)


def test_blockwise_small_kt_regression():
    # The asymptotic form -2 ln(kt)/kt undershoots the exact value by about
    # 12.8% at kt = 0.01; pin both numbers so drift is caught.
    kt = 0.01
    approx = blockwise_upper_M_small_kt(kt)
    exact = blockwise_upper_M_from_kt(kt)
    assert approx == pytest.approx(921.034, abs=0.01)
    assert exact == pytest.approx(1057.0226, abs=0.01)
    assert abs(approx - exact) / exact == pytest.approx(0.1284, abs=2e-3)
    # The deviation decays only logarithmically.
    assert abs(blockwise_upper_M_small_kt(1e-6) / blockwise_upper_M_from_kt(1e-6) - 1) < 0.05


def test_blockwise_qo_matches_depolarizing_special_case():
    # With equal rates and a symmetric bath the time-t channel is exactly
    # depolarizing at p = e^{-Bt}; the group-count bounds then obey
    # M_qo / M_depol = 2D / (2D + ln p) with D = ln((1+p)/(2p)).
    ch = QoChannel(B=1.0, C=1.0, s=0.5)
    for t in (0.05, 0.3, 1.0):
        p = math.exp(-t)
        m_qo = blockwise_qo_upper_M(ch, t)
        m_dep = blockwise_upper_M(p)
        d = math.log((1 + p) / (2 * p))
        assert m_qo / m_dep == pytest.approx(2 * d / (2 * d + math.log(p)), rel=1e-9)
        assert m_qo > m_dep


def test_blockwise_qo_zero_temperature_is_unbounded():
    assert blockwise_qo_upper_M(QoChannel(1.0, 0.5, 1.0), 2.0) == math.inf
    assert blockwise_qo_upper_M(QoChannel(1.0, 0.5, 0.0), 2.0) == math.inf


def test_blockwise_validation():
    for bad in (0.0, 1.0, -0.5):
        with pytest.raises(ValidationError):
            blockwise_upper_M(bad)
    with pytest.raises(ValidationError):
        blockwise_upper_M_from_kt(0.0)
    with pytest.raises(ValidationError):
        blockwise_upper_M_small_kt(-1.0)


def test_distill_time_estimate():
    assert ghz_distill_time_estimate(10) == pytest.approx(math.log(2) / 10)
    with pytest.raises(ValidationError):
        ghz_distill_time_estimate(1)
