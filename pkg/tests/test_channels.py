import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdeco.channels import (
    SIGMA,
    ChannelFamily,
    ChannelMatrix,
    DephasingSplit,
    PauliChannel,
    QoChannel,
    channel_matrix_from_spec,
    compose_dephasing,
    decay_gamma,
    decay_kraus,
    dephasing_matrix,
    depolarizing_eb_threshold,
    eb_threshold,
    extract_dephasing,
    is_entanglement_breaking_pauli,
    is_entanglement_breaking_qo,
    jamiolkowski_state,
    minimal_dephasing_matrix,
    minimal_dephasing_pauli,
    named_channel,
    partial_trace_out_second,
    qo_snapshot,
)
from qdeco.errors import ValidationError


def random_density(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def pauli_probs(rng):
    raw = rng.uniform(0.05, 1.0, size=4)
    return raw / raw.sum()


# --- Pauli channels -------------------------------------------------------


def test_pauli_channel_validation():
    with pytest.raises(ValidationError):
        PauliChannel(0.5, 0.5, 0.5, -0.5)
    with pytest.raises(ValidationError):
        PauliChannel(0.5, 0.1, 0.1, 0.1)


def test_named_channel_forms():
    d = named_channel("depolarizing", 0.6)
    assert d.probs == pytest.approx(((1 + 1.8) / 4, 0.1, 0.1, 0.1))
    z = named_channel("dephasing", 0.6)
    assert z.probs == pytest.approx((0.8, 0.0, 0.0, 0.2))
    x = named_channel("bitflip", 0.6)
    assert x.probs == pytest.approx((0.8, 0.2, 0.0, 0.0))
    with pytest.raises(ValidationError):
        named_channel("depolarizing", 1.5)
    with pytest.raises(ValidationError):
        named_channel("amplitude", 0.5)


def test_compose_dephasing_multiplies():
    assert compose_dephasing(0.9, 0.8) == pytest.approx(0.72)
    # Cross-check against matrix composition.
    m = dephasing_matrix(0.9).compose(dephasing_matrix(0.8))
    assert np.allclose(m.p, dephasing_matrix(0.72).p, atol=1e-12)


def test_channel_application_matches_explicit_mixing():
    rng = np.random.default_rng(0)
    for _ in range(5):
        p = pauli_probs(rng)
        ch = ChannelMatrix.from_pauli(PauliChannel(*p))
        rho = random_density(rng)
        expected = sum(w * s @ rho @ s.conj().T for w, s in zip(p, SIGMA))
        assert np.allclose(ch.apply(rho), expected, atol=1e-12)


def test_superop_round_trip_and_action():
    rng = np.random.default_rng(1)
    p = pauli_probs(rng)
    ch = ChannelMatrix.from_pauli(PauliChannel(*p))
    s = ch.to_superop()
    back = ChannelMatrix.from_superop(s)
    assert np.allclose(back.p, ch.p, atol=1e-12)
    rho = random_density(rng)
    assert np.allclose(
        (s @ rho.reshape(-1)).reshape(2, 2), ch.apply(rho), atol=1e-12
    )


# --- Quantum-optical channel ----------------------------------------------


def test_qo_channel_validation():
    with pytest.raises(ValidationError):
        QoChannel(B=2.0, C=0.5, s=0.5)  # violates 2C >= B
    with pytest.raises(ValidationError):
        QoChannel(B=1.0, C=1.0, s=1.5)
    with pytest.raises(ValidationError):
        QoChannel(B=-1.0, C=1.0, s=0.5)


def test_qo_snapshot_identities():
    ch = QoChannel(B=1.0, C=0.8, s=0.3)
    for t in (0.0, 0.2, 1.5, 7.0):
        snap = qo_snapshot(ch, t)
        assert sum(snap.lambdas) == pytest.approx(1.0)
        assert snap.a + snap.c == pytest.approx(1.0 + math.exp(-ch.B * t))
        assert snap.lambda0 - snap.lambda3 == pytest.approx(snap.b)
        assert snap.lambda1 == snap.lambda2
    assert qo_snapshot(ch, 0.0).lambdas == pytest.approx((1.0, 0.0, 0.0, 0.0))


def test_qo_matrix_is_a_valid_channel_but_not_unital():
    m = ChannelFamily.from_spec({"kind": "qo", "B": 1.0, "C": 0.9, "s": 0.25}).matrix(0.7)
    rho = jamiolkowski_state(m)  # validates CP + trace
    assert m.is_trace_preserving()
    # The pump toward the bath equilibrium makes the map non-unital: the
    # output-side reduction of the dual state is polarized.
    assert not np.allclose(partial_trace_out_second(rho), np.eye(2) / 2, atol=1e-6)


def test_qo_symmetric_bath_has_no_coherence_term():
    snap = qo_snapshot(QoChannel(B=1.0, C=1.0, s=0.5), 0.9)
    assert snap.mu == 0.0
    m = ChannelMatrix.from_qo_snapshot(snap)
    assert np.allclose(m.p, np.diag(np.diag(m.p)), atol=1e-15)


# --- Decay channel ----------------------------------------------------------


def test_decay_kraus_completeness():
    for kt in (0.0, 0.3, 2.0):
        ops = decay_kraus(decay_gamma(kt))
        total = sum(k.conj().T @ k for k in ops)
        assert np.allclose(total, np.eye(2), atol=1e-12)


def test_decay_matrix_matches_kraus_action():
    rng = np.random.default_rng(2)
    gamma = 0.35
    ops = decay_kraus(gamma)
    ch = ChannelMatrix.from_kraus(ops)
    rho = random_density(rng)
    expected = sum(k @ rho @ k.conj().T for k in ops)
    assert np.allclose(ch.apply(rho), expected, atol=1e-12)


# --- Entanglement breaking ---------------------------------------------------


def test_pauli_breaking_predicate():
    assert is_entanglement_breaking_pauli(named_channel("depolarizing", 0.2))
    assert is_entanglement_breaking_pauli(named_channel("depolarizing", 1 / 3))
    assert not is_entanglement_breaking_pauli(named_channel("depolarizing", 0.34))


def test_depolarizing_eb_threshold_is_exactly_one_third():
    assert depolarizing_eb_threshold() == 1.0 / 3.0


def test_eb_threshold_routes_agree_for_depolarizing():
    fam = ChannelFamily.from_spec("depolarizing")
    a = eb_threshold(fam, via="analytic")
    j = eb_threshold(fam, via="jamiolkowski")
    assert a.sign_change_found and j.sign_change_found
    assert a.value == pytest.approx(1 / 3, abs=1e-8)
    assert abs(a.value - j.value) < 1e-6


def test_eb_threshold_routes_agree_for_qo():
    fam = ChannelFamily.from_spec({"kind": "qo", "B": 1.0, "C": 1.0, "s": 0.5})
    a = eb_threshold(fam, via="analytic")
    j = eb_threshold(fam, via="jamiolkowski")
    # (e^t - 1)/2 = 1 at t = ln 3 for these rates.
    assert a.value == pytest.approx(math.log(3.0), abs=1e-8)
    assert abs(a.value - j.value) < 1e-6
    assert is_entanglement_breaking_qo(QoChannel(1.0, 1.0, 0.5), a.value + 1e-6)
    assert not is_entanglement_breaking_qo(QoChannel(1.0, 1.0, 0.5), a.value - 1e-6)


def test_decay_never_breaks():
    fam = ChannelFamily.from_spec({"kind": "decay", "kappa": 1.0})
    res = eb_threshold(fam, via="analytic")
    assert not res.sign_change_found
    # The dual-state route certifies strict NPT wherever round-off still
    # resolves the surviving coherence.
    from qdeco.numeric import min_eig

    idx = np.arange(4)
    rows = (idx[:, None] & ~1) | (idx[None, :] & 1)
    cols = (idx[None, :] & ~1) | (idx[:, None] & 1)
    for t in np.linspace(0.1, 30.0, 16):
        state = jamiolkowski_state(fam.matrix(float(t)))
        pt = np.zeros_like(state)
        pt[rows, cols] = state
        assert min_eig(pt) < 0.0


def test_dephasing_never_breaks_for_positive_p():
    res = eb_threshold(ChannelFamily.from_spec("dephasing"), via="analytic")
    assert not res.sign_change_found


# --- Dephasing extraction ----------------------------------------------------


def test_extract_dephasing_recomposes_exactly():
    rng = np.random.default_rng(3)
    ch = ChannelMatrix.from_pauli(PauliChannel(*pauli_probs(rng)))
    split = extract_dephasing(ch, 0.7)
    assert isinstance(split, DephasingSplit)
    recomposed = split.residual.compose(dephasing_matrix(0.7))
    assert np.allclose(recomposed.p, ch.p, atol=1e-10)


def test_minimal_dephasing_closed_forms():
    # Depolarizing: largest extractable dephasing parameter is 2p/(1+p).
    for p in (0.1, 0.5, 0.9):
        got = minimal_dephasing_pauli(named_channel("depolarizing", p))
        assert got == pytest.approx(2 * p / (1 + p), abs=1e-12)
    # A dephasing channel is its own extraction.
    for p in (0.2, 0.8):
        assert minimal_dephasing_pauli(named_channel("dephasing", p)) == pytest.approx(
            p, abs=1e-12
        )
    # Bitflip has a one-sided zero pair: nothing extractable.
    assert minimal_dephasing_pauli(named_channel("bitflip", 0.4)) is None
    # The identity admits only the trivial split.
    assert minimal_dephasing_pauli(PauliChannel(1.0, 0.0, 0.0, 0.0)) is None


@given(st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=20, deadline=None)
def test_minimal_dephasing_matrix_route_agrees(seed):
    rng = np.random.default_rng(seed)
    ch = PauliChannel(*pauli_probs(rng))
    closed = minimal_dephasing_pauli(ch)
    numeric = minimal_dephasing_matrix(ChannelMatrix.from_pauli(ch))
    assert closed is not None and numeric is not None
    assert abs(closed - numeric) < 1e-6


def test_minimal_dephasing_matrix_none_for_bitflip():
    m = ChannelMatrix.from_pauli(named_channel("bitflip", 0.4))
    assert minimal_dephasing_matrix(m) is None


# --- Jamiolkowski dual state -------------------------------------------------


def test_jamiolkowski_of_pauli_is_bell_diagonal():
    rng = np.random.default_rng(4)
    p = pauli_probs(rng)
    rho = jamiolkowski_state(ChannelMatrix.from_pauli(PauliChannel(*p)))
    eigs = np.sort(np.linalg.eigvalsh(rho))
    assert np.allclose(eigs, np.sort(p), atol=1e-12)


def test_jamiolkowski_rejects_non_cp():
    bad = ChannelMatrix(np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex))
    with pytest.raises(ValidationError):
        jamiolkowski_state(bad)


# --- Channel family specs ----------------------------------------------------


def test_family_spec_parsing():
    fam = ChannelFamily.from_spec("depolarizing")
    assert fam.is_pauli_family and fam.kind == "depolarizing"
    fam = ChannelFamily.from_spec({"kind": "qo", "B": 1.0, "C": 1.0, "s": 0.5, "t": 2.0})
    assert not fam.is_pauli_family
    assert fam.param("t") == 2.0
    assert fam.param("missing", 7.0) == 7.0
    with pytest.raises(ValidationError):
        fam.param("missing")
    with pytest.raises(ValidationError):
        ChannelFamily.from_spec({"kind": "depolarizing", "B": 1.0})
    with pytest.raises(ValidationError):
        ChannelFamily.from_spec({"kind": "nonsense"})
    with pytest.raises(ValidationError):
        ChannelFamily.from_spec({"p": 0.5})


def test_family_matrix_axes():
    dep = ChannelFamily.from_spec("depolarizing").matrix(0.4)
    assert np.allclose(
        dep.p, ChannelMatrix.from_pauli(named_channel("depolarizing", 0.4)).p
    )
    fixed = channel_matrix_from_spec({"kind": "dephasing", "p": 0.25})
    assert np.allclose(fixed.p, dephasing_matrix(0.25).p)
    decay = ChannelFamily.from_spec({"kind": "decay", "kappa": 2.0})
    assert np.allclose(
        decay.matrix(0.5).p,
        ChannelMatrix.from_kraus(decay_kraus(decay_gamma(1.0))).p,
        atol=1e-12,
    )
    fixed_pauli = ChannelFamily.from_spec(
        {"kind": "pauli", "p0": 0.7, "p1": 0.1, "p2": 0.1, "p3": 0.1}
    )
    assert np.allclose(
        fixed_pauli.fixed_matrix().p,
        ChannelMatrix.from_pauli(PauliChannel(0.7, 0.1, 0.1, 0.1)).p,
    )


def test_eb_threshold_rejects_fixed_pauli():
    fam = ChannelFamily.from_spec(
        {"kind": "pauli", "p0": 0.7, "p1": 0.1, "p2": 0.1, "p3": 0.1}
    )
    with pytest.raises(ValidationError):
        eb_threshold(fam)
