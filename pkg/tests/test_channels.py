"""Channel tables, XOR preprocessing, and the symmetrizability LP."""

import math

import numpy as np
import pytest

from avcsim.bivariate import BinaryJointDist
from avcsim.channels import (
    BscParam,
    ChannelTable,
    LpNumericalError,
    average_crossover,
    avc_kernel,
    binary_entropy,
    bsc_capacity,
    bsc_table,
    compose_bsc,
    crossover_probs,
    effective_channel,
    is_bsc,
    max_crossover_bounds,
    mutual_information_uniform,
    pinsker_bound,
    symmetrizability_lp,
    symmetrization_residual,
    w0_table,
)

from oracles import erfc_oracle, entropy_bits


def test_binary_entropy_endpoints_and_symmetry():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0, abs=1e-15)
    for t in np.linspace(0.01, 0.49, 25):
        assert binary_entropy(float(t)) == pytest.approx(binary_entropy(float(1 - t)), abs=1e-14)
        assert binary_entropy(float(t)) == pytest.approx(entropy_bits([t, 1 - t]), abs=1e-14)
    with pytest.raises(ValueError):
        binary_entropy(1.2)
    assert bsc_capacity(0.11) == pytest.approx(1.0 - binary_entropy(0.11))


def test_crossover_probs_against_erfc_oracle():
    for alpha in (0.25, 0.5, 1.0, 2.0, 3.0):
        p, pt = crossover_probs(alpha)
        assert p == pytest.approx(0.5 * erfc_oracle(2.0 * alpha), abs=1e-14)
        assert pt == pytest.approx(
            0.5 * erfc_oracle(alpha / math.sqrt(1.0 + alpha * alpha)), abs=1e-14)
        assert 0.0 < p < pt < 0.5
    # frozen working point used across the suite
    p1, pt1 = crossover_probs(1.0)
    assert p1 == pytest.approx(0.0023388674905236327, abs=1e-15)
    assert pt1 == pytest.approx(0.15865525393145707, abs=1e-14)
    with pytest.raises(ValueError):
        crossover_probs(0.0)


def test_crossover_probs_limits():
    p_small, pt_small = crossover_probs(1e-9)
    assert p_small == pytest.approx(0.5, abs=1e-8)
    assert pt_small == pytest.approx(0.5, abs=1e-8)
    values = [crossover_probs(a) for a in np.linspace(0.1, 3.0, 30)]
    assert all(b[0] < a[0] and b[1] < a[1] for a, b in zip(values, values[1:]))


def test_channel_table_validation_and_accessors():
    with pytest.raises(ValueError, match="shape"):
        ChannelTable((0,), (0, 1), (0, 1), np.ones((2, 2, 2)) * 0.5)
    with pytest.raises(ValueError, match="nonnegative"):
        ChannelTable((0,), (0, 1), (0, 1), [[[1.1, -0.1], [0.5, 0.5]]])
    with pytest.raises(ValueError, match="sum to 1"):
        ChannelTable((0,), (0, 1), (0, 1), [[[0.6, 0.6], [0.5, 0.5]]])
    tab = bsc_table(0.2, n_states=3)
    assert tab.prob(1, 2, 0) == pytest.approx(0.2)
    sub = tab.restrict(states=(0, 2))
    assert sub.states == (0, 2) and sub.w.shape == (2, 2, 2)
    assert not tab.w.flags.writeable


def test_channel_table_json_round_trip():
    tab = avc_kernel(0.7)
    clone = ChannelTable.from_json_dict(tab.to_json_dict())
    assert clone.states == tab.states
    assert np.array_equal(clone.w, tab.w)
    with pytest.raises(ValueError, match="missing"):
        ChannelTable.from_json_dict({"states": [0], "inputs": [0], "outputs": [0]})


def test_w0_table_rows():
    tab = w0_table()
    for s in range(2):
        for x in range(2):
            expected = [1.0 - x, float(x)] if s == x else [0.5, 0.5]
            assert np.allclose(tab.w[s, x], expected)


def test_avc_kernel_structure():
    alpha = 1.0
    p, pt = crossover_probs(alpha)
    tab = avc_kernel(alpha)
    assert tab.states == tab.inputs == (0, 1, 2)
    assert tab.outputs == (0, 1)
    # matched BPSK letters: clean BSC(p)
    assert tab.prob(1, 0, 0) == pytest.approx(p)
    assert tab.prob(0, 1, 1) == pytest.approx(p)
    # a lone entangled letter on either side: BSC(p_tilde)
    assert tab.prob(1, 2, 0) == pytest.approx(pt)
    assert tab.prob(0, 2, 1) == pytest.approx(pt)
    # sender entangled: receiver output tracks the jammer's BPSK letter
    assert tab.prob(1, 0, 2) == pytest.approx(pt)
    assert tab.prob(0, 1, 2) == pytest.approx(pt)
    # crossed BPSK letters or both entangled: fair coin
    for s, x in ((0, 1), (1, 0), (2, 2)):
        assert tab.prob(0, s, x) == pytest.approx(0.5)


def test_compose_bsc_identities():
    rng = np.random.default_rng(41)
    for _ in range(50):
        t1, t2 = rng.uniform(0, 1, size=2)
        out = compose_bsc(float(t1), float(t2))
        assert out == pytest.approx(t1 * (1 - t2) + t2 * (1 - t1), abs=1e-15)
        assert out == pytest.approx(compose_bsc(float(t2), float(t1)))
    assert compose_bsc(0.3, 0.0) == pytest.approx(0.3)
    assert compose_bsc(0.3, 0.5) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        compose_bsc(-0.1, 0.2)


def test_effective_channel_shared_coin_gives_quarter_bsc():
    q_c = BinaryJointDist(0.5, 0.0, 0.0, 0.5)
    eff = effective_channel(q_c, w0_table())
    got = is_bsc(eff)
    assert got is not None and got.t == pytest.approx(0.25, abs=1e-14)


def test_effective_channel_sender_coin_is_biased_not_symmetric():
    # lambda_0 = 1 vertex: sender bit scrambled, output leans toward the state
    q_0 = BinaryJointDist(0.5, 0.0, 0.5, 0.0)
    eff = effective_channel(q_0, w0_table())
    assert np.allclose(eff.w[0], [[0.75, 0.25], [0.75, 0.25]], atol=1e-14)
    assert np.allclose(eff.w[1], [[0.25, 0.75], [0.25, 0.75]], atol=1e-14)
    assert is_bsc(eff) is None
    assert average_crossover(eff) == pytest.approx(0.5, abs=1e-14)


def test_effective_channel_average_crossover_law():
    # avg crossover = 1/2 - lambda_c / 4 for every pair distribution, per state
    rng = np.random.default_rng(42)
    for _ in range(300):
        q = BinaryJointDist(*rng.dirichlet(np.ones(4)))
        lam_c = 1.0 - 2.0 * q.q10 - 2.0 * q.q01
        eff = effective_channel(q, w0_table())
        t = average_crossover(eff)
        assert t is not None
        assert t == pytest.approx(0.5 - lam_c / 4.0, abs=1e-10)


def test_effective_channel_bsc_iff_receiver_bit_unbiased():
    rng = np.random.default_rng(43)
    hits = 0
    for _ in range(200):
        raw = rng.dirichlet(np.ones(4))
        q = BinaryJointDist(*raw)
        eff = effective_channel(q, w0_table())
        balanced = abs(q.marginal_second - 0.5) <= 1e-12
        if is_bsc(eff) is not None:
            hits += 1
            assert balanced
        else:
            assert not balanced
    assert hits == 0  # Dirichlet draws never land exactly on the balance plane
    # forcing the receiver-bit marginal onto 1/2 restores symmetry
    for _ in range(50):
        q00, q10 = rng.dirichlet(np.ones(2)) * 0.5
        q01, q11 = rng.dirichlet(np.ones(2)) * 0.5
        eff = effective_channel(BinaryJointDist(q00, q01, q10, q11), w0_table())
        got = is_bsc(eff)
        assert got is not None
        assert got.t == pytest.approx(average_crossover(eff), abs=1e-12)


def test_effective_channel_identity_and_scrambling():
    point = BinaryJointDist(1.0, 0.0, 0.0, 0.0)
    base = avc_kernel(0.8).restrict(inputs=(0, 1))
    assert np.allclose(effective_channel(point, base).w, base.w, atol=1e-15)
    flat = BinaryJointDist(0.25, 0.25, 0.25, 0.25)
    assert np.allclose(effective_channel(flat, base).w, 0.5, atol=1e-14)
    with pytest.raises(ValueError):
        effective_channel(point, avc_kernel(0.8))  # ternary input alphabet


def test_is_bsc_and_average_crossover_verdicts():
    assert is_bsc(bsc_table(0.17)).t == pytest.approx(0.17)
    assert is_bsc(w0_table()) is None
    assert average_crossover(bsc_table(0.17)) == pytest.approx(0.17)
    # equal per-state averages but opposite row biases: average exists, BSC fails
    w = np.array([
        [[0.9, 0.1], [0.3, 0.7]],
        [[0.7, 0.3], [0.1, 0.9]],
    ])
    tab = ChannelTable((0, 1), (0, 1), (0, 1), w)
    assert is_bsc(tab) is None
    assert average_crossover(tab) == pytest.approx(0.2, abs=1e-14)
    # state-dependent average: both verdicts fail
    w2 = np.array(w)
    w2[1] = [[0.5, 0.5], [0.5, 0.5]]
    tab2 = ChannelTable((0, 1), (0, 1), (0, 1), w2)
    assert is_bsc(tab2) is None and average_crossover(tab2) is None
    # non-binary alphabets are rejected outright
    assert is_bsc(avc_kernel(1.0)) is None


def test_kernel_is_symmetrizable_with_copying_witness():
    for alpha in (0.5, 1.0, 2.0):
        tab = avc_kernel(alpha)
        u = symmetrizability_lp(tab)
        assert u is not None
        assert symmetrization_residual(tab, u) <= 1e-8
        # copying the sender's letter into the state slot is itself a witness
        ident = np.eye(3)
        assert symmetrization_residual(tab, ident) <= 1e-12


def test_state_independent_bsc_family_is_not_symmetrizable():
    for t in (0.1, 0.25, 0.4):
        assert symmetrizability_lp(bsc_table(t)) is None
        assert symmetrizability_lp(bsc_table(t, n_states=3)) is None
    # at t = 1/2 the inputs are indistinguishable and any u works
    assert symmetrizability_lp(bsc_table(0.5)) is not None


def test_symmetrization_residual_flags_bad_witness():
    tab = avc_kernel(1.0)
    bad = np.array([[1.0, 0.0, 0.0]] * 3)  # always play state 0
    assert symmetrization_residual(tab, bad) > 0.01


def test_max_crossover_bounds_values_and_domain():
    delta, pt = 0.2959527466182408, 0.15865525393145707
    bpsk, ent = max_crossover_bounds(delta, pt)
    assert bpsk == pytest.approx(0.5 - delta / 4.0, abs=1e-15)
    assert ent == pytest.approx(delta * pt + (1.0 - delta) / 2.0, abs=1e-15)
    assert ent < 0.5 and bpsk < 0.5
    with pytest.raises(ValueError):
        max_crossover_bounds(1.5, pt)
    with pytest.raises(ValueError):
        max_crossover_bounds(delta, 0.6)


def test_mutual_information_uniform_known_channels():
    assert mutual_information_uniform(np.array([[1.0, 0.0], [0.0, 1.0]])) == pytest.approx(1.0)
    assert mutual_information_uniform(np.array([[0.5, 0.5], [0.5, 0.5]])) == pytest.approx(0.0, abs=1e-15)
    t = 0.23
    rows = np.array([[1 - t, t], [t, 1 - t]])
    assert mutual_information_uniform(rows) == pytest.approx(bsc_capacity(t), abs=1e-13)


def test_pinsker_bound_on_mixtures():
    tab = bsc_table(0.3)
    bound, exact = pinsker_bound(tab, (0.5, 0.5))
    assert bound == pytest.approx(0.5 * 0.4**2, abs=1e-14)
    assert exact == pytest.approx(bsc_capacity(0.3), abs=1e-13)
    assert exact >= bound
    rng = np.random.default_rng(44)
    kernel = avc_kernel(1.0).restrict(inputs=(0, 1))
    for _ in range(50):
        lam = rng.dirichlet(np.ones(3))
        bound, exact = pinsker_bound(kernel, lam)
        assert exact >= bound - 1e-12
    with pytest.raises(ValueError):
        pinsker_bound(tab, (0.7, 0.2))
    with pytest.raises(ValueError):
        pinsker_bound(avc_kernel(1.0), (1 / 3, 1 / 3, 1 / 3))


def test_bsc_param_validation():
    assert BscParam(0.5).t == 0.5
    with pytest.raises(ValueError):
        BscParam(-0.01)
    with pytest.raises(ValueError):
        BscParam(1.01)


def test_lp_error_type_is_distinct():
    assert issubclass(LpNumericalError, RuntimeError)
