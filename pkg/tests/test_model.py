"""Energy model, conditionals, and convention conversion."""

import numpy as np
import pytest

from conftest import pm1, small_random_model
from rbmcascade import rng as rngmod
from rbmcascade.enumeration import exact_enumeration
from rbmcascade.errors import ContractError
from rbmcascade.model import (HiddenKind, RbmModel, SpinConvention,
                              conditional_hidden, convert, energy,
                              hidden_mean, map_states, rank_one_model,
                              zero_model)


def test_energy_zero_couplings_is_zero():
    model = zero_model(4, 3)
    assert energy(model, [1, 0, 1, 0], [1, 1, 0]) == 0.0


def test_energy_direct_substitution():
    model = RbmModel(np.array([[1.0], [1.0]]), np.zeros(2), np.zeros(1))
    assert energy(model, [1, 1], [1]) == -2.0


def test_energy_gaussian_hidden_quadratic_term():
    # -(v.w) h + h^2 N_v / 2 with variance 1/N_v
    model = RbmModel(np.array([[1.0], [1.0]]), np.zeros(2), np.zeros(1),
                     SpinConvention.ISING_PM1, HiddenKind.GAUSSIAN, 0.5)
    assert energy(model, [1, 1], [0.5]) == pytest.approx(-0.75, abs=1e-15)


def test_energy_dimension_mismatch_rejected():
    model = zero_model(3, 2)
    with pytest.raises(ContractError):
        energy(model, [1, 0], [1, 1])


def test_nonfinite_weights_rejected():
    with pytest.raises(ContractError):
        RbmModel(np.array([[np.inf]]), np.zeros(1), np.zeros(1))


def test_conditional_hidden_symmetry_and_saturation():
    model = zero_model(3, 2)
    p = conditional_hidden(model, [0, 0, 0])
    assert np.allclose(p, 0.5)
    mg = zero_model(3, 2, hidden_kind=HiddenKind.GAUSSIAN)
    mean, var = conditional_hidden(mg, [0, 0, 0])
    assert np.allclose(mean, 0.0) and var == pytest.approx(1 / 3)
    strong = RbmModel(np.full((3, 2), 40.0), np.zeros(3), np.zeros(2))
    p = conditional_hidden(strong, [1, 1, 1])
    assert np.all(p > 1 - 1e-12)


def test_conditional_hidden_matches_empirical_frequencies(gen):
    # Monte-Carlo conditional frequencies vs the closed form, 4 sigma.
    model = small_random_model(gen, 3, 2)
    v = np.array([1.0, 0.0, 1.0])
    p = conditional_hidden(model, v)
    n = 1_000_000
    draws = gen.random((n, 2)) < p
    freq = draws.mean(axis=0)
    sigma = np.sqrt(p * (1 - p) / n)
    assert np.all(np.abs(freq - p) < 4 * sigma)


def test_conversion_preserves_distribution_both_ways(gen):
    for hidden_kind in (HiddenKind.BINARY, HiddenKind.GAUSSIAN):
        model = small_random_model(gen, 3, 2, hidden_kind=hidden_kind)
        other = convert(model, SpinConvention.ISING_PM1)
        r1 = exact_enumeration(model, want_joint=False)
        r2 = exact_enumeration(other, want_joint=False)
        # state k maps to state k: bit patterns line up across conventions
        assert np.max(np.abs(r1.visible_probs - r2.visible_probs)) < 1e-12
        back = convert(other, SpinConvention.BINARY01)
        assert np.allclose(back.weights, model.weights, atol=1e-12)
        assert np.allclose(back.visible_bias, model.visible_bias, atol=1e-12)
        assert np.allclose(back.hidden_bias, model.hidden_bias, atol=1e-12)


def test_conversion_joint_distribution_binary(gen):
    model = small_random_model(gen, 3, 2)
    other = convert(model, SpinConvention.ISING_PM1)
    j1 = exact_enumeration(model).joint_probs
    j2 = exact_enumeration(other).joint_probs
    assert np.max(np.abs(j1 - j2)) < 1e-12


def test_map_states_roundtrip(gen):
    v = (gen.random((5, 4)) < 0.5).astype(float)
    s = map_states(v, SpinConvention.BINARY01, SpinConvention.ISING_PM1)
    assert set(np.unique(s)) <= {-1.0, 1.0}
    back = map_states(s, SpinConvention.ISING_PM1, SpinConvention.BINARY01)
    assert np.array_equal(back, v)


def test_hidden_mean_conventions(gen):
    model = small_random_model(gen, 4, 3, convention=SpinConvention.ISING_PM1)
    v = pm1(gen, 4)
    hm = hidden_mean(model, v)
    assert np.all(np.abs(hm) < 1.0)   # tanh-valued


def test_theory_variance_guard():
    bad = zero_model(8, 1, hidden_kind=HiddenKind.GAUSSIAN, hidden_variance=0.5)
    with pytest.raises(ContractError):
        bad.require_theory_variance()
    good = zero_model(8, 1, hidden_kind=HiddenKind.GAUSSIAN)
    good.require_theory_variance()


def test_rank_one_model_is_symmetric_two_lump():
    gen = rngmod.make_generator(4, 4)
    u = pm1(gen, 12) / np.sqrt(12)
    ubar = np.ones(5) / np.sqrt(5)
    model = rank_one_model(5.0, u, ubar)
    svd_vals = np.linalg.svd(model.weights, compute_uv=False)
    assert svd_vals[0] == pytest.approx(5.0)
    assert svd_vals[1] == pytest.approx(0.0, abs=1e-12)
    # equivalent Ising model is bias-free
    ising = convert(model, SpinConvention.ISING_PM1)
    assert np.allclose(ising.visible_bias, 0.0, atol=1e-12)
    assert np.allclose(ising.hidden_bias, 0.0, atol=1e-12)
