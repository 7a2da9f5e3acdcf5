"""
Tests for power profiles, growth diagnosis, similarity and generators.
"""

import numpy as np
import pytest

from spectral.complexmat import identity, inverse, norm_fro
from spectral.decompose import power_bound_from_projections, spectral_decomposition
from spectral.errors import GenerationError, NotDecomposableError, NotInvertibleError
from spectral.powerbound import (
    BOUNDED,
    EXPONENTIAL,
    POLYNOMIAL,
    diagnose,
    gen_defective,
    gen_power_bounded,
    power_profile,
    spawn_seeds,
    sznagy_similarity,
)
from spectral.spectrum import eigenvalues
from tests.helpers import multiset_distance


def test_profile_layout(involution):
    """Profile runs from -N to N with ‖T^0‖ = 1."""
    profile = power_profile(involution, horizon=16)
    assert list(profile.exponents) == list(range(-16, 17))
    assert profile.norm_at(0) == 1.0
    assert profile.norm_at(2) == pytest.approx(1.0)
    assert profile.norm_at(99) is None
    assert not profile.escaped


def test_identity_is_bounded():
    """Identity powers stay at 1."""
    verdict = diagnose(power_profile(identity(3), horizon=64))
    assert verdict.bounded
    assert verdict.growth_class == BOUNDED


def test_involution_is_bounded(involution):
    """Involution is bounded below the projection-norm bound."""
    profile = power_profile(involution)
    verdict = diagnose(profile)
    assert verdict.bounded
    bound = power_bound_from_projections(spectral_decomposition(involution))
    assert profile.sup_observed <= bound + 1e-9


def test_jordan_grows_linearly(jordan):
    """Jordan block powers grow like n."""
    verdict = diagnose(power_profile(jordan, horizon=1024))
    assert not verdict.bounded
    assert verdict.growth_class == POLYNOMIAL
    assert verdict.degree == pytest.approx(1.0, abs=0.1)


def test_jordan_block_of_three_grows_quadratically():
    """A 3x3 Jordan block grows like n^2."""
    verdict = diagnose(power_profile(gen_defective(3, 1), horizon=1024))
    assert verdict.growth_class == POLYNOMIAL
    assert verdict.degree == pytest.approx(2.0, abs=0.1)


def test_exponential_growth_rate():
    """diag(2, 1/2) grows at rate log 2."""
    T = np.diag([2.0, 0.5]).astype(complex)
    verdict = diagnose(power_profile(T, horizon=128))
    assert verdict.growth_class == EXPONENTIAL
    assert verdict.rate == pytest.approx(np.log(2), rel=1e-6)


def test_escape_stops_profile():
    """Norms past the escape guard truncate the profile."""
    profile = power_profile(np.diag([4.0, 0.25]).astype(complex), horizon=256)
    assert profile.escaped
    assert profile.exponents.max() < 256
    assert diagnose(profile).growth_class == EXPONENTIAL


def test_diagnose_needs_a_long_profile(jordan):
    """Short profiles are refused."""
    with pytest.raises(ValueError):
        diagnose(power_profile(jordan, horizon=8))


def test_singular_operator_has_no_negative_powers():
    """A singular operator has no two-sided profile."""
    with pytest.raises(NotInvertibleError):
        power_profile(np.diag([1, 0]).astype(complex))


def test_generator_is_deterministic():
    """Same seed, same operator."""
    a, truth_a = gen_power_bounded(4, [1, -1], [3, 1], seed=42)
    b, _ = gen_power_bounded(4, [1, -1], [3, 1], seed=42)
    c, _ = gen_power_bounded(4, [1, -1], [3, 1], seed=43)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert truth_a.cond <= 100.0
    assert truth_a.multiplicities == [3, 1]


def test_generator_ground_truth_reconstructs_operator():
    """Planted V, D and projections rebuild T."""
    values = [np.exp(1j), np.exp(2j), np.exp(3j)]
    T, truth = gen_power_bounded(5, values, [1, 2, 2], cond_cap=80.0, seed=9)
    expansion = sum(v * P for v, P in zip(truth.values, truth.projections))
    assert norm_fro(T - expansion) <= 1e-10 * norm_fro(T)
    assert multiset_distance(eigenvalues(T), truth.diagonal) <= 1e-8 * truth.cond


def test_generator_scalar_spectrum_is_exact():
    """A single planted value gives λI exactly."""
    value = np.exp(0.7j)
    T, truth = gen_power_bounded(3, [value], [3], seed=1)
    assert np.array_equal(T, truth.values[0] * identity(3))


def test_generator_with_given_similarity(involution):
    """A supplied V reproduces the involution."""
    T, truth = gen_power_bounded(2, [1, -1], V=np.array([[1, 1], [2, 3]]))
    assert np.allclose(T, involution, atol=1e-12)
    assert truth.seed == 0


def test_generator_input_errors():
    """Bad multiplicities, values and cond caps are rejected."""
    with pytest.raises(ValueError):
        gen_power_bounded(3, [1, -1], [1, 1])
    with pytest.raises(ValueError):
        gen_power_bounded(2, [1, 0], [1, 1])
    with pytest.raises(GenerationError):
        gen_power_bounded(3, [1, -1], [2, 1], cond_cap=1.0, seed=0)


def test_generated_operator_is_bounded():
    """Generated operators diagnose bounded within κ(V)."""
    T, truth = gen_power_bounded(4, [1, -1, 1j], [2, 1, 1], cond_cap=50.0, seed=7)
    profile = power_profile(T)
    assert diagnose(profile).bounded
    bound = power_bound_from_projections(spectral_decomposition(T))
    assert profile.sup_observed <= bound * (1 + 1e-8)


def test_defective_generator():
    """Unseeded block is the Jordan block; seeded blocks are conjugated."""
    J = gen_defective(3, 1j)
    assert np.array_equal(J, [[1j, 1, 0], [0, 1j, 1], [0, 0, 1j]])
    T = gen_defective(3, 1j, seed=4, cond_cap=50.0)
    assert abs(np.trace(T) - 3j) < 1e-10
    assert not diagnose(power_profile(T, horizon=1024)).bounded
    with pytest.raises(ValueError):
        gen_defective(1, 1)


def test_similarity_diagonalizes_involution(involution):
    """V has the eigenlines of the involution and D = diag(1, -1)."""
    pair = sznagy_similarity(involution)
    assert pair.residual < 1e-9
    assert sorted(np.diag(pair.D).real) == [-1.0, 1.0]
    assert pair.dims == (1, 1)
    assert pair.cond_estimate >= 1.0


def test_similarity_rejects_jordan(jordan):
    """No diagonalizing similarity for a Jordan block."""
    with pytest.raises(NotDecomposableError):
        sznagy_similarity(jordan)


def test_spawn_seeds():
    """Child seeds are reproducible, distinct and 64-bit."""
    seeds = spawn_seeds(2024, 5)
    assert seeds == spawn_seeds(2024, 5)
    assert len(set(seeds)) == 5
    assert all(0 <= s < 2 ** 64 for s in seeds)


def test_defective_block_of_four_grows_cubically():
    """A Jordan block of size 4 at i grows like n^3."""
    verdict = diagnose(power_profile(gen_defective(4, 1j), horizon=1024))
    assert not verdict.bounded
    assert verdict.growth_class == POLYNOMIAL
    assert verdict.degree == pytest.approx(3.0, abs=0.3)


def test_defective_at_minus_one_grows_linearly():
    """[[-1, 1], [0, -1]] has entries ±n in its powers."""
    T = gen_defective(2, -1)
    assert np.array_equal(T, [[-1, 1], [0, -1]])
    verdict = diagnose(power_profile(T, horizon=1024))
    assert verdict.growth_class == POLYNOMIAL
    assert verdict.degree == pytest.approx(1.0, abs=0.1)


def test_similarity_round_trip_on_generated_operator():
    """V·D·V⁻¹ rebuilds a generated operator."""
    T, truth = gen_power_bounded(8, [1, 1j, -1, -1j], [2, 2, 2, 2], cond_cap=50.0, seed=5)
    pair = sznagy_similarity(T)
    rebuilt = pair.V @ pair.D @ inverse(pair.V)
    assert norm_fro(rebuilt - T) <= 1e-9 * truth.cond * norm_fro(T)
    assert pair.residual <= 1e-7 * truth.cond
    assert np.allclose(np.abs(np.diag(pair.D)), 1.0)
