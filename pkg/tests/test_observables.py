"""Discrete observables, spin family, and incompatibility measure."""

from __future__ import annotations

import numpy as np
import pytest

from waylab.errors import BlochNormExceeded, DimensionMismatch, InvalidModel, UnknownOutcome
from waylab.numerics import hermitian_eigen, operator_norm
from waylab.observables import (
    DiscreteObservable,
    is_sharp,
    is_trivial,
    mutual_commutation_defect,
    nontriviality,
    spin_observable,
)

I2 = np.eye(2, dtype=complex)
Z_HAT = [0.0, 0.0, 1.0]
X_HAT = [1.0, 0.0, 0.0]


class TestSpinObservable:
    def test_z_direction_gives_basis_projections(self):
        obs = spin_observable(Z_HAT)
        assert np.allclose(obs.effect("+"), np.diag([1.0, 0.0]))
        assert np.allclose(obs.effect("-"), np.diag([0.0, 1.0]))
        assert is_sharp(obs)

    def test_zero_vector_gives_trivial_coin(self):
        obs = spin_observable([0.0, 0.0, 0.0])
        assert np.allclose(obs.effect("+"), 0.5 * I2)
        assert np.allclose(obs.effect("-"), 0.5 * I2)
        assert is_trivial(obs) and not is_sharp(obs)

    def test_x_direction_projects_onto_plus_minus(self):
        obs = spin_observable(X_HAT)
        # eigendecomposition oracle: effects are rank-1 with eigenvector (1, +/-1)/sqrt2
        for label, sign in (("+", 1.0), ("-", -1.0)):
            w, v = hermitian_eigen(obs.effect(label))
            assert np.allclose(w, [0.0, 1.0], atol=1e-12)
            vec = v[:, 1]
            expected = np.array([1.0, sign]) / np.sqrt(2.0)
            phase = vec[0] / expected[0]
            assert np.abs(vec - phase * expected).max() < 1e-12

    def test_norm_gate(self):
        with pytest.raises(BlochNormExceeded):
            spin_observable([1.0, 1.0, 0.0])
        spin_observable([0.6, 0.0, 0.8])  # boundary is fine

    def test_sharp_iff_unit_norm(self):
        assert is_sharp(spin_observable([0, 0, 1.0]))
        assert not is_sharp(spin_observable([0, 0, 0.5]))
        assert not is_sharp(spin_observable([0.3, 0.2, 0.1]))


class TestPredicates:
    def test_trivial_examples(self, rng):
        assert is_trivial(DiscreteObservable(2, ("+", "-"), (0.5 * I2, 0.5 * I2)))
        assert not is_trivial(spin_observable(Z_HAT))
        for _ in range(5):
            p = rng.uniform(0.0, 1.0)
            obs = DiscreteObservable(2, ("a", "b"), (p * I2, (1 - p) * I2))
            assert is_trivial(obs)
            assert nontriviality(obs) < 1e-12

    def test_sharp_rejects_unsharp_family(self):
        obs = DiscreteObservable(2, ("a", "b"), (0.5 * I2, 0.5 * I2))
        assert not is_sharp(obs)


class TestValidation:
    def test_effect_count_mismatch(self):
        with pytest.raises(InvalidModel):
            DiscreteObservable(2, ("+",), (0.5 * I2, 0.5 * I2))

    def test_normalisation_enforced(self):
        with pytest.raises(InvalidModel):
            DiscreteObservable(2, ("+", "-"), (0.6 * I2, 0.6 * I2))

    def test_positivity_enforced(self):
        with pytest.raises(InvalidModel):
            DiscreteObservable(2, ("+", "-"), (1.5 * I2, -0.5 * I2))

    def test_hermiticity_enforced(self):
        bad = np.array([[0.5, 0.3], [0.0, 0.5]], dtype=complex)
        with pytest.raises(InvalidModel):
            DiscreteObservable(2, ("+", "-"), (bad, I2 - bad))

    def test_duplicate_labels(self):
        with pytest.raises(InvalidModel):
            DiscreteObservable(2, ("+", "+"), (0.5 * I2, 0.5 * I2))

    def test_unknown_outcome(self):
        with pytest.raises(UnknownOutcome):
            spin_observable(Z_HAT).effect("sideways")

    def test_effects_read_only(self):
        obs = spin_observable(Z_HAT)
        with pytest.raises(ValueError):
            obs.effect("+")[0, 0] = 5.0


class TestMutualCommutationDefect:
    def test_self_is_zero(self):
        obs = spin_observable(Z_HAT)
        assert mutual_commutation_defect(obs, obs) == 0.0

    def test_perpendicular_spins(self):
        a = spin_observable(X_HAT)
        b = spin_observable(Z_HAT)
        defect = mutual_commutation_defect(a, b)
        assert abs(defect - 0.5) < 1e-13  # 2 * defect = |x cross z| = 1

    def test_cross_product_identity_random(self, rng):
        for _ in range(200):
            m = rng.standard_normal(3)
            m /= np.linalg.norm(m)
            n = rng.standard_normal(3)
            n /= np.linalg.norm(n)
            defect = mutual_commutation_defect(spin_observable(m), spin_observable(n))
            assert abs(2.0 * defect - np.linalg.norm(np.cross(m, n))) < 1e-12

    def test_symmetry(self, rng):
        m = rng.standard_normal(3)
        m /= 2.0 * np.linalg.norm(m)
        n = rng.standard_normal(3)
        n /= 1.5 * np.linalg.norm(n)
        a, b = spin_observable(m), spin_observable(n)
        assert mutual_commutation_defect(a, b) == mutual_commutation_defect(b, a)

    def test_dimension_mismatch(self):
        qutrit = DiscreteObservable(3, ("0",), (np.eye(3),))
        with pytest.raises(DimensionMismatch):
            mutual_commutation_defect(spin_observable(Z_HAT), qutrit)


def test_normalisation_invariant_random_povm(rng):
    # random two-outcome POVM: E, I - E with random 0 <= E <= I
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    h = a @ a.conj().T
    e = h / (np.trace(h).real + 1.0)
    obs = DiscreteObservable(2, ("+", "-"), (e, I2 - e))
    total = sum(obs.effects)
    assert operator_norm(total - I2) < 1e-12
