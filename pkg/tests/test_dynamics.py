"""Pair table, forces, and the scalar diagnostics.

Frozen values are hand-derived from the definitions; the gradient test
certifies the force law against central finite differences of the
potential energy -U/(4 alpha).
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homolab import dynamics
from homolab.errors import CollisionError, UnsupportedDimensionError
from homolab.system import BodySystem, PhaseState, pair_count, pair_indices

from conftest import random_state_arrays


def make_state(positions, velocities=None):
    positions = np.asarray(positions, dtype=np.float64)
    if velocities is None:
        velocities = np.zeros_like(positions)
    return PhaseState(positions=positions, velocities=np.asarray(velocities, dtype=np.float64))


class TestPairTable:
    def test_pair_order_is_lexicographic(self):
        ii, kk = pair_indices(4)
        assert list(zip(ii.tolist(), kk.tolist())) == [
            (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
        ]

    def test_pair_count(self):
        assert pair_count(2) == 1
        assert pair_count(3) == 3
        assert pair_count(5) == 10

    def test_weights_are_twice_mass_products(self):
        system = BodySystem(masses=(2.0, 3.0, 5.0), alpha=1.0)
        assert system.pair_weights.tolist() == [12.0, 20.0, 30.0]

    def test_deltas_are_squared_distances(self):
        system = BodySystem(masses=(1.0, 1.0), alpha=0.5)
        table = dynamics.pairwise_deltas(system, make_state([[0.0, 0.0], [3.0, 4.0]]))
        assert table.deltas.tolist() == [25.0]

    def test_coincident_bodies_raise(self):
        with pytest.raises(CollisionError):
            make_state([[1.0, 2.0], [1.0, 2.0]])

    def test_min_distance_guard(self):
        system = BodySystem(masses=(1.0, 1.0), alpha=0.5)
        state = make_state([[0.0, 0.0], [1e-9, 0.0]])
        with pytest.raises(CollisionError):
            dynamics.pairwise_deltas(system, state, min_distance=1e-6)


class TestFrozenValues:
    """Hand-computed oracles for each scalar."""

    def test_two_body_acceleration(self):
        # d^2 = 4, f = 4^(-3/2) = 1/8, a_1 = m_2 (q_2 - q_1) f = (2, 0)/8
        system = BodySystem(masses=(1.0, 1.0), alpha=0.5)
        acc = dynamics.accelerations(system, make_state([[-1.0, 0.0], [1.0, 0.0]]))
        np.testing.assert_allclose(acc, [[0.25, 0.0], [-0.25, 0.0]], atol=1e-15)

    def test_moment_of_inertia(self):
        # I = sum_{i != j} m_i m_j d_ij^2 = 2 * (2*3) * 4 = 48
        system = BodySystem(masses=(2.0, 3.0), alpha=1.0)
        state = make_state([[0.0, 0.0], [2.0, 0.0]])
        assert dynamics.moment_of_inertia(system, state) == pytest.approx(48.0, rel=1e-15)

    def test_potential(self):
        # U = 2 * m1*m2 * (d^2)^(-1/2) = 2 * 0.5 = 1
        system = BodySystem(masses=(1.0, 1.0), alpha=0.5)
        state = make_state([[0.0, 0.0], [2.0, 0.0]])
        assert dynamics.potential(system, state) == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0, 2.0])
    def test_equilateral_measure(self, alpha):
        # equal unit masses, side s: I = 6 s^2, U = 6 s^(-2a), I^a U = 6^(a+1)
        system = BodySystem(masses=(1.0, 1.0, 1.0), alpha=alpha)
        s = 1.7
        h = s * math.sqrt(3.0) / 2.0
        state = make_state([[0.0, 0.0], [s, 0.0], [s / 2.0, h]])
        measure = dynamics.configurational_measure(system, state)
        assert measure == pytest.approx(6.0 ** (alpha + 1.0), rel=1e-13)

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0, 2.0])
    def test_two_body_measure(self, alpha):
        # single pair: I^a U = (M1 d^2)^a M1 d^(-2a) = M1^(a+1)
        system = BodySystem(masses=(1.0, 1.0), alpha=alpha)
        state = make_state([[0.0, 0.0], [0.37, 1.2]])
        assert dynamics.configurational_measure(system, state) == pytest.approx(
            2.0 ** (alpha + 1.0), rel=1e-13
        )

    def test_two_body_orbit_energy(self):
        # bodies at (+-1/2, 0), omega = sqrt(2): T = 1/2, U = 2, E = T - U/2 = -1/2
        system = BodySystem(masses=(1.0, 1.0), alpha=0.5)
        omega = math.sqrt(2.0)
        state = make_state(
            [[0.5, 0.0], [-0.5, 0.0]],
            [[0.0, 0.5 * omega], [0.0, -0.5 * omega]],
        )
        assert dynamics.energy(system, state) == pytest.approx(-0.5, rel=1e-15)


class TestOrderedSumEquivalence:
    @pytest.mark.parametrize("seed", range(5))
    def test_inertia_matches_ordered_double_sum(self, seed):
        pos, vel = random_state_arrays(5, 2, seed)
        system = BodySystem(masses=(1.0, 2.0, 0.5, 1.5, 3.0), alpha=0.5)
        state = make_state(pos, vel)
        masses = system.masses_array
        ordered = sum(
            masses[i] * masses[j] * float(((pos[j] - pos[i]) ** 2).sum())
            for i in range(5)
            for j in range(5)
            if i != j
        )
        assert dynamics.moment_of_inertia(system, state) == pytest.approx(ordered, rel=1e-14)

    @pytest.mark.parametrize("seed", range(5))
    def test_potential_matches_ordered_double_sum(self, seed):
        pos, vel = random_state_arrays(4, 2, seed + 10)
        system = BodySystem(masses=(1.0, 2.0, 0.5, 1.5), alpha=0.7)
        state = make_state(pos, vel)
        masses = system.masses_array
        ordered = sum(
            masses[i] * masses[j] * float(((pos[j] - pos[i]) ** 2).sum()) ** -0.7
            for i in range(4)
            for j in range(4)
            if i != j
        )
        assert dynamics.potential(system, state) == pytest.approx(ordered, rel=1e-14)


@st.composite
def random_systems(draw, max_n=5, dims=(2, 3)):
    n = draw(st.integers(min_value=2, max_value=max_n))
    dim = draw(st.sampled_from(dims))
    alpha = draw(st.sampled_from([0.3, 0.5, 1.0, 2.0]))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    masses = tuple(
        draw(st.floats(min_value=0.1, max_value=10.0, allow_nan=False))
        for _ in range(n)
    )
    system = BodySystem(masses=masses, alpha=alpha, dim=dim)
    pos, vel = random_state_arrays(n, dim, seed)
    return system, make_state(pos, vel)


class TestProperties:
    @given(random_systems())
    def test_forces_sum_to_zero(self, case):
        system, state = case
        acc = dynamics.accelerations(system, state)
        force = system.masses_array[:, None] * acc
        scale = np.abs(force).max()
        assert np.abs(force.sum(axis=0)).max() <= 1e-12 * scale

    @given(random_systems())
    def test_translation_invariance(self, case):
        system, state = case
        shift = np.full(system.dim, 0.73)
        moved = make_state(state.positions + shift, state.velocities)
        a0 = dynamics.accelerations(system, state)
        a1 = dynamics.accelerations(system, moved)
        assert np.abs(a1 - a0).max() <= 1e-12 * max(1.0, np.abs(a0).max())

    @given(random_systems(dims=(2,)))
    def test_rotation_equivariance(self, case):
        system, state = case
        theta = 0.9
        c, s = math.cos(theta), math.sin(theta)
        rot = np.array([[c, -s], [s, c]])
        rotated = make_state(state.positions @ rot.T, state.velocities @ rot.T)
        a_rot = dynamics.accelerations(system, rotated)
        a_expect = dynamics.accelerations(system, state) @ rot.T
        assert np.abs(a_rot - a_expect).max() <= 1e-12 * max(1.0, np.abs(a_expect).max())

    @given(random_systems(), st.sampled_from([0.5, 2.0, 10.0]))
    def test_homogeneity(self, case, lam):
        system, state = case
        scaled = make_state(lam * state.positions, state.velocities)
        inertia = dynamics.moment_of_inertia(system, state)
        potential = dynamics.potential(system, state)
        assert dynamics.moment_of_inertia(system, scaled) == pytest.approx(
            lam**2 * inertia, rel=1e-12
        )
        assert dynamics.potential(system, scaled) == pytest.approx(
            lam ** (-2.0 * system.alpha) * potential, rel=1e-12
        )

    @given(random_systems(), st.sampled_from([0.5, 2.0, 10.0]))
    def test_measure_scale_invariance(self, case, lam):
        system, state = case
        scaled = make_state(lam * state.positions, state.velocities)
        m0 = dynamics.configurational_measure(system, state)
        m1 = dynamics.configurational_measure(system, scaled)
        assert abs(m1 - m0) / m0 <= 1e-13

    @given(random_systems(max_n=4))
    @settings(max_examples=30)
    def test_accelerations_are_potential_gradient(self, case):
        """a_k = -grad_k(-U/(4 alpha)) / m_k, certified by central differences."""
        system, state = case
        acc = dynamics.accelerations(system, state)
        masses = system.masses_array
        h = 1e-6
        fd = np.zeros_like(acc)
        for k in range(system.n):
            for c in range(system.dim):
                plus = state.positions.copy()
                minus = state.positions.copy()
                plus[k, c] += h
                minus[k, c] -= h
                u_plus = dynamics.potential(system, make_state(plus))
                u_minus = dynamics.potential(system, make_state(minus))
                v_diff = -(u_plus - u_minus) / (4.0 * system.alpha)
                fd[k, c] = -(v_diff / (2.0 * h)) / masses[k]
        scale = np.abs(acc).max()
        assert np.abs(fd - acc).max() <= 1e-6 * scale


class TestStateDiagnostics:
    def test_linear_momentum_and_com(self):
        system = BodySystem(masses=(2.0, 1.0), alpha=0.5)
        state = make_state([[0.0, 0.0], [3.0, 0.0]], [[1.0, 0.0], [0.0, 2.0]])
        assert dynamics.linear_momentum(system, state).tolist() == [2.0, 2.0]
        assert dynamics.center_of_mass(system, state).tolist() == [1.0, 0.0]

    def test_angular_momentum_scalar_in_plane(self):
        # one unit mass on a circle of radius 2 about a pinned heavy partner
        system = BodySystem(masses=(1.0, 1.0), alpha=0.5)
        state = make_state([[2.0, 0.0], [-2.0, 0.0]], [[0.0, 1.0], [0.0, -1.0]])
        assert dynamics.angular_momentum(system, state) == pytest.approx(4.0, rel=1e-15)

    def test_angular_momentum_vector_in_3d(self):
        system = BodySystem(masses=(1.0, 1.0), alpha=0.5, dim=3)
        state = make_state(
            [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
            [[0.0, 1.0, 0.0], [0.0, -1.0, 0.0]],
        )
        L = dynamics.angular_momentum(system, state)
        assert L.tolist() == [0.0, 0.0, 2.0]

    def test_angular_momentum_rejects_other_dims(self):
        system = BodySystem(masses=(1.0, 1.0), alpha=0.5, dim=4)
        pos = np.zeros((2, 4))
        pos[1, 0] = 1.0
        state = make_state(pos)
        with pytest.raises(UnsupportedDimensionError):
            dynamics.angular_momentum(system, state)

    def test_energy_is_kinetic_minus_scaled_potential(self):
        system = BodySystem(masses=(1.0, 2.0), alpha=1.25)
        pos, vel = random_state_arrays(2, 2, 99)
        state = make_state(pos, vel)
        t = dynamics.kinetic_energy(system, state)
        u = dynamics.potential(system, state)
        assert dynamics.energy(system, state) == pytest.approx(t - u / 5.0, rel=1e-14)


class TestValidation:
    def test_nonpositive_mass_rejected(self):
        with pytest.raises(ValueError):
            BodySystem(masses=(1.0, 0.0), alpha=0.5)

    def test_nonpositive_alpha_rejected(self):
        with pytest.raises(ValueError):
            BodySystem(masses=(1.0, 1.0), alpha=0.0)

    def test_single_body_rejected(self):
        with pytest.raises(ValueError):
            BodySystem(masses=(1.0,), alpha=0.5)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            PhaseState(positions=np.zeros((2, 2)), velocities=np.zeros((3, 2)))

    def test_nonfinite_rejected(self):
        pos = np.array([[0.0, 0.0], [np.inf, 0.0]])
        with pytest.raises(ValueError):
            PhaseState(positions=pos, velocities=np.zeros((2, 2)))
