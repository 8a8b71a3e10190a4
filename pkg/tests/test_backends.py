"""Parity between the compiled stepper and the NumPy fallback.

Both cores implement the same tableau and controller; on stable orbits
they must agree to rounding, take the same steps, and flag the same
terminations. Chaotic orbits amplify single-ulp differences exponentially,
so cross-core comparisons stick to relative equilibria.
"""

import subprocess
import sys

import numpy as np
import pytest

from homolab import _backend, _core_py
from homolab.central import known_seeds, solve_central_config
from homolab.harness import sample_state
from homolab.homographic import make_relative_equilibrium
from homolab.integrate import integrate
from homolab.system import BodySystem, PhaseState

_core_cy = pytest.importorskip(
    "homolab._core_cy", reason="compiled core not built in this environment"
)


@pytest.fixture(scope="module")
def stable_orbit():
    system = BodySystem(masses=(1.0, 1.0, 1.0), alpha=0.5)
    cc = solve_central_config(system, known_seeds("equilateral", 3))
    return system, make_relative_equilibrium(cc)


class TestRhsParity:
    @pytest.mark.parametrize("n,dim,alpha", [(2, 2, 0.5), (3, 2, 1.0), (4, 3, 0.3), (5, 2, 2.0)])
    def test_equal_to_rounding(self, n, dim, alpha):
        system = BodySystem(masses=tuple(1.0 + 0.1 * k for k in range(n)), alpha=alpha, dim=dim)
        for index in range(5):
            state = sample_state(system, 21, index)
            y = state.flat()
            f_py = _core_py.rhs(system.masses_array, alpha, y, n, dim)
            f_cy = np.asarray(_core_cy.rhs(system.masses_array, alpha, y, n, dim))
            scale = np.abs(f_py).max()
            assert np.abs(f_cy - f_py).max() <= 1e-13 * scale

    def test_velocity_block_is_exact(self):
        # the position derivative is a copy of the velocities: no arithmetic
        system = BodySystem(masses=(1.0, 2.0), alpha=0.5)
        state = sample_state(system, 4, 0)
        y = state.flat()
        f_py = _core_py.rhs(system.masses_array, 0.5, y, 2, 2)
        f_cy = np.asarray(_core_cy.rhs(system.masses_array, 0.5, y, 2, 2))
        nd = 4
        assert np.array_equal(f_py[:nd], y[nd:])
        assert np.array_equal(f_cy[:nd], y[nd:])


def _integrate_with(core_name, system, state, t_end, monkeypatch):
    """Run integrate() against a specific core."""
    module = _core_cy if core_name == "cython" else _core_py
    integmod = sys.modules["homolab.integrate"]
    monkeypatch.setattr(integmod, "core", module)
    try:
        return integrate(system, state, t_end)
    finally:
        monkeypatch.undo()


class TestIntegrationParity:
    def test_stable_orbit_agreement(self, stable_orbit, monkeypatch):
        system, state = stable_orbit
        t_py = _integrate_with("python", system, state, 5.0, monkeypatch)
        t_cy = _integrate_with("cython", system, state, 5.0, monkeypatch)
        assert t_py.stats.backend == "python"
        assert t_cy.stats.backend == "cython"
        assert np.array_equal(t_py.times, t_cy.times)
        assert np.abs(t_py.positions - t_cy.positions).max() <= 1e-9
        assert np.abs(t_py.velocities - t_cy.velocities).max() <= 1e-9
        assert t_py.termination == t_cy.termination == "completed"

    def test_identical_step_counts_on_stable_orbit(self, stable_orbit, monkeypatch):
        # same controller, same tableau: on a smooth orbit the step
        # sequences match exactly even though states differ by ulps
        system, state = stable_orbit
        t_py = _integrate_with("python", system, state, 5.0, monkeypatch)
        t_cy = _integrate_with("cython", system, state, 5.0, monkeypatch)
        assert t_py.stats.steps == t_cy.stats.steps
        assert t_py.stats.nfev == t_cy.stats.nfev

    def test_collision_flag_agreement(self, monkeypatch):
        system = BodySystem(masses=(1.0, 1.0), alpha=0.5)
        state = PhaseState(np.array([[0.5, 0.0], [-0.5, 0.0]]), np.zeros((2, 2)))
        t_py = _integrate_with("python", system, state, 10.0, monkeypatch)
        t_cy = _integrate_with("cython", system, state, 10.0, monkeypatch)
        assert t_py.termination == t_cy.termination == "collision"
        assert abs(t_py.times[-1] - t_cy.times[-1]) <= 0.01  # same sample grid cell

    def test_per_backend_determinism(self, stable_orbit, monkeypatch):
        system, state = stable_orbit
        for name in ("python", "cython"):
            a = _integrate_with(name, system, state, 2.0, monkeypatch)
            b = _integrate_with(name, system, state, 2.0, monkeypatch)
            assert np.array_equal(a.positions, b.positions), name
            assert a.stats == b.stats, name


class TestBackendSelection:
    def test_available_lists_both(self):
        names = _backend.available()
        assert "python" in names
        assert "cython" in names
        assert names[0] == "cython"  # preferred when built

    def test_default_prefers_compiled(self):
        assert _backend.BACKEND == "cython"

    @pytest.mark.parametrize("choice", ["python", "cython"])
    def test_env_override(self, choice):
        code = (
            "import homolab\n"
            f"assert homolab.BACKEND == '{choice}', homolab.BACKEND\n"
        )
        result = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True,
            text=True,
            env={"PATH": "/usr/bin:/bin", "HOMOLAB_BACKEND": choice},
        )
        assert result.returncode == 0, result.stderr

    def test_garbage_env_value_rejected(self):
        result = subprocess.run(
            [sys.executable, "-c", "import homolab"],
            capture_output=True,
            text=True,
            env={"PATH": "/usr/bin:/bin", "HOMOLAB_BACKEND": "fortran"},
        )
        assert result.returncode != 0
        assert "HOMOLAB_BACKEND" in result.stderr

    def test_status_constants_match(self):
        assert _core_py.STATUS_COMPLETED == _core_cy.STATUS_COMPLETED
        assert _core_py.STATUS_COLLISION == _core_cy.STATUS_COLLISION
        assert _core_py.STATUS_STEP_FAILURE == _core_cy.STATUS_STEP_FAILURE
