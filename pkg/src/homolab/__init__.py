"""n-body dynamics under power-law forces, with a test harness for the
claim that constant configurational measure I^alpha U characterizes
homographic motion.

The stepper runs on a compiled core when the extension is built and on a
NumPy core otherwise; see homolab._backend.
"""

from ._backend import BACKEND, available
from .central import CentralConfiguration, cc_residual, known_seeds, solve_central_config
from .dynamics import (
    accelerations,
    center_of_mass,
    configurational_measure,
    energy,
    kinetic_energy,
    linear_momentum,
    angular_momentum,
    moment_of_inertia,
    pairwise_deltas,
    potential,
)
from .errors import (
    CollisionError,
    ConfigError,
    ConvergenceError,
    HomolabError,
    UnsupportedDimensionError,
)
from .harness import (
    ConjectureReport,
    WTrace,
    identity_check,
    measure_variation,
    probe_converse,
    verify_forward,
    w_traces,
)
from .homographic import (
    HomographicSpec,
    homographic_deviation,
    is_relative_equilibrium,
    make_homographic,
    make_relative_equilibrium,
)
from .integrate import IntegrationStats, IntegratorSpec, Trajectory, integrate
from .system import BodySystem, PairTable, PhaseState

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BodySystem",
    "CentralConfiguration",
    "CollisionError",
    "ConfigError",
    "ConjectureReport",
    "ConvergenceError",
    "HomographicSpec",
    "HomolabError",
    "IntegrationStats",
    "IntegratorSpec",
    "PairTable",
    "PhaseState",
    "Trajectory",
    "UnsupportedDimensionError",
    "WTrace",
    "accelerations",
    "angular_momentum",
    "available",
    "cc_residual",
    "center_of_mass",
    "configurational_measure",
    "energy",
    "homographic_deviation",
    "identity_check",
    "is_relative_equilibrium",
    "kinetic_energy",
    "known_seeds",
    "linear_momentum",
    "make_homographic",
    "make_relative_equilibrium",
    "measure_variation",
    "moment_of_inertia",
    "pairwise_deltas",
    "potential",
    "probe_converse",
    "solve_central_config",
    "verify_forward",
    "w_traces",
]
