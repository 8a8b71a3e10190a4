"""Measure constancy, the pair-ratio identity, and the conjecture probes.

The claim under test couples two properties of a solution: constancy of
the configurational measure I^alpha U (the hypothesis) and constancy of
all pairwise distance ratios (homographic motion, the conclusion). The
forward direction is verified on constructed homographic orbits; the
converse is probed over random initial conditions, where a trajectory
with constant measure but drifting ratios would be a counterexample.

Verdicts compare against two thresholds separated by four orders of
magnitude from the forward-direction noise floor: a trajectory is flagged
VIOLATION only when measure_variation < 1e-6 (constant measure) while
homographic_deviation > 1e-2 (visibly non-homographic).
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import sqrt

import numpy as np

from . import dynamics
from .central import CentralConfiguration, known_seeds, solve_central_config
from .homographic import HomographicSpec, homographic_deviation, make_homographic
from .integrate import IntegratorSpec, Trajectory, integrate
from .system import BodySystem, PhaseState

logger = logging.getLogger(__name__)

CONST_THRESHOLD = 1e-6
HOMO_THRESHOLD = 1e-2
FORWARD_TOL = 1e-7


@dataclass(frozen=True)
class WTrace:
    """Per-sample squared-distance ratios w_j = Delta_j / Delta_1.

    Delta_1 is the lexicographically first pair (flat index 0). ``ratios``
    has shape (S, N-1), columns j = 2..N; for n = 2 it is empty. Every
    entry is strictly positive on collision-free samples.
    """

    times: np.ndarray
    ratios: np.ndarray


@dataclass(frozen=True)
class ConjectureReport:
    """Outcome of checking one trajectory against the claim.

    verdict is "VIOLATION" exactly when measure_variation < 1e-6 while
    homographic_dev > 1e-2, i.e. the measure stayed constant but the
    shape visibly changed; otherwise "consistent".
    """

    measure_variation: float
    homographic_dev: float
    identity_residual: float
    verdict: str
    t_end: float
    termination: str
    n_samples: int
    seed: int | None = None
    sample_index: int | None = None

    def to_dict(self) -> dict:
        return {
            "measure_variation": self.measure_variation,
            "homographic_dev": self.homographic_dev,
            "identity_residual": self.identity_residual,
            "verdict": self.verdict,
            "t_end": self.t_end,
            "termination": self.termination,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "sample_index": self.sample_index,
        }


def measure_variation(traj: Trajectory) -> float:
    """Relative span (max - min) / median of I^alpha U over the samples.

    The median denominator keeps near-collision spikes in the tail of a
    terminated trajectory from deflating the ratio.
    """
    m = traj.measure
    return float((m.max() - m.min()) / np.median(m))


def identity_check(system: BodySystem, state: PhaseState) -> float:
    """Relative residual between the two forms of the measure.

    Form A evaluates I^alpha U directly from the pair table. Form B
    factors the first pair out of both sums, leaving only the ratios
    w_j = Delta_j / Delta_1:

        B = (M_1 + sum_{j>=2} M_j w_j)^alpha (M_1 + sum_{j>=2} M_j w_j^(-alpha))

    The two agree identically in exact arithmetic; the return value
    |A - B| / A is floating-point noise, at most about 1e-12.
    """
    table = dynamics.pairwise_deltas(system, state)
    w = table.weights
    d = table.deltas
    alpha = system.alpha
    a = (w * d).sum() ** alpha * (w * d ** (-alpha)).sum()
    ratios = d[1:] / d[0]
    b = (w[0] + (w[1:] * ratios).sum()) ** alpha * (
        w[0] + (w[1:] * ratios ** (-alpha)).sum()
    )
    return float(abs(a - b) / a)


def _identity_residuals(traj: Trajectory) -> np.ndarray:
    """Vectorized identity residual at every sample."""
    d = traj.deltas()
    w = traj.system.pair_weights
    alpha = traj.system.alpha
    a = traj.measure
    ratios = d[:, 1:] / d[:, :1]
    b = (w[0] + (w[1:] * ratios).sum(axis=1)) ** alpha * (
        w[0] + (w[1:] * ratios ** (-alpha)).sum(axis=1)
    )
    return np.abs(a - b) / a


def w_traces(traj: Trajectory) -> WTrace:
    """Squared-distance ratios against pair 1 at every sample."""
    d = traj.deltas()
    ratios = d[:, 1:] / d[:, :1]
    if not (ratios > 0.0).all():
        raise AssertionError("w-trace positivity violated on a collision-free sample")
    ratios.setflags(write=False)
    return WTrace(times=traj.times, ratios=ratios)


def report_for(
    traj: Trajectory,
    seed: int | None = None,
    sample_index: int | None = None,
) -> ConjectureReport:
    """Classify one trajectory against the thresholds."""
    variation = measure_variation(traj)
    deviation = homographic_deviation(traj)
    residual = float(_identity_residuals(traj).max())
    verdict = (
        "VIOLATION"
        if variation < CONST_THRESHOLD and deviation > HOMO_THRESHOLD
        else "consistent"
    )
    return ConjectureReport(
        measure_variation=variation,
        homographic_dev=deviation,
        identity_residual=residual,
        verdict=verdict,
        t_end=float(traj.times[-1]),
        termination=traj.termination,
        n_samples=len(traj),
        seed=seed,
        sample_index=sample_index,
    )


def verify_forward(
    cc: CentralConfiguration,
    specs: list[HomographicSpec],
    t_end: float,
    integrator_spec: IntegratorSpec | None = None,
) -> list[ConjectureReport]:
    """Integrate each constructed orbit and report measure constancy.

    Every report from a certified construction is expected to stay below
    the forward-direction noise floor; anything above 1e-7 is logged as a
    warning but still reported.
    """
    reports = []
    for spec in specs:
        state = make_homographic(spec)
        traj = integrate(cc.system, state, t_end, integrator_spec)
        report = report_for(traj)
        if report.measure_variation > FORWARD_TOL:
            logger.warning(
                "constructed orbit exceeded the forward noise floor: "
                "measure_variation=%.3e termination=%s",
                report.measure_variation,
                report.termination,
            )
        reports.append(report)
    return reports


def forward_catalog(alpha: float) -> list[tuple[str, CentralConfiguration, HomographicSpec]]:
    """Built-in (name, cc, spec) cases covering the orbit families.

    Equilateral circular and elliptic-like (theta_dot0 = 0.8 sqrt(lambda)),
    collinear homothetic collapse (rdot0 = -0.5 sqrt(lambda)), and the
    square relative equilibrium, all with equal unit masses.
    """
    tri = solve_central_config(
        BodySystem(masses=(1.0, 1.0, 1.0), alpha=alpha), known_seeds("equilateral", 3)
    )
    line = solve_central_config(
        BodySystem(masses=(1.0, 1.0, 1.0), alpha=alpha), known_seeds("collinear", 3)
    )
    square = solve_central_config(
        BodySystem(masses=(1.0, 1.0, 1.0, 1.0), alpha=alpha), known_seeds("ngon", 4)
    )
    return [
        ("equilateral-circular", tri, HomographicSpec(tri, theta_dot0=sqrt(tri.lam))),
        (
            "equilateral-elliptic",
            tri,
            HomographicSpec(tri, theta_dot0=0.8 * sqrt(tri.lam)),
        ),
        ("collinear-homothetic", line, HomographicSpec(line, rdot0=-0.5 * sqrt(line.lam))),
        ("ngon4-circular", square, HomographicSpec(square, theta_dot0=sqrt(square.lam))),
    ]


def sample_state(system: BodySystem, seed: int, index: int) -> PhaseState:
    """Draw the index-th probe state for a seed, independent of order.

    The stream is keyed by (seed, index) through a counter-based
    generator, so sample k is the same whether drawn alone, in sequence,
    or on a worker process. Positions are uniform in [-1, 1]^dim, redrawn
    until all pairwise distances reach 0.1; velocities are uniform in
    [-0.5, 0.5]^dim. The center of mass and total momentum are removed.
    """
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))
    n, dim = system.n, system.dim
    while True:
        pos = rng.uniform(-1.0, 1.0, size=(n, dim))
        min_d2 = min(
            float(((pos[k] - pos[i]) ** 2).sum())
            for i in range(n - 1)
            for k in range(i + 1, n)
        )
        if min_d2 >= 0.01:
            break
    vel = rng.uniform(-0.5, 0.5, size=(n, dim))
    masses = system.masses_array
    pos = pos - (masses[:, None] * pos).sum(axis=0) / system.total_mass
    vel = vel - (masses[:, None] * vel).sum(axis=0) / system.total_mass
    return PhaseState(positions=pos, velocities=vel)


def _probe_one(args: tuple) -> ConjectureReport:
    system, seed, index, t_end, spec = args
    state = sample_state(system, seed, index)
    traj = integrate(system, state, t_end, spec)
    return report_for(traj, seed=seed, sample_index=index)


def probe_converse(
    system: BodySystem,
    n_samples: int,
    seed: int,
    t_end: float,
    integrator_spec: IntegratorSpec | None = None,
    jobs: int = 1,
) -> tuple[list[ConjectureReport], dict]:
    """Integrate seeded random states and classify each one.

    Returns the per-sample reports (ordered by sample index regardless of
    scheduling) and a summary with the four threshold-quadrant counts.
    The quadrant (constant measure, non-homographic) is the claim's
    counterexample region; its count doubles as the VIOLATION total.
    Trajectories that end in a collision or a step failure are still
    classified from their recorded samples, never fatal.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    work = [(system, seed, i, t_end, integrator_spec) for i in range(n_samples)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_probe_one, work, chunksize=8))
    else:
        reports = [_probe_one(w) for w in work]

    quadrants = {
        "constant_homographic": 0,
        "constant_nonhomographic": 0,
        "varying_homographic": 0,
        "varying_nonhomographic": 0,
    }
    terminations: dict[str, int] = {}
    for rep in reports:
        constant = rep.measure_variation < CONST_THRESHOLD
        homo = rep.homographic_dev <= HOMO_THRESHOLD
        key = ("constant" if constant else "varying") + "_" + (
            "homographic" if homo else "nonhomographic"
        )
        quadrants[key] += 1
        terminations[rep.termination] = terminations.get(rep.termination, 0) + 1
    violations = quadrants["constant_nonhomographic"]
    if violations:
        logger.error("probe found %d candidate counterexamples", violations)
    summary = {
        "n_samples": n_samples,
        "seed": seed,
        "t_end": t_end,
        "const_threshold": CONST_THRESHOLD,
        "homo_threshold": HOMO_THRESHOLD,
        "quadrants": quadrants,
        "terminations": dict(sorted(terminations.items())),
        "violations": violations,
    }
    return reports, summary
