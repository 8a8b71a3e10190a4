"""Command-line interface.

Subcommands map one-to-one onto the library operations: simulate writes a
trajectory CSV, central-config certifies a configuration to JSON,
make-orbit turns a certificate into an initial-condition config, verify
reports on one trajectory, scan probes random states, identity-check
evaluates the two-form measure identity.

Exit codes: 0 success and no VIOLATION verdict, 1 usage or config error,
2 at least one VIOLATION verdict, 3 numerical failure. Errors are printed
to stderr as a single JSON line. HOMOLAB_LOG={error|info|debug} sets
diagnostic verbosity on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

from . import harness
from .central import CentralConfiguration, known_seeds, solve_central_config
from .config import dump_config, load_config
from .errors import ConfigError, HomolabError
from .homographic import HomographicSpec, make_homographic
from .integrate import IntegratorSpec, Trajectory, integrate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2
EXIT_NUMERICAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="homolab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a config and write a trajectory CSV")
    p.add_argument("config")
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("central-config", help="solve and certify a central configuration")
    p.add_argument("config", help="config supplying masses, alpha, dim")
    p.add_argument(
        "--seed-kind",
        required=True,
        choices=["equilateral", "collinear", "ngon"],
    )
    p.add_argument("--out", help="JSON path (default: stdout)")

    p = sub.add_parser("make-orbit", help="emit an initial-condition config from a certificate")
    p.add_argument("cc", help="certificate JSON from central-config")
    p.add_argument("--mode", required=True, choices=["circular", "elliptic", "homothetic"])
    p.add_argument(
        "--theta-dot-scale",
        type=float,
        default=0.8,
        help="elliptic: initial angular rate as a multiple of sqrt(lambda) (default 0.8)",
    )
    p.add_argument(
        "--r-dot",
        type=float,
        default=None,
        help="initial radial rate (default 0; homothetic: -0.5*sqrt(lambda))",
    )
    p.add_argument("--out", help="YAML path (default: stdout)")

    p = sub.add_parser("verify", help="integrate one orbit and print its report")
    p.add_argument("source", help="config YAML, or certificate JSON (run as circular orbit)")
    p.add_argument("--t-end", type=float, required=True)

    p = sub.add_parser("scan", help="probe random initial conditions for counterexamples")
    p.add_argument("config", help="config supplying masses, alpha, dim")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="JSON-lines path (default: stdout)")

    p = sub.add_parser("identity-check", help="evaluate the two-form measure identity")
    p.add_argument("config")
    p.add_argument("--random", type=int, default=None, metavar="N")
    p.add_argument("--seed", type=int, default=0)

    return parser


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _trajectory_csv(traj: Trajectory) -> str:
    n, dim = traj.system.n, traj.system.dim
    comps = "xyz" if dim <= 3 else None
    cols = ["t"]
    for k in range(1, n + 1):
        for prefix in ("q", "v"):
            for c in range(dim):
                suffix = comps[c] if comps else f"c{c}"
                cols.append(f"{prefix}{k}{suffix}")
    cols += ["I", "U", "measure", "E", "Pnorm", "L"]
    lines = [",".join(cols)]
    for i in range(len(traj)):
        row = [repr(float(traj.times[i]))]
        for k in range(n):
            row += [repr(float(x)) for x in traj.positions[i, k]]
            row += [repr(float(x)) for x in traj.velocities[i, k]]
        row += [
            repr(float(traj.inertia[i])),
            repr(float(traj.potential[i])),
            repr(float(traj.measure[i])),
            repr(float(traj.energy[i])),
            repr(float(traj.momentum_norm[i])),
            repr(float(traj.angular_momentum[i])),
        ]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _load_certificate(path: str) -> CentralConfiguration:
    with open(path, "r") as fh:
        data = json.load(fh)
    return CentralConfiguration.from_dict(data)


def _spec_from_mode(cc: CentralConfiguration, mode: str, theta_dot_scale: float,
                    r_dot: float | None) -> HomographicSpec:
    root = math.sqrt(cc.lam)
    if mode == "circular":
        return HomographicSpec(cc, theta_dot0=root)
    if mode == "elliptic":
        return HomographicSpec(
            cc,
            rdot0=0.0 if r_dot is None else r_dot,
            theta_dot0=theta_dot_scale * root,
        )
    return HomographicSpec(cc, rdot0=-0.5 * root if r_dot is None else r_dot)


def _cmd_simulate(args) -> int:
    system, state, spec = load_config(args.config)
    traj = integrate(system, state, args.t_end, spec)
    logger.info(
        "simulate finished: termination=%s samples=%d steps=%d",
        traj.termination, len(traj), traj.stats.steps,
    )
    _write(args.out, _trajectory_csv(traj))
    return EXIT_OK


def _cmd_central_config(args) -> int:
    system, _state, _spec = load_config(args.config)
    seeds = known_seeds(args.seed_kind, system.n)
    cc = solve_central_config(system, seeds)
    logger.info(
        "certified %s: lambda=%.12g residual=%.3e",
        args.seed_kind, cc.lam, cc.residual_norm,
    )
    _write(args.out, json.dumps(cc.to_dict()) + "\n")
    return EXIT_OK


def _cmd_make_orbit(args) -> int:
    cc = _load_certificate(args.cc)
    spec = _spec_from_mode(cc, args.mode, args.theta_dot_scale, args.r_dot)
    state = make_homographic(spec)
    _write(args.out, dump_config(cc.system, state))
    return EXIT_OK


def _cmd_verify(args) -> int:
    with open(args.source, "r") as fh:
        head = fh.read()
    is_certificate = False
    try:
        data = json.loads(head)
        is_certificate = isinstance(data, dict) and "lambda" in data
    except json.JSONDecodeError:
        pass

    if is_certificate:
        cc = CentralConfiguration.from_dict(data)
        spec = HomographicSpec(cc, theta_dot0=math.sqrt(cc.lam))
        system = cc.system
        state = make_homographic(spec)
        integrator = IntegratorSpec()
    else:
        system, state, integrator = load_config(args.source)
    traj = integrate(system, state, args.t_end, integrator)
    report = harness.report_for(traj)
    sys.stdout.write(json.dumps(report.to_dict()) + "\n")
    return EXIT_VIOLATION if report.verdict == "VIOLATION" else EXIT_OK


def _cmd_scan(args) -> int:
    system, _state, integrator = load_config(args.config)
    reports, summary = harness.probe_converse(
        system,
        n_samples=args.samples,
        seed=args.seed,
        t_end=args.t_end,
        integrator_spec=integrator,
        jobs=args.jobs,
    )
    lines = [json.dumps(r.to_dict()) for r in reports]
    lines.append(json.dumps({"summary": summary}))
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_VIOLATION if summary["violations"] else EXIT_OK


def _cmd_identity_check(args) -> int:
    system, state, _spec = load_config(args.config)
    if args.random is None:
        states = [state]
    else:
        if args.random < 1:
            raise _UsageError(f"--random must be >= 1, got {args.random}")
        states = [harness.sample_state(system, args.seed, i) for i in range(args.random)]
    residuals = [harness.identity_check(system, s) for s in states]
    out = {
        "max_residual": max(residuals),
        "n_states": len(states),
        "seed": args.seed if args.random is not None else None,
    }
    sys.stdout.write(json.dumps(out) + "\n")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "central-config": _cmd_central_config,
    "make-orbit": _cmd_make_orbit,
    "verify": _cmd_verify,
    "scan": _cmd_scan,
    "identity-check": _cmd_identity_check,
}


def _configure_logging() -> None:
    level_name = os.environ.get("HOMOLAB_LOG", "error").strip().lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(
        stream=sys.stderr,
        level=levels.get(level_name, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _error_json(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        _error_json("usage", str(exc))
        return EXIT_USAGE
    except ConfigError as exc:
        _error_json("config", str(exc))
        return EXIT_USAGE
    except FileNotFoundError as exc:
        _error_json("config", f"{exc.filename}: file not found")
        return EXIT_USAGE
    except (json.JSONDecodeError, KeyError) as exc:
        _error_json("config", f"malformed certificate: {exc}")
        return EXIT_USAGE
    except HomolabError as exc:
        _error_json(type(exc).__name__, str(exc))
        return EXIT_NUMERICAL
    except ValueError as exc:
        _error_json("usage", str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
