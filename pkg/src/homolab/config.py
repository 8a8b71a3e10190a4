"""YAML system configuration files.

A config holds the physical system (alpha, masses), the initial state
(positions, optional velocities), and optional integrator overrides. The
published schema lives in homolab/schemas/system_config.schema.json;
violations are reported with the line of the offending YAML node.

Floats survive a dump/load round trip exactly: they are written with
repr (shortest form that parses back to the same double) and the loader
fixes the stock YAML resolver so exponent-only literals like 1e-12 parse
as numbers rather than strings.
"""

from __future__ import annotations

import json
import re
from importlib import resources

import jsonschema
import numpy as np
import yaml

from .errors import CollisionError, ConfigError
from .integrate import IntegratorSpec
from .system import BodySystem, PhaseState


class _ConfigLoader(yaml.SafeLoader):
    pass


_ConfigLoader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |[-+]?\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


def _schema() -> dict:
    text = resources.files("homolab").joinpath("schemas/system_config.schema.json").read_text()
    return json.loads(text)


def _node_at(root, path):
    """Descend the composed YAML node tree along a jsonschema error path."""
    node = root
    for part in path:
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                if key_node.value == str(part):
                    node = value_node
                    break
            else:
                return node
        elif isinstance(node, yaml.SequenceNode):
            idx = int(part)
            if idx >= len(node.value):
                return node
            node = node.value[idx]
        else:
            return node
    return node


def _fail(path: str, node, message: str):
    line = node.start_mark.line + 1 if node is not None else 0
    raise ConfigError(f"{path}:{line}: {message}")


def load_config(path: str) -> tuple[BodySystem, PhaseState, IntegratorSpec]:
    """Parse and validate a config file into domain objects."""
    with open(path, "r") as fh:
        text = fh.read()
    try:
        data = yaml.load(text, Loader=_ConfigLoader)
        root = yaml.compose(text, Loader=_ConfigLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else 0
        raise ConfigError(f"{path}:{line}: invalid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}:1: config must be a mapping")

    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        _fail(path, _node_at(root, err.absolute_path), err.message)

    n = len(data["masses"])
    dim = data.get("dim", 2)
    if len(data["positions"]) != n:
        _fail(
            path,
            _node_at(root, ["positions"]),
            f"expected {n} position rows to match masses, got {len(data['positions'])}",
        )
    for i, row in enumerate(data["positions"]):
        if len(row) != dim:
            _fail(
                path,
                _node_at(root, ["positions", i]),
                f"position row has {len(row)} components, expected dim={dim}",
            )
    velocities = data.get("velocities")
    if velocities is not None:
        if len(velocities) != n:
            _fail(
                path,
                _node_at(root, ["velocities"]),
                f"expected {n} velocity rows to match masses, got {len(velocities)}",
            )
        for i, row in enumerate(velocities):
            if len(row) != dim:
                _fail(
                    path,
                    _node_at(root, ["velocities", i]),
                    f"velocity row has {len(row)} components, expected dim={dim}",
                )

    try:
        system = BodySystem(
            masses=tuple(float(m) for m in data["masses"]),
            alpha=float(data["alpha"]),
            dim=int(dim),
        )
        state = PhaseState(
            positions=np.asarray(data["positions"], dtype=np.float64),
            velocities=(
                np.zeros((n, dim))
                if velocities is None
                else np.asarray(velocities, dtype=np.float64)
            ),
        )
        spec = IntegratorSpec(**data.get("integrator", {}))
    except (ValueError, CollisionError) as exc:
        raise ConfigError(f"{path}:1: {exc}") from None
    return system, state, spec


def dump_config(
    system: BodySystem,
    state: PhaseState,
    spec: IntegratorSpec | None = None,
) -> str:
    """Serialize to YAML text that load_config reads back losslessly."""
    doc: dict = {
        "alpha": system.alpha,
        "dim": system.dim,
        "masses": list(system.masses),
        "positions": [[float(x) for x in row] for row in state.positions],
        "velocities": [[float(x) for x in row] for row in state.velocities],
    }
    if spec is not None:
        integrator = {
            "rel_tol": spec.rel_tol,
            "abs_tol": spec.abs_tol,
            "sample_dt": spec.sample_dt,
        }
        if spec.max_step != float("inf"):
            integrator["max_step"] = spec.max_step
        doc["integrator"] = integrator
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)
