"""JSON model-file ingestion and report envelopes.

One self-describing schema covers both model families.  Discrete models list
per-variable state labels and CPT rows keyed by explicit parent assignments;
Gaussian models list edge coefficients and per-variable noise variances.
Validation failures carry the JSON path of the offending field.
"""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass

import numpy as np
from jsonschema import Draft202012Validator

from . import __version__
from .discrete import Cpt, DiscreteBayesNet
from .errors import InputError
from .gaussian import LinearGaussianSem
from .graph import Dag

__all__ = ["load_model", "load_model_file", "DiscreteModel", "ReportEnvelope", "SCHEMA_VERSION"]

SCHEMA_VERSION = "1"

_MODEL_SCHEMA = {
    "type": "object",
    "required": ["type", "target", "variables", "edges"],
    "properties": {
        "type": {"enum": ["discrete", "gaussian"]},
        "target": {"type": "string"},
        "edges": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "string"},
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
    "oneOf": [
        {
            "properties": {
                "type": {"const": "discrete"},
                "variables": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["name", "states"],
                        "properties": {
                            "name": {"type": "string", "minLength": 1},
                            "states": {
                                "type": "array",
                                "minItems": 1,
                                "items": {"type": "string"},
                            },
                        },
                    },
                },
                "cpts": {
                    "type": "object",
                    "additionalProperties": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["given", "probs"],
                            "properties": {
                                "given": {
                                    "type": "object",
                                    "additionalProperties": {"type": "string"},
                                },
                                "probs": {
                                    "type": "array",
                                    "minItems": 1,
                                    "items": {"type": "number"},
                                },
                            },
                        },
                    },
                },
            },
            "required": ["cpts"],
        },
        {
            "properties": {
                "type": {"const": "gaussian"},
                "variables": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "string", "minLength": 1},
                },
                "coefficients": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "minItems": 3,
                        "maxItems": 3,
                    },
                },
                "noise_variance": {
                    "type": "object",
                    "additionalProperties": {"type": "number"},
                },
            },
            "required": ["coefficients", "noise_variance"],
        },
    ],
}

_validator = Draft202012Validator(_MODEL_SCHEMA)


@dataclass(frozen=True)
class DiscreteModel:
    """A discrete network together with its human-readable state labels."""

    net: DiscreteBayesNet
    state_labels: tuple[tuple[str, ...], ...]

    @property
    def graph(self) -> Dag:
        return self.net.graph


def _schema_errors(raw: dict) -> list[str]:
    errors = sorted(_validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    out = []
    for err in errors[:5]:
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        out.append(f"{path}: {err.message}")
    return out


def load_model(text: str) -> DiscreteModel | LinearGaussianSem:
    """Parse and validate a model file; raises InputError with diagnostics."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(raw, dict):
        raise InputError("model file must be a JSON object")
    errors = _schema_errors(raw)
    if errors:
        raise InputError("model schema violations:\n  " + "\n  ".join(errors))
    if raw["type"] == "discrete":
        return _load_discrete(raw)
    return _load_gaussian(raw)


def load_model_file(path) -> DiscreteModel | LinearGaussianSem:
    with open(path, "r", encoding="utf-8") as fh:
        return load_model(fh.read())


def _load_discrete(raw: dict) -> DiscreteModel:
    names = tuple(v["name"] for v in raw["variables"])
    states = tuple(tuple(v["states"]) for v in raw["variables"])
    g = Dag.from_names(names, [tuple(e) for e in raw["edges"]], raw["target"])
    cards = tuple(len(s) for s in states)

    cpts = []
    for i, name in enumerate(names):
        rows = raw["cpts"].get(name)
        if rows is None:
            raise InputError(f"cpts/{name}: missing CPT")
        parents = g.parents(i)
        table = np.full(tuple(cards[p] for p in parents) + (cards[i],), np.nan)
        for r, row in enumerate(rows):
            given = row["given"]
            if set(given) != {names[p] for p in parents}:
                raise InputError(
                    f"cpts/{name}/{r}/given: must assign exactly the parents "
                    f"{sorted(names[p] for p in parents)}"
                )
            idx = []
            for p in parents:
                label = given[names[p]]
                if label not in states[p]:
                    raise InputError(
                        f"cpts/{name}/{r}/given/{names[p]}: unknown state {label!r}"
                    )
                idx.append(states[p].index(label))
            if len(row["probs"]) != cards[i]:
                raise InputError(
                    f"cpts/{name}/{r}/probs: expected {cards[i]} entries"
                )
            if not np.all(np.isnan(table[tuple(idx)])):
                raise InputError(f"cpts/{name}/{r}: duplicate row for {given}")
            table[tuple(idx)] = row["probs"]
        if np.any(np.isnan(table)):
            raise InputError(f"cpts/{name}: not every parent combination is covered")
        cpts.append(Cpt(i, parents, table))
    net = DiscreteBayesNet(g, cards, tuple(cpts))
    return DiscreteModel(net, states)


def _load_gaussian(raw: dict) -> LinearGaussianSem:
    names = tuple(raw["variables"])
    g = Dag.from_names(names, [tuple(e) for e in raw["edges"]], raw["target"])
    index = {name: i for i, name in enumerate(names)}
    coefficients = {}
    for r, (p, c, w) in enumerate(raw["coefficients"]):
        if not isinstance(p, str) or not isinstance(c, str) or not isinstance(w, (int, float)):
            raise InputError(f"coefficients/{r}: expected [parent, child, weight]")
        if p not in index or c not in index:
            raise InputError(f"coefficients/{r}: unknown variable in [{p}, {c}]")
        coefficients[(index[p], index[c])] = float(w)
    missing = set(raw["noise_variance"]) - set(names)
    if missing:
        raise InputError(f"noise_variance: unknown variables {sorted(missing)}")
    try:
        noise = tuple(float(raw["noise_variance"][name]) for name in names)
    except KeyError as exc:
        raise InputError(f"noise_variance: missing entry for {exc.args[0]!r}")
    return LinearGaussianSem(g, coefficients, noise)


@dataclass(frozen=True)
class ReportEnvelope:
    command: str
    payload: dict
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "version": __version__,
            "command": self.command,
            "seed": self.seed,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "payload": self.payload,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)
