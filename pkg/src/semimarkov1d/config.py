"""Configuration schema: a JSON document describing one chain.

The document shape is::

    {
      "schema_version": 1,
      "L": 2,
      "transitions": [
        {"from": 1, "to": 2, "weight": 1.0,
         "density": {"family": "exponential", "rate": 1.0}},
        ...
      ]
    }

``"to"`` is a neighboring state number or the string ``"trap"`` for the
absorbing sink attached to the source state.  Unknown fields anywhere are
errors, never ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .densities import (DensityFamily, DeterministicDelay, Erlang,
                        Exponential, HyperExponential)
from .errors import ParseError, SchemaError

SCHEMA_VERSION = 1
TRAP = "trap"

_ROOT_FIELDS = {"schema_version", "L", "transitions"}
_TRANSITION_FIELDS = {"from", "to", "weight", "density"}
_FAMILY_FIELDS = {
    "exponential": {"rate"},
    "erlang": {"shape", "rate"},
    "deterministic": {"delay"},
    "hyperexponential": {"branches"},
}
_BRANCH_FIELDS = {"weight", "rate"}


@dataclass(frozen=True)
class TransitionSpec:
    """One validated transition entry."""

    from_state: int
    to: int | str  # state number or TRAP
    weight: float
    density: DensityFamily


@dataclass(frozen=True)
class ChainSpec:
    """Validated configuration: chain length plus its transition list."""

    length: int
    transitions: tuple[TransitionSpec, ...]


def _require_int(value, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaError(f"{where}: expected an integer, got {value!r}")
    return value


def _require_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _require_object(value, allowed: set[str], where: str) -> dict:
    if not isinstance(value, dict):
        raise SchemaError(f"{where}: expected an object, got {type(value).__name__}")
    unknown = set(value) - allowed
    if unknown:
        raise SchemaError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = allowed - set(value)
    if missing:
        raise SchemaError(f"{where}: missing field(s) {sorted(missing)}")
    return value


def _parse_density(raw, where: str) -> DensityFamily:
    if not isinstance(raw, dict):
        raise SchemaError(f"{where}: expected an object, got {type(raw).__name__}")
    family = raw.get("family")
    if family not in _FAMILY_FIELDS:
        raise SchemaError(f"{where}: unknown family {family!r}; expected one of "
                          f"{sorted(_FAMILY_FIELDS)}")
    _require_object(raw, _FAMILY_FIELDS[family] | {"family"}, where)
    if family == "exponential":
        return Exponential(rate=_require_number(raw["rate"], f"{where}.rate"))
    if family == "erlang":
        return Erlang(shape=_require_int(raw["shape"], f"{where}.shape"),
                      rate=_require_number(raw["rate"], f"{where}.rate"))
    if family == "deterministic":
        return DeterministicDelay(delay=_require_number(raw["delay"], f"{where}.delay"))
    branches = raw["branches"]
    if not isinstance(branches, list) or not branches:
        raise SchemaError(f"{where}.branches: expected a non-empty array")
    pairs = []
    for b, branch in enumerate(branches):
        bwhere = f"{where}.branches[{b}]"
        _require_object(branch, _BRANCH_FIELDS, bwhere)
        pairs.append((_require_number(branch["weight"], f"{bwhere}.weight"),
                      _require_number(branch["rate"], f"{bwhere}.rate")))
    return HyperExponential(branches=tuple(pairs))


def parse_config(text: str) -> ChainSpec:
    """Parse and validate a JSON chain description.

    Raises ParseError for malformed JSON and SchemaError for structural
    violations, each pointing at the offending field.  Chain-level invariants
    (weight normalization, nearest-neighbor topology, parameter ranges) are
    pre-checked here as well so problems surface with transition indices
    attached.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
                         f"{exc.msg}") from exc

    root = _require_object(raw, _ROOT_FIELDS, "document")
    version = _require_int(root["schema_version"], "schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"schema_version: unsupported value {version}, "
                          f"expected {SCHEMA_VERSION}")
    length = _require_int(root["L"], "L")
    if length < 1:
        raise SchemaError(f"L: chain length must be >= 1, got {length}")
    if not isinstance(root["transitions"], list):
        raise SchemaError("transitions: expected an array")

    transitions = []
    for t, entry in enumerate(root["transitions"]):
        where = f"transitions[{t}]"
        _require_object(entry, _TRANSITION_FIELDS, where)
        frm = _require_int(entry["from"], f"{where}.from")
        if not 1 <= frm <= length:
            raise SchemaError(f"{where}.from: state {frm} outside 1..{length}")
        to = entry["to"]
        if to != TRAP:
            to = _require_int(to, f"{where}.to")
            if not 1 <= to <= length:
                raise SchemaError(f"{where}.to: state {to} outside 1..{length} "
                                  f"(or the string {TRAP!r})")
        weight = _require_number(entry["weight"], f"{where}.weight")
        density = _parse_density(entry["density"], f"{where}.density")
        transitions.append(TransitionSpec(from_state=frm, to=to,
                                          weight=weight, density=density))

    spec = ChainSpec(length=length, transitions=tuple(transitions))
    # Pre-check chain invariants so normalization/topology diagnostics carry
    # state numbers already at parse time.
    from .chain import build_chain
    build_chain(spec)
    return spec
