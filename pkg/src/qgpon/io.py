"""Scenario documents: JSON <-> NetworkScenario, plus a stable digest."""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import replace

from .topology import NetworkScenario


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def scenario_to_dict(s: NetworkScenario) -> dict:
    d = dataclasses.asdict(s)
    d["noise_sources"] = list(s.noise_sources)
    return d


def canonical_json(s: NetworkScenario) -> str:
    return json.dumps(scenario_to_dict(s), sort_keys=True, separators=(",", ":"))


def digest(s: NetworkScenario) -> str:
    return hashlib.sha256(canonical_json(s).encode()).hexdigest()[:16]


def _merge(obj, doc, path, problems):
    if not isinstance(doc, dict):
        problems.append(f"{path or '<root>'}: expected an object")
        return obj
    fields = {f.name: f for f in dataclasses.fields(obj)}
    changes = {}
    for key, value in doc.items():
        where = f"{path}.{key}" if path else key
        if key not in fields:
            problems.append(f"{where}: unknown field")
            continue
        current = getattr(obj, key)
        if dataclasses.is_dataclass(current):
            changes[key] = _merge(current, value, where, problems)
        elif key == "noise_sources":
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                problems.append(f"{where}: expected a list of strings")
            else:
                changes[key] = tuple(value)
        else:
            checked = _check_scalar(current, value, where, problems, fields[key])
            if checked is not _BAD:
                changes[key] = checked
    return replace(obj, **changes)


_BAD = object()


def _check_scalar(current, value, where, problems, f):
    optional = "None" in str(f.type)
    if value is None:
        if optional:
            return None
        problems.append(f"{where}: may not be null")
        return _BAD
    if isinstance(current, bool) or f.type in ("bool",):
        if not isinstance(value, bool):
            problems.append(f"{where}: expected true/false")
            return _BAD
        return value
    if isinstance(current, str):
        if not isinstance(value, str):
            problems.append(f"{where}: expected a string")
            return _BAD
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        problems.append(f"{where}: expected a number")
        return _BAD
    if isinstance(current, int) or f.type.startswith("int"):
        if float(value) != int(value):
            problems.append(f"{where}: expected an integer")
            return _BAD
        return int(value)
    return float(value)


def scenario_from_dict(doc: dict, base: NetworkScenario | None = None) -> NetworkScenario:
    """Overlay ``doc`` on ``base`` (library defaults if omitted).

    Missing keys keep the base value; unknown keys and wrongly typed values
    are reported together with their field paths.
    """
    problems = []
    s = _merge(base if base is not None else NetworkScenario(), doc, "", problems)
    if problems:
        raise ConfigError(problems)
    return s
