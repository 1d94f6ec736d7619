"""Emphasis-parameter configuration space: enumeration, expansion, dedup, settings files."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

EMPHASIS_LEVELS = ("default", "aggressive", "fast", "off")
SOLVER_EMPHASIS_LEVELS = (
    "default",
    "counter",
    "cpsolver",
    "easycip",
    "feasibility",
    "hardlp",
    "optimality",
    "phasefeas",
    "phaseimprove",
    "phaseproof",
    "numerics",
)


class ConfigSpaceError(ValueError):
    pass


@dataclass(frozen=True)
class ParamDef:
    name: str
    levels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.levels:
            raise ConfigSpaceError(f"parameter {self.name!r} has no levels")
        if len(set(self.levels)) != len(self.levels):
            raise ConfigSpaceError(f"parameter {self.name!r} has duplicate level labels")


def emphasis_params() -> list[ParamDef]:
    """Presolving, heuristics and separating emphasis plus the solver-wide emphasis."""
    return [
        ParamDef("presolving/emphasis", EMPHASIS_LEVELS),
        ParamDef("heuristics/emphasis", EMPHASIS_LEVELS),
        ParamDef("separating/emphasis", EMPHASIS_LEVELS),
        ParamDef("emphasis", SOLVER_EMPHASIS_LEVELS),
    ]


@dataclass(frozen=True)
class ConfigPoint:
    id: int
    assignment: tuple[int, ...]
    labels: tuple[tuple[str, str], ...]  # (param name, level label) per ParamDef


@dataclass
class ExpansionTable:
    entries: dict[tuple[str, str], dict[str, object]]
    merge_order: list[str] = field(default_factory=list)

    @classmethod
    def identity(cls, defs: list[ParamDef]) -> "ExpansionTable":
        """Each level sets only its own parameter, so nothing collapses."""
        return cls(
            {(d.name, lvl): {d.name: lvl} for d in defs for lvl in d.levels},
            [d.name for d in defs],
        )

    @classmethod
    def from_dict(cls, doc: dict) -> "ExpansionTable":
        try:
            entries = {
                (param, level): dict(settings)
                for param, levels in doc["entries"].items()
                for level, settings in levels.items()
            }
        except (KeyError, AttributeError, TypeError) as exc:
            raise ConfigSpaceError(f"malformed expansion table: {exc}") from None
        return cls(entries, list(doc.get("merge_order", [])))

    def to_dict(self) -> dict:
        nested: dict[str, dict] = {}
        for (param, level), settings in self.entries.items():
            nested.setdefault(param, {})[level] = dict(settings)
        return {"merge_order": list(self.merge_order), "entries": nested}


def params_from_dict(doc) -> list[ParamDef]:
    try:
        return [ParamDef(p["name"], tuple(p["levels"])) for p in doc["params"]]
    except (KeyError, TypeError) as exc:
        raise ConfigSpaceError(f"malformed parameter definitions: {exc}") from None


def params_to_dict(defs) -> dict:
    return {"params": [{"name": d.name, "levels": list(d.levels)} for d in defs]}


def enumerate_cartesian(defs: list[ParamDef]) -> list[ConfigPoint]:
    if not defs:
        raise ConfigSpaceError("need at least one parameter definition")
    points = []
    for k, combo in enumerate(itertools.product(*(range(len(d.levels)) for d in defs))):
        labels = tuple((d.name, d.levels[i]) for d, i in zip(defs, combo))
        points.append(ConfigPoint(k, tuple(combo), labels))
    return points


def expand(config: ConfigPoint, table: ExpansionTable) -> tuple[tuple[str, object], ...]:
    """Canonical low-level settings of ``config``: a name-sorted tuple of pairs."""
    params = [name for name, _ in config.labels]
    order = {name: k for k, name in enumerate(table.merge_order or params)}
    merged: dict[str, object] = {}
    for name, level in sorted(config.labels, key=lambda nl: order.get(nl[0], len(order))):
        try:
            merged.update(table.entries[(name, level)])
        except KeyError:
            raise ConfigSpaceError(f"expansion table has no entry for {name}={level}") from None
    return tuple(sorted(merged.items()))


@dataclass
class ConfigSpace:
    params: list[ParamDef]
    configs: list[ConfigPoint]
    survivors: list[ConfigPoint]
    duplicates: dict[int, list[int]]

    @property
    def survivor_ids(self) -> list[int]:
        return [c.id for c in self.survivors]

    def to_dict(self) -> dict:
        return {
            **params_to_dict(self.params),
            "n_full": len(self.configs),
            "n_reduced": len(self.survivors),
            "survivors": [{"id": c.id, "assignment": list(c.assignment)} for c in self.survivors],
            "duplicates": {str(k): v for k, v in sorted(self.duplicates.items())},
        }


def dedup(configs: list[ConfigPoint], table: ExpansionTable) -> ConfigSpace:
    first: dict[tuple, int] = {}
    duplicates: dict[int, list[int]] = {}
    for c in sorted(configs, key=lambda c: c.id):
        key = expand(c, table)
        if key in first:
            duplicates.setdefault(first[key], []).append(c.id)
        else:
            first[key] = c.id
    keep = set(first.values())
    survivors = [c for c in configs if c.id in keep]
    params = []
    if configs:
        names = [name for name, _ in configs[0].labels]
        levels = {name: [] for name in names}
        for c in configs:
            for name, lvl in c.labels:
                if lvl not in levels[name]:
                    levels[name].append(lvl)
        params = [ParamDef(name, tuple(levels[name])) for name in names]
    return ConfigSpace(params, list(configs), survivors, duplicates)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "TRUE" if value else "FALSE"
    if isinstance(value, (int, float)):
        return repr(value)
    return json.dumps(str(value))


def _parse_value(text: str):
    if text == "TRUE":
        return True
    if text == "FALSE":
        return False
    if text.startswith('"'):
        return json.loads(text)
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def emit_settings(config: ConfigPoint, table: ExpansionTable) -> str:
    return "".join(f"{name} = {_format_value(value)}\n" for name, value in expand(config, table))


def parse_settings(text: str) -> dict[str, object]:
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        name, sep, value = line.partition(" = ")
        if not sep:
            raise ConfigSpaceError(f"settings line {lineno}: expected 'name = value'")
        out[name.strip()] = _parse_value(value.strip())
    return out
