"""MILP instances and the canonical JSON instance format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

VAR_TYPES = ("continuous", "integer", "binary")
SENSES = ("maximize", "minimize")
CONS_SENSES = ("<=", ">=", "=")


class InstanceError(ValueError):
    """Malformed instance data; the message starts with the offending field path."""


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[tuple[int, float], ...]
    sense: str
    rhs: float


@dataclass
class MilpInstance:
    id: str
    objective: list[float]
    constraints: list[Constraint] = field(default_factory=list)
    sense: str = "maximize"
    var_types: list[str] | None = None
    var_lb: list[float | None] | None = None
    var_ub: list[float | None] | None = None

    def __post_init__(self):
        n = len(self.objective)
        if self.var_types is None:
            self.var_types = ["continuous"] * n
        if self.var_lb is None:
            self.var_lb = [0.0] * n
        if self.var_ub is None:
            self.var_ub = [None] * n

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    @property
    def n_cons(self) -> int:
        return len(self.constraints)

    @property
    def nnz(self) -> int:
        return sum(1 for row in self.constraints for _, v in row.coeffs if v != 0.0)

    def validate(self) -> "MilpInstance":
        """Check every invariant; raises InstanceError naming the field path."""
        n = self.n_vars
        if self.sense not in SENSES:
            raise InstanceError(f"sense: expected one of {SENSES}, got {self.sense!r}")
        for name in ("var_types", "var_lb", "var_ub"):
            if len(getattr(self, name)) != n:
                raise InstanceError(f"{name}: length {len(getattr(self, name))} != n_vars {n}")
        for j, t in enumerate(self.var_types):
            if t not in VAR_TYPES:
                raise InstanceError(f"var_types[{j}]: unknown type {t!r}")
        for j, w in enumerate(self.objective):
            if not math.isfinite(w):
                raise InstanceError(f"objective[{j}]: not finite")
        for j, (lb, ub) in enumerate(zip(self.var_lb, self.var_ub)):
            for name, b in (("var_lb", lb), ("var_ub", ub)):
                if b is not None and math.isnan(b):
                    raise InstanceError(f"{name}[{j}]: NaN bound")
            if lb is not None and ub is not None and lb > ub:
                raise InstanceError(f"lb > ub at variable {j}")
        for i, row in enumerate(self.constraints):
            if row.sense not in CONS_SENSES:
                raise InstanceError(f"constraints[{i}].sense: unknown sense {row.sense!r}")
            if not math.isfinite(row.rhs):
                raise InstanceError(f"constraints[{i}].rhs: not finite")
            seen = set()
            for k, (col, val) in enumerate(row.coeffs):
                if not 0 <= col < n:
                    raise InstanceError(
                        f"constraints[{i}].coeffs[{k}]: index {col} out of range for {n} variables"
                    )
                if col in seen:
                    raise InstanceError(f"constraints[{i}].coeffs[{k}]: duplicate column {col}")
                if not math.isfinite(val):
                    raise InstanceError(f"constraints[{i}].coeffs[{k}]: not finite")
                seen.add(col)
        return self


def _num(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _opt_num(value, path):
    return None if value is None else _num(value, path)


def _list(doc, key, path=""):
    value = doc.get(key)
    if not isinstance(value, list):
        raise InstanceError(f"{path}{key}: expected a list")
    return value


def instance_from_dict(doc: dict) -> MilpInstance:
    if not isinstance(doc, dict):
        raise InstanceError("<root>: expected an object")
    inst_id = doc.get("id")
    if not isinstance(inst_id, str):
        raise InstanceError("id: expected a string")
    objective = [_num(w, f"objective[{j}]") for j, w in enumerate(_list(doc, "objective"))]
    n = len(objective)
    var_types = doc.get("var_types", ["continuous"] * n)
    var_lb = doc.get("var_lb", [0.0] * n)
    var_ub = doc.get("var_ub", [None] * n)
    for name, value in (("var_types", var_types), ("var_lb", var_lb), ("var_ub", var_ub)):
        if not isinstance(value, list):
            raise InstanceError(f"{name}: expected a list")
    constraints = []
    for i, row in enumerate(_list(doc, "constraints")):
        path = f"constraints[{i}]"
        if not isinstance(row, dict):
            raise InstanceError(f"{path}: expected an object")
        coeffs = []
        for k, pair in enumerate(_list(row, "coeffs", path + ".")):
            if not isinstance(pair, list) or len(pair) != 2:
                raise InstanceError(f"{path}.coeffs[{k}]: expected [col, val]")
            col, val = pair
            if isinstance(col, bool) or not isinstance(col, int):
                raise InstanceError(f"{path}.coeffs[{k}][0]: expected an integer column")
            coeffs.append((col, _num(val, f"{path}.coeffs[{k}][1]")))
        constraints.append(
            Constraint(tuple(coeffs), row.get("sense"), _num(row.get("rhs"), f"{path}.rhs"))
        )
    inst = MilpInstance(
        id=inst_id,
        objective=objective,
        constraints=constraints,
        sense=doc.get("sense", "maximize"),
        var_types=list(var_types),
        var_lb=[_opt_num(b, f"var_lb[{j}]") for j, b in enumerate(var_lb)],
        var_ub=[_opt_num(b, f"var_ub[{j}]") for j, b in enumerate(var_ub)],
    )
    return inst.validate()


def parse_milp_json(data: bytes | str) -> MilpInstance:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"<root>: malformed document ({exc})") from None
    return instance_from_dict(doc)


def instance_to_dict(inst: MilpInstance) -> dict:
    return {
        "id": inst.id,
        "sense": inst.sense,
        "objective": list(inst.objective),
        "var_types": list(inst.var_types),
        "var_lb": list(inst.var_lb),
        "var_ub": list(inst.var_ub),
        "constraints": [
            {"coeffs": [[c, v] for c, v in row.coeffs], "sense": row.sense, "rhs": row.rhs}
            for row in inst.constraints
        ],
    }


def emit_milp_json(inst: MilpInstance) -> bytes:
    # json writes floats with repr, so values round-trip exactly
    return (json.dumps(instance_to_dict(inst), separators=(",", ":")) + "\n").encode("utf-8")


def load_instance(path) -> MilpInstance:
    with open(path, "rb") as f:
        data = f.read()
    if str(path).lower().endswith((".mps", ".mps.txt")):
        from .mps import parse_mps

        return parse_mps(data)
    return parse_milp_json(data)
