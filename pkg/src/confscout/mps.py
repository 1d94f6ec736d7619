"""Reader for fixed- and free-format MPS files.

Supported sections: NAME, OBJSENSE, ROWS, COLUMNS (with INTORG/INTEND
markers), RHS, RANGES, BOUNDS, ENDATA.  Anything else is rejected.
Ranged rows are split into a ``>=`` and a ``<=`` constraint.
"""

from __future__ import annotations

import math

from .milp import Constraint, InstanceError, MilpInstance

ROW_SENSE = {"L": "<=", "G": ">=", "E": "="}
NO_VALUE_BOUNDS = {"FR", "MI", "PL", "BV"}
VALUE_BOUNDS = {"UP", "LO", "FX", "LI", "UI", "BV"}


class MpsError(InstanceError):
    pass


# fixed-format field columns (1-based, inclusive) per the classic layout
_FIXED_FIELDS = ((2, 3), (5, 12), (15, 22), (25, 36), (40, 47), (50, 61))


def _fixed_split(line: str) -> list[str]:
    out = []
    for a, b in _FIXED_FIELDS:
        chunk = line[a - 1 : b].strip()
        if chunk:
            out.append(chunk)
    return out


def _read_entries(tokens, lineno, column_line):
    if column_line:
        if len(tokens) not in (3, 5):
            raise MpsError(f"line {lineno}: expected a name and one or two (row, value) pairs")
        return tokens[0], _pairs(tokens[1:], lineno, allow_set_name=False)[1]
    return _pairs(tokens, lineno)


def _free_or_fixed(raw, tokens, rows, lineno, column_line):
    """Whitespace-split reading first; fall back to fixed columns (names may contain spaces)."""
    try:
        head, entries = _read_entries(tokens, lineno, column_line)
        if all(r in rows for r, _ in entries):
            return head, entries
    except MpsError:
        if len(raw) < 15:
            raise
    return _read_entries(_fixed_split(raw), lineno, column_line)


def _float(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise MpsError(f"line {lineno}: expected a number, got {tok!r}") from None


def _pairs(tokens, lineno, allow_set_name=True):
    """Split a data line into (set name, [(name, value), ...])."""
    if len(tokens) % 2 == 1 and allow_set_name:
        set_name, rest = tokens[0], tokens[1:]
    else:
        set_name, rest = None, tokens
    if not rest or len(rest) % 2:
        raise MpsError(f"line {lineno}: malformed entry {' '.join(tokens)!r}")
    return set_name, [(rest[k], _float(rest[k + 1], lineno)) for k in range(0, len(rest), 2)]


def parse_mps(data: bytes | str, instance_id: str | None = None) -> MilpInstance:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    name = None
    sense = "minimize"
    section = None
    obj_row = None
    rows: dict[str, str] = {}  # name -> L/G/E
    row_order: list[str] = []
    cols: dict[str, int] = {}
    col_order: list[str] = []
    obj: dict[str, float] = {}
    coeffs: dict[str, dict[str, float]] = {}
    integer: set[str] = set()
    rhs: dict[str, float] = {}
    ranges: dict[str, float] = {}
    lb: dict[str, float | None] = {}
    ub: dict[str, float | None] = {}
    binary: set[str] = set()
    in_int_block = False

    for lineno, raw in enumerate(data.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("*"):
            continue
        if not raw[0].isspace():
            tokens = raw.split()
            head = tokens[0].upper()
            if head == "NAME":
                name = tokens[1] if len(tokens) > 1 else ""
                section = "NAME"
            elif head == "OBJSENSE":
                section = "OBJSENSE"
                if len(tokens) > 1:
                    sense = _objsense(tokens[1], lineno)
            elif head in ("ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS"):
                section = head
            elif head == "ENDATA":
                break
            else:
                raise MpsError(f"line {lineno}: unknown section {tokens[0]!r}")
            continue

        tokens = raw.split()
        if section == "OBJSENSE":
            sense = _objsense(tokens[0], lineno)
        elif section == "ROWS":
            if len(tokens) != 2:
                tokens = _fixed_split(raw)
            kind, rname = tokens[0].upper(), tokens[1]
            if kind == "N":
                if obj_row is None:
                    obj_row = rname
                # further free rows are dropped
                rows[rname] = "N"
            elif kind in ROW_SENSE:
                if rname in rows:
                    raise MpsError(f"line {lineno}: duplicate row {rname!r}")
                rows[rname] = kind
                row_order.append(rname)
                coeffs[rname] = {}
            else:
                raise MpsError(f"line {lineno}: unknown row type {kind!r}")
        elif section == "COLUMNS":
            if len(tokens) >= 3 and tokens[1].strip("'").upper() == "MARKER":
                marker = tokens[2].strip("'").upper()
                if marker == "INTORG":
                    in_int_block = True
                elif marker == "INTEND":
                    in_int_block = False
                else:
                    raise MpsError(f"line {lineno}: unknown marker {tokens[2]!r}")
                continue
            parsed = _free_or_fixed(raw, tokens, rows, lineno, column_line=True)
            cname, entries = parsed
            if cname not in cols:
                cols[cname] = len(col_order)
                col_order.append(cname)
            if in_int_block:
                integer.add(cname)
            for rname, val in entries:
                if rname not in rows:
                    raise MpsError(f"line {lineno}: column {cname!r} references undeclared row {rname!r}")
                if rows[rname] == "N":
                    if rname == obj_row:
                        obj[cname] = val
                else:
                    coeffs[rname][cname] = val
        elif section in ("RHS", "RANGES"):
            _, entries = _free_or_fixed(raw, tokens, rows, lineno, column_line=False)
            target = rhs if section == "RHS" else ranges
            for rname, val in entries:
                if rname not in rows:
                    raise MpsError(f"line {lineno}: {section} references undeclared row {rname!r}")
                if rows[rname] == "N":
                    if section == "RANGES":
                        raise MpsError(f"line {lineno}: RANGES on free row {rname!r}")
                    continue  # objective offset; not representable
                target[rname] = val
        elif section == "BOUNDS":
            kind = tokens[0].upper()
            if kind not in NO_VALUE_BOUNDS | VALUE_BOUNDS:
                raise MpsError(f"line {lineno}: unsupported bound type {tokens[0]!r}")
            rest = tokens[1:]
            if kind in NO_VALUE_BOUNDS and len(rest) in (1, 2) and (len(rest) == 1 or rest[-1] in cols):
                cname, val = rest[-1], None
            elif len(rest) in (2, 3):
                cname, val = rest[-2], _float(rest[-1], lineno)
            else:
                raise MpsError(f"line {lineno}: malformed bound {raw.strip()!r}")
            if cname not in cols:
                raise MpsError(f"line {lineno}: bound on undeclared column {cname!r}")
            _apply_bound(kind, cname, val, lb, ub, binary, integer)
        else:
            raise MpsError(f"line {lineno}: data outside of a section")

    if obj_row is None and row_order == [] and not cols:
        raise MpsError("empty MPS document")

    n = len(col_order)
    var_types, var_lb, var_ub = [], [], []
    for cname in col_order:
        if cname in binary:
            var_types.append("binary")
        elif cname in integer:
            var_types.append("integer")
        else:
            var_types.append("continuous")
        var_lb.append(lb.get(cname, 0.0))
        var_ub.append(ub.get(cname))

    constraints = []
    for rname in row_order:
        row = tuple((cols[c], v) for c, v in coeffs[rname].items())
        kind = rows[rname]
        b = rhs.get(rname, 0.0)
        if rname in ranges:
            r = ranges[rname]
            if kind == "E":
                lo, hi = (b, b + r) if r >= 0 else (b + r, b)
            elif kind == "L":
                lo, hi = b - abs(r), b
            else:
                lo, hi = b, b + abs(r)
            constraints.append(Constraint(row, ">=", lo))
            constraints.append(Constraint(row, "<=", hi))
        else:
            constraints.append(Constraint(row, ROW_SENSE[kind], b))

    inst = MilpInstance(
        id=instance_id if instance_id is not None else (name or "mps"),
        objective=[obj.get(c, 0.0) for c in col_order],
        constraints=constraints,
        sense=sense,
        var_types=var_types,
        var_lb=var_lb,
        var_ub=var_ub,
    )
    assert inst.n_vars == n
    return inst.validate()


def _objsense(tok: str, lineno: int) -> str:
    tok = tok.upper()
    if tok in ("MAX", "MAXIMIZE"):
        return "maximize"
    if tok in ("MIN", "MINIMIZE"):
        return "minimize"
    raise MpsError(f"line {lineno}: unknown OBJSENSE {tok!r}")


INFINITY = 1e20


def _apply_bound(kind, cname, val, lb, ub, binary, integer):
    if val is not None and abs(val) >= INFINITY:
        # conventional 1e30-style infinities
        if kind in ("UP", "UI") and val > 0 or kind in ("LO", "LI") and val < 0:
            val = None
    if kind == "UP":
        ub[cname] = val
        if val is not None and val < 0 and cname not in lb:
            lb[cname] = None
    elif kind == "LO":
        lb[cname] = val
    elif kind == "FX":
        lb[cname] = ub[cname] = val
    elif kind == "FR":
        lb[cname] = ub[cname] = None
    elif kind == "MI":
        lb[cname] = None
    elif kind == "PL":
        ub[cname] = None
    elif kind == "BV":
        binary.add(cname)
        lb[cname], ub[cname] = 0.0, 1.0
    elif kind == "LI":
        integer.add(cname)
        lb[cname] = val
    elif kind == "UI":
        integer.add(cname)
        ub[cname] = val
    if val is not None and math.isnan(val):
        raise MpsError(f"NaN bound on column {cname!r}")
