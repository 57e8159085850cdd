"""MPS export (and a small reader used to check round trips).

Column names are ``<block prefix><flat index>`` and row names ``R<index>``,
both at most 8 characters, so the fixed format can carry any program
built here.  Fixed-format numbers are limited to 12 characters, which
costs some precision; ``free=True`` writes full ``repr`` precision.

Round trip: ``read_mps(write_mps(lp))`` has the same rows, senses, bounds
and objective as ``lp``, with variables renamed to their short MPS names
and stored as scalar blocks.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..errors import ConfigError, ParseError
from .model import LinearProgram

OBJ_ROW = "COST"
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def _base36(n):
    out = ""
    while True:
        n, r = divmod(n, 36)
        out = _DIGITS[r] + out
        if n == 0:
            return out


def mps_column_names(lp):
    """Stable short names, one per column."""
    blocks = sorted(lp.blocks.items(), key=lambda kv: kv[1][0])
    prefixes = {}
    for name, _ in blocks:
        prefix = name[:2]
        if prefix in prefixes.values():
            raise ConfigError(f"blocks {name!r} and another share MPS prefix {prefix!r}")
        prefixes[name] = prefix
    names = [None] * lp.n_vars
    for name, (start, shape) in blocks:
        size = int(np.prod(shape)) if shape else 1
        for k in range(size):
            label = prefixes[name] + (str(k) if shape else "")
            if len(label) > 8:
                label = prefixes[name] + _base36(k)
            if len(label) > 8:
                raise ConfigError(f"block {name!r} too large for 8-character names")
            names[start + k] = label
    return names


def _num(v, free):
    v = float(v)
    if free:
        return repr(v)
    text = repr(v)
    if len(text) <= 12:
        return text
    for digits in range(12, 0, -1):
        text = f"{v:.{digits}g}"
        if len(text) <= 12:
            return text
    raise ConfigError(f"cannot fit {v!r} into 12 characters")


def _line(free, f1="", f2="", f3="", f4="", f5="", f6=""):
    if free:
        return " " + " ".join(s for s in (f1, f2, f3, f4, f5, f6) if s)
    line = f" {f1:<2} {f2:<8}  {f3:<8}  {f4:>12}"
    if f5:
        line += f"   {f5:<8}  {f6:>12}"
    return line.rstrip()


def write_mps(lp, path, free=False):
    lp.seal()
    cols = mps_column_names(lp)
    rows = [f"R{i}" for i in range(lp.n_rows)]
    sense_code = {"<=": "L", ">=": "G", "=": "E"}
    out = [f"NAME          {lp.name[:8].upper() or 'LP'}", "ROWS", f" N  {OBJ_ROW}"]
    for r, s in zip(rows, lp.senses):
        out.append(f" {sense_code[s]}  {r}")

    out.append("COLUMNS")
    csc = lp.A.tocsc()
    csc.sort_indices()
    for j in range(lp.n_vars):
        entries = []
        if lp.c[j] != 0.0:
            entries.append((OBJ_ROW, lp.c[j]))
        lo, hi = csc.indptr[j], csc.indptr[j + 1]
        entries.extend((rows[i], v) for i, v in zip(csc.indices[lo:hi], csc.data[lo:hi]))
        if not entries:
            entries.append((OBJ_ROW, 0.0))
        for k in range(0, len(entries), 2):
            pair = entries[k:k + 2]
            fields = [cols[j], pair[0][0], _num(pair[0][1], free)]
            if len(pair) == 2:
                fields += [pair[1][0], _num(pair[1][1], free)]
            out.append(_line(free, "", *fields))

    out.append("RHS")
    nz = [(rows[i], v) for i, v in enumerate(lp.rhs) if v != 0.0]
    for k in range(0, len(nz), 2):
        pair = nz[k:k + 2]
        fields = ["RHS", pair[0][0], _num(pair[0][1], free)]
        if len(pair) == 2:
            fields += [pair[1][0], _num(pair[1][1], free)]
        out.append(_line(free, "", *fields))

    # relation-form rows never carry ranges; the section is kept for readers
    # that expect it.
    out.append("RANGES")

    out.append("BOUNDS")
    for j in range(lp.n_vars):
        lo, hi = lp.lower[j], lp.upper[j]
        name = cols[j]
        if math.isinf(lo) and math.isinf(hi):
            out.append(_line(free, "FR", "BND", name))
        elif lo == hi:
            out.append(_line(free, "FX", "BND", name, _num(lo, free)))
        else:
            if math.isinf(lo):
                out.append(_line(free, "MI", "BND", name))
            elif lo != 0.0 or hi < 0.0:
                out.append(_line(free, "LO", "BND", name, _num(lo, free)))
            if not math.isinf(hi):
                out.append(_line(free, "UP", "BND", name, _num(hi, free)))
    out.append("ENDATA")
    Path(path).write_text("\n".join(out) + "\n")
    return path


def read_mps(path):
    """Parse a file written by :func:`write_mps` (fixed or free format)."""
    section = None
    name = "lp"
    row_sense = {}
    row_order = []
    obj_row = None
    col_entries = {}
    col_order = []
    rhs = {}
    bounds = {}
    inv = {"L": "<=", "G": ">=", "E": "="}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw[0].isspace():
            head = raw.split()
            section = head[0]
            if section == "NAME" and len(head) > 1:
                name = head[1].lower()
            continue
        tok = raw.split()
        if section == "ROWS":
            if tok[0] == "N":
                obj_row = tok[1]
            else:
                row_sense[tok[1]] = inv[tok[0]]
                row_order.append(tok[1])
        elif section == "COLUMNS":
            col = tok[0]
            if col not in col_entries:
                col_entries[col] = []
                col_order.append(col)
            for k in range(1, len(tok) - 1, 2):
                col_entries[col].append((tok[k], float(tok[k + 1])))
        elif section == "RHS":
            for k in range(1, len(tok) - 1, 2):
                rhs[tok[k]] = float(tok[k + 1])
        elif section == "RANGES":
            raise ParseError("ranged rows are not supported", lineno)
        elif section == "BOUNDS":
            kind, col = tok[0], tok[2]
            lo, hi = bounds.get(col, (0.0, math.inf))
            val = float(tok[3]) if len(tok) > 3 else None
            if kind == "FR":
                lo, hi = -math.inf, math.inf
            elif kind == "MI":
                lo = -math.inf
            elif kind == "FX":
                lo = hi = val
            elif kind == "LO":
                lo = val
            elif kind == "UP":
                hi = val
            else:
                raise ParseError(f"unsupported bound type {kind}", lineno)
            bounds[col] = (lo, hi)
        elif section not in ("ENDATA",):
            raise ParseError(f"unexpected data in section {section}", lineno)

    lp = LinearProgram(name)
    index = {}
    for col in col_order:
        lo, hi = bounds.get(col, (0.0, math.inf))
        index[col] = int(lp.add_block(col, (), lower=lo, upper=hi))
    obj_cols, obj_vals = [], []
    row_cols = {r: ([], []) for r in row_order}
    for col in col_order:
        for row, v in col_entries[col]:
            if row == obj_row:
                if v != 0.0:
                    obj_cols.append(index[col])
                    obj_vals.append(v)
            else:
                row_cols[row][0].append(index[col])
                row_cols[row][1].append(v)
    lp.set_objective(obj_cols, obj_vals)
    for r in row_order:
        cs, vs = row_cols[r]
        lp.add_constraint(cs, vs, row_sense[r], rhs.get(r, 0.0), name=r)
    return lp.seal()
