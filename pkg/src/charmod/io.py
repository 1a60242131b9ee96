"""Reading and writing complex description files.

A file looks like::

    {"ambient_dim": 2,
     "cells": [{"id": "T", "ineqs": [[-1, 0, 0], [0, -1, 0], [1, 1, 1]], "eqs": []}],
     "generate_faces": true}

Each row ``[a_1, ..., a_m, b]`` means ``a . x <= b`` (or ``= b`` under
``eqs``).  Numbers are integers or strings ``"p/q"``.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import CharmodError, ParseError
from .geometry import Cell, CellComplex, build_complex

_RATIONAL = re.compile(r"^\s*[+-]?\d+\s*(/\s*[+-]?\d+\s*)?$")


def parse_number(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise ParseError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str) and _RATIONAL.match(value):
        num, _, den = value.replace(" ", "").partition("/")
        if den and int(den) == 0:
            raise ParseError(f"{where}: zero denominator in {value!r}")
        return Fraction(int(num), int(den) if den else 1)
    raise ParseError(f"{where}: expected an integer or 'p/q' string, got {value!r}")


def _rows(data, m: int, where: str) -> list[list[Fraction]]:
    if data is None:
        return []
    if not isinstance(data, list):
        raise ParseError(f"{where}: expected a list of rows")
    out = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != m + 1:
            raise ParseError(f"{where}[{i}]: expected a row of {m + 1} numbers")
        out.append([parse_number(v, f"{where}[{i}][{j}]") for j, v in enumerate(row)])
    return out


def complex_from_data(data) -> CellComplex:
    if not isinstance(data, dict):
        raise ParseError("top level: expected an object")
    unknown = set(data) - {"ambient_dim", "cells", "generate_faces"}
    if unknown:
        raise ParseError(f"top level: unknown fields {sorted(unknown)}")
    m = data.get("ambient_dim")
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise ParseError("ambient_dim: expected a positive integer")
    cells_data = data.get("cells")
    if not isinstance(cells_data, list) or not cells_data:
        raise ParseError("cells: expected a nonempty list")
    gen = data.get("generate_faces", False)
    if not isinstance(gen, bool):
        raise ParseError("generate_faces: expected true or false")
    cells = []
    for k, cd in enumerate(cells_data):
        where = f"cells[{k}]"
        if not isinstance(cd, dict):
            raise ParseError(f"{where}: expected an object")
        extra = set(cd) - {"id", "ineqs", "eqs"}
        if extra:
            raise ParseError(f"{where}: unknown fields {sorted(extra)}")
        cid = cd.get("id")
        if not isinstance(cid, str) or not cid:
            raise ParseError(f"{where}.id: expected a nonempty string")
        ineqs = _rows(cd.get("ineqs"), m, f"{where}.ineqs")
        eqs = _rows(cd.get("eqs"), m, f"{where}.eqs")
        try:
            cells.append(Cell.from_rows(cid, m, ineqs, eqs))
        except CharmodError as exc:
            raise type(exc)(f"{where}: {exc}") from None
    return build_complex(cells, generate_faces=gen)


def loads_complex(text: str) -> CellComplex:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return complex_from_data(data)


def parse_complex(path) -> CellComplex:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    try:
        return loads_complex(text)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def format_number(x: Fraction):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def complex_to_data(K: CellComplex) -> dict:
    cells = []
    for c in K.ordered:
        cells.append({
            "id": c.id,
            "ineqs": [[*map(format_number, h.normal), format_number(h.offset)] for h in c.inequalities],
            "eqs": [[*map(format_number, h.normal), format_number(h.offset)] for h in c.equalities],
        })
    return {"ambient_dim": K.ambient_dim, "cells": cells, "generate_faces": False}


def dumps_complex(K: CellComplex) -> str:
    return json.dumps(complex_to_data(K), indent=1) + "\n"


CORPUS = ("interval", "ray", "simplex2", "square", "square_boundary", "box3", "two_cones", "split_fibers")


def corpus_path(name: str):
    return resources.files("charmod").joinpath("corpus").joinpath(f"{name}.json")


def load_corpus(name: str) -> CellComplex:
    if name not in CORPUS:
        raise KeyError(name)
    return loads_complex(corpus_path(name).read_text())
