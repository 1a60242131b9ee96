"""Rational functions in ``x1..xm`` over Q and the Weyl action on them.

Arithmetic is delegated to sympy's sparse fraction field, which keeps
numerator and denominator coprime; we additionally make the denominator
monic so equal functions have identical representations.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Mapping, Sequence

import sympy
from sympy.polys.domains import QQ
from sympy.polys.fields import field
from sympy.polys.rings import ring

from .errors import DimensionMismatch, Inconsistent, ParseError, Underdetermined
from .weyl import WeylElement


@lru_cache(maxsize=None)
def fraction_field(m: int):
    names = ",".join(f"x{i + 1}" for i in range(m)) if m else "x1"
    K, *gens = field(names, QQ)
    return K, gens


@lru_cache(maxsize=None)
def poly_ring(m: int):
    names = ",".join(f"x{i + 1}" for i in range(m)) if m else "x1"
    R, *gens = ring(names, QQ)
    return R, gens


class RationalFunction:
    """Reduced quotient ``num/den`` with monic denominator."""

    __slots__ = ("m", "value")

    def __init__(self, m: int, value):
        self.m = m
        K, _ = fraction_field(m)
        value = K(value)
        lc = value.denom.LC
        if lc != 1:
            value = value.raw_new(value.numer.quo_ground(lc), value.denom.quo_ground(lc))
        self.value = value

    @classmethod
    def from_text(cls, text: str, m: int) -> "RationalFunction":
        K, _ = fraction_field(m)
        syms = [sympy.Symbol(f"x{i + 1}") for i in range(m)]
        try:
            expr = sympy.sympify(text.replace("^", "**"), locals={str(s): s for s in syms})
            return cls(m, K.from_expr(expr))
        except (sympy.SympifyError, ValueError, TypeError, ZeroDivisionError) as exc:
            raise ParseError(f"cannot parse rational function {text!r}: {exc}") from None

    @classmethod
    def constant(cls, m: int, c) -> "RationalFunction":
        K, _ = fraction_field(m)
        return cls(m, K(QQ(c.numerator, c.denominator) if hasattr(c, "denominator") else c))

    @classmethod
    def variable(cls, m: int, i: int) -> "RationalFunction":
        _, gens = fraction_field(m)
        return cls(m, gens[i])

    @property
    def numerator(self):
        return self.value.numer

    @property
    def denominator(self):
        return self.value.denom

    def is_zero(self) -> bool:
        return not self.value

    def __bool__(self):
        return bool(self.value)

    def _wrap(self, other):
        if isinstance(other, RationalFunction):
            if other.m != self.m:
                raise DimensionMismatch("rational functions in different variable counts")
            return other.value
        return other

    def __add__(self, other):
        return RationalFunction(self.m, self.value + self._wrap(other))

    __radd__ = __add__

    def __sub__(self, other):
        return RationalFunction(self.m, self.value - self._wrap(other))

    def __neg__(self):
        return RationalFunction(self.m, -self.value)

    def __mul__(self, other):
        return RationalFunction(self.m, self.value * self._wrap(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return RationalFunction(self.m, self.value / self._wrap(other))

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.m == other.m and self.value == other.value
        return self.value == other

    def __hash__(self):
        return hash((self.m, str(self.value)))

    def diff(self, i: int) -> "RationalFunction":
        _, gens = fraction_field(self.m)
        return RationalFunction(self.m, self.value.diff(gens[i]))

    def as_expr(self):
        return self.value.as_expr()

    def to_text(self) -> str:
        return _tidy(str(sympy.factor(self.as_expr())))

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"RationalFunction({self.to_text()!r})"


def _tidy(text: str) -> str:
    return text.replace("**", "^").replace(" ", "")


def apply_to_rational(P: WeylElement, f: RationalFunction) -> RationalFunction:
    """``x`` acts by multiplication and ``d`` by partial differentiation."""
    if P.m != f.m:
        raise DimensionMismatch(f"operator in m={P.m} applied to function in m={f.m}")
    m = P.m
    K, gens = fraction_field(m)
    derivs: dict = {(0,) * m: f.value}

    def deriv(b):
        got = derivs.get(b)
        if got is not None:
            return got
        i = next(k for k, v in enumerate(b) if v)
        prev = list(b)
        prev[i] -= 1
        got = deriv(tuple(prev)).diff(gens[i])
        derivs[b] = got
        return got

    total = K(0)
    for e, c in P.terms.items():
        a, b = e[:m], e[m:2 * m]
        term = deriv(tuple(b))
        mono = K(1)
        for i, k in enumerate(a):
            if k:
                mono *= gens[i] ** k
        total += K(QQ(int(c.numerator), int(c.denominator))) * mono * term
    return RationalFunction(m, total)


def eliminate_linear(equations: Sequence[tuple[Mapping, object]], keep, m: int) -> RationalFunction:
    """Solve ``sum_u coeff[u] * mu_u = rhs`` over Q(x) for the unknown ``keep``.

    ``equations`` is a list of ``(coeffs, rhs)``.  Raises ``Inconsistent`` if
    the system has no solution and ``Underdetermined`` if ``keep`` is not
    uniquely determined.
    """
    K, _ = fraction_field(m)
    unknowns = sorted({u for coeffs, _ in equations for u in coeffs}, key=str)
    if keep not in unknowns:
        raise Underdetermined(f"unknown {keep!r} does not occur")
    # put ``keep`` last so it is determined only once everything else is pivoted
    unknowns.remove(keep)
    unknowns.append(keep)
    col = {u: i for i, u in enumerate(unknowns)}
    n = len(unknowns)
    rows = []
    for coeffs, rhs in equations:
        row = [K(0)] * (n + 1)
        for u, c in coeffs.items():
            row[col[u]] += K(c.value if isinstance(c, RationalFunction) else c)
        row[n] = K(rhs.value if isinstance(rhs, RationalFunction) else rhs)
        rows.append(row)
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][n]:
            raise Inconsistent("linear system over the fraction field is inconsistent")
    kc = col[keep]
    if kc not in pivots:
        raise Underdetermined(f"unknown {keep!r} is not determined by the system")
    row = rows[pivots.index(kc)]
    if any(row[j] for j in range(n) if j != kc):
        raise Underdetermined(f"unknown {keep!r} depends on free unknowns")
    return RationalFunction(m, row[n])
