"""Weyl algebra elements in normal order.

An element of ``D_m = Q<x_1..x_m, d_1..d_m>`` (optionally with extra central
parameters ``t_1..t_k``) is a dict from exponent tuples
``(a_1..a_m, b_1..b_m, c_1..c_k)`` to nonzero rational coefficients, meaning
``sum coeff * x^a * d^b * t^c`` with every ``x`` to the left of every ``d``.

Coefficients are ``gmpy2.mpq``; they compare equal to ``Fraction`` values.
"""

from __future__ import annotations

import itertools
import re
from functools import lru_cache
from math import comb, gcd
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from . import linalg as la
from .errors import DimensionMismatch, ParseError, SingularMatrix

Exps = tuple


def to_mpq(value) -> mpq:
    if isinstance(value, str):
        return mpq(la.frac(value))
    return mpq(value)


@lru_cache(maxsize=None)
def _leibniz(b: int, c: int) -> tuple:
    """``d^b x^c = sum_k coef_k x^(c-k) d^(b-k)`` as ``((k, coef_k), ...)``."""
    out = []
    falling = 1
    for k in range(min(b, c) + 1):
        if k:
            falling *= c - k + 1
        out.append((k, comb(b, k) * falling))
    return tuple(out)


class WeylElement:
    """Immutable normal-ordered operator."""

    __slots__ = ("m", "nparams", "terms", "_hash")

    def __init__(self, m: int, terms: Mapping | None = None, nparams: int = 0):
        self.m = m
        self.nparams = nparams
        width = 2 * m + nparams
        clean = {}
        for e, c in (terms or {}).items():
            if len(e) != width:
                raise DimensionMismatch(f"exponent {e} has wrong length for m={m}")
            c = to_mpq(c)
            if c:
                clean[tuple(e)] = c
        self.terms = clean
        self._hash = None

    # ------------------------------------------------------------ builders
    @classmethod
    def constant(cls, m: int, c=1, nparams: int = 0) -> "WeylElement":
        return cls(m, {(0,) * (2 * m + nparams): c}, nparams)

    @classmethod
    def x(cls, m: int, i: int, nparams: int = 0) -> "WeylElement":
        e = [0] * (2 * m + nparams)
        e[i] = 1
        return cls(m, {tuple(e): 1}, nparams)

    @classmethod
    def d(cls, m: int, i: int, nparams: int = 0) -> "WeylElement":
        e = [0] * (2 * m + nparams)
        e[m + i] = 1
        return cls(m, {tuple(e): 1}, nparams)

    @classmethod
    def t(cls, m: int, i: int, nparams: int) -> "WeylElement":
        e = [0] * (2 * m + nparams)
        e[2 * m + i] = 1
        return cls(m, {tuple(e): 1}, nparams)

    @classmethod
    def monomial(cls, m: int, a: Sequence[int], b: Sequence[int], c=1) -> "WeylElement":
        return cls(m, {tuple(a) + tuple(b): c})

    @classmethod
    def linear_form(cls, coeffs: Sequence, const=0) -> "WeylElement":
        """``sum coeffs_i x_i + const``."""
        m = len(coeffs)
        out = {}
        for i, c in enumerate(coeffs):
            e = [0] * (2 * m)
            e[i] = 1
            out[tuple(e)] = c
        out[(0,) * (2 * m)] = const
        return cls(m, out)

    @classmethod
    def directional(cls, v: Sequence) -> "WeylElement":
        """Directional derivative ``sum v_i d_i``."""
        m = len(v)
        out = {}
        for i, c in enumerate(v):
            e = [0] * (2 * m)
            e[m + i] = 1
            out[tuple(e)] = c
        return cls(m, out)

    @classmethod
    def parse(cls, text: str, m: int | None = None) -> "WeylElement":
        return parse(text, m)

    # ------------------------------------------------------------ basics
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, mpq)) or (hasattr(other, "numerator") and not isinstance(other, WeylElement)):
            other = WeylElement.constant(self.m, other, self.nparams)
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.m == other.m and self.nparams == other.nparams and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.m, self.nparams, frozenset(self.terms.items())))
        return self._hash

    def _coerce(self, other) -> "WeylElement":
        if isinstance(other, WeylElement):
            if other.m != self.m or other.nparams != self.nparams:
                raise DimensionMismatch(f"m={self.m} vs m={other.m}")
            return other
        return WeylElement.constant(self.m, other, self.nparams)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return WeylElement(self.m, out, self.nparams)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement(self.m, {e: -c for e, c in self.terms.items()}, self.nparams)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, WeylElement):
            return multiply(self, other)
        c = to_mpq(other)
        return WeylElement(self.m, {e: v * c for e, v in self.terms.items()}, self.nparams)

    def __rmul__(self, other):
        c = to_mpq(other)
        return WeylElement(self.m, {e: c * v for e, v in self.terms.items()}, self.nparams)

    def __pow__(self, n: int):
        out = WeylElement.constant(self.m, 1, self.nparams)
        for _ in range(n):
            out = multiply(out, self)
        return out

    def scale(self, c) -> "WeylElement":
        return self * c

    def bracket(self, other: "WeylElement") -> "WeylElement":
        return multiply(self, other) - multiply(other, self)

    @property
    def order(self) -> int:
        """Total derivative order."""
        m = self.m
        return max((sum(e[m:2 * m]) for e in self.terms), default=-1)

    @property
    def x_degree(self) -> int:
        return max((sum(e[:self.m]) for e in self.terms), default=-1)

    def is_commutative(self) -> bool:
        """True if no derivative appears."""
        m = self.m
        return all(not any(e[m:2 * m]) for e in self.terms)

    def normalized(self) -> "WeylElement":
        """Positive leading coefficient (grevlex), coprime integer coefficients."""
        if not self.terms:
            return self
        den = 1
        for c in self.terms.values():
            den = den * c.denominator // gcd(den, int(c.denominator))
        ints = {e: int(c * den) for e, c in self.terms.items()}
        g = 0
        for v in ints.values():
            g = gcd(g, v)
        lead = max(ints, key=grevlex_key)
        sign = 1 if ints[lead] > 0 else -1
        return WeylElement(self.m, {e: mpq(sign * v, g) for e, v in ints.items()}, self.nparams)

    def with_params(self, nparams: int) -> "WeylElement":
        if nparams < self.nparams:
            raise ValueError("cannot drop parameters")
        pad = (0,) * (nparams - self.nparams)
        return WeylElement(self.m, {e + pad: c for e, c in self.terms.items()}, nparams)

    def drop_params(self) -> "WeylElement":
        w = 2 * self.m
        if any(any(e[w:]) for e in self.terms):
            raise ValueError("element still involves parameters")
        return WeylElement(self.m, {e[:w]: c for e, c in self.terms.items()})

    def embed(self, m_new: int, positions: Sequence[int] | None = None) -> "WeylElement":
        """Re-index variables into a Weyl algebra with ``m_new`` variables."""
        positions = list(range(self.m)) if positions is None else list(positions)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * (2 * m_new)
            for i, p in enumerate(positions):
                ne[p] = e[i]
                ne[m_new + p] = e[self.m + i]
            out[tuple(ne)] = c
        return WeylElement(m_new, out)

    def to_text(self) -> str:
        return format_element(self)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"WeylElement({self.to_text()!r}, m={self.m})"


# ---------------------------------------------------------------- products

def _mul_terms(m: int, e1: Exps, c1, e2: Exps, c2, out: dict):
    a, b = e1[:m], e1[m:2 * m]
    c, d = e2[:m], e2[m:2 * m]
    par = tuple(p + q for p, q in zip(e1[2 * m:], e2[2 * m:]))
    coeff = c1 * c2
    choices = [_leibniz(b[i], c[i]) for i in range(m)]
    for combo in itertools.product(*choices):
        k = 1
        xs = []
        ds = []
        for i, (ki, ci) in enumerate(combo):
            k *= ci
            xs.append(a[i] + c[i] - ki)
            ds.append(b[i] + d[i] - ki)
        e = tuple(xs) + tuple(ds) + par
        out[e] = out.get(e, 0) + coeff * k


def multiply(P: WeylElement, Q: WeylElement) -> WeylElement:
    """Normal-ordered product ``P * Q``."""
    if P.m != Q.m or P.nparams != Q.nparams:
        raise DimensionMismatch(f"cannot multiply m={P.m} by m={Q.m}")
    out: dict = {}
    for e1, c1 in P.terms.items():
        for e2, c2 in Q.terms.items():
            _mul_terms(P.m, e1, c1, e2, c2, out)
    return WeylElement(P.m, out, P.nparams)


def fourier(P: WeylElement) -> WeylElement:
    """Algebra automorphism ``x_i -> d_i``, ``d_i -> -x_i``."""
    m = P.m
    out: dict = {}
    for e, c in P.terms.items():
        a, b, par = e[:m], e[m:2 * m], e[2 * m:]
        # d^a * (-x)^b, then normal-order
        sign = -1 if sum(b) % 2 else 1
        _mul_terms(m, (0,) * m + tuple(a) + par, sign * c, tuple(b) + (0,) * m + (0,) * len(par), 1, out)
    return WeylElement(m, out, P.nparams)


def inverse_fourier(P: WeylElement) -> WeylElement:
    """Inverse map ``x_i -> -d_i``, ``d_i -> x_i``."""
    return fourier(fourier(fourier(P)))


def linear_substitution(P: WeylElement, A: Sequence[Sequence], b: Sequence | None = None) -> WeylElement:
    """Apply ``x -> A x + b``, ``d -> A^{-T} d`` to every term of ``P``."""
    m = P.m
    A = [[la.frac(v) for v in row] for row in A]
    if len(A) != m or any(len(r) != m for r in A):
        raise DimensionMismatch("substitution matrix has wrong shape")
    b = [la.frac(v) for v in (b if b is not None else [0] * m)]
    try:
        Ainv = la.inverse(A)
    except ZeroDivisionError:
        raise SingularMatrix("substitution matrix is singular") from None
    np_ = P.nparams
    xs = [WeylElement.linear_form(A[i], b[i]).with_params(np_) for i in range(m)]
    # row i of A^{-T} is column i of A^{-1}
    ds = [WeylElement.directional([Ainv[j][i] for j in range(m)]).with_params(np_) for i in range(m)]
    out = WeylElement(m, {}, np_)
    for e, c in P.terms.items():
        term = WeylElement(m, {(0,) * (2 * m) + tuple(e[2 * m:]): c}, np_)
        for i in range(m):
            for _ in range(e[i]):
                term = multiply(term, xs[i])
        for i in range(m):
            for _ in range(e[m + i]):
                term = multiply(term, ds[i])
        out = out + term
    return out


# ---------------------------------------------------------------- orders

def grevlex_key(e: Exps) -> tuple:
    return (sum(e), tuple(-v for v in reversed(e)))


# ---------------------------------------------------------------- text I/O

def _fmt_coeff(c) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _fmt_monomial(m: int, e: Exps) -> str:
    parts = []
    for i in range(m):
        if e[i]:
            parts.append(f"x{i + 1}" + (f"^{e[i]}" if e[i] > 1 else ""))
    for i in range(len(e) - 2 * m):
        v = e[2 * m + i]
        if v:
            parts.append(f"t{i + 1}" + (f"^{v}" if v > 1 else ""))
    for i in range(m):
        v = e[m + i]
        if v:
            parts.append(f"d{i + 1}" + (f"^{v}" if v > 1 else ""))
    return "*".join(parts)


def format_element(P: WeylElement, key=grevlex_key) -> str:
    """Expanded text, terms in decreasing order."""
    if not P.terms:
        return "0"
    out = []
    for e in sorted(P.terms, key=key, reverse=True):
        c = P.terms[e]
        mono = _fmt_monomial(P.m, e)
        neg = c < 0
        mag = -c if neg else c
        if not mono:
            body = _fmt_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(mag)}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("-" if neg else "+") + body)
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>[xdt]\d+)|(?P<op>[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt:
            raise ParseError(f"unexpected character at offset {pos} in {text!r}")
        pos = mt.end()
        kind = mt.lastgroup
        toks.append((kind, mt.group(kind), pos))
    return toks


def infer_m(text: str) -> int:
    idx = [int(v[1:]) for v in re.findall(r"[xd]\d+", text)]
    return max(idx, default=0)


def parse(text: str, m: int | None = None, nparams: int = 0) -> WeylElement:
    """Parse ``x1*(x1-1)*d1``-style text; products are normal-ordered as written."""
    if m is None:
        m = infer_m(text)
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty operator text")
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None, len(text))

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok[0] is None or (expected is not None and tok[1] != expected):
            raise ParseError(f"expected {expected or 'token'} near offset {tok[2]} in {text!r}")
        pos += 1
        return tok

    def atom():
        kind, val, off = peek()
        if kind == "num":
            take()
            return WeylElement.constant(m, int(val), nparams)
        if kind == "var":
            take()
            idx = int(val[1:]) - 1
            if val[0] == "t":
                if idx < 0 or idx >= nparams:
                    raise ParseError(f"parameter {val} out of range")
                return WeylElement.t(m, idx, nparams)
            if idx < 0 or idx >= m:
                raise ParseError(f"variable {val} out of range for m={m}")
            return (WeylElement.x if val[0] == "x" else WeylElement.d)(m, idx, nparams)
        if val == "(":
            take()
            inner = expr()
            take(")")
            return inner
        if val == "-":
            take()
            return -power()
        if val == "+":
            take()
            return power()
        raise ParseError(f"unexpected {val!r} near offset {off} in {text!r}")

    def power():
        base = atom()
        if peek()[1] == "^":
            take()
            kind, val, off = take()
            if kind != "num":
                raise ParseError(f"exponent must be a nonnegative integer near offset {off}")
            base = base ** int(val)
        return base

    def term():
        acc = power()
        while peek()[1] in ("*", "/"):
            op = take()[1]
            rhs = power()
            if op == "*":
                acc = multiply(acc, rhs)
            else:
                if not rhs.terms or any(any(e) for e in rhs.terms):
                    raise ParseError("division only by nonzero constants")
                acc = acc * (1 / next(iter(rhs.terms.values())))
        return acc

    def expr():
        acc = term()
        while peek()[1] in ("+", "-"):
            op = take()[1]
            rhs = term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    result = expr()
    if pos != len(toks):
        raise ParseError(f"trailing input near offset {toks[pos][2]} in {text!r}")
    return result


def x_part_groups(P: WeylElement) -> dict:
    """Group terms by derivative monomial: ``{b: {a: coeff}}``."""
    m = P.m
    out: dict = {}
    for e, c in P.terms.items():
        out.setdefault(e[m:], {})[e[:m]] = c
    return out


def weyl_vars(m: int) -> tuple[list[WeylElement], list[WeylElement]]:
    return [WeylElement.x(m, i) for i in range(m)], [WeylElement.d(m, i) for i in range(m)]


def sum_elements(items: Iterable[WeylElement], m: int) -> WeylElement:
    out = WeylElement(m)
    for it in items:
        out = out + it
    return out
