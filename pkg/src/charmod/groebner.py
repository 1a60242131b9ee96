"""Buchberger's algorithm for left ideals and left submodules over the Weyl algebra.

Leading monomials of products behave commutatively (``lm(PQ) = lm(P) + lm(Q)``
for any term order on ``N^{2m}``), so the classical algorithm carries over with
S-polynomials formed by *left* multiplication.  Only Buchberger's chain
criterion is used; the coprime-leading-monomial shortcut is not valid here.

Module elements are dicts keyed by ``(position, exponents)``; an ideal is the
rank-one case.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .errors import DimensionMismatch, OrderMismatch
from .weyl import WeylElement, _leibniz, grevlex_key


@dataclass(frozen=True)
class TermOrder:
    """Monomial order on ``N^{2m+k}`` extended to free-module positions.

    ``block``: exponent indices whose total degree is compared first
    (elimination order).  ``position_first``: position-over-term instead of
    term-over-position.  ``priority``: positions from highest to lowest;
    unlisted positions rank below listed ones, lower index higher.
    """

    block: tuple[int, ...] = ()
    position_first: bool = False
    priority: tuple[int, ...] = ()

    @classmethod
    def grevlex(cls) -> "TermOrder":
        return cls()

    @classmethod
    def elimination(cls, block: Sequence[int]) -> "TermOrder":
        return cls(block=tuple(block))

    @classmethod
    def pot(cls, priority: Sequence[int] = (), block: Sequence[int] = ()) -> "TermOrder":
        return cls(block=tuple(block), position_first=True, priority=tuple(priority))

    @property
    def kind(self) -> str:
        if self.position_first:
            return "position-over-term"
        return "block-elimination" if self.block else "graded-reverse-lex"

    def term_key(self, e) -> tuple:
        if self.block:
            return (sum(e[i] for i in self.block), grevlex_key(e))
        return grevlex_key(e)

    def rank(self, pos: int) -> tuple:
        if pos in self.priority:
            return (1, -self.priority.index(pos))
        return (0, -pos)

    def key(self, mono) -> tuple:
        pos, e = mono
        if self.position_first:
            return (self.rank(pos), self.term_key(e))
        return (self.term_key(e), self.rank(pos))


GREVLEX = TermOrder()


# ---------------------------------------------------------------- engine

class _Ring:
    def __init__(self, m: int, nparams: int, order: TermOrder):
        self.m = m
        self.nparams = nparams
        self.order = order
        self._keys: dict = {}

    def key(self, mono):
        k = self._keys.get(mono)
        if k is None:
            k = self.order.key(mono)
            self._keys[mono] = k
        return k

    def lead(self, f: dict):
        return max(f, key=self.key)

    def left_mul(self, alpha, coeff, f: dict, out: dict | None = None, sign: int = 1) -> dict:
        """``out += sign * coeff * (monomial alpha) * f``."""
        m = self.m
        out = {} if out is None else out
        beta = alpha[m:2 * m]
        xa = alpha[:m]
        par = alpha[2 * m:]
        if not any(beta):
            for (pos, e), c in f.items():
                ne = tuple(a + b for a, b in zip(xa, e[:m])) + e[m:2 * m] + tuple(
                    a + b for a, b in zip(par, e[2 * m:]))
                key = (pos, ne)
                v = out.get(key, 0) + sign * coeff * c
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
            return out
        for (pos, e), c in f.items():
            cx, dx, pp = e[:m], e[m:2 * m], e[2 * m:]
            npar = tuple(a + b for a, b in zip(par, pp))
            choices = [_leibniz(beta[i], cx[i]) for i in range(m)]
            base = sign * coeff * c
            for combo in itertools.product(*choices):
                k = 1
                xs = []
                ds = []
                for i, (ki, ci) in enumerate(combo):
                    k *= ci
                    xs.append(xa[i] + cx[i] - ki)
                    ds.append(beta[i] + dx[i] - ki)
                key = (pos, tuple(xs) + tuple(ds) + npar)
                v = out.get(key, 0) + base * k
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return out


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _monic(f: dict, ring: _Ring) -> dict:
    lc = f[ring.lead(f)]
    if lc == 1:
        return f
    inv = 1 / lc
    return {k: v * inv for k, v in f.items()}


class _Basis:
    """Working set of monic polynomials with cached leading monomials."""

    def __init__(self, ring: _Ring):
        self.ring = ring
        self.polys: list[dict] = []
        self.leads: list = []
        self.alive: list[bool] = []

    def add(self, f: dict) -> int:
        self.polys.append(f)
        self.leads.append(self.ring.lead(f))
        self.alive.append(True)
        return len(self.polys) - 1

    def find_divisor(self, mono):
        pos, e = mono
        for i, (lp, le) in enumerate(self.leads):
            if self.alive[i] and lp == pos and _divides(le, e):
                return i
        return None


def _reduce(f: dict, basis: _Basis, full: bool = True) -> dict:
    ring = basis.ring
    f = dict(f)
    rem: dict = {}
    while f:
        lm = ring.lead(f)
        i = basis.find_divisor(lm)
        if i is None:
            if not full:
                rem.update(f)
                return rem
            rem[lm] = f.pop(lm)
            continue
        g = basis.polys[i]
        lp, le = basis.leads[i]
        alpha = tuple(a - b for a, b in zip(lm[1], le))
        ring.left_mul(alpha, f[lm], g, f, sign=-1)
    return rem


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _spoly(i: int, j: int, basis: _Basis) -> dict:
    ring = basis.ring
    (pi, ei), (pj, ej) = basis.leads[i], basis.leads[j]
    L = _lcm(ei, ej)
    out = ring.left_mul(tuple(a - b for a, b in zip(L, ei)), 1, basis.polys[i])
    ring.left_mul(tuple(a - b for a, b in zip(L, ej)), 1, basis.polys[j], out, sign=-1)
    return out


def buchberger(gens: Sequence[dict], ring: _Ring) -> list[dict]:
    """Reduced Gröbner basis of the left submodule generated by ``gens``."""
    basis = _Basis(ring)
    pending: set = set()
    heap: list = []

    def push_pairs(new: int):
        pn, en = basis.leads[new]
        for k in range(new):
            if not basis.alive[k]:
                continue
            pk, ek = basis.leads[k]
            if pk != pn:
                continue
            L = (pn, _lcm(en, ek))
            heapq.heappush(heap, (ring.key(L), k, new))
            pending.add((k, new))

    for g in gens:
        g = _reduce(g, basis)
        if g:
            push_pairs(basis.add(_monic(g, ring)))

    while heap:
        _, i, j = heapq.heappop(heap)
        pending.discard((i, j))
        pos = basis.leads[i][0]
        L = _lcm(basis.leads[i][1], basis.leads[j][1])
        skip = False
        for k, (pk, ek) in enumerate(basis.leads):
            if k in (i, j) or pk != pos or not _divides(ek, L):
                continue
            if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                skip = True
                break
        if skip:
            continue
        h = _reduce(_spoly(i, j, basis), basis)
        if h:
            push_pairs(basis.add(_monic(h, ring)))

    # leading monomials are pairwise distinct, keep the divisibility-minimal ones
    keep = []
    for i, (pi, ei) in enumerate(basis.leads):
        if not any(j != i and pj == pi and _divides(ej, ei) for j, (pj, ej) in enumerate(basis.leads)):
            keep.append(i)
    final = _Basis(ring)
    for i in keep:
        final.add(basis.polys[i])
    out = []
    for n in range(len(final.polys)):
        final.alive[n] = False
        r = _reduce(final.polys[n], final)
        final.alive[n] = True
        r = _monic(r, ring)
        final.polys[n] = r
        out.append(r)
    out.sort(key=lambda f: ring.key(ring.lead(f)))
    return out


# ---------------------------------------------------------------- public API

def _to_poly(P: WeylElement, pos: int = 0) -> dict:
    return {(pos, e): c for e, c in P.terms.items()}


def _from_poly(f: dict, m: int, nparams: int, rank: int | None = None):
    if rank is None:
        return WeylElement(m, {e: c for (_, e), c in f.items()}, nparams)
    comps = [dict() for _ in range(rank)]
    for (pos, e), c in f.items():
        comps[pos][e] = c
    return tuple(WeylElement(m, comp, nparams) for comp in comps)


class GroebnerBasis:
    """A reduced Gröbner basis together with the order and ring it lives in."""

    def __init__(self, polys: list[dict], m: int, nparams: int, order: TermOrder, rank: int | None):
        self.polys = polys
        self.m = m
        self.nparams = nparams
        self.order = order
        self.rank = rank
        self._ring = _Ring(m, nparams, order)
        self._basis = _Basis(self._ring)
        for f in polys:
            self._basis.add(f)

    @property
    def elements(self):
        return [_from_poly(f, self.m, self.nparams, self.rank) for f in self.polys]

    def leading_monomials(self):
        return list(self._basis.leads)

    def reduce_poly(self, f: dict) -> dict:
        return _reduce(f, self._basis)

    def __len__(self):
        return len(self.polys)


def _check_elem(P: WeylElement, m: int, nparams: int):
    if not isinstance(P, WeylElement):
        raise TypeError(f"expected WeylElement, got {type(P).__name__}")
    if P.m != m or P.nparams != nparams:
        raise DimensionMismatch(f"element lives in m={P.m}, expected m={m}")


class LeftIdeal:
    """Left ideal of the Weyl algebra with a lazily computed reduced GB."""

    def __init__(self, generators: Sequence[WeylElement], order: TermOrder = GREVLEX,
                 m: int | None = None, nparams: int | None = None):
        gens = list(generators)
        if m is None:
            if not gens:
                raise ValueError("cannot infer m for an empty ideal")
            m = gens[0].m
        if nparams is None:
            nparams = gens[0].nparams if gens else 0
        for g in gens:
            _check_elem(g, m, nparams)
        self.m = m
        self.nparams = nparams
        self.generators = [g for g in gens if g]
        self.order = order
        self.status: str | None = None
        self._gb: GroebnerBasis | None = None

    @property
    def gb(self) -> GroebnerBasis:
        if self._gb is None:
            ring = _Ring(self.m, self.nparams, self.order)
            polys = buchberger([_to_poly(g) for g in self.generators], ring)
            self._gb = GroebnerBasis(polys, self.m, self.nparams, self.order, None)
        return self._gb

    def gb_elements(self) -> list[WeylElement]:
        return self.gb.elements

    def reduce(self, P: WeylElement) -> WeylElement:
        _check_elem(P, self.m, self.nparams)
        return _from_poly(self.gb.reduce_poly(_to_poly(P)), self.m, self.nparams)

    def contains(self, P: WeylElement) -> bool:
        return not self.reduce(P)

    __contains__ = contains

    def is_subset(self, other: "LeftIdeal") -> bool:
        return all(other.contains(g) for g in self.generators)

    def equals(self, other: "LeftIdeal") -> bool:
        return self.is_subset(other) and other.is_subset(self)

    def is_unit(self) -> bool:
        return any(not any(e) for f in self.gb.polys for (_, e) in f)

    def with_order(self, order: TermOrder) -> "LeftIdeal":
        return LeftIdeal(self.generators, order, self.m, self.nparams)

    def __repr__(self):
        return f"LeftIdeal({[str(g) for g in self.generators]})"


class FreeSubmodule:
    """Left submodule of ``D^rank`` generated by vectors of Weyl elements."""

    def __init__(self, rank: int, generators: Sequence[Sequence[WeylElement]], m: int,
                 order: TermOrder = GREVLEX):
        self.rank = rank
        self.m = m
        self.order = order
        gens = []
        for v in generators:
            v = tuple(v)
            if len(v) != rank:
                raise DimensionMismatch(f"vector of length {len(v)} in rank-{rank} module")
            for c in v:
                _check_elem(c, m, 0)
            if any(v):
                gens.append(v)
        self.generators = gens
        self._gb: GroebnerBasis | None = None

    @staticmethod
    def vector_to_poly(vec: Sequence[WeylElement]) -> dict:
        out = {}
        for pos, c in enumerate(vec):
            for e, v in c.terms.items():
                out[(pos, e)] = v
        return out

    @property
    def gb(self) -> GroebnerBasis:
        if self._gb is None:
            ring = _Ring(self.m, 0, self.order)
            polys = buchberger([self.vector_to_poly(v) for v in self.generators], ring)
            self._gb = GroebnerBasis(polys, self.m, 0, self.order, self.rank)
        return self._gb

    def reduce(self, vec: Sequence[WeylElement]) -> tuple:
        vec = tuple(vec)
        if len(vec) != self.rank:
            raise DimensionMismatch(f"vector of length {len(vec)} in rank-{self.rank} module")
        return _from_poly(self.gb.reduce_poly(self.vector_to_poly(vec)), self.m, 0, self.rank)

    def contains(self, vec: Sequence[WeylElement]) -> bool:
        return not any(self.reduce(vec))

    def with_order(self, order: TermOrder) -> "FreeSubmodule":
        return FreeSubmodule(self.rank, self.generators, self.m, order)


def groebner(I):
    """Populate and return the Gröbner basis cache of an ideal or submodule."""
    I.gb
    return I


def reduce(P, gb: GroebnerBasis, order: TermOrder | None = None):
    """Normal form of an element or vector modulo a computed basis (or an ideal)."""
    if isinstance(gb, (LeftIdeal, FreeSubmodule)):
        gb = gb.gb
    if order is not None and order != gb.order:
        raise OrderMismatch(f"basis computed for {gb.order.kind}, got {order.kind}")
    if gb.rank is None:
        _check_elem(P, gb.m, gb.nparams)
        return _from_poly(gb.reduce_poly(_to_poly(P)), gb.m, gb.nparams)
    vec = tuple(P)
    if len(vec) != gb.rank:
        raise DimensionMismatch(f"vector of length {len(vec)} in rank-{gb.rank} module")
    return _from_poly(gb.reduce_poly(FreeSubmodule.vector_to_poly(vec)), gb.m, 0, gb.rank)


def ideal_intersection(I: LeftIdeal, J: LeftIdeal) -> LeftIdeal:
    """``I ∩ J`` via ``(t I + (1-t) J) ∩ D`` with a central parameter ``t``."""
    if I.m != J.m or I.nparams or J.nparams:
        raise DimensionMismatch("ideals must live in the same Weyl algebra")
    m = I.m
    t = WeylElement.t(m, 0, 1)
    one = WeylElement.constant(m, 1, 1)
    gens = [t * g.with_params(1) for g in I.generators]
    gens += [(one - t) * g.with_params(1) for g in J.generators]
    order = TermOrder.elimination((2 * m,))
    big = LeftIdeal(gens, order, m, 1)
    out = [g.drop_params() for g in big.gb.elements if not any(e[2 * m] for e in g.terms)]
    return LeftIdeal(out, I.order, m)


def mpq_vector(vals) -> list:
    return [mpq(v) for v in vals]
