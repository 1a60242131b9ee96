"""Annihilator ideals of characteristic distributions.

Three routes:

* orthants and simple cones: closed form ``<y_i d_{y_i}>`` transported by an
  affine change of coordinates;
* general pointed cones at the origin: solve the Laplace-transformed Stokes
  relations for the rational function ``Lδ``, find its annihilator by a
  bounded linear ansatz, and transform back;
* polytopes: intersect the annihilators of all vertex cones.

Laplace convention: ``Lf(ξ) = ∫ e^{-<ξ,x>} f``, under which ``d_v`` becomes
multiplication by ``<v,ξ>`` and ``x_i`` becomes ``-d_i``.  Its inverse is the
Fourier map ``x -> d, d -> -x`` so ``Ann(δ) = fourier(Ann(Lδ))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from . import linalg as la
from .errors import Inconsistent, NoVertices, NotSimple
from .geometry import Cell, CellComplex, Cone, build_complex, cone_at, translate
from .groebner import GREVLEX, LeftIdeal, ideal_intersection
from .presentation import (
    annihilator_by_elimination,
    closure_ids,
    is_annihilating,
    region_cells,
)
from .ratfunc import RationalFunction, apply_to_rational, eliminate_linear, fraction_field
from .weyl import WeylElement, fourier, linear_substitution


@dataclass(frozen=True)
class AnsatzBounds:
    max_order: int = 3
    max_coeff_degree: int = 3

    def __post_init__(self):
        if self.max_order < 0 or self.max_coeff_degree < 0:
            raise ValueError("ansatz bounds must be nonnegative")

    @classmethod
    def parse(cls, text: str) -> "AnsatzBounds":
        k, d = (int(v) for v in text.split(","))
        return cls(k, d)


DEFAULT_BOUNDS = AnsatzBounds()


def orthant_annihilator(n: int) -> LeftIdeal:
    if n < 1:
        raise ValueError("orthant dimension must be positive")
    gens = [WeylElement.x(n, i) * WeylElement.d(n, i) for i in range(n)]
    return LeftIdeal(gens, GREVLEX, n)


def _as_cone(C) -> Cone:
    if isinstance(C, Cone):
        return C
    if isinstance(C, Cell):
        if len(C.vertices) != 1:
            raise NotSimple(f"{C.id} is not a pointed cone")
        return Cone(C.vertices[0], C)
    raise TypeError(f"expected a Cone or Cell, got {type(C).__name__}")


def simple_cone_annihilator(C) -> LeftIdeal:
    """Annihilator of a simple cone via an affine image of the orthant."""
    cone = _as_cone(C)
    cell = cone.cell
    m = cell.ambient_dim
    rays = list(cell.rays)
    if cell.lineality or len(rays) != cell.dim or (rays and la.rank(rays) != len(rays)):
        raise NotSimple(f"{cell.id} is not simple")
    k = len(rays)
    # complete the rays by the hull normals to a basis of R^m
    normals = [h.normal for h in cell.hull_equations]
    R = la.transpose([list(r) for r in rays] + [list(n) for n in normals])  # columns
    # y-coordinates: x = apex + R y
    gens = []
    for i in range(k):
        gens.append(WeylElement.x(m, i) * WeylElement.d(m, i))
    for j in range(k, m):
        gens.append(WeylElement.x(m, j))
    Rinv = la.inverse(R)
    shift = [-v for v in la.matvec(Rinv, cone.apex)]
    out = [linear_substitution(g, Rinv, shift).normalized() for g in gens]
    return LeftIdeal(out, GREVLEX, m)


# ---------------------------------------------------------------- Laplace

def _cone_complex(C, region=None) -> tuple[CellComplex, list[str], tuple]:
    """Normalise to ``(complex, region ids, apex)``."""
    if isinstance(C, CellComplex):
        ids = region_cells(C, region)
        sub = C.subcomplex(closure_ids(C, ids))
        verts = [c for c in sub.cells if c.dim == 0]
        if len(verts) != 1:
            raise Inconsistent("cone complex must have exactly one vertex (its apex)")
        return sub, ids, verts[0].vertices[0]
    cone = _as_cone(C)
    K = build_complex([cone.cell], generate_faces=True)
    return K, [cone.cell.id], tuple(cone.apex)


def cone_laplace_transform(C, region=None) -> RationalFunction:
    """Laplace transform of ``δ`` for a pointed cone with apex at the origin.

    Accepts a ``Cone``, a cone ``Cell``, or a ``CellComplex`` whose region
    (default: top cells) is a union of cones with common apex.
    """
    K, ids, apex = _cone_complex(C, region)
    if any(apex):
        raise Inconsistent("apex must be at the origin; translate first")
    m = K.ambient_dim
    _, xs = fraction_field(m)
    eqs = []
    for cell in K.ordered:
        if cell.dim == 0:
            eqs.append(({cell.id: 1}, 1))
            continue
        facets = [(K.facet_cell_id(f), f.functional) for f in K.facets_in(cell.id)]
        for j, v in enumerate(cell.lattice_basis):
            coeffs = {cell.id: sum((c * x for c, x in zip(v, xs)), 0 * xs[0])}
            for fid, func in facets:
                if func[j]:
                    coeffs[fid] = coeffs.get(fid, 0) + func[j]
            eqs.append((coeffs, 0))
    if len(ids) == 1:
        return eliminate_linear(eqs, ids[0], m)
    key = "__region__"
    total = {key: 1}
    for cid in ids:
        total[cid] = -1
    eqs.append((total, 0))
    return eliminate_linear(eqs, key, m)


# ---------------------------------------------------------------- ansatz

def _monomials(n: int, max_deg: int):
    out = []
    for deg in range(max_deg + 1):
        for combo in itertools.combinations_with_replacement(range(n), deg):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def annihilating_operators(f: RationalFunction, bounds: AnsatzBounds) -> list[WeylElement]:
    """Basis of all operators within ``bounds`` that kill ``f``."""
    m = f.m
    K, xs = fraction_field(m)
    D = f.denominator
    clear = D ** (bounds.max_order + 1)
    a_list = _monomials(m, bounds.max_coeff_degree)
    b_list = _monomials(m, bounds.max_order)
    # derivative images, cleared of denominators
    cleared = {}
    deriv = {(0,) * m: f.value}
    for b in b_list:
        if b not in deriv:
            i = next(k for k, v in enumerate(b) if v)
            prev = list(b)
            prev[i] -= 1
            deriv[b] = deriv[tuple(prev)].diff(xs[i])
        val = deriv[b] * K(clear)
        if val.denom != 1:
            val_den = val.denom
            if val_den.is_ground:
                val = K(val.numer.mul_ground(1 / val_den.LC))
            else:
                raise AssertionError("denominator clearing failed")
        cleared[b] = val.numer
    columns = []
    col_rows = []
    rows: dict = {}
    for a in a_list:
        for b in b_list:
            poly = cleared[b]
            entries = {}
            for mono, c in poly.terms():
                key = tuple(p + q for p, q in zip(mono, a))
                r = rows.setdefault(key, len(rows))
                entries[r] = c
            columns.append((a, b))
            col_rows.append(entries)
    n = len(columns)
    uf = _UnionFind(n)
    owner: dict = {}
    for j, entries in enumerate(col_rows):
        for r in entries:
            if r in owner:
                uf.union(owner[r], j)
            else:
                owner[r] = j
    comps: dict = {}
    for j in range(n):
        comps.setdefault(uf.find(j), []).append(j)
    ops = []
    for cols in comps.values():
        used_rows = sorted({r for j in cols for r in col_rows[j]})
        if not used_rows:
            for j in cols:
                ops.append({columns[j]: 1})
            continue
        rix = {r: i for i, r in enumerate(used_rows)}
        data: dict = {}
        for k, j in enumerate(cols):
            for r, c in col_rows[j].items():
                data.setdefault(rix[r], {})[k] = QQ(c)
        M = DomainMatrix(data, (len(used_rows), len(cols)), QQ)
        ns = M.nullspace().to_list()
        for vec in ns:
            ops.append({columns[cols[k]]: v for k, v in enumerate(vec) if v})
    out = []
    for op in ops:
        terms = {tuple(a) + tuple(b): Fraction(int(v.numerator), int(v.denominator)) for (a, b), v in op.items()}
        out.append(WeylElement(m, terms).normalized())
    out.sort(key=lambda g: (g.order, g.x_degree, len(g.terms), g.to_text()))
    return out


def rational_annihilator(f: RationalFunction, bounds: AnsatzBounds = DEFAULT_BOUNDS) -> LeftIdeal:
    """Left ideal generated by every annihilating operator within ``bounds``.

    A minimal generating subset is selected greedily: candidates in increasing
    (order, degree) are added only if not already in the ideal so far.
    """
    m = f.m
    gens: list[WeylElement] = []
    ideal = LeftIdeal([], GREVLEX, m)
    for g in annihilating_operators(f, bounds):
        assert apply_to_rational(g, f).is_zero()
        if gens and ideal.contains(g):
            continue
        gens.append(g)
        ideal = LeftIdeal(gens, GREVLEX, m)
    return ideal


def cone_annihilator(C, bounds: AnsatzBounds = DEFAULT_BOUNDS, region=None) -> LeftIdeal:
    """Fourier transform of the ansatz annihilator of the Laplace transform.

    The apex may be anywhere; the computation is done at the origin and
    translated back.  ``ideal.status`` records whether the result was
    confirmed equal to the elimination annihilator.
    """
    K, ids, apex = _cone_complex(C, region)
    m = K.ambient_dim
    if any(apex):
        K0 = build_complex([translate(c, [-v for v in apex]) for c in K.cells], validate=False)
    else:
        K0 = K
    L = cone_laplace_transform(K0, ids)
    ann_L = rational_annihilator(L, bounds)
    gens = [fourier(g).normalized() for g in ann_L.generators]
    if any(apex):
        eye = [[int(i == j) for j in range(m)] for i in range(m)]
        gens = [linear_substitution(g, eye, [-v for v in apex]).normalized() for g in gens]
    for g in gens:
        if not is_annihilating(g, K, ids):
            raise AssertionError(f"generator {g} does not annihilate the cone")
    ideal = LeftIdeal(gens, GREVLEX, m)
    exact = annihilator_by_elimination(K, ids)
    ideal.status = "equal to elimination annihilator" if exact.is_subset(ideal) else "verified sub-ideal"
    return ideal


def _is_simple(cone: Cone) -> bool:
    cell = cone.cell
    rays = list(cell.rays)
    return not cell.lineality and len(rays) == cell.dim and (not rays or la.rank(rays) == len(rays))


def vertex_cone_annihilators(sigma: Cell, bounds: AnsatzBounds = DEFAULT_BOUNDS) -> list[LeftIdeal]:
    if not sigma.vertices or sigma.lineality:
        raise NoVertices(f"{sigma.id} has no vertices")
    out = []
    for p in sigma.vertices:
        cone = cone_at(sigma, p)
        if _is_simple(cone):
            out.append(simple_cone_annihilator(cone))
        else:
            out.append(cone_annihilator(cone, bounds))
    return out


def polytope_annihilator(sigma: Cell, bounds: AnsatzBounds = DEFAULT_BOUNDS) -> LeftIdeal:
    """``∩_p Ann(δ_{C_p})`` over all vertices ``p`` of ``σ``."""
    ideals = vertex_cone_annihilators(sigma, bounds)
    result = ideals[0]
    for J in ideals[1:]:
        result = ideal_intersection(result, J)
    K = build_complex([sigma], generate_faces=True)
    gens = [g.normalized() for g in result.gb_elements()]
    for g in gens:
        if not is_annihilating(g, K, sigma.id):
            raise AssertionError(f"generator {g} does not annihilate {sigma.id}")
    return LeftIdeal(gens, GREVLEX, sigma.ambient_dim)


def _bounded_part(I: LeftIdeal, order: int, degree: int, beta=None) -> list[WeylElement]:
    """Basis of ``I ∩ V``, ``V`` spanned by ``x^a d^b`` with ``|a| <= degree``,
    ``|b| <= order`` (and ``b = beta`` if given), in reduced echelon form."""
    m = I.m
    a_list = _monomials(m, degree)
    b_list = [beta] if beta is not None else _monomials(m, order)
    cols = [tuple(a) + tuple(b) for a in a_list for b in b_list]
    # leading columns first so echelon rows have distinct, large leading terms
    from .weyl import grevlex_key
    cols.sort(key=grevlex_key, reverse=True)
    rows: dict = {}
    data: dict = {}
    for j, e in enumerate(cols):
        nf = I.reduce(WeylElement(m, {e: 1}))
        for te, c in nf.terms.items():
            r = rows.setdefault(te, len(rows))
            data.setdefault(r, {})[j] = QQ(int(c.numerator), int(c.denominator))
    if not rows:
        ns = [[QQ(int(i == j)) for j in range(len(cols))] for i in range(len(cols))]
    else:
        ns = DomainMatrix(data, (len(rows), len(cols)), QQ).nullspace().to_list()
    out = []
    for vec in ns:
        terms = {cols[j]: Fraction(int(v.numerator), int(v.denominator)) for j, v in enumerate(vec) if v}
        out.append(WeylElement(m, terms).normalized())
    return out


def _d_support(g: WeylElement) -> int:
    m = g.m
    return len({e[m:] for e in g.terms})


def minimal_generators(I: LeftIdeal) -> list[WeylElement]:
    """Small, readable generating set of ``I``.

    Candidates are elements of ``I`` of bounded order and degree, preferring
    those involving a single derivative monomial; they are added greedily
    until they generate ``I``.
    """
    gb = [g.normalized() for g in I.gb_elements()]
    if not gb:
        return []
    m = I.m
    order = max(g.order for g in gb)
    degree = max(g.x_degree for g in gb)
    cands = set(gb)
    # grow the degree so each level contributes its lowest-degree elements
    for deg in range(degree + 1):
        for beta in _monomials(m, order):
            cands.update(_bounded_part(I, order, deg, beta))
    cands.update(_bounded_part(I, order, degree))
    ranked = sorted(cands, key=lambda g: (_d_support(g), g.order + g.x_degree, len(g.terms), g.to_text()))
    chosen: list[WeylElement] = []
    current = LeftIdeal([], GREVLEX, m)
    for g in ranked:
        if chosen and current.contains(g):
            continue
        chosen.append(g)
        current = LeftIdeal(chosen, GREVLEX, m)
        if all(current.contains(h) for h in gb):
            break
    # drop any generator implied by the others
    changed = True
    while changed and len(chosen) > 1:
        changed = False
        for i in range(len(chosen) - 1, -1, -1):
            rest = chosen[:i] + chosen[i + 1:]
            if LeftIdeal(rest, GREVLEX, m).contains(chosen[i]):
                chosen = rest
                changed = True
                break
    return chosen
