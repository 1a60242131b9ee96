"""Canonical presentation of the characteristic module ``M_K``.

Generators ``g_σ`` are the cells of ``K`` in ``(dim, id)`` order.  Each cell
contributes ``m`` relations:

* one Stokes relation ``d_v g_σ + Σ_i ℓ_i(v) g_{σ_i}`` per basis vector ``v``
  of the direction lattice of ``σ`` (``ℓ_i`` the outward lattice functional of
  the facet ``σ_i``);
* one vanishing relation ``(<N, x> - c) g_σ`` per integer equation of the
  affine hull of ``σ``.

Coefficients are integers because facet measures are lattice-normalised.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import linalg as la
from .errors import (
    ConstructionFailed,
    HullConditionViolated,
    NotASubcomplex,
    NotClosed,
    NotInComplex,
)
from .geometry import Cell, CellComplex
from .groebner import GREVLEX, FreeSubmodule, LeftIdeal, TermOrder
from .weyl import WeylElement, parse

Relation = tuple  # tuple of WeylElement, one entry per generator


@dataclass(frozen=True, eq=False)
class Presentation:
    m: int
    generators: tuple[str, ...]
    relations: tuple[Relation, ...]
    labels: tuple[str, ...] = ()

    @cached_property
    def index(self) -> dict:
        return {g: i for i, g in enumerate(self.generators)}

    @property
    def rank(self) -> int:
        return len(self.generators)

    @cached_property
    def submodule(self) -> FreeSubmodule:
        return FreeSubmodule(self.rank, self.relations, self.m, GREVLEX)

    def unit(self, gid: str, coeff: WeylElement | None = None) -> Relation:
        """The vector ``coeff * g_gid``."""
        if gid not in self.index:
            raise NotInComplex(gid)
        vec = [WeylElement(self.m)] * self.rank
        vec[self.index[gid]] = coeff if coeff is not None else WeylElement.constant(self.m)
        return tuple(vec)

    def normal_form(self, vec: Sequence[WeylElement]) -> tuple:
        return self.submodule.reduce(vec)

    def relation_dicts(self) -> list[dict]:
        return [{g: c for g, c in zip(self.generators, rel) if c} for rel in self.relations]

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "generators": list(self.generators),
            "relations": [{g: c.to_text() for g, c in d.items()} for d in self.relation_dicts()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Presentation":
        m = data["m"]
        gens = tuple(data["generators"])
        rels = []
        for d in data["relations"]:
            rels.append(tuple(parse(d[g], m) if g in d else WeylElement(m) for g in gens))
        return cls(m, gens, tuple(rels))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


@dataclass(frozen=True)
class SkeletonFiltration:
    levels: tuple[tuple[str, ...], ...]


# ---------------------------------------------------------------- relations

def _stokes_relations(K: CellComplex, cell: Cell):
    """Type (i): yields ``(v, {gid: coeff})`` for each lattice basis vector."""
    m = K.ambient_dim
    facets = [(K.facet_cell_id(f), f.functional) for f in K.facets_in(cell.id)]
    for j, v in enumerate(cell.lattice_basis):
        entries = {cell.id: WeylElement.directional(v)}
        for fid, func in facets:
            if func[j]:
                entries[fid] = WeylElement.constant(m, func[j])
        yield v, entries


def _hull_relations(K: CellComplex, cell: Cell):
    for h in cell.hull_equations:
        yield h, {cell.id: WeylElement.linear_form(h.normal, -h.offset)}


def _require_closed(K: CellComplex):
    missing = K.missing_facets()
    if missing:
        cid, f = missing[0]
        raise NotClosed(f"facet {f.id} of {cid} is not in the complex")


def standard_relations(K: CellComplex) -> list[dict]:
    """All ``m * c`` standard relations as ``{generator: coefficient}`` dicts."""
    _require_closed(K)
    rels = []
    for cell in K.ordered:
        rels.extend(d for _, d in _stokes_relations(K, cell))
        rels.extend(d for _, d in _hull_relations(K, cell))
    return rels


def presentation(K: CellComplex) -> Presentation:
    _require_closed(K)
    m = K.ambient_dim
    gens = tuple(c.id for c in K.ordered)
    idx = {g: i for i, g in enumerate(gens)}
    rels, labels = [], []
    for cell in K.ordered:
        for j, (v, d) in enumerate(_stokes_relations(K, cell)):
            rels.append(_dense(d, idx, m))
            labels.append(f"stokes:{cell.id}:{j}")
        for j, (h, d) in enumerate(_hull_relations(K, cell)):
            rels.append(_dense(d, idx, m))
            labels.append(f"hull:{cell.id}:{j}")
    assert len(rels) == m * len(gens)
    return Presentation(m, gens, tuple(rels), tuple(labels))


def _dense(d: dict, idx: dict, m: int) -> Relation:
    vec = [WeylElement(m)] * len(idx)
    for g, c in d.items():
        vec[idx[g]] = vec[idx[g]] + c
    return tuple(vec)


def skeleton_filtration(K: CellComplex) -> SkeletonFiltration:
    levels = []
    for i in range(K.ambient_dim + 1):
        levels.append(tuple(c.id for c in K.ordered if c.dim <= i))
    return SkeletonFiltration(tuple(levels))


# ---------------------------------------------------------------- regions

def region_cells(K: CellComplex, region=None) -> list[str]:
    """Normalise a region argument to a list of cell ids (default: top cells)."""
    if region is None:
        return K.top_cells()
    if isinstance(region, str):
        region = [region]
    ids = list(region)
    for cid in ids:
        K.cell(cid)
    return ids


def closure_ids(K: CellComplex, ids: Iterable[str]) -> list[str]:
    keys = set()
    for cid in ids:
        keys |= K.cell(cid).face_keys
    return [c.id for c in K.ordered if c.key in keys]


SUM_GENERATOR = "__region__"


def region_presentation(K: CellComplex, region=None) -> tuple[Presentation, str]:
    """Presentation of the closure of a region and the generator standing for it.

    A region made of several cells gets an extra generator ``e`` with the
    relation ``e - Σ g_i``.
    """
    ids = region_cells(K, region)
    sub = K.subcomplex(closure_ids(K, ids))
    pres = presentation(sub)
    if len(ids) == 1:
        return pres, ids[0]
    m = pres.m
    gens = pres.generators + (SUM_GENERATOR,)
    zero = WeylElement(m)
    rels = [rel + (zero,) for rel in pres.relations]
    extra = [zero] * len(gens)
    extra[-1] = WeylElement.constant(m)
    for cid in ids:
        extra[gens.index(cid)] = WeylElement.constant(m, -1)
    rels.append(tuple(extra))
    return Presentation(m, gens, tuple(rels), pres.labels + ("region",)), SUM_GENERATOR


@dataclass
class _ModuleCache:
    store: dict = field(default_factory=dict)


_CACHE = _ModuleCache()


def annihilator_of(pres: Presentation, target: str) -> LeftIdeal:
    """Annihilator of the class of ``g_target`` in a presented module."""
    t = pres.index[target]
    # every other generator outranks the target, higher index first
    priority = [i for i in reversed(range(pres.rank)) if i != t] + [t]
    order = TermOrder.pot(priority)
    mod = FreeSubmodule(pres.rank, pres.relations, pres.m, order)
    gens = []
    for vec in mod.gb.elements:
        if all(not c for i, c in enumerate(vec) if i != t):
            gens.append(vec[t])
    return LeftIdeal(gens, GREVLEX, pres.m)


def annihilator_by_elimination(K: CellComplex, region=None) -> LeftIdeal:
    """``{P : P g_σ ∈ relations}`` from a position-over-term module basis."""
    pres, target = region_presentation(K, region)
    return annihilator_of(pres, target)


def _membership_module(K: CellComplex, region):
    key = (id(K), tuple(region_cells(K, region)))
    hit = _CACHE.store.get(key)
    if hit is None or hit[0] is not K:
        pres, target = region_presentation(K, region)
        hit = (K, pres, target)
        _CACHE.store[key] = hit
    return hit[1], hit[2]


def is_annihilating(P: WeylElement, K: CellComplex, region=None) -> bool:
    pres, target = _membership_module(K, region)
    return not any(pres.normal_form(pres.unit(target, P)))


# ---------------------------------------------------------------- facet extraction

def _contained_hull(a: Cell, b: Cell) -> bool:
    """``H_a ⊆ H_b``."""
    for h in b.hull_equations:
        if h.value(a.vertices[0]) != h.offset:
            return False
        if any(la.dot(h.normal, v) for v in a.direction_vectors):
            return False
    return True


def check_hull_condition(sigma: Cell):
    """Raise unless ``H_α ⊆ H_β`` implies ``α`` is a face of ``β`` for all faces."""
    faces = sigma.faces
    for a in faces:
        for b in faces:
            if a is b or a.dim > b.dim:
                continue
            if _contained_hull(a, b) and a.key not in b.face_keys:
                raise HullConditionViolated(f"H({a.id}) ⊆ H({b.id}) but {a.id} is not a face of {b.id}")


def _proportional(u: tuple, v: tuple):
    """Return ``c`` with ``u = c v`` (v nonzero) or None."""
    ratio = None
    for a, b in zip(u, v):
        if not b:
            if a:
                return None
            continue
        terms_b = b.terms
        terms_a = a.terms
        if set(terms_a) != set(terms_b):
            return None
        for e, cb in terms_b.items():
            r = terms_a[e] / cb
            if ratio is None:
                ratio = r
            elif r != ratio:
                return None
    return ratio


def facet_extraction_operator(K: CellComplex, tau: str, sigma: str | None = None,
                              cap: int | None = None) -> tuple[WeylElement, Fraction]:
    """Operator ``P`` with ``P g_σ ≡ c g_τ`` for a facet ``τ`` of ``σ``.

    ``P = (ℓ-d)^j ∏_c (ℓ-c)^k ∏_α d_α``: derivatives along the edge
    directions of ``σ`` not parallel to ``H_τ`` push ``δ_σ`` onto its
    boundary, and powers of the affine form ``ℓ`` cutting out ``H_τ``
    (shifted to each other vertex level ``c``) kill every stray term.
    """
    sig = K.cell(sigma) if sigma is not None else max(K.cells, key=lambda c: (c.dim, c.id))
    tcell = K.cell(tau)
    fd = next((f for f in sig.facets if f.cell.key == tcell.key), None)
    if fd is None:
        raise NotInComplex(f"{tau} is not a facet of {sig.id}")
    check_hull_condition(sig)
    m = K.ambient_dim
    pres, _ = region_presentation(K, sig.id)
    normal = list(fd.halfspace.normal)
    d = fd.halfspace.offset
    lead = next(v for v in normal if v)
    if lead < 0:
        normal = [-v for v in normal]
        d = -d
    ell = lambda c: WeylElement.linear_form(normal, -c)
    levels = sorted({la.dot(normal, v) for v in sig.vertices} - {d})
    # distinct edge directions leaving H_τ
    dirs = []
    for e in sig.faces:
        if e.dim != 1:
            continue
        if e.vertices and len(e.vertices) == 2:
            vec = [a - b for a, b in zip(e.vertices[1], e.vertices[0])]
        else:
            vec = list(e.rays[0] if e.rays else e.lineality[0])
        if la.dot(normal, vec) == 0:
            continue
        prim = la.primitive(vec)
        if prim not in dirs and tuple(-x for x in prim) not in dirs:
            dirs.append(prim)
    base = WeylElement.constant(m)
    for v in dirs:
        base = WeylElement.directional(v) * base
    target = pres.normal_form(pres.unit(tcell.id))
    if not any(target):
        raise ConstructionFailed(f"g_{tau} is zero in the presented module")
    if cap is None:
        cap = 4 * max(1, len(dirs))
    kmin = 1 if levels else 0
    for total in range(kmin, 2 * cap + 1):
        for k in range(kmin, min(total, cap) + 1):
            j = total - k
            if j > cap or (not levels and k):
                continue
            P = base
            for c in levels:
                P = ell(c) ** k * P
            P = ell(d) ** j * P
            nf = pres.normal_form(pres.unit(sig.id, P))
            c = _proportional(nf, target)
            if c is not None and c != 0:
                return P, Fraction(int(c.numerator), int(c.denominator))
    raise ConstructionFailed(f"no extraction operator for {tau} within degree cap {cap}")


def compose_extraction(K: CellComplex, chain: Sequence[str]) -> tuple[WeylElement, Fraction]:
    """Compose extraction operators along ``σ = chain[0] ⊃ chain[1] ⊃ ...``.

    Works in the presentation of the closure of ``chain[0]``.
    """
    P = WeylElement.constant(K.ambient_dim)
    c = Fraction(1)
    for parent, child in zip(chain, chain[1:]):
        sub = K.subcomplex(closure_ids(K, [parent]))
        Q, cq = facet_extraction_operator(sub, child, parent)
        P = Q * P
        c *= cq
    return P, c


# ---------------------------------------------------------------- gluing

def _rel_key(d: dict) -> tuple:
    return tuple(sorted((g, c.to_text()) for g, c in d.items()))


def glue(P1: Presentation, P2: Presentation, F: Presentation) -> Presentation:
    """Amalgamate two presentations along a shared closed subcomplex."""
    if P1.m != P2.m or (F.generators and F.m != P1.m):
        raise NotASubcomplex("presentations live in different Weyl algebras")
    f_rels = {_rel_key(d) for d in F.relation_dicts()}
    for P in (P1, P2):
        if not set(F.generators) <= set(P.generators):
            raise NotASubcomplex("shared generators missing from a summand")
        own = {_rel_key(d) for d in P.relation_dicts()}
        if not f_rels <= own:
            raise NotASubcomplex("relations of the shared part differ")
    gens = list(P1.generators) + [g for g in P2.generators if g not in P1.generators]
    idx = {g: i for i, g in enumerate(gens)}
    seen = set()
    rels, labels = [], []
    for P in (P1, P2):
        labs = P.labels or ("",) * len(P.relations)
        for d, lab in zip(P.relation_dicts(), labs):
            key = _rel_key(d)
            if key in seen:
                continue
            seen.add(key)
            rels.append(_dense(d, idx, P1.m))
            labels.append(lab)
    return Presentation(P1.m, tuple(gens), tuple(rels), tuple(labels))


def same_presentation(A: Presentation, B: Presentation) -> bool:
    """Equal up to generator and relation reordering."""
    if A.m != B.m or set(A.generators) != set(B.generators):
        return False
    ka = sorted(_rel_key(d) for d in A.relation_dicts())
    kb = sorted(_rel_key(d) for d in B.relation_dicts())
    return ka == kb
