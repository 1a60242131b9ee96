"""Zeroth direct image of ``M_K`` under the projection onto the first ``s`` coordinates.

Per cell ``σ`` with fiber dimension ``v`` and image dimension ``p``, using a
lattice basis of ``Λ_σ`` whose first ``v`` vectors ``w_t`` span the kernel of
the projection and whose remaining vectors ``u`` complete it:

(i)   ``d_{π(u)} g_σ + Σ_i ℓ_i(u) g_i``                 one per ``u``
(ii)  ``Σ_i ℓ_i(w) g_i``                                one per ``w_t``
(iii) ``v g_σ - Σ_i (d_i - G_i(y)) g_i``                if ``v > 0``
(iv)  ``(<n, y> - c) g_σ``                              per equation of ``π(H_σ)``

``G_i`` is the affine function of ``y`` that agrees on ``H_σ`` with
``<N_i, x> - Σ_t ℓ_i(w_t) a_t(x)``, ``a_t`` a rational dual basis of the
``w_t``; for a full-dimensional cell this is ``Σ_{j<=s} N_ij y_j``.
Relation (iii) comes from summing ``d_{w_t}(a_t(x) δ_σ) = 0`` over ``t``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .errors import BadProjection, NonGenericSample
from .geometry import (
    Cell,
    CellComplex,
    HalfSpace,
    arrangement_chambers,
    bounding_box,
    collapse,
    fiber_polytope,
    free_pairs,
    image_dimension,
    intersect,
    kernel_lattice,
)
from .presentation import Presentation, _dense, _require_closed, annihilator_of
from .weyl import WeylElement


@dataclass(frozen=True, eq=False)
class DirImagePresentation(Presentation):
    s: int = 0
    v_table: dict = field(default_factory=dict)
    eliminated: dict = field(default_factory=dict)  # cell -> {generator: coefficient}

    @property
    def relation_count(self) -> int:
        return len(self.relations)


@dataclass
class CellData:
    """Projection-adapted data for one cell."""

    cell: Cell
    v: int
    p: int
    kernel: list  # w_t, integer vectors in Z^m
    complement: list  # u, integer vectors completing a basis of Λ_σ
    image_equations: list  # (normal in Z^s, offset)
    dual: list  # a_t as rational functionals on R^m


def _check_projection(K: CellComplex, s: int):
    if not 0 < s < K.ambient_dim:
        raise BadProjection(f"projection rank {s} must satisfy 0 < s < {K.ambient_dim}")


def cell_data(cell: Cell, s: int) -> CellData:
    m = cell.ambient_dim
    basis = cell.lattice_basis
    kernel = kernel_lattice(cell, s) if basis else []
    v = len(kernel)
    # complete the kernel basis to a basis of Λ_σ, working in Λ_σ coordinates
    if basis:
        kcoords = [[int(x) for x in cell.tangent_coordinates(w)] for w in kernel]
        full = la.unimodular_completion(kcoords, len(basis))
        complement = []
        for row in full[v:]:
            complement.append(tuple(sum(c * b[k] for c, b in zip(row, basis)) for k in range(m)))
    else:
        complement = []
    p = len(complement)
    # equations of π(H_σ)
    proj_dirs = [list(u[:s]) for u in complement]
    normals = la.integer_kernel(proj_dirs, s) if proj_dirs else [
        tuple(int(i == j) for j in range(s)) for i in range(s)]
    p0 = cell.vertices[0][:s]
    image_eqs = [(n, la.dot(n, p0)) for n in normals]
    # dual basis a_t: rows with a_t(w_r) = δ_tr and a_t(u) = 0
    dual = []
    if v:
        vecs = [list(w) for w in kernel] + [list(u) for u in complement]
        # columns of the ambient completion; solve on span(Λ_σ), zero on normals
        normals_h = [list(h.normal) for h in cell.hull_equations]
        M = la.transpose(vecs + normals_h)
        Minv = la.inverse(M)
        dual = [tuple(Minv[t]) for t in range(v)]
    return CellData(cell, v, p, kernel, complement, image_eqs, dual)


def _facet_affine(cd: CellData, normal: Sequence[int], s: int) -> tuple[list, Fraction]:
    """``(g, g0)`` with ``<N,x> - Σ_t <N,w_t> a_t(x) = g.π(x) + g0`` on ``H_σ``."""
    m = cd.cell.ambient_dim
    lin = [Fraction(x) for x in normal]
    for w, a in zip(cd.kernel, cd.dual):
        lw = la.dot(normal, w)
        if lw:
            lin = [x - lw * y for x, y in zip(lin, a)]
    if cd.complement:
        rows = [list(u[:s]) for u in cd.complement]
        rhs = [la.dot(lin, u) for u in cd.complement]
        g = la.solve(rows, rhs)
        assert g is not None
        g = list(g)
    else:
        g = [Fraction(0)] * s
    p0 = cd.cell.vertices[0]
    g0 = la.dot(lin, p0) - la.dot(g, p0[:s])
    return g, g0


def dir_image_relations(K: CellComplex, s: int) -> list[tuple[str, dict]]:
    """Labelled relations ``(label, {generator: coefficient in D_s})``."""
    _check_projection(K, s)
    _require_closed(K)
    out = []
    for cell in K.ordered:
        cd = cell_data(cell, s)
        facets = [(K.facet_cell_id(f), f.halfspace) for f in K.facets_in(cell.id)]
        for j, u in enumerate(cd.complement):
            d = {cell.id: WeylElement.directional(u[:s])}
            for fid, h in facets:
                c = la.dot(h.normal, u)
                if c:
                    d[fid] = WeylElement.constant(s, c)
            out.append((f"i:{cell.id}:{j}", d))
        for t, w in enumerate(cd.kernel):
            d = {}
            for fid, h in facets:
                c = la.dot(h.normal, w)
                if c:
                    d[fid] = WeylElement.constant(s, c)
            out.append((f"ii:{cell.id}:{t}", d))
        if cd.v:
            d = {cell.id: WeylElement.constant(s, cd.v)}
            for fid, h in facets:
                g, g0 = _facet_affine(cd, h.normal, s)
                # -(d_i - G_i(y)) = G_i(y) - d_i
                coeff = WeylElement.linear_form(g, g0 - h.offset)
                if coeff:
                    d[fid] = coeff
            out.append((f"iii:{cell.id}", d))
        for j, (n, c) in enumerate(cd.image_equations):
            out.append((f"iv:{cell.id}:{j}", {cell.id: WeylElement.linear_form(n, -c)}))
    return out


def expected_relation_count(K: CellComplex, s: int) -> int:
    c = len(K.cells)
    vs = [cell_data(cell, s).v for cell in K.cells]
    return (s + 1) * c + sum(v - (1 if v == 0 else 0) for v in vs)


def dir_image_presentation(K: CellComplex, s: int) -> DirImagePresentation:
    rels = dir_image_relations(K, s)
    gens = tuple(c.id for c in K.ordered)
    idx = {g: i for i, g in enumerate(gens)}
    v_table = {c.id: c.dim - image_dimension(c, s) for c in K.cells}
    r = len(rels)
    expected = (s + 1) * len(gens) + sum(v - (v == 0) for v in v_table.values())
    assert r == expected, f"relation count {r} != {expected}"
    # a relation may have become empty (e.g. no facets present); keep the count honest
    vectors = tuple(_dense(d, idx, s) for _, d in rels)
    return DirImagePresentation(s, gens, vectors, tuple(lab for lab, _ in rels), s=s, v_table=v_table)


def reduce_generators(P: DirImagePresentation) -> DirImagePresentation:
    """Eliminate every ``g_σ`` with ``v(σ) > 0`` through its type (iii) relation."""
    s = P.m
    gens = list(P.generators)
    dims_order = [g for g in gens if P.v_table.get(g, 0) > 0]
    # highest-dimensional first: their expressions mention lower cells only
    dims_order.sort(key=lambda g: gens.index(g), reverse=True)
    rels = [dict(d) for d in P.relation_dicts()]
    labels = list(P.labels)
    eliminated = {}
    for g in dims_order:
        k = labels.index(f"iii:{g}")
        rel = rels.pop(k)
        labels.pop(k)
        v = rel[g]
        inv = 1 / next(iter(v.terms.values()))
        expr = {h: c * (-inv) for h, c in rel.items() if h != g}
        eliminated[g] = expr
        for d in rels:
            if g not in d:
                continue
            coeff = d.pop(g)
            for h, q in expr.items():
                d[h] = d.get(h, WeylElement(s)) + coeff * q
                if not d[h]:
                    del d[h]
        for e in eliminated.values():
            if g in e:
                coeff = e.pop(g)
                for h, q in expr.items():
                    e[h] = e.get(h, WeylElement(s)) + coeff * q
                    if not e[h]:
                        del e[h]
    keep = [g for g in gens if g not in eliminated]
    idx = {g: i for i, g in enumerate(keep)}
    vectors, labs = [], []
    for d, lab in zip(rels, labels):
        if any(d.values()):
            assert set(d) <= set(keep)
            vectors.append(_dense(d, idx, s))
            labs.append(lab)
    return DirImagePresentation(s, tuple(keep), tuple(vectors), tuple(labs), s=P.s,
                                v_table={g: 0 for g in keep}, eliminated=eliminated)


def generator_annihilator(P: Presentation, gid: str):
    return annihilator_of(P, gid)


# ====================================================================== certificate

@dataclass
class IsoCertificate:
    verdict: str
    collapse_sequence: list = field(default_factory=list)
    connectivity_witnesses: list = field(default_factory=list)
    explored: int = 0

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "collapse_sequence": [list(p) for p in self.collapse_sequence],
            "connectivity_witnesses": [
                {"point": [str(x) for x in w["point"]], "connected": w["connected"]}
                for w in self.connectivity_witnesses
            ],
            "explored": self.explored,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _fiber_pieces(K: CellComplex, s: int, x: Sequence) -> list[Cell]:
    pieces = []
    for c in K.cells:
        f = fiber_polytope(c, s, x)
        if not f.is_empty:
            pieces.append(f)
    return pieces


def fiber_is_connected(K: CellComplex, s: int, x: Sequence) -> bool:
    pieces = _fiber_pieces(K, s, x)
    if len(pieces) <= 1:
        return True
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(len(pieces)):
            if j not in seen and not intersect(pieces[i], pieces[j]).is_empty:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(pieces)


def image_hyperplanes(K: CellComplex, s: int) -> list[HalfSpace]:
    """Hyperplanes spanned by the images of cells whose image has dimension ``s-1``."""
    out = []
    for c in K.cells:
        if image_dimension(c, s) != s - 1:
            continue
        cd = cell_data(c, s)
        for n, off in cd.image_equations:
            out.append(HalfSpace(tuple(n), off))
    return out


def _is_generic(K: CellComplex, s: int, x) -> bool:
    for c in K.cells:
        if image_dimension(c, s) < s and not fiber_polytope(c, s, x).is_empty:
            return False
    return True


def chamber_samples(K: CellComplex, s: int, per_chamber: int = 1, rng: random.Random | None = None,
                    retries: int = 20) -> list[tuple]:
    """One or more generic rational points in every chamber of the image arrangement
    that meets the image of ``K``."""
    rng = rng or random.Random(0)
    pts = [v[:s] for c in K.cells for v in c.vertices]
    box = bounding_box(pts, s)
    chambers = arrangement_chambers(image_hyperplanes(K, s), box)
    out = []
    for ch in chambers:
        vs = ch.vertices
        for k in range(per_chamber):
            for attempt in range(retries):
                if k == 0 and attempt == 0:
                    w = [Fraction(1)] * len(vs)
                else:
                    w = [Fraction(rng.randint(1, 10_000)) for _ in vs]
                tot = sum(w)
                x = tuple(sum(wi * v[i] for wi, v in zip(w, vs)) / tot for i in range(s))
                if _is_generic(K, s, x):
                    break
            else:
                raise NonGenericSample(f"no generic point found in {ch.id}")
            if any(not fiber_polytope(c, s, x).is_empty for c in K.cells):
                out.append(x)
    return out


def _connectivity(K: CellComplex, s: int, per_chamber: int, rng) -> tuple[bool, list]:
    witnesses = []
    ok = True
    for x in chamber_samples(K, s, per_chamber, rng):
        conn = fiber_is_connected(K, s, x)
        witnesses.append({"point": x, "connected": conn})
        ok = ok and conn
    return ok, witnesses


def spline_iso_certificate(K: CellComplex, s: int, sample_count: int = 1, seed: int = 0,
                           budget: int = 2000) -> IsoCertificate:
    """Search 1-free collapses for a complex whose generic fibers are connected.

    Depth-first over collapse sequences with memoisation of visited
    subcomplexes; expansions are never attempted.  ``Unknown`` means the
    sufficient condition could not be certified, not that it fails.
    """
    _check_projection(K, s)
    rng = random.Random(seed)
    per = max(1, sample_count)
    visited: set = set()

    def search(L: CellComplex, seq: list):
        key = frozenset(c.id for c in L.cells)
        if key in visited or len(visited) >= budget:
            return None
        visited.add(key)
        ok, wit = _connectivity(L, s, per, rng)
        if ok:
            return seq, wit
        for pair in free_pairs(L, s):
            found = search(collapse(L, pair), seq + [pair])
            if found:
                return found
        return None

    found = search(K, [])
    if found:
        seq, wit = found
        return IsoCertificate("Isomorphic", seq, wit, len(visited))
    _, wit = _connectivity(K, s, per, rng)
    return IsoCertificate("Unknown", [], wit, len(visited))
