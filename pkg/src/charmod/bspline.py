"""Multivariate B-splines as exact fiber volumes, and the de Boor–Höllig checks.

``π_*δ_σ`` at a point ``x`` is the volume of the fiber ``π^{-1}(x) ∩ σ``
measured with the lattice normalisation of ``Λ_σ ∩ ker π``, divided by the
index of ``π(Λ_σ)`` in ``Z^s``; that quotient is the density of the push
forward with respect to Lebesgue measure on ``R^s``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg as la
from .dirimage import DirImagePresentation, cell_data, dir_image_presentation, _facet_affine
from .errors import NonGenericSample, Unbounded, UnboundedFiber
from .geometry import (
    Cell,
    CellComplex,
    arrangement_chambers,
    arrangement_vertices,
    bounding_box,
    canonical_hyperplane,
    fiber_polytope,
    image_dimension,
    lattice_volume,
    random_rational,
)
from .presentation import _dense
from .weyl import WeylElement


def _gram_det(vectors) -> Fraction:
    if not vectors:
        return Fraction(1)
    G = [[Fraction(la.dot(a, b)) for b in vectors] for a in vectors]
    return la.det(G)


@dataclass(frozen=True)
class SplineValue:
    lattice_value: Fraction
    image_index: int = 1
    kernel_gram: Fraction = Fraction(1)

    @property
    def density(self) -> Fraction:
        """Push-forward density with respect to Lebesgue measure on the image."""
        return self.lattice_value / self.image_index

    @property
    def euclidean_factor(self) -> str:
        if self.kernel_gram == 1:
            return "1"
        return f"sqrt({self.kernel_gram})"

    def euclidean(self) -> float:
        """Euclidean fiber volume as a float."""
        return float(self.lattice_value) * math.sqrt(self.kernel_gram)

    def __float__(self):
        return float(self.lattice_value)


def image_index(cell: Cell, s: int) -> int:
    """Index of ``π(Λ_σ)`` in the lattice ``Z^s ∩ span π(σ)``."""
    cd = cell_data(cell, s)
    if not cd.complement:
        return 1
    proj = [list(u[:s]) for u in cd.complement]
    g = _gram_det(proj)
    # the saturation of the projected lattice has the same span
    sat = la.integer_kernel(la.integer_kernel(proj, s), s) if len(proj) < s else [
        tuple(int(i == j) for j in range(s)) for i in range(s)]
    gs = _gram_det(sat)
    ratio = g / gs
    idx = math.isqrt(int(ratio))
    assert ratio.denominator == 1 and idx * idx == ratio
    return idx


def bspline_value(cell: Cell, s: int, x: Sequence) -> SplineValue:
    """Lattice-normalised volume of ``π^{-1}(x) ∩ σ``."""
    xs = [la.frac(v) for v in x]
    fib = fiber_polytope(cell, s, xs)
    kern = cell_data(cell, s).kernel
    v = len(kern)
    idx = image_index(cell, s)
    gram = _gram_det(kern)
    if fib.is_empty or fib.dim < v:
        return SplineValue(Fraction(0), idx, gram)
    if not fib.is_bounded:
        raise UnboundedFiber(f"fiber of {cell.id} over {xs} is unbounded")
    try:
        vol = lattice_volume(fib)
    except Unbounded:
        raise UnboundedFiber(cell.id) from None
    return SplineValue(vol, idx, gram)


def density(cell: Cell, s: int, x) -> Fraction:
    return bspline_value(cell, s, x).density


# ---------------------------------------------------------------- sampling

def is_generic(K: CellComplex, s: int, x) -> bool:
    """``x`` avoids the images of all cells with lower-dimensional image."""
    for c in K.cells:
        if image_dimension(c, s) < s and not fiber_polytope(c, s, x).is_empty:
            return False
    return True


def generic_samples(K: CellComplex, s: int, n: int, rng: random.Random, retries: int = 50) -> list[tuple]:
    pts = [v[:s] for c in K.cells for v in c.vertices]
    lo = [min(p[i] for p in pts) for i in range(s)]
    hi = [max(p[i] for p in pts) for i in range(s)]
    out = []
    for _ in range(n):
        for _ in range(retries):
            x = tuple(random_rational(rng, lo[i], hi[i]) for i in range(s))
            if is_generic(K, s, x):
                out.append(x)
                break
        else:
            raise NonGenericSample(f"no generic sample found after {retries} attempts")
    return out


def _regenerate(K: CellComplex, s: int, x, rng: random.Random, retries: int):
    if is_generic(K, s, x):
        return tuple(x)
    for k in range(retries):
        eps = Fraction(1, 10 ** (3 + k % 4))
        y = tuple(la.frac(a) + eps * random_rational(rng) for a in x)
        if is_generic(K, s, y):
            return y
    raise NonGenericSample(f"sample {list(map(str, x))} stays non-generic after {retries} perturbations")


# ---------------------------------------------------------------- checks

def _alternative_points(cell: Cell, rng: random.Random, count: int) -> list[tuple]:
    vs = cell.vertices
    pts = [cell.relative_interior_point()]
    for _ in range(count):
        w = [Fraction(rng.randint(0, 50)) for _ in vs]
        if not any(w):
            w[0] = Fraction(1)
        tot = sum(w)
        p = [sum(wi * v[i] for wi, v in zip(w, vs)) / tot for i in range(cell.ambient_dim)]
        for r in cell.rays:
            t = rng.randint(0, 5)
            p = [a + t * b for a, b in zip(p, r)]
        pts.append(tuple(p))
    return pts


def check_dbh(K: CellComplex, s: int, x_samples: Sequence, alternatives: int = 5,
              seed: int = 0, retries: int = 20) -> list[dict]:
    """Evaluate relations (ii) and (iii) exactly at every sample.

    One report row per relation, cell, sample and (for (iii)) choice of the
    facet points ``k_i``; choice 0 is the vertex barycentre.
    """
    rng = random.Random(seed)
    samples = [_regenerate(K, s, x, rng, retries) for x in x_samples]
    report = []
    cells = [c for c in K.ordered if image_dimension(c, s) == s]
    for cell in cells:
        cd = cell_data(cell, s)
        facets = []
        for f in K.facets_in(cell.id):
            fid = K.facet_cell_id(f)
            facets.append((fid, f))
        kpoints = {fid: _alternative_points(f.cell, rng, alternatives) for fid, f in facets}
        for x in samples:
            vals = {}
            for fid, f in facets:
                val = density(f.cell, s, x)
                if image_dimension(f.cell, s) < s:
                    assert val == 0, f"lower-dimensional image of {fid} is nonzero at a generic point"
                vals[fid] = val
            sample = [str(a) for a in x]
            for t, w in enumerate(cd.kernel):
                rhs = sum((la.dot(f.halfspace.normal, w) * vals[fid] for fid, f in facets), Fraction(0))
                report.append({"relation": "ii", "cell": cell.id, "vector": t, "sample": sample,
                               "lhs": "0", "rhs": str(rhs), "equal": rhs == 0})
            if cd.v == 0:
                continue
            lhs = cd.v * density(cell, s, x)
            coeffs = {}
            for fid, f in facets:
                g, g0 = _facet_affine(cd, f.halfspace.normal, s)
                coeffs[fid] = la.dot(g, x) + g0
            for choice in range(alternatives + 1):
                rhs = Fraction(0)
                for fid, f in facets:
                    k = kpoints[fid][choice]
                    d_i = la.dot(f.halfspace.normal, k)
                    rhs += (d_i - coeffs[fid]) * vals[fid]
                report.append({"relation": "iii", "cell": cell.id, "k_choice": choice, "sample": sample,
                               "lhs": str(lhs), "rhs": str(rhs), "equal": lhs == rhs})
    return report


# ---------------------------------------------------------------- S_K

def constraint_hyperplanes(K: CellComplex):
    out = []
    for c in K.cells:
        for h in list(c.inequalities) + list(c.equalities):
            hc = canonical_hyperplane(h.normal, h.offset)
            if hc not in out:
                out.append(hc)
    return out


def missing_cells(K: CellComplex) -> list[Cell]:
    """Bounded faces of the arrangement spanned by ``K`` that are not in ``K``."""
    m = K.ambient_dim
    hyps = constraint_hyperplanes(K)
    verts = arrangement_vertices(hyps, m)
    region = bounding_box(verts, m)
    lo = [min(v[i] for v in verts) - 1 for i in range(m)] if verts else None
    hi = [max(v[i] for v in verts) + 1 for i in range(m)] if verts else None
    out, seen = [], set()
    for ch in arrangement_chambers(hyps, region):
        if not ch.is_bounded or any(p[i] in (lo[i], hi[i]) for p in ch.vertices for i in range(m)):
            continue
        for f in ch.faces:
            if f.key in K.by_key or f.key in seen:
                continue
            seen.add(f.key)
            out.append(f)
    out.sort(key=lambda c: (-c.dim, c.vertices))
    return [Cell(f"missing{i}", m, c.inequalities, c.equalities) for i, c in enumerate(out)]


def missing_cell_relations(K: CellComplex, s: int) -> list[tuple[str, dict]]:
    """Type (ii) relations contributed by missing cells whose facets carrying a
    nonzero coefficient all lie in ``K``."""
    out = []
    for tau in missing_cells(K):
        kern = cell_data(tau, s).kernel
        if not kern:
            continue
        for t, w in enumerate(kern):
            d = {}
            ok = True
            for f in tau.facets:
                c = la.dot(f.halfspace.normal, w)
                if not c:
                    continue
                if f.cell.key not in K.by_key:
                    ok = False
                    break
                d[K.by_key[f.cell.key].id] = WeylElement.constant(s, c)
            if ok and d:
                out.append((f"ii*:{tau.id}:{t}", d))
    return out


def spline_module_presentation(K: CellComplex, s: int, prune: bool = True) -> DirImagePresentation:
    """Presentation of ``S_K``: the direct image relations plus relations from missing cells.

    With ``prune`` an extra relation is kept only if it is not already a
    consequence of the relations kept so far.
    """
    base = dir_image_presentation(K, s)
    idx = base.index
    rels = list(base.relations)
    labels = list(base.labels)
    current = base
    for lab, d in missing_cell_relations(K, s):
        vec = _dense(d, idx, s)
        if prune and current.submodule.contains(vec):
            continue
        rels.append(vec)
        labels.append(lab)
        current = DirImagePresentation(s, base.generators, tuple(rels), tuple(labels), s=s,
                                       v_table=base.v_table)
    return current


def extra_relations(K: CellComplex, s: int) -> list[dict]:
    P = spline_module_presentation(K, s)
    return [d for d, lab in zip(P.relation_dicts(), P.labels) if lab.startswith("ii*")]
