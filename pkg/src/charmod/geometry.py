"""Exact rational polyhedral geometry.

Cells are convex H-polyhedra with rational data.  All derived data (vertices,
rays, face lattice, direction lattices, outward lattice normals) is computed
exactly with ``Fraction`` arithmetic and cached on the immutable cell.

Facet measures are lattice-normalised: the characteristic distribution of a
cell is taken with respect to the measure in which a fundamental domain of
its direction lattice ``span(cell) ∩ Z^m`` has volume one.  With that
convention the Stokes coefficient of a facet along an integer tangent vector
``v`` is the integer ``ℓ(v)``, where ``ℓ`` is the primitive outward lattice
functional of the facet.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import factorial, gcd
from typing import Iterable, Sequence

from . import linalg as la
from .errors import (
    DimensionMismatch,
    EmptyCell,
    LowerDimensional,
    NonFaceIntersection,
    NotAVertex,
    NotFreePair,
    NotInComplex,
    Unbounded,
    ZeroDimensionalCell,
)

Point = tuple  # tuple of Fraction


@dataclass(frozen=True)
class HalfSpace:
    """``<normal, x> <= offset`` (or ``=`` when used as an equality)."""

    normal: tuple[int, ...]
    offset: Fraction

    def __post_init__(self):
        if not any(self.normal):
            raise ValueError("half-space normal must be nonzero")
        g = 0
        for a in self.normal:
            g = gcd(g, a)
        if g != 1:
            raise ValueError(f"normal {self.normal} is not primitive")

    @classmethod
    def from_row(cls, coeffs: Sequence, offset) -> "HalfSpace":
        """Normalise a rational row ``coeffs . x <= offset`` (positive rescaling)."""
        ints, factor = la.scale_to_integers(coeffs)
        return cls(ints, la.frac(offset) * factor)

    def value(self, point: Sequence) -> Fraction:
        return la.dot(self.normal, point)

    def row(self) -> list:
        return [*self.normal, self.offset]


def _sign_canonical(h: HalfSpace) -> HalfSpace:
    # equalities are defined up to sign; make the first nonzero entry positive
    idx = next(i for i, a in enumerate(h.normal) if a)
    if h.normal[idx] < 0:
        return HalfSpace(tuple(-a for a in h.normal), -h.offset)
    return h


@dataclass(frozen=True)
class _FaceRecord:
    closure: frozenset
    vertices: tuple
    rays: tuple
    dim: int


@dataclass(frozen=True)
class FacetData:
    """A facet of a cell together with its outward lattice functional."""

    cell: "Cell"
    functional: tuple[int, ...]  # values on the parent's direction-lattice basis
    halfspace: HalfSpace  # integer ambient representative and offset


@dataclass(frozen=True, eq=False)
class Cell:
    """A convex polyhedron ``{x : A x <= b, E x = e}`` in ``R^ambient_dim``."""

    id: str
    ambient_dim: int
    inequalities: tuple[HalfSpace, ...] = ()
    equalities: tuple[HalfSpace, ...] = ()

    @classmethod
    def from_rows(cls, cid: str, ambient_dim: int, ineqs=(), eqs=()) -> "Cell":
        """Build from rows ``[a_1, ..., a_m, b]`` meaning ``a . x <= b`` (``= b``)."""
        hs = []
        for row in ineqs:
            if len(row) != ambient_dim + 1:
                raise DimensionMismatch(f"cell {cid}: row {row} has wrong length")
            coeffs = [la.frac(a) for a in row[:-1]]
            if not any(coeffs):
                if la.frac(row[-1]) < 0:
                    raise EmptyCell(f"cell {cid} has an infeasible constant constraint")
                continue
            hs.append(HalfSpace.from_row(coeffs, row[-1]))
        es = []
        for row in eqs:
            if len(row) != ambient_dim + 1:
                raise DimensionMismatch(f"cell {cid}: row {row} has wrong length")
            coeffs = [la.frac(a) for a in row[:-1]]
            if not any(coeffs):
                if la.frac(row[-1]) != 0:
                    raise EmptyCell(f"cell {cid} has an infeasible constant equation")
                continue
            es.append(HalfSpace.from_row(coeffs, row[-1]))
        return cls(cid, ambient_dim, tuple(hs), tuple(es))

    # ------------------------------------------------------------ V-data
    @cached_property
    def _vrep(self):
        m = self.ambient_dim
        A = [h.normal for h in self.inequalities]
        b = [h.offset for h in self.inequalities]
        E = [h.normal for h in self.equalities]
        e = [h.offset for h in self.equalities]
        lin = la.integer_kernel(A + E, m) if (A or E) else [
            tuple(int(i == j) for j in range(m)) for i in range(m)]
        eq_rows = [list(r) for r in E] + [list(l) for l in lin]
        eq_rhs = list(e) + [Fraction(0)] * len(lin)
        r = la.rank(eq_rows) if eq_rows else 0
        need = m - r
        vertices = []
        seen = set()
        for S in itertools.combinations(range(len(A)), need):
            rows = eq_rows + [list(A[i]) for i in S]
            rhs = eq_rhs + [b[i] for i in S]
            red, piv = la.rref([row + [c] for row, c in zip(rows, rhs)], m + 1)
            if m in piv or len(piv) < m:
                continue
            x = tuple(row[m] for row in red)
            if x in seen:
                continue
            if all(la.dot(a, x) <= c for a, c in zip(A, b)):
                seen.add(x)
                vertices.append(x)
        rays = []
        if vertices and need >= 1:
            rseen = set()
            for S in itertools.combinations(range(len(A)), need - 1):
                rows = eq_rows + [list(A[i]) for i in S]
                ns = la.nullspace(rows, m)
                if len(ns) != 1:
                    continue
                d = la.primitive(ns[0])
                for sgn in (1, -1):
                    sd = tuple(sgn * x for x in d)
                    if sd in rseen:
                        continue
                    if all(la.dot(a, sd) <= 0 for a in A):
                        rseen.add(sd)
                        rays.append(sd)
        vertices.sort()
        rays.sort()
        return tuple(vertices), tuple(rays), tuple(lin)

    @property
    def vertices(self) -> tuple[Point, ...]:
        return self._vrep[0]

    @property
    def rays(self) -> tuple[tuple[int, ...], ...]:
        return self._vrep[1]

    @property
    def lineality(self) -> tuple[tuple[int, ...], ...]:
        return self._vrep[2]

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def is_bounded(self) -> bool:
        return not self.rays and not self.lineality

    @cached_property
    def direction_vectors(self) -> list[tuple]:
        if self.is_empty:
            return []
        v0 = self.vertices[0]
        vecs = [tuple(a - c for a, c in zip(v, v0)) for v in self.vertices[1:]]
        vecs += [tuple(Fraction(x) for x in r) for r in self.rays]
        vecs += [tuple(Fraction(x) for x in l) for l in self.lineality]
        return vecs

    @cached_property
    def dim(self) -> int:
        if self.is_empty:
            return -1
        return la.rank(self.direction_vectors) if self.direction_vectors else 0

    @cached_property
    def hull_equations(self) -> tuple[HalfSpace, ...]:
        """Canonical integer equations of the affine hull ``H_σ``."""
        if self.is_empty:
            raise EmptyCell(self.id)
        m = self.ambient_dim
        normals = la.integer_kernel(self.direction_vectors, m) if self.direction_vectors else [
            tuple(int(i == j) for j in range(m)) for i in range(m)]
        v0 = self.vertices[0]
        return tuple(HalfSpace(n, la.dot(n, v0)) for n in normals)

    @cached_property
    def lattice_basis(self) -> tuple[tuple[int, ...], ...]:
        """Hermite-normalised basis of the direction lattice ``span(σ) ∩ Z^m``."""
        m = self.ambient_dim
        eqs = [h.normal for h in self.hull_equations]
        if not eqs:
            return tuple(tuple(int(i == j) for j in range(m)) for i in range(m))
        return tuple(la.integer_kernel(eqs, m))

    @cached_property
    def key(self) -> tuple:
        """Geometric identity: equal keys iff equal point sets."""
        lin = tuple(tuple(r) for r in la.rref(self.lineality, self.ambient_dim)[0]) if self.lineality else ()
        return (self.vertices, self.rays, lin)

    def contains(self, point: Sequence) -> bool:
        p = [la.frac(x) for x in point]
        return all(h.value(p) <= h.offset for h in self.inequalities) and all(
            h.value(p) == h.offset for h in self.equalities)

    def relative_interior_point(self) -> Point:
        """Vertex barycentre plus the ray sum: a point in the relative interior."""
        vs = self.vertices
        n = len(vs)
        p = [sum((v[i] for v in vs), Fraction(0)) / n for i in range(self.ambient_dim)]
        for r in self.rays:
            p = [a + b for a, b in zip(p, r)]
        return tuple(p)

    # ---------------------------------------------------------- faces
    @cached_property
    def _face_records(self) -> dict:
        if self.is_empty:
            raise EmptyCell(self.id)
        A = [h.normal for h in self.inequalities]
        b = [h.offset for h in self.inequalities]
        V, R = self.vertices, self.rays
        tightV = [frozenset(j for j, v in enumerate(V) if la.dot(a, v) == c) for a, c in zip(A, b)]
        tightR = [frozenset(j for j, r in enumerate(R) if la.dot(a, r) == 0) for a in A]
        allV, allR = frozenset(range(len(V))), frozenset(range(len(R)))

        def close(T):
            vs, rs = allV, allR
            for i in T:
                vs &= tightV[i]
                rs &= tightR[i]
            if not vs:
                return None
            cl = frozenset(i for i in range(len(A)) if vs <= tightV[i] and rs <= tightR[i])
            return cl, vs, rs

        records = {}
        start = close(())
        queue = [start]
        while queue:
            cl, vs, rs = queue.pop()
            if cl in records:
                continue
            verts = tuple(V[j] for j in sorted(vs))
            rays = tuple(R[j] for j in sorted(rs))
            v0 = verts[0]
            vecs = [tuple(a - c for a, c in zip(v, v0)) for v in verts[1:]]
            vecs += [tuple(Fraction(x) for x in r) for r in rays]
            vecs += [tuple(Fraction(x) for x in l) for l in self.lineality]
            d = la.rank(vecs) if vecs else 0
            records[cl] = _FaceRecord(cl, verts, rays, d)
            for i in range(len(A)):
                if i not in cl:
                    nxt = close(cl | {i})
                    if nxt is not None and nxt[0] not in records:
                        queue.append(nxt)
        return records

    @cached_property
    def faces(self) -> tuple["Cell", ...]:
        """All nonempty faces (including the cell itself), sorted by (dim, id)."""
        records = self._face_records
        base = min(records, key=len)
        out = []
        for cl, rec in records.items():
            if cl == base:
                out.append(self)
                continue
            label = ",".join(str(i) for i in sorted(cl - base))
            out.append(self._face_cell(f"{self.id}[{label}]", cl))
        out.sort(key=lambda c: (c.dim, c.id))
        return tuple(out)

    def _face_cell(self, cid: str, closure: frozenset) -> "Cell":
        rec = self._face_records[closure]
        ineqs = tuple(h for i, h in enumerate(self.inequalities) if i not in closure)
        probe = Cell(cid, self.ambient_dim, ineqs,
                     tuple(self.equalities) + tuple(self.inequalities[i] for i in sorted(closure)))
        eqs = tuple(_sign_canonical(h) for h in probe.hull_equations)
        cell = Cell(cid, self.ambient_dim, ineqs, eqs)
        assert cell.dim == rec.dim
        return cell

    @cached_property
    def face_keys(self) -> frozenset:
        return frozenset(f.key for f in self.faces)

    @cached_property
    def facets(self) -> tuple[FacetData, ...]:
        """Facets with their primitive outward lattice functionals."""
        if self.dim <= 0:
            return ()
        records = self._face_records
        base = min(records, key=len)
        basis = self.lattice_basis
        completion = la.unimodular_completion(basis, self.ambient_dim)
        comp_inv = la.inverse(completion)
        out = []
        for face in self.faces:
            if face.dim != self.dim - 1:
                continue
            cl = next(c for c, r in records.items() if r.vertices == face.vertices and r.rays == face.rays
                      and r.dim == face.dim)
            i = min(cl - base)
            a = self.inequalities[i].normal
            vals = [int(la.dot(a, bv)) for bv in basis]
            g = 0
            for x in vals:
                g = gcd(g, abs(x))
            func = tuple(x // g for x in vals)
            if all(x % g == 0 for x in a):
                normal = tuple(x // g for x in a)
            else:
                rhs = list(func) + [0] * (self.ambient_dim - len(basis))
                normal = tuple(int(x) for x in la.matvec(comp_inv, rhs))
            hs = HalfSpace(normal, la.dot(normal, face.vertices[0]))
            out.append(FacetData(face, func, hs))
        return tuple(out)

    def tangent_coordinates(self, vec: Sequence) -> tuple:
        """Coordinates of a tangent vector in the direction-lattice basis."""
        basis = self.lattice_basis
        sol = la.solve(la.transpose(basis), list(vec)) if basis else ()
        if sol is None:
            raise ValueError(f"{vec} is not tangent to {self.id}")
        return sol

    def __repr__(self):
        return f"Cell({self.id!r}, dim={self.dim if 'dim' in self.__dict__ else '?'})"


@dataclass(frozen=True)
class Cone:
    apex: Point
    cell: Cell

    @property
    def rays(self):
        return self.cell.rays


def intersect(a: Cell, b: Cell, cid: str = "∩") -> Cell:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch("cells live in different ambient spaces")
    return Cell(cid, a.ambient_dim, a.inequalities + b.inequalities, a.equalities + b.equalities)


# ====================================================================== complex

@dataclass(frozen=True, eq=False)
class CellComplex:
    ambient_dim: int
    cells: tuple[Cell, ...]
    facet_incidence: dict = field(default_factory=dict)

    @cached_property
    def by_id(self) -> dict:
        return {c.id: c for c in self.cells}

    @cached_property
    def by_key(self) -> dict:
        return {c.key: c for c in self.cells}

    def cell(self, cid: str) -> Cell:
        try:
            return self.by_id[cid]
        except KeyError:
            raise NotInComplex(cid) from None

    def __contains__(self, cid) -> bool:
        return cid in self.by_id

    def __len__(self):
        return len(self.cells)

    @cached_property
    def ordered(self) -> tuple[Cell, ...]:
        """Cells sorted by (dim, id)."""
        return tuple(sorted(self.cells, key=lambda c: (c.dim, c.id)))

    def facets_in(self, cid: str) -> list[FacetData]:
        """Facets of a cell that belong to the complex."""
        cell = self.cell(cid)
        return [f for f in cell.facets if f.cell.key in self.by_key]

    def facet_cell_id(self, fd: FacetData) -> str:
        return self.by_key[fd.cell.key].id

    @cached_property
    def cofacets(self) -> dict:
        out = {c.id: [] for c in self.cells}
        for c in self.cells:
            for f in self.facets_in(c.id):
                out[self.facet_cell_id(f)].append(c.id)
        return out

    @property
    def is_closed(self) -> bool:
        return all(len(self.facets_in(c.id)) == len(c.facets) for c in self.cells)

    def missing_facets(self) -> list[tuple[str, Cell]]:
        return [(c.id, f.cell) for c in self.cells for f in c.facets if f.cell.key not in self.by_key]

    @property
    def dim(self) -> int:
        return max((c.dim for c in self.cells), default=-1)

    def top_cells(self) -> list[str]:
        d = self.dim
        return [c.id for c in self.ordered if c.dim == d]

    def subcomplex(self, ids: Iterable[str]) -> "CellComplex":
        keep = set(ids)
        return build_complex([c for c in self.cells if c.id in keep], generate_faces=False,
                             validate=False)


def build_complex(cells: Sequence[Cell], generate_faces: bool = False,
                  validate: bool = True) -> CellComplex:
    """Assemble cells into a complex, optionally adding all faces of each cell.

    Validation checks that any two cells meet in a common face.
    """
    cells = list(cells)
    if cells:
        m = cells[0].ambient_dim
        if any(c.ambient_dim != m for c in cells):
            raise DimensionMismatch("all cells must share the ambient dimension")
    else:
        m = 0
    for c in cells:
        if c.is_empty:
            raise EmptyCell(c.id)
    out: list[Cell] = []
    keys: dict = {}
    ids: set = set()

    def add(c: Cell):
        if c.key in keys:
            return
        if c.id in ids:
            raise ValueError(f"duplicate cell id {c.id!r}")
        keys[c.key] = c
        ids.add(c.id)
        out.append(c)

    for c in cells:
        if c.key in keys:
            raise ValueError(f"cell {c.id!r} duplicates {keys[c.key].id!r}")
        add(c)
    if generate_faces:
        for c in cells:
            for f in c.faces:
                add(f)
    if validate:
        _check_intersections(out)
    cx = CellComplex(m, tuple(out))
    inc = {}
    for c in out:
        inc[c.id] = tuple((cx.facet_cell_id(f), f.halfspace) for f in cx.facets_in(c.id))
    object.__setattr__(cx, "facet_incidence", inc)
    return cx


def _check_intersections(cells: Sequence[Cell]):
    # pairs of faces of one listed cell always meet in a face
    covered = [c.face_keys for c in cells]
    for i, a in enumerate(cells):
        for j in range(i + 1, len(cells)):
            b = cells[j]
            if any(a.key in fk and b.key in fk for fk in covered):
                continue
            inter = intersect(a, b)
            if inter.is_empty:
                continue
            if inter.key not in a.face_keys or inter.key not in b.face_keys:
                raise NonFaceIntersection(f"{a.id} ∩ {b.id} is not a face of both")


# ====================================================================== operations

def outward_normals(K: CellComplex, cid: str) -> list[tuple[str, HalfSpace]]:
    """Facets of ``cid`` in ``K`` with primitive outward normals (relative to H_σ)."""
    cell = K.cell(cid)
    if cell.dim == 0:
        raise ZeroDimensionalCell(cid)
    return [(K.facet_cell_id(f), f.halfspace) for f in K.facets_in(cid)]


def vertex_cone(K: CellComplex, cid: str, pid: str) -> Cone:
    cell = K.cell(cid)
    p = K.cell(pid)
    if p.dim != 0 or p.vertices[0] not in cell.vertices:
        raise NotAVertex(f"{pid} is not a vertex of {cid}")
    return cone_at(cell, p.vertices[0])


def cone_at(cell: Cell, apex: Point) -> Cone:
    active = tuple(h for h in cell.inequalities if h.value(apex) == h.offset)
    cone = Cell(f"C[{cell.id}@{_fmt_point(apex)}]", cell.ambient_dim, active, cell.equalities)
    return Cone(tuple(apex), cone)


def _fmt_point(p) -> str:
    return ",".join(str(x) for x in p)


def image_dimension(cell: Cell, s: int) -> int:
    vecs = [v[:s] for v in cell.direction_vectors]
    return la.rank(vecs) if vecs and any(any(x for x in v) for v in vecs) else 0


def fiber_dimension(K: CellComplex, cid: str, s: int) -> int:
    cell = K.cell(cid)
    if not 0 < s <= K.ambient_dim:
        raise ValueError(f"projection rank {s} out of range")
    return cell.dim - image_dimension(cell, s)


def kernel_lattice(cell: Cell, s: int) -> list[tuple[int, ...]]:
    """Basis of ``Λ_σ ∩ ker π`` (vectors in ``Z^m`` with first ``s`` entries 0)."""
    basis = cell.lattice_basis
    if not basis:
        return []
    proj = [[b[j] for b in basis] for j in range(s)]
    if not any(any(r) for r in proj):
        coeffs = [tuple(int(i == j) for j in range(len(basis))) for i in range(len(basis))]
    else:
        coeffs = la.integer_kernel(proj, len(basis))
    vecs = [tuple(sum(c * b[k] for c, b in zip(co, basis)) for k in range(cell.ambient_dim)) for co in coeffs]
    return la.hermite_rows(vecs)


def free_pairs(K: CellComplex, s: int | None = None) -> list[tuple[str, str]]:
    pairs = []
    cof = K.cofacets
    for c in K.ordered:
        for f in K.facets_in(c.id):
            tid = K.facet_cell_id(f)
            if cof[tid] != [c.id]:
                continue
            if s is not None:
                if fiber_dimension(K, c.id, s) != 1 or fiber_dimension(K, tid, s) != 0:
                    continue
            pairs.append((c.id, tid))
    return pairs


def collapse(K: CellComplex, pair: tuple[str, str]) -> CellComplex:
    sid, tid = pair
    if sid not in K or tid not in K:
        raise NotFreePair(f"{pair} not in complex")
    if (sid, tid) not in free_pairs(K):
        raise NotFreePair(f"{pair} is not a free pair")
    return K.subcomplex(c.id for c in K.cells if c.id not in (sid, tid))


def fiber_polytope(cell: Cell, s: int, x: Sequence) -> Cell:
    """``π^{-1}(x) ∩ σ`` as a cell in the last ``m - s`` coordinates."""
    m = cell.ambient_dim
    xs = [la.frac(v) for v in x]
    if len(xs) != s:
        raise DimensionMismatch(f"point has {len(xs)} coordinates, expected {s}")
    ineqs, eqs = [], []
    empty = False
    for h, target in [(h, ineqs) for h in cell.inequalities] + [(h, eqs) for h in cell.equalities]:
        rest = h.normal[s:]
        rhs = h.offset - la.dot(h.normal[:s], xs)
        if not any(rest):
            if (target is ineqs and rhs < 0) or (target is eqs and rhs != 0):
                empty = True
            continue
        target.append([*rest, rhs])
    if empty:
        # an infeasible constant constraint; represent the empty set explicitly
        return Cell(f"{cell.id}|fiber", m - s, (HalfSpace((1,) + (0,) * (m - s - 1), Fraction(-1)),
                                                 HalfSpace((-1,) + (0,) * (m - s - 1), Fraction(-1))))
    return Cell.from_rows(f"{cell.id}|fiber", m - s, ineqs, eqs)


# ====================================================================== volume

def _simplex_volume(pts: Sequence[Point]) -> Fraction:
    d = len(pts) - 1
    p0 = pts[0]
    mat = [[a - b for a, b in zip(p, p0)] for p in pts[1:]]
    return abs(la.det(mat)) / factorial(d)


def _full_dim_checks(P: Cell):
    if P.is_empty:
        return Fraction(0)
    if not P.is_bounded:
        raise Unbounded(P.id)
    if P.dim < P.ambient_dim:
        raise LowerDimensional(P.id)
    return None


def _pulling_triangulation(P: Cell) -> list[tuple[Point, ...]]:
    if P.dim == 0:
        return [(P.vertices[0],)]
    v0 = P.vertices[0]
    simplices = []
    for f in P.facets:
        if v0 in f.cell.vertices:
            continue
        for s in _pulling_triangulation(f.cell):
            simplices.append((v0,) + s)
    return simplices


def triangulate(P: Cell) -> list[tuple[Point, ...]]:
    """Pulling triangulation from the lexicographically smallest vertex."""
    if P.is_empty:
        return []
    if not P.is_bounded:
        raise Unbounded(P.id)
    return _pulling_triangulation(P)


def volume(P: Cell, strict: bool = False) -> Fraction:
    """Exact Lebesgue volume of a bounded cell in its ambient space.

    Lower-dimensional cells have volume 0; with ``strict`` that raises
    ``LowerDimensional`` instead.
    """
    try:
        early = _full_dim_checks(P)
    except LowerDimensional:
        if strict:
            raise
        return Fraction(0)
    if early is not None:
        return early
    return sum((_simplex_volume(s) for s in triangulate(P)), Fraction(0))


def lattice_coordinates(cell: Cell) -> tuple[Cell, Point, tuple]:
    """Express a cell in coordinates of its own direction lattice.

    Returns ``(cell', origin, basis)`` with ``cell'`` full-dimensional in
    ``R^dim`` and ``x = origin + Σ t_i basis_i``.
    """
    basis = cell.lattice_basis
    origin = cell.vertices[0]
    k = len(basis)
    rows = []
    for h in cell.inequalities:
        coeffs = [la.dot(h.normal, bv) for bv in basis]
        rhs = h.offset - h.value(origin)
        if not any(coeffs):
            continue
        rows.append([*coeffs, rhs])
    return Cell.from_rows(f"{cell.id}|lat", k, rows, ()), origin, basis


def lattice_volume(cell: Cell) -> Fraction:
    """Volume of a bounded cell w.r.t. its lattice-normalised measure."""
    if cell.is_empty:
        return Fraction(0)
    if not cell.is_bounded:
        raise Unbounded(cell.id)
    if cell.dim == 0:
        return Fraction(1)
    lat, _, _ = lattice_coordinates(cell)
    return volume(lat)


def volume_by_pyramids(P: Cell) -> Fraction:
    """Volume via the facet-pyramid recursion ``vol = (1/d) Σ_F h_F vol(F)``.

    Heights and facet volumes are both taken in lattice units, so the
    recursion never leaves the rationals.  Independent of ``volume``.
    """
    early = _full_dim_checks(P)
    if early is not None:
        return early
    return _pyramid(P)


def _pyramid(P: Cell) -> Fraction:
    d = P.ambient_dim
    if d == 1:
        xs = [v[0] for v in P.vertices]
        return max(xs) - min(xs)
    apex = P.relative_interior_point()
    total = Fraction(0)
    for f in P.facets:
        h = f.halfspace
        height = h.offset - h.value(apex)
        lat, _, _ = lattice_coordinates(f.cell)
        total += height * _pyramid(lat)
    return total / d


# ====================================================================== helpers

def random_rational(rng: random.Random, lo=-1, hi=1, den: int = 10_000) -> Fraction:
    return Fraction(rng.randint(math.ceil(lo * den), math.floor(hi * den)), den)


def box(cid: str, lower: Sequence, upper: Sequence) -> Cell:
    m = len(lower)
    rows = []
    for i in range(m):
        e = [0] * m
        e[i] = -1
        rows.append(e + [-la.frac(lower[i])])
        e = [0] * m
        e[i] = 1
        rows.append(e + [la.frac(upper[i])])
    return Cell.from_rows(cid, m, rows)


def simplex(cid: str, m: int) -> Cell:
    rows = []
    for i in range(m):
        e = [0] * m
        e[i] = -1
        rows.append(e + [0])
    rows.append([1] * m + [1])
    return Cell.from_rows(cid, m, rows)


def cone_from_rays(cid: str, rays: Sequence[Sequence], apex: Sequence | None = None) -> Cell:
    """Simplicial cone spanned by ``m`` linearly independent rays."""
    m = len(rays[0])
    apex = [Fraction(0)] * m if apex is None else [la.frac(a) for a in apex]
    R = [[la.frac(x) for x in r] for r in rays]
    if len(R) != m or la.rank(R) != m:
        raise ValueError("cone_from_rays needs m independent rays")
    inv = la.inverse(la.transpose(R))  # rows: dual basis
    rows = []
    for row in inv:
        # coefficient along ray i is row . (x - apex) >= 0
        rows.append([-a for a in row] + [-la.dot(row, apex)])
    return Cell.from_rows(cid, m, rows)


def translate(cell: Cell, shift: Sequence, cid: str | None = None) -> Cell:
    """``cell + shift``."""
    p = [la.frac(v) for v in shift]
    ineqs = tuple(HalfSpace(h.normal, h.offset + h.value(p)) for h in cell.inequalities)
    eqs = tuple(HalfSpace(h.normal, h.offset + h.value(p)) for h in cell.equalities)
    return Cell(cid or cell.id, cell.ambient_dim, ineqs, eqs)


def translate_complex(K: CellComplex, shift: Sequence) -> CellComplex:
    return build_complex([translate(c, shift) for c in K.cells], generate_faces=False, validate=False)


def scale(cell: Cell, factor, cid: str | None = None) -> Cell:
    """Dilate a cell about the origin by a positive rational factor."""
    f = la.frac(factor)
    if f <= 0:
        raise ValueError("scale factor must be positive")
    ineqs = tuple(HalfSpace(h.normal, h.offset * f) for h in cell.inequalities)
    eqs = tuple(HalfSpace(h.normal, h.offset * f) for h in cell.equalities)
    return Cell(cid or cell.id, cell.ambient_dim, ineqs, eqs)


# ====================================================================== arrangements

def canonical_hyperplane(normal: Sequence, offset) -> HalfSpace:
    return _sign_canonical(HalfSpace.from_row([la.frac(v) for v in normal], offset))


def arrangement_vertices(hyperplanes: Sequence[HalfSpace], m: int) -> list[Point]:
    """All points cut out by ``m`` independent hyperplanes of the arrangement."""
    pts = set()
    for S in itertools.combinations(hyperplanes, m):
        rows = [list(h.normal) + [h.offset] for h in S]
        red, piv = la.rref(rows, m + 1)
        if len(piv) == m and m not in piv:
            pts.add(tuple(r[m] for r in red))
    return sorted(pts)


def bounding_box(points: Sequence[Point], m: int, margin=1) -> Cell:
    if points:
        lo = [min(p[i] for p in points) - margin for i in range(m)]
        hi = [max(p[i] for p in points) + margin for i in range(m)]
    else:
        lo, hi = [-margin] * m, [margin] * m
    return box("box", lo, hi)


def _irredundant(P: Cell) -> Cell:
    """Drop inequalities of a bounded full-dimensional cell that define no facet."""
    m = P.ambient_dim
    keep = []
    for h in P.inequalities:
        tight = [v for v in P.vertices if h.value(v) == h.offset]
        if len(tight) >= m:
            vecs = [[a - b for a, b in zip(v, tight[0])] for v in tight[1:]]
            if la.rank(vecs) == m - 1 and h not in keep:
                keep.append(h)
    return Cell(P.id, m, tuple(keep), P.equalities)


def arrangement_chambers(hyperplanes: Sequence[HalfSpace], region: Cell) -> list[Cell]:
    """Full-dimensional chambers of a hyperplane arrangement inside ``region``.

    Built by splitting the region one hyperplane at a time.
    """
    m = region.ambient_dim
    uniq = []
    for h in hyperplanes:
        h = _sign_canonical(h)
        if h not in uniq:
            uniq.append(h)
    chambers = [region]
    for h in uniq:
        neg = HalfSpace(tuple(-a for a in h.normal), -h.offset)
        out = []
        for R in chambers:
            vals = [h.value(v) - h.offset for v in R.vertices]
            if any(x < 0 for x in vals) and any(x > 0 for x in vals):
                out.append(_irredundant(Cell(R.id, m, R.inequalities + (h,), R.equalities)))
                out.append(_irredundant(Cell(R.id, m, R.inequalities + (neg,), R.equalities)))
            else:
                out.append(R)
        chambers = out
    return [Cell(f"chamber{i}", m, c.inequalities, c.equalities) for i, c in enumerate(chambers)]
