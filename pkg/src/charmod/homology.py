"""Borel–Moore chains of a polyhedral complex.

Each cell is oriented by its Hermite-normalised lattice basis.  A facet
``τ`` of ``σ`` appears in ``∂σ`` with the sign comparing the induced
orientation (outward vector first, then the basis of ``τ``) with the chosen
orientation of ``σ``.  Facets absent from the complex contribute nothing,
which is exactly the closed-support convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from . import linalg as la
from .geometry import Cell, CellComplex, image_dimension


@dataclass(frozen=True)
class ChainComplex:
    generators_by_degree: dict
    boundary_matrices: dict  # k -> rows indexed by (k-1)-cells, columns by k-cells

    def rank(self, k: int) -> int:
        mat = self.boundary_matrices.get(k)
        if not mat or not mat[0]:
            return 0
        return la.rank(mat)

    def betti(self) -> "BettiTable":
        out = {}
        for k, gens in self.generators_by_degree.items():
            out[k] = len(gens) - self.rank(k) - self.rank(k + 1)
        return BettiTable(out)

    def check_square_zero(self) -> bool:
        for k in self.boundary_matrices:
            a = self.boundary_matrices.get(k - 1)
            b = self.boundary_matrices[k]
            if not a or not b or not a[0] or not b[0]:
                continue
            prod = la.matmul(a, b)
            if any(v for row in prod for v in row):
                return False
        return True


@dataclass(frozen=True)
class BettiTable:
    betti: dict

    def __getitem__(self, k):
        return self.betti.get(k, 0)

    def as_list(self) -> list[int]:
        if not self.betti:
            return []
        return [self.betti.get(k, 0) for k in range(max(self.betti) + 1)]

    def to_json(self) -> str:
        return json.dumps({str(k): v for k, v in sorted(self.betti.items())}, sort_keys=False)


def incidence_sign(sigma: Cell, tau: Cell) -> int:
    """Sign of ``τ`` in ``∂σ`` under the lattice-basis orientations."""
    outward = [a - b for a, b in zip(tau.relative_interior_point(), sigma.relative_interior_point())]
    rows = [sigma.tangent_coordinates(outward)]
    rows += [sigma.tangent_coordinates(v) for v in tau.lattice_basis]
    d = la.det(rows)
    if d == 0:
        raise ValueError(f"{tau.id} is not a facet of {sigma.id}")
    return 1 if d > 0 else -1


def bm_chain_complex(K: CellComplex, cells: Iterable[str] | None = None) -> ChainComplex:
    """Chain complex on ``cells`` (default all of ``K``), boundary restricted to them."""
    keep = set(c.id for c in K.cells) if cells is None else set(cells)
    by_deg: dict = {}
    for c in K.ordered:
        if c.id in keep:
            by_deg.setdefault(c.dim, []).append(c.id)
    top = max(by_deg, default=-1)
    for k in range(top + 1):
        by_deg.setdefault(k, [])
    by_deg = dict(sorted(by_deg.items()))
    mats = {}
    for k in range(1, top + 1):
        rows = by_deg[k - 1]
        cols = by_deg[k]
        ridx = {r: i for i, r in enumerate(rows)}
        mat = [[0] * len(cols) for _ in rows]
        for j, cid in enumerate(cols):
            sigma = K.cell(cid)
            for f in K.facets_in(cid):
                fid = K.facet_cell_id(f)
                if fid in ridx:
                    mat[ridx[fid]][j] = incidence_sign(sigma, f.cell)
        mats[k] = mat
    return ChainComplex(by_deg, mats)


def bm_betti(K: CellComplex) -> BettiTable:
    return bm_chain_complex(K).betti()


def stratum_cells(K: CellComplex, s: int, k: int) -> list[str]:
    """Cells whose projection to the first ``s`` coordinates has dimension ``k``."""
    return [c.id for c in K.ordered if image_dimension(c, s) == k]


def stratum_subcomplex(K: CellComplex, s: int, k: int) -> ChainComplex:
    if not 0 <= k <= s:
        raise ValueError(f"stratum index {k} outside 0..{s}")
    return bm_chain_complex(K, stratum_cells(K, s, k))


def direct_image_summand_counts(K: CellComplex, s: int) -> dict:
    """``{k: {i: dim H^BM_{i+k}(K_k)}}`` for ``0 <= k <= s``.

    ``i`` ranges over ``min(-1, -k) .. m-k`` so every nonzero degree appears.
    """
    m = K.ambient_dim
    out = {}
    for k in range(s + 1):
        cells = stratum_cells(K, s, k)
        betti = bm_chain_complex(K, cells).betti() if cells else BettiTable({})
        out[k] = {i: betti[i + k] for i in range(min(-1, -k), m - k + 1)}
    return out
