import json
import random
from fractions import Fraction

import pytest

from charmod.bspline import check_dbh, generic_samples
from charmod.dirimage import (
    cell_data,
    chamber_samples,
    dir_image_presentation,
    dir_image_relations,
    expected_relation_count,
    fiber_is_connected,
    generator_annihilator,
    reduce_generators,
    spline_iso_certificate,
)
from charmod.errors import BadProjection, NotClosed
from charmod.geometry import Cell, build_complex, image_dimension
from charmod.presentation import presentation
from charmod.weyl import WeylElement, parse


def segment_complex():
    seg = Cell.from_rows("h", 2, [[-1, 0, 0], [1, 0, 1]], [[0, 1, 0]])
    return build_complex([seg], generate_faces=True)


def census(K, s):
    """Relation count from first principles: per cell, dim of the image
    directions, fiber directions, one (iii) if fibered, and codim equations."""
    total = 0
    for c in K.cells:
        p = image_dimension(c, s)
        v = c.dim - p
        total += p + v + (1 if v else 0) + (s - p)
    return total


def test_box_counts(corpus):
    K = corpus("box3")
    P = dir_image_presentation(K, 2)
    assert len(P.generators) == 27
    assert len(P.relations) == 72 == census(K, 2) == expected_relation_count(K, 2)


def test_square_counts(corpus):
    K = corpus("square")
    P = dir_image_presentation(K, 1)
    assert len(P.relations) == 15 == census(K, 1)
    assert sorted(P.v_table.values()) == [0] * 6 + [1] * 3


@pytest.mark.parametrize("name,s", [("simplex2", 1), ("split_fibers", 2), ("box3", 1), ("square_boundary", 1)])
def test_count_formula(corpus, name, s):
    K = corpus(name)
    assert len(dir_image_relations(K, s)) == census(K, s)


@pytest.mark.parametrize("s", [0, 1, 2])
def test_bad_projection(corpus, s):
    K = corpus("interval")
    with pytest.raises(BadProjection):
        dir_image_presentation(K, s)


def test_not_closed(corpus):
    K = corpus("box3")
    open_box = build_complex([K.cell("B")], generate_faces=False, validate=False)
    with pytest.raises(NotClosed):
        dir_image_relations(open_box, 2)


def test_box_type_ii(corpus):
    K = corpus("box3")
    rels = dict(dir_image_relations(K, 2))
    d = rels["ii:B:0"]
    assert set(d) == {"B[4]", "B[5]"}
    # top and bottom carry opposite unit coefficients
    assert {d["B[5]"].to_text(), d["B[4]"].to_text()} == {"1", "-1"}


def test_box_type_iii(corpus):
    K = corpus("box3")
    rels = dict(dir_image_relations(K, 2))
    d = rels["iii:B"]
    texts = {g: c.to_text() for g, c in d.items()}
    # v g_B + sum (G_i - d_i) g_i: top -1, bottom 0, sides affine
    assert texts == {"B": "1", "B[5]": "-1", "B[0]": "-x1", "B[1]": "x1-1", "B[2]": "-x2", "B[3]": "x2-1"}


def test_relations_only_use_first_s_variables(corpus):
    P = dir_image_presentation(corpus("box3"), 2)
    for rel in P.relations:
        for c in rel:
            assert c.m == 2


def test_type_iii_is_consequence(corpus):
    """Lift (iii) to the ambient module: it differs from a relation of M_K by
    an element of the image of the fiber derivative."""
    K = corpus("box3")
    full = presentation(K)
    rels = dict(dir_image_relations(K, 2))
    d3 = WeylElement.d(3, 2)
    x3 = WeylElement.x(3, 2)
    for cell in K.cells:
        if cell_data(cell, 2).v == 0:
            continue
        lifted = {g: c.embed(3) for g, c in rels[f"iii:{cell.id}"].items()}
        lifted[cell.id] = lifted[cell.id] - d3 * x3
        vec = [lifted.get(g, WeylElement(3)) for g in full.generators]
        assert full.submodule.contains(vec), cell.id
        # without the correction it is not a relation
        lifted[cell.id] = lifted[cell.id] + d3 * x3
        vec = [lifted.get(g, WeylElement(3)) for g in full.generators]
        assert not full.submodule.contains(vec), cell.id


def test_reduce_box(corpus):
    R = reduce_generators(dir_image_presentation(corpus("box3"), 2))
    assert len(R.generators) == 18
    K = corpus("box3")
    dims = sorted(K.cell(g).dim for g in R.generators)
    assert dims == [0] * 8 + [1] * 8 + [2] * 2
    assert "B" in R.eliminated


def test_reduce_square(corpus):
    R = reduce_generators(dir_image_presentation(corpus("square"), 1))
    assert len(R.generators) == 6


def test_reduce_noop_when_no_fibers():
    K = segment_complex()
    P = dir_image_presentation(K, 1)
    R = reduce_generators(P)
    assert R.generators == P.generators
    assert len(R.relations) == len(P.relations)


@pytest.mark.parametrize("name,s", [("square", 1), ("simplex2", 1)])
def test_reduce_preserves_annihilators(corpus, name, s):
    P = dir_image_presentation(corpus(name), s)
    R = reduce_generators(P)
    for g in R.generators:
        assert generator_annihilator(P, g).equals(generator_annihilator(R, g)), g


def test_reduce_preserves_annihilator_box_vertex(corpus):
    P = dir_image_presentation(corpus("box3"), 2)
    R = reduce_generators(P)
    for g in ["B[0,2,4]", "B[4]"]:
        assert generator_annihilator(P, g).equals(generator_annihilator(R, g)), g


@pytest.mark.parametrize("name,s", [("box3", 2), ("box3", 1), ("square", 1), ("simplex2", 1)])
def test_certificate_convex(corpus, name, s):
    cert = spline_iso_certificate(corpus(name), s)
    assert cert.verdict == "Isomorphic"
    assert cert.collapse_sequence == []
    assert cert.connectivity_witnesses and all(w["connected"] for w in cert.connectivity_witnesses)


def test_certificate_split_fibers(corpus):
    K = corpus("split_fibers")
    cert = spline_iso_certificate(K, 2)
    assert cert.verdict == "Unknown"
    assert not fiber_is_connected(K, 2, (Fraction(1, 2), Fraction(1, 2)))


def test_certificate_json(corpus):
    cert = spline_iso_certificate(corpus("square"), 1)
    data = json.loads(cert.dumps())
    assert data["verdict"] == "Isomorphic"
    assert set(data) == {"verdict", "collapse_sequence", "connectivity_witnesses", "explored"}


def test_certificate_disconnected_fibers():
    # a square with a detached horizontal segment above it: every generic
    # fiber has two components and no 1-free collapse can remove the point
    sq = Cell.from_rows("S", 2, [[-1, 0, 0], [1, 0, 1], [0, -1, 0], [0, 1, 1]])
    seg = Cell.from_rows("h", 2, [[-1, 0, 0], [1, 0, 1]], [[0, 1, 2]])
    K = build_complex([sq, seg], generate_faces=True)
    cert = spline_iso_certificate(K, 1)
    assert cert.verdict == "Unknown"
    assert cert.explored > 1
    assert not any(w["connected"] for w in cert.connectivity_witnesses)


def test_certificate_bad_projection(corpus):
    with pytest.raises(BadProjection):
        spline_iso_certificate(corpus("square"), 2)


def test_chamber_samples_generic(corpus):
    K = corpus("simplex2")
    pts = chamber_samples(K, 1, 2, random.Random(3))
    assert len(pts) == 2  # one chamber (0, 1), two samples
    assert all(0 < p[0] < 1 for p in pts)


@pytest.mark.parametrize("name,s", [("box3", 2), ("square", 1), ("simplex2", 1)])
def test_isomorphic_implies_dbh(corpus, name, s):
    K = corpus(name)
    assert spline_iso_certificate(K, s).verdict == "Isomorphic"
    xs = generic_samples(K, s, 5, random.Random(11))
    assert all(r["equal"] for r in check_dbh(K, s, xs, alternatives=2))
