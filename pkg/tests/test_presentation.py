from fractions import Fraction

import pytest

from charmod.errors import NotASubcomplex, NotClosed, NotInComplex
from charmod.geometry import Cell, box, build_complex
from charmod.groebner import LeftIdeal
from charmod.presentation import (
    annihilator_by_elimination,
    check_hull_condition,
    compose_extraction,
    facet_extraction_operator,
    glue,
    is_annihilating,
    presentation,
    same_presentation,
    skeleton_filtration,
    standard_relations,
)
from charmod.weyl import WeylElement, parse

from conftest import cell_where

W = WeylElement


def point(cid, coords):
    m = len(coords)
    return Cell.from_rows(cid, m, (), [[int(i == j) for j in range(m)] + [c] for i, c in enumerate(coords)])


def rel_texts(P):
    return sorted(tuple(sorted((g, c.to_text()) for g, c in d.items())) for d in P.relation_dicts())


def test_interval_relations(corpus):
    K = corpus("interval")
    P = presentation(K)
    zero, one = cell_where(K, 0, lambda v: v == (0,))[0], cell_where(K, 0, lambda v: v == (1,))[0]
    expected = sorted([
        tuple(sorted([("I", "d1"), (zero, "-1"), (one, "1")])),
        ((zero, "x1"),),
        ((one, "x1-1"),),
    ])
    assert rel_texts(P) == expected
    assert P.rank == 3 and len(P.relations) == 3


def test_vertex_relations():
    K = build_complex([point("p", [Fraction(1, 2), 3])])
    rels = standard_relations(K)
    assert sorted(d["p"].to_text() for d in rels) == ["x1-1/2", "x2-3"]


def test_relation_counts(corpus):
    for name in ("interval", "simplex2", "square", "square_boundary", "box3", "two_cones", "split_fibers", "ray"):
        K = corpus(name)
        P = presentation(K)
        assert len(P.relations) == K.ambient_dim * len(K.cells)
        assert all(any(r) for r in P.relations)
    assert len(presentation(corpus("box3")).relations) == 81
    assert len(presentation(corpus("simplex2")).relations) == 14


def test_empty_complex():
    P = presentation(build_complex([]))
    assert P.generators == ()


def test_open_complex_rejected():
    K = build_complex([box("Q", [0, 0], [1, 1])])
    with pytest.raises(NotClosed):
        presentation(K)


def test_skeleton_filtration(corpus):
    K = corpus("square")
    S = skeleton_filtration(K)
    assert [len(level) for level in S.levels] == [4, 8, 9]
    assert all(set(a) <= set(b) for a, b in zip(S.levels, S.levels[1:]))


def test_json_round_trip(corpus):
    P = presentation(corpus("simplex2"))
    Q = type(P).from_json(P.to_json())
    assert same_presentation(P, Q)


def test_annihilator_by_elimination(corpus):
    I = annihilator_by_elimination(corpus("interval"))
    assert I.contains(parse("x1*(x1-1)*d1"))
    assert not I.contains(parse("d1"))
    T = annihilator_by_elimination(corpus("simplex2"))
    assert T.equals(LeftIdeal([parse("x1*(x1+x2-1)*d1", 2), parse("x2*(x1+x2-1)*d2", 2)]))
    with pytest.raises(NotInComplex):
        annihilator_by_elimination(corpus("interval"), "nope")


def test_point_annihilator():
    K = build_complex([point("o", [0])])
    assert annihilator_by_elimination(K).equals(LeftIdeal([parse("x1")]))


def test_is_annihilating(corpus):
    K = corpus("interval")
    assert is_annihilating(parse("x1*(x1-1)*d1"), K)
    assert not is_annihilating(parse("d1"), K)


def test_every_elimination_generator_annihilates(corpus):
    for name in ("interval", "simplex2", "square"):
        K = corpus(name)
        for g in annihilator_by_elimination(K).gb_elements():
            assert is_annihilating(g, K)


def test_interval_extraction(corpus):
    K = corpus("interval")
    zero, one = cell_where(K, 0, lambda v: v == (0,))[0], cell_where(K, 0, lambda v: v == (1,))[0]
    P, c = facet_extraction_operator(K, zero)
    # (x-1)(δ0 - δ1) = -δ0
    assert (P, c) == (parse("x1*d1-d1"), -1)
    P, c = facet_extraction_operator(K, one)
    # x(δ0 - δ1) = -δ1
    assert (P, c) == (parse("x1*d1"), -1)


@pytest.mark.parametrize("name", ["simplex2", "square", "box3"])
def test_extraction_verified_on_corpus(corpus, name):
    K = corpus(name)
    top = K.top_cells()[0]
    check_hull_condition(K.cell(top))
    P0 = presentation(K)
    for f in K.facets_in(top):
        fid = K.facet_cell_id(f)
        P, c = facet_extraction_operator(K, fid, top)
        vec = [W(K.ambient_dim)] * P0.rank
        vec[P0.index[top]] = P
        vec[P0.index[fid]] = W.constant(K.ambient_dim, -c)
        assert P0.submodule.contains(tuple(vec))
        assert c != 0


def test_extraction_along_maximal_chain(corpus):
    K = corpus("square")
    edge = cell_where(K, 1, lambda v: v[1] == 0)[0]
    vertex = cell_where(K, 0, lambda v: v == (0, 0))[0]
    P, c = compose_extraction(K, ["Q", edge, vertex])
    P0 = presentation(K)
    vec = [W(2)] * P0.rank
    vec[P0.index["Q"]] = P
    vec[P0.index[vertex]] = W.constant(2, -c)
    assert P0.submodule.contains(tuple(vec))


def _path_pieces():
    A = box("A", [0], [1])
    C = box("C", [1], [2])
    p0, p1, p2 = point("p0", [0]), point("p1", [1]), point("p2", [2])
    K1 = build_complex([A, p0, p1])
    K2 = build_complex([C, p1, p2])
    Fc = build_complex([p1])
    path = build_complex([A, C, p0, p1, p2])
    return K1, K2, Fc, path


def test_glue_intervals():
    K1, K2, Fc, path = _path_pieces()
    G = glue(presentation(K1), presentation(K2), presentation(Fc))
    assert len(G.generators) == 5 and len(G.relations) == 5
    assert same_presentation(G, presentation(path))


def test_glue_degenerate_cases(corpus):
    P = presentation(corpus("square"))
    assert same_presentation(glue(P, P, P), P)
    K1, _, _, _ = _path_pieces()
    far = build_complex([box("E", [5], [6]), point("q5", [5]), point("q6", [6])])
    empty = presentation(build_complex([]))
    G = glue(presentation(K1), presentation(far), empty)
    assert len(G.generators) == 6 and len(G.relations) == 6
    with pytest.raises(NotASubcomplex):
        glue(presentation(K1), presentation(far), presentation(corpus("interval")))
