import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from charmod.bspline import (
    bspline_value,
    check_dbh,
    density,
    extra_relations,
    generic_samples,
    image_index,
    is_generic,
    missing_cells,
    spline_module_presentation,
)
from charmod.dirimage import dir_image_presentation
from charmod.errors import EmptyCell, NonGenericSample, UnboundedFiber
from charmod.geometry import Cell, build_complex, fiber_polytope, scale, simplex, volume_by_pyramids
from charmod.presentation import same_presentation

from helpers import random_polytope


def slice_volume(cell, s, x):
    """Independent oracle: substitute x into the inequalities and take the
    pyramid-decomposition volume of the slice in the last m - s coordinates."""
    m = cell.ambient_dim
    k = m - s
    rows = []
    for h in cell.inequalities:
        rows.append(list(h.normal[s:]) + [h.offset - sum(a * b for a, b in zip(h.normal[:s], x))])
    try:
        P = Cell.from_rows("slice", k, rows)
    except EmptyCell:
        return F(0)
    if P.is_empty or P.dim < k:
        return F(0)
    return volume_by_pyramids(P)


def test_box_values(corpus):
    B = corpus("box3").cell("B")
    v = bspline_value(B, 2, (F(1, 2), F(1, 3)))
    assert v.lattice_value == 1 and v.euclidean_factor == "1"
    assert bspline_value(B, 2, (2, 2)).lattice_value == 0


def test_simplex_value(corpus):
    T = corpus("simplex2").cell("T")
    assert bspline_value(T, 1, (F(1, 4),)).lattice_value == F(3, 4)


def test_simplex3_values():
    S = simplex("S", 3)
    # fiber over x is the triangle y, z >= 0, y + z <= 1 - x
    x = F(1, 3)
    assert bspline_value(S, 1, (x,)).lattice_value == (1 - x) ** 2 / 2
    assert bspline_value(S, 2, (F(1, 4), F(1, 4))).lattice_value == F(1, 2)


def test_unbounded_fiber(corpus):
    C1 = corpus("two_cones").cell("C1")
    with pytest.raises(UnboundedFiber):
        bspline_value(C1, 2, (1, 1))
    assert bspline_value(C1, 2, (-1, 1)).lattice_value == 0


def test_image_index_and_density():
    steep = Cell.from_rows("a", 2, [[-1, 0, 0], [1, 0, 2]], [[1, -2, 0]])  # x = 2y, 0 <= x <= 2
    assert image_index(steep, 1) == 2
    v = bspline_value(steep, 1, (F(1, 2),))
    assert v.lattice_value == 1 and v.density == F(1, 2)
    flat = Cell.from_rows("b", 2, [[0, -1, 0], [0, 1, 1]], [[2, -1, 0]])  # y = 2x, 0 <= y <= 1
    assert image_index(flat, 1) == 1
    assert density(flat, 1, (F(1, 4),)) == 1


def test_kernel_gram_lower_dimensional():
    # square in the plane y + z = 1: fibers run along (0, 1, -1)
    tri = Cell.from_rows("t", 3, [[-1, 0, 0, 0], [1, 0, 0, 1], [0, -1, 0, 0], [0, 1, 0, 1]], [[0, 1, 1, 1]])
    v = bspline_value(tri, 1, (F(1, 2),))
    assert v.lattice_value == 1
    assert v.euclidean_factor == "sqrt(2)"
    assert abs(v.euclidean() - 2 ** 0.5) < 1e-12


@pytest.mark.parametrize("name,s", [("square", 1), ("box3", 2)])
def test_dbh(corpus, name, s):
    K = corpus(name)
    xs = generic_samples(K, s, 20, random.Random(5))
    rep = check_dbh(K, s, xs)
    assert rep and all(r["equal"] for r in rep)
    kinds = {r["relation"] for r in rep}
    assert kinds == {"ii", "iii"}


@pytest.mark.parametrize("name,s", [("simplex2", 1), ("box3", 1)])
def test_dbh_more(corpus, name, s):
    K = corpus(name)
    xs = generic_samples(K, s, 10, random.Random(2))
    assert all(r["equal"] for r in check_dbh(K, s, xs))


def test_dbh_simplex3():
    K = build_complex([simplex("S", 3)], generate_faces=True)
    for s in (1, 2):
        xs = generic_samples(K, s, 6, random.Random(s))
        assert all(r["equal"] for r in check_dbh(K, s, xs))


def test_dbh_square_example(corpus):
    K = corpus("square")
    rep = check_dbh(K, 1, [(F(1, 3),)], alternatives=0)
    body = [r for r in rep if r["cell"] == "Q" and r["relation"] == "iii"]
    assert body == [{"relation": "iii", "cell": "Q", "k_choice": 0, "sample": ["1/3"],
                     "lhs": "1", "rhs": "1", "equal": True}]
    ii = [r for r in rep if r["cell"] == "Q" and r["relation"] == "ii"]
    assert ii[0]["rhs"] == "0"


def test_dbh_choice_independence(corpus):
    K = corpus("box3")
    xs = generic_samples(K, 2, 3, random.Random(9))
    rep = check_dbh(K, 2, xs, alternatives=5)
    iii = [r for r in rep if r["relation"] == "iii" and r["cell"] == "B"]
    assert sorted({r["k_choice"] for r in iii}) == list(range(6))
    for x in {tuple(r["sample"]) for r in iii}:
        assert len({r["rhs"] for r in iii if tuple(r["sample"]) == x}) == 1


def test_dbh_detects_wrong_value(corpus, monkeypatch):
    import charmod.bspline as bs
    K = corpus("square")
    real = bs.density

    def skewed(cell, s, x):
        v = real(cell, s, x)
        return v * 2 if cell.id == "Q" else v

    monkeypatch.setattr(bs, "density", skewed)
    rep = check_dbh(K, 1, [(F(1, 3),)])
    assert not all(r["equal"] for r in rep)


def test_non_generic_regenerated(corpus):
    K = corpus("square")
    assert not is_generic(K, 1, (0,))
    rep = check_dbh(K, 1, [(0,)], seed=1)
    assert all(r["equal"] for r in rep)
    assert rep[0]["sample"] != ["0"]


def test_non_generic_gives_up(corpus):
    with pytest.raises(NonGenericSample):
        check_dbh(corpus("square"), 1, [(0,)], retries=0)


def test_support(corpus):
    B = corpus("box3").cell("B")
    for x in [(F(1, 2), F(3, 2)), (F(-1, 5), F(1, 2)), (F(1, 7), F(6, 7))]:
        empty = fiber_polytope(B, 2, x).is_empty
        assert (bspline_value(B, 2, x).lattice_value == 0) == empty


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_two_volume_algorithms(seed):
    rng = random.Random(seed)
    P = random_polytope(rng, m=3, cuts=4)
    s = rng.choice([1, 2])
    lo = [min(v[i] for v in P.vertices) for i in range(s)]
    hi = [max(v[i] for v in P.vertices) for i in range(s)]
    x = tuple(lo[i] + (hi[i] - lo[i]) * F(rng.randint(1, 99), 100) for i in range(s))
    assert bspline_value(P, s, x).lattice_value == slice_volume(P, s, x)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_scaling(seed):
    rng = random.Random(seed)
    P = random_polytope(rng, m=3, cuts=3)
    s = rng.choice([1, 2])
    x = tuple(P.relative_interior_point()[:s])
    Q = scale(P, 2)
    v = 3 - s
    assert bspline_value(Q, s, tuple(2 * a for a in x)).lattice_value == 2 ** v * bspline_value(P, s, x).lattice_value


def test_monte_carlo_sanity():
    S = simplex("S", 3)
    x = F(1, 5)
    exact = float(bspline_value(S, 1, (x,)).lattice_value)
    rng = random.Random(0)
    n = 100_000
    hits = 0
    for _ in range(n):
        y, z = rng.random(), rng.random()
        hits += y + z <= 1 - float(x)
    p = hits / n
    se = (p * (1 - p) / n) ** 0.5
    assert abs(p - exact) <= 3 * se


# ---------------------------------------------------------------- S_K

def test_box_spline_module_identical(corpus):
    K = corpus("box3")
    assert same_presentation(spline_module_presentation(K, 2), dir_image_presentation(K, 2))
    assert extra_relations(K, 2) == []


def test_split_fibers_extra_relation(corpus):
    K = corpus("split_fibers")
    extra = extra_relations(K, 2)
    assert len(extra) == 1
    (d,) = extra
    assert {g: c.to_text() for g, c in d.items()} in (
        {"top": "1", "bottom": "-1"}, {"top": "-1", "bottom": "1"})
    base = dir_image_presentation(K, 2)
    vec = spline_module_presentation(K, 2).relations[-1]
    assert not base.submodule.contains(vec)


def test_split_fibers_missing_cell(corpus):
    K = corpus("split_fibers")
    solid = [c for c in missing_cells(K) if c.dim == 3]
    assert len(solid) == 1


def test_offset_segments_no_extra():
    a = Cell.from_rows("a", 2, [[-1, 0, 0], [1, 0, 1]], [[0, 1, 0]])
    b = Cell.from_rows("b", 2, [[-1, 0, -2], [1, 0, 3]], [[0, 1, 1]])
    K = build_complex([a, b], generate_faces=True)
    assert extra_relations(K, 1) == []
    assert same_presentation(spline_module_presentation(K, 1), dir_image_presentation(K, 1))


def test_stacked_segments_extra():
    # segments directly above each other push forward to the same function;
    # the missing rectangle between them supplies the relation a - b
    a = Cell.from_rows("a", 2, [[-1, 0, 0], [1, 0, 1]], [[0, 1, 0]])
    b = Cell.from_rows("b", 2, [[-1, 0, 0], [1, 0, 1]], [[0, 1, 1]])
    K = build_complex([a, b], generate_faces=True)
    extra = extra_relations(K, 1)
    assert len(extra) == 1
    assert set(extra[0]) == {"a", "b"}
