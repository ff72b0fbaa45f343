import itertools
import math
import random
import warnings

import pytest

from hyperlab.exceptions import ModelMismatchError, NotHyperbolicError
from hyperlab.geometry import (
    PLANE_BASEPOINT,
    PlaneGeodesic,
    TreeGeodesic,
    axis_segment,
    concat_length_bounds,
    dist,
    distance_to_geodesic,
    geodesic,
    gromov_product,
    in_shadow,
    isometry_type,
    junction_products,
    orbit_point,
    persistent_decomposition,
    project,
    tau_lower_bound,
    translation_length_exact,
)
from hyperlab.models import FreeTree, FreeWord, HalfPlane, Mat, PlanePoint, act, product
from hyperlab.words import IDENTITY, concat, parse_word, reduce
from oracles import random_chain

P = parse_word
F2 = FreeTree(2)
SL = HalfPlane()


def rw(rng, max_len=6, min_len=1):
    while True:
        w = reduce(rng.randrange(4) for _ in range(rng.randint(min_len, max_len)))
        if len(w) >= min_len:
            return w


def rand_mat(rng, k):
    gens = SL.generators() + [g.inverse() for g in SL.generators()]
    m = SL.identity()
    for _ in range(k):
        m = m * rng.choice(gens)
    return m


def quiet_decomposition(xs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return persistent_decomposition(xs)


# ------------------------------------------------------------ primitives


def test_dist_examples():
    assert dist(IDENTITY, P("aab")) == 3
    assert dist(P("a"), P("ab")) == 1
    assert dist(PlanePoint(0, 1), PlanePoint(0, math.e ** 2)) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ModelMismatchError):
        dist(IDENTITY, PlanePoint(0, 1))


def test_gromov_product_examples():
    assert gromov_product(IDENTITY, P("aab"), P("aba")) == 1
    assert gromov_product(IDENTITY, P("A"), P("b")) == 0
    b, x = P("ab"), P("Ba")
    assert gromov_product(b, x, x) == dist(b, x)
    p = PlanePoint(0.3, 2.0)
    assert gromov_product(PLANE_BASEPOINT, p, p) == pytest.approx(dist(PLANE_BASEPOINT, p))


def test_tree_gromov_product_matches_definition():
    rng = random.Random(0)
    for _ in range(2000):
        b, x, y = rw(rng, 6, 0), rw(rng, 6, 0), rw(rng, 6, 0)
        assert 2 * gromov_product(b, x, y) == dist(b, x) + dist(b, y) - dist(x, y)


def test_shadow_examples():
    assert in_shadow(P("aab"), IDENTITY, P("a"), 0)
    assert in_shadow(P("ab"), IDENTITY, P("ab"), 0)
    assert not in_shadow(P("b"), IDENTITY, P("a"), 0)


def test_tree_is_zero_hyperbolic():
    rng = random.Random(1)
    for _ in range(3000):
        w, x, y, z = (rw(rng, 7, 0) for _ in range(4))
        gps = sorted([gromov_product(w, x, y), gromov_product(w, y, z), gromov_product(w, x, z)])
        assert gps[0] == gps[1]


def test_plane_is_delta_hyperbolic():
    rng = random.Random(2)
    delta = SL.delta
    for _ in range(1000):
        w, x, y, z = (PlanePoint(rng.uniform(-3, 3), rng.uniform(0.05, 4)) for _ in range(4))
        a, b, c = gromov_product(w, x, y), gromov_product(w, y, z), gromov_product(w, x, z)
        assert a >= min(b, c) - delta


# ------------------------------------------------------------- geodesics


def test_tree_geodesic_unit_speed():
    g = TreeGeodesic(P("ab"), P("aBa"))
    assert g.length == 3
    assert [str(v) for v in g.vertices()] == ["ab", "a", "aB", "aBa"]
    for s, t in itertools.combinations(range(4), 2):
        assert dist(g(s), g(t)) == t - s
    with pytest.raises(ValueError):
        g(0.5)


def test_plane_geodesic_unit_speed():
    rng = random.Random(3)
    for _ in range(200):
        p = PlanePoint(rng.uniform(-2, 2), rng.uniform(0.1, 3))
        q = PlanePoint(rng.uniform(-2, 2), rng.uniform(0.1, 3))
        g = PlaneGeodesic(p, q)
        assert dist(g(0), p) < 1e-7 and dist(g(g.length), q) < 1e-7
        s, t = sorted(rng.uniform(0, g.length) for _ in range(2))
        assert dist(g(s), g(t)) == pytest.approx(t - s, abs=1e-7)
    v = PlaneGeodesic(PlanePoint(0, 1), PlanePoint(0, 5))
    assert v(math.log(2)).y == pytest.approx(2)


def test_project_examples():
    r3 = TreeGeodesic(IDENTITY, P("ab"))
    assert project(P("c"), r3)[0] == IDENTITY
    assert project(P("aab"), TreeGeodesic(IDENTITY, P("aa")))[0] == P("aa")
    g = TreeGeodesic(P("b"), P("ba"))
    assert project(P("ba"), g) == (P("ba"), 1)


def test_tree_projection_is_nearest_vertex():
    rng = random.Random(4)
    for _ in range(1000):
        g = TreeGeodesic(rw(rng, 6, 0), rw(rng, 6, 0))
        x = rw(rng, 7, 0)
        p, t = project(x, g)
        assert dist(x, p) == min(dist(x, v) for v in g.vertices())


def test_plane_projection_against_grid():
    rng = random.Random(5)
    for _ in range(100):
        g = PlaneGeodesic(PlanePoint(rng.uniform(-2, 2), rng.uniform(0.2, 2)),
                          PlanePoint(rng.uniform(-2, 2), rng.uniform(0.2, 2)))
        x = PlanePoint(rng.uniform(-3, 3), rng.uniform(0.1, 3))
        d = distance_to_geodesic(x, g)
        grid = min(dist(x, g(g.length * i / 2000)) for i in range(2001))
        assert d <= grid + 1e-9
        assert d >= grid - 1e-3
    p = PlanePoint(0.5, 1.5)
    assert dist(project(p, PlaneGeodesic(p, PlanePoint(2, 1)))[0], p) < 1e-6


# ------------------------------------------------------ decompositions


def test_decomposition_straight_chain():
    dec = persistent_decomposition([IDENTITY, P("aa"), P("aabb")])
    assert dec.persistent_lengths == [2, 2]
    assert [s.gp_end for s in dec.segments[:1]] == [0] and dec.segments[1].gp_start == 0
    assert dec.residuals == [0, 0]
    b = concat_length_bounds(dec, 0)
    assert (b.lower, b.upper, b.hypothesis_met) == (4, 4, True)


def test_decomposition_with_backtrack():
    dec = persistent_decomposition([IDENTITY, P("aa"), P("a")])
    first, second = dec.segments
    assert first.persistent_length == 1 and first.gp_end == 1
    assert second.persistent_length == 0 and second.gp_start == 1
    assert dec.residuals == [0, 0]
    assert gromov_product(P("aa"), IDENTITY, P("a")) == 1
    assert not concat_length_bounds(dec).hypothesis_met


def test_two_points_single_segment():
    dec = persistent_decomposition([P("b"), P("bab")])
    (s,) = dec.segments
    assert s.p == P("b") and s.q == P("bab") and s.persistent_length == 2
    b = concat_length_bounds(dec, 0.5)
    assert (b.lower, b.upper) == (1.0, 3.0)


def test_repeated_points_are_flagged():
    with pytest.warns(UserWarning):
        dec = persistent_decomposition([IDENTITY, P("a"), P("a"), P("ab")])
    assert dec.skipped == (2,) and len(dec.segments) == 2
    with pytest.raises(ValueError):
        persistent_decomposition([IDENTITY])


def test_residual_is_zero_when_products_fit():
    rng = random.Random(6)
    for _ in range(1000):
        dec = quiet_decomposition(random_chain(rng, rng.randint(1, 5)))
        for s in dec.segments:
            if s.gp_start + s.gp_end < s.length:
                assert s.residual == 0


def test_decomposition_against_distance_oracle():
    rng = random.Random(7)
    met = 0
    for _ in range(1000):
        xs = random_chain(rng, 4)
        dec = quiet_decomposition(xs)
        b = concat_length_bounds(dec, 0)
        if b.hypothesis_met:
            met += 1
            assert b.lower == b.upper == dist(dec.points[0], dec.points[-1])
    assert met > 300


def test_plane_residuals_within_C():
    rng = random.Random(8)
    C = 10 * SL.delta
    for _ in range(300):
        xs, g = [PLANE_BASEPOINT], SL.identity()
        for _ in range(rng.randint(1, 4)):
            g = g * rand_mat(rng, rng.randint(1, 8))
            xs.append(orbit_point(g))
        dec = quiet_decomposition(xs)
        for s in dec.segments:
            assert abs(s.residual) <= C
        b = concat_length_bounds(dec, C)
        if b.hypothesis_met:
            assert b.contains(dist(dec.points[0], dec.points[-1]))


# ------------------------------------------------------ translation length


def test_tau_bound_examples():
    b = tau_lower_bound([F2.element("aa"), F2.element("bb")])
    assert b.hypothesis_met and b.value == 4 == translation_length_exact(F2.element("aabb"))
    assert junction_products([F2.element("aa"), F2.element("bb")]) == [0, 0]
    b = tau_lower_bound([F2.element("ab"), F2.element("ab")])
    assert b.value == 4 == translation_length_exact(F2.element("abab"))


def test_tau_bound_hypothesis_unmet():
    b = tau_lower_bound([F2.element("ab"), F2.element("BA")])
    assert not b.hypothesis_met


def test_tau_bound_against_exact():
    rng = random.Random(9)
    met = 0
    for _ in range(1000):
        fs = [FreeWord(rw(rng, 6)) for _ in range(rng.randint(1, 4))]
        b = tau_lower_bound(fs, 0)
        if b.hypothesis_met:
            met += 1
            tau = translation_length_exact(product(F2, fs))
            assert b.value <= tau
            assert b.value == tau
    assert met > 300


def test_prefix_points_near_geodesic():
    rng = random.Random(10)
    for _ in range(1000):
        fs = [FreeWord(rw(rng, 6)) for _ in range(rng.randint(1, 4))]
        if not tau_lower_bound(fs).hypothesis_met:
            continue
        jp = junction_products(fs)
        g = product(F2, fs)
        geo = geodesic(IDENTITY, g.word)
        pre = IDENTITY
        for i, f in enumerate(fs):
            pre = concat(pre, f.word)
            assert distance_to_geodesic(pre, geo) <= jp[i - 1] + jp[i]


def test_translation_length_examples():
    assert translation_length_exact(F2.element("abA")) == 1
    assert translation_length_exact(F2.element("ab")) == 2
    g = Mat(2, 1, 1, 1)
    assert translation_length_exact(g) == pytest.approx(1.9248, abs=1e-4)
    m, x0 = g, SL.basepoint
    for _ in range(63):
        m = m * g
    assert abs(dist(x0, act(m, x0)) / 64 - translation_length_exact(g)) < 1e-3
    assert translation_length_exact(Mat(0, -1, 1, 0)) == 0
    assert isometry_type(Mat(0, -1, 1, 0)) == "elliptic"
    assert isometry_type(Mat(1, 1, 0, 1)) == "parabolic"
    assert isometry_type(F2.element("abA")) == "hyperbolic"


def test_translation_length_is_limit_in_trees():
    rng = random.Random(11)
    for _ in range(300):
        w = rw(rng, 8)
        tau = translation_length_exact(F2.element(w))
        m = 30
        assert len(w ** m) == pytest.approx(m * tau, abs=2 * len(w))
        assert len(w ** (m + 1)) - len(w ** m) == tau


def test_axis_segment_examples():
    assert axis_segment(F2.element("b"), 3) == TreeGeodesic(IDENTITY, P("bbb"))
    seg = axis_segment(F2.element("abA"), 2)
    assert [str(v) for v in seg.vertices()] == ["a", "ab", "abb"]
    with pytest.raises(NotHyperbolicError):
        axis_segment(F2.identity(), 2)


def test_axis_segment_equivariance():
    rng = random.Random(12)
    for _ in range(300):
        g = F2.element(rw(rng, 8))
        m = rng.randint(1, 4)
        seg, longer = axis_segment(g, m), axis_segment(g, m + 1)
        moved = [concat(g.word, v) for v in seg.vertices()]
        verts = longer.vertices()
        tau = int(translation_length_exact(g))
        assert moved == verts[tau:]
