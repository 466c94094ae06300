import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperpen.entities import INFINITY, Horoball, Moebius, Point, Unbounded
from hyperpen.exceptions import DegenerateGeodesicError, DomainError, ProjectionUndefinedError
from hyperpen.models import (
    ORIGIN,
    apply_boundary,
    apply_horoball,
    apply_point,
    busemann,
    crossratio,
    dist,
    dist_to_geodesic,
    frame_to_axis,
    geodesic_between,
    geodesic_through,
    gromov_product,
    is_on_geodesic,
    moebius_compose,
    moebius_inverse,
    point_at,
    project_to_geodesic,
    rand_boundary,
    rand_point,
    random_moebius,
    ray_from,
    reverse,
    time_of,
    visual_distance,
)

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
INVERSION = Moebius(0, -1, 1, 0)


def rng_for(seed):
    return np.random.default_rng(seed)


class TestDistance:
    @pytest.mark.parametrize("t", [-3.0, -0.5, 0.0, 1.0, 4.0])
    def test_vertical(self, t):
        assert dist(ORIGIN, Point(0, math.exp(t))) == pytest.approx(abs(t), abs=1e-12)

    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_isometry_invariance(self, seed):
        rng = rng_for(seed)
        p, q = rand_point(rng, 3), rand_point(rng, 3)
        m = random_moebius(rng, 3)
        assert dist(apply_point(m, p), apply_point(m, q)) == pytest.approx(dist(p, q), rel=1e-6, abs=1e-9)

    def test_to_vertical_axis(self):
        g = geodesic_between(0, INFINITY)
        assert dist_to_geodesic(Point(1, 1), g) == pytest.approx(math.asinh(1.0))
        assert is_on_geodesic(Point(0, 7), g)


class TestBusemann:
    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_cocycle(self, seed):
        rng = rng_for(seed)
        xi = rand_boundary(rng, 3)
        x, y, z = rand_point(rng, 3), rand_point(rng, 3), rand_point(rng, 3)
        lhs = busemann(xi, x, y) + busemann(xi, y, z)
        assert lhs == pytest.approx(busemann(xi, x, z), abs=1e-8)

    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_isometry_invariance(self, seed):
        rng = rng_for(seed)
        xi = rand_boundary(rng, 3)
        x, y = rand_point(rng, 3), rand_point(rng, 3)
        m = random_moebius(rng, 3)
        moved = busemann(apply_boundary(m, xi), apply_point(m, x), apply_point(m, y))
        assert moved == pytest.approx(busemann(xi, x, y), abs=1e-7)

    def test_at_infinity(self):
        assert busemann(INFINITY, ORIGIN, Point(3, math.e)) == pytest.approx(1.0)


class TestMoebius:
    def test_inverse(self):
        m = Moebius(2, 1, 1, 1)
        e = moebius_compose(m, moebius_inverse(m))
        assert (e.a, e.b, e.c, e.d) == pytest.approx((1, 0, 0, 1))

    def test_horoball_image(self):
        assert apply_horoball(INVERSION, Horoball(INFINITY, 1.0)) == Horoball(0, 1.0)

    def test_boundary(self):
        assert apply_boundary(INVERSION, 0) is INFINITY
        assert apply_boundary(INVERSION, INFINITY) == 0
        assert apply_boundary(INVERSION, 2) == pytest.approx(-0.5)


class TestCrossratio:
    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_invariance(self, seed):
        rng = rng_for(seed)
        a, b, c, d = (rand_boundary(rng, 3) for _ in range(4))
        m = random_moebius(rng, 3)
        moved = crossratio(*(apply_boundary(m, x) for x in (a, b, c, d)))
        assert moved == pytest.approx(crossratio(a, b, c, d), abs=1e-7)

    def test_infinite_values(self):
        assert crossratio(0, 1, 0, 2) is Unbounded.NEG
        assert crossratio(0, 1, 1, 2) is Unbounded.POS

    def test_degenerate(self):
        with pytest.raises(DomainError):
            crossratio(1, 1, 0, 2)

    def test_with_infinity(self):
        assert crossratio(INFINITY, 0, 1, 2) == pytest.approx(math.log(2))


class TestGeodesics:
    def test_frame_degenerate(self):
        with pytest.raises(DegenerateGeodesicError):
            frame_to_axis(1, 1)
        with pytest.raises(DegenerateGeodesicError):
            frame_to_axis(INFINITY, INFINITY)

    def test_anchor_must_be_on_line(self):
        with pytest.raises(DomainError):
            geodesic_between(0, INFINITY, anchor=Point(1, 1))

    @given(seeds, st.floats(min_value=-5, max_value=5))
    @settings(max_examples=50, deadline=None)
    def test_time_parametrisation(self, seed, t):
        rng = rng_for(seed)
        g = geodesic_between(rand_boundary(rng, 3), rand_boundary(rng, 3))
        p = point_at(g, t)
        assert dist(g.anchor, p) == pytest.approx(abs(t), abs=1e-7)
        assert time_of(g, p) == pytest.approx(t, abs=1e-7)

    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_through(self, seed):
        rng = rng_for(seed)
        p, q = rand_point(rng, 3), rand_point(rng, 3)
        g = geodesic_through(p, q)
        assert g.anchor == p
        assert is_on_geodesic(q, g, tol=1e-6)
        assert time_of(g, q) == pytest.approx(dist(p, q), rel=1e-6, abs=1e-8)

    def test_through_vertical(self):
        g = geodesic_through(Point(2, 1), Point(2, 3))
        assert g.xi_minus == 2
        assert g.xi_plus is INFINITY

    def test_through_same_point(self):
        with pytest.raises(DegenerateGeodesicError):
            geodesic_through(ORIGIN, ORIGIN)

    def test_ray_from_point(self):
        start = Point(complex(1, 1), 2)
        g = ray_from(start, complex(3, -1))
        assert g.is_ray
        assert g.anchor == start
        assert g.xi_plus == complex(3, -1)
        assert is_on_geodesic(start, g)

    def test_ray_from_boundary_is_a_line(self):
        g = ray_from(INFINITY, 0.5)
        assert not g.is_ray
        assert g.xi_minus is INFINITY

    def test_reverse(self):
        g = geodesic_between(0, 1)
        assert time_of(reverse(g), point_at(g, 1.5)) == pytest.approx(-1.5)


class TestProjection:
    def test_endpoint(self):
        g = geodesic_between(0, INFINITY)
        with pytest.raises(ProjectionUndefinedError):
            project_to_geodesic(INFINITY, g)

    def test_boundary_point(self):
        g = geodesic_between(0, INFINITY)
        p = project_to_geodesic(2.0, g)
        assert p.base == pytest.approx(0)
        assert p.height == pytest.approx(2.0)

    def test_interior_point(self):
        g = geodesic_between(0, INFINITY)
        p = project_to_geodesic(Point(3, 4), g)
        assert p.height == pytest.approx(5.0)


class TestVisual:
    def test_antipodal(self):
        assert visual_distance(ORIGIN, 0, INFINITY) == pytest.approx(1.0)
        assert gromov_product(ORIGIN, 0, INFINITY) == pytest.approx(0.0)

    def test_same_point(self):
        assert gromov_product(ORIGIN, 1.0, 1.0) is Unbounded.POS
