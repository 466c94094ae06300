import math

import numpy as np
import pytest

from hyperpen.entities import EMPTY, INFINITY, Ball, Horoball, ObstacleFamily, Point, Tube, Unbounded
from hyperpen.enums import PenKind
from hyperpen.exceptions import DomainError, FamilyError
from hyperpen.models import geodesic_between, point_at, ray_from
from hyperpen.penetration import (
    IPP_PH_OFFSET,
    body_gap,
    check_family,
    contains,
    depth_matrix,
    entry_exit,
    entry_exit_scan,
    intersection_diameter,
    max_depth,
    pen_record,
    penetration,
    penetration_constant,
    penetration_table,
    shrink,
    signed_depth,
)
from hyperpen.utils import ext_float


@pytest.fixture
def unit_arc():
    """The semicircle from -1 to 1, anchored at its top (0, 1)."""
    return geodesic_between(-1, 1)


class TestShrink:
    def test_horoballs(self):
        assert shrink(Horoball(INFINITY, 1.0), 1.0).size == pytest.approx(math.e)
        assert shrink(Horoball(0, 1.0), 1.0).size == pytest.approx(math.exp(-1))

    def test_ball(self):
        assert shrink(Ball(Point(0, 1), 2.0), 0.5) == Ball(Point(0, 1), 1.5)
        assert shrink(Ball(Point(0, 1), 2.0), 2.0) is EMPTY
        assert not contains(EMPTY, Point(0, 1))

    def test_tube(self):
        t = Tube(geodesic_between(0, INFINITY), 1.0)
        assert shrink(t, 0.25).radius == 0.75


class TestSignedDepth:
    def test_horoball_at_infinity(self):
        assert signed_depth(Point(5, math.e), Horoball(INFINITY, 1.0)) == pytest.approx(1.0)

    def test_finite_horoball_top(self):
        assert signed_depth(Point(0, 1), Horoball(0, 1.0)) == pytest.approx(0.0)
        assert contains(Horoball(0, 1.0), Point(0, 0.5))

    def test_ball_centre(self):
        assert signed_depth(Point(0, 1), Ball(Point(0, 1), 2.0)) == 2.0

    def test_depth_matrix_matches(self):
        rng = np.random.default_rng(3)
        points = [Point(complex(*rng.normal(size=2)), math.exp(rng.normal())) for _ in range(20)]
        bodies = [Horoball(INFINITY, 2.0), Horoball(complex(0.5, 0.5), 1.0), Ball(Point(0, 1), 1.0)]
        m = depth_matrix(points, bodies)
        for i, p in enumerate(points):
            for j, body in enumerate(bodies):
                assert m[i, j] == pytest.approx(signed_depth(p, body), abs=1e-10)


class TestEntryExit:
    def test_horoball_at_infinity(self, unit_arc):
        lo, hi = entry_exit(unit_arc, Horoball(INFINITY, math.exp(-1)))
        assert lo == pytest.approx(-math.acosh(math.e))
        assert hi == pytest.approx(math.acosh(math.e))

    def test_miss(self, unit_arc):
        assert entry_exit(unit_arc, Horoball(INFINITY, 2.0)) is None
        assert pen_record(unit_arc, Horoball(INFINITY, 2.0)).value == 0.0

    def test_line_into_centre(self):
        g = geodesic_between(0, INFINITY)
        lo, hi = entry_exit(g, Horoball(INFINITY, 1.0))
        assert lo == pytest.approx(0.0)
        assert hi is Unbounded.POS

    def test_ray_is_clipped(self):
        g = ray_from(Point(0, 1), INFINITY)
        lo, hi = entry_exit(g, Ball(Point(0, 1), 1.0))
        assert lo == 0.0
        assert hi == pytest.approx(1.0)

    @pytest.mark.parametrize(
        "body",
        [
            Horoball(0.3, 1.5),
            Horoball(complex(0.6, -0.1), 1.2),
            Ball(Point(0.4, 1.2), 0.7),
            Ball(Point(complex(0.1, 0.3), 0.9), 1.3),
            Tube(geodesic_between(-2, 0.5), 0.8),
            Tube(geodesic_between(complex(0, -1), complex(0.2, 1)), 1.1),
        ],
    )
    def test_matches_scan(self, unit_arc, body):
        closed = entry_exit(unit_arc, body)
        scanned = entry_exit_scan(unit_arc, body)
        assert closed is not None and scanned is not None
        assert ext_float(closed[0]) == pytest.approx(scanned[0], abs=1e-7)
        assert ext_float(closed[1]) == pytest.approx(scanned[1], abs=1e-7)

    @pytest.mark.parametrize("offset", [complex(0.0067, 0.0224), complex(1e-4, -1e-4)])
    def test_ray_leaving_tube_near_core_endpoint(self, offset):
        end = complex(-2.1604, -0.4384)
        tube = Tube(geodesic_between(complex(3, 1), end), 0.0846)
        g = ray_from(point_at(tube.core, 0.0), end + offset)
        lo, hi = entry_exit(g, tube)
        assert lo == 0.0
        assert hi is not Unbounded.POS
        scanned = entry_exit_scan(g, tube, 0.0, 40.0)
        assert ext_float(hi) == pytest.approx(scanned[1], abs=1e-6)
        assert signed_depth(point_at(g, ext_float(hi) + 1.0), tube) < 0

    def test_length_is_continuous_in_the_endpoint(self, unit_arc):
        ball = Ball(Point(0.2, 0.8), 0.7)
        base = pen_record(unit_arc, ball).value
        gaps = [abs(pen_record(geodesic_between(-1, 1 + delta), ball).value - base) for delta in (1e-2, 1e-4, 1e-6)]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 1e-5

    def test_table_lists_met_bodies(self, unit_arc):
        bodies = [Horoball(INFINITY, 2.0), Horoball(INFINITY, 0.5)]
        assert list(penetration_table(unit_arc, bodies)) == [1]


class TestMaxDepth:
    def test_ball(self, unit_arc):
        ball = Ball(Point(0, 1), 1.0)
        assert max_depth(unit_arc, ball, -5, 5) == pytest.approx(1.0)

    def test_window_excludes_peak(self, unit_arc):
        hb = Horoball(INFINITY, 1.0)
        assert max_depth(unit_arc, hb, 1.0, 2.0) == pytest.approx(-math.log(math.cosh(1.0)))


class TestPenetrationMaps:
    def test_height_of_arc(self, unit_arc):
        value = penetration(unit_arc, Horoball(INFINITY, math.exp(-1)), PenKind.PH, -1)
        assert value == pytest.approx(2.0)

    def test_height_of_ball(self):
        g = geodesic_between(0, INFINITY)
        assert penetration(g, Ball(Point(0, 1), 1.5), PenKind.PH, 0) == pytest.approx(3.0)
        assert penetration(g, Ball(Point(0, 1), 1.5), PenKind.LENGTH, 0) == pytest.approx(3.0)

    def test_ipp_ph_offset(self):
        g = geodesic_between(INFINITY, 0.1)
        hb = Horoball(0, 1.0)
        ph = penetration(g, hb, PenKind.PH, INFINITY)
        ipp = penetration(g, hb, PenKind.IPP, INFINITY)
        assert ph == pytest.approx(2 * math.log(5))
        assert ipp - ph == pytest.approx(IPP_PH_OFFSET)

    def test_endpoint_at_centre(self):
        g = geodesic_between(1, INFINITY)
        assert penetration(g, Horoball(INFINITY, 1.0), PenKind.PH, 1) is Unbounded.POS

    def test_source_inside(self):
        g = ray_from(Point(0, 1), 2.0)
        with pytest.raises(DomainError):
            penetration(g, Ball(Point(0, 1), 1.0), PenKind.PH, Point(0, 1))

    def test_source_at_horoball_centre(self):
        g = geodesic_between(INFINITY, 0.0)
        with pytest.raises(DomainError):
            penetration(g, Horoball(INFINITY, 1.0), PenKind.LENGTH, INFINITY)

    def test_crp_needs_boundary_source(self):
        tube = Tube(geodesic_between(-1, 1), 0.5)
        g = ray_from(Point(0, 3), 0.5)
        with pytest.raises(DomainError):
            penetration(g, tube, PenKind.CRP, Point(0, 3))

    def test_ftp_along_core(self):
        tube = Tube(geodesic_between(0, INFINITY), 0.5)
        g = geodesic_between(-1, 3)
        value = penetration(g, tube, PenKind.FTP, -1)
        assert value == pytest.approx(math.log(3))


class TestPenetrationConstant:
    def test_values(self):
        assert penetration_constant(Horoball(INFINITY, 1.0), PenKind.LENGTH) == 0.0
        assert penetration_constant(Horoball(INFINITY, 1.0), PenKind.PH) == pytest.approx(
            2 * math.log(1 + math.sqrt(2))
        )

    @pytest.mark.parametrize(
        "body,kind",
        [
            (Ball(Point(0, 1), 1.0), PenKind.FTP),
            (Horoball(INFINITY, 1.0), PenKind.CRP),
            (Tube(geodesic_between(0, 1), 1.0), PenKind.PH),
        ],
    )
    def test_undefined(self, body, kind):
        with pytest.raises(DomainError):
            penetration_constant(body, kind)


class TestGaps:
    @pytest.mark.parametrize(
        "a,b,expected",
        [
            (Horoball(0, 1.0), Horoball(1, 1.0), 0.0),
            (Horoball(INFINITY, 1.0), Horoball(0, 1.0), 0.0),
            (Horoball(INFINITY, 1.0), Horoball(0.5, 0.25), math.log(4)),
            (Ball(Point(0, 1), 0.5), Ball(Point(0, math.exp(3)), 1.0), 1.5),
        ],
    )
    def test_body_gap(self, a, b, expected):
        assert body_gap(a, b) == pytest.approx(expected)

    def test_same_centre(self):
        assert body_gap(Horoball(INFINITY, 1.0), Horoball(INFINITY, 2.0)) is Unbounded.NEG

    def test_horoball_intersection(self):
        diam = intersection_diameter(Horoball(INFINITY, 1.0), Horoball(0, 2.0))
        assert diam == pytest.approx(2 * math.asinh(1.0))

    def test_disjoint_intersection(self):
        assert intersection_diameter(Horoball(0, 1.0), Horoball(2, 1.0)) == 0.0


class TestCheckFamily:
    def test_ford_circles(self):
        bodies = [Horoball(INFINITY, 1.0), Horoball(0, 1.0), Horoball(1, 1.0), Horoball(0.5, 0.25)]
        assert check_family(ObstacleFamily(bodies)) == pytest.approx(0.0, abs=1e-12)

    def test_overlap(self):
        fam = ObstacleFamily([Horoball(0, 1.0), Horoball(0.5, 1.0)])
        with pytest.raises(FamilyError) as exc_info:
            check_family(fam)
        assert exc_info.value.pair == (0, 1)
        assert exc_info.value.gap < 0

    def test_overlap_within_delta(self):
        fam = ObstacleFamily([Horoball(INFINITY, 1.0), Horoball(0, 2.0)], delta0=2.0)
        assert check_family(fam) == pytest.approx(-math.log(2))

    def test_mixed_bodies(self):
        fam = ObstacleFamily([Horoball(INFINITY, 10.0), Ball(Point(0, 1), 0.5)])
        assert check_family(fam) == pytest.approx(math.log(10) - 0.5)


def test_point_at_inside_entry(unit_arc):
    hb = Horoball(INFINITY, 0.5)
    lo, hi = entry_exit(unit_arc, hb)
    assert signed_depth(point_at(unit_arc, lo), hb) == pytest.approx(0.0, abs=1e-10)
