import pytest

from hyperpen.entities import INFINITY, Ball, Horoball, Point, Tube
from hyperpen.exceptions import UnsupportedError
from hyperpen.models import geodesic_between, ray_from
from hyperpen.scene import Scene, render


@pytest.fixture
def unit_scene():
    """Window [0, 1] drawn 100 pixels wide and 200 high."""
    return Scene(window=(0.0, 1.0), top=2.0, width=100)


class TestScene:
    def test_window_must_increase(self):
        with pytest.raises(ValueError):
            Scene(window=(1.0, 1.0))

    def test_dimensions(self, unit_scene):
        assert unit_scene.scale == 100.0
        assert unit_scene.height == 200

    def test_horoball_at_infinity(self, unit_scene):
        unit_scene.add_body(Horoball(INFINITY, 1.0))
        assert 'y1="100.000"' in unit_scene.shapes[0]

    def test_finite_horoball(self, unit_scene):
        unit_scene.add_body(Horoball(0.5, 0.5))
        assert unit_scene.shapes[0].startswith('<circle cx="50.000" cy="175.000" r="25.000"')

    def test_ball(self, unit_scene):
        unit_scene.add_body(Ball(Point(0.5, 1.0), 1.0))
        assert unit_scene.shapes[0].startswith('<circle cx="50.000"')

    def test_off_slice_bodies_are_skipped(self, unit_scene):
        unit_scene.add_body(Horoball(complex(0.5, 0.5), 0.5))
        unit_scene.add_body(Ball(Point(complex(0, 1), 1.0), 0.5))
        assert unit_scene.shapes == []

    def test_tubes(self, unit_scene):
        with pytest.raises(UnsupportedError):
            unit_scene.add_body(Tube(geodesic_between(0, 1), 0.5))

    def test_vertical_geodesic(self, unit_scene):
        unit_scene.add_geodesic(geodesic_between(0.5, INFINITY))
        assert 'x1="50.000"' in unit_scene.shapes[0]

    def test_ray_starts_at_source(self, unit_scene):
        unit_scene.add_geodesic(ray_from(Point(0.5, 1.0), 1.0))
        assert unit_scene.shapes[0].startswith('<path d="M 50.000 100.000')


def test_render():
    svg = render(
        [Horoball(INFINITY, 1.0), Horoball(0, 1.0), Tube(geodesic_between(0, 1), 0.1)],
        [geodesic_between(-1, 1), geodesic_between(-0.5, 1.5)],
        (-1.0, 2.0),
    )
    assert svg.startswith("<svg")
    assert svg.endswith("</svg>\n")
    assert svg.count("<path") == 2
    assert 'stroke="#c0392b"' in svg
