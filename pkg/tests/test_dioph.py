import math

import pytest

from hyperpen import dioph
from hyperpen.entities import INFINITY, CFExpansion, Horoball
from hyperpen.enums import Ring
from hyperpen.exceptions import DomainError, FiniteExpansionError, PreconditionError, UnsupportedError


class TestExpansions:
    def test_sqrt_two(self):
        e = dioph.cf_expand(math.sqrt(2), 10)
        assert e.a0 == 1
        assert list(e.digits) == [2] * 10

    def test_rational(self):
        with pytest.raises(FiniteExpansionError) as exc_info:
            dioph.cf_expand(0.5, 5)
        assert exc_info.value.digits == [0, 2]

    @pytest.mark.parametrize(
        "d,a0,period",
        [(2, 1, (2,)), (3, 1, (1, 2)), (7, 2, (1, 1, 1, 4)), (13, 3, (1, 1, 1, 1, 6))],
    )
    def test_cf_sqrt(self, d, a0, period):
        e = dioph.cf_sqrt(d)
        assert (e.a0, e.period) == (a0, period)
        assert dioph.cf_value(e) == pytest.approx(math.sqrt(d))

    def test_perfect_square(self):
        with pytest.raises(FiniteExpansionError):
            dioph.cf_sqrt(9)

    def test_convergents(self):
        assert dioph.convergents(dioph.cf_sqrt(2), 4) == [(1, 1), (3, 2), (7, 5), (17, 12)]


class TestParse:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("sqrt:2", CFExpansion(1, (), (2,))),
            ("cf:1,1,…", CFExpansion(1, (), (1,))),
            ("cf:1,1,...", CFExpansion(1, (), (1,))),
            ("cf:0;3,(1,2)", CFExpansion(0, (3,), (1, 2))),
            ("cf:2,1,5", CFExpansion(2, (1, 5))),
        ],
    )
    def test_forms(self, text, expected):
        assert dioph.parse_cf(text) == expected

    def test_float(self):
        e = dioph.parse_cf(str(math.pi))
        assert (e.a0, e.digits[:4]) == (3, (7, 15, 1, 292))

    @pytest.mark.parametrize("text", ["cf:", "cf:3..."])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            dioph.parse_cf(text)


class TestApproximationConstant:
    def test_sqrt_two(self):
        assert dioph.approx_constant(dioph.cf_sqrt(2)) == pytest.approx(1 / (2 * math.sqrt(2)))

    def test_golden(self):
        assert dioph.approx_constant(dioph.parse_cf("cf:1,1...")) == pytest.approx(1 / math.sqrt(5))

    def test_needs_period(self):
        with pytest.raises(UnsupportedError):
            dioph.approx_constant(CFExpansion(0, (1, 2, 3)))

    def test_bruteforce_agrees(self):
        brute = dioph.approx_constant_bruteforce(math.sqrt(2))
        assert brute == pytest.approx(1 / (2 * math.sqrt(2)), abs=1e-5)

    def test_gaussian_rational(self):
        with pytest.raises(DomainError):
            dioph.complex_approx_constant(complex(0.5, 0.5), 5)

    def test_gaussian_irrational(self):
        c = dioph.complex_approx_constant(complex(math.sqrt(2), math.sqrt(3)), 30)
        assert 0 < c < 1


class TestExcursions:
    @pytest.mark.parametrize("a", [1, 2, 3, 7])
    def test_periodic_heights(self, a):
        heights = dioph.excursions(CFExpansion(0, (), (a,)), 40)
        expected = 2 * math.log(math.sqrt(a * a + 4) / 2)
        assert heights[20:] == pytest.approx([expected] * 20)

    def test_spectrum_correspondence(self):
        e = dioph.cf_sqrt(2)
        h = dioph.limsup_estimate(dioph.excursions(e, 20))
        # heights see the magnitude 1 / c, the spectrum map sees 2 / c
        c = dioph.approx_constant(e)
        assert h == pytest.approx(2 * math.log(1 / (2 * c)))
        assert dioph.spectrum_map(c) - h == pytest.approx(2 * math.log(2))

    @pytest.mark.parametrize("text", ["cf:1,1...", "sqrt:2", "sqrt:7", "cf:0;(1,3)", "cf:2;(1,1,2)"])
    def test_magnitude_limsup(self, text):
        e = dioph.parse_cf(text)
        magnitudes = dioph.excursion_magnitudes(e, 60)
        assert max(magnitudes[30:]) / 2 == pytest.approx(1 / (2 * dioph.approx_constant(e)), abs=1e-6)

    def test_finite_expansion_truncates(self):
        heights = dioph.excursions(CFExpansion(0, (1, 2, 3, 4)), 10)
        assert len(heights) < 10

    def test_geodesic_endpoints(self):
        g = dioph.excursion_geodesic(dioph.cf_sqrt(2), 20)
        assert g.xi_minus.real == pytest.approx(-(math.sqrt(2) - 1))
        assert g.xi_plus.real == pytest.approx(1 + math.sqrt(2))

    def test_limsup_estimate(self):
        assert dioph.limsup_estimate([9.0, 1.0, 2.0, 3.0]) == 3.0
        with pytest.raises(PreconditionError):
            dioph.limsup_estimate([])

    def test_spectrum_inverse(self):
        assert dioph.spectrum_map(dioph.lagrange_from_height(7.5)) == pytest.approx(7.5)
        with pytest.raises(PreconditionError):
            dioph.spectrum_map(0.0)


class TestGaussianIntegers:
    def test_gcd(self):
        assert abs(dioph.gauss_gcd(complex(2, 0), complex(1, 1))) == pytest.approx(math.sqrt(2))
        assert abs(dioph.gauss_gcd(complex(3, 0), complex(2, 1))) == pytest.approx(1.0)

    def test_divmod(self):
        q, r = dioph.gauss_divmod(complex(7, 3), complex(2, 1))
        assert q * complex(2, 1) + r == complex(7, 3)
        assert abs(r) < abs(complex(2, 1))


class TestFord:
    def test_rational_bound_one(self):
        bodies = dioph.ford_bodies(1, Ring.RATIONAL)
        assert bodies[0] == Horoball(INFINITY, 1.0)
        assert sorted(b.center.real for b in bodies[1:]) == [-1, 0, 1, 2]
        assert all(b.size == 1.0 for b in bodies)

    def test_diameters(self):
        bodies = dioph.ford_bodies(3, Ring.RATIONAL, (complex(0, 0), complex(1, 0)))
        sizes = {round(b.center.real, 9): b.size for b in bodies[1:]}
        assert sizes[round(1 / 3, 9)] == pytest.approx(1 / 9)
        assert sizes[0.5] == pytest.approx(0.25)

    def test_bound_positive(self):
        with pytest.raises(PreconditionError):
            dioph.ford_bodies(0, Ring.RATIONAL)

    @pytest.mark.parametrize("ring", ["rational", "gaussian"])
    def test_family_is_disjoint(self, ring):
        fam = dioph.ford_family(4, ring)
        assert fam.ring is Ring(ring)
        assert fam.count == len(fam.bodies) > 1
        obstacles = fam.as_obstacles()
        assert obstacles.designated == Horoball(INFINITY, 1.0)
        assert "Ford" in obstacles.note
