import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from hyperpen import heis
from hyperpen.entities import INFINITY, HeisPoint, QMat2, Quaternion, SiegelPoint
from hyperpen.exceptions import DegenerateGeodesicError, DomainError, FixesInfinityError, NotInUQError

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def assert_heis_close(p, q, tol=1e-9):
    assert list(p.zeta) == pytest.approx(list(q.zeta), abs=tol)
    assert p.v == pytest.approx(q.v, abs=tol)


def quat_tuple(z):
    return (z.x1, z.x2, z.x3, z.x4)


class TestHeisenbergGroup:
    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_group_axioms(self, seed):
        rng = np.random.default_rng(seed)
        p, q, r = (heis.random_heis(rng, 3) for _ in range(3))
        e = heis.heis_identity(3)
        assert_heis_close(heis.heis_mul(heis.heis_mul(p, q), r), heis.heis_mul(p, heis.heis_mul(q, r)))
        assert_heis_close(heis.heis_mul(p, e), p)
        assert_heis_close(heis.heis_mul(p, heis.heis_inv(p)), e)

    def test_not_commutative(self):
        p, q = HeisPoint([1], 0), HeisPoint([1j], 0)
        assert heis.heis_mul(p, q).v == -heis.heis_mul(q, p).v != 0

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            heis.heis_mul(HeisPoint([1], 0), HeisPoint([1, 1], 0))

    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_cygan_left_invariant(self, seed):
        rng = np.random.default_rng(seed)
        g, p, q = (heis.random_heis(rng) for _ in range(3))
        moved = heis.cygan(heis.heis_mul(g, p), heis.heis_mul(g, q))
        assert moved == pytest.approx(heis.cygan(p, q), rel=1e-7)
        assert heis.cygan_mod(p, q) >= heis.cygan(p, q) - 1e-12

    def test_norms(self):
        p = HeisPoint([complex(0, math.sqrt(3))], 4.0)
        assert heis.cygan_norm(p) == pytest.approx(math.sqrt(5))
        assert heis.cygan_mod_norm(p) == pytest.approx(math.sqrt(8))


class TestSiegel:
    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_heisenberg_translations(self, seed):
        rng = np.random.default_rng(seed)
        p, q = heis.random_heis(rng), heis.random_heis(rng)
        u = heis.u_matrix(p)
        assert heis.uq_check(u)
        image = heis.uq_apply(u, heis.heis_to_siegel(q))
        assert_heis_close(heis.siegel_to_heis(image), heis.heis_mul(p, q), tol=1e-8)

    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_siegel_cygan_mod(self, seed):
        p = heis.random_heis(np.random.default_rng(seed))
        assert heis.siegel_cygan_mod(heis.heis_to_siegel(p)) == pytest.approx(heis.cygan_mod_norm(p))

    def test_interior_point_is_not_heisenberg(self):
        with pytest.raises(DomainError):
            heis.siegel_to_heis(SiegelPoint(1, [0]))

    def test_involution_swaps_infinity(self):
        x0 = heis.x0_matrix()
        assert heis.uq_apply(x0, INFINITY) == SiegelPoint(0, [0])
        assert heis.uq_apply(x0, SiegelPoint(0, [0])) is INFINITY

    @pytest.mark.parametrize(
        "matrix", [heis.x0_matrix(), heis.diag_matrix(2 - 1j), heis.q_matrix(3) @ heis.q_matrix(3)]
    )
    def test_form_preserving(self, matrix):
        assert heis.require_uq(matrix) is matrix

    def test_not_in_uq(self):
        with pytest.raises(NotInUQError) as exc_info:
            heis.require_uq(2 * np.eye(3))
        assert exc_info.value.residual == pytest.approx(3.0)

    @pytest.mark.parametrize("t", [-2.0, 0.5, 3.0])
    def test_distance_along_c0(self, t):
        assert heis.c0_point(0).level == pytest.approx(2.0)
        assert heis.siegel_dist(heis.c0_point(0), heis.c0_point(t)) == pytest.approx(abs(t))
        assert heis.d_prime(heis.c0_point(0), heis.c0_point(t)) == pytest.approx(abs(t) / 2)

    def test_distance_needs_interior_points(self):
        with pytest.raises(DomainError):
            heis.siegel_dist(SiegelPoint(0, [0]), heis.c0_point(0))

    def test_horoball_membership(self):
        x = heis.c0_point(0)
        assert heis.in_siegel_horoball(x, 2.0) and heis.in_x0_horoball(x, 2.0)
        assert not heis.in_siegel_horoball(x, 2.5)
        assert not heis.in_x0_horoball(x, 2.5)


class TestTangency:
    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_discriminant_vanishes(self, seed):
        p = heis.random_heis(np.random.default_rng(seed))
        s = heis.tangency_s(p)
        assert s == pytest.approx(2 / heis.cygan_mod_norm(p) ** 2)
        assert heis.tangency_discriminant(p, s) == pytest.approx(0.0, abs=1e-9)
        assert heis.tangency_discriminant(p, 1.1 * s) < 0

    def test_origin_is_degenerate(self):
        with pytest.raises(DegenerateGeodesicError):
            heis.tangency_s(heis.heis_identity())

    def test_tangent_level_for_involution(self):
        assert heis.horoball_dist_complex(heis.x0_matrix(), 2.0) == pytest.approx(0.0)
        assert heis.horoball_dist_complex(heis.x0_matrix(), 2 * math.e) == pytest.approx(1.0)

    def test_overlap_is_negative(self):
        assert heis.horoball_dist_complex(heis.x0_matrix(), 1.0) < 0

    def test_fixes_infinity(self):
        with pytest.raises(FixesInfinityError):
            heis.horoball_dist_complex(heis.diag_matrix(2.0), 1.0)

    @given(seeds, st.floats(min_value=0.1, max_value=10.0))
    @settings(max_examples=50, deadline=None)
    def test_cygan_formula_matches_matrix_formula(self, seed, s0):
        rng = np.random.default_rng(seed)
        xi, xi_prime = heis.random_heis(rng), heis.random_heis(rng)
        s = heis.tangency_s(heis.heis_mul(heis.heis_inv(xi), xi_prime))
        via_matrix = heis.horoball_dist_complex(heis.tangent_horoball_matrix(xi), s, s0)
        assert heis.horoball_dist_via_cygan(xi, xi_prime, s0) == pytest.approx(via_matrix, abs=1e-9)

    def test_cygan_formula_same_point(self):
        p = HeisPoint([1], 1)
        with pytest.raises(DegenerateGeodesicError):
            heis.horoball_dist_via_cygan(p, p, 2.0)


class TestQuaternionic:
    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_unit_determinant(self, seed):
        m = heis.random_sl2h(np.random.default_rng(seed))
        assert heis.dieudonne(m) == pytest.approx(1.0)

    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_determinant_multiplicative(self, seed):
        rng = np.random.default_rng(seed)
        scale = QMat2(2, 0, 0, 1)
        m, n = heis.random_sl2h(rng), heis.random_sl2h(rng)
        assert heis.dieudonne(scale @ m) == pytest.approx(2.0)
        assert heis.dieudonne(m @ scale @ n) == pytest.approx(2.0)

    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_inverse(self, seed):
        m = heis.random_sl2h(np.random.default_rng(seed))
        e = m @ heis.qmat_inverse(m)
        assert quat_tuple(e.a) == pytest.approx((1, 0, 0, 0), abs=1e-8)
        assert quat_tuple(e.b) == pytest.approx((0, 0, 0, 0), abs=1e-8)
        assert quat_tuple(e.c) == pytest.approx((0, 0, 0, 0), abs=1e-8)
        assert quat_tuple(e.d) == pytest.approx((1, 0, 0, 0), abs=1e-8)

    @given(seeds, st.floats(min_value=0.05, max_value=5.0))
    @settings(max_examples=50, deadline=None)
    def test_vertical_coordinate(self, seed, t):
        rng = np.random.default_rng(seed)
        m = heis.random_sl2h(rng)
        z = heis.random_quaternion(rng)
        _, height = heis.poincare_extend(m, z, t)
        assert height == pytest.approx(heis.vertical(m, z, t), rel=1e-8)

    @given(seeds, st.floats(min_value=0.1, max_value=10.0))
    @settings(max_examples=50, deadline=None)
    def test_horoball_distance(self, seed, s):
        m = heis.random_sl2h(np.random.default_rng(seed))
        assume(m.c.norm2() > 1e-6)
        assert heis.horoball_dist_h5(m, s) == pytest.approx(heis.horoball_dist_h5_direct(m, s), abs=1e-8)

    def test_inversion(self):
        m = QMat2(0, 1, -1, 0)
        assert heis.horoball_dist_h5(m, 1.0) == pytest.approx(0.0)
        assert heis.horoball_dist_h5_direct(m, math.e) == pytest.approx(2.0)
        assert heis.sl2h_act(m, INFINITY) == Quaternion(0)

    def test_fixes_infinity(self):
        with pytest.raises(FixesInfinityError):
            heis.horoball_dist_h5(QMat2(1, 1, 0, 1), 1.0)
        assert heis.sl2h_act(QMat2(1, 1, 0, 1), INFINITY) is INFINITY


class TestTraceIdentity:
    def test_minus_sign_holds(self):
        p, q = Quaternion(0.3, 0.2, -0.5, 0.1), Quaternion(-0.4, 0.7, 0.2, 0.3)
        one = Quaternion(1)
        m = QMat2(one, p, Quaternion(), one) @ QMat2(one, Quaternion(), q, one)
        check = heis.eq35_check(m)
        assert check["passing"] == [-1]
        assert check["minus"] == pytest.approx(0.0, abs=1e-12)

    def test_sign_is_uniform(self):
        result = heis.eq35_sign(np.random.default_rng(0), samples=200)
        assert result["uniform"] == [-1]
        assert result["minus"] == 200
        assert result["plus"] < 200
