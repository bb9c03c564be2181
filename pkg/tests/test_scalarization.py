import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moead.scalarization import (
    awt_weights,
    scale_objectives,
    scaling_simple,
    scalarize_awt,
    scalarize_ipbi,
    scalarize_pbi,
    scalarize_ws,
    scalarize_wt,
    update_reference_points,
)

Z0 = np.zeros(2)


class TestReferencePoints:
    def test_min_over_history(self):
        z_hat, _ = update_reference_points([[1, 2], [0, 3]])
        np.testing.assert_array_equal(z_hat, [0, 2])

    def test_single_point(self):
        z_hat, z_tilde = update_reference_points([[4.0, 5.0]])
        np.testing.assert_array_equal(z_hat, [4, 5])
        np.testing.assert_array_equal(z_tilde, [4, 5])

    def test_monotone_update(self):
        z_hat, _ = update_reference_points([[1, 2], [0, 3]])
        z_hat, _ = update_reference_points([[-1, 5]], z_hat)
        np.testing.assert_array_equal(z_hat, [-1, 2])

    def test_nadir_from_current_sets(self):
        z_hat, z_tilde = update_reference_points([[0, 0]], np.array([5.0, 5.0]), Y_current=[[1, 9], [3, 2]])
        np.testing.assert_array_equal(z_hat, [0, 0])
        np.testing.assert_array_equal(z_tilde, [3, 9])

    def test_non_finite(self):
        with pytest.raises(ValueError):
            update_reference_points([[np.nan, 1.0]])


class TestScaling:
    def test_ideal_nadir_mid(self):
        zh, zt = np.array([1.0, -2.0]), np.array([3.0, 2.0])
        np.testing.assert_array_equal(scale_objectives(zh, zh, zt), [0, 0])
        np.testing.assert_array_equal(scale_objectives(zt, zh, zt), [1, 1])
        np.testing.assert_allclose(scale_objectives((zh + zt) / 2, zh, zt), [0.5, 0.5])

    def test_degenerate_dimension(self):
        out = scale_objectives(np.array([[2.0, 7.0]]), np.array([0.0, 7.0]), np.array([4.0, 7.0]))
        np.testing.assert_array_equal(out, [[0.5, 0.0]])

    def test_simple_passes_unit_reference(self):
        Y, zh, zt = scaling_simple(np.array([[1.0, 2.0]]), np.zeros(2), np.full(2, 4.0))
        np.testing.assert_array_equal(zh, [0, 0])
        np.testing.assert_array_equal(zt, [1, 1])
        np.testing.assert_allclose(Y, [[0.25, 0.5]])


class TestAggregations:
    def test_ws(self):
        assert scalarize_ws([3, 7], [1, 0], Z0) == 3
        assert scalarize_ws([2, 4], [0.5, 0.5], Z0) == 3
        assert scalarize_ws([1, 1], [0.3, 0.7], [1, 1]) == 0

    def test_wt(self):
        assert scalarize_wt([2, 4], [0.5, 0.5], Z0) == 2
        assert scalarize_wt([1, 1], [0.3, 0.7], [1, 1]) == 0
        assert scalarize_wt([3, 7], [1, 0], Z0) == 3

    def test_awt_symmetric_row(self):
        np.testing.assert_allclose(awt_weights([0.5, 0.5]), [0.5, 0.5])
        Y = np.array([[2.0, 4.0], [5.0, 1.0]])
        W = np.full((2, 2), 0.5)
        np.testing.assert_array_equal(scalarize_awt(Y, W, Z0), scalarize_wt(Y, W, Z0))

    def test_awt_rho_oracle(self):
        eps = 1e-4
        lam = [1.0, 0.0]
        inv = [1.0 / (l + eps) for l in lam]
        rho = [v / sum(inv) for v in inv]
        np.testing.assert_allclose(awt_weights(lam, eps), rho, rtol=0, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(0, 1), min_size=2, max_size=6))
    def test_awt_rows_sum_to_one(self, lam):
        assert awt_weights(lam).sum() == pytest.approx(1.0, abs=1e-12)

    def test_pbi(self):
        assert scalarize_pbi([3, 4], [1, 0], Z0, 5.0) == pytest.approx(23.0)
        # collinear: d2 = 0, result = |f - z|
        assert scalarize_pbi([3, 3], [0.5, 0.5], Z0, 5.0) == pytest.approx(math.sqrt(18))
        assert scalarize_pbi([1, 2], [0.2, 0.8], [1, 2], 5.0) == 0

    def test_ipbi(self):
        assert scalarize_ipbi([0, 0], [1, 0], np.array([3.0, 4.0]), 2.0) == pytest.approx(5.0)
        assert scalarize_ipbi([1, 1], [0.5, 0.5], np.array([4.0, 4.0]), 2.0) == pytest.approx(-math.sqrt(18))
        assert scalarize_ipbi([2, 2], [0.3, 0.7], np.array([2.0, 2.0]), 2.0) == 0

    def test_pbi_theta_zero_is_projection(self):
        rng = np.random.default_rng(0)
        Y, W = rng.random((20, 3)), rng.random((20, 3))
        d1 = np.abs(np.sum(Y * W, axis=1)) / np.linalg.norm(W, axis=1)
        np.testing.assert_allclose(scalarize_pbi(Y, W, np.zeros(3), 0.0), d1)

    def test_zero_norm_weight(self):
        with pytest.raises(ValueError):
            scalarize_pbi([1, 1], [0, 0], Z0)
        with pytest.raises(ValueError):
            scalarize_ipbi([1, 1], [0, 0], Z0)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            scalarize_wt([1, 2, 3], [0.5, 0.5], Z0)

    def test_dense_broadcast(self):
        rng = np.random.default_rng(1)
        W, Y = rng.random((5, 2)), rng.random((7, 2))
        F = scalarize_wt(Y[None, :, :], W[:, None, :], Z0)
        assert F.shape == (5, 7)
        assert F[3, 4] == scalarize_wt(Y[4], W[3], Z0)

    def test_wt_below_ws_on_simplex(self):
        rng = np.random.default_rng(2)
        W = rng.dirichlet(np.ones(3), 50)
        D = rng.random((50, 3))
        assert np.all(scalarize_wt(D, W, np.zeros(3)) <= scalarize_ws(D, W, np.zeros(3)) + 1e-15)

    @pytest.mark.parametrize(
        "fn", [scalarize_ws, scalarize_wt, scalarize_awt, lambda Y, W, z: scalarize_pbi(Y, W, z, 5.0)]
    )
    def test_monotone_along_ray(self, fn):
        lam = np.array([0.3, 0.7])
        z = np.array([1.0, -1.0])
        vals = [float(fn(z + s * lam, lam, z)) for s in (0, 0.5, 1, 2)]
        assert vals == sorted(vals)
        assert vals[0] == pytest.approx(0.0)

    def test_ipbi_monotone_towards_nadir(self):
        lam = np.array([0.3, 0.7])
        zt = np.array([5.0, 5.0])
        vals = [float(scalarize_ipbi(zt - s * lam, lam, zt)) for s in (0, 0.5, 1, 2)]
        assert vals == sorted(vals, reverse=True)
