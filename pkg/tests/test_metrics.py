import math

import numpy as np
import pytest

from depthedge.errors import DegeneracyError, DomainError
from depthedge.metrics import (
    MetricsReport,
    compute_metrics,
    lsq_align_inverse,
    median_align,
)


class TestComputeMetrics:
    def test_perfect_prediction(self):
        g = np.array([1.0, 2.0, 5.0, 40.0])
        r = compute_metrics(g, g)
        assert r.as_tuple() == (0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0)

    def test_two_pixel_hand_case(self):
        r = compute_metrics(np.array([2.0, 4.0]), np.array([1.0, 4.0]))
        assert abs(r.abs_rel - 0.5) < 1e-9
        assert abs(r.sq_rel - 0.5) < 1e-9
        assert abs(r.rmse - math.sqrt(0.5)) < 1e-9
        assert abs(r.rmse_log - math.sqrt(math.log(2.0) ** 2 / 2)) < 1e-9
        assert r.a1 == 0.5
        # max ratio is 2, which exceeds 1.25^2 and 1.25^3 as well
        assert r.a2 == 0.5
        assert r.a3 == 0.5

    def test_uniform_twenty_percent_over(self):
        g = np.array([1.0, 3.0, 7.0])
        r = compute_metrics(1.2 * g, g)
        assert abs(r.abs_rel - 0.2) < 1e-12
        assert r.a1 == 1.0

    def test_mask_and_cap(self):
        g = np.array([1.0, 2.0, 200.0])
        p = np.array([1.0, 2.0, 200.0])
        r = compute_metrics(p, g, cap=80.0)
        # both clamped to 80 -> still perfect
        assert r.abs_rel == 0.0
        r2 = compute_metrics(p, g, valid_mask=np.array([True, True, False]))
        assert r2.abs_rel == 0.0

    def test_prediction_floor(self):
        g = np.array([1.0])
        r = compute_metrics(np.array([1e-9]), g)
        assert np.isfinite(r.rmse_log)

    def test_empty_mask_rejected(self):
        with pytest.raises(DomainError):
            compute_metrics(np.ones(3), np.ones(3), valid_mask=np.zeros(3, bool))

    def test_nonpositive_gt_rejected(self):
        with pytest.raises(DomainError):
            compute_metrics(np.ones(2), np.array([1.0, 0.0]))

    def test_permutation_invariance(self):
        rng = np.random.default_rng(0)
        p = rng.uniform(0.5, 10, 50)
        g = rng.uniform(0.5, 10, 50)
        perm = rng.permutation(50)
        base = compute_metrics(p, g).as_tuple()
        shuf = compute_metrics(p[perm], g[perm]).as_tuple()
        np.testing.assert_allclose(shuf, base, rtol=1e-12)

    def test_delta_fractions_monotone_on_random_inputs(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = int(rng.integers(1, 40))
            p = rng.uniform(0.1, 20.0, n)
            g = rng.uniform(0.1, 20.0, n)
            r = compute_metrics(p, g)
            assert r.a1 <= r.a2 <= r.a3

    def test_csv_shape(self):
        assert len(MetricsReport.CSV_HEADER.split(",")) == 7


class TestMedianAlign:
    def test_double_scale_recovers_gt(self):
        g = np.array([1.0, 2.0, 3.0, 9.0])
        np.testing.assert_allclose(median_align(2.0 * g, g), g)

    def test_identity(self):
        g = np.array([1.0, 2.0, 3.0])
        np.testing.assert_allclose(median_align(g, g), g)

    def test_hand_medians(self):
        pred = np.array([1.0, 2.0, 3.0])
        gt = np.array([2.0, 4.0, 6.0])
        np.testing.assert_allclose(median_align(pred, gt), 2.0 * pred)

    def test_scaled_inputs_score_zero_abs_rel(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            g = rng.uniform(0.5, 30.0, 25)
            k = float(rng.uniform(0.1, 10.0))
            aligned = median_align(k * g, g)
            assert compute_metrics(aligned, g).abs_rel < 1e-12


class TestLsqAlignInverse:
    def test_perfect_inverse(self):
        g = np.array([1.0, 2.0, 4.0, 8.0])
        s, b = lsq_align_inverse(1.0 / g, g)
        assert abs(s - 1.0) < 1e-9 and abs(b) < 1e-9

    def test_affine_recovery(self):
        g = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
        pred = 0.5 / g + 0.1
        s, b = lsq_align_inverse(pred, g)
        assert abs(s - 2.0) < 1e-6
        assert abs(b + 0.2) < 1e-6
        np.testing.assert_allclose(s * pred + b, 1.0 / g, atol=1e-9)

    def test_constant_prediction_degenerate(self):
        with pytest.raises(DegeneracyError):
            lsq_align_inverse(np.full(5, 0.3), np.arange(1.0, 6.0))

    def test_optimality_beats_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            g = rng.uniform(1.0, 50.0, 30)
            pred = rng.uniform(0.05, 1.0, 30)
            s, b = lsq_align_inverse(pred, g)
            y = 1.0 / g
            fit = ((s * pred + b - y) ** 2).sum()
            ident = ((pred - y) ** 2).sum()
            assert fit <= ident + 1e-12
