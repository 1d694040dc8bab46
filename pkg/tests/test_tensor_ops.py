import numpy as np
import pytest

from depthedge.errors import ConfigurationError, ShapeError
from depthedge.tensor_ops import (
    ConvParams,
    bilinear_sample,
    concat_channels,
    conv2d,
    gaussian_blur,
    gaussian_kernel_1d,
    image_gradients,
    leaky_relu,
    sigmoid,
    upsample_bilinear,
)

from oracles import conv2d_loops, gaussian_blur_direct, resize_scalar, sample_scalar


def _conv(x, k, b, stride=1, pad=0):
    return conv2d(x, ConvParams(kernel=k, bias=b, stride=stride, padding=pad))


class TestConv2d:
    def test_all_ones_3x3(self):
        x = np.ones((1, 1, 3, 3), np.float32)
        k = np.ones((1, 1, 3, 3), np.float32)
        out = _conv(x, k, np.zeros(1), stride=1, pad=1)
        expected = np.array([[4, 6, 4], [6, 9, 6], [4, 6, 4]], np.float32)
        np.testing.assert_allclose(out[0, 0], expected, rtol=1e-6)

    def test_identity_kernel(self):
        rng = np.random.default_rng(3)
        x = rng.random((2, 1, 5, 7), dtype=np.float32)
        k = np.ones((1, 1, 1, 1), np.float32)
        out = _conv(x, k, np.zeros(1))
        np.testing.assert_array_equal(out, x)

    def test_stride2_output_dims(self):
        x = np.zeros((1, 1, 4, 4), np.float32)
        k = np.zeros((1, 1, 3, 3), np.float32)
        out = _conv(x, k, np.zeros(1), stride=2, pad=1)
        assert out.shape == (1, 1, 2, 2)

    def test_matches_loop_oracle_randomized(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            n = int(rng.integers(1, 3))
            c = int(rng.integers(1, 5))
            oc = int(rng.integers(1, 5))
            h = int(rng.integers(1, 9))
            w = int(rng.integers(1, 9))
            k = int(rng.choice([1, 3]))
            stride = int(rng.integers(1, 3))
            pad = int(rng.integers(0, 3))
            if (h + 2 * pad - k) < 0 or (w + 2 * pad - k) < 0:
                continue
            x = rng.standard_normal((n, c, h, w)).astype(np.float32)
            kern = rng.standard_normal((oc, c, k, k)).astype(np.float32)
            bias = rng.standard_normal(oc).astype(np.float32)
            got = _conv(x, kern, bias, stride=stride, pad=pad)
            want = conv2d_loops(x, kern, bias, stride, pad)
            np.testing.assert_allclose(got, want, rtol=1e-5, atol=1e-5)

    def test_linearity_with_zero_bias(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((1, 3, 6, 6)).astype(np.float32)
        y = rng.standard_normal((1, 3, 6, 6)).astype(np.float32)
        k = rng.standard_normal((4, 3, 3, 3)).astype(np.float32)
        b = np.zeros(4, np.float32)
        lhs = _conv(2.0 * x + 3.0 * y, k, b, pad=1)
        rhs = 2.0 * _conv(x, k, b, pad=1) + 3.0 * _conv(y, k, b, pad=1)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-5, atol=1e-5)

    def test_channel_mismatch_names_both_shapes(self):
        x = np.zeros((1, 2, 4, 4), np.float32)
        k = np.zeros((1, 3, 3, 3), np.float32)
        with pytest.raises(ShapeError, match=r"1, 2, 4, 4.*1, 3, 3, 3"):
            _conv(x, k, np.zeros(1), pad=1)

    def test_kernel_larger_than_padded_input_rejected(self):
        x = np.zeros((1, 1, 2, 2), np.float32)
        k = np.zeros((1, 1, 3, 3), np.float32)
        with pytest.raises(ConfigurationError):
            _conv(x, k, np.zeros(1), stride=1, pad=0)

    def test_repeat_calls_bit_identical(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((1, 4, 8, 8)).astype(np.float32)
        k = rng.standard_normal((4, 4, 3, 3)).astype(np.float32)
        b = rng.standard_normal(4).astype(np.float32)
        a = _conv(x, k, b, stride=1, pad=1)
        c = _conv(x, k, b, stride=1, pad=1)
        assert a.tobytes() == c.tobytes()

    def test_outputs_finite_for_finite_inputs(self):
        rng = np.random.default_rng(11)
        x = (rng.standard_normal((1, 2, 6, 6)) * 1e3).astype(np.float32)
        k = (rng.standard_normal((3, 2, 3, 3)) * 1e3).astype(np.float32)
        out = _conv(x, k, np.zeros(3, np.float32), pad=1)
        assert np.isfinite(out).all()


class TestActivations:
    def test_sigmoid_zero(self):
        assert sigmoid(np.zeros((1, 1, 1, 1), np.float32))[0, 0, 0, 0] == 0.5

    def test_leaky_relu_negative(self):
        out = leaky_relu(np.array(-1.0, np.float32), slope=0.2)
        assert np.isclose(out, -0.2)

    def test_sigmoid_saturation(self):
        v = sigmoid(np.array([20.0, -20.0], np.float32))
        assert abs(v[0] - 1.0) < 1e-8
        assert abs(v[1] - 0.0) < 1e-8

    def test_leaky_relu_positive_passthrough(self):
        x = np.array([0.0, 0.5, 3.0], np.float32)
        np.testing.assert_array_equal(leaky_relu(x), x)


class TestUpsample:
    def test_constant_stays_constant(self):
        x = np.full((1, 2, 3, 3), 0.7, np.float32)
        out = upsample_bilinear(x, 2)
        assert out.shape == (1, 2, 6, 6)
        np.testing.assert_allclose(out, 0.7, rtol=1e-6)

    def test_factor_one_is_identity(self):
        rng = np.random.default_rng(0)
        x = rng.random((1, 1, 4, 5), dtype=np.float32)
        out = upsample_bilinear(x, 1)
        assert out.tobytes() == x.tobytes()

    def test_2x2_against_scalar_oracle(self):
        x = np.array([[0.0, 1.0], [2.0, 3.0]], np.float32)
        out = upsample_bilinear(x[None, None], 2)[0, 0]
        expected = np.array(
            [
                [0.0, 0.25, 0.75, 1.0],
                [0.5, 0.75, 1.25, 1.5],
                [1.5, 1.75, 2.25, 2.5],
                [2.0, 2.25, 2.75, 3.0],
            ]
        )
        np.testing.assert_allclose(out, expected, atol=1e-6)
        # same values from the scalar oracle, point by point
        np.testing.assert_allclose(out, resize_scalar(x, 4, 4), atol=1e-6)

    def test_random_against_scalar_oracle(self):
        rng = np.random.default_rng(9)
        for factor in (2, 3):
            x = rng.random((4, 6), dtype=np.float32)
            got = upsample_bilinear(x[None, None], factor)[0, 0]
            np.testing.assert_allclose(
                got, resize_scalar(x, 4 * factor, 6 * factor), atol=1e-5
            )

    def test_preserves_bounds(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            x = rng.standard_normal((1, 1, 5, 4)).astype(np.float32)
            out = upsample_bilinear(x, 2)
            assert out.min() >= x.min() - 1e-6
            assert out.max() <= x.max() + 1e-6

    def test_bad_factor(self):
        with pytest.raises(ConfigurationError):
            upsample_bilinear(np.zeros((1, 1, 2, 2), np.float32), 0)


class TestConcat:
    def test_channel_counts(self):
        a = np.zeros((1, 2, 4, 4), np.float32)
        b = np.zeros((1, 3, 4, 4), np.float32)
        assert concat_channels(a, b).shape == (1, 5, 4, 4)

    def test_values_preserved(self):
        rng = np.random.default_rng(1)
        a = rng.random((1, 2, 3, 3), dtype=np.float32)
        b = rng.random((1, 3, 3, 3), dtype=np.float32)
        out = concat_channels(a, b)
        np.testing.assert_array_equal(out[:, :2], a)
        np.testing.assert_array_equal(out[:, 2:], b)

    def test_spatial_mismatch(self):
        a = np.zeros((1, 1, 4, 4), np.float32)
        b = np.zeros((1, 1, 4, 5), np.float32)
        with pytest.raises(ShapeError):
            concat_channels(a, b)

    def test_zero_channel_rejected(self):
        a = np.zeros((1, 1, 4, 4), np.float32)
        b = np.zeros((1, 0, 4, 4), np.float32)
        with pytest.raises(ShapeError):
            concat_channels(a, b)


class TestBilinearSample:
    def _identity_grid(self, h, w):
        gx, gy = np.meshgrid(np.arange(w, dtype=np.float32), np.arange(h, dtype=np.float32))
        return np.stack([gx, gy], axis=-1)[None]

    def test_identity_grid(self):
        rng = np.random.default_rng(2)
        img = rng.random((1, 3, 5, 6), dtype=np.float32)
        out = bilinear_sample(img, self._identity_grid(5, 6))
        np.testing.assert_allclose(out, img, atol=1e-6)

    def test_shifted_ramp_clamps_last_column(self):
        w = 6
        ramp = np.tile(np.arange(w, dtype=np.float32), (4, 1))
        grid = self._identity_grid(4, w)
        grid[..., 0] += 1.0
        out = bilinear_sample(ramp[None, None], grid)[0, 0]
        expected = np.minimum(np.arange(w) + 1, w - 1).astype(np.float32)
        np.testing.assert_allclose(out, np.tile(expected, (4, 1)), atol=1e-6)

    def test_far_out_of_range_clamps_to_corner(self):
        rng = np.random.default_rng(4)
        img = rng.random((1, 1, 3, 3), dtype=np.float32)
        grid = np.full((1, 2, 2, 2), -100.0, np.float32)
        out = bilinear_sample(img, grid)
        np.testing.assert_allclose(out, img[0, 0, 0, 0], atol=1e-7)

    def test_matches_scalar_oracle_at_random_coords(self):
        rng = np.random.default_rng(6)
        img = rng.random((3, 4), dtype=np.float32)
        grid = (rng.random((1, 5, 5, 2), dtype=np.float32) * 6.0) - 1.0
        out = bilinear_sample(img[None, None], grid)[0, 0]
        for i in range(5):
            for j in range(5):
                want = sample_scalar(img, grid[0, i, j, 1], grid[0, i, j, 0])
                assert abs(out[i, j] - want) < 1e-5


class TestImageGradients:
    def test_constant_field(self):
        x = np.full((1, 1, 4, 4), 2.5, np.float32)
        dx, dy = image_gradients(x)
        assert not dx.any() and not dy.any()

    def test_horizontal_ramp(self):
        x = np.tile(np.arange(5, dtype=np.float32), (4, 1))[None, None]
        dx, dy = image_gradients(x)
        expected = np.ones_like(x)
        expected[..., -1] = 0.0
        np.testing.assert_array_equal(dx, expected)
        assert not dy.any()

    def test_two_by_two(self):
        # by the stencil dy[i,j] = x[i+1,j] - x[i,j]: dy[0,1] = 8 - 2 = 6
        x = np.array([[0.0, 2.0], [4.0, 8.0]], np.float32)[None, None]
        dx, dy = image_gradients(x)
        np.testing.assert_array_equal(dx[0, 0], [[2, 0], [4, 0]])
        np.testing.assert_array_equal(dy[0, 0], [[4, 6], [0, 0]])

    def test_degenerate_dims(self):
        with pytest.raises(ShapeError):
            image_gradients(np.zeros((1, 1, 1, 4), np.float32))


class TestGaussianBlur:
    def test_constant_fixed_point(self):
        x = np.full((1, 1, 9, 9), 0.3, np.float32)
        out = gaussian_blur(x, 5, 1.0)
        np.testing.assert_allclose(out, 0.3, atol=1e-6)

    def test_impulse_profile_matches_kernel(self):
        x = np.zeros((1, 1, 21, 21), np.float32)
        x[0, 0, 10, 10] = 1.0
        out = gaussian_blur(x, 7, 1.5)[0, 0]
        k = gaussian_kernel_1d(7, 1.5)
        np.testing.assert_allclose(out[10, 7:14], k * k[3], atol=1e-6)
        np.testing.assert_allclose(out[7:14, 10], k * k[3], atol=1e-6)

    def test_kernel_size_one_identity(self):
        rng = np.random.default_rng(8)
        x = rng.random((1, 2, 4, 4), dtype=np.float32)
        np.testing.assert_array_equal(gaussian_blur(x, 1, 1.0), x)

    def test_even_kernel_rejected(self):
        with pytest.raises(ConfigurationError):
            gaussian_blur(np.zeros((1, 1, 4, 4), np.float32), 4, 1.0)

    def test_matches_direct_2d_oracle(self):
        rng = np.random.default_rng(10)
        plane = rng.random((8, 9), dtype=np.float32)
        got = gaussian_blur(plane[None, None], 5, 1.2)[0, 0]
        np.testing.assert_allclose(got, gaussian_blur_direct(plane, 5, 1.2), atol=1e-5)

    def test_mean_preserved_on_constant(self):
        x = np.full((1, 1, 6, 6), 1.7, np.float32)
        out = gaussian_blur(x, 25, 25 / 6.0)
        assert abs(float(out.mean()) - 1.7) < 1e-6
