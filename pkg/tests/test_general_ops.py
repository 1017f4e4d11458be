"""Oracle tests for the nine cross-modality operators."""

from __future__ import annotations

import numpy as np
import pytest

from degbench.ops import general


def checkerboard(size: int) -> np.ndarray:
    yy, xx = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    return ((yy + xx) % 2).astype(np.float64)


class TestGaussianNoise:
    def test_sigma_zero_byte_identical(self):
        img = np.random.default_rng(0).random((16, 16))
        out = general.gaussian_noise(img, 0.0, seed=7)
        assert np.array_equal(out, img)

    def test_noise_std_statistical_oracle(self):
        img = np.full((64, 64), 0.5)
        out = general.gaussian_noise(img, 0.1, seed=3)
        measured = np.std(out - img)
        assert 0.09 <= measured <= 0.11

    def test_same_seed_byte_equal(self):
        img = np.random.default_rng(1).random((32, 32))
        a = general.gaussian_noise(img, 0.1, seed=11)
        b = general.gaussian_noise(img, 0.1, seed=11)
        assert np.array_equal(a, b)

    def test_different_seeds_differ(self):
        img = np.full((64, 64), 0.5)
        a = general.gaussian_noise(img, 0.1, seed=1)
        b = general.gaussian_noise(img, 0.1, seed=2)
        assert not np.array_equal(a, b)

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            general.gaussian_noise(np.zeros((8, 8)), -0.1, seed=0)


class TestGaussianBlur:
    def test_sigma_zero_identity(self):
        img = np.random.default_rng(0).random((16, 16))
        assert np.array_equal(general.gaussian_blur(img, 0.0), img)

    def test_impulse_matches_sampled_gaussian(self):
        # independent oracle: normalized 2-D Gaussian sampled on the kernel
        # support, embedded at the impulse position
        sigma = 2.0
        img = np.zeros((33, 33))
        img[16, 16] = 1.0
        out = general.gaussian_blur(img, sigma)

        radius = int(np.ceil(3 * sigma))
        ii = np.arange(-radius, radius + 1)
        g2 = np.exp(-(ii[:, None] ** 2 + ii[None, :] ** 2) / (2 * sigma**2))
        g2 /= g2.sum()
        expected = np.zeros((33, 33))
        expected[16 - radius : 16 + radius + 1, 16 - radius : 16 + radius + 1] = g2
        assert np.max(np.abs(out - expected)) < 1e-6

    def test_constant_image_unchanged(self):
        img = np.full((20, 20), 0.37)
        assert np.max(np.abs(general.gaussian_blur(img, 1.5) - img)) < 1e-6

    def test_rgb_shape_preserved(self):
        img = np.random.default_rng(0).random((16, 16, 3))
        assert general.gaussian_blur(img, 1.0).shape == (16, 16, 3)


class TestMotionBlur:
    def test_length_one_identity(self):
        img = np.random.default_rng(0).random((16, 16))
        assert np.array_equal(general.motion_blur(img, 1, 45.0), img)

    def test_impulse_horizontal_kernel_oracle(self):
        img = np.zeros((11, 11))
        img[5, 5] = 1.0
        out = general.motion_blur(img, 3, 0.0)
        expected = np.zeros((11, 11))
        expected[5, 4:7] = 1.0 / 3.0
        assert np.max(np.abs(out - expected)) < 1e-12

    def test_kernel_sums_to_one(self):
        for length, angle in [(3, 0), (7, 30), (15, 117), (8, 90)]:
            assert general.line_kernel(length, angle).sum() == pytest.approx(1.0)

    def test_constant_image_unchanged(self):
        img = np.full((20, 20), 0.6)
        assert np.max(np.abs(general.motion_blur(img, 7, 33.0) - img)) < 1e-6


class TestLowResolution:
    def test_factor_one_identity(self):
        img = np.random.default_rng(0).random((16, 16))
        assert np.array_equal(general.low_resolution(img, 1), img)

    def test_checkerboard_variance_drops(self):
        img = checkerboard(32)
        out = general.low_resolution(img, 2)
        assert out.var() < img.var()

    def test_constant_unchanged(self):
        img = np.full((16, 16), 0.42)
        assert np.max(np.abs(general.low_resolution(img, 2) - img)) < 1e-12

    def test_factor_too_large_rejected(self):
        with pytest.raises(ValueError):
            general.low_resolution(np.zeros((16, 16)), 5)

    def test_non_divisible_size(self):
        img = np.random.default_rng(0).random((17, 19))
        out = general.low_resolution(img, 2)
        assert out.shape == (17, 19)
        assert out.min() >= 0 and out.max() <= 1


class TestBrightness:
    def test_zero_delta_identity(self):
        img = np.random.default_rng(0).random((8, 8))
        assert np.array_equal(general.adjust_brightness(img, 0.0), img)

    def test_direct_formula(self):
        out = general.adjust_brightness(np.full((8, 8), 0.5), 0.3)
        assert np.allclose(out, 0.8)

    def test_clamp(self):
        out = general.adjust_brightness(np.full((8, 8), 0.9), 0.3)
        assert np.all(out == 1.0)


class TestGamma:
    def test_gamma_one_identity(self):
        img = np.random.default_rng(0).random((8, 8))
        assert np.array_equal(general.gamma_exposure(img, 1.0), img)

    def test_direct_formula(self):
        out = general.gamma_exposure(np.full((8, 8), 0.25), 2.0)
        assert np.allclose(out, 0.0625)

    def test_one_is_fixed_point(self):
        out = general.gamma_exposure(np.ones((8, 8)), 3.7)
        assert np.all(out == 1.0)

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            general.gamma_exposure(np.zeros((8, 8)), 0.0)


class TestContrast:
    def test_alpha_one_identity(self):
        img = np.random.default_rng(0).random((8, 8))
        assert np.array_equal(general.reduce_contrast(img, 1.0), img)

    def test_alpha_zero_collapses_to_mean(self):
        img = np.random.default_rng(0).random((8, 8))
        out = general.reduce_contrast(img, 0.0)
        assert np.allclose(out, img.mean())

    def test_two_pixel_oracle(self):
        img = np.array([[0.0, 1.0]])
        out = general.reduce_contrast(img, 0.5)
        assert np.allclose(out, [[0.25, 0.75]])

    def test_per_channel_mean_on_rgb(self):
        img = np.zeros((8, 8, 3))
        img[:, :, 0] = 1.0  # pure red plane
        out = general.reduce_contrast(img, 0.5)
        # each channel contracts toward its own mean, so red stays red
        assert np.allclose(out[:, :, 0], 1.0)
        assert np.allclose(out[:, :, 1:], 0.0)


class TestRotation:
    def test_zero_identity(self):
        img = np.random.default_rng(0).random((8, 8))
        assert np.array_equal(general.rotate_image(img, 0.0), img)

    def test_90_degree_exact_permutation(self):
        img = np.array([[0.1, 0.2], [0.3, 0.4]])
        out = general.rotate_image(img, 90.0)
        expected = np.array([[0.2, 0.4], [0.1, 0.3]])  # [[b,d],[a,c]]
        assert np.array_equal(out, expected)

    def test_360_identity(self):
        img = np.random.default_rng(0).random((16, 16))
        out = general.rotate_image(img, 360.0)
        assert np.max(np.abs(out - img)) < 1e-6

    def test_fill_appears_in_corners(self):
        img = np.ones((16, 16))
        out = general.rotate_image(img, 45.0, fill=0.0)
        assert out[0, 0] < 0.5

    def test_rgb_rotation(self):
        img = np.random.default_rng(0).random((8, 8, 3))
        assert general.rotate_image(img, 90.0).shape == (8, 8, 3)


class TestTranslation:
    def test_zero_identity(self):
        img = np.random.default_rng(0).random((8, 8))
        assert np.array_equal(general.translate_image(img, 0, 0), img)

    def test_row_shift_index_oracle(self):
        img = np.array([[0.3, 0.5, 0.7]])
        out = general.translate_image(img, 1, 0, fill=0.0)
        assert np.array_equal(out, np.array([[0.0, 0.3, 0.5]]))

    def test_max_shift_leaves_one_column(self):
        img = np.ones((4, 5))
        out = general.translate_image(img, 4, 0, fill=0.0)
        assert np.array_equal(out[:, 4], np.ones(4))
        assert np.all(out[:, :4] == 0.0)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            general.translate_image(np.zeros((4, 4)), 4, 0)


class TestShapeAndRange:
    @pytest.mark.parametrize("rgb", [False, True])
    def test_all_operators_preserve_shape_and_range(self, rgb):
        rng = np.random.default_rng(5)
        img = rng.random((24, 24, 3) if rgb else (24, 24))
        cases = [
            general.gaussian_noise(img, 0.2, seed=1),
            general.gaussian_blur(img, 1.5),
            general.motion_blur(img, 7, 30.0),
            general.low_resolution(img, 2),
            general.adjust_brightness(img, 0.3),
            general.gamma_exposure(img, 2.5),
            general.reduce_contrast(img, 0.35),
            general.rotate_image(img, 25.0),
            general.translate_image(img, 3, -2),
        ]
        for out in cases:
            assert out.shape == img.shape
            assert out.min() >= 0.0 and out.max() <= 1.0
