import numpy as np
import pytest
from pydantic import ValidationError

from ravden.camera.isp import (
    IspParams,
    demosaic_bilinear,
    inverse_smoothstep,
    linear_to_srgb,
    process_isp,
    smoothstep,
    srgb_to_linear,
    unprocess,
)
from ravden.camera.keyed_rng import KeyedRandom
from ravden.camera.noise import (
    ISO_PRESETS,
    NoiseParams,
    NoiseSeed,
    add_noise,
    iso_preset,
    read_noise_sidecar,
    write_noise_sidecar,
)
from ravden.errors import DimensionError, FormatError, ParameterError
from ravden.frames.types import Frame, PackedRawFrame
from tests.conftest import make_texture


def constant_colour_frame(colour, height=8, width=8):
    return Frame(np.broadcast_to(np.asarray(colour, dtype=np.float64)[:, None, None], (3, height, width)))


class TestTransferFunctions:
    def test_srgb_curves_invert(self):
        x = np.linspace(0.0, 1.0, 1001)
        np.testing.assert_allclose(srgb_to_linear(linear_to_srgb(x)), x, atol=1e-9)

    def test_tone_curve_inverts(self):
        x = np.linspace(0.0, 1.0, 1001)
        np.testing.assert_allclose(inverse_smoothstep(smoothstep(x)), x, atol=1e-9)

    def test_tone_curve_endpoints(self):
        np.testing.assert_allclose(smoothstep(np.array([0.0, 0.5, 1.0])), [0.0, 0.5, 1.0])


class TestIspParams:
    def test_defaults(self):
        params = IspParams()
        assert params.wb_gains == (2.0, 1.0, 1.5)
        assert params.apply_tone_curve

    def test_gains_must_be_positive(self):
        with pytest.raises(ValidationError):
            IspParams(wb_gains=(1.0, 0.0, 1.0))

    def test_ccm_rows_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            IspParams(ccm=((1.0, 0.1, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)))

    def test_singular_ccm_rejected_by_unprocess(self):
        singular = ((0.5, 0.5, 0.0), (0.5, 0.5, 0.0), (0.0, 0.0, 1.0))
        with pytest.raises(ParameterError):
            unprocess(constant_colour_frame([0.5, 0.5, 0.5]), IspParams(ccm=singular))


class TestPipeline:
    def test_demosaic_of_constant_planes_is_constant(self):
        packed = np.stack([np.full((4, 5), value) for value in (0.2, 0.4, 0.4, 0.7)])
        rgb = demosaic_bilinear(packed)
        assert rgb.shape == (3, 8, 10)
        np.testing.assert_allclose(rgb[0], 0.2)
        np.testing.assert_allclose(rgb[1], 0.4)
        np.testing.assert_allclose(rgb[2], 0.7)

    def test_demosaic_keeps_measured_samples(self, rng):
        packed = rng.random((4, 3, 3))
        rgb = demosaic_bilinear(packed)
        np.testing.assert_array_equal(rgb[0, 0::2, 0::2], packed[0])
        np.testing.assert_array_equal(rgb[1, 0::2, 1::2], packed[1])
        np.testing.assert_array_equal(rgb[1, 1::2, 0::2], packed[2])
        np.testing.assert_array_equal(rgb[2, 1::2, 1::2], packed[3])

    def test_round_trip_on_flat_colours(self, rng):
        ccm = ((1.2, -0.1, -0.1), (-0.2, 1.3, -0.1), (0.0, -0.3, 1.3))
        params = IspParams(ccm=ccm)
        for _ in range(20):
            # near-gray colours stay inside [0, 1] through the inverse colour matrix
            colour = rng.uniform(0.3, 0.6) + rng.uniform(-0.05, 0.05, size=3)
            frame = constant_colour_frame(colour)
            rendered = process_isp(unprocess(frame, params), params)
            np.testing.assert_allclose(rendered.data, frame.data, atol=1e-4)

    @pytest.mark.parametrize(
        "plane,packed_pos,channel,full_pos",
        [(0, (1, 1), 0, (2, 2)), (0, (2, 1), 0, (4, 2)), (3, (1, 1), 2, (3, 3)), (3, (2, 2), 2, (5, 5))],
    )
    def test_demosaic_spreads_single_sample_by_bilinear_stencil(self, plane, packed_pos, channel, full_pos):
        packed = np.zeros((4, 4, 4))
        packed[(plane,) + packed_pos] = 1.0

        rgb = demosaic_bilinear(packed)

        expected = np.zeros((3, 8, 8))
        y, x = full_pos
        expected[channel, y - 1:y + 2, x - 1:x + 2] = [[0.25, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 0.25]]
        np.testing.assert_array_equal(rgb, expected)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_round_trip_on_smooth_random_frame(self, seed):
        # smooth near-gray content: bilinear demosaic recovers what mosaicing drops
        frame = Frame(np.stack([make_texture(96, 96, seed=seed * 3 + k, sigma=16.0, low=0.35, high=0.5) for k in range(3)]))

        rendered = process_isp(unprocess(frame, IspParams()), IspParams())

        error = np.abs(rendered.data - frame.data)[:, 2:-2, 2:-2]
        assert error.max() <= 2e-3

    def test_srgb_half_decodes_to_known_linear_value(self):
        packed = unprocess(constant_colour_frame([0.5, 0.5, 0.5]), IspParams.identity())
        np.testing.assert_allclose(packed.data, 0.21404, atol=1e-5)

    def test_known_linear_value_renders_to_srgb_half(self):
        rendered = process_isp(PackedRawFrame(np.full((4, 4, 4), 0.21404)), IspParams.identity())
        np.testing.assert_allclose(rendered.data, 0.5, atol=1e-4)

    def test_identity_params_keep_linear_values(self):
        frame = constant_colour_frame([0.25, 0.5, 0.75])
        packed = unprocess(frame, IspParams.identity())
        np.testing.assert_allclose(packed.data[0], srgb_to_linear(np.array(0.25)), atol=1e-6)
        np.testing.assert_allclose(packed.data[3], srgb_to_linear(np.array(0.75)), atol=1e-6)

    def test_unprocess_output_shape_and_range(self, rng):
        frame = Frame(rng.random((3, 6, 10)))
        packed = unprocess(frame, IspParams())
        assert packed.data.shape == (4, 3, 5)
        assert packed.data.min() >= 0.0 and packed.data.max() <= 1.0

    def test_unprocess_odd_dimensions(self):
        with pytest.raises(DimensionError):
            unprocess(Frame(np.zeros((3, 5, 4))), IspParams())

    def test_unprocess_needs_colour(self):
        with pytest.raises(DimensionError):
            unprocess(Frame(np.zeros((1, 4, 4))), IspParams())


class TestKeyedRandom:
    def test_uniform_open_interval(self):
        values = KeyedRandom(7, 0, 0).uniform(np.arange(100_000, dtype=np.uint64), 0)
        assert values.min() > 0.0 and values.max() < 1.0

    def test_draws_depend_only_on_their_key(self):
        pixels = np.arange(1000, dtype=np.uint64)
        full = KeyedRandom(3, 2, 1).normal(pixels, 3)
        subset = KeyedRandom(3, 2, 1).normal(pixels[::-7], 3)
        np.testing.assert_array_equal(full[::-7], subset)

    def test_keys_are_distinct(self):
        pixels = np.arange(64, dtype=np.uint64)
        base = KeyedRandom(1, 0, 0).bits(pixels, 0)
        for other in (KeyedRandom(2, 0, 0), KeyedRandom(1, 1, 0), KeyedRandom(1, 0, 1)):
            assert not np.array_equal(base, other.bits(pixels, 0))
        assert not np.array_equal(base, KeyedRandom(1, 0, 0).bits(pixels, 1))


class TestNoise:
    def test_iso_presets(self):
        assert list(ISO_PRESETS) == ["iso1", "iso2", "iso3", "iso4", "iso5"]
        assert iso_preset("iso1").sigma_s_sq == pytest.approx(1e-4)
        assert iso_preset("iso1").sigma_r == pytest.approx(0.0025)
        assert iso_preset("iso5").sigma_s_sq == pytest.approx(1e-4 * 4 ** 4)

    def test_iso_override(self):
        custom = NoiseParams(sigma_s_sq=0.02, sigma_r=0.01)
        assert iso_preset("iso2", {"iso2": custom}) == custom

    def test_unknown_iso(self):
        with pytest.raises(ParameterError):
            iso_preset("iso9")

    def test_negative_parameters_rejected(self):
        with pytest.raises(ValidationError):
            NoiseParams(sigma_s_sq=-1e-3, sigma_r=0.0)

    def test_zero_noise_is_identity(self, rng):
        clean = PackedRawFrame(rng.random((4, 8, 8)))
        noisy = add_noise(clean, NoiseParams(sigma_s_sq=0.0, sigma_r=0.0), NoiseSeed(seed=1))
        np.testing.assert_array_equal(noisy.data, clean.data)

    def test_deterministic_per_seed_and_frame(self, rng):
        clean = PackedRawFrame(rng.random((4, 16, 16)))
        params = NoiseParams(sigma_s_sq=0.01, sigma_r=0.02)
        first = add_noise(clean, params, NoiseSeed(seed=5, frame_index=3))
        second = add_noise(clean, params, NoiseSeed(seed=5, frame_index=3))
        other = add_noise(clean, params, NoiseSeed(seed=5, frame_index=4))
        np.testing.assert_array_equal(first.data, second.data)
        assert not np.array_equal(first.data, other.data)

    def test_output_clamped(self):
        clean = PackedRawFrame(np.full((4, 32, 32), 0.99))
        noisy = add_noise(clean, NoiseParams(sigma_s_sq=0.0, sigma_r=0.5), NoiseSeed(seed=0))
        assert noisy.data.min() >= 0.0 and noisy.data.max() <= 1.0

    @pytest.mark.parametrize("level", [0.1, 0.25, 0.5])
    def test_moments_match_shot_and_read_model(self, level):
        params = NoiseParams(sigma_s_sq=0.01, sigma_r=0.02)
        clean = PackedRawFrame(np.full((4, 500, 500), level))
        noisy = add_noise(clean, params, NoiseSeed(seed=11)).data.astype(np.float64)

        expected_var = params.sigma_s_sq * level + params.sigma_r ** 2
        assert abs(noisy.mean() - level) <= 0.003
        assert noisy.var() == pytest.approx(expected_var, rel=0.03)

    @pytest.mark.parametrize("pairing", ["horizontal", "vertical", "across_planes"])
    def test_distinct_pixels_are_uncorrelated(self, pairing):
        clean = PackedRawFrame(np.full((4, 500, 501), 0.3))
        noisy = add_noise(clean, NoiseParams(sigma_s_sq=0.01, sigma_r=0.02), NoiseSeed(seed=9)).data.astype(np.float64)

        if pairing == "horizontal":
            first, second = noisy[:, :, :-1], noisy[:, :, 1:]
        elif pairing == "vertical":
            first, second = noisy[:, :-1, :], noisy[:, 1:, :]
        else:
            first, second = noisy[:2], noisy[2:]

        assert first.size >= 500_000
        assert abs(np.corrcoef(first.ravel(), second.ravel())[0, 1]) < 0.01

    def test_large_rate_branch_is_unbiased(self):
        params = NoiseParams(sigma_s_sq=1e-3, sigma_r=0.0)
        clean = PackedRawFrame(np.full((4, 200, 200), 0.5))
        noisy = add_noise(clean, params, NoiseSeed(seed=2)).data.astype(np.float64)
        assert noisy.mean() == pytest.approx(0.5, abs=1e-3)
        assert noisy.var() == pytest.approx(5e-4, rel=0.05)

    def test_sidecar_round_trip(self, tmp_path):
        params = NoiseParams(sigma_s_sq=0.0064, sigma_r=0.02)
        seed = NoiseSeed(seed=42, frame_index=7)
        path = tmp_path / "f.noise.txt"
        write_noise_sidecar(path, params, seed)
        assert read_noise_sidecar(path) == (params, seed)

    def test_sidecar_missing_key(self, tmp_path):
        path = tmp_path / "bad.noise.txt"
        path.write_text("sigma_s_sq = 0.1\nseed = 1\n")
        with pytest.raises(FormatError):
            read_noise_sidecar(path)
