import numpy as np
import pytest

from ravden.errors import DimensionError, ParameterError
from ravden.frames.bayer import green_mean, pack_bayer, unpack_bayer
from ravden.frames.color import guide_plane, to_luma
from ravden.frames.types import ColorSpace, Frame, PackedRawFrame, RawBayerFrame, Sequence


class TestFrameTypes:
    def test_frame_is_read_only_float32(self):
        frame = Frame(np.zeros((3, 4, 6)))
        assert frame.data.dtype == np.float32
        assert (frame.channels, frame.height, frame.width) == (3, 4, 6)
        with pytest.raises(ValueError):
            frame.data[0, 0, 0] = 1.0

    def test_frame_copies_input(self):
        source = np.zeros((1, 2, 2), dtype=np.float32)
        frame = Frame(source)
        source[0, 0, 0] = 5.0
        assert frame.data[0, 0, 0] == 0.0

    @pytest.mark.parametrize("shape", [(2, 4, 4), (4, 4, 4), (4, 4)])
    def test_frame_rejects_bad_shapes(self, shape):
        with pytest.raises(DimensionError):
            Frame(np.zeros(shape))

    def test_non_finite_values_rejected(self):
        data = np.zeros((1, 2, 2))
        data[0, 1, 1] = np.nan
        with pytest.raises(ParameterError):
            Frame(data)
        with pytest.raises(ParameterError):
            PackedRawFrame(np.full((4, 2, 2), np.inf))

    def test_bayer_needs_even_dims(self):
        with pytest.raises(DimensionError):
            RawBayerFrame(np.zeros((4, 5)))

    def test_packed_needs_four_planes(self):
        with pytest.raises(DimensionError):
            PackedRawFrame(np.zeros((3, 2, 2)))

    def test_colorspace_accepts_string(self):
        assert Frame(np.zeros((1, 2, 2)), "linear").colorspace is ColorSpace.LINEAR


class TestSequence:
    def test_metadata_defaults_per_frame(self):
        frames = [PackedRawFrame(np.zeros((4, 2, 2))) for _ in range(3)]
        sequence = Sequence(frames, frame_rate=30.0)
        assert len(sequence) == 3
        assert sequence.metadata == [{}, {}, {}]
        assert sequence[1] is frames[1]
        assert list(sequence) == frames

    def test_mixed_shapes_rejected(self):
        with pytest.raises(DimensionError):
            Sequence([PackedRawFrame(np.zeros((4, 2, 2))), PackedRawFrame(np.zeros((4, 2, 4)))])

    def test_mixed_types_rejected(self):
        with pytest.raises(DimensionError):
            Sequence([Frame(np.zeros((1, 2, 2))), PackedRawFrame(np.zeros((4, 2, 2)))])

    def test_metadata_length_must_match(self):
        with pytest.raises(DimensionError):
            Sequence([Frame(np.zeros((1, 2, 2)))], metadata=[{}, {}])


class TestBayer:
    def test_pack_layout(self):
        mosaic = np.arange(16, dtype=np.float32).reshape(4, 4)
        packed = pack_bayer(RawBayerFrame(mosaic))
        np.testing.assert_array_equal(packed.data[0], [[0, 2], [8, 10]])
        np.testing.assert_array_equal(packed.data[1], [[1, 3], [9, 11]])
        np.testing.assert_array_equal(packed.data[2], [[4, 6], [12, 14]])
        np.testing.assert_array_equal(packed.data[3], [[5, 7], [13, 15]])

    def test_pack_unpack_is_exact_on_random_mosaics(self, rng):
        for _ in range(100):
            height, width = 2 * rng.integers(1, 20, size=2)
            mosaic = rng.random((height, width)).astype(np.float32)
            raw = RawBayerFrame(mosaic)
            packed = pack_bayer(raw)
            assert packed.data.shape == (4, height // 2, width // 2)
            np.testing.assert_array_equal(unpack_bayer(packed).data, mosaic)
            np.testing.assert_array_equal(pack_bayer(unpack_bayer(packed)).data, packed.data)

    def test_green_mean(self):
        data = np.zeros((4, 2, 2))
        data[1] = 0.2
        data[2] = 0.4
        np.testing.assert_allclose(green_mean(PackedRawFrame(data)), 0.3, atol=1e-7)


class TestColor:
    def test_luma_weights(self):
        frame = Frame(np.stack([np.full((2, 2), 1.0), np.zeros((2, 2)), np.zeros((2, 2))]))
        np.testing.assert_allclose(to_luma(frame).data, 0.2126, atol=1e-7)

    def test_luma_of_gray_is_identity(self):
        frame = Frame(np.full((3, 2, 2), 0.5))
        np.testing.assert_allclose(to_luma(frame).data, 0.5, atol=1e-7)

    def test_luma_needs_colour(self):
        with pytest.raises(DimensionError):
            to_luma(Frame(np.zeros((1, 2, 2))))

    def test_guide_plane_passes_gray_through(self):
        plane = np.arange(4, dtype=np.float32).reshape(2, 2) / 4
        np.testing.assert_array_equal(guide_plane(Frame.from_plane(plane)), plane)
