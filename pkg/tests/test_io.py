import struct

import numpy as np
import pytest
from PIL import Image

from ravden.align.types import FlowField
from ravden.errors import FormatError
from ravden.frames.io import (
    load_flow,
    load_image,
    load_raw,
    read_pnm,
    save_flow,
    save_image,
    save_raw,
    write_pnm,
)
from ravden.frames.types import Frame, PackedRawFrame


class TestPnm:
    @pytest.mark.parametrize("bit_depth,channels", [(8, 1), (8, 3), (16, 1), (16, 3)])
    def test_quantized_values_survive_exactly(self, tmp_path, rng, bit_depth, channels):
        maxval = 255 if bit_depth == 8 else 65535
        levels = rng.integers(0, maxval + 1, size=(channels, 5, 7))
        frame = Frame(levels / maxval)
        path = tmp_path / ("f.pgm" if channels == 1 else "f.ppm")

        write_pnm(path, frame, bit_depth)
        loaded = read_pnm(path)

        assert loaded.data.shape == (channels, 5, 7)
        np.testing.assert_array_equal(np.round(loaded.data.astype(np.float64) * maxval), levels)

    def test_sixteen_bit_is_big_endian(self, tmp_path):
        path = tmp_path / "f.pgm"
        write_pnm(path, Frame(np.full((1, 1, 1), 1.0)), 16)
        assert path.read_bytes().endswith(b"\xff\xff")
        write_pnm(path, Frame(np.full((1, 1, 1), 256 / 65535)), 16)
        assert path.read_bytes().endswith(b"\x01\x00")

    def test_header_comments(self, tmp_path):
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P5\n# a comment\n2 1\n# another\n255\n\x00\xff")
        np.testing.assert_allclose(read_pnm(path).data[0], [[0.0, 1.0]])

    def test_truncated_raster(self, tmp_path):
        path = tmp_path / "t.ppm"
        path.write_bytes(b"P6\n4 4\n255\n" + b"\x00" * 10)
        with pytest.raises(FormatError):
            read_pnm(path)

    def test_unsupported_magic(self, tmp_path):
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P2\n1 1\n255\n0\n")
        with pytest.raises(FormatError):
            read_pnm(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError):
            read_pnm(tmp_path / "missing.pgm")

    def test_pillow_inputs(self, tmp_path):
        pixels = np.array([[[255, 0, 0], [0, 255, 0]], [[0, 0, 255], [255, 255, 255]]], dtype=np.uint8)
        Image.fromarray(pixels).save(tmp_path / "rgb.png")
        frame = load_image(tmp_path / "rgb.png")
        assert frame.data.shape == (3, 2, 2)
        np.testing.assert_allclose(frame.data[:, 1, 1], 1.0)
        np.testing.assert_allclose(frame.data[:, 0, 0], [1.0, 0.0, 0.0])

    def test_save_image_through_pillow(self, tmp_path):
        frame = Frame(np.full((3, 2, 2), 0.5))
        save_image(tmp_path / "out.png", frame)
        np.testing.assert_allclose(load_image(tmp_path / "out.png").data, 128 / 255, atol=1e-6)

    def test_undecodable_image(self, tmp_path):
        path = tmp_path / "broken.png"
        path.write_bytes(b"not an image")
        with pytest.raises(FormatError):
            load_image(path)


class TestRawFormat:
    def test_round_trip_is_bit_exact(self, tmp_path, rng):
        for case in range(100):
            height, width = rng.integers(1, 9, size=2)
            packed = PackedRawFrame(rng.normal(size=(4, height, width)))
            path = tmp_path / f"{case}.rpf"
            save_raw(path, packed)
            np.testing.assert_array_equal(load_raw(path).data, packed.data)

    def test_header_layout(self, tmp_path):
        path = tmp_path / "h.rpf"
        save_raw(path, PackedRawFrame(np.zeros((4, 3, 5))))
        content = path.read_bytes()
        assert struct.unpack("<4sIII", content[:16]) == (b"RPF1", 3, 5, 4)
        assert len(content) == 16 + 4 * 3 * 5 * 4

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.rpf"
        path.write_bytes(struct.pack("<4sIII", b"RPF2", 1, 1, 4) + b"\x00" * 16)
        with pytest.raises(FormatError):
            load_raw(path)

    def test_wrong_channel_count(self, tmp_path):
        path = tmp_path / "c3.rpf"
        path.write_bytes(struct.pack("<4sIII", b"RPF1", 1, 1, 3) + b"\x00" * 12)
        with pytest.raises(FormatError):
            load_raw(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "short.rpf"
        path.write_bytes(struct.pack("<4sIII", b"RPF1", 2, 2, 4) + b"\x00" * 8)
        with pytest.raises(FormatError):
            load_raw(path)


class TestFlowFormat:
    def test_round_trip_is_bit_exact(self, tmp_path, rng):
        for case in range(100):
            height, width = rng.integers(1, 9, size=2)
            flow = FlowField(rng.normal(scale=5.0, size=(2, height, width)))
            path = tmp_path / f"{case}.flo"
            save_flow(path, flow)
            np.testing.assert_array_equal(load_flow(path).data, flow.data)

    def test_middlebury_layout(self, tmp_path):
        data = np.zeros((2, 1, 2), dtype=np.float32)
        data[0, 0, 1] = 1.5
        data[1, 0, 1] = -2.0
        path = tmp_path / "f.flo"
        save_flow(path, FlowField(data))
        content = path.read_bytes()
        magic, width, height = struct.unpack("<fii", content[:12])
        assert (magic, width, height) == (202021.25, 2, 1)
        assert struct.unpack("<4f", content[12:]) == (0.0, 0.0, 1.5, -2.0)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.flo"
        path.write_bytes(struct.pack("<fii", 1.0, 1, 1) + b"\x00" * 8)
        with pytest.raises(FormatError):
            load_flow(path)

    def test_truncated(self, tmp_path):
        path = tmp_path / "short.flo"
        path.write_bytes(struct.pack("<fii", 202021.25, 4, 4) + b"\x00" * 8)
        with pytest.raises(FormatError):
            load_flow(path)
