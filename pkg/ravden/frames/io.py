"""
File formats: PNM for display-referred frames, RPF1 for packed raw tensors,
Middlebury .flo for flow fields.
"""

import logging
import struct
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from PIL import Image

from ravden.align.types import FlowField
from ravden.errors import FormatError
from ravden.frames.types import ColorSpace, Frame, PackedRawFrame

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

PNM_SUFFIXES = (".pnm", ".pgm", ".ppm")
RPF_MAGIC = b"RPF1"
RPF_HEADER = struct.Struct("<4sIII")
FLOW_MAGIC = np.float32(202021.25)
FLOW_HEADER = struct.Struct("<fii")


def _read_bytes(path: PathLike) -> bytes:
    path = Path(path)
    if not path.is_file():
        raise FormatError(f"File not found: {path}")
    return path.read_bytes()


# ---------------------------------------------------------------------------
# PNM
# ---------------------------------------------------------------------------

def _pnm_header(content: bytes, path: PathLike) -> Tuple[str, int, int, int, int]:
    """Parse a binary PNM header; returns (magic, width, height, maxval, data offset)"""
    tokens: List[bytes] = []
    pos = 0
    size = len(content)
    while len(tokens) < 4:
        while pos < size and content[pos:pos + 1].isspace():
            pos += 1
        if pos < size and content[pos:pos + 1] == b"#":
            while pos < size and content[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < size and not content[pos:pos + 1].isspace() and content[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise FormatError(f"Truncated PNM header in {path}")
        tokens.append(content[start:pos])
    # exactly one whitespace byte separates the header from the raster
    if pos >= size or not content[pos:pos + 1].isspace():
        raise FormatError(f"Truncated PNM header in {path}")
    pos += 1

    magic = tokens[0].decode("ascii", errors="replace")
    if magic not in ("P5", "P6"):
        raise FormatError(f"Unsupported PNM magic {magic!r} in {path}")
    try:
        width, height, maxval = (int(token) for token in tokens[1:])
    except ValueError as e:
        raise FormatError(f"Malformed PNM header in {path}: {e}") from e
    if width <= 0 or height <= 0 or not 0 < maxval <= 65535:
        raise FormatError(f"Invalid PNM geometry {width}x{height} maxval {maxval} in {path}")
    return magic, width, height, maxval, pos


def read_pnm(path: PathLike) -> Frame:
    content = _read_bytes(path)
    magic, width, height, maxval, offset = _pnm_header(content, path)
    channels = 1 if magic == "P5" else 3
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
    count = width * height * channels
    if len(content) - offset < count * dtype.itemsize:
        raise FormatError(f"Truncated PNM raster in {path}")

    raster = np.frombuffer(content, dtype=dtype, count=count, offset=offset)
    values = raster.reshape(height, width, channels).transpose(2, 0, 1)
    return Frame(values.astype(np.float64) / maxval, ColorSpace.SRGB)


def write_pnm(path: PathLike, frame: Frame, bit_depth: int = 16) -> None:
    if bit_depth not in (8, 16):
        raise FormatError(f"PNM bit depth must be 8 or 16, got {bit_depth}")
    maxval = 255 if bit_depth == 8 else 65535
    magic = "P5" if frame.channels == 1 else "P6"
    quantized = np.round(np.clip(frame.data.astype(np.float64), 0.0, 1.0) * maxval)
    dtype = np.dtype(np.uint8) if bit_depth == 8 else np.dtype(">u2")
    raster = quantized.astype(dtype).transpose(1, 2, 0)

    header = f"{magic}\n{frame.width} {frame.height}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + np.ascontiguousarray(raster).tobytes())


def load_image(path: PathLike) -> Frame:
    """Load a display-referred frame; PNM natively, anything else through Pillow"""
    path = Path(path)
    if path.suffix.lower() in PNM_SUFFIXES:
        return read_pnm(path)

    try:
        with Image.open(path) as image:
            if image.mode in ("I;16", "I;16B", "I;16L", "I"):
                values = np.asarray(image, dtype=np.float64)[np.newaxis] / 65535.0
            elif image.mode in ("L", "1"):
                values = np.asarray(image.convert("L"), dtype=np.float64)[np.newaxis] / 255.0
            else:
                rgb = np.asarray(image.convert("RGB"), dtype=np.float64)
                values = rgb.transpose(2, 0, 1) / 255.0
    except (OSError, ValueError) as e:
        raise FormatError(f"Cannot decode image {path}: {e}") from e
    return Frame(values, ColorSpace.SRGB)


def save_image(path: PathLike, frame: Frame, bit_depth: int = 16) -> None:
    path = Path(path)
    if path.suffix.lower() in PNM_SUFFIXES:
        write_pnm(path, frame, bit_depth)
        return

    data8 = np.round(np.clip(frame.data.astype(np.float64), 0.0, 1.0) * 255).astype(np.uint8)
    if frame.channels == 1:
        Image.fromarray(data8[0]).save(path)
    else:
        Image.fromarray(np.ascontiguousarray(data8.transpose(1, 2, 0))).save(path)


# ---------------------------------------------------------------------------
# RPF1 packed raw tensors
# ---------------------------------------------------------------------------

def load_raw(path: PathLike) -> PackedRawFrame:
    content = _read_bytes(path)
    if len(content) < RPF_HEADER.size:
        raise FormatError(f"Truncated RPF1 header in {path}")
    magic, height, width, channels = RPF_HEADER.unpack_from(content, 0)
    if magic != RPF_MAGIC:
        raise FormatError(f"Bad RPF1 magic {magic!r} in {path}")
    if channels != 4:
        raise FormatError(f"RPF1 file {path} has {channels} channels, packed raw needs 4")

    count = height * width * channels
    if len(content) - RPF_HEADER.size < count * 4:
        raise FormatError(f"Truncated RPF1 payload in {path}")
    data = np.frombuffer(content, dtype="<f4", count=count, offset=RPF_HEADER.size)
    return PackedRawFrame(data.reshape(channels, height, width))


def save_raw(path: PathLike, packed: PackedRawFrame) -> None:
    header = RPF_HEADER.pack(RPF_MAGIC, packed.height, packed.width, 4)
    payload = np.ascontiguousarray(packed.data, dtype="<f4").tobytes()
    Path(path).write_bytes(header + payload)


# ---------------------------------------------------------------------------
# Middlebury flow
# ---------------------------------------------------------------------------

def load_flow(path: PathLike) -> FlowField:
    content = _read_bytes(path)
    if len(content) < FLOW_HEADER.size:
        raise FormatError(f"Truncated flow header in {path}")
    magic, width, height = FLOW_HEADER.unpack_from(content, 0)
    if np.float32(magic) != FLOW_MAGIC:
        raise FormatError(f"Magic number incorrect, invalid .flo file: {path}")
    if width <= 0 or height <= 0:
        raise FormatError(f"Invalid flow geometry {width}x{height} in {path}")

    count = 2 * width * height
    if len(content) - FLOW_HEADER.size < count * 4:
        raise FormatError(f"Truncated flow payload in {path}")
    data = np.frombuffer(content, dtype="<f4", count=count, offset=FLOW_HEADER.size)
    return FlowField(data.reshape(height, width, 2).transpose(2, 0, 1))


def save_flow(path: PathLike, flow: FlowField) -> None:
    header = FLOW_HEADER.pack(float(FLOW_MAGIC), flow.width, flow.height)
    interleaved = np.ascontiguousarray(flow.data.transpose(1, 2, 0), dtype="<f4")
    Path(path).write_bytes(header + interleaved.tobytes())
