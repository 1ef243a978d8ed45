"""Binary (P5) portable graymap reading and writing, 8-bit only."""

from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from ..errors import MissingFileError, PgmFormatError

MAGIC = b"P5"
MAXVAL = 255
WHITESPACE = b" \t\r\n\v\f"

PathLike = Union[str, Path]


def _read_header(data: bytes) -> Tuple[List[bytes], int]:
    """Split the four header tokens off ``data``.

    Returns:
        The tokens and the offset of the first payload byte
    """
    tokens = []
    pos = 0
    while len(tokens) < 4:
        if pos >= len(data):
            raise PgmFormatError("Truncated PGM header")
        byte = data[pos:pos + 1]
        if byte in WHITESPACE:
            pos += 1
        elif byte == b"#":
            end = data.find(b"\n", pos)
            if end < 0:
                raise PgmFormatError("Truncated PGM header")
            pos = end + 1
        else:
            start = pos
            while pos < len(data) and data[pos:pos + 1] not in WHITESPACE and data[pos:pos + 1] != b"#":
                pos += 1
            tokens.append(data[start:pos])
    # exactly one whitespace byte separates maxval from the raster
    if pos >= len(data) or data[pos:pos + 1] not in WHITESPACE:
        raise PgmFormatError("Missing whitespace after PGM header")
    return tokens, pos + 1


def parse_pgm(data: bytes) -> np.ndarray:
    """Decode P5 bytes into a float array of shape (height, width).

    Raises:
        PgmFormatError: If the data is malformed, truncated or not 8-bit P5
    """
    tokens, offset = _read_header(data)
    if tokens[0] != MAGIC:
        raise PgmFormatError(f"Unsupported magic number {tokens[0]!r}; only binary P5 is supported")
    try:
        width, height, maxval = (int(token) for token in tokens[1:])
    except ValueError:
        raise PgmFormatError(f"Malformed PGM header values {tokens[1:]!r}")
    if width <= 0 or height <= 0:
        raise PgmFormatError(f"Invalid PGM size {width}x{height}")
    if maxval != MAXVAL:
        raise PgmFormatError(f"Unsupported maxval {maxval}; only {MAXVAL} is supported")

    count = width * height
    payload = data[offset:offset + count]
    if len(payload) < count:
        raise PgmFormatError(f"Truncated PGM payload: expected {count} bytes, got {len(payload)}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).astype(float)


def encode_pgm(image: np.ndarray) -> bytes:
    """Encode an image as P5 bytes, rounding and clipping to 0..255."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise PgmFormatError(f"Only 2D grayscale images can be written, got shape {image.shape}")
    pixels = np.clip(np.rint(image), 0, MAXVAL).astype(np.uint8)
    height, width = pixels.shape
    return b"P5\n%d %d\n%d\n" % (width, height, MAXVAL) + pixels.tobytes()


def load_image(path: PathLike) -> np.ndarray:
    """Read a P5 file.

    Raises:
        MissingFileError: If the file does not exist
        PgmFormatError: If its contents are not a valid 8-bit P5 image
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"Image file not found: {path}")
    return parse_pgm(path.read_bytes())


def save_image(image: np.ndarray, path: PathLike):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_pgm(image))


def load_mask(path: PathLike) -> np.ndarray:
    """Read a mask image; pixels above 127 are present (1), the rest missing (0)."""
    return (load_image(path) > 127).astype(float)


def save_mask(mask: np.ndarray, path: PathLike):
    save_image(np.where(np.asarray(mask) > 0, MAXVAL, 0), path)
