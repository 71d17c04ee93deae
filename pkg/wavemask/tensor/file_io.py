""" Reading and writing tensors and 8-bit images.

- LWT1 tensor files: the magic bytes 'LWT1', the rank as a little-endian u32, one
  little-endian u32 per dimension and the row-major payload as little-endian float32.
  Values are widened to float64 on read.
- Binary PGM (P5, one channel) and PPM (P6, three channels) images with maxval 255.
  Pixel values map to [0, 1] as v / 255; writing clips to [0, 1] and rounds.
"""
import struct
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from wavemask.errors import FormatError, InvalidArgumentError

PathLike = Union[str, Path]

MAGIC = b"LWT1"
MAX_ELEMENTS = 2 ** 31


def encode_tensor(tensor: np.ndarray) -> bytes:
    tensor = np.asarray(tensor)
    if tensor.ndim == 0:
        tensor = tensor.reshape(1)
    with np.errstate(over="ignore"):
        payload = np.ascontiguousarray(tensor, dtype="<f4")
    if not np.all(np.isfinite(payload)):
        raise InvalidArgumentError(
            "LWT1 payloads are finite float32; the tensor holds NaN, infinite or out of range values."
        )
    header = MAGIC + struct.pack("<I", tensor.ndim) + struct.pack(f"<{tensor.ndim}I", *tensor.shape)
    return header + payload.tobytes()


def decode_tensor(data: bytes, path: PathLike = None) -> np.ndarray:
    if len(data) < 8:
        raise FormatError("Truncated LWT1 header", path, len(data))
    if data[:4] != MAGIC:
        raise FormatError(f"Bad magic {data[:4]!r}, expected {MAGIC!r}", path, 0)

    (rank,) = struct.unpack_from("<I", data, 4)
    if rank < 1 or rank > 8:
        raise FormatError(f"Unsupported rank {rank}", path, 4)
    if len(data) < 8 + 4 * rank:
        raise FormatError("Truncated LWT1 dimensions", path, len(data))

    dims = struct.unpack_from(f"<{rank}I", data, 8)
    count = 1
    for i, d in enumerate(dims):
        if d < 1:
            raise FormatError(f"Dimension {i} is zero", path, 8 + 4 * i)
        count *= d
        if count > MAX_ELEMENTS:
            raise FormatError("Dimension overflow: too many elements", path, 8 + 4 * i)

    start = 8 + 4 * rank
    expected = start + 4 * count
    if len(data) < expected:
        raise FormatError(f"Truncated payload: expected {expected} bytes, found {len(data)}", path, len(data))
    if len(data) > expected:
        raise FormatError(f"Trailing bytes after the payload", path, expected)

    values = np.frombuffer(data, dtype="<f4", count=count, offset=start)
    return values.astype(np.float64).reshape(dims)


def write_tensor(path: PathLike, tensor: np.ndarray) -> None:
    """ Writes a tensor in LWT1 format. Values are stored in single precision.

    :param path: destination file
    :param tensor: array of any rank >= 1
    :return: None
    """
    data = encode_tensor(tensor)
    with open(path, "wb") as f:
        f.write(data)


def read_tensor(path: PathLike) -> np.ndarray:
    """ Reads an LWT1 tensor file.

    :param path: file to read
    :return: float64 array
    """
    with open(path, "rb") as f:
        data = f.read()
    return decode_tensor(data, path)


def _next_token(data: bytes, pos: int, path) -> Tuple[bytes, int]:
    """ Next whitespace separated token of a Netpbm header, skipping '#' comments. """
    n = len(data)
    while pos < n:
        if data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif data[pos:pos + 1].isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise FormatError("Truncated image header", path, pos)
    return data[start:pos], pos


def decode_netpbm(data: bytes, path: PathLike = None) -> np.ndarray:
    magic = data[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise FormatError(f"Bad magic {magic!r}, expected b'P5' or b'P6'", path, 0)

    pos = 2
    fields = []
    for _ in range(3):
        token, end = _next_token(data, pos, path)
        if not token.isdigit():
            raise FormatError(f"Invalid header field {token!r}", path, pos)
        fields.append(int(token))
        pos = end
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise FormatError(f"Invalid image size {width} x {height}", path, 2)
    if width * height * channels > MAX_ELEMENTS:
        raise FormatError("Dimension overflow: too many pixels", path, 2)
    if maxval != 255:
        raise FormatError(f"Only 8-bit images with maxval 255 are supported, got {maxval}", path, pos)

    # a single whitespace byte separates the header from the raster
    pos += 1
    expected = pos + width * height * channels
    if len(data) < expected:
        raise FormatError(
            f"Truncated raster: expected {width * height * channels} bytes, found {len(data) - pos}",
            path,
            len(data),
        )

    raster = np.frombuffer(data, dtype=np.uint8, count=width * height * channels, offset=pos)
    image = raster.reshape(height, width, channels).transpose(2, 0, 1)
    return image.astype(np.float64) / 255


def encode_netpbm(image: np.ndarray) -> bytes:
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 2:
        image = image[None]
    if image.ndim != 3 or image.shape[0] not in (1, 3):
        raise InvalidArgumentError(f"Images must be H x W, 1 x H x W or 3 x H x W, got shape {image.shape}.")

    channels, height, width = image.shape
    magic = b"P5" if channels == 1 else b"P6"
    pixels = np.rint(np.clip(image, 0, 1) * 255).astype(np.uint8)
    header = magic + f"\n{width} {height}\n255\n".encode("ascii")
    return header + pixels.transpose(1, 2, 0).tobytes()


def read_netpbm(path: PathLike) -> np.ndarray:
    """ Reads a binary PGM or PPM image.

    :param path: file to read
    :return: array of shape C x H x W with values in [0, 1]
    """
    with open(path, "rb") as f:
        data = f.read()
    return decode_netpbm(data, path)


def write_netpbm(path: PathLike, image: np.ndarray) -> None:
    """ Writes an image as binary PGM (one channel) or PPM (three channels), quantising
    v in [0, 1] to round(255 v).
    """
    data = encode_netpbm(image)
    with open(path, "wb") as f:
        f.write(data)


def read_image(path: PathLike) -> np.ndarray:
    """ Reads a tensor or an image, choosing the decoder from the file suffix. Images come
    back as C x H x W in [0, 1].
    """
    suffix = Path(path).suffix.lower()
    if suffix in (".pgm", ".ppm"):
        return read_netpbm(path)
    elif suffix == ".lwt":
        return read_tensor(path)
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] == MAGIC:
        return decode_tensor(data, path)
    return decode_netpbm(data, path)


def write_image(path: PathLike, image: np.ndarray) -> None:
    if Path(path).suffix.lower() == ".lwt":
        write_tensor(path, image)
    else:
        write_netpbm(path, image)
