"""PNG images, binary checkpoints and run-config files."""
from __future__ import annotations

import json
import struct
import sys
import warnings
from pathlib import Path

import numpy as np
import png

from .errors import FormatError, ParameterError
from .nn import net_from_arrays
from .trainer import ModelCheckpoint, TrainConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

MAGIC = b"SINIRCKP"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<8sII")  # magic, version, header length

# --------------------------------------------------------------------------- PNG


def _read_png(path):
    path = Path(path)
    try:
        width, height, rows, info = png.Reader(filename=str(path)).asDirect()
        data = np.vstack([np.asarray(row, dtype=np.uint16) for row in rows])
    except FileNotFoundError:
        raise FormatError(f"{path}: no such file") from None
    except (png.Error, OSError, ValueError) as exc:
        raise FormatError(f"{path}: unreadable PNG ({exc})") from None
    if info["bitdepth"] not in (8, 16):
        raise FormatError(f"{path}: unsupported bit depth {info['bitdepth']} (need 8 or 16)")
    planes = info["planes"]
    data = data.reshape(height, width, planes).astype(np.float64)
    return data / (2 ** info["bitdepth"] - 1), info


def load_png(path) -> np.ndarray:
    """Read a PNG as a 3 x H x W float tensor in [-1, 1]."""
    data, info = _read_png(path)
    if info["alpha"]:
        warnings.warn(f"{path}: dropping alpha channel", stacklevel=2)
        data = data[..., :-1]
    if info["greyscale"]:
        data = np.repeat(data, 3, axis=2)
    return np.ascontiguousarray(data.transpose(2, 0, 1) * 2.0 - 1.0)


def load_mask(path) -> np.ndarray:
    """Read any PNG as a 1 x H x W mask in [0, 1] (luminance for colour)."""
    data, info = _read_png(path)
    if info["alpha"]:
        data = data[..., :-1]
    if info["greyscale"]:
        lum = data[..., 0]
    else:
        lum = 0.299 * data[..., 0] + 0.587 * data[..., 1] + 0.114 * data[..., 2]
    return lum[None].copy()


def to_uint8(img: np.ndarray) -> np.ndarray:
    x = np.clip(np.asarray(img, dtype=np.float64), -1.0, 1.0)
    return np.rint((x + 1.0) * 127.5).astype(np.uint8)


def save_png(img, path) -> None:
    """Write a 3 x H x W (or 1 x H x W) tensor as an 8-bit PNG."""
    q = to_uint8(img)
    c, h, w = q.shape
    if c not in (1, 3):
        raise FormatError(f"{path}: cannot write a {c}-channel image")
    rows = q.transpose(1, 2, 0).reshape(h, w * c)
    writer = png.Writer(width=w, height=h, greyscale=(c == 1), bitdepth=8, compression=9)
    try:
        with open(path, "wb") as f:
            writer.write(f, rows.tolist())
    except OSError as exc:
        raise FormatError(f"{path}: cannot write PNG ({exc})") from None


# --------------------------------------------------------------------------- checkpoints


def _header(ckpt: ModelCheckpoint) -> dict:
    nets = [{"width": net.width, "params": net.shape_table()} for net in ckpt.nets]
    n_floats = sum(int(np.prod(shape)) for net in nets for _, shape in net["params"])
    return {
        "format_version": FORMAT_VERSION,
        "config": ckpt.config.to_dict(),
        "seed": ckpt.config.seed,
        "effective_r": ckpt.effective_r,
        "dims": [list(map(int, d)) for d in ckpt.dims],
        "nets": nets,
        "dtype": "<f4",
        "payload_bytes": 4 * n_floats,
    }


def save_checkpoint(ckpt: ModelCheckpoint, path) -> None:
    header = json.dumps(_header(ckpt), sort_keys=True, separators=(",", ":")).encode("utf-8")
    payload = b"".join(
        np.asarray(a, dtype="<f4").tobytes() for net in ckpt.nets for a in net.named_parameters().values()
    )
    try:
        with open(path, "wb") as f:
            f.write(_PREFIX.pack(MAGIC, FORMAT_VERSION, len(header)))
            f.write(header)
            f.write(payload)
    except OSError as exc:
        raise FormatError(f"{path}: cannot write checkpoint ({exc})") from None


def load_checkpoint(path) -> ModelCheckpoint:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"{path}: cannot read checkpoint ({exc})") from None
    if len(blob) < _PREFIX.size:
        raise FormatError(f"{path}: prefix truncated ({len(blob)} bytes)")
    magic, version, hlen = _PREFIX.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"{path}: magic: expected {MAGIC!r}, found {magic!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: version: unsupported checkpoint format version {version} (reader supports {FORMAT_VERSION})")
    start = _PREFIX.size
    if len(blob) < start + hlen:
        raise FormatError(f"{path}: header truncated")
    try:
        header = json.loads(blob[start:start + hlen].decode("utf-8"))
        config = TrainConfig.from_dict(header["config"])
        nets_meta = header["nets"]
        dims = [tuple(d) for d in header["dims"]]
        effective_r = float(header["effective_r"])
    except (ValueError, KeyError, TypeError, ParameterError) as exc:
        raise FormatError(f"{path}: header: {exc}") from None

    payload = blob[start + hlen:]
    expected = sum(4 * int(np.prod(shape)) for net in nets_meta for _, shape in net["params"])
    if len(payload) != expected or header.get("payload_bytes") != expected:
        raise FormatError(f"{path}: payload: expected {expected} bytes, found {len(payload)}")
    flat = np.frombuffer(payload, dtype="<f4")
    nets, off = [], 0
    for meta in nets_meta:
        arrays = {}
        for name, shape in meta["params"]:
            size = int(np.prod(shape))
            arrays[name] = flat[off:off + size].astype(np.float64).reshape(shape)
            off += size
        nets.append(net_from_arrays(int(meta["width"]), arrays))
    if len(nets) != len(dims):
        raise FormatError(f"{path}: header: {len(nets)} nets but {len(dims)} pyramid levels")
    return ModelCheckpoint(nets=nets, dims=dims, effective_r=effective_r, config=config, version=version)


# --------------------------------------------------------------------------- run config


def load_run_config(path, allowed) -> dict:
    """Read a TOML run config; every key must be in ``allowed``."""
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except OSError as exc:
        raise FormatError(f"{path}: cannot read config ({exc})") from None
    except tomllib.TOMLDecodeError as exc:
        raise FormatError(f"{path}: invalid TOML ({exc})") from None
    for key in data:
        if key not in allowed:
            raise ParameterError(f"{path}: unknown config key {key!r}")
    return data
