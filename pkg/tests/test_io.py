import struct

import numpy as np
import png
import pytest

from sinir.errors import FormatError, ParameterError
from sinir.io import (
    FORMAT_VERSION,
    load_checkpoint,
    load_mask,
    load_png,
    load_run_config,
    save_checkpoint,
    save_png,
    to_uint8,
)
from sinir.trainer import TrainConfig, train

from .gradcheck import random_net


def _write(path, rows, **kw):
    with open(path, "wb") as f:
        png.Writer(**kw).write(f, rows)


@pytest.mark.parametrize("value, expected", [(0, -1.0), (255, 1.0)])
def test_black_and_white(tmp_path, value, expected):
    p = tmp_path / "x.png"
    _write(p, [[value] * 12] * 3, width=4, height=3, greyscale=False)
    img = load_png(p)
    assert img.shape == (3, 3, 4) and np.all(img == expected)


def test_greyscale_and_16_bit(tmp_path):
    p = tmp_path / "g.png"
    _write(p, [[0, 65535], [32768, 65535]], width=2, height=2, greyscale=True, bitdepth=16)
    img = load_png(p)
    assert img.shape == (3, 2, 2)
    assert img[:, 0, 0].tolist() == [-1.0] * 3 and img[2, 1, 1] == 1.0


def test_alpha_is_dropped_with_warning(tmp_path):
    p = tmp_path / "a.png"
    _write(p, [[10, 20, 30, 40]], width=1, height=1, greyscale=False, alpha=True)
    with pytest.warns(UserWarning, match="alpha"):
        img = load_png(p)
    np.testing.assert_allclose(img[:, 0, 0], np.array([10, 20, 30]) / 127.5 - 1)


def test_eight_bit_round_trip_is_byte_identical(tmp_path, chelsea):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    save_png(chelsea, a)
    save_png(load_png(a), b)
    assert a.read_bytes() == b.read_bytes()
    assert np.array_equal(load_png(a), chelsea)


def test_quantisation_error_bound(tmp_path, nprng):
    x = nprng.uniform(-1, 1, (3, 7, 9))
    save_png(x, tmp_path / "q.png")
    assert np.abs(load_png(tmp_path / "q.png") - x).max() <= 1 / 255 + 1e-12


def test_save_clamps():
    assert to_uint8(np.array([-3.0, 0.0, 2.0])).tolist() == [0, 128, 255]


def test_unreadable_png(tmp_path):
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"not a png")
    with pytest.raises(FormatError, match="bad.png"):
        load_png(bad)
    with pytest.raises(FormatError, match="missing.png"):
        load_png(tmp_path / "missing.png")


def test_mask_luminance(tmp_path):
    p = tmp_path / "m.png"
    _write(p, [[255, 255, 255, 0, 0, 0]], width=2, height=1, greyscale=False)
    m = load_mask(p)
    assert m.shape == (1, 1, 2)
    np.testing.assert_allclose(m[0, 0], [1.0, 0.0], atol=1e-12)


@pytest.fixture(scope="module")
def ckpt():
    img = np.random.default_rng(0).uniform(-1, 1, (3, 30, 24))
    ck = train(img, TrainConfig(max_dim=30, min_dim=12, iters_per_scale=0, width=4, log_every=0))
    rng = np.random.default_rng(1)
    ck.nets = [random_net(rng, 4) for _ in ck.nets]
    return ck


def test_checkpoint_round_trip(tmp_path, ckpt):
    a, b = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
    save_checkpoint(ckpt, a)
    back = load_checkpoint(a)
    assert back.config == ckpt.config and back.dims == ckpt.dims and back.effective_r == ckpt.effective_r
    for n0, n1 in zip(ckpt.nets, back.nets):
        for (k0, v0), (k1, v1) in zip(n0.named_parameters().items(), n1.named_parameters().items()):
            assert k0 == k1
            assert np.array_equal(v0.astype(np.float32), v1)
    save_checkpoint(back, b)
    assert a.read_bytes() == b.read_bytes()


def test_checkpoint_layout(tmp_path, ckpt):
    import json

    p = tmp_path / "c.ckpt"
    save_checkpoint(ckpt, p)
    blob = p.read_bytes()
    magic, version, hlen = struct.unpack_from("<8sII", blob)
    assert (magic, version) == (b"SINIRCKP", FORMAT_VERSION)
    header = json.loads(blob[16:16 + hlen])
    n = sum(int(np.prod(s)) for net in header["nets"] for _, s in net["params"])
    assert len(blob) - 16 - hlen == 4 * n == header["payload_bytes"]
    assert header["nets"][0]["params"][0][0] == "in_proj.0.weight"
    first = np.frombuffer(blob[16 + hlen:16 + hlen + 4 * 12], "<f4")
    assert np.array_equal(first, ckpt.nets[0].in_proj[0].weight.ravel().astype(np.float32))


def _corrupt(tmp_path, ckpt, fn):
    p = tmp_path / "x.ckpt"
    save_checkpoint(ckpt, p)
    p.write_bytes(fn(bytearray(p.read_bytes())))
    return p


def test_bad_magic(tmp_path, ckpt):
    def f(b):
        b[0:1] = b"X"
        return bytes(b)

    with pytest.raises(FormatError, match="magic"):
        load_checkpoint(_corrupt(tmp_path, ckpt, f))


def test_newer_version_rejected(tmp_path, ckpt):
    def f(b):
        struct.pack_into("<I", b, 8, FORMAT_VERSION + 1)
        return bytes(b)

    with pytest.raises(FormatError, match="version: unsupported checkpoint format version 2"):
        load_checkpoint(_corrupt(tmp_path, ckpt, f))


def test_truncated_payload(tmp_path, ckpt):
    with pytest.raises(FormatError, match="payload"):
        load_checkpoint(_corrupt(tmp_path, ckpt, lambda b: bytes(b[:-4])))


def test_garbled_header(tmp_path, ckpt):
    def f(b):
        b[20] = ord("!")
        return bytes(b)

    with pytest.raises(FormatError, match="header"):
        load_checkpoint(_corrupt(tmp_path, ckpt, f))


def test_short_file(tmp_path):
    p = tmp_path / "s.ckpt"
    p.write_bytes(b"SIN")
    with pytest.raises(FormatError, match="prefix"):
        load_checkpoint(p)


def test_run_config(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text('iters_per_scale = 10\nlr = 0.001\n')
    assert load_run_config(p, {"iters_per_scale", "lr"}) == {"iters_per_scale": 10, "lr": 0.001}
    p.write_text('iters_per_scale = 10\nlearning_rate = 0.1\n')
    with pytest.raises(ParameterError, match="learning_rate"):
        load_run_config(p, {"iters_per_scale", "lr"})
    p.write_text("= nope")
    with pytest.raises(FormatError, match="TOML"):
        load_run_config(p, set())
