"""The per-scale refinement network with hand-written forward/backward passes.

Layout of one network::

    x --1x1--lrelu--1x1--> e
    block_i(e + b_1 + ... + b_{i-1}) = b_i,  i = 1..6
        block = reflect-pad 3x3 conv -> instance norm -> lrelu
    e + b_1 + ... + b_6 --1x1--lrelu--1x1--tanh--> image

Every layer records what its backward pass needs on a :class:`GradientTape`
under a string key; backward functions read it back.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParameterError, ShapeError, StateError
from .tensor import Rng, as_image

NUM_BLOCKS = 6
LRELU_SLOPE = 0.2
IN_EPS = 1e-5
INIT_STD = 0.02


@dataclass
class Conv2dParams:
    weight: np.ndarray  # (out_ch, in_ch, k, k)
    bias: np.ndarray  # (out_ch,)

    @property
    def k(self) -> int:
        return self.weight.shape[-1]

    @property
    def in_ch(self) -> int:
        return self.weight.shape[1]

    @property
    def out_ch(self) -> int:
        return self.weight.shape[0]


@dataclass
class InstanceNormParams:
    gamma: np.ndarray
    beta: np.ndarray
    eps: float = IN_EPS


@dataclass
class Block:
    conv: Conv2dParams
    norm: InstanceNormParams


@dataclass
class RefineNet:
    in_proj: list
    blocks: list
    out_proj: list
    width: int

    def named_parameters(self) -> dict:
        """Parameter arrays by name, in the canonical serialization order."""
        out = {}
        for i, c in enumerate(self.in_proj):
            out[f"in_proj.{i}.weight"] = c.weight
            out[f"in_proj.{i}.bias"] = c.bias
        for i, b in enumerate(self.blocks):
            out[f"blocks.{i}.conv.weight"] = b.conv.weight
            out[f"blocks.{i}.conv.bias"] = b.conv.bias
            out[f"blocks.{i}.norm.gamma"] = b.norm.gamma
            out[f"blocks.{i}.norm.beta"] = b.norm.beta
        for i, c in enumerate(self.out_proj):
            out[f"out_proj.{i}.weight"] = c.weight
            out[f"out_proj.{i}.bias"] = c.bias
        return out

    def shape_table(self) -> list:
        return [[name, list(arr.shape)] for name, arr in self.named_parameters().items()]

    def copy(self) -> "RefineNet":
        return net_from_arrays(self.width, {k: v.copy() for k, v in self.named_parameters().items()})

    def num_parameters(self) -> int:
        return sum(a.size for a in self.named_parameters().values())


def net_from_arrays(width: int, arrays: dict) -> RefineNet:
    """Assemble a network from a name -> array mapping (see ``named_parameters``)."""
    try:
        in_proj = [Conv2dParams(arrays[f"in_proj.{i}.weight"], arrays[f"in_proj.{i}.bias"]) for i in range(2)]
        blocks = [
            Block(
                Conv2dParams(arrays[f"blocks.{i}.conv.weight"], arrays[f"blocks.{i}.conv.bias"]),
                InstanceNormParams(arrays[f"blocks.{i}.norm.gamma"], arrays[f"blocks.{i}.norm.beta"]),
            )
            for i in range(NUM_BLOCKS)
        ]
        out_proj = [Conv2dParams(arrays[f"out_proj.{i}.weight"], arrays[f"out_proj.{i}.bias"]) for i in range(2)]
    except KeyError as exc:
        raise ShapeError(f"missing parameter {exc.args[0]}") from None
    return RefineNet(in_proj=in_proj, blocks=blocks, out_proj=out_proj, width=width)


def param_shapes(width: int) -> dict:
    w, rgb = width, 3
    shapes = {
        "in_proj.0.weight": (w, rgb, 1, 1), "in_proj.0.bias": (w,),
        "in_proj.1.weight": (w, w, 1, 1), "in_proj.1.bias": (w,),
    }
    for i in range(NUM_BLOCKS):
        shapes[f"blocks.{i}.conv.weight"] = (w, w, 3, 3)
        shapes[f"blocks.{i}.conv.bias"] = (w,)
        shapes[f"blocks.{i}.norm.gamma"] = (w,)
        shapes[f"blocks.{i}.norm.beta"] = (w,)
    shapes.update({
        "out_proj.0.weight": (w, w, 1, 1), "out_proj.0.bias": (w,),
        "out_proj.1.weight": (rgb, w, 1, 1), "out_proj.1.bias": (rgb,),
    })
    return shapes


def net_init(width: int, rng: Rng) -> RefineNet:
    """Conv weights ~ N(0, 0.02); biases 0; gamma 1, beta 0; last layer all zero."""
    if width < 1:
        raise ParameterError(f"width must be >= 1, got {width}")
    arrays = {}
    for name, shape in param_shapes(width).items():
        if name.endswith("gamma"):
            arrays[name] = np.ones(shape)
        elif name.endswith(("bias", "beta")) or name == "out_proj.1.weight":
            arrays[name] = np.zeros(shape)
        else:
            arrays[name] = rng.normal(shape, INIT_STD)
    return net_from_arrays(width, arrays)


class GradientTape:
    """Forward-pass caches keyed by layer name."""

    def __init__(self):
        self.caches: dict = {}

    def put(self, key: str, value) -> None:
        self.caches[key] = value

    def get(self, key: str):
        try:
            return self.caches[key]
        except KeyError:
            raise StateError(f"no forward pass recorded for layer {key!r}") from None


# --------------------------------------------------------------------------- conv


# patch matrices are built a band of rows at a time to bound memory
_CHUNK_BYTES = 16 * 2**20


def _row_chunks(c: int, h: int, w: int):
    rows = max(1, _CHUNK_BYTES // (72 * c * w))
    for r0 in range(0, h, rows):
        yield r0, min(h, r0 + rows)


def _flat3(weight: np.ndarray) -> np.ndarray:
    """(O, C, 3, 3) -> (O, 9C) matching the im2col row order (ky, kx, c)."""
    return np.ascontiguousarray(weight.transpose(0, 2, 3, 1)).reshape(weight.shape[0], -1)


def conv_forward(x, p: Conv2dParams, tape: GradientTape | None = None, key: str = "conv") -> np.ndarray:
    """Cross-correlation; 3x3 kernels see a 1-px reflection-padded input."""
    x = as_image(x)
    c, h, w = x.shape
    if c != p.in_ch:
        raise ShapeError(f"conv expects {p.in_ch} input channels, got {c}")
    if p.k == 1:
        y = p.weight[:, :, 0, 0] @ x.reshape(c, h * w)
        if tape is not None:
            tape.put(key, x)
    elif p.k == 3:
        xp = kernels.pad_reflect(x, 1, 1)
        w2 = _flat3(p.weight)
        y = np.empty((p.out_ch, h * w))
        for r0, r1 in _row_chunks(c, h, w):
            y[:, r0 * w:r1 * w] = w2 @ kernels.im2col3(xp, r0, r1)
        if tape is not None:
            tape.put(key, xp)
    else:
        raise ShapeError(f"unsupported kernel size {p.k}")
    y += p.bias[:, None]
    return y.reshape(p.out_ch, h, w)


def conv_backward(grad_out, tape: GradientTape, p: Conv2dParams, key: str = "conv"):
    """Returns ``(grad_in, {"weight": ..., "bias": ...})``."""
    if tape is None:
        raise StateError("conv_backward needs the tape from the forward pass")
    cached = tape.get(key)
    o, h, w = grad_out.shape
    g = np.ascontiguousarray(grad_out).reshape(o, h * w)
    gb = g.sum(axis=1)
    if p.k == 1:
        x = cached
        c = x.shape[0]
        gw = (g @ x.reshape(c, h * w).T).reshape(p.weight.shape)
        gx = (p.weight[:, :, 0, 0].T @ g).reshape(c, h, w)
        return gx, {"weight": gw, "bias": gb}
    xp = cached
    c = xp.shape[0]
    w2 = _flat3(p.weight)
    gw2 = None
    gxp = np.zeros_like(xp)
    for r0, r1 in _row_chunks(c, h, w):
        gc = g[:, r0 * w:r1 * w]
        part = gc @ kernels.im2col3(xp, r0, r1).T
        gw2 = part if gw2 is None else gw2 + part
        kernels.col2im3_add(gxp, w2.T @ gc, r0, r1)
    gw = np.ascontiguousarray(gw2.reshape(o, 3, 3, c).transpose(0, 3, 1, 2))
    gx = kernels.pad_reflect_adjoint(gxp, 1, 1)
    return gx, {"weight": gw, "bias": gb}


# --------------------------------------------------------------------------- norm


def instancenorm_forward(x, p: InstanceNormParams, tape: GradientTape | None = None, key: str = "norm"):
    x = as_image(x)
    c = x.shape[0]
    if c != p.gamma.shape[0]:
        raise ShapeError(f"instance norm has {p.gamma.shape[0]} channels, input has {c}")
    mean = x.mean(axis=(1, 2), keepdims=True)
    xc = x - mean
    var = (xc * xc).mean(axis=(1, 2), keepdims=True)
    inv_std = 1.0 / np.sqrt(var + p.eps)
    xhat = xc * inv_std
    if tape is not None:
        tape.put(key, (xhat, inv_std))
    return xhat * p.gamma[:, None, None] + p.beta[:, None, None]


def instancenorm_backward(grad_out, tape: GradientTape, p: InstanceNormParams, key: str = "norm"):
    xhat, inv_std = tape.get(key)
    n = xhat.shape[1] * xhat.shape[2]
    ggamma = (grad_out * xhat).sum(axis=(1, 2))
    gbeta = grad_out.sum(axis=(1, 2))
    gxhat = grad_out * p.gamma[:, None, None]
    s1 = gxhat.sum(axis=(1, 2), keepdims=True)
    s2 = (gxhat * xhat).sum(axis=(1, 2), keepdims=True)
    gx = inv_std * (gxhat - s1 / n - xhat * (s2 / n))
    return gx, {"gamma": ggamma, "beta": gbeta}


# --------------------------------------------------------------------------- pointwise


def leaky_relu(x, slope: float = LRELU_SLOPE) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.where(x >= 0, x, slope * x)


def leaky_relu_backward(grad_out, x, slope: float = LRELU_SLOPE) -> np.ndarray:
    return np.where(np.asarray(x) >= 0, grad_out, slope * grad_out)


def tanh_backward(grad_out, y) -> np.ndarray:
    return grad_out * (1.0 - y * y)


# --------------------------------------------------------------------------- network


def net_forward(x, net: RefineNet, tape: GradientTape | None = None) -> np.ndarray:
    x = as_image(x, channels=3)
    t = tape
    h = conv_forward(x, net.in_proj[0], t, "in_proj.0")
    a = leaky_relu(h)
    if t is not None:
        t.put("in_act", h)
    acc = conv_forward(a, net.in_proj[1], t, "in_proj.1")
    for i, blk in enumerate(net.blocks):
        z = conv_forward(acc, blk.conv, t, f"blocks.{i}.conv")
        z = instancenorm_forward(z, blk.norm, t, f"blocks.{i}.norm")
        if t is not None:
            t.put(f"blocks.{i}.act", z)
        acc = acc + leaky_relu(z)
    h = conv_forward(acc, net.out_proj[0], t, "out_proj.0")
    a = leaky_relu(h)
    if t is not None:
        t.put("out_act", h)
    y = np.tanh(conv_forward(a, net.out_proj[1], t, "out_proj.1"))
    if t is not None:
        t.put("tanh", y)
    return y


def net_backward(grad_out, tape: GradientTape, net: RefineNet):
    """Gradient of a scalar loss w.r.t. the input and every parameter.

    ``grad_out`` is dLoss/dOutput. Returns ``(grad_in, grads)`` where
    ``grads`` mirrors :meth:`RefineNet.named_parameters`.
    """
    if tape is None:
        raise StateError("net_backward needs the tape from the forward pass")
    grads = {}

    def put(prefix, d):
        for k, v in d.items():
            grads[f"{prefix}.{k}"] = v

    g = tanh_backward(grad_out, tape.get("tanh"))
    g, d = conv_backward(g, tape, net.out_proj[1], "out_proj.1")
    put("out_proj.1", d)
    g = leaky_relu_backward(g, tape.get("out_act"))
    g_acc, d = conv_backward(g, tape, net.out_proj[0], "out_proj.0")
    put("out_proj.0", d)
    for i in range(len(net.blocks) - 1, -1, -1):
        blk = net.blocks[i]
        g = leaky_relu_backward(g_acc, tape.get(f"blocks.{i}.act"))
        g, d = instancenorm_backward(g, tape, blk.norm, f"blocks.{i}.norm")
        put(f"blocks.{i}.norm", d)
        g, d = conv_backward(g, tape, blk.conv, f"blocks.{i}.conv")
        put(f"blocks.{i}.conv", d)
        g_acc = g_acc + g
    g, d = conv_backward(g_acc, tape, net.in_proj[1], "in_proj.1")
    put("in_proj.1", d)
    g = leaky_relu_backward(g, tape.get("in_act"))
    g, d = conv_backward(g, tape, net.in_proj[0], "in_proj.0")
    put("in_proj.0", d)
    order = net.named_parameters()
    return g, {k: grads[k] for k in order}
