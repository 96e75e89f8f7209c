"""Adam with bias-corrected moments, no weight decay, no clipping."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError

BETA1 = 0.5
BETA2 = 0.999
EPS = 1e-8


@dataclass
class AdamState:
    lr: float = 1e-4
    beta1: float = BETA1
    beta2: float = BETA2
    eps: float = EPS
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    def state_dict(self) -> dict:
        return {
            "lr": self.lr, "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps, "t": self.t,
            "m": {k: a.copy() for k, a in self.m.items()},
            "v": {k: a.copy() for k, a in self.v.items()},
        }

    @classmethod
    def from_state_dict(cls, d: dict) -> "AdamState":
        return cls(
            lr=d["lr"], beta1=d["beta1"], beta2=d["beta2"], eps=d["eps"], t=d["t"],
            m={k: np.array(a, dtype=np.float64) for k, a in d["m"].items()},
            v={k: np.array(a, dtype=np.float64) for k, a in d["v"].items()},
        )


def adam_step(params: dict, grads: dict, state: AdamState) -> None:
    """Update ``params`` in place; ``grads`` must cover the same names and shapes."""
    if params.keys() != grads.keys():
        raise ShapeError(f"parameter/gradient names differ: {sorted(set(params) ^ set(grads))}")
    for k, p in params.items():
        if p.shape != grads[k].shape:
            raise ShapeError(f"gradient for {k} has shape {grads[k].shape}, parameter {p.shape}")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for k, p in params.items():
        g = grads[k]
        if k not in state.m:
            state.m[k] = np.zeros_like(p)
            state.v[k] = np.zeros_like(p)
        m, v = state.m[k], state.v[k]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
