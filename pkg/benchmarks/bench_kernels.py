"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Times each hot kernel at training-sized shapes, then one full training
iteration (forward, loss, backward, Adam) with each backend swapped in.
"""
import argparse
import timeit

import numpy as np

from sinir import kernels
from sinir.corruption import CorruptionSpec, corrupt
from sinir.loss import gaussian_taps, rec_loss_and_grad
from sinir.nn import GradientTape, net_backward, net_forward, net_init
from sinir.optim import AdamState, adam_step
from sinir.tensor import Rng


def kernel_cases(rng):
    taps = gaussian_taps(11, 1.5)
    stack = rng.uniform(-1, 1, (15, 250, 188))  # 5 SSIM moments x 3 channels
    act = rng.normal(size=(64, 64, 64))
    xp = kernels.pad_reflect(act, 1, 1)
    cols = kernels.im2col3(xp, 0, 64)
    return {
        "filter_reflect 15x250x188": lambda impl: kernels.separable_filter(stack, taps, impl),
        "filter_adjoint 15x250x188": lambda impl: kernels.separable_filter_adjoint(stack, taps, impl),
        "pad_reflect 64x64x64": lambda impl: kernels.pad_reflect(act, 1, 1, impl),
        "pad_adjoint 64x66x66": lambda impl: kernels.pad_reflect_adjoint(xp, 1, 1, impl),
        "im2col3 64x64x64": lambda impl: kernels.im2col3(xp, 0, 64, impl),
        "col2im3 64x64x64": lambda impl: kernels.col2im3_add(np.zeros_like(xp), cols, 0, 64, impl),
    }


def train_step_case(rng, size=64, width=64):
    img = rng.uniform(-1, 1, (3, size, size))
    net = net_init(width, Rng(0))
    state = AdamState(lr=1e-4)
    params = net.named_parameters()
    noise = Rng(1)

    def step(impl):
        saved = kernels._impl
        kernels._impl = impl
        try:
            tape = GradientTape()
            y = net_forward(corrupt(img, CorruptionSpec(), noise), net, tape)
            _, g = rec_loss_and_grad(y, img)
            _, grads = net_backward(g, tape, net)
            adam_step(params, grads, state)
        finally:
            kernels._impl = saved

    return {f"train step {size}px width {width}": step}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = kernels.backends()
    if "compiled" not in impls:
        print("compiled backend not built; only the Python fallback is available")
    rng = np.random.default_rng(0)
    cases = {**kernel_cases(rng), **train_step_case(rng)}
    names = sorted(impls)
    print(f"{'case':32s}" + "".join(f"{n + ' ms':>14s}" for n in names) + f"{'speedup':>10s}")
    for case, fn in cases.items():
        ms = {}
        for n in names:
            fn(impls[n])  # warm up
            ms[n] = 1e3 * min(timeit.repeat(lambda: fn(impls[n]), number=1, repeat=args.repeat))
        speed = f"{ms['python'] / ms['compiled']:9.1f}x" if len(ms) == 2 else ""
        print(f"{case:32s}" + "".join(f"{ms[n]:14.2f}" for n in names) + f"{speed:>10s}")


if __name__ == "__main__":
    main()
