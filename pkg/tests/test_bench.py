import importlib.util
from pathlib import Path

import numpy as np

from sinir import kernels

BENCH = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"


def test_benchmark_cases_run_on_every_backend():
    spec = importlib.util.spec_from_file_location("bench_kernels", BENCH)
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    cases = bench.kernel_cases(np.random.default_rng(0))
    for impl in kernels.backends().values():
        for fn in cases.values():
            fn(impl)
