"""Time the column kernels under the numba and numpy backends.

Two workloads:

* raw ``step_batch`` throughput on a large random frontier;
* end-to-end ``model_check`` on the scheduler structure and on SNSAT reductions.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.  Both backends
must produce identical arrays; the script exits non-zero otherwise.
"""
import argparse
import random
import sys
import time
from importlib import resources

import numpy as np

from hsmc import formula as F
from hsmc.checker import ValuationTables, kernels, model_check
from hsmc.checker.oracle import _csr
from hsmc.checker.program import compile_program
from hsmc.core import parse_kripke
from hsmc.generators import random_kripke
from hsmc.snsat import build_kripke, build_property, random_instance


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_workload(rows=20000, seed=0):
    rng = random.Random(seed)
    k = random_kripke(rng, min_states=40, max_states=40, max_edges=400, letters=("p", "q", "r"))
    phi = F.normalize(F.parse("[B](p -> <B>(q | ~r)) & <B><B>(p | q) | ~<B>(r & <B> p)"))
    tables = ValuationTables(k.num_states)
    prog = compile_program(k, phi, tables)
    ptr, idx = _csr(k)
    gen = np.random.default_rng(seed)
    states = gen.integers(0, k.num_states, rows, dtype=np.int32)
    cols = gen.integers(0, 2, (rows, prog.width), dtype=np.uint8)
    args = (states, cols, ptr, idx, prog.ops, prog.arg0, prog.arg1, prog.letters, prog.a_vals)
    return args


def end_to_end_workloads():
    data = resources.files("hsmc") / "data"
    ksched = parse_kripke((data / "ksched.kripke").read_text())
    out = []
    for name in ("ksched_fair.hs", "ksched_p3.hs", "ksched_all.hs"):
        text = " ".join(
            ln for ln in (data / name).read_text().splitlines() if not ln.startswith("#")
        )
        out.append((f"K_Sched {name}", ksched, F.parse(text)))
    rng = random.Random(5)
    for i in range(3):
        inst = random_instance(rng, 2, max_locals=2)
        out.append((f"SNSAT n=2 #{i}", build_kripke(inst), build_property(inst)))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--rows", type=int, default=20000)
    opts = ap.parse_args()
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}")

    args = kernel_workload(opts.rows)
    results = {}
    for b in backends:
        kernels.set_backend(b)
        results[b] = kernels.step_batch(*args)  # warm-up, includes JIT compile
        t = best_of(lambda: kernels.step_batch(*args), opts.repeat)
        print(f"step_batch  {b:6s} rows={opts.rows:<7d} {t * 1e3:9.2f} ms")
    if len(backends) == 2:
        a, b = (results[x] for x in backends)
        if not all(np.array_equal(x, y) for x, y in zip(a, b)):
            print("backends disagree on step_batch output")
            return 1

    ok = True
    for label, k, phi in end_to_end_workloads():
        answers = {}
        line = f"{label:24s}"
        for b in backends:
            kernels.set_backend(b)
            model_check(k, phi)
            t = best_of(lambda: model_check(k, phi), opts.repeat)
            answers[b] = model_check(k, phi).answer
            line += f"  {b} {t * 1e3:8.2f} ms"
        ok &= len(set(answers.values())) == 1
        print(line + f"  holds={answers[backends[0]]}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
