"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--n 100000] [--repeat 5]

Prints per-call best-of-N timings for each kernel and the speedup of the
compiled backend. The whole-session line shows how much of a session's cost
the kernels actually account for.
"""
import argparse
import timeit

import numpy as np

from qkdmitm import kernels
from qkdmitm.adversary import EveStrategy
from qkdmitm.channels import MessageOrdering, SessionConfig, run_session


def workloads(n: int, rng: np.random.Generator):
    payload = rng.integers(0, 2, n).astype(np.uint8)
    controls = rng.integers(0, 2, n).astype(np.uint8)
    bases = rng.integers(0, 2, n).astype(np.uint8)
    outcomes = rng.integers(0, 3, n).astype(np.uint8)
    other = rng.integers(0, 3, n).astype(np.uint8)
    guesses = rng.integers(0, 2, n).astype(np.uint8)
    states = kernels.encode(payload, controls)
    amps = kernels.prepare_amps(states)
    uniforms = rng.random(n)
    reads_i = rng.integers(0, 2, (3, n)).astype(np.uint8)
    reads_h = rng.integers(0, 2, (3, n)).astype(np.uint8)
    return {
        "encode": lambda m: m.encode(payload, controls),
        "measure_symbolic": lambda m: m.measure_symbolic(states, bases),
        "prepare_amps": lambda m: m.prepare_amps(states),
        "measure_physical": lambda m: m.measure_physical(amps, bases, uniforms),
        "forge": lambda m: m.forge(outcomes, bases, guesses),
        "reconstruct": lambda m: m.reconstruct(outcomes, other),
        "classify_copies": lambda m: m.classify_copies(reads_i, reads_h),
        "hamming": lambda m: m.hamming(outcomes, other),
    }


def best(fn, repeat: int) -> float:
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000, help="qubits per kernel call")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled backend not built; only the Python timings are shown")
    names = list(impls)
    print(f"kernel timings, n={args.n} (best of {args.repeat})")
    print(f"{'kernel':<18}" + "".join(f"{name:>14}" for name in names) + "   speedup")
    for label, call in workloads(args.n, np.random.default_rng(0)).items():
        times = {name: best(lambda m=impls[name]: call(m), args.repeat) for name in names}
        cells = "".join(f"{times[name] * 1e3:>11.3f} ms" for name in names)
        speed = f"{times['python'] / times['cython']:>8.1f}x" if "cython" in times else ""
        print(f"{label:<18}{cells}{speed}")

    cfg = SessionConfig(
        length=64, ordering=MessageOrdering.retransmit(2), adversary=EveStrategy.attack1(1)
    )
    per = best(lambda: run_session(cfg), args.repeat)
    print(f"\nattack1 session, 64 qubits, active backend {kernels.BACKEND}: {per * 1e6:.0f} us")


if __name__ == "__main__":
    main()
