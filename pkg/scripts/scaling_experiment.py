#!/usr/bin/env python3
"""Per-round cost of the encrypted scoring pass across graph sizes.

Cycle graphs terminate after exactly one round (no vertex is ever
simplicial), isolating one full mask + score evaluation per run. Expect the
per-round column to grow roughly 8x per size doubling: the matrix product
dominates at n^3 ciphertext multiplications.
"""
import sys
import time

from hechordal.backend import default_params
from hechordal.graphs import builtin_graph
from hechordal.protocol import alice_init, run_local


def measure(n, repeats=3):
    g = builtin_graph(f"cycle-{n}")
    params = default_params(n)
    t0 = time.perf_counter()
    alice_init(g, params)
    init_ms = (time.perf_counter() - t0) * 1000.0
    best = float("inf")
    for _ in range(repeats):
        _, transcript = run_local(g, params)
        best = min(best, sum(r.millis for r in transcript.rounds) / len(transcript.rounds))
    return init_ms, best


def main():
    sizes = [int(s) for s in sys.argv[1].split(",")] if len(sys.argv) > 1 else [16, 32, 64, 128]
    print(f"{'n':>6} {'init_ms':>10} {'round_ms':>10} {'ratio':>7}")
    previous = None
    for n in sizes:
        init_ms, round_ms = measure(n)
        ratio = "" if previous is None else f"{round_ms / previous:.2f}"
        print(f"{n:>6} {init_ms:>10.1f} {round_ms:>10.1f} {ratio:>7}")
        previous = round_ms


if __name__ == "__main__":
    main()
