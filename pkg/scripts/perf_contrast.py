"""Wall time of full-history quadrature against the exponential recursion."""

import argparse
import time
from dataclasses import replace

from fadmem.kernel_lab import resolvent_exponential
from fadmem.memsolver import FULL_HISTORY, RECURSION, SolverConfig, run
from fadmem.model import FluxModel, InitialData, l1_dist


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--cells", type=int, default=2000)
    p.add_argument("--dt", type=float, default=2.5e-4)
    p.add_argument("--t-final", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.5)
    args = p.parse_args()

    u0 = InitialData.smooth(1.0, 0.0, 0.5).on_grid(-1.0, 1.0, args.cells)
    base = SolverConfig(FluxModel.burgers(), resolvent_exponential(args.eps, args.alpha, 1e-3, 2),
                        t_final=args.t_final, dt=args.dt)
    finals = {}
    for mode in (RECURSION, FULL_HISTORY):
        start = time.perf_counter()
        rec = run(replace(base, memory_mode=mode), u0)
        elapsed = time.perf_counter() - start
        finals[mode] = (rec.final, elapsed)
        print(f"{mode:>12s}: {rec.steps} steps in {elapsed:.3f}s")
    (a, ta), (b, tb) = finals[FULL_HISTORY], finals[RECURSION]
    print(f"speed-up {ta / tb:.1f}, L1 difference {l1_dist(a, b):.3e}")


if __name__ == "__main__":
    main()
