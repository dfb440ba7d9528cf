"""Distance between memory and local solutions as the memory scale shrinks."""

import argparse

from fadmem.kernel_lab import resolvent_exponential
from fadmem.memsolver import RECURSION, SolverConfig
from fadmem.model import FluxModel, InitialData
from fadmem.verify import check_relaxation_limit


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--eps", type=float, nargs="+", default=[0.4, 0.2, 0.1, 0.05])
    p.add_argument("--cells", type=int, default=800)
    p.add_argument("--t-final", type=float, default=1.0)
    args = p.parse_args()

    u0 = InitialData.riemann(1.0, 0.0).on_grid(-1.0, 2.0, args.cells, "outflow")
    cfg = SolverConfig(FluxModel.burgers(), resolvent_exponential(args.eps[0], args.alpha, 1e-3, 2),
                       t_final=args.t_final, memory_mode=RECURSION)
    rep = check_relaxation_limit(args.eps, cfg, u0, args.alpha, threshold=float("inf"))
    print("eps,distance")
    for e, d in zip(rep.details["eps"], rep.details["distance"]):
        print(f"{e:.6g},{d:.6g}")
    info = rep.info
    print(f"monotone={info['monotone']}")
    print(f"shock position {info['shock_position']:.5f}, exact {info['shock_exact']:.5f}, "
          f"error {info['shock_error']:.5f} ({info['shock_error'] / info['dx']:.2f} dx)")


if __name__ == "__main__":
    main()
