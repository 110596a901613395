"""Print the delta = 1 oversampling constants 1/rho_star for each algorithm."""
import argparse
import time

from sparsephase.rip_asymptotic import record_roots
from sparsephase.transition import rho_star

REFERENCE = {"l1": 317, "iht": 907, "sp": 3124, "cosamp": 4923}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--delta", type=float, default=1.0)
    args = ap.parse_args()
    print(f"{'alg':8s} {'1/rho_star':>12s} {'reference':>10s} {'rel diff':>9s}")
    t0 = time.perf_counter()
    with record_roots() as log:
        for alg, ref in REFERENCE.items():
            c = 1.0 / rho_star(alg, args.delta)
            diff = f"{c / ref - 1:+.2%}" if args.delta == 1.0 else ""
            print(f"{alg:8s} {c:12.3f} {ref:10d} {diff:>9s}")
    print(f"{log.count} lambda roots, max residual {log.max_residual:.1e}, "
          f"{time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
