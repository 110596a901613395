"""Tabulate the asymptotic aRIP bounds L(delta, rho) and U(delta, rho) on a grid."""
import argparse
from pathlib import Path

import numpy as np

from sparsephase.cli import csv_text
from sparsephase.errors import DomainError, NoRootError
from sparsephase.rip_asymptotic import PhasePoint, bound_L, bound_U


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/bounds.csv")
    ap.add_argument("--points", type=int, default=40)
    args = ap.parse_args()
    rows = []
    for d in np.linspace(0.025, 1.0, args.points):
        for r in np.linspace(0.01, 0.99, args.points):
            at = PhasePoint(float(d), float(r))
            try:
                L = bound_L(at)
            except (DomainError, NoRootError):
                L = None  # lambda_min underflows; L is 1 to double precision
            rows.append((at.delta, at.rho, L, bound_U(at)))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(csv_text(("delta", "rho", "L", "U"), rows))
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
