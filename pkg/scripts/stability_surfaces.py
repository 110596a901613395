"""Tabulate mu(delta, rho) and xi/(1 - mu) over a grid, plus stability level curves.

Surface files have columns delta, rho, mu, ratio; ratio is empty where mu >= 1.
"""
import argparse
from pathlib import Path

import numpy as np

from sparsephase.cli import csv_text
from sparsephase.errors import DomainError
from sparsephase.factors import AsymptoticBoundsProvider, factors_for
from sparsephase.transition import CURVE_ALGORITHMS, TransitionTable, stability_level_curve


def surface(alg, deltas, rhos):
    for d in deltas:
        for r in rhos:
            try:
                f = factors_for(alg, AsymptoticBoundsProvider(float(d), float(r)))
            except DomainError:
                yield (d, r, None, None)
                continue
            yield (d, r, f.mu, f.stability)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results/stability")
    ap.add_argument("--deltas", type=int, default=30)
    ap.add_argument("--rhos", type=int, default=30)
    ap.add_argument("--levels", type=float, nargs="+", default=[5.0, 10.0, 50.0])
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    deltas = np.geomspace(1e-3, 1.0, args.deltas)
    for alg in CURVE_ALGORITHMS:
        rhos = np.geomspace(1e-5, 5e-3 if alg.value != "l1" else 2e-2, args.rhos)
        rows = list(surface(alg, deltas, rhos))
        (out / f"{alg.value}_surface.csv").write_text(
            csv_text(("delta", "rho", "mu", "ratio"), rows))
        for level in args.levels:
            table = stability_level_curve(alg, deltas, level)
            (out / f"{alg.value}_level_{level:g}.csv").write_text(
                csv_text(TransitionTable.CSV_HEADER, table.rows()))
        print(f"{alg.value}: {len(rows)} surface points, {len(args.levels)} level curves")


if __name__ == "__main__":
    main()
