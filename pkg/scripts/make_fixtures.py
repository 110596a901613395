"""Regenerate the committed test fixtures in tests/data.

Golden values come from plain loops over numpy SVDs and an exhaustive
l0 search, not from the package routines they later check.
"""
import argparse
import itertools
import json
from pathlib import Path

import numpy as np

from sparsephase.cli import write_matrix
from sparsephase.experiment import gaussian_matrix, sparse_signal


def enumerate_constants(A, order):
    lo, hi = np.inf, -np.inf
    for I in itertools.combinations(range(A.shape[1]), order):
        s = np.linalg.svd(A[:, I], compute_uv=False)
        lo, hi = min(lo, s[-1] ** 2), max(hi, s[0] ** 2)
    return max(0.0, 1.0 - lo), max(0.0, hi - 1.0)


def l0_solution(A, y, k):
    best, best_res = None, np.inf
    for I in itertools.combinations(range(A.shape[1]), k):
        z = np.linalg.lstsq(A[:, I], y, rcond=None)[0]
        res = np.linalg.norm(y - A[:, I] @ z)
        if res < best_res:
            best_res, best = res, (I, z)
    x = np.zeros(A.shape[1])
    x[list(best[0])] = best[1]
    return x


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests" / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    write_matrix(out / "identity6.txt", np.eye(6))
    x = np.array([0.0, 2.5, 0.0, 0.0, -1.0, 0.0])
    write_matrix(out / "identity6_y.txt", x[None, :])

    A = gaussian_matrix(6, 10, 2024)
    write_matrix(out / "gauss6x10.txt", A)
    golden = {str(m): dict(zip(("L", "U"), enumerate_constants(A, m))) for m in range(1, 5)}
    (out / "gauss6x10_arip.json").write_text(json.dumps(golden, indent=2) + "\n")

    A = gaussian_matrix(8, 16, 7)
    x = sparse_signal(16, 2, "gaussian", 8)
    y = A @ x
    write_matrix(out / "gauss8x16.txt", A)
    write_matrix(out / "gauss8x16_y.txt", y[None, :])
    x0 = l0_solution(A, y, 2)
    (out / "gauss8x16_l0.json").write_text(json.dumps({
        "k": 2,
        "support": np.flatnonzero(x0).tolist(),
        "estimate": x0.tolist(),
    }, indent=2) + "\n")


if __name__ == "__main__":
    main()
