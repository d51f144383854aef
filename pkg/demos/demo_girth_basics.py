"""Exact girth on small matrices, then a sampling scan on a larger one.

Girth here is the size of the smallest linearly dependent column set;
a matrix whose columns are all independent reports ncols + 1.
"""

import argparse
from fractions import Fraction

from highgirth import (
    FieldSpec,
    Matrix,
    SelectionSpec,
    check_matrix,
    exact_girth,
    girth_scan,
    vandermonde,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--checks", type=int, default=102)
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()

    gf2 = FieldSpec.gf2()
    samples = [
        ("zero column", Matrix.from_rows(gf2, [[0, 1], [0, 1]])),
        ("repeated column", Matrix.from_rows(gf2, [[1, 1, 0], [0, 0, 1]])),
        ("identity 4", Matrix.from_rows(gf2, [[int(i == j) for j in range(4)] for i in range(4)])),
        ("vandermonde 4x8 / gf 11", vandermonde(FieldSpec.gfp(11), 4, list(range(1, 9)))),
    ]
    for label, m in samples:
        print(f"{label}: girth {exact_girth(m)} ({m.nrows}x{m.ncols})")

    cm = check_matrix(args.n, Fraction(1, 2), SelectionSpec.top(args.checks))
    grid = [Fraction(x, 20) for x in range(1, 11)]
    res = girth_scan(cm.matrix, grid, args.trials, args.seed)
    print(f"\nindependence probability of sampled columns, {args.checks} checks, n={args.n}:")
    for s, rate, (lo, hi) in zip(grid, res.rates(), res.intervals()):
        bar = "#" * round(40 * rate)
        print(f"  s={float(s):.2f}  {rate:6.3f}  [{lo:.3f}, {hi:.3f}]  {bar}")


if __name__ == "__main__":
    main()
