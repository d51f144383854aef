"""Compare a measured block error rate with its certified upper bounds.

Picks the parity fraction from the crossover probability's pairwise
error coefficient, simulates maximum likelihood decoding on the
symmetric channel, and prints the union and product-form bounds next to
the estimate.  Small lengths only: the decoder enumerates codewords.
"""

import argparse
from fractions import Fraction

from highgirth import (
    SelectionSpec,
    bhattacharyya_upper,
    bsc_error_rate,
    channel_bounds,
    check_matrix,
    code_from_pcm,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--p", default="1/20", help="crossover probability")
    ap.add_argument("--checks", type=int, default=12)
    ap.add_argument("--trials", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    p = Fraction(args.p)
    s = bhattacharyya_upper(p)
    print(f"p = {p}, parity fraction z(p) <= {s} ~ {float(s):.6f}")

    cm = check_matrix(args.n, s, SelectionSpec.top(args.checks))
    code = code_from_pcm(cm.matrix)
    print(f"code: n={code.n} k={code.k}")

    bounds = channel_bounds(code, "bsc", p, rows=cm.rows)
    rep = bsc_error_rate(code, p, args.trials, args.seed, threads=args.threads)

    print(f"measured p_hat   {rep['p_hat']:.6f}  ci [{rep['ci_lo']:.6f}, {rep['ci_hi']:.6f}]")
    print(f"union bound      {bounds['union_float']:.6f}")
    print(f"product bound    {bounds['bhatt_float']:.6f}")
    ok = rep["p_hat"] <= bounds["union_float"] and rep["p_hat"] <= bounds["bhatt_float"]
    print("estimate below both bounds" if ok else "estimate above a bound (check trial count)")


if __name__ == "__main__":
    main()
