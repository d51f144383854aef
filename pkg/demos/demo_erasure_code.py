"""Erasure decoding with a polarization-selected parity check matrix.

Builds the code, erases each symbol independently, and decodes by
solving for the erased positions.  Every failure is an instance of the
erased columns being linearly dependent, so the report's failure count
and dependence count always agree.
"""

import argparse
from fractions import Fraction

from highgirth import (
    SelectionSpec,
    check_matrix,
    code_from_pcm,
    mec_error_rate,
    render_report,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--rate", default="2/5", help="code rate k/n")
    ap.add_argument("--p", default="11/20", help="erasure probability")
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    rate = Fraction(args.rate)
    nchecks = args.n - int(args.n * rate)
    cm = check_matrix(args.n, rate, SelectionSpec.top(nchecks))
    code = code_from_pcm(cm.matrix)
    print(f"code: n={code.n} k={code.k} checks={cm.matrix.nrows}")

    rep = mec_error_rate(code, args.p, args.trials, args.seed, threads=args.threads)
    print(render_report(rep), end="")
    print(f"\nfailures {rep['failures']} == dependence events {rep['dependence_events']}")


if __name__ == "__main__":
    main()
