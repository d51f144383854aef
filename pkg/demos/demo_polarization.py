"""Watch conditional rank increments split toward 0 and 1.

Doubling the length refines every branch into a low and a high child;
the mass in the middle band thins out while the total stays n*s.
"""

import argparse
from fractions import Fraction

from highgirth import (
    SelectionSpec,
    polarization_fractions,
    rank_profile,
    rank_profile_float,
    select_rows,
    select_rows_fast,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", default="1/2", help="design rate as a fraction")
    ap.add_argument("--delta", default="1/100", help="band half-width")
    ap.add_argument("--max-exp", type=int, default=12, help="largest n is 2**this")
    args = ap.parse_args()

    s = Fraction(args.s)
    delta = Fraction(args.delta)

    print(f"rate s = {s}, band delta = {delta}")
    print(f"{'n':>6} {'low':>8} {'mid':>8} {'high':>8} {'selected':>9}")
    for exp in range(1, args.max_exp + 1):
        n = 1 << exp
        if n <= 256:
            values = rank_profile(n, s)
        else:
            values = rank_profile_float(n, s)
        low, mid, high = polarization_fractions(values, delta)
        pick = select_rows if n <= 256 else select_rows_fast
        chosen = len(pick(n, s, SelectionSpec.auto()))
        print(f"{n:>6} {float(low):>8.4f} {float(mid):>8.4f} {float(high):>8.4f} {chosen:>9}")

    n = 4
    print(f"\nexact profile at n={n}, s={s}:")
    for i, rho in enumerate(rank_profile(n, s), start=1):
        print(f"  branch {i}: {rho}")
    print(f"  sum = {sum(rank_profile(n, s))} (equals n*s = {n * s})")


if __name__ == "__main__":
    main()
