"""Plant a sparse signal, measure it, and recover it by exhaustive search.

A girth certificate on the measurement matrix guarantees that every
signal with at most k nonzeros is the unique sparsest explanation of
its measurement.
"""

import argparse
from fractions import Fraction

from highgirth import (
    FieldSpec,
    SubStream,
    UniformSupport,
    draw_signal,
    l0_recover,
    measure,
    spark_certificate,
    vandermonde,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=4)
    ap.add_argument("--cols", type=int, default=8)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()

    field = FieldSpec.rational()
    a = vandermonde(field, args.rows, list(range(1, args.cols + 1)))
    print(f"measurement matrix: {a.nrows} x {a.ncols} over {field.name()}")

    cert = spark_certificate(a, args.k)
    print(f"spark certificate for k={args.k}: {cert.status}")
    if cert.status != "certified":
        print("matrix too weak for this k, recovery may be ambiguous")

    stream = SubStream(args.seed, 0)
    signal = draw_signal(field, a.ncols, UniformSupport(args.k), stream)
    y = measure(a, signal)
    print(f"planted support {list(signal.support.indices)} values {list(signal.values)}")
    print(f"measurement y = {[str(v) for v in y]}")

    res = l0_recover(a, y, args.k)
    print(f"recovery status: {res.status}")
    if res.status == "unique":
        same = res.signal.support == signal.support and tuple(res.signal.values) == tuple(
            signal.values
        )
        print("recovered the planted signal" if same else "recovered a different signal!")


if __name__ == "__main__":
    main()
