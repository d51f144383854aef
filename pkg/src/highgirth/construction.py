"""Sierpinski transform and the check matrices carved out of it.

The n x n Sierpinski matrix (n a power of two) has a 1 at (i, j), both
0-based, exactly when the binary support of i is contained in that of j.
Its entries are 0/1, so it is a matrix over any field; it is unit upper
triangular (full rank everywhere), its own inverse over GF(2), and
applying it to a vector costs n log n field operations via a butterfly.

A check matrix keeps the rows whose profile value survives a selection
rule.  Because the full transform is invertible, any row subset is
linearly independent, so the result always has full row rank; what the
profile buys is independence of sampled column subsets, which is what
the scan, the sampled full-rank estimate, and the exhaustive oracle
below measure.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._gf2core import rank_packed
from .fields import (
    GF2,
    GFP,
    BitBasis,
    ColumnSet,
    EnumerationBudget,
    FieldSpec,
    Matrix,
    VectorBasis,
    _pack_rows_u8,
    independence_tracker,
    parse_probability,
    rank,
    read_matrix,
    write_matrix,
)
from .montecarlo import (
    RNG_ID,
    SubStream,
    TrialReport,
    run_trials,
    threshold_u64,
)
from .polarize import (
    SelectionSpec,
    select_rows,
    select_rows_fast,
)

__all__ = [
    "sierpinski",
    "sierpinski_row",
    "sierpinski_transform",
    "CheckMatrix",
    "check_matrix",
    "expected_rank_oracle",
    "exhaustive_rank_profile",
    "independence_probability",
    "full_rank_probability",
    "EnumerationBudget",
    "GirthScanResult",
    "girth_scan",
    "write_scan_csv",
    "write_check_matrix",
    "read_check_matrix",
    "DENSE_TRANSFORM_CAP",
    "DENSE_FIELD_CAP",
    "EXACT_SELECTION_CAP",
    "RANK_VERIFY_CAP",
]

DENSE_TRANSFORM_CAP = 1 << 12
DENSE_FIELD_CAP = 1 << 10  # dense gfp/rational entries are much heavier
EXACT_SELECTION_CAP = 1 << 8
RANK_VERIFY_CAP = 1 << 10


def _require_pow2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"n must be a power of two, got {n}")
    return n.bit_length() - 1


def sierpinski_row(n: int, i: int) -> np.ndarray:
    """0-based row i as a uint8 vector, without building the matrix."""
    _require_pow2(n)
    if not 0 <= i < n:
        raise IndexError("row index out of range")
    j = np.arange(n)
    return ((i & ~j) == 0).astype(np.uint8)


def sierpinski(n: int, field: FieldSpec = FieldSpec.gf2()) -> Matrix:
    """Dense n x n transform matrix; 0/1 entries over the given field.

    Capped to keep memory sane; the caps differ because a packed gf2 row
    costs n/8 bytes while gfp and rational entries cost full words.
    """
    _require_pow2(n)
    cap = DENSE_TRANSFORM_CAP if field.kind == GF2 else DENSE_FIELD_CAP
    if n > cap:
        raise ValueError(
            f"dense transform over {field} capped at n={cap}; "
            "use sierpinski_row or sierpinski_transform"
        )
    i = np.arange(n).reshape(-1, 1)
    j = np.arange(n).reshape(1, -1)
    dense = (i & ~j) == 0
    if field.kind == GF2:
        return Matrix.from_packed_gf2(_pack_rows_u8(dense.astype(np.uint8)), n)
    if field.kind == GFP:
        return Matrix._new(field, n, n, dense.astype(np.int64))
    return Matrix.from_rows(field, dense.astype(np.int64).tolist())


def sierpinski_transform(field: FieldSpec, x, inverse: bool = False):
    """Apply the transform (or its inverse) to a length-n vector.

    Butterfly passes over halves: forward goes coarse to fine adding the
    bottom half into the top; the inverse runs fine to coarse
    subtracting.  Over GF(2) the two agree and the map is an involution.
    """
    from .fields import vector as _vector

    v = _vector(field, x)
    n = len(v)
    _require_pow2(n)
    sizes = [1 << k for k in range(_require_pow2(n), 0, -1)]
    if inverse:
        sizes.reverse()
    if field.kind == GF2:
        v = np.asarray(v, np.uint8).copy()
        for sz in sizes:
            h = sz >> 1
            for lo in range(0, n, sz):
                v[lo : lo + h] ^= v[lo + h : lo + sz]
        return v
    if field.kind == GFP:
        v = np.asarray(v, np.int64).copy()
        p = field.p
        for sz in sizes:
            h = sz >> 1
            for lo in range(0, n, sz):
                if inverse:
                    v[lo : lo + h] = (v[lo : lo + h] - v[lo + h : lo + sz]) % p
                else:
                    v[lo : lo + h] = (v[lo : lo + h] + v[lo + h : lo + sz]) % p
        return v
    v = list(v)
    for sz in sizes:
        h = sz >> 1
        for lo in range(0, n, sz):
            for t in range(lo, lo + h):
                v[t] = v[t] - v[t + h] if inverse else v[t] + v[t + h]
    return v


# ---------------------------------------------------------------------------
# check matrices


@dataclass(frozen=True, eq=False)
class CheckMatrix:
    """Selected transform rows packaged as a parity-check matrix.

    Entries are 0/1 whatever the field; the rows are fragments of a unit
    upper-triangular matrix, so rank equals len(rows) over every field.
    """

    n: int
    s: Fraction
    selection: SelectionSpec
    rows: ColumnSet  # 1-based indices into the full transform
    matrix: Matrix  # len(rows) x n

    @property
    def field(self) -> FieldSpec:
        return self.matrix.field

    @property
    def nchecks(self) -> int:
        return len(self.rows)

    @property
    def code_dimension(self) -> int:
        return self.n - len(self.rows)


def _rows_matrix(n: int, picked: ColumnSet, field: FieldSpec) -> Matrix:
    if field.kind == GF2:
        from .fields import _nwords

        # pack in slabs so a large n never materializes the full dense block
        packed = np.empty((len(picked), _nwords(n)), np.uint64)
        idx = list(picked)
        for lo in range(0, len(idx), 1024):
            chunk = idx[lo : lo + 1024]
            dense = np.zeros((len(chunk), n), np.uint8)
            for t, row_i in enumerate(chunk):
                dense[t] = sierpinski_row(n, row_i - 1)
            packed[lo : lo + len(chunk)] = _pack_rows_u8(dense)
        return Matrix.from_packed_gf2(packed, n)
    if n > DENSE_FIELD_CAP:
        raise ValueError(f"dense {field} check matrix capped at n={DENSE_FIELD_CAP}")
    dense = np.zeros((len(picked), n), np.int64)
    for t, row_i in enumerate(picked):
        dense[t] = sierpinski_row(n, row_i - 1)
    if field.kind == GFP:
        return Matrix._new(field, len(picked), n, dense)
    return Matrix.from_rows(field, dense.tolist())


def check_matrix(
    n: int,
    s,
    selection: SelectionSpec,
    field: FieldSpec = FieldSpec.gf2(),
    verify: bool | None = None,
) -> CheckMatrix:
    """Build the check matrix for sampling rate s under a selection rule.

    Exact selection up to n=256; beyond that the guarded float path is
    used (it recomputes boundary leaves exactly, so the choice of path
    never changes the answer).  ``verify`` forces or skips the full-rank
    recheck; by default it runs for n up to 1024 over gf2, 256 elsewhere.
    """
    sf = parse_probability(s, "s")
    if n <= EXACT_SELECTION_CAP:
        picked = select_rows(n, sf, selection)
    else:
        picked = select_rows_fast(n, sf, selection)
    m = _rows_matrix(n, picked, field)
    if verify is None:
        verify = n <= (RANK_VERIFY_CAP if field.kind == GF2 else EXACT_SELECTION_CAP)
    if verify and rank(m) != len(picked):
        raise AssertionError("selected rows lost rank; construction is broken")
    return CheckMatrix(n, sf, selection.resolve(n), picked, m)


# ---------------------------------------------------------------------------
# exhaustive oracles (small n): expected rank by brute force over subsets


def _subset_increments(n: int, s: Fraction, field: FieldSpec) -> tuple[Fraction, ...]:
    # sum over all 2**n column subsets S of weight(S) * [row i independent
    # of rows 1..i-1 once both are restricted to S]
    rows_bits = [sierpinski_row(n, i) for i in range(n)]
    rows_int = [
        int.from_bytes(np.packbits(b, bitorder="little").tobytes(), "little")
        for b in rows_bits
    ]
    totals = [Fraction(0)] * n
    for mask in range(1 << n):
        k = mask.bit_count()
        weight = s**k * (1 - s) ** (n - k)
        if weight == 0:
            continue
        if field.kind == GF2:
            basis = BitBasis()
            for i in range(n):
                if basis.insert(rows_int[i] & mask):
                    totals[i] += weight
        else:
            cols = [j for j in range(n) if (mask >> j) & 1]
            basis = VectorBasis(field)
            for i in range(n):
                if basis.insert([int(rows_bits[i][j]) for j in cols]):
                    totals[i] += weight
    return tuple(totals)


def exhaustive_rank_profile(
    n: int, s, field: FieldSpec = FieldSpec.gf2(), max_n: int = 1 << 12
) -> tuple[Fraction, ...]:
    """Profile by brute force over all 2**n column subsets.

    For each subset S of columns, insert the transform rows restricted
    to S top to bottom into an incremental basis; row i contributes
    P(S) to leaf i when it lands outside the span of rows 1..i-1.
    Matches rank_profile exactly over every field; exponential, so n is
    capped hard.
    """
    _require_pow2(n)
    if n > 12 or (1 << n) > max_n:
        raise EnumerationBudget(f"2**{n} subsets exceed the enumeration budget")
    sf = parse_probability(s, "s")
    return _subset_increments(n, sf, field)


def expected_rank_oracle(n: int, i: int, s, field: FieldSpec = FieldSpec.gf2()) -> Fraction:
    """Exact expected rank of the first i transform rows on sampled columns.

    Averages rank(rows 1..i restricted to S) over all 2**n Bernoulli(s)
    column subsets S, so it knows nothing about the branch recursion;
    consecutive differences in i are the independent check of the
    profile values.
    """
    _require_pow2(n)
    if n > 12:
        raise EnumerationBudget(f"2**{n} subsets exceed the enumeration budget")
    if not 0 <= i <= n:
        raise ValueError(f"row count {i} out of range for n={n}")
    if i == 0:
        return Fraction(0)
    sf = parse_probability(s, "s")
    inc = _subset_increments(n, sf, field)
    # per subset, rank of the first i rows telescopes over the insert
    # successes of rows 1..i, so the expectation is the prefix sum
    return sum(inc[:i], Fraction(0))


def independence_probability(m: Matrix, s, budget: int = 1 << 22) -> Fraction:
    """Exact P{Bernoulli(s)-sampled columns of m are linearly independent}.

    Depth-first over columns; a dependent branch is pruned because every
    superset of a dependent set is dependent.  ``budget`` caps visited
    nodes since the independent-subset count can still be exponential.
    """
    from .fields import _arith_for

    sf = parse_probability(s, "s")
    n = m.ncols
    if m.field.kind == GF2:
        cols = m._column_ints()

        def reduce_into(piv: dict, v):
            # copy-on-insert so sibling branches never see these pivots
            while v:
                h = v.bit_length() - 1
                row = piv.get(h)
                if row is None:
                    piv = dict(piv)
                    piv[h] = v
                    return piv
                v ^= row
            return None

    else:
        cols = m._column_vectors()
        ar = _arith_for(m.field)

        def reduce_into(piv: dict, vec):
            v = list(vec)
            while True:
                j = next((t for t, x in enumerate(v) if x != ar.zero), None)
                if j is None:
                    return None
                row = piv.get(j)
                if row is None:
                    inv = ar.inv(v[j])
                    if inv != ar.one:
                        v = [ar.mul(inv, x) for x in v]
                    piv = dict(piv)
                    piv[j] = v
                    return piv
                f = v[j]
                v = [ar.sub(x, ar.mul(f, w)) for x, w in zip(v, row)]

    nodes = 0

    def walk(j: int, piv: dict, weight: Fraction) -> Fraction:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise EnumerationBudget(f"enumeration exceeded {budget} nodes")
        if j == n:
            return weight
        total = walk(j + 1, piv, weight * (1 - sf))
        if sf != 0:
            grown = reduce_into(piv, cols[j])
            if grown is not None:
                total += walk(j + 1, grown, weight * sf)
        return total

    if sf == 0:
        return Fraction(1)
    return walk(0, {}, Fraction(1))


# ---------------------------------------------------------------------------
# Monte Carlo: full row rank under sampled columns


def full_rank_probability(
    cm: CheckMatrix, s, trials: int, seed: int, threads: int = 1
) -> TrialReport:
    """Empirical P{sampled columns of the check matrix span all checks}.

    Each trial draws one Bernoulli(s) column subset S and counts a
    success when rank(R[:, S]) equals the check count.  Column draws use
    one uniform per column from the trial's substream, so reports are
    identical for any thread count.
    """
    sf = parse_probability(s, "s")
    if trials < 1:
        raise ValueError("need at least one trial")
    m = cm.matrix
    nchecks = cm.nchecks
    t_full = threshold_u64(sf)
    sample_all = t_full >= 1 << 64
    thr = np.uint64(min(t_full, (1 << 64) - 1))

    if m.field.kind == GF2:
        tcols = m._t_bits()

        def one_trial(stream: SubStream) -> bool:
            u = stream.raw(m.ncols)
            idx = np.arange(m.ncols) if sample_all else np.nonzero(u < thr)[0]
            if idx.shape[0] < nchecks:
                return False
            sub = tcols[idx].copy()
            return rank_packed(sub, nchecks) == nchecks

    else:
        make_basis, cols = independence_tracker(m)

        def one_trial(stream: SubStream) -> bool:
            u = stream.raw(m.ncols)
            idx = np.arange(m.ncols) if sample_all else np.nonzero(u < thr)[0]
            if idx.shape[0] < nchecks:
                return False
            basis = make_basis()
            got = 0
            for j in idx:
                if basis.insert(cols[int(j)]):
                    got += 1
                    if got == nchecks:
                        return True
            return False

    results = run_trials(trials, one_trial, seed, threads)
    return TrialReport(trials, sum(1 for r in results if r), seed)


# ---------------------------------------------------------------------------
# sampled-column independence scan


@dataclass(frozen=True)
class GirthScanResult:
    """Empirical independence rates over a grid of sampling rates."""

    grid: tuple[Fraction, ...]
    estimates: tuple[TrialReport, ...]  # per grid point
    rng_id: str = RNG_ID

    @property
    def trials(self) -> int:
        return self.estimates[0].trials

    @property
    def seed(self) -> int:
        return self.estimates[0].seed

    def rates(self) -> tuple[float, ...]:
        return tuple(r.estimate for r in self.estimates)

    def intervals(self, z: float = 1.96) -> tuple[tuple[float, float], ...]:
        return tuple(r.interval(z) for r in self.estimates)


def girth_scan(m: Matrix, grid, trials: int, seed: int, threads: int = 1) -> GirthScanResult:
    """Sample columns at each rate in ``grid`` and test independence.

    All rates in one trial share that trial's uniform draws, so the
    per-trial indicators are coupled: a set sampled at a lower rate is a
    subset of the set at a higher rate, and the empirical success curve
    is exactly nonincreasing in s, not just in expectation.  Any field
    works; gf2 takes the bit-packed rank path.
    """
    rates = tuple(parse_probability(g, "grid rate") for g in grid)
    if not rates:
        raise ValueError("empty grid")
    if any(b < a for a, b in zip(rates, rates[1:])):
        raise ValueError("grid must be sorted ascending")
    if trials < 1:
        raise ValueError("need at least one trial")
    thresholds = [np.uint64(min(threshold_u64(r), (1 << 64) - 1)) for r in rates]
    exact_one = [threshold_u64(r) >= 1 << 64 for r in rates]
    nrows = m.nrows
    gf2 = m.field.kind == GF2
    if gf2:
        tcols = m._t_bits()
    else:
        make_basis, colvecs = independence_tracker(m)

    def one_trial(stream: SubStream) -> list[bool]:
        u = stream.raw(m.ncols)
        out = []
        prev_dependent = False
        for t, full in zip(thresholds, exact_one):
            if prev_dependent:
                # dependence is inherited by the superset at a higher rate
                out.append(False)
                continue
            idx = np.arange(m.ncols) if full else np.nonzero(u < t)[0]
            if idx.shape[0] > nrows:
                ok = False
            elif gf2:
                sub = tcols[idx].copy()
                ok = rank_packed(sub, nrows) == idx.shape[0]
            else:
                basis = make_basis()
                ok = all(basis.insert(colvecs[int(j)]) for j in idx)
            out.append(ok)
            prev_dependent = not ok
        return out

    results = run_trials(trials, one_trial, seed, threads)
    reports = tuple(
        TrialReport(trials, sum(1 for r in results if r[g]), seed)
        for g in range(len(rates))
    )
    return GirthScanResult(rates, reports)


def write_scan_csv(res: GirthScanResult, target) -> None:
    lines = [
        f"# trials: {res.trials}",
        f"# seed: {res.seed}",
        f"# rng: {res.rng_id}",
        "s,p_hat,ci_lo,ci_hi,trials",
    ]
    for r, rep in zip(res.grid, res.estimates):
        lo, hi = rep.interval()
        lines.append(f"{r},{rep.estimate:.17g},{lo:.17g},{hi:.17g},{rep.trials}")
    text = "\n".join(lines) + "\n"
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", encoding="ascii") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# on-disk form: matrix text plus a json sidecar with the construction recipe


def write_check_matrix(cm: CheckMatrix, path: str) -> None:
    write_matrix(cm.matrix, path)
    meta = {
        "n": cm.n,
        "s": str(cm.s),
        "selection": cm.selection.to_json(),
        "H": list(cm.rows.indices),
    }
    with open(path + ".json", "w", encoding="ascii") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def read_check_matrix(path: str) -> CheckMatrix:
    m = read_matrix(path)
    with open(path + ".json", "r", encoding="ascii") as fh:
        meta = json.load(fh)
    rows = ColumnSet.of(meta["H"])
    if len(rows) != m.nrows:
        raise ValueError("sidecar row list does not match matrix shape")
    return CheckMatrix(
        int(meta["n"]),
        parse_probability(meta["s"], "s"),
        SelectionSpec.from_json(meta["selection"]),
        rows,
        m,
    )
