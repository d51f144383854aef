"""Exact linear algebra: ranks, kernels, girth, and the three backends."""

import io
import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from highgirth import (
    ColumnSet,
    FieldSpec,
    Matrix,
    as_fraction,
    columns_independent,
    exact_girth,
    first_dependent_subset,
    kernel,
    matmul,
    matvec,
    parse_probability,
    rank,
    read_matrix,
    select_columns,
    solve,
    solve_full,
    vandermonde,
    write_matrix,
)
from highgirth import _gf2core as core
from highgirth.fields import (
    BitBasis,
    VectorBasis,
    independence_tracker,
    vector,
    vectors_equal,
    zero_vector,
)

GF2 = FieldSpec.gf2()
GF3 = FieldSpec.gfp(3)
GF5 = FieldSpec.gfp(5)
RAT = FieldSpec.rational()
ALL_FIELDS = (GF2, GF3, GF5, RAT)


def random_rows(rng, nrows, ncols, field):
    if field.kind == "gf2":
        return [[rng.randrange(2) for _ in range(ncols)] for _ in range(nrows)]
    if field.kind == "gfp":
        return [[rng.randrange(field.p) for _ in range(ncols)] for _ in range(nrows)]
    return [
        [Fraction(rng.randrange(-3, 4), rng.randrange(1, 4)) for _ in range(ncols)]
        for _ in range(nrows)
    ]


def brute_girth(m):
    """Smallest dependent column subset by direct enumeration."""
    for size in range(1, m.ncols + 1):
        for cols in itertools.combinations(range(1, m.ncols + 1), size):
            if not columns_independent(m, ColumnSet.of(cols)):
                return size
    return m.ncols + 1


# ---------------------------------------------------------------- FieldSpec

def test_fieldspec_parse_and_name():
    assert FieldSpec.parse("gf2") == GF2
    assert FieldSpec.parse("gfp:7").p == 7
    assert FieldSpec.parse("rational") == RAT
    assert GF3.name() == "gfp:3"
    assert GF2.name() == "gf2"
    assert RAT.name() == "rational"
    assert GF2.order == 2 and GF5.order == 5 and RAT.order is None


def test_fieldspec_rejects_bad_input():
    with pytest.raises(ValueError):
        FieldSpec.parse("gfp:4")
    with pytest.raises(ValueError):
        FieldSpec.parse("gfp:1")
    with pytest.raises(ValueError):
        FieldSpec.parse("gf3")
    with pytest.raises(ValueError):
        FieldSpec.gfp(2 ** 31)


def test_as_fraction_rejects_floats():
    assert as_fraction("2/3") == Fraction(2, 3)
    assert as_fraction(1) == 1
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(ValueError):
        parse_probability("3/2")
    with pytest.raises(ValueError):
        parse_probability("-1/2")


# ---------------------------------------------------------------- ColumnSet

def test_columnset_basics():
    cs = ColumnSet.of([3, 1, 2])
    assert cs.indices == (1, 2, 3)
    assert list(cs.zero_based()) == [0, 1, 2]
    assert len(ColumnSet.empty()) == 0
    assert ColumnSet.full(4).indices == (1, 2, 3, 4)
    assert ColumnSet.of([1, 3]).complement(4).indices == (2, 4)
    assert ColumnSet.of([1, 1]).indices == (1,)  # set semantics
    with pytest.raises(ValueError):
        ColumnSet.of([0, 1])
    with pytest.raises(ValueError):
        ColumnSet((2, 1))  # raw constructor wants sorted distinct indices


# ---------------------------------------------------------------- rank / kernel

def test_rank_known_values():
    assert rank(Matrix.from_rows(GF2, [[1, 0], [0, 1]])) == 2
    assert rank(Matrix.from_rows(GF2, [[1, 1], [1, 1]])) == 1
    # 0/1 matrix singular mod 2 but invertible over the rationals
    m = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    assert rank(Matrix.from_rows(GF2, m)) == 2
    assert rank(Matrix.from_rows(RAT, m)) == 3
    assert rank(Matrix.from_rows(GF3, [[1, 2], [2, 4]])) == 1
    assert rank(Matrix.zeros(GF5, 3, 4)) == 0
    assert rank(Matrix.identity(RAT, 5)) == 5


def test_rank_subset_monotone():
    rng = random.Random(101)
    for field in ALL_FIELDS:
        for _ in range(25):
            nrows = rng.randrange(1, 7)
            ncols = rng.randrange(1, 9)
            m = Matrix.from_rows(field, random_rows(rng, nrows, ncols, field))
            full = rank(m)
            assert full <= min(nrows, ncols)
            size = rng.randrange(0, ncols + 1)
            cols = ColumnSet.of(rng.sample(range(1, ncols + 1), size))
            sub = rank(select_columns(m, cols)) if size else 0
            assert sub <= size
            assert sub <= full + (ncols - size)
            assert full <= sub + (ncols - size)


def test_gf2_rank_never_exceeds_rational_rank():
    # an odd determinant survives the passage to the rationals
    rng = random.Random(7)
    for _ in range(40):
        nrows = rng.randrange(1, 11)
        ncols = rng.randrange(1, 13)
        rows = [[rng.randrange(2) for _ in range(ncols)] for _ in range(nrows)]
        r2 = rank(Matrix.from_rows(GF2, rows))
        rq = rank(Matrix.from_rows(RAT, rows))
        assert r2 <= rq


def test_kernel_properties():
    rng = random.Random(202)
    for field in ALL_FIELDS:
        for _ in range(15):
            nrows = rng.randrange(1, 6)
            ncols = rng.randrange(1, 8)
            m = Matrix.from_rows(field, random_rows(rng, nrows, ncols, field))
            kb = kernel(m)
            assert len(kb.vectors) + rank(m) == ncols
            z = zero_vector(field, nrows)
            for v in kb.vectors:
                assert vectors_equal(matvec(m, v), z)


def test_kernel_vectors_independent():
    m = Matrix.from_rows(GF2, [[1, 1, 1, 1]])
    kb = kernel(m)
    assert len(kb.vectors) == 3
    basis = Matrix.from_rows(GF2, [list(map(int, v)) for v in kb.vectors])
    assert rank(basis) == 3


# ---------------------------------------------------------------- solving

def test_solve_roundtrip():
    rng = random.Random(303)
    for field in ALL_FIELDS:
        for _ in range(20):
            nrows = rng.randrange(1, 6)
            ncols = rng.randrange(1, 6)
            m = Matrix.from_rows(field, random_rows(rng, nrows, ncols, field))
            x = vector(field, random_rows(rng, 1, ncols, field)[0])
            y = matvec(m, x)
            rk, consistent, sol = solve_full(m, y)
            assert consistent
            assert rk == rank(m)
            assert vectors_equal(matvec(m, sol), y)


def test_solve_detects_inconsistency():
    m = Matrix.from_rows(RAT, [[1, 0], [1, 0]])
    y = vector(RAT, [1, 2])
    rk, consistent, sol = solve_full(m, y)
    assert rk == 1 and not consistent and sol is None
    assert solve(m, y) is None


# ---------------------------------------------------------------- girth

def test_girth_frozen_small():
    # columns 1,3 and 2,3 are each independent, all three sum to zero mod 2
    m = Matrix.from_rows(GF2, [[1, 0, 1], [0, 1, 1]])
    assert exact_girth(m) == 3
    # fully independent columns report ncols + 1
    assert exact_girth(Matrix.identity(GF2, 4)) == 5
    assert exact_girth(Matrix.from_rows(GF2, [[1, 0], [0, 0]])) == 1  # zero column


def test_girth_matches_brute_force():
    rng = random.Random(404)
    for field in (GF2, GF3, RAT):
        for _ in range(12):
            nrows = rng.randrange(1, 5)
            ncols = rng.randrange(1, 7)
            m = Matrix.from_rows(field, random_rows(rng, nrows, ncols, field))
            assert exact_girth(m) == brute_girth(m)


def test_girth_never_exceeds_rank_plus_one():
    rng = random.Random(505)
    for _ in range(30):
        nrows = rng.randrange(1, 6)
        ncols = rng.randrange(2, 9)
        m = Matrix.from_rows(GF2, random_rows(rng, nrows, ncols, GF2))
        g = exact_girth(m)
        if g is not None:
            assert g <= rank(m) + 1


def test_first_dependent_subset():
    m = Matrix.from_rows(GF2, [[1, 0, 1], [0, 1, 1]])
    res = first_dependent_subset(m, 3)
    assert res.status == "found"
    assert not columns_independent(m, res.witness)
    assert len(res.witness) == 3
    res2 = first_dependent_subset(m, 2)
    assert res2.status == "independent" and res2.witness is None
    res3 = first_dependent_subset(m, 3, budget=2)
    assert res3.status == "budget"


def test_vandermonde_girth():
    # distinct evaluation points make every square minor nonzero
    v11 = vandermonde(GF5, 3, [1, 2, 3, 4])
    assert exact_girth(v11) == 4
    vr = vandermonde(RAT, 4, [1, 2, 3, 4, 5, 6, 7, 8])
    assert exact_girth(vr) == 5
    with pytest.raises(ValueError):
        vandermonde(GF3, 2, [1, 1, 2])  # repeated node


# ---------------------------------------------------------------- matmul

def test_matmul_identity_and_associativity():
    rng = random.Random(606)
    for field in ALL_FIELDS:
        a = Matrix.from_rows(field, random_rows(rng, 3, 4, field))
        b = Matrix.from_rows(field, random_rows(rng, 4, 2, field))
        ab = matmul(a, b)
        assert (ab.nrows, ab.ncols) == (3, 2)
        left = matmul(Matrix.identity(field, 3), a)
        assert left.to_rows() == a.to_rows()
        x = vector(field, random_rows(rng, 1, 2, field)[0])
        assert vectors_equal(matvec(ab, x), matvec(a, matvec(b, x)))


# ---------------------------------------------------------------- bases

def test_bit_basis_matches_matrix_rank():
    rng = random.Random(707)
    for _ in range(20):
        nrows = rng.randrange(1, 9)
        cols = [rng.getrandbits(nrows) for _ in range(10)]
        bb = BitBasis()
        inserted = sum(1 for c in cols if bb.insert(c))
        rows = [[(c >> i) & 1 for c in cols] for i in range(nrows)]
        assert inserted == len(bb) == rank(Matrix.from_rows(GF2, rows))


def test_vector_basis_matches_matrix_rank():
    rng = random.Random(717)
    for field in (GF3, GF5, RAT):
        for _ in range(10):
            nrows = rng.randrange(1, 6)
            colvecs = random_rows(rng, 6, nrows, field)  # one row per column
            vb = VectorBasis(field)
            inserted = sum(1 for c in colvecs if vb.insert(list(c)))
            rows = [[colvecs[j][i] for j in range(6)] for i in range(nrows)]
            assert inserted == len(vb) == rank(Matrix.from_rows(field, rows))


def test_independence_tracker_matches_rank():
    rng = random.Random(808)
    for field in ALL_FIELDS:
        nrows, ncols = 5, 8
        rows = random_rows(rng, nrows, ncols, field)
        m = Matrix.from_rows(field, rows)
        factory, cols = independence_tracker(m)
        tracker = factory()
        got = sum(1 for j in range(ncols) if tracker.insert(cols[j]))
        assert got == rank(m)


# ---------------------------------------------------------------- io

def test_matrix_io_roundtrip(tmp_path):
    rng = random.Random(909)
    for field in ALL_FIELDS:
        m = Matrix.from_rows(field, random_rows(rng, 4, 6, field))
        path = tmp_path / f"m_{field.name().replace(':', '_')}.txt"
        write_matrix(m, str(path))
        back = read_matrix(str(path))
        assert back.field == field
        assert back.to_rows() == m.to_rows()


def test_matrix_io_stream():
    m = Matrix.from_rows(GF3, [[0, 1, 2], [2, 1, 0]])
    buf = io.StringIO()
    write_matrix(m, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "2 3 gfp:3"
    back = read_matrix(io.StringIO(text))
    assert back.to_rows() == m.to_rows()


# ---------------------------------------------------------------- backends

def pack_bits(rng, nrows, ncols):
    nwords = (ncols + 63) // 64
    bits = np.zeros((nrows, nwords), np.uint64)
    for i in range(nrows):
        for j in range(ncols):
            if rng.randrange(2):
                bits[i, j >> 6] |= np.uint64(1 << (j & 63))
    return bits


def test_gf2_echelon_backends_match():
    rng = random.Random(111)
    for reduce_above in (False, True):
        for _ in range(25):
            nrows = rng.randrange(1, 9)
            ncols = rng.randrange(1, 70)
            bits = pack_bits(rng, nrows, ncols)
            a, b = bits.copy(), bits.copy()
            piv_a = core._echelon_scalar(a, ncols, ncols, reduce_above)
            piv_b = core._echelon_numpy(b, ncols, ncols, reduce_above)
            assert np.array_equal(piv_a, piv_b)
            assert np.array_equal(a, b)
            assert core.rank_packed(bits.copy(), ncols) == piv_a.shape[0]


def test_gf2_solve_backends_match():
    rng = random.Random(121)
    for _ in range(25):
        nrows = rng.randrange(1, 9)
        ncols = rng.randrange(1, 66)
        # one extra logical column carries the right-hand side
        aug = pack_bits(rng, nrows, ncols + 1)
        ra, ca, xa = core.solve_packed(aug.copy(), ncols)
        rb, cb, xb = core.solve_packed_numpy(aug.copy(), ncols)
        assert (ra, ca) == (rb, cb)
        assert np.array_equal(xa, xb)
