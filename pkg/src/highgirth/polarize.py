"""Rank-profile recursion, row selection, and the matching reliability sums.

One recursion drives everything here.  A scalar x in [0, 1] splits into
ell(x) = 2x - x**2 and rr(x) = x**2; after log2(n) doubling levels a
start value s becomes a length-n profile.  Read as per-row independence
probabilities of the Sierpinski transform under Bernoulli(s) column
sampling, the profile says which rows to keep for a check matrix; read
as Bhattacharyya parameters, the same leaf values sum to an erasure
decoding failure bound.  The profile is a martingale: the exact leaf
values always sum to n * s.

Exact leaves are polynomials of degree up to n in s, so their bit size
doubles per level.  The float path tracks them to within 2**(levels-52),
and the selection routines use a guard band plus exact recomputation of
the few ambiguous leaves, so fast selection agrees with exact selection.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fields import ColumnSet, as_fraction, parse_probability

__all__ = [
    "ell",
    "rr",
    "rank_profile",
    "rank_profile_float",
    "profile_leaf",
    "RankProfile",
    "compute_profile",
    "default_threshold_exponent",
    "default_threshold",
    "SelectionSpec",
    "select_rows",
    "select_rows_fast",
    "polarization_fractions",
    "bhattacharyya_profile",
    "bhattacharyya_profile_float",
    "bhattacharyya_sum",
    "write_profile_csv",
    "read_profile_csv",
]


def _check_unit(x, name: str):
    if not 0 <= x <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


def ell(x: Fraction) -> Fraction:
    """Upper branch 2x - x**2 = 1 - (1-x)**2; increases toward 1."""
    _check_unit(x, "x")
    return 2 * x - x * x


def rr(x: Fraction) -> Fraction:
    """Lower branch x**2; decreases toward 0."""
    _check_unit(x, "x")
    return x * x


def _levels(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"n must be a power of two, got {n}")
    return n.bit_length() - 1


def rank_profile(n: int, s) -> tuple[Fraction, ...]:
    """Exact length-n profile of s under the branch recursion.

    Leaf order: the binary expansion of the 0-based index, most
    significant bit first, spells the branch path (0 = ell, 1 = rr).
    """
    levels = _levels(n)
    s = parse_probability(s, "s")
    vals = [s]
    for _ in range(levels):
        nxt = []
        for v in vals:
            nxt.append(2 * v - v * v)
            nxt.append(v * v)
        vals = nxt
    return tuple(vals)


def rank_profile_float(n: int, s) -> np.ndarray:
    """Float64 profile; absolute leaf error below 2**(log2(n) - 52)."""
    levels = _levels(n)
    if isinstance(s, float):
        s0 = s
        _check_unit(s0, "s")
    else:
        s0 = float(parse_probability(s, "s"))
    v = np.array([s0])
    for _ in range(levels):
        nxt = np.empty(2 * v.shape[0])
        nxt[0::2] = v * (2.0 - v)
        nxt[1::2] = v * v
        v = nxt
    return v


def profile_leaf(n: int, i: int, s) -> Fraction:
    """Exact profile value at 1-based leaf i, without the other leaves."""
    levels = _levels(n)
    if not 1 <= i <= n:
        raise ValueError(f"leaf index {i} out of range for n={n}")
    x = parse_probability(s, "s")
    j = i - 1
    for b in range(levels - 1, -1, -1):
        if (j >> b) & 1:
            x = x * x
        else:
            x = 2 * x - x * x
    return x


@dataclass(frozen=True)
class RankProfile:
    """A computed profile: exact Fraction leaves or float64 leaves."""

    n: int
    s: Fraction
    values: tuple
    exact: bool

    def leaf(self, i: int):
        """1-based leaf access."""
        if not 1 <= i <= self.n:
            raise IndexError(f"leaf index {i} out of range")
        return self.values[i - 1]

    def total(self):
        return sum(self.values)


def compute_profile(n: int, s, exact: bool = True) -> RankProfile:
    sf = parse_probability(s, "s")
    if exact:
        return RankProfile(n, sf, rank_profile(n, sf), True)
    return RankProfile(n, sf, tuple(float(v) for v in rank_profile_float(n, sf)), False)


# ---------------------------------------------------------------------------
# default threshold: 1 - 2**-ceil(n**0.49)


def default_threshold_exponent(n: int) -> int:
    """ceil(n ** (49/100)), computed exactly in integers."""
    _levels(n)  # validates power of two
    target = n**49
    e = max(1, int(n**0.49))
    while e**100 < target:
        e += 1
    while e > 1 and (e - 1) ** 100 >= target:
        e -= 1
    return e


def default_threshold(n: int) -> Fraction:
    """Keep a row when its profile value exceeds 1 - 2**-ceil(n**0.49)."""
    return 1 - Fraction(1, 1 << default_threshold_exponent(n))


# ---------------------------------------------------------------------------
# row selection


@dataclass(frozen=True)
class SelectionSpec:
    """How to pick rows from a profile.

    mode "auto": threshold rule with the default threshold for n.
    mode "threshold": keep rows with value strictly above the threshold.
    mode "top": keep the count largest rows (ties to the smaller index).
    """

    mode: str
    threshold: Fraction | None = None
    count: int | None = None

    def __post_init__(self):
        if self.mode == "auto":
            if self.threshold is not None or self.count is not None:
                raise ValueError("auto mode takes no parameters")
        elif self.mode == "threshold":
            if self.count is not None:
                raise ValueError("threshold mode takes no count")
            t = parse_probability(self.threshold, "threshold")
            object.__setattr__(self, "threshold", t)
        elif self.mode == "top":
            if self.threshold is not None:
                raise ValueError("top mode takes no threshold")
            if not isinstance(self.count, int) or self.count < 0:
                raise ValueError("top mode needs a count >= 0")
        else:
            raise ValueError(f"unknown selection mode {self.mode!r}")

    @classmethod
    def auto(cls) -> "SelectionSpec":
        return cls("auto")

    @classmethod
    def at_threshold(cls, threshold) -> "SelectionSpec":
        return cls("threshold", threshold=as_fraction(threshold, "threshold"))

    @classmethod
    def top(cls, count: int) -> "SelectionSpec":
        if count < 1:
            raise ValueError("top selection needs a positive count")
        return cls("top", count=count)

    @classmethod
    def parse(cls, text: str) -> "SelectionSpec":
        """Accepts "auto", "paper" (alias of auto), "top:<m>", "thr:<t>"."""
        text = text.strip()
        if text in ("auto", "paper"):
            return cls.auto()
        if text.startswith("top:"):
            try:
                m = int(text[4:])
            except ValueError as exc:
                raise ValueError(f"bad selection {text!r}") from exc
            return cls.top(m)
        if text.startswith("thr:"):
            return cls.at_threshold(as_fraction(text[4:], "threshold"))
        raise ValueError(
            f"bad selection {text!r} (want auto, paper, top:<m>, or thr:<t>)"
        )

    def name(self) -> str:
        if self.mode == "auto":
            return "auto"
        if self.mode == "top":
            return f"top:{self.count}"
        return f"thr:{self.threshold}"

    def resolve(self, n: int) -> "SelectionSpec":
        """Replace auto with its concrete threshold for this n."""
        if self.mode == "auto":
            return SelectionSpec("threshold", threshold=default_threshold(n))
        return self

    def to_json(self) -> dict:
        d = {"mode": self.mode}
        if self.threshold is not None:
            d["threshold"] = str(self.threshold)
        if self.count is not None:
            d["count"] = self.count
        return d

    @classmethod
    def from_json(cls, d: dict) -> "SelectionSpec":
        mode = d.get("mode")
        if mode == "auto":
            return cls.auto()
        if mode == "threshold":
            return cls.at_threshold(as_fraction(d["threshold"], "threshold"))
        if mode == "top":
            return cls.top(int(d["count"]))
        raise ValueError(f"bad selection record {json.dumps(d)}")

    def __str__(self) -> str:
        return self.name()


def select_rows(n: int, s, spec: SelectionSpec) -> ColumnSet:
    """Selected 1-based row indices, from the exact profile."""
    spec = spec.resolve(n)
    prof = rank_profile(n, s)
    if spec.mode == "threshold":
        t = spec.threshold
        return ColumnSet(tuple(j + 1 for j in range(n) if prof[j] > t))
    m = spec.count
    if m > n:
        raise ValueError(f"cannot take top {m} of {n} rows")
    order = sorted(range(n), key=lambda j: (-prof[j], j))
    return ColumnSet(tuple(sorted(j + 1 for j in order[:m])))


def _guard_band(n: int) -> float:
    # float leaf error is below 2**(levels-52); leave a 4x margin, and
    # never go narrower than the documented 2**-40 band
    return max(2.0**-40, 2.0 ** (_levels(n) - 50))


def select_rows_fast(n: int, s, spec: SelectionSpec) -> ColumnSet:
    """Same selection as select_rows, via the float profile.

    Leaves farther than a guard band from the decision boundary are
    classified by their float value; the few ambiguous leaves are
    recomputed exactly, so the result matches the exact selection.
    """
    spec = spec.resolve(n)
    sf = parse_probability(s, "s")
    prof = rank_profile_float(n, sf)
    band = _guard_band(n)
    if spec.mode == "threshold":
        t = spec.threshold
        tf = float(t)
        keep = np.nonzero(prof > tf + band)[0]
        unsure = np.nonzero(np.abs(prof - tf) <= band)[0]
        out = set(int(j) + 1 for j in keep)
        for j in unsure:
            if profile_leaf(n, int(j) + 1, sf) > t:
                out.add(int(j) + 1)
        return ColumnSet(tuple(sorted(out)))
    m = spec.count
    if m > n:
        raise ValueError(f"cannot take top {m} of {n} rows")
    if m == 0:
        return ColumnSet.empty()
    if m == n:
        return ColumnSet.full(n)
    order = np.lexsort((np.arange(n), -prof))
    cut = prof[order[m - 1]]
    sure = [int(j) for j in order[:m] if prof[j] > cut + band]
    boundary = [int(j) for j in range(n) if abs(prof[j] - cut) <= band]
    exact_vals = {j: profile_leaf(n, j + 1, sf) for j in boundary}
    boundary.sort(key=lambda j: (-exact_vals[j], j))
    pick = set(sure)
    for j in boundary:
        if len(pick) == m:
            break
        pick.add(j)
    if len(pick) != m:
        raise AssertionError("fast top selection lost rows; widen the band")
    return ColumnSet(tuple(sorted(j + 1 for j in pick)))


def polarization_fractions(values, delta) -> tuple[Fraction, Fraction, Fraction]:
    """(low, mid, high) fractions of leaves vs the cutoff delta.

    low: value < delta; high: value > 1 - delta; mid: the closed band
    between.  Accepts exact or float leaves; delta compared in kind.
    """
    d = parse_probability(delta, "delta")
    if not 0 < d < Fraction(1, 2):
        raise ValueError("delta must lie in (0, 1/2)")
    vals = list(values)
    n = len(vals)
    if n == 0:
        raise ValueError("empty profile")
    if isinstance(vals[0], float) or isinstance(vals[0], np.floating):
        lo_cut, hi_cut = float(d), 1.0 - float(d)
    else:
        lo_cut, hi_cut = d, 1 - d
    low = sum(1 for v in vals if v < lo_cut)
    high = sum(1 for v in vals if v > hi_cut)
    return Fraction(low, n), Fraction(n - low - high, n), Fraction(high, n)


# ---------------------------------------------------------------------------
# the same recursion read as Bhattacharyya parameters


def bhattacharyya_profile(n: int, z0) -> tuple[Fraction, ...]:
    """Exact reliability leaves from a base parameter z0 in [0, 1].

    Identical recursion to rank_profile; kept as its own name because
    callers sum these rather than thresholding them.
    """
    return rank_profile(n, z0)


def bhattacharyya_profile_float(n: int, z0) -> np.ndarray:
    return rank_profile_float(n, z0)


def bhattacharyya_sum(n: int, z0, rows: ColumnSet) -> Fraction:
    """Exact sum of leaf values over the complement of ``rows``.

    Upper-bounds the decoding failure probability of the code whose
    checks are the selected rows; can exceed 1 (clamp for reporting).
    Uses the martingale identity: total mass is n * z0, so only the
    selected leaves need exact evaluation.
    """
    z = parse_probability(z0, "z0")
    if rows.indices and rows.indices[-1] > n:
        raise ValueError("row index out of range")
    picked = sum(profile_leaf(n, i, z) for i in rows)
    return n * z - picked


# ---------------------------------------------------------------------------
# profile CSV: "# mode: exact|float" header, then index,rho rows


def write_profile_csv(values, exact: bool, target) -> None:
    lines = [f"# mode: {'exact' if exact else 'float'}", "index,rho"]
    for i, v in enumerate(values, start=1):
        if exact:
            lines.append(f"{i},{Fraction(v)}")
        else:
            lines.append(f"{i},{float(v):.17g}")
    text = "\n".join(lines) + "\n"
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", encoding="ascii") as fh:
            fh.write(text)


def read_profile_csv(source) -> tuple[bool, list]:
    """Returns (exact, values) from the CSV format written above."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="ascii") as fh:
            text = fh.read()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2 or not lines[0].startswith("# mode:"):
        raise ValueError("missing profile header")
    mode = lines[0].split(":", 1)[1].strip()
    if mode not in ("exact", "float"):
        raise ValueError(f"bad profile mode {mode!r}")
    if lines[1] != "index,rho":
        raise ValueError("missing index,rho header row")
    vals = []
    for want, ln in enumerate(lines[2:], start=1):
        idx, _, val = ln.partition(",")
        if int(idx) != want:
            raise ValueError(f"profile rows out of order at index {idx}")
        vals.append(Fraction(val) if mode == "exact" else float(val))
    return mode == "exact", vals
