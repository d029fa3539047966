"""Exact combinatorics over the three multi-index families.

A multi-index is a map from an ordered set of slots S (a subset of
[d] = {1, ..., d}) into [n] = {1, ..., n}.  Three monotonicity classes are
supported:

* ``unrestricted``        -- all maps, the family M(S, n), size n^|S|
* ``nondecreasing``       -- i(s1) <= i(s2) <= ..., size C(n+|S|-1, |S|)
* ``increasing``          -- strictly increasing, size C(n, |S|)

Values are 1-based throughout.  Every count is a Python int and every
ratio a :class:`fractions.Fraction`, so identities are checked with zero
tolerance.  Fractional-power inequalities are decided by cross-multiplied
integer powers.
"""

from __future__ import annotations

import itertools
import math
import os
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

# Exact rationals are carried by the stdlib type.
ExactRational = Fraction

UNRESTRICTED = "unrestricted"
NONDECREASING = "nondecreasing"
INCREASING = "increasing"
CLASSES = (UNRESTRICTED, NONDECREASING, INCREASING)

DEFAULT_CAP = 10**7


class CapExceeded(RuntimeError):
    """An enumeration would visit more elements than the configured cap."""

    def __init__(self, size: int, cap: int, what: str = "enumeration"):
        self.size = size
        self.cap = cap
        super().__init__(f"{what} of {size} elements exceeds cap {cap}")


class IdentityViolation(AssertionError):
    """An exact identity that must hold did not."""


def enumeration_cap() -> int:
    """Current enumeration cap; the ``SIDONLAB_CAP`` env var overrides it."""
    raw = os.environ.get("SIDONLAB_CAP")
    if raw:
        return int(raw)
    return DEFAULT_CAP


def check_cap(size: int, what: str = "enumeration", cap: int | None = None) -> None:
    cap = enumeration_cap() if cap is None else cap
    if size > cap:
        raise CapExceeded(size, cap, what)


def _is_monotone(values: Sequence[int], kind: str) -> bool:
    if kind == UNRESTRICTED:
        return True
    if kind == NONDECREASING:
        return all(a <= b for a, b in zip(values, values[1:]))
    if kind == INCREASING:
        return all(a < b for a, b in zip(values, values[1:]))
    raise ValueError(f"unknown monotonicity class {kind!r}")


@dataclass(frozen=True)
class MultiIndex:
    """A map from ``slots`` (positions in [d], ascending) to ``values`` in [n]."""

    slots: tuple[int, ...]
    values: tuple[int, ...]
    kind: str = UNRESTRICTED
    n: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.slots) != len(self.values):
            raise ValueError("slots and values differ in length")
        if any(a >= b for a, b in zip(self.slots, self.slots[1:])):
            raise ValueError("slots must be strictly ascending")
        if any(v < 1 for v in self.values):
            raise ValueError("index values are 1-based")
        if self.n is not None and any(v > self.n for v in self.values):
            raise ValueError(f"index value exceeds n={self.n}")
        if not _is_monotone(self.values, self.kind):
            raise ValueError(f"values {self.values} are not {self.kind}")

    @classmethod
    def full(cls, values: Sequence[int], kind: str = UNRESTRICTED, n: int | None = None) -> "MultiIndex":
        """Multi-index defined on all of [d], d = len(values)."""
        return cls(tuple(range(1, len(values) + 1)), tuple(values), kind, n)

    def __len__(self) -> int:
        return len(self.values)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.slots, self.values))


def _values(idx: MultiIndex | Sequence[int]) -> tuple[int, ...]:
    return idx.values if isinstance(idx, MultiIndex) else tuple(idx)


def combine(i: MultiIndex, j: MultiIndex) -> MultiIndex:
    """The map i (+) j on the union of the slot sets, which must be disjoint."""
    merged = {**i.as_dict()}
    for s, v in j.as_dict().items():
        if s in merged:
            raise ValueError(f"slot {s} defined by both multi-indices")
        merged[s] = v
    slots = tuple(sorted(merged))
    return MultiIndex(slots, tuple(merged[s] for s in slots), UNRESTRICTED)


def complement(slots: Sequence[int], d: int) -> tuple[int, ...]:
    """[d] minus the given slots."""
    chosen = set(slots)
    return tuple(s for s in range(1, d + 1) if s not in chosen)


@dataclass(frozen=True)
class IndexSpace:
    d: int
    n: int
    subset: tuple[int, ...] | None = None
    kind: str = NONDECREASING

    def __post_init__(self):
        if self.kind not in CLASSES:
            raise ValueError(f"unknown monotonicity class {self.kind!r}")
        if self.d < 0 or self.n < 0:
            raise ValueError("d and n must be non-negative")
        if self.subset is None:
            object.__setattr__(self, "subset", tuple(range(1, self.d + 1)))
        else:
            sub = tuple(self.subset)
            if any(s < 1 or s > self.d for s in sub) or list(sub) != sorted(set(sub)):
                raise ValueError(f"subset {sub} is not an ascending subset of [{self.d}]")
            object.__setattr__(self, "subset", sub)

    @property
    def size(self) -> int:
        return len(self.subset)

    def contains(self, values: Sequence[int]) -> bool:
        values = tuple(values)
        return (
            len(values) == self.size
            and all(1 <= v <= self.n for v in values)
            and _is_monotone(values, self.kind)
        )


def binomial(n: int, k: int) -> int:
    """C(n, k), zero outside 0 <= k <= n."""
    if n < 0:
        raise ValueError("binomial needs n >= 0")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def falling_factorial(d: int, k: int) -> int:
    """d (d-1) ... (d-k+1); the empty product for k = 0."""
    return math.perm(d, k)


def card_space(space: IndexSpace) -> int:
    m, n = space.size, space.n
    if space.kind == UNRESTRICTED:
        return n**m
    if space.kind == NONDECREASING:
        if n == 0:
            return 1 if m == 0 else 0
        return binomial(n + m - 1, m)
    return binomial(n, m)


def iter_values(space: IndexSpace) -> Iterator[tuple[int, ...]]:
    """Lexicographic stream of raw value tuples (no cap check)."""
    rng = range(1, space.n + 1)
    m = space.size
    if space.kind == UNRESTRICTED:
        return itertools.product(rng, repeat=m)
    if space.kind == NONDECREASING:
        return itertools.combinations_with_replacement(rng, m)
    return itertools.combinations(rng, m)


def enumerate_space(space: IndexSpace, cap: int | None = None) -> Iterator[MultiIndex]:
    """Lexicographic stream of the space's multi-indices.

    Raises :class:`CapExceeded` (carrying the exact cardinality) before
    yielding anything when the space is larger than the cap.
    """
    check_cap(card_space(space), cap=cap)
    return (
        MultiIndex(space.subset, vals, space.kind, space.n)
        for vals in iter_values(space)
    )


def orbit_size(i: MultiIndex | Sequence[int]) -> int:
    """Number of distinct rearrangements: d! / prod_k (#{s : i_s = k})!."""
    vals = _values(i)
    out = math.factorial(len(vals))
    for mult in Counter(vals).values():
        out //= math.factorial(mult)
    return out


def count_nondecreasing_extensions(
    j: MultiIndex, d: int, n: int, method: str = "gaps"
) -> int:
    """Number of non-decreasing Phi: [d] -> [n] with Phi restricted to j's slots equal to j.

    ``method="gaps"`` multiplies a stars-and-bars count for every run of free
    slots; ``method="enumerate"`` counts by walking all of J(d, n).
    """
    fixed = j.as_dict()
    if any(s < 1 or s > d for s in fixed):
        raise ValueError("slot outside [d]")
    if not _is_monotone([fixed[s] for s in sorted(fixed)], NONDECREASING):
        return 0
    if method == "enumerate":
        space = IndexSpace(d, n, kind=NONDECREASING)
        check_cap(card_space(space))
        return sum(
            all(phi[s - 1] == v for s, v in fixed.items()) for phi in iter_values(space)
        )
    if method != "gaps":
        raise ValueError(f"unknown method {method!r}")

    total = 1
    lo, run = 1, 0
    for s in range(1, d + 1):
        if s in fixed:
            hi = fixed[s]
            total *= binomial(hi - lo + run, run) if hi >= lo else 0
            lo, run = hi, 0
        else:
            run += 1
    total *= binomial(n - lo + run, run) if n >= lo else 0
    return total


@lru_cache(maxsize=256)
def _restriction_tally(d: int, n: int, kept: tuple[int, ...]) -> Counter:
    space = IndexSpace(d, n, kind=NONDECREASING)
    return Counter(tuple(phi[s - 1] for s in kept) for phi in iter_values(space))


@dataclass(frozen=True)
class ExtensionMean:
    """Mean number of non-decreasing extensions, closed form beside brute force."""

    d: int
    k: int
    n: int
    S: tuple[int, ...]
    closed_form: Fraction
    brute_force: Fraction | None

    @property
    def agrees(self) -> bool:
        return self.brute_force is not None and self.brute_force == self.closed_form


def extension_mean_closed_form(d: int, k: int, n: int) -> Fraction:
    return Fraction(binomial(n + d - 1, d), binomial(n + k - 1, k))


def extension_mean_brute_force(d: int, n: int, S: Sequence[int]) -> Fraction:
    """Average over non-decreasing j on [d] minus S of the enumerated extension count."""
    S_hat = complement(S, d)
    # checked outside the cache so a lowered cap is honoured on repeat calls
    check_cap(card_space(IndexSpace(d, n, kind=NONDECREASING)))
    tally = _restriction_tally(d, n, S_hat)
    js = IndexSpace(d, n, S_hat, NONDECREASING)
    total = sum(tally[vals] for vals in iter_values(js))
    return Fraction(total, card_space(js))


def expected_extensions(d: int, k: int, n: int, S: Sequence[int] | None = None) -> ExtensionMean:
    """Closed form C(n+k-1,k)^-1 C(n+d-1,d) checked against brute force.

    ``S`` is the free slot set (|S| = d - k); defaults to {1, ..., d-k}.
    Raises :class:`IdentityViolation` if the two disagree.  When the brute
    force would exceed the enumeration cap only the closed form is filled.
    """
    if not 1 <= k <= d or n < 1:
        raise ValueError("need 1 <= k <= d and n >= 1")
    S = tuple(range(1, d - k + 1)) if S is None else tuple(sorted(S))
    if len(S) != d - k or any(s < 1 or s > d for s in S):
        raise ValueError(f"S must be a subset of [{d}] of size {d - k}")
    closed = extension_mean_closed_form(d, k, n)
    try:
        brute = extension_mean_brute_force(d, n, S)
    except CapExceeded:
        brute = None
    out = ExtensionMean(d, k, n, S, closed, brute)
    if brute is not None and not out.agrees:
        raise IdentityViolation(f"extension mean {brute} != {closed} at d={d}, k={k}, n={n}, S={S}")
    return out


@dataclass(frozen=True)
class PowerComparison:
    """Integer witness for an inequality lhs <= rhs."""

    holds: bool
    lhs: int
    rhs: int


def check_strange(k: int, d: int, n: int) -> PowerComparison:
    """C(n+d-1,d)^(1/d) <= C(n+k-1,k)^(1/k), decided as C(n+d-1,d)^k <= C(n+k-1,k)^d."""
    if not 1 <= k <= d <= n:
        raise ValueError("need 1 <= k <= d <= n")
    lhs = binomial(n + d - 1, d) ** k
    rhs = binomial(n + k - 1, k) ** d
    return PowerComparison(lhs <= rhs, lhs, rhs)


def check_elem(k: int, d: int, n: int) -> PowerComparison:
    """C(n,d)^(1/d) <= C(n,k)^(1/k) in integer powers (the strictly increasing analogue)."""
    if not 1 <= k <= d <= n:
        raise ValueError("need 1 <= k <= d <= n")
    lhs = binomial(n, d) ** k
    rhs = binomial(n, k) ** d
    return PowerComparison(lhs <= rhs, lhs, rhs)


def win_ratio_identity(k: int, d: int, n: int) -> Fraction:
    """C(n,d) / (C(n-k,d-k) C(n,k)), asserted equal to 1/C(d,k)."""
    if not 1 <= k <= d <= n:
        raise ValueError("need 1 <= k <= d <= n")
    ratio = Fraction(binomial(n, d), binomial(n - k, d - k) * binomial(n, k))
    expected = Fraction(1, binomial(d, k))
    if ratio != expected:
        raise IdentityViolation(f"win ratio {ratio} != {expected} at k={k}, d={d}, n={n}")
    return ratio


@dataclass(frozen=True)
class CompaCheck:
    n: int
    d: int
    k: int
    ratio: Fraction
    bound: float
    holds: bool


def check_compa(n: int, d: int, k: int, C: float = 3.0) -> CompaCheck:
    """C(n+k-1,k)/C(n,k) <= exp(3k^2/n) under k <= C sqrt(d) and d^2 <= n."""
    if not (1 <= k <= d and d * d <= n and k <= C * math.sqrt(d)):
        raise ValueError(f"(n={n}, d={d}, k={k}) violates k <= {C} sqrt(d), d^2 <= n")
    ratio = Fraction(binomial(n + k - 1, k), binomial(n, k))
    bound = math.exp(3 * k * k / n)
    return CompaCheck(n, d, k, ratio, bound, float(ratio) <= bound)


def sample_compa_triples(count: int, seed: int = 0, C: float = 3.0, d_max: int = 60):
    """Random admissible (n, d, k) triples for :func:`check_compa`."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        d = rng.randint(1, d_max)
        n = rng.randint(d * d, 4 * d * d + 16)
        k_max = min(d, int(C * math.sqrt(d)))
        if k_max < 1:
            continue
        out.append((n, d, rng.randint(1, k_max)))
    return out


def ij_ratio_check(i: MultiIndex, j: MultiIndex) -> bool:
    """|[i (+) j]| <= d(d-1)...(d-k+1) |[j]| with k = |i| and d = |i| + |j|."""
    d = len(i) + len(j)
    k = len(i)
    return orbit_size(combine(i, j)) <= falling_factorial(d, k) * orbit_size(j)
