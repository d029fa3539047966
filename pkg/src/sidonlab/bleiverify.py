"""Both sides of Blei's inequality, and the A / B chain quantities.

For a coefficient table on J(d, n) and 1 <= k <= d, every slot set S of
size d - k contributes the mixed-norm factor

    ( sum_{j on S^} ( sum_{i on S} |a_{i+j}|^2 )^{k/(k+1)} )^{(k+1)/(2k)}

and the right side is the geometric mean of these factors over all
C(d, k) choices of S.  The ``complex`` variant runs over non-decreasing
i, j with i (+) j non-decreasing (the torus table); the ``boolean``
variant over strictly increasing i, j with the flat extension a^flat.
``boolean-strengthened`` multiplies the boolean right side by C(d, k)^(-1/2).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import mpmath

from .boundcalc import BoundConfig, BoundReport, hc_constant
from .indexcomb import (
    INCREASING,
    NONDECREASING,
    IndexSpace,
    binomial,
    card_space,
    check_cap,
    complement,
    falling_factorial,
    ij_ratio_check,
    iter_values,
    orbit_size,
    win_ratio_identity,
)

__all__ = [
    "BOOLEAN",
    "COMPLEX",
    "STRENGTHENED",
    "VARIANTS",
    "BleiSides",
    "ChainQuantities",
    "blei_sides",
    "chain_A",
    "chain_B_bounds",
    "chain_B_exact",
    "chain_quantities",
    "elem_denom_win",
    "ij_ratio_check",  # lives in indexcomb, listed here with the other chain checks
]
from .polyform import TORUS, CoefficientTable, UnimodularPolynomial

COMPLEX = "complex"
BOOLEAN = "boolean"
STRENGTHENED = "boolean-strengthened"
VARIANTS = (COMPLEX, BOOLEAN, STRENGTHENED)
SLACK = 1e-9
_DPS = 50


@dataclass(frozen=True)
class BleiSides:
    lhs: float
    rhs: float
    variant: str
    k: int
    per_subset_terms: dict[tuple[int, ...], float] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1 + SLACK)

    @property
    def slack(self) -> float:
        """Relative slack (rhs - lhs) / rhs; negative means violated."""
        return (self.rhs - self.lhs) / self.rhs if self.rhs > 0 else -math.inf * (self.lhs > 0)

    def to_dict(self) -> dict:
        out = {
            "variant": self.variant,
            "k": self.k,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "relative_slack": self.slack,
            "per_subset_terms": [
                {"S": list(S), "factor": v} for S, v in sorted(self.per_subset_terms.items())
            ],
        }
        if self.variant == STRENGTHENED:
            # one term per subset, so the count is C(d, k)
            out["strengthening_factor"] = len(self.per_subset_terms) ** -0.5
        return out


def _merge(S, i_vals, S_hat, j_vals, d):
    out = [0] * d
    for s, v in zip(S, i_vals):
        out[s - 1] = v
    for s, v in zip(S_hat, j_vals):
        out[s - 1] = v
    return out


def _subset_factor(table: CoefficientTable, S, k: int, variant: str) -> float:
    sp = table.space
    d, n = sp.d, sp.n
    S_hat = complement(S, d)
    if variant == COMPLEX:
        kind = NONDECREASING
    else:
        kind = INCREASING
    inner_space = IndexSpace(d, n, tuple(S), kind)
    outer_space = IndexSpace(d, n, S_hat, kind)
    inner_list = list(iter_values(inner_space))
    outer = 0.0
    for j in iter_values(outer_space):
        acc = 0.0
        for i in inner_list:
            m = _merge(S, i, S_hat, j, d)
            if variant == COMPLEX:
                if any(a > b for a, b in zip(m, m[1:])):
                    continue
                a = table.get(m)
            else:
                if len(set(m)) != d:
                    continue
                a = table.get(sorted(m))
            acc += abs(a) ** 2
        if acc > 0:
            outer += acc ** (k / (k + 1))
    return outer ** ((k + 1) / (2 * k)) if outer > 0 else 0.0


def _geometric_mean(values) -> float:
    values = list(values)
    if any(v == 0 for v in values):
        return 0.0
    return math.exp(math.fsum(math.log(v) for v in values) / len(values))


def blei_sides(table: CoefficientTable, k: int, variant: str = BOOLEAN) -> BleiSides:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    sp = table.space
    d, n = sp.d, sp.n
    if not 1 <= k <= d:
        raise ValueError("need 1 <= k <= d")
    want = NONDECREASING if variant == COMPLEX else INCREASING
    if sp.kind != want:
        raise ValueError(f"variant {variant!r} needs a {want} coefficient table")
    kind = sp.kind
    work = binomial(d, k) * card_space(IndexSpace(k, n, kind=kind)) * card_space(
        IndexSpace(d - k, n, kind=kind)
    )
    check_cap(work, "Blei sides")

    p = 2 * d / (d + 1)
    mod = table.moduli()
    lhs = float(sum(mod**p) ** (1 / p)) if mod.size else 0.0

    terms = {}
    for S in itertools.combinations(range(1, d + 1), d - k):
        terms[S] = _subset_factor(table, S, k, variant)
    rhs = _geometric_mean(terms[S] for S in sorted(terms))
    if variant == STRENGTHENED:
        rhs /= math.sqrt(binomial(d, k))
    return BleiSides(lhs, rhs, variant, k, terms)


# ------------------------------------------------------------------ chain A


def chain_A(n: int, d: int, k: int) -> tuple[float, float]:
    """A = C(n+d-1,d)^((d+1)/(2d)) and its bound C(n+k-1,k)^(1/(2k)) C(n+d-1,d)^(1/2)."""
    if not 1 <= k <= d <= n:
        raise ValueError("need 1 <= k <= d <= n")
    with mpmath.workdps(_DPS):
        return _chain_A(n, d, k)


def _chain_A(n, d, k):
    big = mpmath.mpf(binomial(n + d - 1, d))
    small = mpmath.mpf(binomial(n + k - 1, k))
    A = big ** (mpmath.mpf(d + 1) / (2 * d))
    bound = small ** (mpmath.mpf(1) / (2 * k)) * mpmath.sqrt(big)
    return float(A), float(bound)


# ------------------------------------------------------------------ chain B


def _b_lower_log(n, d, k, c):
    return (
        math.log(c)
        - 0.5 * math.log(falling_factorial(d, k))
        + 0.5 * math.log(binomial(n + d - k - 1, d - k))
        + (k + 1) / (2 * k) * (math.lgamma(k + 1) + math.log(binomial(n + k - 1, k)))
    )


def _b_upper_log(d, k, cfg, sup_norm):
    return (
        -0.5 * math.log(falling_factorial(d, k))
        + math.log(hc_constant(d, k))
        + cfg.c0 * math.log(k)
        + d * math.log(d)
        - (d - k) * math.log(d - k)
        + math.log(sup_norm)
    )


def chain_B_bounds(
    n: int, d: int, k: int, cfg: BoundConfig | None = None, sup_norm: float = 1.0
) -> tuple[float, float]:
    """(lower, upper) envelopes for B.

    lower = c [d..(d-k+1)]^(-1/2) C(n+d-k-1,d-k)^(1/2) (k!)^((k+1)/(2k)) C(n+k-1,k)^((k+1)/(2k))
    upper = [d..(d-k+1)]^(-1/2) HC BH_form d^d / (d-k)^(d-k) ||P||_inf,
    with c = ``cfg.c_abs``, BH_form = k^cfg.c0 and ``sup_norm`` standing in
    for ||P||_inf.
    """
    cfg = cfg or BoundConfig()
    if not 1 <= k < d <= n:
        raise ValueError("need 1 <= k < d <= n")
    if sup_norm <= 0:
        raise ValueError("sup_norm must be positive")
    return math.exp(_b_lower_log(n, d, k, cfg.c_abs)), math.exp(_b_upper_log(d, k, cfg, sup_norm))


def chain_B_exact(P: UnimodularPolynomial, k: int) -> float:
    """Geometric mean over |S| = k of
    [ sum_{i in M(S,n)} ( sum_{j in M(S^,n)} |[i+j]| |b_{i+j}|^2 )^{k/(k+1)} ]^{(k+1)/(2k)}
    with b the symmetric-form coefficients.
    """
    if P.domain != TORUS or not P.homogeneous:
        raise ValueError("chain_B_exact needs a homogeneous torus polynomial")
    d, n = P.d, P.n
    if not 1 <= k <= d:
        raise ValueError("need 1 <= k <= d")
    check_cap(binomial(d, k) * n**d, "B expression")
    # |[m]| |b_m|^2 = |a_{r(m)}|^2 / |[r(m)]|
    weight = {key: abs(a) ** 2 / orbit_size(key) for key, a in P.coefficients.entries.items()}
    logs = []
    for S in itertools.combinations(range(1, d + 1), k):
        S_hat = complement(S, d)
        outer = 0.0
        for i in itertools.product(range(1, n + 1), repeat=k):
            acc = 0.0
            for j in itertools.product(range(1, n + 1), repeat=d - k):
                acc += weight.get(tuple(sorted(_merge(S, i, S_hat, j, d))), 0.0)
            if acc > 0:
                outer += acc ** (k / (k + 1))
        if outer == 0:
            return 0.0
        logs.append((k + 1) / (2 * k) * math.log(outer))
    return math.exp(math.fsum(logs) / len(logs))


@dataclass(frozen=True)
class ChainQuantities:
    A: float
    A_bound: float
    B_exact: float | None
    B_lower: float
    B_upper: float

    @property
    def lower_ratio(self) -> float | None:
        """B_exact / B_lower: the factor by which c could grow before the lower envelope fails."""
        return None if self.B_exact is None else self.B_exact / self.B_lower

    @property
    def upper_ratio(self) -> float | None:
        """B_exact / B_upper: the smallest multiplier on the upper constants that keeps it valid."""
        return None if self.B_exact is None else self.B_exact / self.B_upper

    @property
    def consistent(self) -> bool:
        ok = self.A <= self.A_bound * (1 + SLACK)
        if self.B_exact is not None:
            ok &= self.B_lower <= self.B_exact * (1 + SLACK)
            ok &= self.B_exact <= self.B_upper * (1 + SLACK)
        return ok


def chain_quantities(
    P: UnimodularPolynomial, k: int, cfg: BoundConfig | None = None, sup_norm: float = 1.0
) -> ChainQuantities:
    """A, its bound, and B with both envelopes for a unimodular torus polynomial."""
    A, A_bound = chain_A(P.n, P.d, k)
    lo, hi = chain_B_bounds(P.n, P.d, k, cfg, sup_norm)
    return ChainQuantities(A, A_bound, chain_B_exact(P, k), lo, hi)


def elem_denom_win(n: int, d: int, k: int) -> BoundReport:
    """Unimodular boolean left-side cap, right side, and their ratio C(d,k)^(-1/2)."""
    exact = win_ratio_identity(k, d, n)
    with mpmath.workdps(_DPS):
        return _win_report(n, d, k, exact)


def _win_report(n, d, k, exact):
    elem = mpmath.sqrt(binomial(n, d)) * mpmath.mpf(binomial(n, k)) ** (mpmath.mpf(1) / (2 * k))
    denom = mpmath.sqrt(binomial(n - k, d - k)) * mpmath.mpf(binomial(n, k)) ** (
        mpmath.mpf(k + 1) / (2 * k)
    )
    ratio = elem / denom
    return BoundReport(
        name="win_ratio",
        inputs={"n": n, "d": d, "k": k},
        value=float(ratio),
        log_value=float(mpmath.log(ratio)),
        exact_value=None,
        tag="unimodular-blei-gain",
        components={
            "elem": float(elem),
            "denom": float(denom),
            "ratio_squared": str(exact),
            "binom_d_k": binomial(d, k),
        },
    )

