"""Explicit constants, bound curves and regime boundaries.

All logarithms are natural.  Bound curves grow like exp(sqrt(d log d)) and
overflow doubles for d in the thousands, so every curve is computed as a
log first; :class:`BoundReport` carries both.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import gammaln

from .indexcomb import binomial

SQRT_2_3 = math.sqrt(2) / math.sqrt(3)
K_COEFF = 2 * math.sqrt(2) / math.sqrt(3)
BPS_MAIN = 4 / math.sqrt(3)
BPS_TAIL = 8 / math.sqrt(3)


@dataclass(frozen=True)
class BoundConfig:
    """Tunable constants.  The absolute constants have no known values and default to 1."""

    c0: float = 0.4
    a: float = 0.39
    tau: float = 0.1
    C_tau: float = 1.0
    C0: float = 1.0
    C1: float = 1.0
    C: float = 1.0
    c_abs: float = 1.0
    K: float = 3.0
    epsilon: float = 0.5
    promise_C: float = 3.0
    log_base: str = "natural"

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        for name in ("c0", "a", "C_tau", "C0", "C1", "C", "c_abs", "K", "epsilon", "promise_C"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.log_base != "natural":
            raise ValueError("only natural logarithms are supported")

    @classmethod
    def from_json(cls, path, **overrides) -> "BoundConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return cls.from_mapping({**data, **overrides})

    @classmethod
    def from_mapping(cls, data) -> "BoundConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**{k: v for k, v in data.items() if v is not None})

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class BoundReport:
    name: str
    inputs: dict
    value: float
    log_value: float
    exact_value: Fraction | int | None = None
    tag: str = ""
    components: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.exact_value is not None:
            ex = float(self.exact_value)
            if abs(ex - self.value) > 1e-12 * max(abs(ex), abs(self.value)):
                raise ValueError("exact_value and value disagree")

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "inputs": self.inputs,
            "value": self.value,
            "log_value": self.log_value,
            "tag": self.tag,
            "components": self.components,
        }
        if self.exact_value is not None:
            out["exact_value"] = str(self.exact_value)
        return out


def _exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


def round_half_away(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


# ------------------------------------------------------ elementary constants


def hc_constant(d: int, k: int) -> float:
    """exp(4(d-k)/(3k-1)), the L2 / L^{2k/(k+1)} hypercontractivity bound."""
    if not 1 <= k <= d:
        raise ValueError("need 1 <= k <= d")
    return math.exp(4 * (d - k) / (3 * k - 1))


@lru_cache(maxsize=None)
def chebyshev_T(d: int) -> tuple[int, ...]:
    """Integer coefficients of T_d in the power basis, lowest degree first."""
    if d == 0:
        return (1,)
    prev, cur = [1], [0, 1]
    for _ in range(d - 1):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return tuple(cur)


def chebyshev_coefficient(d: int, k: int) -> int:
    """Signed coefficient of x^k in T_d (zero for mismatched parity)."""
    if not 0 <= k <= d:
        raise ValueError("need 0 <= k <= d")
    return chebyshev_T(d)[k]


def chebyshev_L(d: int, k: int) -> int:
    """|coefficient of x^k| in T_d when d = k mod 2, else in T_{d-1}."""
    if not 0 <= k <= d:
        raise ValueError("need 0 <= k <= d")
    if (d - k) % 2 == 0:
        return abs(chebyshev_T(d)[k])
    return abs(chebyshev_T(d - 1)[k])


def markov_step_fraction(d: int, k: int) -> Fraction:
    """L(d,k) (d-k)! k! d^d / (d! k^k (d-k)^(d-k)), exactly."""
    if not 1 <= k <= d - 1:
        raise ValueError("need 1 <= k <= d - 1")
    num = chebyshev_L(d, k) * math.factorial(d - k) * math.factorial(k) * d**d
    den = math.factorial(d) * k**k * (d - k) ** (d - k)
    return Fraction(num, den)


def markov_step_bound(d: int, k: int) -> float:
    return float(markov_step_fraction(d, k))


def markov_order_table(ds=(16, 25, 36, 49)) -> list[dict]:
    """L(d,k) / (d/k)^k for k <= sqrt(d), as exact fractions and floats."""
    rows = []
    for d in ds:
        for k in range(1, math.isqrt(d) + 1):
            r = Fraction(chebyshev_L(d, k) * k**k, d**k)
            rows.append({"d": d, "k": k, "L": chebyshev_L(d, k), "ratio": r, "ratio_float": float(r)})
    return rows


# ------------------------------------------------------------ complex case


def complex_chain_log(d: int, k, cfg: BoundConfig | None = None):
    """log of k^c0 e^(c k^2/d) e^(4d/(3k) + k log(d)/2 + 2k - k log k); vectorises over k."""
    cfg = cfg or BoundConfig()
    k = np.asarray(k, dtype=float)
    return (
        cfg.c0 * np.log(k)
        + cfg.c_abs * k * k / d
        + 4 * d / (3 * k)
        + 0.5 * k * math.log(d)
        + 2 * k
        - k * np.log(k)
    )


def k_formula(d: int) -> int:
    """Nearest integer to 2 sqrt(2/3) sqrt(d / log d), clamped to [1, d-1]."""
    if d < 2:
        raise ValueError("need d >= 2")
    raw = K_COEFF * math.sqrt(d / math.log(d))
    return min(max(round_half_away(raw), 1), d - 1)


def k_range(d: int, cfg: BoundConfig | None = None) -> np.ndarray:
    """Admissible k: 1 <= k <= min(d-1, promise_C sqrt d).

    The chain estimates drop a factor growing with k and use approximations
    valid only for k << d; scanning up to d-1 lets the degenerate endpoint win.
    """
    cfg = cfg or BoundConfig()
    if d < 2:
        raise ValueError("need d >= 2")
    top = min(d - 1, max(1, math.floor(cfg.promise_C * math.sqrt(d))))
    return np.arange(1, top + 1)


def optimal_k_complex(d: int, cfg: BoundConfig | None = None) -> tuple[int, int]:
    """(formula k, exhaustive argmin of the complex chain over the admissible k)."""
    ks = k_range(d, cfg)
    vals = complex_chain_log(d, ks, cfg)
    return k_formula(d), int(ks[int(np.argmin(vals))])  # argmin keeps the first, i.e. smaller, k


def bound_complex(d: int, cfg: BoundConfig | None = None) -> BoundReport:
    """C_tau exp((sqrt(2/3) + tau) sqrt(d log d))."""
    cfg = cfg or BoundConfig()
    if d < 1:
        raise ValueError("need d >= 1")
    coeff = SQRT_2_3 + cfg.tau
    log_v = math.log(cfg.C_tau) + coeff * math.sqrt(d * math.log(d))
    return BoundReport(
        "bound_complex",
        {"d": d},
        _exp(log_v),
        log_v,
        tag="unimodular-torus-bound",
        components={"exponent_coefficient": coeff, "C_tau": cfg.C_tau, "tau": cfg.tau},
    )


def bound_bps(d: int, cfg: BoundConfig | None = None) -> BoundReport:
    """C1 exp((4/sqrt 3) sqrt(d log d) + (8/sqrt 3) sqrt(d / log d))."""
    cfg = cfg or BoundConfig()
    if d < 2:
        raise ValueError("need d >= 2")
    L = math.log(d)
    log_v = math.log(cfg.C1) + BPS_MAIN * math.sqrt(d * L) + BPS_TAIL * math.sqrt(d / L)
    return BoundReport(
        "bound_bps",
        {"d": d},
        _exp(log_v),
        log_v,
        tag="general-torus-bound",
        components={"main_coefficient": BPS_MAIN, "tail_coefficient": BPS_TAIL, "C1": cfg.C1},
    )


def dominance_threshold(d_max: int = 10_000, cfg: BoundConfig | None = None) -> int | None:
    """Smallest d* in [2, d_max] from which bound_complex < bound_bps for every larger d."""
    d_star = None
    for d in range(d_max, 1, -1):
        if bound_complex(d, cfg).log_value < bound_bps(d, cfg).log_value:
            d_star = d
        else:
            break
    return d_star


# ------------------------------------------------------------ boolean case


def boolean_chain_log(d: int, k, strengthened: bool = True):
    """log of [C(d,k)^(-1/2)] e^((d-k)/(2k)) (1 + k/(d-k))^(d-k) (d/k)^(2k)."""
    k = np.asarray(k, dtype=float)
    out = (d - k) / (2 * k) + (d - k) * np.log1p(k / (d - k)) + 2 * k * np.log(d / k)
    if strengthened:
        log_binom = gammaln(d + 1) - gammaln(k + 1) - gammaln(d - k + 1)
        out = out - 0.5 * log_binom
    return out


def simplified_boolean_log(d: int, k, power: float):
    """d/(2k) + power * k * (log d - log k)."""
    k = np.asarray(k, dtype=float)
    return d / (2 * k) + power * k * (math.log(d) - np.log(k))


def _argmin(vals) -> int:
    return int(np.argmin(vals))


def bound_boolean(d: int, cfg: BoundConfig | None = None) -> BoundReport:
    """Minimum over the admissible k (see ``k_range``) of the strengthened boolean chain.

    Components hold the minimiser and the unstrengthened and simplified
    (exponent 3/2 and 2) minima for comparison, plus the argmin over the
    full range 1..d-1, which sits at the degenerate end k = d-1.
    """
    ks = k_range(d, cfg)
    full = np.arange(1, d)
    strong = boolean_chain_log(d, ks, True)
    weak = boolean_chain_log(d, ks, False)
    simp_32 = simplified_boolean_log(d, ks, 1.5)
    simp_2 = simplified_boolean_log(d, ks, 2.0)
    i = _argmin(strong)
    j = _argmin(weak)
    log_v = float(strong[i])
    return BoundReport(
        "bound_boolean",
        {"d": d},
        _exp(log_v),
        log_v,
        tag="unimodular-cube-bound",
        components={
            "k_opt": int(ks[i]),
            "log_unstrengthened": float(weak[j]),
            "k_opt_unstrengthened": int(ks[j]),
            "log_simplified_3_2": float(simp_32.min()),
            "k_simplified_3_2": int(ks[_argmin(simp_32)]),
            "log_simplified_2": float(simp_2.min()),
            "k_simplified_2": int(ks[_argmin(simp_2)]),
            "k_max": int(ks[-1]),
            "k_at_boundary": bool(ks[i] == ks[-1]),
            "k_opt_full_range": int(full[_argmin(boolean_chain_log(d, full, True))]),
        },
    )


# ------------------------------------------------------------ regimes


class Regime(str, enum.Enum):
    INTERESTING = "interesting"
    TRIVIAL = "trivial"


def regime_classify(n: int, d: int, cfg: BoundConfig | None = None) -> Regime:
    """Interesting iff d^2 <= c n (ties are interesting)."""
    cfg = cfg or BoundConfig()
    if n < 1 or d < 1:
        raise ValueError("need n, d >= 1")
    return Regime.INTERESTING if d * d <= cfg.c_abs * n else Regime.TRIVIAL


class RegimeMismatch(ValueError):
    pass


def e_lower_bound(terms: int = 30) -> Fraction:
    """sum_{j < terms} 1/j!, a rational strictly below e."""
    return sum((Fraction(1, math.factorial(j)) for j in range(terms)), Fraction(0))


@dataclass(frozen=True)
class HelperCheck:
    d: int
    lhs: int
    holds: bool
    method: str


def trivial_helper_check(d: int) -> HelperCheck:
    """C(d^2+d-1, d) <= e^d (d+1)^d, decided exactly with a rational lower bound for e.

    Should the rational bound ever be too weak, the comparison is redone in
    mpmath with 30 guard digits beyond the size of the integers involved.
    """
    if d < 1:
        raise ValueError("need d >= 1")
    lhs = binomial(d * d + d - 1, d)
    if lhs <= e_lower_bound() ** d * (d + 1) ** d:
        return HelperCheck(d, lhs, True, "rational")
    with mpmath.workdps(len(str(lhs)) + 30):
        holds = mpmath.mpf(lhs) <= mpmath.e**d * mpmath.mpf(d + 1) ** d
    return HelperCheck(d, lhs, bool(holds), "mpmath")


def trivial_regime(n: int, d: int) -> BoundReport:
    """For n <= d^2: C(n+d-1,d)^(1/(2d)) beside the cap sqrt(e(d+1))."""
    if n > d * d:
        raise RegimeMismatch(f"n={n} > d^2={d * d}: not the trivial regime")
    helper = trivial_helper_check(d)
    if not helper.holds:
        raise ArithmeticError(f"helper inequality fails at d={d}")
    factor = math.exp(math.log(binomial(n + d - 1, d)) / (2 * d))
    cap = math.sqrt(math.e * (d + 1))
    return BoundReport(
        "trivial_regime",
        {"n": n, "d": d},
        factor,
        math.log(factor),
        tag="trivial-regime",
        components={"cap": cap, "within_cap": factor <= cap, "helper_method": helper.method},
    )


def ab_ratio(n: int, d: int, k: int) -> BoundReport:
    """C(n+d-1,d) / (C(n+d-k-1,d-k) C(n+k-1,k)) exactly, with its bound C(d,k)^-1 e^((d-k)k/n)."""
    if not 1 <= k <= d <= n:
        raise ValueError("need 1 <= k <= d <= n")
    exact = Fraction(binomial(n + d - 1, d), binomial(n + d - k - 1, d - k) * binomial(n + k - 1, k))
    bound = math.exp((d - k) * k / n) / binomial(d, k)
    v = float(exact)
    return BoundReport(
        "ab_ratio",
        {"n": n, "d": d, "k": k},
        v,
        math.log(v),
        exact_value=exact,
        tag="a-over-b",
        components={"bound": bound, "within_bound": v <= bound * (1 + 1e-12)},
    )


# ------------------------------------------------ Aaronson-Ambainis side


@dataclass(frozen=True)
class AAQuantities:
    variance: float
    influences: tuple[float, ...]
    max_influence: float
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1 + 1e-9)


def aa_quantities(f, sup, cfg: BoundConfig | None = None) -> AAQuantities:
    """Variance, influences and both sides of (Var/d)^K <= C max Inf ||f||^(2K-2).

    ``f`` is a multilinear cube polynomial whose coefficients are its Fourier
    coefficients; ``sup`` a SupNormEstimate (or a number) for ||f||_inf.
    """
    cfg = cfg or BoundConfig()
    if f.domain != "cube":
        raise ValueError("aa_quantities needs a cube polynomial")
    inf = [0.0] * f.n
    var = 0.0
    for key, a in f.coefficients.entries.items():
        w = abs(a) ** 2
        if key:
            var += w
        for i in key:
            inf[i - 1] += w
    sup_val = float(getattr(sup, "value", sup))
    lhs = (var / f.d) ** cfg.K
    rhs = cfg.C * max(inf, default=0.0) * sup_val ** (2 * cfg.K - 2)
    return AAQuantities(var, tuple(inf), max(inf, default=0.0), lhs, rhs)


def log_binomial(n: int, d: int) -> float:
    return float(gammaln(n + 1) - gammaln(d + 1) - gammaln(n - d + 1))


def sidon_beats_trivial(n: int, d: int, cfg: BoundConfig | None = None) -> bool:
    """n^(1/2) exp(-C0 sqrt(d log d)) > 1, i.e. C0 sqrt(d log d) < log(n)/2."""
    cfg = cfg or BoundConfig()
    return cfg.C0 * math.sqrt(d * math.log(d)) < 0.5 * math.log(n)


def crossover_degree(n: int, cfg: BoundConfig | None = None) -> int:
    """Largest d >= 1 for which the Sidon lower bound on T_{n,d} beats the trivial one."""
    d = 1
    while sidon_beats_trivial(n, d + 1, cfg):
        d += 1
    return d


def aa_trivial_regime(n: int, d: int, cfg: BoundConfig | None = None) -> bool:
    """d >= n^eps (ties count as trivial)."""
    cfg = cfg or BoundConfig()
    return d >= n**cfg.epsilon


@dataclass(frozen=True)
class AARegimeRow:
    n: int
    d_star: int
    log_trivial_bound: float
    log_sidon_bound: float
    log_required_bound: float
    gap_low: int
    gap_high: float

    @property
    def gap_nonempty(self) -> bool:
        return self.gap_high > self.gap_low + 1

    def as_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["gap_nonempty"] = self.gap_nonempty
        return out


def aa_lower_bounds(n: int, d: int, cfg: BoundConfig | None = None) -> dict[str, float]:
    """Logs of the trivial, Sidon and required lower bounds on T_{n,d}."""
    cfg = cfg or BoundConfig()
    lb = log_binomial(n, d)
    K = cfg.K
    return {
        "trivial": 0.5 * lb,
        "sidon": 0.5 * math.log(n) - cfg.C0 * math.sqrt(d * math.log(d)) + 0.5 * lb,
        "required": 0.5 * lb
        + math.log(n) / (2 * K - 2)
        - math.log(cfg.C)
        - (K + 1) / (2 * K - 2) * math.log(d),
    }


def aa_regimes(n: int, cfg: BoundConfig | None = None) -> AARegimeRow:
    """Regime summary for one n, sampled at the crossover degree d*."""
    cfg = cfg or BoundConfig()
    if n < 4:
        raise ValueError("need n >= 4")
    d_star = crossover_degree(n, cfg)
    b = aa_lower_bounds(n, d_star, cfg)
    return AARegimeRow(n, d_star, b["trivial"], b["sidon"], b["required"], d_star, n**cfg.epsilon)
