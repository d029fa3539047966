"""Homogeneous polynomials on the torus T^n and on the cube {-1, 1}^n.

Torus polynomials are keyed by non-decreasing index tuples (the monomial
z_{i1} ... z_{id}); cube polynomials by strictly increasing tuples (the
multilinear monomial x^S).  Index values are 1-based.

The symmetric d-linear form attached to P is never materialised: its
coefficient at an arbitrary j in M(d, n) is computed on demand as
a_{r(j)} / |[r(j)]|, with r the sorting rearrangement and a_{r(j)} = 0 when
r(j) is not a key.  On the cube keys are sets, so non-injective j get zero,
which is exactly the multilinear form with coefficients c_i = a_[i] / d!.
On the torus repeated values are allowed and carry the orbit weight instead.
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .indexcomb import (
    INCREASING,
    NONDECREASING,
    IndexSpace,
    MultiIndex,
    binomial,
    check_cap,
    combine,
    iter_values,
    orbit_size,
)

TORUS = "torus"
CUBE = "cube"
UNIMODULAR_TOL = 1e-12
TORUS_POINT_TOL = 1e-9


class PolynomialFormatError(ValueError):
    """A polynomial file or literal does not match the expected schema."""


@dataclass(frozen=True)
class CoefficientTable:
    space: IndexSpace
    entries: Mapping[tuple[int, ...], complex]
    unimodular: bool = False
    homogeneous: bool = True

    def __post_init__(self):
        entries = {tuple(key): complex(val) for key, val in self.entries.items()}
        object.__setattr__(self, "entries", entries)
        sp = self.space
        for key in entries:
            if self.homogeneous:
                ok = sp.contains(key)
            else:
                ok = len(key) <= sp.d and IndexSpace(len(key), sp.n, kind=sp.kind).contains(key)
            if not ok:
                raise ValueError(f"key {key} is not in the declared index space")
        if self.unimodular:
            bad = [key for key, val in entries.items() if abs(abs(val) - 1.0) > UNIMODULAR_TOL]
            if bad:
                raise ValueError(f"non-unimodular coefficients at {bad[:3]}")

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, key: Sequence[int]) -> complex:
        return self.entries.get(tuple(key), 0j)

    def moduli(self) -> np.ndarray:
        return np.abs(np.fromiter(self.entries.values(), dtype=complex, count=len(self.entries)))


@dataclass(frozen=True)
class UnimodularPolynomial:
    """Degree-d polynomial in n variables on the torus or the cube.

    The name reflects the main use; general coefficient tables are accepted
    (``coefficients.unimodular`` records which kind this is).
    """

    n: int
    d: int
    domain: str
    coefficients: CoefficientTable
    homogeneous: bool = True

    def __post_init__(self):
        if self.domain not in (TORUS, CUBE):
            raise ValueError(f"unknown domain {self.domain!r}")
        want = NONDECREASING if self.domain == TORUS else INCREASING
        sp = self.coefficients.space
        if sp.kind != want or sp.n != self.n or sp.d != self.d:
            raise ValueError("coefficient space does not match the polynomial's n, d, domain")
        if self.domain == CUBE and not self.homogeneous:
            raise ValueError("non-homogeneous polynomials are supported on the torus only")
        if self.homogeneous != self.coefficients.homogeneous:
            raise ValueError("homogeneous flag disagrees with the coefficient table")

    @property
    def keys(self) -> list[tuple[int, ...]]:
        return list(self.coefficients.entries)

    def coefficient_array(self) -> np.ndarray:
        return np.array(list(self.coefficients.entries.values()), dtype=complex)

    def index_array(self) -> np.ndarray:
        """Zero-based index matrix (K x d), short keys padded with n (a column of ones)."""
        keys = self.keys
        out = np.full((len(keys), self.d), self.n, dtype=np.intp)
        for r, key in enumerate(keys):
            out[r, : len(key)] = np.asarray(key, dtype=np.intp) - 1
        return out

    def exponent_matrix(self) -> np.ndarray:
        """K x n matrix of monomial exponents."""
        E = np.zeros((len(self.keys), self.n), dtype=np.int64)
        for r, key in enumerate(self.keys):
            for v in key:
                E[r, v - 1] += 1
        return E

    def __call__(self, point):
        return evaluate(self, point)


def _space(n: int, d: int, domain: str) -> IndexSpace:
    return IndexSpace(d, n, kind=NONDECREASING if domain == TORUS else INCREASING)


def torus_polynomial(
    n: int, d: int, phases: Mapping[Sequence[int], float], homogeneous: bool = True
) -> UnimodularPolynomial:
    """Unimodular torus polynomial with coefficient exp(i * phase) at each key."""
    entries = {tuple(key): cmath.exp(1j * float(th)) for key, th in phases.items()}
    table = CoefficientTable(_space(n, d, TORUS), entries, True, homogeneous)
    return UnimodularPolynomial(n, d, TORUS, table, homogeneous)


def cube_polynomial(n: int, d: int, signs: Mapping[Sequence[int], int]) -> UnimodularPolynomial:
    """Multilinear cube polynomial with +-1 coefficients."""
    for key, s in signs.items():
        if s not in (1, -1):
            raise ValueError(f"sign at {tuple(key)} must be +1 or -1, got {s}")
    entries = {tuple(key): complex(s) for key, s in signs.items()}
    table = CoefficientTable(_space(n, d, CUBE), entries, True)
    return UnimodularPolynomial(n, d, CUBE, table)


def general_polynomial(
    n: int, d: int, domain: str, coeffs: Mapping[Sequence[int], complex], homogeneous: bool = True
) -> UnimodularPolynomial:
    table = CoefficientTable(_space(n, d, domain), dict(coeffs), False, homogeneous)
    return UnimodularPolynomial(n, d, domain, table, homogeneous)


def full_support(n: int, d: int, domain: str) -> list[tuple[int, ...]]:
    return list(iter_values(_space(n, d, domain)))


def random_unimodular(n: int, d: int, domain: str, rng: np.random.Generator) -> UnimodularPolynomial:
    """Full-support polynomial with uniform random phases (torus) or signs (cube)."""
    keys = full_support(n, d, domain)
    if domain == TORUS:
        th = rng.uniform(0.0, 2 * math.pi, size=len(keys))
        return torus_polynomial(n, d, dict(zip(keys, th)))
    s = rng.choice([-1, 1], size=len(keys))
    return cube_polynomial(n, d, {key: int(v) for key, v in zip(keys, s)})


def random_general(
    n: int, d: int, domain: str, rng: np.random.Generator, density: float = 1.0
) -> UnimodularPolynomial:
    """Gaussian complex (torus) or real (cube) coefficients on a random support."""
    keys = [key for key in full_support(n, d, domain) if rng.random() < density]
    if not keys:
        keys = [full_support(n, d, domain)[0]]
    vals = rng.standard_normal(len(keys))
    if domain == TORUS:
        vals = vals + 1j * rng.standard_normal(len(keys))
    return general_polynomial(n, d, domain, dict(zip(keys, vals)))


# ---------------------------------------------------------------- evaluation


def evaluate_many(P: UnimodularPolynomial, points) -> np.ndarray:
    """Formal evaluation at the rows of an (m, n) array; no domain checks."""
    X = np.atleast_2d(np.asarray(points))
    if X.shape[1] != P.n:
        raise ValueError(f"points have {X.shape[1]} coordinates, polynomial has n={P.n}")
    if not P.keys:
        return np.zeros(X.shape[0], dtype=complex)
    Xp = np.hstack([X.astype(complex), np.ones((X.shape[0], 1), dtype=complex)])
    mono = Xp[:, P.index_array()].prod(axis=2)
    return mono @ P.coefficient_array()


def evaluate_formal(P: UnimodularPolynomial, point) -> complex:
    """P at an arbitrary complex vector (used for interior and scaled points)."""
    return complex(evaluate_many(P, np.asarray(point)[None, :])[0])


def evaluate(P: UnimodularPolynomial, point) -> complex:
    """P at a torus point (|z_i| = 1) or a cube vertex (x_i = +-1)."""
    z = np.asarray(point)
    if z.ndim != 1 or z.shape[0] != P.n:
        raise ValueError(f"point must have length n={P.n}")
    if P.domain == TORUS:
        if np.any(np.abs(np.abs(z) - 1.0) > TORUS_POINT_TOL):
            raise ValueError("torus points need unimodular coordinates")
    elif not np.all((z == 1) | (z == -1)):
        raise ValueError("cube points need +-1 coordinates")
    return evaluate_formal(P, z)


# ----------------------------------------------------------- symmetric form


def _distinct_permutations(values: Sequence[int]) -> Iterable[tuple[int, ...]]:
    return set(itertools.permutations(values))


@dataclass(frozen=True)
class SymmetricForm:
    """The symmetric d-linear form with diagonal equal to ``base``."""

    base: UnimodularPolynomial

    def coefficient(self, j: Sequence[int]) -> complex:
        key = tuple(sorted(j))
        a = self.base.coefficients.get(key)
        if a == 0:
            return 0j
        return a / orbit_size(key)

    def __call__(self, points) -> complex:
        return symmetric_form_value(self, points)


def symmetric_form_value(F: SymmetricForm, points) -> complex:
    """sum over j in M(d, n) of b_j prod_s points[s][j_s], walking only orbits of keys."""
    P = F.base
    if not P.homogeneous:
        raise ValueError("the symmetric form needs a homogeneous polynomial")
    Z = np.asarray(points, dtype=complex)
    if Z.shape != (P.d, P.n):
        raise ValueError(f"need {P.d} points of length {P.n}")
    check_cap(sum(orbit_size(key) for key in P.keys), "symmetric form expansion")
    total = 0j
    for key, a in P.coefficients.entries.items():
        b = a / orbit_size(key)
        for j in _distinct_permutations(key):
            total += b * math.prod(Z[s, v - 1] for s, v in enumerate(j))
    return total


# ---------------------------------------------------- extended coefficients

FLAT = "flat"
HAT = "hat"
C_RULE = "c"


@dataclass(frozen=True)
class ExtendedCoefficient:
    """Extension of a coefficient table from J(d, n) to pairs (i on S, j on S^).

    ``flat``: a_{r(i+j)} if i (+) j is injective, else 0.
    ``hat``:  first sort i and j (zero unless each is injective), then flat.
    ``c``:    hat divided by d!.
    """

    rule: str
    source: CoefficientTable

    def __post_init__(self):
        if self.rule not in (FLAT, HAT, C_RULE):
            raise ValueError(f"unknown extension rule {self.rule!r}")

    def __call__(self, i: MultiIndex, j: MultiIndex) -> complex:
        return extend_coefficient(self, i, j)


def _flat(table: CoefficientTable, values: Sequence[int]) -> complex:
    if len(set(values)) != len(values):
        return 0j
    return table.get(sorted(values))


def extend_coefficient(E: ExtendedCoefficient, i: MultiIndex, j: MultiIndex) -> complex:
    d = E.source.space.d
    if len(i) + len(j) != d:
        raise ValueError(f"|S| + |S^| must equal d={d}")
    if E.rule == FLAT:
        return _flat(E.source, combine(i, j).values)
    for part in (i.values, j.values):
        if len(set(part)) != len(part):
            return 0j
    merged = combine(
        MultiIndex(i.slots, tuple(sorted(i.values))), MultiIndex(j.slots, tuple(sorted(j.values)))
    )
    val = _flat(E.source, merged.values)
    if E.rule == C_RULE:
        val /= math.factorial(d)
    return val


def injective_completion_count(j: MultiIndex, d: int, n: int) -> int:
    """Size of J(S, n; j): increasing i on the d - |j| free slots with i (+) j injective."""
    return binomial(n - len(j), d - len(j))


# ------------------------------------------------------ mixed form, p(t)


def mixed_form(P: UnimodularPolynomial, x, y, k: int) -> complex:
    """L(x, ..., x, y, ..., y) with x in k slots and y in d - k slots.

    Each key contributes a_i / C(d, k) times the sum over k-subsets T of its
    positions of x^{i_T} y^{i minus T}.
    """
    if not P.homogeneous:
        raise ValueError("mixed form needs a homogeneous polynomial")
    d = P.d
    if not 0 <= k <= d:
        raise ValueError("need 0 <= k <= d")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    check_cap(len(P.keys) * binomial(d, k), "mixed form expansion")
    total = 0j
    positions = range(d)
    for key, a in P.coefficients.entries.items():
        acc = 0.0
        for T in itertools.combinations(positions, k):
            chosen = set(T)
            acc += math.prod(x[key[p] - 1] if p in chosen else y[key[p] - 1] for p in positions)
        total += a * acc
    return total / binomial(d, k)


def _as_real(value: complex) -> float | complex:
    return value.real if abs(value.imag) <= 1e-12 * max(1.0, abs(value.real)) else value


def polarization_coefficient(P: UnimodularPolynomial, x, y, k: int) -> tuple[complex, complex]:
    """(extracted, predicted) coefficient of t^k in p(t) = P(k t x + (d-k) y).

    The extracted value comes from interpolating p at d + 1 Chebyshev points
    of [-1, 1]; the predicted one is k^k (d-k)^(d-k) C(d, k) L_k(x, y).
    """
    d = P.d
    if not 1 <= k <= d - 1:
        raise ValueError("need 1 <= k <= d - 1")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    nodes = np.cos((2 * np.arange(d + 1) + 1) * np.pi / (2 * (d + 1)))
    pts = k * nodes[:, None] * x[None, :] + (d - k) * y[None, :]
    vals = evaluate_many(P, pts)
    cheb = np.polynomial.chebyshev.chebfit(nodes, vals, d)
    power = np.polynomial.chebyshev.cheb2poly(cheb)
    extracted = complex(power[k]) if k < len(power) else 0j
    predicted = k**k * (d - k) ** (d - k) * binomial(d, k) * mixed_form(P, x, y, k)
    return _as_real(extracted), _as_real(predicted)


# ------------------------------------------------ non-homogeneous lifting


def lift_nonhomogeneous(P: UnimodularPolynomial) -> UnimodularPolynomial:
    """Q(z, w) = sum_a c_a z^a w^(d - |a|), homogeneous in n + 1 variables."""
    if P.domain != TORUS:
        raise ValueError("lifting is defined for torus polynomials")
    n, d = P.n, P.d
    w = n + 1
    entries = {
        tuple(key) + (w,) * (d - len(key)): val for key, val in P.coefficients.entries.items()
    }
    table = CoefficientTable(_space(n + 1, d, TORUS), entries, P.coefficients.unimodular)
    return UnimodularPolynomial(n + 1, d, TORUS, table)


# ------------------------------------------------------------ file format


def polynomial_from_dict(obj: Mapping) -> UnimodularPolynomial:
    """Build a polynomial from the JSON object layout used by the CLI."""
    try:
        n, d, domain = int(obj["n"]), int(obj["d"]), obj["domain"]
        homogeneous = bool(obj.get("homogeneous", True))
        coeffs = obj["coefficients"]
    except (KeyError, TypeError, ValueError) as exc:
        raise PolynomialFormatError(f"missing or malformed header field: {exc}") from exc
    if domain not in (TORUS, CUBE):
        raise PolynomialFormatError(f"domain must be 'torus' or 'cube', got {domain!r}")
    phases: dict[tuple[int, ...], float] = {}
    signs: dict[tuple[int, ...], int] = {}
    general: dict[tuple[int, ...], complex] = {}
    for pos, item in enumerate(coeffs):
        where = f"coefficients[{pos}]"
        try:
            key = tuple(int(v) for v in item["index"])
        except (KeyError, TypeError, ValueError) as exc:
            raise PolynomialFormatError(f"{where}: bad or missing 'index'") from exc
        if key in phases or key in signs or key in general:
            raise PolynomialFormatError(f"{where}: duplicate index {list(key)}")
        if "phase" in item:
            phases[key] = float(item["phase"])
        elif "sign" in item:
            if item["sign"] not in (1, -1):
                raise PolynomialFormatError(f"{where}: sign must be +1 or -1")
            signs[key] = int(item["sign"])
        elif "re" in item or "im" in item:
            general[key] = complex(float(item.get("re", 0.0)), float(item.get("im", 0.0)))
        else:
            raise PolynomialFormatError(f"{where}: needs 'phase', 'sign' or 're'/'im'")
    try:
        if general or (phases and signs):
            merged = {**{k: cmath.exp(1j * t) for k, t in phases.items()}, **signs, **general}
            return general_polynomial(n, d, domain, merged, homogeneous)
        if domain == TORUS:
            return torus_polynomial(n, d, {**phases, **signs}, homogeneous)
        if phases:
            return general_polynomial(n, d, domain, {k: cmath.exp(1j * t) for k, t in phases.items()})
        return cube_polynomial(n, d, signs)
    except ValueError as exc:
        raise PolynomialFormatError(str(exc)) from exc


def parse_polynomial(text: str) -> UnimodularPolynomial:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        line = text.splitlines()[exc.lineno - 1] if text.splitlines() else ""
        raise PolynomialFormatError(
            f"JSON error at line {exc.lineno}, column {exc.colno}: {exc.msg}\n  {line}"
        ) from exc
    if not isinstance(obj, dict):
        raise PolynomialFormatError("top level must be a JSON object")
    return polynomial_from_dict(obj)


def load_polynomial(path) -> UnimodularPolynomial:
    with open(path, encoding="utf-8") as fh:
        return parse_polynomial(fh.read())


def polynomial_to_dict(P: UnimodularPolynomial) -> dict:
    items = []
    for key, val in sorted(P.coefficients.entries.items()):
        if P.domain == CUBE and P.coefficients.unimodular and val.imag == 0 and val.real in (1.0, -1.0):
            items.append({"index": list(key), "sign": int(val.real)})
        elif P.coefficients.unimodular:
            items.append({"index": list(key), "phase": cmath.phase(val)})
        else:
            items.append({"index": list(key), "re": val.real, "im": val.imag})
    return {
        "n": P.n,
        "d": P.d,
        "domain": P.domain,
        "homogeneous": P.homogeneous,
        "coefficients": items,
    }
