"""Coefficient norms, L2 norms and sup-norm estimates.

Sup-norms on the cube are exact (all 2^n vertices).  On the torus only
lower bounds are produced: every estimate is |P| at an explicit witness
point, found by multi-start gradient ascent of |P|^2 in the phase
variables or, for n <= 3, by a uniform phase grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .indexcomb import CapExceeded
from .polyform import CUBE, TORUS, UnimodularPolynomial, evaluate_formal, evaluate_many

EXHAUSTIVE_CAP = 24
GRID_MAX_N = 3
_CHUNK = 1 << 14


@dataclass
class SupNormEstimate:
    value: float
    witness_point: np.ndarray
    method: str
    restarts_used: int = 0
    iterations: int = 0
    certified_exact: bool = False
    witness_phases: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.certified_exact and self.method != "exhaustive":
            raise ValueError("only exhaustive estimates are certified")

    def to_dict(self) -> dict:
        w = np.asarray(self.witness_point)
        if np.iscomplexobj(w):
            witness = [[float(v.real), float(v.imag)] for v in w]
        else:
            witness = [int(v) for v in w]
        out = {
            "value": float(self.value),
            "witness": witness,
            "method": self.method,
            "certified_exact": self.certified_exact,
            "restarts_used": self.restarts_used,
            "iterations": self.iterations,
        }
        if self.witness_phases is not None:
            out["witness_phases"] = [float(t) for t in self.witness_phases]
        return out


def coeff_lp_norm(P: UnimodularPolynomial, p: float) -> float:
    """(sum |a_i|^p)^(1/p)."""
    if p <= 0:
        raise ValueError("p must be positive")
    mod = P.coefficients.moduli()
    if mod.size == 0:
        return 0.0
    if P.coefficients.unimodular:
        return float(mod.size) ** (1.0 / p)
    # scale out the max to keep large exponents finite
    top = mod.max()
    if top == 0:
        return 0.0
    return float(top * np.sum((mod / top) ** p) ** (1.0 / p))


def bh_exponent(d: int) -> float:
    return 2 * d / (d + 1)


def l2_norm_exact(P: UnimodularPolynomial) -> float:
    """||P||_2 on the torus, by orthonormality of monomials."""
    if P.domain != TORUS:
        raise ValueError("l2_norm_exact is for torus polynomials")
    return float(np.sqrt(np.sum(P.coefficients.moduli() ** 2)))


def l2_squared_monte_carlo(
    P: UnimodularPolynomial, samples: int = 100_000, seed: int = 0
) -> tuple[float, float]:
    """Mean of |P|^2 over uniform torus samples, with its standard error."""
    rng = np.random.default_rng(seed)
    vals = np.empty(samples)
    for start in range(0, samples, _CHUNK):
        m = min(_CHUNK, samples - start)
        z = np.exp(1j * rng.uniform(0, 2 * np.pi, size=(m, P.n)))
        vals[start : start + m] = np.abs(evaluate_many(P, z)) ** 2
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


def cube_vertices(n: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows are sign vectors; bit b of the row number set means x_{b+1} = -1."""
    stop = 1 << n if stop is None else stop
    rows = np.arange(start, stop, dtype=np.int64)[:, None]
    bits = (rows >> np.arange(n, dtype=np.int64)[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def supnorm_cube_exact(P: UnimodularPolynomial, cap: int = EXHAUSTIVE_CAP) -> SupNormEstimate:
    """max over all 2^n sign vectors of |P(x)|; certified."""
    if P.domain != CUBE:
        raise ValueError("exhaustive search is for cube polynomials")
    if P.n > cap:
        raise CapExceeded(1 << P.n, 1 << cap, "cube vertex search")
    best, best_x = -1.0, None
    total = 1 << P.n
    for start in range(0, total, _CHUNK):
        X = cube_vertices(P.n, start, min(total, start + _CHUNK))
        vals = np.abs(evaluate_many(P, X))
        r = int(np.argmax(vals))
        if vals[r] > best:
            best, best_x = float(vals[r]), X[r].copy()
    return SupNormEstimate(best, best_x, "exhaustive", certified_exact=True)


def supnorm_torus_grid(P: UnimodularPolynomial, m: int = 64) -> SupNormEstimate:
    """Best value over the uniform grid of m phases per coordinate (n <= 3)."""
    if P.n > GRID_MAX_N:
        raise CapExceeded(m**P.n, m**GRID_MAX_N, "phase grid")
    th1 = 2 * np.pi * np.arange(m) / m
    grid = np.stack(np.meshgrid(*([th1] * P.n), indexing="ij"), axis=-1).reshape(-1, P.n)
    vals = np.abs(evaluate_many(P, np.exp(1j * grid)))
    r = int(np.argmax(vals))
    z = np.exp(1j * grid[r])
    return SupNormEstimate(abs(evaluate_formal(P, z)), z, "grid", witness_phases=grid[r])


def _objective(theta, E, a):
    mono = np.exp(1j * (E @ theta))
    val = mono @ a
    grad = -2.0 * np.imag(np.conj(val) * ((mono * a) @ E))
    return abs(val) ** 2, grad


def _ascend(theta, E, a, max_iters, tol):
    f, g = _objective(theta, E, a)
    it = 0
    step = 0.5
    for it in range(1, max_iters + 1):
        gn2 = float(g @ g)
        if math.sqrt(gn2) < tol:
            break
        # the step carries over and doubles after success, so flat regions are left quickly;
        # the Armijo constant 1/2 rejects overshoot past the quadratic optimum
        while step > 1e-18:
            cand = theta + step * g
            fc, gc = _objective(cand, E, a)
            if fc >= f + 0.5 * step * gn2:
                break
            step *= 0.5
        else:
            break
        gain = fc - f
        theta, f, g = cand, fc, gc
        if gain <= 1e-15 * max(f, 1.0):
            break
        step = min(2.0 * step, 1e8)
    return theta, f, it


def supnorm_torus_estimate(
    P: UnimodularPolynomial,
    restarts: int = 16,
    max_iters: int = 500,
    tol: float = 1e-10,
    seed: int = 0,
    initial_phases=None,
) -> SupNormEstimate:
    """Multi-start phase ascent for max |P| on T^n; a certified lower bound only.

    Restart r starts from uniform phases drawn with seed ``seed + r``.  Extra
    starting points may be given in ``initial_phases``; the result is never
    below |P| at any of them, since each ascent is monotone.
    """
    if P.domain != TORUS and P.domain != CUBE:
        raise ValueError("unknown domain")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    E = P.exponent_matrix().astype(float)
    a = P.coefficient_array()
    starts = [np.random.default_rng(seed + r).uniform(0, 2 * np.pi, P.n) for r in range(restarts)]
    if initial_phases is not None:
        starts.extend(np.asarray(th, dtype=float) for th in initial_phases)
    best_f, best_th, total_iters = -1.0, None, 0
    for th0 in starts:
        th, f, it = _ascend(np.asarray(th0, dtype=float), E, a, max_iters, tol)
        total_iters += it
        if f > best_f:
            best_f, best_th = f, th
    best_th = np.mod(best_th, 2 * np.pi)
    z = np.exp(1j * best_th)
    return SupNormEstimate(
        abs(evaluate_formal(P, z)),
        z,
        "ascent",
        restarts_used=len(starts),
        iterations=total_iters,
        witness_phases=best_th,
    )


def bh_ratio(P: UnimodularPolynomial, est: SupNormEstimate) -> float:
    """||a||_{2d/(d+1)} / sup-estimate; an upper bound on the true ratio when est is a lower bound."""
    if est.value <= 0:
        raise ZeroDivisionError("sup-norm estimate is zero")
    return coeff_lp_norm(P, bh_exponent(P.d)) / est.value
