import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sidonlab.indexcomb import CapExceeded, binomial
from sidonlab.norms import (
    SupNormEstimate,
    bh_exponent,
    bh_ratio,
    coeff_lp_norm,
    cube_vertices,
    l2_norm_exact,
    l2_squared_monte_carlo,
    supnorm_cube_exact,
    supnorm_torus_estimate,
    supnorm_torus_grid,
)
from sidonlab.polyform import (
    CUBE,
    TORUS,
    cube_polynomial,
    evaluate,
    general_polynomial,
    random_general,
    random_unimodular,
    torus_polynomial,
)


def all_plus(n, d):
    return cube_polynomial(n, d, {key: 1 for key in itertools.combinations(range(1, n + 1), d)})


def brute_cube_max(P):
    return max(
        abs(sum(a.real * math.prod(x[v - 1] for v in key) for key, a in P.coefficients.entries.items()))
        for x in itertools.product((1, -1), repeat=P.n)
    )


# ---- coefficient norms


def test_coeff_norm_examples():
    P = random_unimodular(3, 2, TORUS, np.random.default_rng(0))
    assert coeff_lp_norm(P, 4 / 3) == pytest.approx(6 ** (3 / 4))
    assert coeff_lp_norm(P, 2) == pytest.approx(math.sqrt(6))
    assert coeff_lp_norm(torus_polynomial(3, 2, {(1, 2): 0.3}), 4 / 3) == 1


def test_coeff_norm_general_matches_direct_sum():
    P = random_general(4, 3, TORUS, np.random.default_rng(1))
    p = bh_exponent(3)
    direct = sum(abs(a) ** p for a in P.coefficients.entries.values()) ** (1 / p)
    assert coeff_lp_norm(P, p) == pytest.approx(direct, rel=1e-13)
    with pytest.raises(ValueError):
        coeff_lp_norm(P, 0)


def test_bh_exponent():
    assert bh_exponent(1) == 1
    assert bh_exponent(3) == pytest.approx(1.5)


# ---- L2


def test_l2_exact_examples():
    P = random_unimodular(3, 2, TORUS, np.random.default_rng(0))
    assert l2_norm_exact(P) == pytest.approx(math.sqrt(6))
    Z = general_polynomial(3, 2, TORUS, {})
    assert l2_norm_exact(Z) == 0


def test_l2_monte_carlo_within_three_standard_errors():
    rng = np.random.default_rng(2)
    P = random_unimodular(3, 3, TORUS, rng)
    mean, se = l2_squared_monte_carlo(P, samples=100_000, seed=5)
    assert abs(mean - binomial(5, 3)) <= 3 * se


# ---- cube sup-norm


def test_cube_vertices_cover_all_signs():
    V = cube_vertices(3)
    assert V.shape == (8, 3)
    assert {tuple(v) for v in V} == set(itertools.product((1, -1), repeat=3))


def test_cube_sup_examples():
    assert supnorm_cube_exact(cube_polynomial(2, 2, {(1, 2): 1})).value == 1
    est = supnorm_cube_exact(all_plus(3, 2))
    assert est.value == 3
    assert list(est.witness_point) == [1, 1, 1]
    assert est.certified_exact and est.method == "exhaustive"
    mixed = cube_polynomial(3, 2, {(1, 2): 1, (1, 3): 1, (2, 3): -1})
    assert supnorm_cube_exact(mixed).value == brute_cube_max(mixed)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_cube_sup_matches_bruteforce(n, seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, n + 1))
    P = random_unimodular(n, d, CUBE, rng)
    est = supnorm_cube_exact(P)
    assert est.value == pytest.approx(brute_cube_max(P))
    assert abs(abs(evaluate(P, est.witness_point)) - est.value) <= 1e-9


def test_cube_sup_cap():
    with pytest.raises(CapExceeded):
        supnorm_cube_exact(cube_polynomial(30, 1, {(1,): 1}))


def test_l2_below_certified_cube_sup():
    rng = np.random.default_rng(3)
    for _ in range(10):
        P = random_unimodular(6, 3, CUBE, rng)
        l2 = math.sqrt(len(P.keys))
        assert l2 <= supnorm_cube_exact(P).value + 1e-12


# ---- torus sup-norm


@pytest.mark.parametrize(
    "P,want",
    [
        (torus_polynomial(3, 1, {(1,): 0, (2,): 0, (3,): 0}), 3.0),
        (torus_polynomial(2, 2, {(1, 2): 0.7}), 1.0),
        (torus_polynomial(2, 2, {(1, 1): 0.3, (2, 2): 2.0}), 2.0),
    ],
)
def test_torus_ascent_examples(P, want):
    est = supnorm_torus_estimate(P)
    assert est.value == pytest.approx(want, abs=1e-6)
    assert est.value <= want + 1e-12
    assert not est.certified_exact


def test_grid_oracle_agrees_with_ascent():
    rng = np.random.default_rng(4)
    for _ in range(5):
        P = random_unimodular(2, 3, TORUS, rng)
        g = supnorm_torus_grid(P, m=256).value
        a = supnorm_torus_estimate(P, restarts=16).value
        # the grid is a lower bound too; ascent from 16 starts should not lose to it by much
        assert a >= g - 1e-3


def test_grid_refuses_large_n():
    with pytest.raises(CapExceeded):
        supnorm_torus_grid(random_unimodular(4, 1, TORUS, np.random.default_rng(0)))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_witness_reproduces_value(seed):
    rng = np.random.default_rng(seed)
    P = random_general(3, 2, TORUS, rng)
    est = supnorm_torus_estimate(P, restarts=4, seed=seed % 1000)
    assert abs(abs(evaluate(P, est.witness_point)) - est.value) <= 1e-9
    assert np.allclose(np.abs(est.witness_point), 1.0)


def test_restart_monotonicity():
    P = random_unimodular(4, 3, TORUS, np.random.default_rng(8))
    vals = [supnorm_torus_estimate(P, restarts=r, seed=11).value for r in (1, 2, 4, 8, 16)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_seeded_ascent_never_below_seed_vertices():
    # cube polynomial viewed on the torus, seeded at every sign vector
    rng = np.random.default_rng(10)
    C = random_unimodular(4, 2, CUBE, rng)
    T = general_polynomial(4, 2, TORUS, C.coefficients.entries)
    seeds = [np.where(np.array(x) > 0, 0.0, np.pi) for x in itertools.product((1, -1), repeat=4)]
    est = supnorm_torus_estimate(T, restarts=1, initial_phases=seeds)
    assert est.value >= supnorm_cube_exact(C).value - 1e-9
    assert est.restarts_used == 17


def test_ascent_is_deterministic():
    P = random_unimodular(3, 3, TORUS, np.random.default_rng(12))
    a = supnorm_torus_estimate(P, seed=3)
    b = supnorm_torus_estimate(P, seed=3)
    assert a.value == b.value
    assert np.array_equal(a.witness_point, b.witness_point)


def test_certified_only_when_exhaustive():
    with pytest.raises(ValueError):
        SupNormEstimate(1.0, np.ones(1), "ascent", certified_exact=True)


# ---- BH ratio


def test_bh_ratio_examples():
    mono = cube_polynomial(3, 2, {(1, 3): -1})
    assert bh_ratio(mono, supnorm_cube_exact(mono)) == 1
    P = all_plus(3, 2)
    assert bh_ratio(P, supnorm_cube_exact(P)) == pytest.approx(3 ** (-1 / 4))


@pytest.mark.parametrize("n,d", [(4, 2), (5, 3), (6, 2)])
def test_bh_ratio_all_plus_formula(n, d):
    P = all_plus(n, d)
    sup = brute_cube_max(P)
    assert bh_ratio(P, supnorm_cube_exact(P)) == pytest.approx(binomial(n, d) ** ((d + 1) / (2 * d)) / sup)


def test_bh_ratio_zero_estimate():
    P = all_plus(2, 1)
    with pytest.raises(ZeroDivisionError):
        bh_ratio(P, SupNormEstimate(0.0, np.ones(2), "ascent"))
