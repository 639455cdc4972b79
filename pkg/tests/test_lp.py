"""Two-phase simplex: statuses, witnesses, determinism, and invariances."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from minimaxfit import LinearProgram, solve, solve_exact, verify_farkas


def test_minimize_above_lower_bound():
    sol = solve(LinearProgram([1.0], [([1.0], ">=", 3.0)]))
    assert sol.status == "optimal"
    assert sol.x[0] == pytest.approx(3.0, abs=1e-9)
    assert sol.objective_value == pytest.approx(3.0, abs=1e-9)


def test_conflicting_rows_are_infeasible_with_farkas():
    lp = LinearProgram([0.0], [([1.0], "<=", 1.0), ([1.0], ">=", 2.0)])
    sol = solve(lp)
    assert sol.status == "infeasible"
    assert sol.farkas is not None
    assert verify_farkas(lp, sol.farkas)


def test_free_unconstrained_minimization_is_unbounded():
    assert solve(LinearProgram([-1.0], [])).status == "unbounded"


def test_exact_empty_problem():
    sol = solve_exact(LinearProgram([0], []))
    assert sol.status == "optimal"
    assert sol.objective_value == 0


def test_exact_contradictory_equalities():
    lp = LinearProgram([0], [([1], "==", 1), ([1], "==", 2)])
    sol = solve_exact(lp)
    assert sol.status == "infeasible"
    assert verify_farkas(lp, sol.farkas, exact=True)


def test_exact_bivariate_moment_system_has_half_weights():
    # corners (1,1),(-1,-1) against (1,-1),(-1,1): matching the constant, x and
    # y moments forces all four convex weights to 1/2
    rows = [
        ([1, 1, 0, 0], "==", 1),
        ([0, 0, 1, 1], "==", 1),
        ([1, -1, -1, 1], "==", 0),
        ([1, -1, 1, -1], "==", 0),
    ]
    lp = LinearProgram([0, 0, 0, 0], rows, ((0, None),) * 4)
    sol = solve_exact(lp)
    assert sol.status == "optimal"
    assert sol.x == [Fraction(1, 2)] * 4


def _random_box_lp(rng: random.Random):
    """Box-constrained LP whose optimum is a known corner."""
    n = rng.randint(1, 4)
    los = [round(rng.uniform(-4, 0), 3) for _ in range(n)]
    his = [round(lo + rng.uniform(0.5, 3), 3) for lo in los]
    c = [round(rng.choice([-1, 1]) * rng.uniform(0.2, 2), 3) for _ in range(n)]
    corner = [lo if cj > 0 else hi for cj, lo, hi in zip(c, los, his)]
    rows = []
    for _ in range(rng.randint(0, 3)):  # redundant rows that keep the corner feasible
        a = [round(rng.uniform(-1, 1), 3) for _ in range(n)]
        rhs = sum(ai * xi for ai, xi in zip(a, corner)) + rng.uniform(0.1, 1)
        rows.append((a, "<=", rhs))
    lp = LinearProgram(c, rows, list(zip(los, his)))
    value = sum(ci * xi for ci, xi in zip(c, corner))
    return lp, value


def test_random_constructed_optima():
    rng = random.Random(7)
    for _ in range(60):
        lp, expected = _random_box_lp(rng)
        sol = solve(lp)
        assert sol.status == "optimal"
        assert abs(sol.objective_value - expected) <= 1e-8 * max(1.0, abs(expected))


def test_optimal_points_satisfy_rows_to_tolerance():
    rng = random.Random(11)
    for _ in range(40):
        lp, _ = _random_box_lp(rng)
        sol = solve(lp)
        for coeffs, rel, rhs in lp.rows:
            resid = sum(a * x for a, x in zip(coeffs, sol.x)) - rhs
            scale = max(1.0, max(abs(a) for a in coeffs), abs(rhs))
            assert resid <= 1e-9 * scale


def _random_rational_lp(rng: random.Random):
    n = rng.randint(1, 3)
    m = rng.randint(1, 4)
    rows = []
    for _ in range(m):
        coeffs = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)]
        rel = rng.choice(["<=", "==", ">="])
        rhs = Fraction(rng.randint(-8, 8), rng.randint(1, 3))
        rows.append((coeffs, rel, rhs))
    c = [Fraction(rng.randint(-3, 3)) for _ in range(n)]
    bounds = [(Fraction(-5), Fraction(5)) for _ in range(n)]  # keep it bounded
    return LinearProgram(c, rows, bounds)


def test_float_and_exact_agree_on_status():
    rng = random.Random(23)
    for _ in range(50):
        lp = _random_rational_lp(rng)
        float_lp = LinearProgram(
            [float(c) for c in lp.objective],
            [([float(a) for a in coeffs], rel, float(rhs)) for coeffs, rel, rhs in lp.rows],
            [(float(lo), float(hi)) for lo, hi in lp.bounds],
        )
        exact_status = solve_exact(lp).status
        assert solve(float_lp).status == exact_status


def test_determinism():
    rng = random.Random(3)
    lp, _ = _random_box_lp(rng)
    first = solve(lp)
    second = solve(lp)
    assert first.x == second.x and first.objective_value == second.objective_value


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.permutations([0, 1, 2]), st.lists(st.floats(0.1, 10), min_size=3, max_size=3))
def test_status_invariant_under_row_permutation_and_scaling(seed, perm, scales):
    rng = random.Random(seed)
    base = _random_rational_lp(rng)
    while len(base.rows) != 3:
        base = _random_rational_lp(rng)
    float_rows = [([float(a) for a in coeffs], rel, float(rhs)) for coeffs, rel, rhs in base.rows]
    lp = LinearProgram(
        [float(c) for c in base.objective],
        float_rows,
        [(float(lo), float(hi)) for lo, hi in base.bounds],
    )
    scrambled_rows = []
    for i in perm:
        coeffs, rel, rhs = float_rows[i]
        s = scales[i]
        scrambled_rows.append(([s * a for a in coeffs], rel, s * rhs))
    scrambled = LinearProgram(lp.objective, scrambled_rows, lp.bounds)
    assert solve(lp).status == solve(scrambled).status


def test_row_width_validation():
    with pytest.raises(ValueError):
        LinearProgram([1.0, 2.0], [([1.0], "<=", 0.0)])
    with pytest.raises(ValueError):
        LinearProgram([1.0], [([1.0], "<", 0.0)])
