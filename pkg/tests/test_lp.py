import random
from fractions import Fraction as F

import pytest

from aoiflow.lp import (
    EQ,
    INFEASIBLE,
    LE,
    OPTIMAL,
    TARGET_REACHED,
    UNBOUNDED,
    LinearProgram,
    format_lp,
    solve_lp,
    solve_lp_reaching,
)


def test_single_bound():
    lp = LinearProgram(1, [F(1)])
    lp.add_row({0: F(1)}, F(5, 3), LE)
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL
    assert sol.values == [F(5, 3)]
    assert sol.objective_value == F(5, 3)


def test_equality_split():
    lp = LinearProgram(2, [F(1), F(1)])
    lp.add_row({0: F(1), 1: F(1)}, F(1), EQ)
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL
    assert sol.objective_value == 1


def test_unbounded_detected():
    lp = LinearProgram(1, [F(1)])
    assert solve_lp(lp).status == UNBOUNDED


def test_infeasible_detected():
    lp = LinearProgram(1, [F(1)])
    lp.add_row({0: F(1)}, F(-1), LE)
    assert solve_lp(lp).status == INFEASIBLE


def test_contradicting_equalities():
    lp = LinearProgram(1, [F(0)])
    lp.add_row({0: F(1)}, F(2), EQ)
    lp.add_row({0: F(1)}, F(3), EQ)
    assert solve_lp(lp).status == INFEASIBLE


def test_upper_bounds_respected():
    lp = LinearProgram(2, [F(3), F(2)], upper_bounds={0: F(1, 2), 1: F(2)})
    lp.add_row({0: F(1), 1: F(1)}, F(2), LE)
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL
    assert sol.values[0] == F(1, 2)
    assert sol.objective_value == F(3, 2) + 2 * F(3, 2)


def test_exact_rationals_no_drift():
    # tiny coefficients that would smear under floating point
    lp = LinearProgram(2, [F(1, 3), F(1, 7)])
    lp.add_row({0: F(2, 5), 1: F(3, 11)}, F(1, 13), LE)
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL
    assert sol.objective_value == F(1, 13) / F(2, 5) * F(1, 3)


def test_degenerate_cycling_guard():
    # classic degenerate square; must terminate via the Bland switch
    lp = LinearProgram(4, [F(3, 4), F(-150), F(1, 50), F(-6)])
    lp.add_row({0: F(1, 4), 1: F(-60), 2: F(-1, 25), 3: F(9)}, F(0), LE)
    lp.add_row({0: F(1, 2), 1: F(-90), 2: F(-1, 50), 3: F(3)}, F(0), LE)
    lp.add_row({2: F(1)}, F(1), LE)
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL
    assert sol.objective_value == F(1, 20)


def test_target_reached_early_exit():
    lp = LinearProgram(2, [F(1), F(1)])
    lp.add_row({0: F(1)}, F(10), LE)
    lp.add_row({1: F(1)}, F(10), LE)
    sol = solve_lp_reaching(lp, F(5))
    assert sol.status in (TARGET_REACHED, OPTIMAL)
    assert sum(sol.values) >= 5
    full = solve_lp(lp)
    assert full.objective_value == 20


def test_solution_satisfies_rows_exactly():
    rng = random.Random(7)
    for _ in range(25):
        n = rng.randint(2, 5)
        lp = LinearProgram(n, [F(rng.randint(-3, 5)) for _ in range(n)])
        for _ in range(rng.randint(1, 4)):
            coeffs = {
                j: F(rng.randint(1, 6), rng.randint(1, 4))
                for j in rng.sample(range(n), rng.randint(1, n))
            }
            lp.add_row(coeffs, F(rng.randint(0, 8)), LE)
        sol = solve_lp(lp)
        assert sol.status in (OPTIMAL, UNBOUNDED)
        if sol.status != OPTIMAL:
            continue
        for coeffs, rhs, sense in lp.rows:
            lhs = sum(sol.values[j] * c for j, c in coeffs.items())
            assert lhs <= rhs
        assert all(v >= 0 for v in sol.values)


def test_matches_float_solver_on_random_programs():
    scipy = pytest.importorskip("scipy.optimize")
    rng = random.Random(11)
    for _ in range(20):
        n = rng.randint(2, 5)
        objective = [F(rng.randint(0, 5)) for _ in range(n)]
        lp = LinearProgram(n, objective)
        rows = rng.randint(1, 4)
        for _ in range(rows):
            coeffs = {
                j: F(rng.randint(1, 5))
                for j in rng.sample(range(n), rng.randint(1, n))
            }
            lp.add_row(coeffs, F(rng.randint(1, 9)), LE)
        for j in range(n):  # keep it bounded
            lp.add_row({j: F(1)}, F(10), LE)
        mine = solve_lp(lp)
        assert mine.status == OPTIMAL
        res = scipy.linprog(
            [-float(c) for c in objective],
            A_ub=[
                [float(coeffs.get(j, 0)) for j in range(n)]
                for coeffs, _, _ in lp.rows
            ],
            b_ub=[float(rhs) for _, rhs, _ in lp.rows],
            bounds=(0, None),
            method="highs",
        )
        assert res.status == 0
        assert abs(float(mine.objective_value) + res.fun) < 1e-7


def test_row_validation():
    lp = LinearProgram(1, [F(1)])
    with pytest.raises(ValueError):
        lp.add_row({3: F(1)}, F(1), LE)
    with pytest.raises(ValueError):
        lp.add_row({0: F(1)}, F(1), "ge")


def test_format_lp_mentions_rows_and_bounds():
    lp = LinearProgram(2, [F(1), F(2)], upper_bounds={1: F(7, 2)}, names=["a", "b"])
    lp.add_row({0: F(1), 1: F(-1, 3)}, F(4), LE)
    lp.add_row({0: F(1)}, F(2), EQ)
    text = format_lp(lp)
    assert "Maximize" in text and "Subject To" in text
    assert "1/3 b" in text and "<= 4" in text and "= 2" in text
    assert "0 <= b <= 7/2" in text
