"""Cost terms and the constrained formation optimizer."""
import numpy as np
import pytest

from sheetplan import (
    CostWeights,
    NoFeasibleFormation,
    ObstacleSpec,
    SafetyParams,
    cost_cross,
    cost_pass,
    cost_transport,
    indicators,
    optimize_formation,
    solve_equilibrium,
)
from sheetplan.geometry import FormationIndicators

from conftest import equilateral_formation, equilateral_layout

W = CostWeights()
TINY = CostWeights(l1=1.0, l2=1.0, l3=1e-300, l4=1e-300, l5=1e-300)


def sides_of(formation):
    r = formation.robot_positions
    n = len(r)
    return np.array([np.linalg.norm(r[i] - r[(i + 1) % n]) for i in range(n)])


class TestCostTerms:
    def test_transport_identity(self, triangle_layout):
        f = equilateral_formation(triangle_layout, 1.2)
        v_o = np.array([0.1, 0.2])
        assert cost_transport(f, f, v_o, v_o, W) == 0.0

    def test_transport_contact_term(self, triangle_layout):
        f = equilateral_formation(triangle_layout, 1.2)
        v_o = np.array([0.1, 0.2])
        got = cost_transport(f, f, v_o + [0.1, 0.0], v_o, W)
        assert got == pytest.approx(0.01, abs=1e-15)

    def test_transport_counts_ordered_pairs(self, triangle_layout):
        # independent expansion of the i != j sum: each unordered pair twice
        f1 = equilateral_formation(triangle_layout, 1.2)
        f2 = equilateral_formation(triangle_layout, 1.25)
        v_o = np.zeros(2)
        expected = 0.0
        r1, r2 = f1.robot_positions, f2.robot_positions
        for i in range(3):
            for j in range(i + 1, 3):
                d = np.linalg.norm(r2[i] - r2[j]) - np.linalg.norm(r1[i] - r1[j])
                expected += 2.0 * d * d
        assert cost_transport(f2, f1, v_o, v_o, W) == pytest.approx(expected, rel=1e-12)

    def test_pass_boundary(self):
        assert cost_pass(2.0, 2.0, W) == 0.0

    def test_pass_value(self):
        assert cost_pass(1.4856, 2.0, W) == pytest.approx(-0.26461, abs=1e-5)

    def test_pass_zero_weight(self):
        assert cost_pass(1.4856, 2.0, TINY) == pytest.approx(0.0, abs=1e-290)

    def test_cross_boundary(self):
        ind = FormationIndicators(W=1.5, D=1.4, L_min=1.2, d_obsmax=0.2, z_obsmax=0.05)
        ob = ObstacleSpec((0, 0), 0.1, 0.05)
        assert cost_cross(ind, ob, W) == 0.0

    def test_cross_value(self):
        ind = FormationIndicators(W=1.5, D=1.4, L_min=1.2, d_obsmax=1.1, z_obsmax=0.139)
        ob = ObstacleSpec((0, 0), 0.1, 0.05)
        assert cost_cross(ind, ob, W) == pytest.approx(-8.17921, abs=1e-5)

    def test_cross_zero_weight(self):
        ind = FormationIndicators(W=1.5, D=1.4, L_min=1.2, d_obsmax=1.1, z_obsmax=0.139)
        ob = ObstacleSpec((0, 0), 0.1, 0.05)
        assert cost_cross(ind, ob, TINY) == pytest.approx(0.0, abs=1e-290)

    def test_weights_must_be_positive(self):
        with pytest.raises(ValueError):
            CostWeights(l1=0.0)


@pytest.fixture(scope="module")
def carry_start():
    layout = equilateral_layout()
    return equilateral_formation(layout, 1.0)


@pytest.fixture(scope="module")
def low_obstacle_solution(carry_start):
    return optimize_formation(carry_start, ObstacleSpec((0, 0), 0.1, 0.05), 2.0)


@pytest.fixture(scope="module")
def tall_obstacle_solution(carry_start):
    return optimize_formation(carry_start, ObstacleSpec((0, 0), 0.2, 0.2), 2.0)


class TestOptimizeFormation:
    def test_low_obstacle_matches_measured_formation(self, low_obstacle_solution):
        # measured crossing formation: sides 1.04/1.04/1.05 m, height 9.0 cm
        sol = low_obstacle_solution
        assert sol.mode == "crossing"
        assert np.all(np.abs(sides_of(sol.formation) - 1.04) < 0.05)
        assert sol.equilibrium.z == pytest.approx(0.09, abs=2e-3)

    def test_tall_obstacle_matches_measured_formation(self, tall_obstacle_solution):
        # measured crossing formation: sides 1.30/1.29/1.24 m, height 23.4 cm
        sol = tall_obstacle_solution
        assert sol.mode == "crossing"
        assert np.all(np.abs(sides_of(sol.formation) - 1.28) < 0.05)
        assert sol.equilibrium.z == pytest.approx(0.24, abs=2e-3)

    def test_constraints_satisfied_exactly(self, low_obstacle_solution, tall_obstacle_solution):
        for sol, ob in (
            (low_obstacle_solution, ObstacleSpec((0, 0), 0.1, 0.05)),
            (tall_obstacle_solution, ObstacleSpec((0, 0), 0.2, 0.2)),
        ):
            ind = sol.indicators
            assert ind.W <= 2.0 + 1e-9
            assert ob.z_obs <= ind.z_obsmax + 1e-9
            assert ob.d_obs <= ind.d_obsmax + 1e-9
            # taut-cable equality via solver round trip
            eq = solve_equilibrium(sol.formation)
            assert eq.taut_count == sol.formation.n
            assert abs(eq.z - sol.equilibrium.z) < 1e-9

    def test_determinism(self, carry_start):
        ob = ObstacleSpec((0, 0), 0.1, 0.05)
        a = optimize_formation(carry_start, ob, 2.0)
        b = optimize_formation(carry_start, ob, 2.0)
        assert np.array_equal(a.formation.robot_positions, b.formation.robot_positions)
        assert a.j_trans == b.j_trans and a.j_cross == b.j_cross

    def test_monotone_improvement(self, triangle_layout):
        # start feasible (side 1.2 clears the low obstacle) and require the
        # search objective not to get worse
        initial = equilateral_formation(triangle_layout, 1.2)
        ob = ObstacleSpec((0, 0), 0.1, 0.05)
        safety = SafetyParams()
        sol = optimize_formation(initial, ob, 2.0)

        def search_objective(formation, eq, ind, v_o0):
            j = cost_transport(formation, initial, eq.sheet_contact, v_o0, W)
            j += -W.l3 * (2.0 - ind.W) ** 2
            j += W.l4 * (ind.z_obsmax - ob.z_obs) ** 2
            j += W.l5 * max(ob.d_obs - ind.d_obsmax, 0.0) ** 2
            return j

        eq0 = solve_equilibrium(initial)
        ind0 = indicators(initial, eq0.z, safety)
        j0 = search_objective(initial, eq0, ind0, eq0.sheet_contact)
        j1 = search_objective(sol.formation, sol.equilibrium, sol.indicators,
                              eq0.sheet_contact)
        assert j1 <= j0 + 1e-9

    def test_weight_sensitivity_direction(self, carry_start):
        # raising the height-penalty weight never lowers the achieved clearance
        ob = ObstacleSpec((0, 0), 0.1, 0.05)
        z1 = optimize_formation(carry_start, ob, 2.0, CostWeights()).indicators.z_obsmax
        z2 = optimize_formation(
            carry_start, ob, 2.0, CostWeights(l4=20.0)
        ).indicators.z_obsmax
        assert z2 >= z1 - 1e-9

    def test_infeasible_obstacle(self, carry_start):
        # taller than any reachable hang and wider than any side gap, with no
        # room to slip past: nothing works
        ob = ObstacleSpec((0, 0), 0.85, 0.76)
        with pytest.raises(NoFeasibleFormation):
            optimize_formation(carry_start, ob, 2.0)

    def test_bypass_mode(self, carry_start):
        # uncrossably tall but narrow, in a wide corridor: go around it
        ob = ObstacleSpec((0, 0), 0.1, 0.76)
        sol = optimize_formation(carry_start, ob, 4.0)
        assert sol.mode == "bypassing"
        assert sol.indicators.W <= 4.0 - ob.d_obs - 2 * 0.05 + 1e-9

    def test_reported_costs_keep_reward_signs(self, low_obstacle_solution):
        sol = low_obstacle_solution
        ob = ObstacleSpec((0, 0), 0.1, 0.05)
        assert sol.j_pass == pytest.approx(cost_pass(sol.indicators.W, 2.0, W))
        assert sol.j_cross == pytest.approx(cost_cross(sol.indicators, ob, W))
        assert sol.j_pass <= 0 and sol.j_cross <= 0
