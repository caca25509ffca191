import random

import pytest
from mpmath import mp, mpf

from partition_well.model import BOSON, FERMION, W_MINUS, W_PLUS, as_mpf
from partition_well.numerics import PrecisionExhausted, PrecisionPolicy
from partition_well.oracle import (
    OccupancySolution,
    locate_inflections,
    locate_minimum,
    net_force,
    occupancy,
    force_side,
    solve_alpha,
    sweep_curve,
)


class TestSolveAlpha:
    def test_boson_alpha_crossing_temperature(self):
        # at t = 6N/pi^2 the minus-side alpha crosses zero; the exact value
        # deviates only at the 1/sqrt(N) relative scale
        t0_minus = 600 / mp.pi ** 2
        sol = solve_alpha(BOSON, W_MINUS, 100, t0_minus)
        assert abs(sol.alpha) < mpf("0.02")

    def test_fermion_two_level_regime(self):
        sol = solve_alpha(FERMION, W_MINUS, 100, 50)
        expected = -mpf("202.01")
        assert abs(sol.alpha - expected) / abs(expected) < mpf("0.01")

    def test_boson_alpha_grows_logarithmically(self):
        a6 = solve_alpha(BOSON, W_PLUS, 100, mpf("1e6")).alpha
        a7 = solve_alpha(BOSON, W_PLUS, 100, mpf("1e7")).alpha
        a8 = solve_alpha(BOSON, W_PLUS, 100, mpf("1e8")).alpha
        assert 0 < a6 < a7 < a8
        # d alpha / d ln t -> 1/2
        assert abs((a7 - a6) - mp.log(10) / 2) < mpf("0.1")
        assert abs((a8 - a7) - mp.log(10) / 2) < mpf("0.02")

    def test_fugacity_field_consistent(self):
        sol = solve_alpha(FERMION, W_PLUS, 7, mpf("3.5"))
        with mp.workdps(50):
            rel = abs(sol.q_fugacity - mp.e ** (-sol.alpha)) / sol.q_fugacity
            assert rel < mpf("1e-30")

    def test_deterministic(self):
        a = solve_alpha(BOSON, W_MINUS, 42, mpf("17.3"))
        b = solve_alpha(BOSON, W_MINUS, 42, mpf("17.3"))
        assert mp.nstr(a.alpha, 30) == mp.nstr(b.alpha, 30)
        assert a.n_trunc == b.n_trunc

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            solve_alpha(BOSON, W_MINUS, 0, 1.0)
        with pytest.raises(ValueError):
            solve_alpha(BOSON, W_MINUS, 10, -2.0)

    def test_precision_ceiling_reported(self):
        # an iteration budget too small to converge escalates until the
        # digit ceiling and then reports it
        policy = PrecisionPolicy(working_digits=20, max_digits=22,
                                 escalation_factor=1.1, max_iterations=4)
        with pytest.raises(PrecisionExhausted):
            solve_alpha(BOSON, W_MINUS, 100, 13.0, policy)


class TestConstraintResidual:
    @staticmethod
    def _recompute_number_sum(stat, side, alpha, t):
        # independent direct evaluation at elevated precision; b derived from
        # t inside the context so no low-precision rounding leaks in
        with mp.workdps(60):
            b = 1 / mpf(t)
            tau = as_mpf(side.tau)
            total = mpf(0)
            for n in range(1, 3 * 10 ** 6):
                x = alpha + b * (n - tau) ** 2
                if x > 90:
                    break
                total += 1 / (mp.e ** x - stat.eta)
            return total

    @pytest.mark.parametrize("stat,side,N,t", [
        (BOSON, W_MINUS, 100, "60.0"),
        (BOSON, W_PLUS, 3, "0.8"),
        (FERMION, W_MINUS, 50, "400.0"),
        (FERMION, W_PLUS, 120, "37.5"),
    ])
    def test_residual_within_certificate(self, stat, side, N, t):
        # the solver treats the incoming t as exact, so the recomputation
        # must reuse the identical mpf value
        t_mp = mpf(t)
        sol = solve_alpha(stat, side, N, t_mp)
        recomputed = self._recompute_number_sum(stat, side, sol.alpha, t_mp)
        assert abs(recomputed - N) <= sol.residual_bound + mpf("1e-20")

    def test_monotone_decreasing_in_alpha(self):
        rng = random.Random(3)
        for _ in range(10):
            stat = BOSON if rng.random() < 0.5 else FERMION
            side = W_PLUS if rng.random() < 0.5 else W_MINUS
            N = rng.randint(1, 150)
            t = mpf(10) ** rng.uniform(-1, 4)
            sol = solve_alpha(stat, side, N, t)
            # deep in the degenerate regime the sum only responds to alpha
            # shifts comparable to the Fermi-edge scale, so step with |alpha|
            up = max(mpf("0.1"), abs(sol.alpha) * mpf("0.05"))
            down = up
            if stat.is_boson:
                # keep the downward probe above the pole
                down = min(down, (sol.alpha + as_mpf(side.e1) / t) / 2)
            vals = [self._recompute_number_sum(stat, side, sol.alpha + da, t)
                    for da in (-down, mpf(0), up)]
            assert vals[0] > vals[1] > vals[2]

    def test_boson_pole_guard(self):
        for t in ("0.001", "1.0", "100.0"):
            sol = solve_alpha(BOSON, W_MINUS, 25, mpf(t))
            assert sol.alpha > -as_mpf(W_MINUS.e1) / mpf(t)


class TestOccupancy:
    def test_fermion_half_at_symmetric_point(self):
        sol = OccupancySolution(mpf(-4), mp.e ** 4, mpf(0), 1, 30, mpf(0))
        # alpha + b e_2 = -4 + 4 = 0 on the minus side at b = 1
        assert abs(occupancy(FERMION, W_MINUS, sol, 1, 2) - mpf("0.5")) < mpf("1e-25")

    def test_boson_unit_occupancy_at_log2(self):
        alpha = mp.log(2) - 1
        sol = OccupancySolution(alpha, mp.e ** (-alpha), mpf(0), 1, 30, mpf(0))
        assert abs(occupancy(BOSON, W_MINUS, sol, 1, 1) - 1) < mpf("1e-25")

    def test_boson_pole_rejected(self):
        sol = OccupancySolution(mpf(-2), mp.e ** 2, mpf(0), 1, 30, mpf(0))
        with pytest.raises(ValueError):
            occupancy(BOSON, W_MINUS, sol, 1, 1)

    def test_fermion_levels_straddling_fermi_edge(self):
        sol = solve_alpha(FERMION, W_MINUS, 100, 5)
        b = mpf(1) / 5
        n100 = occupancy(FERMION, W_MINUS, sol, b, 100)
        n101 = occupancy(FERMION, W_MINUS, sol, b, 101)
        assert abs(n100 + n101 - 1) < mpf("1e-2")

    def test_near_fermi_symmetry(self):
        # N_{N+l} ~= 1 - N_{N+1-l} at the oracle's alpha, N = 100, t = 0.3 N
        t = mpf(30)
        b = 1 / t
        for side in (W_PLUS, W_MINUS):
            sol = solve_alpha(FERMION, side, 100, t)
            for l in (1, 2, 3):
                up = occupancy(FERMION, side, sol, b, 100 + l)
                down = occupancy(FERMION, side, sol, b, 101 - l)
                assert abs(up + down - 1) < mpf("1e-2")

    def test_monotone_decreasing_in_level(self):
        sol = solve_alpha(BOSON, W_PLUS, 10, 7)
        b = mpf(1) / 7
        occs = [occupancy(BOSON, W_PLUS, sol, b, n) for n in range(1, 12)]
        assert all(a > b_ for a, b_ in zip(occs, occs[1:]))


class TestForces:
    def test_boson_plus_zero_t_limit(self):
        f, err = force_side(BOSON, W_PLUS, 100, mpf("1e-3"))
        assert abs(f - 25) < mpf("1e-6")
        assert err < mpf("1e-6")

    def test_fermion_minus_zero_t_limit(self):
        # sum of the lowest N levels: N(N+1)(2N+1)/6 = 338350 at N = 100
        f, _ = force_side(FERMION, W_MINUS, 100, mpf("1e-3"))
        assert abs(f - 338350) < mpf("1e-3")

    def test_single_boson(self):
        f, _ = force_side(BOSON, W_MINUS, 1, mpf("1e-4"))
        assert abs(f - 1) < mpf("1e-8")

    def test_net_force_zero_t_values(self):
        pb = net_force(BOSON, 100, mpf("1e-3"))
        assert abs(pb.delta_f - 75) < mpf("1e-6")
        pf = net_force(FERMION, 100, mpf("1e-3"))
        assert abs(pf.delta_f - 5025) < mpf("1e-3")

    def test_high_temperature_scaling(self):
        p = net_force(BOSON, 100, mpf("1e8"))
        lead = 50 * mp.sqrt(mpf("1e8") / mp.pi)
        assert abs(p.delta_f / lead - 1) < mpf("0.01")

    def test_halved_tolerance_self_consistency(self):
        from dataclasses import replace
        from partition_well.numerics import DEFAULT_POLICY
        base = net_force(FERMION, 50, mpf("800"))
        tight = net_force(FERMION, 50, mpf("800"),
                          replace(DEFAULT_POLICY, target_abs_error=5e-13))
        assert abs(base.delta_f - tight.delta_f) < base.delta_f_error

    def test_curve_point_fields_consistent(self):
        p = net_force(FERMION, 10, mpf("25"))
        assert abs(p.delta_f - (p.f_minus - p.f_plus)) < mpf("1e-20")
        assert p.delta_f > 0
        assert p.delta_f_error >= 0


class TestSweep:
    def test_singleton_matches_net_force(self):
        pts = sweep_curve(BOSON, 10, [mpf(2)])
        single = net_force(BOSON, 10, mpf(2))
        assert len(pts) == 1
        assert pts[0].delta_f == single.delta_f

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            sweep_curve(BOSON, 10, [1.0, 1.0])
        with pytest.raises(ValueError):
            sweep_curve(BOSON, 10, [-1.0, 2.0])

    @pytest.mark.parametrize("stat", [BOSON, FERMION])
    def test_interior_minimum_on_log_grid(self, stat):
        grid = [mpf(10) ** (mpf(-2) + mpf(8) * i / 16) for i in range(17)]
        pts = sweep_curve(stat, 100, grid)
        vals = [p.delta_f for p in pts]
        i_min = min(range(len(vals)), key=lambda i: vals[i])
        assert 0 < i_min < len(vals) - 1


class TestMinimumAndInflections:
    def test_boson_minimum_matches_brute_scan(self):
        t_min, df_min = locate_minimum(BOSON, 100)
        # independently brute-scanned location and value of the minimum
        assert abs(t_min / 100 - mpf("0.6175")) < mpf("0.002")
        assert abs(df_min / 100 - mpf("0.60972")) < mpf("1e-4")

    def test_window_without_minimum_detected(self):
        with pytest.raises(Exception) as info:
            locate_minimum(BOSON, 20, search_window=(mpf("2e4"), mpf("1e6")))
        assert "minimum" in str(info.value)

    def test_inflections_require_fermions(self):
        with pytest.raises(ValueError):
            locate_inflections(BOSON, 100)
