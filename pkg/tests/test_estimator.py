import math

import pytest

from ternisd.estimator import (
    CLeftRight,
    R_MAX,
    _template_layers,
    best_lam0,
    child_from_table,
    curve,
    curve_csv,
    dumer2_exponent,
    evaluate_plan,
    exponent_at,
    h2,
    h2_inv,
    InfeasibleError,
    LOG2_3,
    min_input_size,
    plan_structure,
    prange_exponent,
    rep_exponent,
    rep_plan_ledger,
    success_exponent_q3,
    wagner_exponent,
    wave_security,
    wgv_high,
    worst_case_exponent,
)
from ternisd.reps import Density


class TestWgvHigh:
    def test_endpoints(self):
        assert wgv_high(R_MAX) == pytest.approx(1.0, abs=1e-9)
        assert wgv_high(0.0) == pytest.approx(2 / 3, abs=1e-9)

    def test_defining_equation(self):
        for R in (0.05, 0.15, 0.25, 0.33, 0.36):
            W = wgv_high(R)
            assert W + h2(W) == pytest.approx((1 - R) * LOG2_3, abs=1e-10)

    def test_monotone_increasing_on_grid(self):
        # the defining equation forces W up as R grows: the right side
        # decreases while W + h2(W) decreases on [2/3, 1]
        prev = -1.0
        for i in range(100):
            R = R_MAX * (i + 0.5) / 100
            W = wgv_high(R)
            assert W > prev
            prev = W

    def test_undefined_beyond_rmax(self):
        with pytest.raises(InfeasibleError):
            wgv_high(0.40)


class TestPrange:
    def test_ternary_worst_point(self):
        assert prange_exponent(3, 0.369, 1.0).exponent == pytest.approx(0.369, abs=1e-3)

    def test_binary_worst_case(self):
        res = worst_case_exponent("prange", 2)
        assert res.exponent == pytest.approx(0.121, abs=1e-3)
        assert res.R == pytest.approx(0.454, abs=0.01)

    def test_typical_weight_is_polynomial(self):
        for R in (0.3, 0.5, 0.7):
            W = R + (2 / 3) * (1 - R)
            assert prange_exponent(3, R, W).exponent == pytest.approx(0.0, abs=1e-9)

    def test_infeasible_range(self):
        with pytest.raises(InfeasibleError):
            prange_exponent(3, 1.5, 0.5)


class TestSuccessExponent:
    def test_matches_counts_at_scale(self):
        # per-coordinate gap to the exact lgamma version is a vanishing
        # Stirling correction; check it at two scales
        from ternisd.pgess import success_prob_log2

        R, W, L = 0.45, 0.95, 0.08
        gaps = []
        for n in (600, 6000):
            k, w, ell = round(R * n), round(W * n), round(L * n)
            exact = success_prob_log2(n, k, ell, k + ell, w) / n
            approx = success_exponent_q3(k / n, w / n, ell / n)
            gaps.append(abs(approx - exact))
        assert gaps[1] < gaps[0] / 5
        assert gaps[1] < 1.5e-3

    def test_infeasible_window(self):
        assert success_exponent_q3(0.5, 0.8, 0.4) == float("-inf")


class TestWagner:
    def test_ternary_worst_point(self):
        res = wagner_exponent(0.369, 1.0)
        assert res.exponent == pytest.approx(0.269, abs=1e-3)

    def test_wave_point_bracket(self):
        res = wagner_exponent(0.676, 0.948366)
        assert 0.0176 <= res.exponent <= 0.0185
        assert res.params["ell"] == pytest.approx(0.060835, abs=0.002)

    def test_doom_never_worse(self):
        for z in (0.005, 0.02, 0.1):
            plain = wagner_exponent(0.676, 0.948366, grid_points=48).exponent
            doom = wagner_exponent(0.676, 0.948366, doom_z_log2=z, grid_points=48).exponent
            assert doom <= plain + 1e-9

    def test_infeasible_low_weight(self):
        with pytest.raises(InfeasibleError):
            wagner_exponent(0.5, 0.5)


class TestPlanEvaluator:
    PAPER = (0.7252, 0.251, 0.001, 0.254, 0.004, 0.131, 0.0)

    def test_conservation_identity_exact(self):
        st = plan_structure(_template_layers("t44", 7, self.PAPER))
        for lam0 in (0.016, 0.0176, 0.019, 0.022):
            cost, led = evaluate_plan(0.676, 0.948366, 0.060835, st, lam0)
            if led is None:
                continue
            gap = led.solutions + led.representations - led.waste - led.entries[0]
            assert abs(gap) < 1e-9

    def test_published_stage_accounting(self):
        # token-level numbers of the deep-stage plan at its published
        # constants: total solutions and per-solution representation count
        st = plan_structure(_template_layers("t44", 7, self.PAPER))
        _, led = evaluate_plan(0.676, 0.948366, 0.060835, st, 0.0176)
        assert led.solutions == pytest.approx(0.6404, abs=5e-4)
        assert led.representations == pytest.approx(0.4915, abs=6e-3)
        assert led.total_width == pytest.approx(0.0964, abs=5e-5)
        assert led.leaf_cap == pytest.approx(0.01042, abs=2e-4)

    def test_all_lr_structure_entropy(self):
        st = plan_structure([CLeftRight()] * 3)
        assert st.comp == pytest.approx((1.0, 0.5, 0.25, 0.125), abs=1e-12)
        assert all(not f for f in st.rep_level)

    def test_child_from_table_covers_published_densities(self):
        rho1 = child_from_table(Density(0.5, 0.0), 1.0, 0.0, 0.004)
        assert rho1.alpha == pytest.approx(0.251, abs=1e-9)
        assert rho1.beta == pytest.approx(0.001, abs=1e-9)


class TestRepExponent:
    def test_never_exceeds_plain_tree(self):
        for R, W in ((0.45, 0.95), (0.6, 0.93)):
            rep = rep_exponent(R, W, effort="min").exponent
            wag = wagner_exponent(R, W, grid_points=48).exponent
            assert rep <= wag + 1e-6

    def test_hard_point_stable_value(self):
        # the honest optimum of the layered-plan family at the unique-
        # solution corner; see notes on the published best-found 0.247
        res = rep_exponent(0.369, 1.0, effort="fast")
        assert 0.225 <= res.exponent <= 0.245
        assert res.params["template"] == "t44"

    def test_ledger_roundtrip(self):
        res = rep_exponent(0.676, 0.948366, effort="min")
        led = rep_plan_ledger(res.R, res.W, res.params)
        assert abs(led.solutions + led.representations - led.waste - led.entries[0]) < 1e-9

    def test_deterministic(self):
        a = rep_exponent(0.6, 0.93, effort="min")
        b = rep_exponent(0.6, 0.93, effort="min")
        assert a.exponent == b.exponent and a.params == b.params


class TestDumer2:
    def test_literature_worst_case(self):
        res = dumer2_exponent(0.447, h2_inv(1 - 0.447))
        assert res.exponent == pytest.approx(0.1164, abs=1e-3)


class TestOrdering:
    def test_rep_wagner_prange_order(self):
        R, W = 0.5, 0.96
        rep = rep_exponent(R, W, effort="min").exponent
        wag = wagner_exponent(R, W, grid_points=48).exponent
        pra = prange_exponent(3, R, W).exponent
        assert rep <= wag + 1e-6 <= pra + 2e-6


class TestMinInputSize:
    def test_prange_q3(self):
        ms = min_input_size("prange", 3)
        assert ms["kbits"] == pytest.approx(44.4, abs=1.0)
        assert ms["R_star"] == pytest.approx(R_MAX, abs=0.005)

    def test_bjmm_q2_is_reference_constant(self):
        ms = min_input_size("bjmm", 2)
        assert ms["reference_constant"]
        assert ms["kbits"] == 374.0


class TestWaveSecurity:
    def test_parameter_audit(self):
        ws = wave_security(7236, 4892, 6862, doom_z_log2=64.0)
        assert ws["security_bits"] >= 127.0
        assert ws["key_size_mb"] == pytest.approx(2.27, rel=0.02)
        assert ws["signature_kb"] == pytest.approx(1.434, rel=0.02)


class TestCurve:
    def test_wagner_monotone_at_half_rate(self):
        grid = [0.90 + 0.01 * i for i in range(11)]
        pts = curve(0.5, "wagner", grid)
        vals = [f for _, f in pts]
        for a, b in zip(vals, vals[1:]):
            assert b >= a - 1e-6

    def test_prange_peak_at_gv_boundary(self):
        R = 0.3
        Wstar = wgv_high(R)
        grid = sorted(set([2 / 3 + i * (1 - 2 / 3) / 40 for i in range(41)] + [Wstar]))
        pts = curve(R, "prange", grid)
        best_W = max(pts, key=lambda t: t[1])[0]
        assert best_W == pytest.approx(Wstar, abs=0.02)
        # at the boundary the expected solution count crosses one, so the
        # cost equals the unique-solution cost
        den_terms = ((1 - R) * LOG2_3, h2(Wstar) + Wstar)
        assert den_terms[0] == pytest.approx(den_terms[1], abs=1e-9)

    def test_csv_shape(self):
        pts = [(0.9, 0.123456), (1.0, 0.2)]
        text = curve_csv(pts, "prange", 0.3)
        lines = text.splitlines()
        assert lines[0] == "W,exponent,algorithm,R,q"
        assert lines[1] == "0.900000,0.123456,prange,0.300000,3"
        assert text.endswith("\n") and "\r" not in text
