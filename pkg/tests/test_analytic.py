"""Closed forms against quadrature references, power solver behavior,
and the symbol-error path."""

import math

import numpy as np
import pytest

from cogrelay.errors import Infeasible
from cogrelay.model import FadingLink as L, ModulationSpec, Scenario, mpsk_constants
from cogrelay.analytic import (PrimaryOutageInputs, SecondaryCdfInputs,
                               asep_scenario_a, cdf_scenario_a,
                               cdf_scenario_a_e2e, cdf_scenario_b,
                               outage_capacity, primary_outage,
                               relay_phase_outage, solve_relay_power,
                               solve_secondary_source_power)
from cogrelay import oracle

PRIM = PrimaryOutageInputs(
    e=L(2, 1.0), f=L(1, 0.8), g=L(2, 1.2), l=L(1, 0.9),
    gamma_bar_p=10.0, gamma_bar_s1=4.0, gamma_bar_s2=6.0,
    gamma_bar_r=5.0, threshold=1.0)

SEC = SecondaryCdfInputs(
    x=L(2, 1.1), w=L(1, 0.9), y=L(2, 0.8), z=L(1, 0.3), v=L(2, 0.25),
    gamma_bar_p=8.0, gamma_bar_s=6.0, gamma_bar_r=9.0)


def _prim(**overrides) -> PrimaryOutageInputs:
    fields = dict(e=PRIM.e, f=PRIM.f, g=PRIM.g, l=PRIM.l,
                  gamma_bar_p=PRIM.gamma_bar_p, gamma_bar_s1=PRIM.gamma_bar_s1,
                  gamma_bar_s2=PRIM.gamma_bar_s2, gamma_bar_r=PRIM.gamma_bar_r,
                  threshold=PRIM.threshold)
    fields.update(overrides)
    return PrimaryOutageInputs(**fields)


def _sec(**overrides) -> SecondaryCdfInputs:
    fields = dict(x=SEC.x, w=SEC.w, y=SEC.y, z=SEC.z, v=SEC.v,
                  gamma_bar_p=SEC.gamma_bar_p, gamma_bar_s=SEC.gamma_bar_s,
                  gamma_bar_r=SEC.gamma_bar_r)
    fields.update(overrides)
    return SecondaryCdfInputs(**fields)


class TestPrimaryOutage:
    def test_matches_quadrature(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            inp = _prim(
                e=L(int(rng.integers(1, 4)), float(rng.uniform(0.5, 2.0))),
                f=L(int(rng.integers(1, 4)), float(rng.uniform(0.5, 2.0))),
                g=L(int(rng.integers(1, 4)), float(rng.uniform(0.5, 2.0))),
                gamma_bar_p=float(rng.uniform(2.0, 20.0)),
                threshold=float(rng.uniform(0.3, 3.0)))
            assert primary_outage(inp) == pytest.approx(
                oracle.primary_outage_oracle(inp), rel=1e-6)

    def test_zero_threshold(self):
        assert primary_outage(_prim(threshold=0.0)) == 0.0

    def test_monotone_in_interference(self):
        vals = [primary_outage(_prim(gamma_bar_s1=s)) for s in (0.0, 1.0, 4.0, 10.0)]
        assert vals == sorted(vals)

    def test_relay_phase_matches_quadrature(self):
        assert relay_phase_outage(PRIM) == pytest.approx(
            oracle.relay_phase_outage_oracle(PRIM), rel=1e-6)

    def test_relay_phase_below_source_phase_at_equal_power(self):
        # one interferer instead of two with comparable links
        inp = _prim(gamma_bar_s1=5.0, gamma_bar_s2=5.0, gamma_bar_r=5.0)
        assert relay_phase_outage(inp) <= primary_outage(inp)


class TestPowerSolver:
    def test_fixed_point(self):
        for thr in (0.2, 0.4, 0.6):
            gs = solve_secondary_source_power(PRIM, thr, cap=500.0)
            out = primary_outage(_prim(gamma_bar_s1=gs, gamma_bar_s2=gs))
            assert out == pytest.approx(thr, abs=1e-9)

    def test_relay_fixed_point(self):
        gr = solve_relay_power(PRIM, 0.3, cap=500.0)
        assert relay_phase_outage(_prim(gamma_bar_r=gr)) == pytest.approx(
            0.3, abs=1e-9)

    def test_cap_binds_with_slack(self):
        cap = 0.5
        gs = solve_secondary_source_power(PRIM, 0.9, cap=cap)
        assert gs == cap
        out = primary_outage(_prim(gamma_bar_s1=cap, gamma_bar_s2=cap))
        assert out <= 0.9

    def test_infeasible(self):
        baseline = primary_outage(_prim(gamma_bar_s1=0.0, gamma_bar_s2=0.0))
        with pytest.raises(Infeasible):
            solve_secondary_source_power(PRIM, baseline / 2.0, cap=10.0)


class TestDirectionCdf:
    def test_matches_quadrature(self):
        for theta in (0.2, 1.0, 4.0):
            assert cdf_scenario_a(SEC, theta) == pytest.approx(
                oracle.cdf_oracle_scenario_a(SEC, theta), rel=1e-6)

    def test_zero_threshold(self):
        assert cdf_scenario_a(SEC, 0.0) == 0.0

    def test_saturates(self):
        assert cdf_scenario_a(SEC, 1e4) == pytest.approx(1.0, abs=1e-6)

    def test_monotone_in_theta(self):
        grid = np.linspace(0.0, 8.0, 50)
        vals = [cdf_scenario_a(SEC, float(t)) for t in grid]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_outage_drops_with_relay_power(self):
        lo = cdf_scenario_a(_sec(gamma_bar_r=5.0), 1.0)
        hi = cdf_scenario_a(_sec(gamma_bar_r=20.0), 1.0)
        assert hi < lo

    def test_outage_grows_with_interference(self):
        weak = cdf_scenario_a(_sec(z=L(1, 0.05)), 1.0)
        strong = cdf_scenario_a(_sec(z=L(1, 2.0)), 1.0)
        assert strong > weak


class TestEndToEndCdf:
    def test_matches_quadrature(self):
        ref = oracle.cdf_oracle_scenario_a_e2e(SEC, 1.3,
                                               oracle.QuadratureSpec(1e-7))
        assert cdf_scenario_a_e2e(SEC, 1.3) == pytest.approx(ref, rel=1e-6)

    def test_dominates_single_direction(self):
        # the two-direction outage can only exceed either direction alone
        for theta in (0.5, 1.5, 3.0):
            assert cdf_scenario_a_e2e(SEC, theta) >= cdf_scenario_a(SEC, theta) - 1e-12

    def test_monotone_in_theta(self):
        grid = np.linspace(0.0, 6.0, 50)
        vals = [cdf_scenario_a_e2e(SEC, float(t)) for t in grid]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def _relay_inputs(n, seed=0):
    rng = np.random.default_rng(seed)
    return [
        SecondaryCdfInputs(
            x=L(int(rng.integers(1, 4)), float(rng.uniform(0.5, 2.0))),
            w=L(int(rng.integers(1, 4)), float(rng.uniform(0.5, 2.0))),
            y=L(int(rng.integers(1, 4)), float(rng.uniform(0.5, 2.0))),
            z=L(1, 1.0), v=L(1, 1.0),
            gamma_bar_p=10.0, gamma_bar_s=8.0, gamma_bar_r=12.0)
        for _ in range(n)
    ]


class TestSelectionCdf:
    def test_matches_quadrature(self):
        for K in (1, 2, 3):
            inputs = _relay_inputs(K, seed=K)
            assert cdf_scenario_b(inputs, K, 1.5) == pytest.approx(
                oracle.selection_oracle(inputs, K, 1.5), rel=1e-5)

    def test_k1_collapse(self):
        inputs = _relay_inputs(1, seed=9)
        ref = oracle.selection_oracle(inputs, 1, 1.5, oracle.QuadratureSpec(1e-12))
        assert cdf_scenario_b(inputs, 1, 1.5) == pytest.approx(ref, rel=1e-10)

    def test_more_relays_never_hurt(self):
        inputs = _relay_inputs(3, seed=4)
        for theta in (0.3, 1.0, 3.0):
            vals = [cdf_scenario_b(inputs[:k], k, theta) for k in (1, 2, 3)]
            assert vals[0] >= vals[1] >= vals[2]

    def test_monotone_in_theta(self):
        inputs = _relay_inputs(2, seed=5)
        grid = np.linspace(0.0, 6.0, 50)
        vals = [cdf_scenario_b(inputs, 2, float(t)) for t in grid]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_zero_threshold(self):
        assert cdf_scenario_b(_relay_inputs(2), 2, 0.0) == 0.0


class TestDispatch:
    def test_scenario_a(self):
        assert outage_capacity(Scenario.A, SEC, 1.3) == pytest.approx(
            cdf_scenario_a_e2e(SEC, 1.3))
        assert outage_capacity(Scenario.A, SEC, 1.3, end_to_end=False) == \
            pytest.approx(cdf_scenario_a(SEC, 1.3))

    def test_scenario_b(self):
        inputs = _relay_inputs(2, seed=2)
        assert outage_capacity(Scenario.B, inputs, 1.3) == pytest.approx(
            cdf_scenario_b(inputs, 2, 1.3))


class TestAsep:
    MOD = mpsk_constants(4)

    def test_matches_kernel_quadrature(self):
        res = asep_scenario_a(SEC, self.MOD)
        assert not res.used_fallback
        assert res.value == pytest.approx(oracle.asep_oracle(SEC, self.MOD),
                                          rel=1e-5)

    def test_vanishing_relay_power_saturates(self):
        res = asep_scenario_a(_sec(gamma_bar_r=1e-9), self.MOD)
        assert res.value == pytest.approx(self.MOD.a / 2.0, abs=1e-4)

    def test_sharp_kernel_vanishes(self):
        sharp = ModulationSpec(4, 2.0, 1e6)
        assert asep_scenario_a(SEC, sharp).value < 1e-2

    def test_degenerate_poles_fall_back(self):
        # equal shape/gain ratio on both hops collapses two pole locations
        inp = _sec(x=L(2, 1.0), w=L(2, 1.0))
        res = asep_scenario_a(inp, self.MOD)
        assert res.used_fallback
        assert res.value == pytest.approx(oracle.asep_oracle(inp, self.MOD),
                                          rel=1e-5)

    def test_bpsk_below_qpsk(self):
        assert asep_scenario_a(SEC, mpsk_constants(2)).value < \
            asep_scenario_a(SEC, self.MOD).value
