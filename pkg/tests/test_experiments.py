"""Tests for experiment schedules, exponent fits, and report verdicts.

Fit expectations are checked on synthetic power laws where the exponent is
known exactly.  Experiment runners are exercised at reduced size; their
physics-level expectations live in the acceptance suite, so here the focus
is on structure, determinism, and offline verdict recomputation.
"""

import json
import math

import numpy as np
import pytest

from zakharov1d.experiments import (
    InflationSchedule,
    fit_exponent,
    proximity_estimate_params,
    recompute_verdicts,
    run_decoherence_cct,
    run_decoherence_exact,
    run_inflation,
    run_invariants,
    run_non_c2,
    run_norms,
    run_selftest,
)
from zakharov1d.reporting import report_json_text


class TestFitExponent:
    def test_exact_power_law(self):
        xs = [2.0, 4.0, 8.0, 16.0]
        slope, intercept, hw = fit_exponent([(x, 7.0 * x**3) for x in xs])
        assert abs(slope - 3.0) < 1e-12
        assert abs(intercept - math.log(7.0)) < 1e-12
        assert hw < 1e-10

    def test_constant_series(self):
        slope, _, hw = fit_exponent([(x, 5.0) for x in (1.0, 2.0, 4.0)])
        assert abs(slope) < 1e-12
        assert hw < 1e-10

    def test_noise_within_half_width(self):
        rng = np.random.default_rng(42)
        xs = np.geomspace(1.0, 64.0, 12)
        ys = 3.0 * xs**0.5 * np.exp(rng.normal(0.0, 0.01, xs.size))
        slope, _, hw = fit_exponent(zip(xs, ys))
        assert abs(slope - 0.5) <= hw

    def test_needs_three_samples(self):
        with pytest.raises(ValueError, match="at least 3"):
            fit_exponent([(1.0, 1.0), (2.0, 2.0)])

    def test_rejects_nonpositive_and_nonfinite(self):
        with pytest.raises(ValueError, match="finite and positive"):
            fit_exponent([(1.0, 1.0), (2.0, 0.0), (4.0, 2.0)])
        with pytest.raises(ValueError, match="finite and positive"):
            fit_exponent([(1.0, 1.0), (2.0, float("inf")), (4.0, 2.0)])


class TestProximityEstimateParams:
    def test_strong_modulation_below_half(self):
        b1, k_prime = proximity_estimate_params(0.3)
        assert abs(b1 - 0.6) < 1e-15
        assert k_prime == 0.0

    def test_weak_modulation_above_half(self):
        b1, k_prime = proximity_estimate_params(0.5)
        assert (b1, k_prime) == (0.5, 0.0)
        b1, k_prime = proximity_estimate_params(1.0)
        assert (b1, k_prime) == (0.5, 0.25)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            proximity_estimate_params(0.0)
        with pytest.raises(ValueError):
            proximity_estimate_params(2.5)


class TestInflationSchedule:
    def test_direct_scheme_quarter_quarter(self):
        sch = InflationSchedule(k=0.25, s=0.25)
        assert sch.k_doubleprime is None
        assert sch.k_eff == 0.25
        assert sch.sigma == 0.25
        assert sch.s_prime == 0.25
        assert sch.expected_alpha == 0.25
        assert abs(sch.proximity_exponent - (-0.25)) < 1e-12

    def test_direct_scheme_above_quarter(self):
        sch = InflationSchedule(k=0.3, s=0.5)
        assert abs(sch.sigma - (0.3 / 3.0 + 1.0 / 6.0)) < 1e-12
        assert sch.s_prime == 0.5
        assert abs(sch.expected_alpha - 0.4) < 1e-12

    def test_routed_scheme_negative_k(self):
        sch = InflationSchedule(k=-0.2, s=0.3)
        assert abs(sch.k_doubleprime - 0.2) < 1e-12
        assert sch.k_eff == sch.k_doubleprime
        assert abs(sch.expected_alpha - 0.4) < 1e-12

    def test_routed_scheme_large_s(self):
        sch = InflationSchedule(k=-0.1, s=1.0)
        assert abs(sch.k_doubleprime - 0.625) < 1e-12
        assert abs(sch.sigma - 0.375) < 1e-12
        assert abs(sch.expected_alpha - 0.25) < 1e-12

    def test_routed_scheme_k_zero(self):
        sch = InflationSchedule(k=0.0, s=0.25)
        assert abs(sch.k_doubleprime - 0.1875) < 1e-12
        assert abs(sch.expected_alpha - 0.375) < 1e-12

    def test_rejects_k_at_or_above_one(self):
        with pytest.raises(ValueError, match="k >= 1"):
            InflationSchedule(k=1.0, s=2.0)

    def test_rejects_pairs_below_the_line(self):
        with pytest.raises(ValueError, match="2k - 1/2"):
            InflationSchedule(k=0.5, s=0.5)

    def test_rejects_s_outside_routed_band(self):
        with pytest.raises(ValueError, match="-1/2 < s < 3/2"):
            InflationSchedule(k=0.0, s=-0.5)
        with pytest.raises(ValueError, match="-1/2 < s < 3/2"):
            InflationSchedule(k=-0.3, s=1.5)

    def test_rejects_bad_n_list_and_window(self):
        with pytest.raises(ValueError, match="strictly increasing"):
            InflationSchedule(k=0.25, s=0.25, n_list=(16, 8))
        with pytest.raises(ValueError, match=">= 2"):
            InflationSchedule(k=0.25, s=0.25, n_list=(1, 8))
        with pytest.raises(ValueError, match="window"):
            InflationSchedule(k=0.25, s=0.25, window=0.0)


SMALL_SCHEDULE = dict(k=0.25, s=0.25, n_list=(8, 12, 16), window=0.5)


@pytest.fixture(scope="module")
def small_inflation_report():
    return run_inflation(InflationSchedule(**SMALL_SCHEDULE),
                         dt=0.5 / 96.0, fiber_nodes=33)


class TestRunInflation:
    def test_verdict_names(self, small_inflation_report):
        assert set(small_inflation_report.verdicts) == {
            "n_slope_in_window", "t_slope_linear", "proximity_trend",
            "oracle_consistency", "no_blowup",
        }

    def test_solver_tracks_oracle_at_reduced_size(self, small_inflation_report):
        fit = small_inflation_report.fits["oracle_consistency"]
        assert fit["worst_rel"] <= 0.25
        assert fit["N"] == 16

    def test_sample_times_follow_window(self, small_inflation_report):
        times = {row["t"] for row in small_inflation_report.samples
                 if row["N"] == 8.0 and row["norm_name"] == "density_hs"}
        assert times == {0.0625, 0.125, 0.25, 0.5}

    def test_inputs_echo_derived_exponents(self, small_inflation_report):
        inputs = small_inflation_report.inputs
        assert inputs["expected_alpha"] == 0.25
        assert inputs["sweep_n"] == 12
        assert inputs["dt_override"] == 0.5 / 96.0

    def test_runs_are_deterministic(self, small_inflation_report):
        again = run_inflation(InflationSchedule(**SMALL_SCHEDULE),
                              dt=0.5 / 96.0, fiber_nodes=33)
        assert report_json_text(again.to_document()) == report_json_text(
            small_inflation_report.to_document()
        )

    def test_recompute_verdicts_round_trip(self, small_inflation_report):
        doc = json.loads(report_json_text(small_inflation_report.to_document()))
        result = recompute_verdicts(doc)
        assert result["matches"] is True
        assert result["mismatches"] == []

    def test_recompute_flags_tampered_samples(self, small_inflation_report):
        doc = json.loads(report_json_text(small_inflation_report.to_document()))
        for row in doc["samples"]:
            if row["norm_name"] == "density_hs":
                row["value"] *= 1.5
        result = recompute_verdicts(doc)
        assert result["matches"] is False
        assert result["mismatches"]


class TestRunDecoherenceExact:
    def test_small_sweep_structure(self):
        rep = run_decoherence_exact(m_list=(25, 50), horizon=1.0, s=-2.0,
                                    delta=0.1, grid_points=4096, box_length=8.0)
        assert rep.fits["reported_m"]["M"] == 25
        assert rep.all_passed()

    def test_rejects_s_above_band(self):
        with pytest.raises(ValueError, match="s"):
            run_decoherence_exact(m_list=(25,), s=-1.0)


class TestRunDecoherenceCCT:
    def test_single_nu_without_separation(self):
        rep = run_decoherence_cct(nu_list=(0.2,), tau_horizon=0.25,
                                  include_separation=False,
                                  grid_points=1024, dt=2.5e-3)
        names = set(rep.verdicts)
        assert "defect_linear_bound" in names
        assert "separation_matches_closed_form" not in names
        assert rep.verdicts["defect_linear_bound"]["passed"]
        # single-nu runs cannot measure constant stability across nu
        assert "defect_constant_stable" not in names


class TestRunNonC2:
    def test_below_strip_structure(self):
        rep = run_non_c2(k=0.0, s=-1.0, variant="below_strip",
                         n_list=(8, 12, 16), t=0.4, refine=1, num_nodes=65)
        assert set(rep.verdicts) == {
            "n_slope_matches", "t_slope_linear", "closed_form_match",
        }
        assert rep.fits["n_slope"]["expected"] == 0.5

    def test_rejects_unknown_variant(self):
        with pytest.raises(ValueError, match="variant"):
            run_non_c2(k=0.0, s=-1.0, variant="sideways")


class TestRunNorms:
    def test_ratio_constant_across_band_limited_draws(self):
        rep = run_norms(draws=3)
        assert rep.all_passed()
        ratios = [row["value"] for row in rep.samples
                  if row["norm_name"] == "group_evolution_ratio"]
        assert len(ratios) == 3
        assert max(ratios) - min(ratios) <= 1e-4 * max(ratios)


class TestRunInvariants:
    def test_small_case_count_passes(self):
        rep = run_invariants(cases=10, seed=123)
        assert rep.all_passed()
        assert set(rep.verdicts) == {
            "parseval_defect", "roundtrip_defect", "group_isometry_defect",
            "simpson_cubic_defect", "mass_drift",
        }

    def test_seeded_runs_identical(self):
        a = run_invariants(cases=10, seed=123)
        b = run_invariants(cases=10, seed=123)
        assert report_json_text(a.to_document()) == report_json_text(b.to_document())

    def test_different_seed_changes_samples(self):
        a = run_invariants(cases=10, seed=123)
        b = run_invariants(cases=10, seed=124)
        assert report_json_text(a.to_document()) != report_json_text(b.to_document())
