import math

import numpy as np
import pytest

from ifmsim import (
    clopper_pearson,
    expected_loss_clopper_pearson,
    expected_loss_normal_binomial,
    expected_loss_normal_poisson,
    expected_loss_poisson_chi2,
    loss_curve,
    loss_peak,
    poisson_interval,
    probability_sweep,
    signal_derivative,
    signal_probabilities,
)
from ifmsim.precision import DerivativeWarning


class TestSignalProbabilities:
    def test_classical_closed_forms(self):
        p, pl = signal_probabilities("classical_transmission", None, 0.3)
        assert p == 0.3
        assert pl == 0.7

    def test_ifm_signals_share_loss(self):
        pr, plr = signal_probabilities("reference", 10, 0.5)
        ps, pls = signal_probabilities("sample", 10, 0.5)
        pl, pll = signal_probabilities("loss", 10, 0.5)
        assert plr == pls == pll
        assert pl == plr
        assert pr + ps + pl == pytest.approx(1.0, abs=1e-12)

    def test_unknown_signal_rejected(self):
        with pytest.raises(ValueError):
            signal_probabilities("noise", 10, 0.5)
        with pytest.raises(ValueError):
            signal_probabilities("reference", None, 0.5)


class TestSignalDerivative:
    def test_classical_is_exactly_one(self):
        for a in (0.0, 0.31, 1.0):
            assert signal_derivative(a, None, "classical_transmission") == 1.0

    def test_reference_slope_matches_dense_sweep_secant(self):
        rows = probability_sweep(10, [0.499, 0.501])
        secant = (rows[1].p_r - rows[0].p_r) / 0.002
        assert signal_derivative(0.5, 10, "reference") == pytest.approx(secant, rel=1e-3)

    def test_loss_signal_flat_at_peak_is_flagged(self):
        alpha_peak, _ = loss_peak(100)
        with pytest.warns(DerivativeWarning):
            d = signal_derivative(alpha_peak, 100, "loss")
        assert abs(d) < 1e-3

    def test_endpoints_use_one_sided_difference(self):
        with pytest.warns(DerivativeWarning, match="endpoint"):
            d = signal_derivative(1.0, 10, "reference")
        assert math.isfinite(d)


class TestNormalApproximations:
    def test_binomial_classical_midpoint(self):
        val = expected_loss_normal_binomial(0.5, 0.01, "classical_transmission")
        assert val == pytest.approx(19208, abs=1.0)

    def test_binomial_no_loss_at_full_transparency(self):
        with pytest.raises(ValueError):
            # P = alpha = 1 is outside the approximation's regime
            expected_loss_normal_binomial(1.0, 0.01, "classical_transmission")
        near_one = expected_loss_normal_binomial(1.0 - 1e-9, 0.01, "classical_transmission")
        assert near_one == pytest.approx(0.0, abs=1e-3)

    def test_quadratic_scaling_in_uncertainty(self):
        v1 = expected_loss_normal_binomial(0.5, 0.01, "classical_transmission")
        v2 = expected_loss_normal_binomial(0.5, 0.005, "classical_transmission")
        assert v2 / v1 == pytest.approx(4.0, rel=1e-12)

    def test_poisson_classical_midpoint_doubles_binomial(self):
        vb = expected_loss_normal_binomial(0.5, 0.01, "classical_transmission")
        vp = expected_loss_normal_poisson(0.5, 0.01, "classical_transmission")
        assert vp == pytest.approx(38416, abs=2.0)
        assert vp / vb == pytest.approx(2.0, rel=1e-12)

    def test_poisson_binomial_agree_for_small_signals(self):
        vb = expected_loss_normal_binomial(0.01, 0.001, "classical_transmission")
        vp = expected_loss_normal_poisson(0.01, 0.001, "classical_transmission")
        assert vp / vb == pytest.approx(1.0 / 0.99, rel=1e-9)

    def test_poisson_to_binomial_ratio_diverges_near_one(self):
        ratio = [
            expected_loss_normal_poisson(a, 0.001, "classical_transmission")
            / expected_loss_normal_binomial(a, 0.001, "classical_transmission")
            for a in (0.9, 0.99, 0.999)
        ]
        assert ratio[0] < ratio[1] < ratio[2]
        assert ratio[2] == pytest.approx(1.0 / (1 - 0.999), rel=1e-6)

    def test_poisson_rejects_loss_signal(self):
        with pytest.raises(ValueError):
            expected_loss_normal_poisson(0.5, 0.01, "loss", 10)


class TestClopperPearsonInversion:
    def test_classical_opaque_endpoint_is_finite(self):
        budget = expected_loss_clopper_pearson(0.0, 0.01, "classical_transmission")
        assert budget.m_required is not None
        # zero counts: the interval is [0, 1 - tail^(1/M)], inverted by hand
        m = budget.m_required
        assert clopper_pearson(0, m).width <= 0.01
        assert clopper_pearson(0, m - 1).width > 0.01
        assert budget.expected_lost == pytest.approx(m * 1.0)
        assert budget.flags == ()  # exact classical slope, no finite difference

    def test_minimality_of_trial_count(self):
        budget = expected_loss_clopper_pearson(0.5, 0.01, "classical_transmission")
        m = budget.m_required
        assert clopper_pearson(round(0.5 * m), m).width <= 0.01
        assert clopper_pearson(round(0.5 * (m - 1)), m - 1).width > 0.01

    def test_agrees_with_normal_approximation_in_bulk(self):
        for a in (0.3, 0.5, 0.7):
            cp = expected_loss_clopper_pearson(a, 0.01, "classical_transmission")
            normal = expected_loss_normal_binomial(a, 0.01, "classical_transmission")
            assert cp.expected_lost == pytest.approx(normal, rel=0.25)
            assert cp.expected_lost >= normal * 0.98  # conservative side

    def test_quadratic_scaling(self):
        v1 = expected_loss_clopper_pearson(0.4, 0.01, "classical_transmission").expected_lost
        v2 = expected_loss_clopper_pearson(0.4, 0.005, "classical_transmission").expected_lost
        assert 3.5 <= v2 / v1 <= 4.5

    def test_worst_case_count_is_wider(self):
        plain = expected_loss_clopper_pearson(0.37, 0.01, "reference", 10)
        worst = expected_loss_clopper_pearson(0.37, 0.01, "reference", 10, worst_case_count=True)
        assert worst.m_required >= plain.m_required

    def test_unbounded_at_flat_signal(self):
        alpha_peak, _ = loss_peak(100)
        budget = expected_loss_clopper_pearson(alpha_peak, 0.01, "loss", 100)
        assert "unbounded" in budget.flags
        assert budget.m_required is None
        assert budget.expected_lost == math.inf


class TestPoissonChi2Inversion:
    def test_minimality_of_mean_count(self):
        budget = expected_loss_poisson_chi2(0.5, 0.01, "classical_transmission")
        m = budget.m_required
        assert poisson_interval(round(0.5 * m)).width / m <= 0.01
        assert poisson_interval(round(0.5 * (m - 1))).width / (m - 1) > 0.01

    def test_poisson_exceeds_binomial(self):
        for a in (0.1, 0.5, 0.9):
            cp = expected_loss_clopper_pearson(a, 0.01, "classical_transmission")
            chi = expected_loss_poisson_chi2(a, 0.01, "classical_transmission")
            assert chi.expected_lost >= cp.expected_lost

    def test_rejects_loss_signal(self):
        with pytest.raises(ValueError):
            expected_loss_poisson_chi2(0.5, 0.01, "loss", 10)


class TestLossCurve:
    def test_single_point_matches_direct_inversion(self):
        (row,) = loss_curve("classical_transmission", None, 0.01, [0.5])
        direct = expected_loss_clopper_pearson(0.5, 0.01, "classical_transmission")
        assert row == direct

    def test_rows_align_with_grid(self):
        grid = [0.2, 0.5, 0.8]
        rows = loss_curve("reference", 10, 0.01, grid)
        assert [r.alpha for r in rows] == grid
        assert all(r.m_required is not None for r in rows)

    def test_poisson_statistics_selected(self):
        (row,) = loss_curve("classical_transmission", None, 0.01, [0.5], statistics="poisson")
        assert row == expected_loss_poisson_chi2(0.5, 0.01, "classical_transmission")

    def test_bad_statistics_rejected(self):
        with pytest.raises(ValueError):
            loss_curve("reference", 10, 0.01, [0.5], statistics="gaussian")

    def test_flagged_rows_survive_in_table(self):
        alpha_peak, _ = loss_peak(100)
        rows = loss_curve("loss", 100, 0.01, [0.3, alpha_peak])
        assert rows[0].m_required is not None
        assert "unbounded" in rows[1].flags
