import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ifmsim import (
    Interval,
    RngSeed,
    chi_squared_quantile,
    clopper_pearson,
    inverse_regularized_incomplete_beta,
    make_stream,
    normal_quantile,
    normal_width_binomial,
    poisson_interval,
    regularized_incomplete_beta,
    sample_bernoulli,
    sample_categorical3,
    sample_poisson,
)

from _oracles import beta_inc_oracle, clopper_pearson_oracle, gamma_inc_oracle


class TestIncompleteBeta:
    @pytest.mark.parametrize("x", [0.0, 0.1, 0.5, 0.9, 1.0])
    def test_uniform_case(self, x):
        assert regularized_incomplete_beta(1, 1, x) == pytest.approx(x, abs=1e-14)

    def test_symmetric_midpoint(self):
        assert regularized_incomplete_beta(2, 2, 0.5) == pytest.approx(0.5, abs=1e-14)

    @pytest.mark.parametrize(
        "a,b,x", [(2, 3, 0.3), (0.5, 0.5, 0.2), (10, 4, 0.7), (37, 120, 0.25)]
    )
    def test_against_high_precision_oracle(self, a, b, x):
        assert regularized_incomplete_beta(a, b, x) == pytest.approx(
            beta_inc_oracle(a, b, x), abs=1e-10
        )

    @given(
        a=st.floats(min_value=0.5, max_value=50),
        b=st.floats(min_value=0.5, max_value=50),
        p=st.floats(min_value=1e-6, max_value=1 - 1e-6),
    )
    def test_inverse_round_trip(self, a, b, p):
        x = inverse_regularized_incomplete_beta(a, b, p)
        assert regularized_incomplete_beta(a, b, x) == pytest.approx(p, abs=1e-8)

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            regularized_incomplete_beta(0, 1, 0.5)
        with pytest.raises(ValueError):
            regularized_incomplete_beta(1, 1, 1.5)
        with pytest.raises(ValueError):
            inverse_regularized_incomplete_beta(1, -1, 0.5)


class TestChiSquaredQuantile:
    def test_two_dof_closed_form(self):
        assert chi_squared_quantile(0.975, 2) == pytest.approx(-2 * math.log(0.025), rel=1e-10)
        assert chi_squared_quantile(0.975, 2) == pytest.approx(7.3778, abs=5e-5)
        assert chi_squared_quantile(0.5, 2) == pytest.approx(-2 * math.log(0.5), rel=1e-10)

    def test_zero_probability(self):
        assert chi_squared_quantile(0.0, 5) == 0.0

    @pytest.mark.parametrize("p,dof", [(0.9, 1), (0.25, 7), (0.999, 40), (0.05, 200)])
    def test_against_incomplete_gamma_oracle(self, p, dof):
        q = chi_squared_quantile(p, dof)
        assert gamma_inc_oracle(dof / 2.0, q / 2.0) == pytest.approx(p, abs=1e-8)

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            chi_squared_quantile(1.0, 2)
        with pytest.raises(ValueError):
            chi_squared_quantile(0.5, 0)


class TestClopperPearson:
    def test_zero_of_one(self):
        iv = clopper_pearson(0, 1)
        assert iv.lower == 0.0
        assert iv.upper == pytest.approx(0.975, abs=1e-12)

    def test_boundary_conventions(self):
        assert clopper_pearson(5, 5).upper == 1.0
        assert clopper_pearson(0, 5).lower == 0.0

    def test_known_pair_against_tail_oracle(self):
        lower, upper = clopper_pearson_oracle(100)
        iv = clopper_pearson(50, 100)
        assert iv.lower == pytest.approx(lower[50], abs=1e-8)
        assert iv.upper == pytest.approx(upper[50], abs=1e-8)

    @pytest.mark.parametrize("m", [1, 2, 7, 40])
    def test_tail_oracle_all_counts(self, m):
        lower, upper = clopper_pearson_oracle(m)
        for k in range(m + 1):
            iv = clopper_pearson(k, m)
            assert iv.lower == pytest.approx(lower[k], abs=1e-8)
            assert iv.upper == pytest.approx(upper[k], abs=1e-8)

    @given(st.integers(min_value=1, max_value=300), st.floats(min_value=0.05, max_value=0.95))
    def test_width_non_increasing_in_m_at_fixed_ratio(self, m, ratio):
        k = round(ratio * m)
        w1 = clopper_pearson(k, m).width
        w2 = clopper_pearson(2 * k, 2 * m).width
        assert w2 <= w1 + 1e-12

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            clopper_pearson(3, 2)
        with pytest.raises(ValueError):
            clopper_pearson(0, 0)


class TestPoissonInterval:
    def test_zero_count(self):
        iv = poisson_interval(0)
        assert iv.lower == 0.0
        assert iv.upper == pytest.approx(-math.log(0.025), rel=1e-10)
        assert iv.upper == pytest.approx(3.6889, abs=5e-5)

    def test_normal_limit_width(self):
        k = 10_000
        iv = poisson_interval(k)
        z2 = 2 * normal_quantile(0.975)
        assert iv.width / math.sqrt(k) == pytest.approx(z2, rel=0.02)

    def test_tiny_coverage_collapses_to_count(self):
        iv = poisson_interval(5, coverage=1e-6)
        assert iv.width < 1.2
        assert iv.lower < 5 < iv.upper + 1.0

    def test_counts_validated(self):
        with pytest.raises(ValueError):
            poisson_interval(-1)


class TestNormalWidth:
    def test_reference_width(self):
        assert normal_width_binomial(0.5, 9604) == pytest.approx(0.02, abs=2e-5)

    def test_degenerate_probability(self):
        assert normal_width_binomial(0.0, 100) == 0.0

    def test_single_trial(self):
        assert normal_width_binomial(0.5, 1) == pytest.approx(1.96, abs=1e-3)

    def test_quantile_from_erfinv(self):
        assert normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)
        assert normal_quantile(0.5) == 0.0


class TestInterval:
    def test_validation(self):
        with pytest.raises(ValueError):
            Interval(0.5, 0.4, 0.95)
        with pytest.raises(ValueError):
            Interval(0.0, 1.0, 1.5)

    def test_width(self):
        assert Interval(0.25, 0.75, 0.95).width == 0.5


class TestSampling:
    def test_streams_reproducible(self):
        a = make_stream(42, 7).random(16)
        b = make_stream(42, 7).random(16)
        c = make_stream(42, 8).random(16)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)
        assert np.array_equal(RngSeed(42, 7).stream().random(16), a)

    def test_degenerate_categorical(self):
        rng = make_stream(1, 0)
        draws = sample_categorical3(rng, (1.0, 0.0, 0.0), size=1000)
        assert np.all(draws == 0)

    def test_bernoulli_mean(self):
        rng = make_stream(2024, 0)
        draws = sample_bernoulli(rng, 0.5, size=1_000_000)
        assert 0.498 <= draws.mean() <= 0.502

    def test_poisson_zero_mean(self):
        rng = make_stream(5, 1)
        assert np.all(sample_poisson(rng, 0.0, size=100) == 0)

    def test_unnormalized_vector_rejected(self):
        rng = make_stream(1, 0)
        with pytest.raises(ValueError):
            sample_categorical3(rng, (0.5, 0.5, 0.1))

    def test_scalar_draws(self):
        rng = make_stream(9, 3)
        x = sample_categorical3(rng, (0.2, 0.3, 0.5))
        assert x in (0, 1, 2)
        assert sample_bernoulli(make_stream(9, 4), 1.0) == 1
