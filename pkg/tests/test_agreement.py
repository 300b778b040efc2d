import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from methodagree.agreement import (
    AxisKind,
    Direction,
    PairedSample,
    ReplicatedSample,
    ReplicateRecord,
    WeightPair,
    WithinSubjectVariance,
    analyze,
    estimate_variances,
    general_covariance_identity,
    paired_from_replicates,
    predicted_covariance,
    weighted_average,
    within_subject_variance,
)
from methodagree.numerics import DegenerateDataError, covariance, variance


def make_replicates(groups):
    """groups: {(subject, method): [values]} -> ReplicatedSample"""
    records = []
    for (subject, method), values in groups.items():
        for i, v in enumerate(values, start=1):
            records.append(ReplicateRecord(subject, method, i, v))
    return ReplicatedSample(records=tuple(records))


def random_sample(rng, n=40, spread=1.0):
    truth = rng.normal(100.0, 15.0, size=n)
    return PairedSample(
        a=truth + rng.normal(0, spread, size=n),
        b=truth + rng.normal(0, spread, size=n),
    )


class TestDomainTypes:
    def test_paired_sample_defaults_ids(self):
        s = PairedSample(a=[1.0, 2.0, 3.0], b=[1.5, 2.5, 3.5])
        assert s.subject_ids == ("1", "2", "3")
        assert s.n == 3

    def test_paired_sample_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            PairedSample(a=[1, 2, 3], b=[1, 2])

    def test_paired_sample_too_small(self):
        with pytest.raises(ValueError, match="at least 3"):
            PairedSample(a=[1, 2], b=[1, 2])

    def test_paired_sample_nonfinite(self):
        with pytest.raises(ValueError):
            PairedSample(a=[1, 2, np.nan], b=[1, 2, 3])

    def test_replicated_requires_two_replicates(self):
        with pytest.raises(ValueError, match="at least 2"):
            make_replicates({("s1", "A"): [1.0], ("s1", "B"): [2.0, 3.0]})

    def test_replicated_requires_matching_subjects(self):
        with pytest.raises(ValueError, match="both methods"):
            make_replicates({("s1", "A"): [1.0, 2.0], ("s2", "B"): [2.0, 3.0]})

    def test_replicated_rejects_unknown_method(self):
        with pytest.raises(ValueError, match="method label"):
            make_replicates({("s1", "C"): [1.0, 2.0]})

    def test_variances_must_not_both_vanish(self):
        with pytest.raises(ValueError, match="degenerate weights"):
            WithinSubjectVariance(0.0, 0.0)
        with pytest.raises(ValueError):
            WithinSubjectVariance(-1.0, 2.0)

    def test_weight_pair_validation(self):
        with pytest.raises(ValueError):
            WeightPair(0.0, 0.0)
        with pytest.raises(ValueError):
            WeightPair(-1.0, 2.0)
        assert WeightPair.from_variances(WithinSubjectVariance(2.0, 8.0)) == WeightPair(
            alpha=8.0, beta=2.0
        )


class TestWithinSubjectVariance:
    def test_identical_replicates_give_zero(self):
        reps = make_replicates(
            {
                ("s1", "A"): [5.0, 5.0, 5.0],
                ("s2", "A"): [7.0, 7.0],
                ("s1", "B"): [1.0, 1.0],
                ("s2", "B"): [2.0, 2.0],
            }
        )
        assert within_subject_variance(reps, "A") == 0.0

    def test_single_subject_pair(self):
        reps = make_replicates({("s1", "A"): [1.0, 3.0], ("s1", "B"): [0.0, 0.0]})
        assert within_subject_variance(reps, "A") == pytest.approx(2.0)

    def test_pooling_two_subjects(self):
        # ((0-1)^2+(2-1)^2 + (10-12)^2+(14-12)^2) / (1+1) = (2+8)/2 = 5
        reps = make_replicates(
            {
                ("s1", "A"): [0.0, 2.0],
                ("s2", "A"): [10.0, 14.0],
                ("s1", "B"): [0.0, 0.0],
                ("s2", "B"): [0.0, 0.0],
            }
        )
        assert within_subject_variance(reps, "A") == pytest.approx(5.0)

    def test_estimate_both_methods(self):
        reps = make_replicates(
            {
                ("s1", "A"): [1.0, 3.0],
                ("s1", "B"): [10.0, 16.0],
            }
        )
        v = estimate_variances(reps)
        assert v.s_wa2 == pytest.approx(2.0)
        assert v.s_wb2 == pytest.approx(18.0)

    def test_estimator_sampling_distribution(self):
        # 50 seeded datasets with true within-subject variance 4: the mean
        # estimate must sit within 3 standard errors of the truth
        true_var = 4.0
        estimates = []
        for seed in range(50):
            rng = np.random.default_rng(9000 + seed)
            groups = {}
            for i in range(20):
                subject_truth = rng.normal(100, 10)
                groups[(f"s{i}", "A")] = list(
                    subject_truth + rng.normal(0, np.sqrt(true_var), size=3)
                )
                groups[(f"s{i}", "B")] = list(subject_truth + rng.normal(0, 1, size=3))
            estimates.append(within_subject_variance(make_replicates(groups), "A"))
        estimates = np.asarray(estimates)
        se = estimates.std(ddof=1) / np.sqrt(len(estimates))
        assert abs(estimates.mean() - true_var) < 3 * se

    def test_paired_from_replicates_uses_means(self):
        reps = make_replicates(
            {
                ("s1", "A"): [1.0, 3.0],
                ("s2", "A"): [4.0, 6.0],
                ("s3", "A"): [9.0, 11.0],
                ("s1", "B"): [2.0, 2.0],
                ("s2", "B"): [5.0, 7.0],
                ("s3", "B"): [10.0, 14.0],
            }
        )
        pairs = paired_from_replicates(reps)
        assert pairs.subject_ids == ("s1", "s2", "s3")
        np.testing.assert_allclose(pairs.a, [2.0, 5.0, 10.0])
        np.testing.assert_allclose(pairs.b, [2.0, 6.0, 12.0])


class TestWeightedAverage:
    def test_equal_variances_is_arithmetic_mean(self):
        v = WithinSubjectVariance(3.7, 3.7)
        assert weighted_average(10.0, 20.0, v) == pytest.approx(15.0)

    def test_error_free_method_takes_all_weight(self):
        v = WithinSubjectVariance(0.0, 5.0)
        assert weighted_average(12.0, 99.0, v) == 12.0

    def test_blood_pressure_style_weights(self):
        # (83.1*120 + 37.4*130) / 120.5 = 123.10373443983403 (direct evaluation)
        v = WithinSubjectVariance(37.4, 83.1)
        assert weighted_average(120.0, 130.0, v) == pytest.approx(
            123.10373443983403, rel=1e-14
        )

    def test_vectorized(self):
        v = WithinSubjectVariance(1.0, 3.0)
        out = weighted_average(np.array([0.0, 4.0]), np.array([4.0, 0.0]), v)
        np.testing.assert_allclose(out, [1.0, 3.0])

    @given(
        st.floats(-1e6, 1e6),
        st.floats(-1e6, 1e6),
        st.floats(1e-6, 1e6),
        st.floats(1e-6, 1e6),
        st.floats(1e-6, 1e6),
    )
    @settings(max_examples=100, deadline=None)
    def test_bounds_and_scale_invariance(self, a, b, swa2, swb2, lam):
        v = WithinSubjectVariance(swa2, swb2)
        w = weighted_average(a, b, v)
        assert min(a, b) - 1e-9 * (1 + abs(a) + abs(b)) <= w
        assert w <= max(a, b) + 1e-9 * (1 + abs(a) + abs(b))
        scaled = weighted_average(a, b, WithinSubjectVariance(lam * swa2, lam * swb2))
        assert scaled == pytest.approx(w, rel=1e-9, abs=1e-9)


class TestCovariancePredictions:
    def test_inverse_variance_weights_zero_out(self):
        v = WithinSubjectVariance(0.25, 20.25)
        w = WeightPair(alpha=v.s_wb2, beta=v.s_wa2)
        assert predicted_covariance(w, v) == 0.0

    def test_equal_weights_unequal_precision(self):
        v = WithinSubjectVariance(0.25, 20.25)
        assert predicted_covariance(WeightPair(1.0, 1.0), v) == pytest.approx(-10.0)

    def test_reference_method_limit(self):
        # all weight on method B: cov(a-b, b) = -s_wb2
        for s_wb2 in (0.5, 2.0, 83.1):
            v = WithinSubjectVariance(1.3, s_wb2)
            assert predicted_covariance(WeightPair(0.0, 1.0), v) == pytest.approx(
                -s_wb2
            )

    def test_direction_flips_sign(self):
        v = WithinSubjectVariance(0.25, 20.25)
        w = WeightPair(1.0, 1.0)
        assert predicted_covariance(w, v, Direction.B_MINUS_A) == pytest.approx(10.0)

    def test_identity_equal_weights(self):
        w = WeightPair(1.0, 1.0)
        assert general_covariance_identity(w, 5.0, 3.0, 123.0) == pytest.approx(1.0)

    def test_identity_single_method(self):
        # cov(A - B, A) = var(A) - cov(A, B)
        w = WeightPair(1.0, 0.0)
        assert general_covariance_identity(w, 5.0, 3.0, 2.0) == pytest.approx(3.0)

    @given(
        st.floats(0.0, 10.0),
        st.floats(0.1, 30.0),
        st.floats(0.0, 50.0),
        st.floats(0.0, 50.0),
        st.floats(0.0, 10.0),
        st.floats(0.0, 10.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_identity_reduces_to_error_variance_form(
        self, k, sigma_c, s_wa2, s_wb2, alpha, beta
    ):
        # decompose var/cov per a shared-component model: the identity must
        # collapse to the pure within-variance prediction
        if alpha + beta <= 0 or s_wa2 + s_wb2 <= 0:
            return
        w = WeightPair(alpha, beta)
        v = WithinSubjectVariance(s_wa2, s_wb2)
        common = k * k * sigma_c * sigma_c
        got = general_covariance_identity(w, common + s_wa2, common + s_wb2, common)
        assert got == pytest.approx(predicted_covariance(w, v), rel=1e-9, abs=1e-9)


class TestAnalyze:
    def test_loa_structure(self):
        rng = np.random.default_rng(1)
        res = analyze(random_sample(rng))
        sd = np.sqrt(variance(res.differences))
        assert res.loa_low == pytest.approx(res.bias - 1.96 * sd)
        assert res.loa_high == pytest.approx(res.bias + 1.96 * sd)
        assert res.loa_low <= res.bias <= res.loa_high

    def test_directions(self):
        rng = np.random.default_rng(2)
        sample = random_sample(rng)
        ab = analyze(sample, direction="a-b")
        ba = analyze(sample, direction="b-a")
        np.testing.assert_allclose(ab.differences, -ba.differences)
        assert ab.bias == pytest.approx(-ba.bias)
        assert ab.fit.slope == pytest.approx(-ba.fit.slope, rel=1e-12)

    def test_default_direction_is_b_minus_a(self):
        rng = np.random.default_rng(3)
        sample = random_sample(rng)
        res = analyze(sample)
        assert res.direction is Direction.B_MINUS_A
        np.testing.assert_allclose(res.differences, sample.b - sample.a)

    def test_classic_axis_is_plain_mean(self):
        rng = np.random.default_rng(4)
        sample = random_sample(rng)
        res = analyze(sample)
        np.testing.assert_allclose(res.axis_values, (sample.a + sample.b) / 2)
        assert res.axis is AxisKind.ARITHMETIC_MEAN
        assert res.weights is None

    def test_equal_variances_match_classic(self):
        rng = np.random.default_rng(5)
        sample = random_sample(rng)
        classic = analyze(sample)
        weighted = analyze(
            sample,
            axis="weighted",
            variances=WithinSubjectVariance(2.5, 2.5),
        )
        assert weighted.bias == pytest.approx(classic.bias, rel=1e-12, abs=1e-12)
        assert weighted.fit.slope == pytest.approx(classic.fit.slope, rel=1e-12)
        assert weighted.fit.r == pytest.approx(classic.fit.r, rel=1e-12)
        assert weighted.fit.p_value == pytest.approx(classic.fit.p_value, rel=1e-12)

    def test_weighted_needs_variances(self):
        rng = np.random.default_rng(6)
        with pytest.raises(ValueError, match="variances"):
            analyze(random_sample(rng), axis="weighted")

    def test_constant_axis_rejected(self):
        sample = PairedSample(a=[1.0, 2.0, 3.0], b=[3.0, 2.0, 1.0])
        with pytest.raises(DegenerateDataError, match="constant"):
            analyze(sample)  # all means are 2

    def test_sample_cov_matches_identity_on_own_moments(self):
        # plain algebra: cov(diff, mean) computed two ways must agree
        rng = np.random.default_rng(7)
        for _ in range(10):
            sample = random_sample(rng, n=25, spread=4.0)
            res = analyze(sample, direction="a-b")
            lhs = covariance(res.differences, res.axis_values)
            rhs = general_covariance_identity(
                WeightPair(1.0, 1.0),
                variance(sample.a),
                variance(sample.b),
                covariance(sample.a, sample.b),
            )
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_label_swap_with_direction_flip_is_invariant(self):
        rng = np.random.default_rng(8)
        sample = random_sample(rng)
        v = WithinSubjectVariance(1.5, 6.0)
        swapped = PairedSample(a=sample.b, b=sample.a, subject_ids=sample.subject_ids)
        v_swapped = WithinSubjectVariance(6.0, 1.5)
        res = analyze(sample, axis="weighted", direction="a-b", variances=v)
        res_sw = analyze(swapped, axis="weighted", direction="b-a", variances=v_swapped)
        assert res.bias == pytest.approx(res_sw.bias)
        assert res.loa_low == pytest.approx(res_sw.loa_low)
        assert res.loa_high == pytest.approx(res_sw.loa_high)
        assert res.fit.slope == pytest.approx(res_sw.fit.slope, rel=1e-12)
        assert res.fit.r == pytest.approx(res_sw.fit.r, rel=1e-12)
        assert res.fit.p_value == pytest.approx(res_sw.fit.p_value, rel=1e-12)
        np.testing.assert_allclose(res.axis_values, res_sw.axis_values)

    def test_points_property(self):
        rng = np.random.default_rng(9)
        res = analyze(random_sample(rng, n=5))
        assert res.points.shape == (5, 2)
        np.testing.assert_allclose(res.points[:, 0], res.axis_values)
        np.testing.assert_allclose(res.points[:, 1], res.differences)
