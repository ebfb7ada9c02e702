"""Checks for the kappa index, reference distribution, and decision rule."""

import math

import numpy as np
import pytest
from scipy import stats

from hetpop.errors import DataError, DegenerateDataError, DomainError
from hetpop.kappa_detect import (
    DetectionResult,
    ReferenceDistribution,
    detect,
    kappa,
    percentile_5,
    reference_distribution,
)
from hetpop.model_gen import BivariateSample, ModelSpec, generate_item_pair
from hetpop.pca_stats import component_scores, summarize
from hetpop.stochastics import box_muller, seed_stream

# asymptotic quadrant probability of a whitened bivariate normal:
# both independent standard components beyond 1 in absolute value
QUADRANT_P = math.erfc(1.0 / math.sqrt(2.0)) ** 2


def normal_sample(n, r, seed=123, stream=0):
    rng = seed_stream(seed, stream)
    z = rng.gen.standard_normal((n, 2))
    y2 = r * z[:, 0] + math.sqrt(1 - r * r) * z[:, 1]
    return BivariateSample(scores=np.column_stack([z[:, 0], y2]))


def naive_reference(r, sample, nruns, method, rng):
    """Pure-numpy twin of reference_distribution's per-run recipe."""
    n = sample.n
    s = math.sqrt(1.0 - r * r)
    if method == "bootstrap":
        stacked = np.concatenate([sample.scores[:, 0], sample.scores[:, 1]])
        pool = (stacked - stacked.mean()) / stacked.std(ddof=1)
    values = []
    for _ in range(nruns):
        if method == "parametric":
            u = rng.gen.random(2 * n)
            v = rng.gen.random(2 * n)
            z = box_muller(u, v).reshape(n, 2)
            y1 = z[:, 0]
            y2 = r * z[:, 0] + s * z[:, 1]
        else:
            ua = rng.gen.random(n)
            ub = rng.gen.random(n)
            ia = np.minimum((ua * pool.size).astype(np.int64), pool.size - 1)
            ib = np.minimum((ub * pool.size).astype(np.int64), pool.size - 1)
            y1 = pool[ia]
            y2 = r * pool[ia] + s * pool[ib]
        run = BivariateSample(scores=np.column_stack([y1, y2]))
        values.append(kappa(component_scores(run, summarize(run))).kappa)
    return np.array(values)


class TestKappa:
    def test_all_scores_at_origin(self):
        sample = normal_sample(50, 0.0)
        cs = component_scores(sample, summarize(sample))
        zeroed = type(cs)(c1=np.zeros(50), c2=np.zeros(50), eigenvalues=cs.eigenvalues, loadings=cs.loadings)
        assert kappa(zeroed).kappa == 0.0

    def test_hand_counted_scores(self):
        cs_cls = type(component_scores(normal_sample(10, 0.0), summarize(normal_sample(10, 0.0))))
        c1 = np.array([2.0, 0.5, -1.5, 1.01, -0.99])
        c2 = np.array([-2.0, 2.0, 1.5, -1.01, -3.00])
        value = kappa(cs_cls(c1=c1, c2=c2, eigenvalues=(1.0, 1.0), loadings=np.eye(2)))
        assert value.count == 3
        assert value.kappa == 3 / 5

    def test_exact_ratio(self):
        sample = normal_sample(997, 0.3)
        value = kappa(component_scores(sample, summarize(sample)))
        assert value.kappa == value.count / 997

    def test_invariant_to_column_swap_and_sign(self):
        base = normal_sample(2000, 0.45, seed=5)
        variants = [
            base.scores[:, ::-1],
            np.column_stack([-base.scores[:, 0], base.scores[:, 1]]),
            np.column_stack([base.scores[:, 0], -base.scores[:, 1]]),
            -base.scores,
        ]
        expected = kappa(component_scores(base, summarize(base))).count
        for scores in variants:
            sample = BivariateSample(scores=np.ascontiguousarray(scores))
            assert kappa(component_scores(sample, summarize(sample))).count == expected


class TestReferenceDistribution:
    def test_kernel_matches_naive_parametric(self):
        sample = normal_sample(200, 0.45)
        ref = reference_distribution(0.45, sample, nruns=50, method="parametric", rng=seed_stream(9, 1))
        twin_rng = seed_stream(9, 1)
        twin = naive_reference(0.45, sample, 50, "parametric", twin_rng)
        assert np.abs(ref.values - twin).max() <= 1.0 / 200 + 1e-12

    def test_kernel_matches_naive_bootstrap(self):
        sample = normal_sample(150, 0.30, seed=77)
        ref = reference_distribution(0.30, sample, nruns=40, method="bootstrap", rng=seed_stream(9, 2))
        twin_rng = seed_stream(9, 2)
        twin = naive_reference(0.30, sample, 40, "bootstrap", twin_rng)
        assert np.abs(ref.values - twin).max() <= 1.0 / 150 + 1e-12

    def test_stream_consumption_matches_naive(self):
        sample = normal_sample(64, 0.2)
        rng_a = seed_stream(4, 4)
        rng_b = seed_stream(4, 4)
        reference_distribution(0.2, sample, nruns=25, method="parametric", rng=rng_a)
        naive_reference(0.2, sample, 25, "parametric", rng_b)
        assert rng_a.gen.random() == rng_b.gen.random()

    def test_chunking_does_not_change_values(self, monkeypatch):
        import hetpop.kappa_detect as kd

        sample = normal_sample(300, 0.4)
        full = reference_distribution(0.4, sample, nruns=60, method="parametric", rng=seed_stream(6, 6))
        monkeypatch.setattr(kd, "_CHUNK_BYTES", 2 * 300 * 8 * 7)
        chunked = reference_distribution(0.4, sample, nruns=60, method="parametric", rng=seed_stream(6, 6))
        assert np.array_equal(full.values, chunked.values)

    def test_mean_near_quadrant_probability(self):
        sample = normal_sample(10000, 0.3)
        ref = reference_distribution(0.3, sample, nruns=50, method="parametric", rng=seed_stream(7, 0))
        assert abs(ref.values.mean() - QUADRANT_P) < 0.004

    def test_large_n_illustrative_scale(self):
        sample = normal_sample(100000, 0.451, seed=20210419)
        ref = reference_distribution(0.451, sample, nruns=100, method="parametric", rng=seed_stream(20210419, 1))
        assert abs(ref.values.mean() - QUADRANT_P) < 0.003
        assert percentile_5(ref) == pytest.approx(0.099, abs=0.005)

    def test_bootstrap_agrees_with_parametric_on_normal_data(self):
        sample = normal_sample(2000, 0.45, seed=31)
        par = reference_distribution(0.45, sample, nruns=200, method="parametric", rng=seed_stream(8, 0))
        boot = reference_distribution(0.45, sample, nruns=200, method="bootstrap", rng=seed_stream(8, 1))
        assert abs(par.values.mean() - boot.values.mean()) < 0.01

    def test_values_within_unit_interval(self):
        sample = normal_sample(100, 0.1)
        ref = reference_distribution(0.1, sample, nruns=30, method="bootstrap", rng=seed_stream(2, 2))
        assert ref.values.min() >= 0.0
        assert ref.values.max() <= 1.0

    def test_rejects_bad_arguments(self):
        sample = normal_sample(100, 0.2)
        with pytest.raises(DomainError):
            reference_distribution(0.2, sample, nruns=10, rng=seed_stream(0, 0))
        with pytest.raises(DomainError):
            reference_distribution(0.2, sample, nruns=50, method="magic", rng=seed_stream(0, 0))
        with pytest.raises(DomainError):
            reference_distribution(0.2, sample, nruns=50)
        with pytest.raises(DegenerateDataError):
            reference_distribution(1.0, sample, nruns=50, rng=seed_stream(0, 0))


class TestPercentile5:
    def test_ascending_five_hundred(self):
        sample = normal_sample(100, 0.2)
        values = np.arange(1, 501) / 1000.0
        shuffled = values.copy()
        np.random.default_rng(0).shuffle(shuffled)
        dist = ReferenceDistribution(values=shuffled, method="parametric", r_used=0.2, n=100)
        assert percentile_5(dist) == 0.025

    def test_twenty_runs_take_the_minimum(self):
        values = np.linspace(0.08, 0.12, 20)
        dist = ReferenceDistribution(values=values, method="parametric", r_used=0.2, n=100)
        assert percentile_5(dist) == values.min()

    def test_at_most_median_for_forty_plus_runs(self):
        values = seed_stream(5, 0).gen.random(41)
        dist = ReferenceDistribution(values=values, method="parametric", r_used=0.2, n=100)
        assert percentile_5(dist) <= np.median(values)

    def test_too_few_values_rejected(self):
        with pytest.raises(DomainError):
            ReferenceDistribution(values=np.full(5, 0.1), method="parametric", r_used=0.2, n=100)


class TestDetect:
    def test_heterogeneous_pair_is_flagged(self):
        sample = generate_item_pair(ModelSpec(q=2, lam=0.95, n=5000), seed_stream(20210419, 0))
        result = detect(sample, nruns=200, method="parametric", rng=seed_stream(20210419, 1))
        assert result.heterogeneous
        assert result.kappa_x < 0.08
        assert result.heterogeneous == (result.kappa_x < result.p05)

    def test_single_population_pair_is_not_flagged(self):
        sample = generate_item_pair(
            ModelSpec(q=1, lam=0.8, n=5000, mode="single_population"), seed_stream(101, 0)
        )
        result = detect(sample, nruns=200, method="parametric", rng=seed_stream(101, 1))
        assert not result.heterogeneous

    def test_tiny_sample_rejected(self):
        sample = BivariateSample(scores=np.array([[0.0, 1.0], [1.0, 0.0]]))
        with pytest.raises(DataError):
            detect(sample, nruns=20, rng=seed_stream(0, 0))

    def test_kappa_x_distribution_matches_reference_under_null(self):
        holder = normal_sample(250, 0.64)
        kappas = np.empty(1000)
        for i in range(1000):
            sample = generate_item_pair(
                ModelSpec(q=1, lam=0.8, n=250, mode="single_population"), seed_stream(55, i)
            )
            kappas[i] = kappa(component_scores(sample, summarize(sample))).kappa
        ref = reference_distribution(0.64, holder, nruns=1000, method="parametric", rng=seed_stream(56, 0))
        assert stats.ks_2samp(kappas, ref.values).pvalue > 0.01
