"""Property-based checks for closed forms, whitening, and rank rules."""

import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hetpop.analytics import expected_correlation, expected_loading
from hetpop.errors import DegenerateDataError
from hetpop.kappa_detect import ReferenceDistribution, kappa, percentile_5
from hetpop.model_gen import BivariateSample
from hetpop.pca_stats import component_scores, summarize
from hetpop.stochastics import box_muller, seed_stream, uniform_open

qs = st.integers(min_value=1, max_value=50)
lams = st.floats(min_value=0.05, max_value=1.0)
phis = st.floats(min_value=0.0, max_value=0.99)
omegas = st.floats(min_value=0.0, max_value=5.0)


@given(qs, lams, phis, omegas)
def test_prediction_bounds_and_exact_split(q, lam, phi, omega):
    pred = expected_correlation(q, lam, phi, omega)
    assert 0.0 < pred.rho < 1.0
    assert pred.rho <= lam * lam / (1.0 + omega) + 1e-15
    assert pred.common_part >= 0.0
    assert pred.subpopulation_part > 0.0
    assert math.isclose(pred.common_part + pred.subpopulation_part, pred.rho,
                        rel_tol=1e-12, abs_tol=1e-300)


@given(qs, lams, phis, omegas)
def test_loading_squared_equals_predicted_correlation(q, lam, phi, omega):
    loading = expected_loading(q, lam, phi, omega)
    rho = expected_correlation(q, lam, phi, omega).rho
    assert math.isclose(loading * loading, rho, rel_tol=1e-12, abs_tol=0.0)


@given(qs, lams, phis, omegas)
def test_extra_populations_never_raise_the_correlation(q, lam, phi, omega):
    rho_q = expected_correlation(q, lam, phi, omega).rho
    rho_q1 = expected_correlation(q + 1, lam, phi, omega).rho
    assert rho_q1 <= rho_q + 1e-15


@given(qs, lams, phis, omegas)
def test_factor_correlation_never_lowers_the_correlation(q, lam, phi, omega):
    tighter = min(phi + 0.1, 0.99)
    rho_lo = expected_correlation(q, lam, phi, omega).rho
    rho_hi = expected_correlation(q, lam, tighter, omega).rho
    assert rho_hi >= rho_lo - 1e-15


@given(qs, lams, phis, omegas)
def test_mean_noise_only_attenuates(q, lam, phi, omega):
    rho = expected_correlation(q, lam, phi, omega).rho
    rho_noisier = expected_correlation(q, lam, phi, omega + 0.5).rho
    assert rho_noisier < rho


samples = arrays(
    np.float64,
    st.tuples(st.integers(5, 40), st.just(2)),
    elements=st.floats(-100.0, 100.0, allow_nan=False),
)


def _scores_or_skip(matrix):
    sample = BivariateSample(scores=np.ascontiguousarray(matrix), provenance=None)
    try:
        summary = summarize(sample)
        return summary, component_scores(sample, summary)
    except DegenerateDataError:
        assume(False)


@settings(deadline=None)
@given(samples)
def test_whitening_and_reconstruction(matrix):
    summary, cs = _scores_or_skip(matrix)
    assume(abs(summary.r) < 0.99)
    # centering a column whose spread is ULP-sized relative to its mean
    # cancels away the data; the contract targets sane inputs
    spread = min(summary.sd1, summary.sd2)
    scale = 1.0 + max(abs(summary.mean1), abs(summary.mean2))
    assume(spread > 1e-6 * scale)
    n = matrix.shape[0]
    for c in (cs.c1, cs.c2):
        assert abs(float(np.mean(c))) < 1e-10
        assert abs(float(np.var(c, ddof=1)) - 1.0) < 1e-8
    cross = float(np.dot(cs.c1, cs.c2) / (n - 1))
    assert abs(cross) < 1e-8

    z1 = (matrix[:, 0] - summary.mean1) / summary.sd1
    z2 = (matrix[:, 1] - summary.mean2) / summary.sd2
    rebuilt = np.column_stack([cs.c1, cs.c2]) @ cs.loadings.T
    assert float(np.max(np.abs(rebuilt - np.column_stack([z1, z2])))) < 1e-8


@settings(deadline=None)
@given(samples)
def test_kappa_ignores_column_order_and_sign(matrix):
    _, base = _scores_or_skip(matrix)
    _, swapped = _scores_or_skip(matrix[:, ::-1])
    _, negated = _scores_or_skip(matrix * np.array([1.0, -1.0]))
    assert kappa(swapped).count == kappa(base).count
    assert kappa(negated).count == kappa(base).count


@given(st.lists(st.floats(0.0, 1.0), min_size=20, max_size=400))
def test_percentile_is_the_kth_smallest(values):
    values = np.asarray(values)
    dist = ReferenceDistribution(values=values, method="parametric", r_used=0.0, n=50)
    p05 = percentile_5(dist)
    ranked = np.sort(values)
    k = int(np.floor(0.05 * len(values)))
    assert p05 == ranked[k - 1]
    assert int((values <= p05).sum()) >= k
    assert p05 <= float(np.median(values))


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1))
def test_uniforms_stay_strictly_inside_the_unit_interval(seed, stream):
    value = uniform_open(seed_stream(seed, stream))
    assert 0.0 < value < 1.0


@given(
    arrays(np.float64, st.integers(1, 32), elements=st.floats(0.0, 1.0)),
    arrays(np.float64, st.integers(1, 32), elements=st.floats(0.0, 1.0, exclude_max=True)),
)
def test_transformed_normals_are_always_finite(u, v):
    size = min(len(u), len(v))
    z = box_muller(u[:size], v[:size])
    assert np.isfinite(z).all()


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_seventeen_digit_serialization_round_trips(x):
    assert float(f"{x:.17g}") == x
