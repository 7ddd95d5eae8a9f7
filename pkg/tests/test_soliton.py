"""Soliton residual maps, constant-dilaton classification, and identities.

Expected values come from independent routes computed before asserting:
polynomial root finding for the eigenvalue quadratic, explicit spectra for
the constant-dilaton cases, the curvature pipeline for stationarity, and
closed-form gradient combinations for the skew obstruction scalar.
"""

import math

import numpy as np
import pytest

from hetflow import chart_jets as cj
from hetflow import homogeneous as hg
from hetflow import soliton as so
from hetflow import tensor_core as tc

KAPPAS = (0.7, 1.3, 2.0)


def _case_candidate(case, kappa):
    """Exact constant-dilaton data for each case, assembled from the catalog."""
    f = math.sqrt(case / kappa)
    if case == 1:
        alg = hg.catalog("heisenberg")
        g = np.diag([f * f, 1.0, 1.0])
    elif case == 2:
        alg = hg.catalog("e11")
        g = 2.0 * kappa * np.eye(3)
    elif case == 3:
        alg = hg.catalog("hyperbolic", c=0.5 / math.sqrt(kappa))
        g = np.eye(3)
    else:
        raise AssertionError(case)
    sample = hg.build_invariant_sample(alg, g, f)
    return so.SolitonCandidate(sample, kappa, name=f"case{case}")


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("kappa", KAPPAS)
def test_heisenberg_constructor_satisfies_every_equation(kappa):
    candidate = so.heisenberg_strong_soliton(kappa)
    assert float(candidate.sample.f) == pytest.approx(1.0 / math.sqrt(kappa), rel=1e-14)
    report = so.soliton_report(candidate)
    assert set(report.equations) == set(so.SOLITON_EQUATIONS)
    for name, eq in report.equations.items():
        assert eq.value <= 1e-12, (name, eq.value)
    assert report.all_passed


@pytest.mark.parametrize("kappa", KAPPAS)
def test_hyperbolic_constructor_satisfies_every_equation(kappa):
    candidate = so.hyperbolic_soliton(kappa)
    assert float(candidate.sample.f) == pytest.approx(math.sqrt(3.0 / kappa), rel=1e-14)
    # Einstein normalization: Ric = -(1 / (2 kappa)) g
    np.testing.assert_allclose(
        candidate.sample.ricci, -candidate.sample.g / (2.0 * kappa), atol=1e-13
    )
    report = so.soliton_report(candidate)
    for name, eq in report.equations.items():
        assert eq.value <= 1e-12, (name, eq.value)
    assert report.all_passed


def test_constructors_reject_bad_coupling():
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            so.heisenberg_strong_soliton(bad)
        with pytest.raises(ValueError):
            so.hyperbolic_soliton(bad)
    with pytest.raises(ValueError):
        so.SolitonCandidate(so.heisenberg_strong_soliton(1.0).sample, 0.0)
    with pytest.raises(ValueError):
        so.SolitonCandidate(so.heisenberg_strong_soliton(1.0).sample, float("nan"))


# ---------------------------------------------------------------------------
# residual evaluators
# ---------------------------------------------------------------------------


def test_symmetric_residual_routes_agree():
    # residual_3d assembles the curvature-square term from the Ricci
    # closed form; residual_general contracts the twisted tensor directly.
    rng = np.random.default_rng(2)
    for name in ("sl2r", "su2", "heisenberg"):
        kwargs = {"kappa": 1.4} if name == "su2" else {}
        a = rng.normal(size=(3, 3))
        g = a @ a.T + 0.5 * np.eye(3)
        sample = hg.build_invariant_sample(hg.catalog(name, **kwargs), g, float(rng.normal()))
        candidate = so.SolitonCandidate(sample, 0.9)
        via_ricci = so.residual_3d(candidate).equations["einstein_sym"].value
        via_tensor = so.residual_general(candidate).equations["einstein_sym"].value
        assert via_ricci == pytest.approx(via_tensor, abs=1e-11)


def test_round_metric_with_flux_is_not_a_soliton():
    kappa = 1.3
    sample = hg.build_invariant_sample(
        hg.catalog("su2", kappa=kappa), np.eye(3), math.sqrt(1.0 / kappa)
    )
    report = so.residual_3d(so.SolitonCandidate(sample, kappa))
    assert report.equations["einstein_sym"].value > 1.0
    assert report.equations["dilaton"].value > 0.1
    assert not report.all_passed


def test_maxwell_residual_equals_twice_skew_map():
    for seed in range(4):
        sample = cj.random_chart_sample(seed, maxwell=bool(seed % 2))
        _, e_skew, _, _ = so.einstein_maps(sample, 0.9)
        np.testing.assert_allclose(
            so.maxwell_residual_3d(sample), 2.0 * e_skew, atol=1e-13
        )


def test_maxwell_residual_requires_dimension_three():
    sample = cj.random_chart_sample(0)
    bad = so.SolitonCandidate(sample, 1.0)
    object.__setattr__(bad.sample, "n", 4)
    with pytest.raises(ValueError):
        so.maxwell_residual_3d(bad.sample)
    object.__setattr__(bad.sample, "n", 3)


def test_bianchi_map_vanishes_on_three_dimensional_samples():
    # chart jets leave derivative roundoff in dH; invariant data is exact
    for seed in range(3):
        sample = cj.random_chart_sample(seed)
        *_, e_bianchi = so.einstein_maps(sample, 1.7)
        assert np.max(np.abs(e_bianchi)) <= 1e-15
    invariant = hg.build_invariant_sample(hg.catalog("su2", kappa=1.2), np.eye(3), 0.8)
    *_, e_bianchi = so.einstein_maps(invariant, 1.7)
    assert np.max(np.abs(e_bianchi)) == 0.0


# ---------------------------------------------------------------------------
# constant-dilaton classification
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("case", (1, 2, 3))
@pytest.mark.parametrize("kappa", KAPPAS)
def test_case_data_satisfies_pointwise_system(case, kappa):
    candidate = _case_candidate(case, kappa)
    report = so.residual_3d(candidate, tol=1e-12)
    assert report.all_passed, {n: e.value for n, e in report.equations.items()}


@pytest.mark.parametrize("case", (1, 2, 3))
def test_synthetic_spectra_classify_exactly(case):
    kappa = 1.3
    match = so.classify_ricci_spectrum(so.case_spectrum(case, kappa), kappa)
    assert match.case == case
    assert not match.tie
    assert match.f == pytest.approx(math.sqrt(case / kappa), rel=1e-14)
    assert match.gap <= 1e-14
    assert match.checks["scalar_identity"] <= 1e-12
    assert match.checks["trace_identity"] <= 1e-12


def test_perturbed_spectrum_fails_to_classify():
    kappa = 1.3
    eigs = np.asarray(so.case_spectrum(1, kappa)) + 1e-3
    match = so.classify_ricci_spectrum(eigs, kappa)
    assert match.case is None
    assert match.f is None
    assert match.gap == pytest.approx(1e-3, rel=1e-2)


def test_classify_validation():
    with pytest.raises(ValueError):
        so.classify_ricci_spectrum((1.0, 2.0, 3.0), 0.0)
    with pytest.raises(ValueError):
        so.classify_ricci_spectrum((1.0, 2.0), 1.0)
    with pytest.raises(ValueError):
        so.case_spectrum(4, 1.0)


def test_catalog_metrics_classify_by_principal_curvatures():
    kappa = 1.3
    heis = so.classify_constant_dilaton(
        hg.catalog("heisenberg"), np.diag([1.0 / kappa, 1.0, 1.0]), kappa
    )
    assert heis.case == 1 and heis.f == pytest.approx(math.sqrt(1.0 / kappa), rel=1e-12)

    sol = so.classify_constant_dilaton(hg.catalog("e11"), 2.0 * kappa * np.eye(3), kappa)
    assert sol.case == 2 and sol.f == pytest.approx(math.sqrt(2.0 / kappa), rel=1e-12)

    hyp = so.classify_constant_dilaton(
        hg.catalog("hyperbolic", c=0.5 / math.sqrt(kappa)), np.eye(3), kappa
    )
    assert hyp.case == 3 and hyp.f == pytest.approx(math.sqrt(3.0 / kappa), rel=1e-12)

    none = so.classify_constant_dilaton(hg.catalog("su2", kappa=kappa), np.eye(3), kappa)
    assert none.case is None


# ---------------------------------------------------------------------------
# eigenvalue quadratic
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("case", (1, 2, 3))
@pytest.mark.parametrize("kappa", KAPPAS)
def test_quadratic_form_vanishes_on_case_data(case, kappa):
    candidate = _case_candidate(case, kappa)
    residual, disc = so.residual_quadratic_form(candidate)
    assert np.max(np.abs(residual)) <= 1e-12
    assert disc == pytest.approx(1.0, abs=1e-12)


def test_discriminant_is_identically_one():
    rng = np.random.default_rng(9)
    for _ in range(20):
        kappa = float(rng.uniform(0.1, 5.0))
        f = float(rng.uniform(0.0, 3.0))
        sample = hg.build_invariant_sample(hg.catalog("r3"), np.eye(3), f)
        _, disc = so.residual_quadratic_form(so.SolitonCandidate(sample, kappa))
        assert disc == pytest.approx(1.0, abs=1e-12)


def test_quadratic_roots_match_polynomial_solver():
    for kappa, f in [(0.8, 0.5), (2.0, 1.3), (1.0, 0.0)]:
        lo, hi = sorted(so.quadratic_roots(kappa, f))
        coeffs = [-kappa, 1.0 - kappa * f**2, 0.5 * (f**2 - 0.5 * kappa * f**4)]
        expected = sorted(np.roots(coeffs).real)
        assert lo == pytest.approx(expected[0], abs=1e-12)
        assert hi == pytest.approx(expected[1], abs=1e-12)


def test_quadratic_form_detects_non_solutions():
    kappa = 1.3
    candidate = _case_candidate(1, kappa)
    sample = hg.build_invariant_sample(
        hg.catalog("heisenberg"),
        candidate.sample.g + np.diag([0.05, 0.0, 0.0]),
        float(candidate.sample.f),
    )
    residual, disc = so.residual_quadratic_form(so.SolitonCandidate(sample, kappa))
    assert np.max(np.abs(residual)) > 1e-3
    assert disc == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------------------
# strong refinement
# ---------------------------------------------------------------------------


def test_strong_residual_vanishes_on_both_constructors():
    for candidate in (so.heisenberg_strong_soliton(1.1), so.hyperbolic_soliton(0.9)):
        full, reduced = so.strong_residual(candidate)
        assert np.max(np.abs(full)) <= 1e-12
        assert np.max(np.abs(reduced)) <= 1e-12


@pytest.mark.parametrize("kappa", KAPPAS)
def test_case2_passes_pointwise_but_fails_strong(kappa):
    candidate = _case_candidate(2, kappa)
    assert so.residual_3d(candidate, tol=1e-12).all_passed
    full, reduced = so.strong_residual(candidate)
    # universal scale-free obstruction of the solvable case
    assert np.max(np.abs(full)) == pytest.approx(4.0, rel=1e-9)
    assert np.max(np.abs(reduced)) == pytest.approx(4.0, rel=1e-9)
    report = so.soliton_report(candidate)
    assert not report.all_passed
    assert not report.equations["strong_full"].passed
    assert report.equations["einstein_sym"].passed


def test_strong_residual_requires_dimension_three():
    candidate = so.heisenberg_strong_soliton(1.0)
    object.__setattr__(candidate.sample, "n", 4)
    with pytest.raises(ValueError):
        so.strong_residual(candidate)
    object.__setattr__(candidate.sample, "n", 3)


def test_strong_skew_scalar_gradient_identity():
    for seed in range(4):
        sample = cj.random_chart_sample(seed, maxwell=bool(seed % 2))
        value = so.strong_skew_scalar(so.SolitonCandidate(sample, 0.9))
        phi_up = sample.g_inv @ sample.dilaton
        expected = -(sample.laplace_f + float(phi_up @ sample.df)) / 3.0
        assert value == pytest.approx(expected, abs=1e-13)


# ---------------------------------------------------------------------------
# nilpotent axis geometry
# ---------------------------------------------------------------------------


def test_case1_axis_relation_and_normalization():
    kappa = 1.1
    candidate = so.heisenberg_strong_soliton(kappa)
    alg = hg.catalog("heisenberg")
    g, f = candidate.sample.g, float(candidate.sample.f)
    xi = so.case1_axis(alg, g, f)
    assert float(xi @ g @ xi) == pytest.approx(1.0, rel=1e-12)
    xi_flat = g @ xi
    np.testing.assert_allclose(
        hg.invariant_d(alg, xi_flat), -f * tc.hodge(g, xi_flat, 1), atol=1e-13
    )


def test_case1_axis_error_paths():
    kappa = 1.1
    candidate = so.heisenberg_strong_soliton(kappa)
    alg = hg.catalog("heisenberg")
    with pytest.raises(ValueError, match="reversed-orientation"):
        so.case1_axis(alg, candidate.sample.g, float(candidate.sample.f), orientation=-1)
    with pytest.raises(ValueError, match="no simple positive"):
        so.case1_axis(hg.catalog("hyperbolic", c=0.5), np.eye(3), 1.0)


def test_auxiliary_connection_is_flat_metric_and_parallelizes_axis():
    kappa = 1.1
    candidate = so.heisenberg_strong_soliton(kappa)
    alg = hg.catalog("heisenberg")
    g, f = candidate.sample.g, float(candidate.sample.f)
    xi = so.case1_axis(alg, g, f)
    gamma_bar = so.heisenberg_auxiliary_connection(alg, g, f, xi)
    assert np.max(np.abs(hg.invariant_riemann(alg, g, gamma_bar))) <= 1e-14
    assert np.max(np.abs(hg.invariant_cov_deriv(gamma_bar, g))) <= 1e-14
    for a in range(3):
        assert np.max(np.abs(gamma_bar[a] @ xi)) <= 1e-14


# ---------------------------------------------------------------------------
# divergence identities
# ---------------------------------------------------------------------------


def test_divergence_identities_on_chart_samples(chart_samples):
    rng = np.random.default_rng(77)
    for sample in chart_samples:
        kappa = float(rng.uniform(0.05, 3.0))
        report = so.verify_divergence_identities(sample, kappa)
        assert report.all_passed, {n: e.value for n, e in report.equations.items()}
        assert set(report.equations) == {
            "div_curvature_square",
            "div_torsion_square",
            "div_einstein_map",
        }


def test_divergence_identities_on_invariant_samples(invariant_samples):
    for sample in invariant_samples:
        report = so.verify_divergence_identities(sample, 0.8, tol=1e-9)
        assert report.all_passed, {n: e.value for n, e in report.equations.items()}


def test_divergence_identities_exact_on_flat_data():
    sample = hg.build_invariant_sample(hg.catalog("r3"), np.eye(3), 0.0)
    report = so.verify_divergence_identities(sample, 1.0)
    for eq in report.equations.values():
        assert eq.value == 0.0


# ---------------------------------------------------------------------------
# report objects
# ---------------------------------------------------------------------------


def test_report_json_layout():
    candidate = so.heisenberg_strong_soliton(1.1)
    payload = so.soliton_report(candidate).to_json_dict()
    assert payload["schema_version"] == so.SCHEMA_VERSION
    assert set(payload["equations"]) == set(so.SOLITON_EQUATIONS)
    for entry in payload["equations"].values():
        assert set(entry) == {"value", "tol", "pass"}
        assert entry["pass"] is True
    assert payload["meta"]["backend"] == "homogeneous"
    assert payload["meta"]["kappa"] == pytest.approx(1.1)


def test_report_failure_flags():
    kappa = 1.3
    sample = hg.build_invariant_sample(
        hg.catalog("su2", kappa=kappa), np.eye(3), math.sqrt(1.0 / kappa)
    )
    report = so.soliton_report(so.SolitonCandidate(sample, kappa))
    assert not report.all_passed
    payload = report.to_json_dict()
    assert payload["equations"]["einstein_sym"]["pass"] is False
