"""Flow right-hand sides, conservation laws, events, and scalar cross-checks.

Oracles used here:

* generalized-flow reduction at ``kappa = 0`` assembled independently from
  the homogeneous curvature pipeline;
* scalar conformal-factor ODEs from :mod:`hetflow.homothety` in the regimes
  where the tensor flow provably preserves the conformal family (flat base
  for any coupling, ``kappa = 0`` for any base, and initial slopes at unit
  scale);
* a Maurer-Cartan antiderivation build of the exterior derivative plus a
  permutation-sum wedge of curvature 2-forms for the dimension-4 constraint.
"""

import itertools
import math

import numpy as np
import pytest

from hetflow import het_flow as hf
from hetflow import homogeneous as hg
from hetflow import homothety as ht
from hetflow import soliton as so
from hetflow import tensor_core as tc

# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _random_state(rng, name, **kwargs):
    alg = hg.catalog(name, **kwargs)
    a = rng.normal(size=(3, 3))
    g = a @ a.T + 0.5 * np.eye(3)
    return hf.FlowState3(algebra=alg, g=g, f=float(rng.normal()))


def _algebra_of(candidate):
    meta = candidate.sample.meta
    name = meta["algebra"]
    if name == "hyperbolic":
        return hg.catalog("hyperbolic", c=meta["c"])
    if name == "heisenberg":
        return hg.catalog("heisenberg")
    raise AssertionError(f"unexpected constructor algebra {name!r}")


def _einstein_positive_algebra():
    # Bi-invariant metric on the compact simple algebra: Ricci = (lam^2 / 2) g,
    # so lam = sqrt(2/3) normalizes the scalar curvature of the identity
    # metric to +1.
    lam = math.sqrt(2.0 / 3.0)
    return hg.from_milnor([lam, lam, lam], name="round")


def _compare_with_scalar(alg, case, kappa, mu, t_end, n_points=17):
    state = hf.FlowState3(algebra=alg, g=np.eye(3), f=mu)
    traj = hf.integrate_flow(
        state, hf.FlowParams(kappa=kappa, t_span=(0.0, t_end), n_points=n_points)
    )
    scalar = ht.integrate(
        ht.HomothetyProblem(case=case, kappa=kappa, mu=mu), (0.0, t_end), n_points=n_points
    )
    m = min(traj.t.size, scalar.t.size)
    assert m >= 2
    worst_sigma = 0.0
    worst_aniso = 0.0
    worst_f = 0.0
    for i in range(m):
        g = traj.g[i]
        worst_aniso = max(worst_aniso, float(np.max(np.abs(g - g[0, 0] * np.eye(3)))))
        worst_sigma = max(worst_sigma, abs(g[0, 0] - scalar.sigma[i]) / abs(scalar.sigma[i]))
        worst_f = max(worst_f, abs(traj.f[i] - scalar.f[i]))
    return worst_sigma, worst_aniso, worst_f


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------


def test_flat_torsion_free_data_is_stationary():
    state = hf.FlowState3(algebra=hg.catalog("r3"), g=np.eye(3), f=0.0)
    g_dot, f_dot = hf.rhs_3d(state, kappa=2.5)
    assert np.max(np.abs(g_dot)) == 0.0
    assert f_dot == 0.0


def test_kappa_zero_reduces_to_generalized_flow():
    rng = np.random.default_rng(41)
    for name, kwargs in [
        ("heisenberg", {}),
        ("su2", {"kappa": 1.4}),
        ("sl2r", {}),
        ("hyperbolic", {"c": 0.6}),
    ]:
        state = _random_state(rng, name, **kwargs)
        g_dot, _ = hf.rhs_3d(state, kappa=0.0)
        gamma = hg.levi_civita_connection(state.algebra, state.g)
        riemann = hg.invariant_riemann(state.algebra, state.g, gamma)
        ricci = tc.ricci_from_riemann(state.g, riemann)
        torsion = state.f * tc.volume_form(state.g)
        expected = -2.0 * ricci + tc.torsion_square(state.g, torsion)
        np.testing.assert_allclose(g_dot, expected, atol=1e-13)


def test_reduction_agrees_with_general_rhs():
    rng = np.random.default_rng(7)
    for name, kwargs in [
        ("heisenberg", {}),
        ("su2", {"kappa": 1.4}),
        ("r3", {}),
        ("sl2r", {}),
        ("hyperbolic", {"c": 0.6}),
    ]:
        state = _random_state(rng, name, **kwargs)
        g_dot, _ = hf.rhs_3d(state, kappa=0.9)
        torsion = state.f * tc.volume_form(state.g)
        g_dot_full, h_dot = hf.rhs_general(state.algebra, state.g, torsion, kappa=0.9)
        np.testing.assert_allclose(g_dot, g_dot_full, atol=1e-12)
        # invariant 3-form torsion is harmonic in dimension three
        np.testing.assert_allclose(h_dot, 0.0, atol=1e-13)


def test_density_rate_tracks_metric_trace():
    rng = np.random.default_rng(13)
    for _ in range(4):
        state = _random_state(rng, "su2", kappa=2.0)
        g_dot, f_dot = hf.rhs_3d(state, kappa=1.1)
        g_inv = tc.metric_inverse(state.g)
        expected = -0.5 * float(np.einsum("ab,ab->", g_inv, g_dot)) * state.f
        assert f_dot == pytest.approx(expected, abs=1e-14)


def test_hoh_coefficient_shifts_torsion_square_only():
    rng = np.random.default_rng(3)
    state = _random_state(rng, "sl2r")
    g_one, f_one = hf.rhs_3d(state, kappa=0.7, hoh_coeff=1.0)
    g_two, f_two = hf.rhs_3d(state, kappa=0.7, hoh_coeff=2.0)
    np.testing.assert_allclose(g_two - g_one, state.f**2 * state.g, atol=1e-13)
    assert f_two - f_one == pytest.approx(-1.5 * state.f**3, abs=1e-12)


def test_rhs_validation():
    state = hf.FlowState3(algebra=hg.catalog("r3"), g=np.eye(3), f=0.2)
    with pytest.raises(ValueError):
        hf.rhs_3d(state, kappa=-0.1)
    with pytest.raises(ValueError):
        hf.FlowState3(algebra=hg.catalog("r3"), g=np.diag([1.0, -1.0, 1.0]), f=0.0)
    with pytest.raises(ValueError):
        hf.FlowState3(algebra=hg.catalog("r3"), g=np.eye(3), f=float("nan"))
    with pytest.raises(ValueError):
        hf.FlowParams(kappa=-1.0)
    with pytest.raises(ValueError):
        hf.FlowParams(kappa=1.0, n_points=1)


def test_four_dimensional_algebra_rejected_by_state():
    c4 = np.zeros((4, 4, 4))
    alg4 = hg.LieAlgebraData(name="abelian4", dim=4, structure=c4)
    with pytest.raises(ValueError):
        hf.FlowState3(algebra=alg4, g=np.eye(3), f=0.0)


# ---------------------------------------------------------------------------
# stationary data
# ---------------------------------------------------------------------------


def test_soliton_data_is_stationary():
    for candidate in [so.heisenberg_strong_soliton(1.3), so.hyperbolic_soliton(0.7)]:
        alg = _algebra_of(candidate)
        state = hf.FlowState3(algebra=alg, g=candidate.sample.g, f=float(candidate.sample.f))
        g_dot, f_dot = hf.rhs_3d(state, kappa=candidate.kappa)
        assert np.max(np.abs(g_dot)) <= 1e-12
        assert abs(f_dot) <= 1e-12
        assert abs(hf.dilaton_rhs(state, kappa=candidate.kappa)) <= 1e-12


def test_flow_from_soliton_start_stays_constant():
    candidate = so.heisenberg_strong_soliton(0.8)
    alg = _algebra_of(candidate)
    state = hf.FlowState3(algebra=alg, g=candidate.sample.g, f=float(candidate.sample.f))
    traj = hf.integrate_flow(
        state, hf.FlowParams(kappa=candidate.kappa, t_span=(0.0, 2.0), n_points=9)
    )
    assert traj.status == "completed"
    for i in range(traj.t.size):
        np.testing.assert_allclose(traj.g[i], candidate.sample.g, atol=1e-9)
        assert traj.f[i] == pytest.approx(float(candidate.sample.f), abs=1e-9)


def test_dilaton_rate_formula():
    rng = np.random.default_rng(17)
    state = _random_state(rng, "su2", kappa=1.2)
    kappa = 0.6
    torsion = state.f * tc.volume_form(state.g)
    gamma_tw = hg.connection_twisted(state.algebra, state.g, torsion)
    riem_tw = hg.invariant_riemann(state.algebra, state.g, gamma_tw)
    expected = 0.5 * (
        tc.torsion_norm2(state.g, torsion) - kappa * tc.riemann_norm2(state.g, riem_tw)
    )
    assert hf.dilaton_rhs(state, kappa=kappa) == pytest.approx(expected, rel=1e-12)


# ---------------------------------------------------------------------------
# conservation and events
# ---------------------------------------------------------------------------


def test_torsion_volume_is_conserved():
    state = hf.FlowState3(
        algebra=hg.catalog("su2", kappa=1.5), g=np.diag([1.0, 1.2, 0.8]), f=0.7
    )
    traj = hf.integrate_flow(state, hf.FlowParams(kappa=0.4, t_span=(0.0, 0.5), n_points=21))
    volumes = traj.torsion_volume
    np.testing.assert_allclose(volumes, volumes[0], rtol=1e-8)


def test_round_collapse_time_under_plain_ricci_flow():
    # kappa = mu = 0 positive case: the scale factor decreases linearly and
    # degenerates at t = 3/2.
    state = hf.FlowState3(algebra=_einstein_positive_algebra(), g=np.eye(3), f=0.0)
    traj = hf.integrate_flow(state, hf.FlowParams(kappa=0.0, t_span=(0.0, 5.0), n_points=11))
    assert traj.status == "event"
    assert traj.events[0].kind == "degenerate"
    assert traj.events[0].t == pytest.approx(1.5, abs=1e-6)


def test_flat_collapse_event_matches_closed_form():
    kappa, mu = 2.0, 2.0  # quartic correction dominates: finite-time degeneration
    state = hf.FlowState3(algebra=hg.catalog("r3"), g=np.eye(3), f=mu)
    traj = hf.integrate_flow(state, hf.FlowParams(kappa=kappa, t_span=(0.0, 5.0), n_points=11))
    assert traj.status == "event"
    assert traj.events[0].kind == "degenerate"
    assert traj.events[0].t == pytest.approx(ht.flat_collapse_time(kappa, mu), abs=1e-6)


def test_integration_is_deterministic():
    state = hf.FlowState3(algebra=hg.catalog("sl2r"), g=np.diag([1.0, 1.3, 0.7]), f=0.4)
    params = hf.FlowParams(kappa=0.5, t_span=(0.0, 0.4), n_points=11)
    one = hf.integrate_flow(state, params)
    two = hf.integrate_flow(state, params)
    np.testing.assert_array_equal(one.g, two.g)
    np.testing.assert_array_equal(one.f, two.f)
    np.testing.assert_array_equal(one.t, two.t)


# ---------------------------------------------------------------------------
# conformal-family cross-checks against the scalar reduction
# ---------------------------------------------------------------------------


def test_flat_base_matches_scalar_reduction():
    for kappa, mu in [(1.0, 0.9), (2.0, 0.6), (0.3, 1.4)]:
        sigma_err, aniso, f_err = _compare_with_scalar(
            hg.catalog("r3"), "flat", kappa, mu, t_end=1.5
        )
        assert aniso <= 1e-10
        assert sigma_err <= 1e-6
        assert f_err <= 1e-6


def test_kappa_zero_matches_scalar_reduction_for_curved_bases():
    neg = hg.catalog("hyperbolic", c=1.0 / math.sqrt(6.0))
    sigma_err, aniso, f_err = _compare_with_scalar(neg, "negative", 0.0, 0.8, t_end=1.5)
    assert aniso <= 1e-10 and sigma_err <= 1e-6 and f_err <= 1e-6

    pos = _einstein_positive_algebra()
    sigma_err, aniso, f_err = _compare_with_scalar(pos, "positive", 0.0, 0.7, t_end=1.0)
    assert aniso <= 1e-10 and sigma_err <= 1e-6 and f_err <= 1e-6


def test_einstein_slopes_match_scalar_rhs_at_unit_scale():
    kappa = 0.8
    cases = [
        (hg.catalog("hyperbolic", c=1.0 / math.sqrt(6.0)), "negative", 0.0),
        (_einstein_positive_algebra(), "positive", 0.0),
        (hg.catalog("r3"), "flat", 1.1),
    ]
    for alg, case, mu in cases:
        state = hf.FlowState3(algebra=alg, g=np.eye(3), f=mu)
        g_dot, _ = hf.rhs_3d(state, kappa=kappa)
        problem = ht.HomothetyProblem(case=case, kappa=kappa, mu=mu)
        expected = ht.F_value(problem, 1.0)
        np.testing.assert_allclose(g_dot, expected * np.eye(3), atol=1e-12)


def test_su2_slope_matches_quintic_at_unit_scale():
    kappa = 0.8
    state = hf.FlowState3(algebra=hg.catalog("su2", kappa=kappa), g=np.eye(3), f=0.0)
    g_dot, f_dot = hf.rhs_3d(state, kappa=kappa)
    assert ht.F_su2(kappa, 1.0) == pytest.approx(-8.0 / kappa, rel=1e-14)
    np.testing.assert_allclose(g_dot, (-8.0 / kappa) * np.eye(3), atol=1e-12)
    assert f_dot == 0.0


def test_su2_flow_leaves_the_conformal_family():
    # The non-Einstein scalar reduction is a constrained curve, not a literal
    # conformal orbit: away from unit scale the tensor rhs develops
    # anisotropy, so the integrated metric departs from multiples of the
    # start even though the initial slope is isotropic.
    kappa = 1.2
    state = hf.FlowState3(algebra=hg.catalog("su2", kappa=kappa), g=np.eye(3), f=0.0)
    g_half, _ = hf.rhs_3d(
        hf.FlowState3(algebra=state.algebra, g=0.5 * np.eye(3), f=0.0), kappa=kappa
    )
    aniso_rhs = float(np.max(np.abs(g_half - g_half[0, 0] * np.eye(3))))
    assert aniso_rhs > 1e-3
    traj = hf.integrate_flow(state, hf.FlowParams(kappa=kappa, t_span=(0.0, 0.05), n_points=11))
    worst = max(
        float(np.max(np.abs(traj.g[i] - traj.g[i][0, 0] * np.eye(3))))
        for i in range(traj.t.size)
    )
    assert worst > 1e-3


# ---------------------------------------------------------------------------
# constraint four-form
# ---------------------------------------------------------------------------


def test_bianchi_residual_vanishes_in_dimension_three():
    rng = np.random.default_rng(11)
    for name, kwargs in [
        ("heisenberg", {}),
        ("su2", {"kappa": 1.3}),
        ("sl2r", {}),
        ("hyperbolic", {"c": 0.7}),
    ]:
        alg = hg.catalog(name, **kwargs)
        a = rng.normal(size=(3, 3))
        g = a @ a.T + 0.5 * np.eye(3)
        torsion = float(rng.normal()) * tc.volume_form(g)
        residual = hf.bianchi_residual(alg, g, torsion, kappa=1.7)
        assert np.max(np.abs(residual)) == 0.0


def _embed_in_dim4(alg3, name):
    c4 = np.zeros((4, 4, 4))
    c4[:3, :3, :3] = alg3.structure
    return hg.LieAlgebraData(name=name, dim=4, structure=c4)


def _random_three_form_dim4(rng):
    values = rng.normal(size=4)
    eps3 = tc.levi_civita_symbol(3)
    out = np.zeros((4, 4, 4))
    for m in range(4):
        rest = [i for i in range(4) if i != m]
        for perm in itertools.permutations(range(3)):
            out[rest[perm[0]], rest[perm[1]], rest[perm[2]]] = eps3[perm] * values[m]
    return out


def _maurer_cartan_d3(alg, form):
    """Exterior derivative of a 3-form via the antiderivation rule.

    Independent of the module's alternating-sum formula: expands the form in
    basis covectors, differentiates each covector through the structure
    constants, and reassembles with wedge products.
    """
    n = alg.dim
    basis = [np.eye(n)[i] for i in range(n)]
    d_basis = [-alg.structure[:, :, m] for m in range(n)]
    out = np.zeros((n,) * 4)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                coeff = form[i, j, k] / 6.0
                if coeff == 0.0:
                    continue
                out += coeff * (
                    tc.wedge(tc.wedge(d_basis[i], basis[j]), basis[k])
                    - tc.wedge(tc.wedge(basis[i], d_basis[j]), basis[k])
                    + tc.wedge(tc.wedge(basis[i], basis[j]), d_basis[k])
                )
    return out


def _wedge_two_forms_bruteforce(a, b):
    n = a.shape[0]
    out = np.zeros((n,) * 4)
    for idx in itertools.product(range(n), repeat=4):
        total = 0.0
        for perm in itertools.permutations(range(4)):
            sign = tc._perm_sign(perm)
            p = [idx[perm[r]] for r in range(4)]
            total += sign * a[p[0], p[1]] * b[p[2], p[3]]
        out[idx] = total / 4.0
    return out


def _riemann_wedge_bruteforce(g, riem):
    n = g.shape[0]
    frame = tc.frame_orthonormalize(g)
    out = np.zeros((n,) * 4)
    for p in range(n):
        for q in range(n):
            two_form = np.einsum("abij,i,j->ab", riem, frame[:, p], frame[:, q])
            out += _wedge_two_forms_bruteforce(two_form, two_form)
    return 0.5 * out


def test_bianchi_residual_dim4_matches_bruteforce():
    rng = np.random.default_rng(23)
    kappa = 1.7
    alg4 = _embed_in_dim4(hg.catalog("hyperbolic", c=0.8), "hyperbolic_x_line")
    a = rng.normal(size=(4, 4))
    g4 = a @ a.T + 0.6 * np.eye(4)
    torsion = _random_three_form_dim4(rng)

    residual = hf.bianchi_residual(alg4, g4, torsion, kappa=kappa)

    d_torsion = _maurer_cartan_d3(alg4, torsion)
    assert np.max(np.abs(d_torsion)) > 1e-2  # the derivative term is active
    gamma_tw = hg.connection_twisted(alg4, g4, torsion)
    riem_tw = hg.invariant_riemann(alg4, g4, gamma_tw)
    wedge = _riemann_wedge_bruteforce(g4, riem_tw)
    assert np.max(np.abs(wedge)) > 1e-3  # the quadratic term is active
    np.testing.assert_allclose(residual, d_torsion + kappa * wedge, atol=1e-10)


def test_general_rhs_moves_torsion_in_dimension_four():
    # On a non-unimodular product the invariant torsion is not harmonic, so
    # the 3-form picks up a nonzero rate.
    rng = np.random.default_rng(29)
    alg4 = _embed_in_dim4(hg.catalog("hyperbolic", c=0.8), "hyperbolic_x_line")
    a = rng.normal(size=(4, 4))
    g4 = a @ a.T + 0.6 * np.eye(4)
    torsion = _random_three_form_dim4(rng)
    _, h_dot = hf.rhs_general(alg4, g4, torsion, kappa=0.0)
    assert np.max(np.abs(h_dot)) > 1e-6
    assert np.max(np.abs(h_dot + np.swapaxes(h_dot, 0, 1))) <= 1e-12
