"""Residual maps and classification for torsion-coupled curvature solitons.

A candidate bundles a pointwise geometry sample (chart or homogeneous
backend) with the quadratic-curvature coupling ``kappa``.  The coupled
system evaluated here pairs

* a Ricci-type equation for the metric (symmetric part),
* a Maxwell-type equation for the one-form ``phi`` (skew part),
* a scalar equation tying the dilaton coupling to curvature, and
* a four-form flux constraint ``dH + kappa * <Rhat ^ Rhat>``,

with an optional *strong* refinement: a first-order equation on the twisted
curvature tensor, ``div_tw(Rhat) + phi -| Rhat = 0``, whose fully
antisymmetric part carries an independent scalar obstruction.

Reports are value objects with a stable JSON layout so batch verification
and the command-line front end can share one schema.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import homogeneous as hg
from . import tensor_core as tc
from .chart_jets import GeometrySample

__all__ = [
    "SCHEMA_VERSION",
    "TOL_CONSTRUCTOR",
    "TOL_JET",
    "EIGEN_GAP_REL",
    "EIGEN_GAP_ABS",
    "SOLITON_EQUATIONS",
    "EquationResidual",
    "ResidualReport",
    "SolitonCandidate",
    "CaseMatch",
    "einstein_maps",
    "maxwell_residual_3d",
    "residual_general",
    "residual_3d",
    "residual_quadratic_form",
    "quadratic_roots",
    "case_spectrum",
    "classify_ricci_spectrum",
    "classify_constant_dilaton",
    "strong_residual",
    "strong_skew_scalar",
    "soliton_report",
    "heisenberg_strong_soliton",
    "hyperbolic_soliton",
    "case1_axis",
    "heisenberg_auxiliary_connection",
    "verify_divergence_identities",
]

SCHEMA_VERSION = 1

#: Exactly constructed candidates must satisfy their equations to this level.
TOL_CONSTRUCTOR = 1e-12
#: Theorem-level identities on third-order jets lose a few digits in doubles.
TOL_JET = 1e-8
#: Eigenvalue matching: relative gap scale and absolute floor.
EIGEN_GAP_REL = 1e-6
EIGEN_GAP_ABS = 1e-12

#: Canonical equation names carried by a full soliton report.
SOLITON_EQUATIONS = (
    "einstein_sym",
    "einstein_skew",
    "dilaton",
    "bianchi",
    "strong_full",
    "strong_skew",
    "trace_identity",
)


@dataclass(frozen=True)
class EquationResidual:
    """Magnitude of one named equation together with its tolerance verdict."""

    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tol)


@dataclass(frozen=True)
class ResidualReport:
    """Ordered collection of named equation residuals.

    ``soliton_report`` emits every name in :data:`SOLITON_EQUATIONS`; the
    narrower evaluators emit the subset they compute.  All magnitudes are
    nonnegative maxima over tensor components.
    """

    equations: dict[str, EquationResidual]
    meta: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(eq.passed for eq in self.equations.values())

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "equations": {
                name: {"value": float(eq.value), "tol": float(eq.tol), "pass": eq.passed}
                for name, eq in self.equations.items()
            },
            "meta": dict(self.meta),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)


@dataclass(frozen=True)
class SolitonCandidate:
    """Geometry sample plus coupling constant, ready for residual evaluation.

    The one-form slot of the sample is the closed ``phi`` of the system (both
    backends construct it closed); the dilaton coupling ``f`` is the scalar
    dual of the three-form flux and must be nowhere zero when ``phi`` is
    slaved to it.
    """

    sample: GeometrySample
    kappa: float
    name: str = ""

    def __post_init__(self) -> None:
        if not np.isfinite(self.kappa) or self.kappa <= 0.0:
            raise ValueError("coupling kappa must be positive and finite")


def _meta(candidate: SolitonCandidate) -> dict:
    s = candidate.sample
    return {
        "name": candidate.name,
        "backend": s.backend,
        "dim": int(s.n),
        "kappa": float(candidate.kappa),
        "f": float(s.f),
    }


def einstein_maps(
    sample: GeometrySample, kappa: float
) -> tuple[np.ndarray, np.ndarray, float, np.ndarray]:
    """Pointwise residual tensors of the coupled system.

    Returns ``(e_sym, e_skew, e_dil, e_bianchi)``: the symmetric Ricci-type
    map ``Ric + nabla phi - 1/2 H o H + kappa Rhat o Rhat``, the skew
    Maxwell-type two-form ``1/2 delta H + 1/2 H(phi, ., .)``, the scalar
    ``delta phi + |phi|^2 - |H|^2 + kappa |Rhat|^2`` and the four-form
    ``dH + kappa <Rhat ^ Rhat>`` (identically zero in dimension three).
    """
    s = sample
    phi_up = s.g_inv @ s.dilaton
    e_sym = s.ricci + s.nabla_dilaton - 0.5 * s.torsion_sq + kappa * s.riemann_tw_sq
    e_skew = 0.5 * s.delta_torsion + 0.5 * np.einsum("m,mcd->cd", phi_up, s.torsion)
    e_dil = float(
        s.delta_dilaton + s.dilaton_norm2 - s.torsion_norm2 + kappa * s.riemann_tw_norm2
    )
    e_bianchi = s.d_torsion + kappa * s.riemann_tw_wedge
    return e_sym, e_skew, e_dil, e_bianchi


def maxwell_residual_3d(sample: GeometrySample) -> np.ndarray:
    """Two-form ``-*df + f *phi``; equals twice the general skew map in 3D."""
    if sample.n != 3:
        raise ValueError("maxwell_residual_3d requires a three-dimensional sample")
    return tc.hodge(sample.g, sample.f * sample.dilaton - sample.df, sample.orientation)


def residual_general(candidate: SolitonCandidate, tol: float = TOL_JET) -> ResidualReport:
    """Evaluate the coupled system on a candidate in any dimension."""
    e_sym, e_skew, e_dil, e_bianchi = einstein_maps(candidate.sample, candidate.kappa)
    eqs = {
        "einstein_sym": EquationResidual(float(np.max(np.abs(e_sym))), tol),
        "einstein_skew": EquationResidual(float(np.max(np.abs(e_skew))), tol),
        "dilaton": EquationResidual(abs(e_dil), tol),
        "bianchi": EquationResidual(float(np.max(np.abs(e_bianchi))), tol),
    }
    return ResidualReport(eqs, meta=_meta(candidate))


def residual_3d(candidate: SolitonCandidate, tol: float = TOL_JET) -> ResidualReport:
    """Evaluate the expanded three-dimensional system for ``H = f vol``.

    The symmetric equation is assembled from the closed-form expansion of
    ``Rhat o Rhat`` in Ricci data (an independent route from the general
    evaluator, which contracts the twisted curvature tensor directly); the
    skew equation reduces to ``f phi = df`` and the scalar equation to
    ``s = 3 delta phi + 2 |phi|^2 - f^2/2``.
    """
    s = candidate.sample
    if s.n != 3:
        raise ValueError("residual_3d requires a three-dimensional sample")
    kappa = candidate.kappa
    rr_tw = tc.riemann_square_twisted_dim3(s.g, s.ricci, s.scalar, s.f, s.df, s.orientation)
    e1 = s.ricci + s.nabla_dilaton - 0.5 * s.f**2 * s.g + kappa * rr_tw
    e2 = s.f * s.dilaton - s.df
    e3 = float(s.scalar - 3.0 * s.delta_dilaton - 2.0 * s.dilaton_norm2 + 0.5 * s.f**2)
    eqs = {
        "einstein_sym": EquationResidual(float(np.max(np.abs(e1))), tol),
        "einstein_skew": EquationResidual(float(np.max(np.abs(e2))), tol),
        "dilaton": EquationResidual(abs(e3), tol),
    }
    return ResidualReport(eqs, meta=_meta(candidate))


def residual_quadratic_form(candidate: SolitonCandidate) -> tuple[np.ndarray, float]:
    """Constant-dilaton quadratic form in the Ricci tensor plus its discriminant.

    Returns the residual of ``-kappa Ric o Ric + (1 - kappa f^2) Ric
    + 1/2 (f^2 - kappa f^4/2) g`` together with the discriminant of the
    associated scalar quadratic, which is identically one for every
    ``(kappa, f)`` — each Ricci eigenvalue of a solution must therefore hit
    one of the two universal roots of :func:`quadratic_roots`.
    """
    s = candidate.sample
    kappa = candidate.kappa
    f2 = s.f**2
    ric_sq = s.ricci @ s.g_inv @ s.ricci
    resid = -kappa * ric_sq + (1.0 - kappa * f2) * s.ricci + 0.5 * (f2 - 0.5 * kappa * f2**2) * s.g
    disc = (1.0 - kappa * f2) ** 2 + 2.0 * kappa * f2 - (kappa * f2) ** 2
    return resid, float(disc)


def quadratic_roots(kappa: float, f: float) -> tuple[float, float]:
    """Roots ``(-f^2/2, (2 - kappa f^2)/(2 kappa))`` of the eigenvalue quadratic."""
    return -0.5 * f**2, (2.0 - kappa * f**2) / (2.0 * kappa)


def case_spectrum(case: int, kappa: float) -> tuple[float, float, float]:
    """Principal Ricci spectrum of the constant-dilaton case ``kappa f^2 = case``."""
    if case == 1:
        return (-0.5 / kappa, -0.5 / kappa, 0.5 / kappa)
    if case == 2:
        return (0.0, 0.0, -1.0 / kappa)
    if case == 3:
        return (-0.5 / kappa, -0.5 / kappa, -0.5 / kappa)
    raise ValueError(f"unknown constant-dilaton case {case!r}")


@dataclass(frozen=True)
class CaseMatch:
    """Outcome of matching a Ricci spectrum against the constant-dilaton cases.

    ``case`` is ``None`` when no spectrum fits; ``tie`` flags an ambiguous
    match (resolved toward the higher-symmetry case, ordered 3, 1, 2).
    ``checks`` carries the residuals of the scalar identity ``s = -f^2/2``
    and of the trace identity ``2 kappa |Ric|^2 = 2 f^2 - kappa f^4/2``.
    """

    case: int | None
    f: float | None
    eigenvalues: tuple[float, ...]
    gap: float
    tie: bool
    checks: dict[str, float] = field(default_factory=dict)


def classify_ricci_spectrum(eigenvalues, kappa: float) -> CaseMatch:
    """Match a principal Ricci spectrum to one of the constant-dilaton cases."""
    if kappa <= 0.0:
        raise ValueError("coupling kappa must be positive")
    eigs = np.sort(np.asarray(eigenvalues, dtype=float))
    if eigs.shape != (3,):
        raise ValueError("expected exactly three principal curvatures")
    scal = float(np.sum(eigs))
    gap_tol = EIGEN_GAP_REL * abs(scal) + EIGEN_GAP_ABS
    matches: list[tuple[int, float]] = []
    gaps: list[float] = []
    for case in (3, 1, 2):  # higher symmetry first
        expected = np.sort(np.asarray(case_spectrum(case, kappa)))
        gap = float(np.max(np.abs(eigs - expected)))
        gaps.append(gap)
        if gap <= gap_tol:
            matches.append((case, gap))
    spectrum = tuple(float(x) for x in eigs)
    if not matches:
        return CaseMatch(None, None, spectrum, min(gaps), False)
    case, gap = matches[0]
    f = float(np.sqrt(case / kappa))
    ric_norm2 = float(np.sum(eigs**2))
    checks = {
        "scalar_identity": abs(scal + 0.5 * f**2),
        "trace_identity": abs(2.0 * kappa * ric_norm2 - (2.0 * f**2 - 0.5 * kappa * f**4)),
    }
    return CaseMatch(case, f, spectrum, gap, len(matches) > 1, checks)


def classify_constant_dilaton(alg: hg.LieAlgebraData, g: np.ndarray, kappa: float) -> CaseMatch:
    """Classify an invariant metric by its principal Ricci curvatures."""
    gamma = hg.levi_civita_connection(alg, g)
    riemann = hg.invariant_riemann(alg, g, gamma)
    ricci = tc.ricci_from_riemann(g, riemann)
    eigs = scipy.linalg.eigh(ricci, g, eigvals_only=True)
    return classify_ricci_spectrum(eigs, kappa)


def strong_residual(candidate: SolitonCandidate) -> tuple[np.ndarray, np.ndarray]:
    """Full and reduced residuals of the strong condition in dimension three.

    ``full[v, c, d]`` is the twisted divergence of the twisted curvature plus
    the ``phi`` contraction, valid for any candidate.  ``reduced[v, a, b]``
    is the constant-dilaton algebraic route
    ``(d^{nabla} Ric)(., .; v) + (3f/2) * hodge(Ric0(v, .))`` with ``Ric0``
    the traceless Ricci tensor; the two vanish together on constant-dilaton
    solutions.
    """
    s = candidate.sample
    if s.n != 3:
        raise ValueError("strong_residual requires a three-dimensional sample")
    phi_up = s.g_inv @ s.dilaton
    full = s.div_riemann_tw + np.einsum("a,avcd->vcd", phi_up, s.riemann_tw)
    ric0 = s.ricci - (s.scalar / 3.0) * s.g
    reduced = np.empty((3, 3, 3))
    for v in range(3):
        anti = s.nabla_ricci[:, :, v] - s.nabla_ricci[:, :, v].T
        reduced[v] = anti + 1.5 * s.f * tc.hodge(s.g, ric0[v], s.orientation)
    return full, reduced


def strong_skew_scalar(candidate: SolitonCandidate) -> float:
    """Volume coefficient of the fully antisymmetric part of the full residual.

    For ``H = f vol`` this scalar equals ``-(laplace f + <phi, df>)/3``
    identically, so on candidates satisfying the Maxwell equation
    ``f phi = df`` it is ``-(f laplace f + |df|^2) / (3 f)`` — the pointwise
    obstruction forcing ``f`` constant on closed manifolds.
    """
    s = candidate.sample
    full, _ = strong_residual(candidate)
    skew = (full + np.einsum("vcd->cdv", full) + np.einsum("vcd->dvc", full)) / 3.0
    return float(tc.form_inner(s.g, skew, tc.volume_form(s.g, s.orientation)))


def soliton_report(candidate: SolitonCandidate, tol: float = TOL_CONSTRUCTOR) -> ResidualReport:
    """Comprehensive report carrying every name in :data:`SOLITON_EQUATIONS`."""
    s = candidate.sample
    kappa = candidate.kappa
    base = residual_general(candidate, tol)
    full, _ = strong_residual(candidate)
    skew_scalar = strong_skew_scalar(candidate)
    ric_norm2 = float(np.einsum("ab,cd,ac,bd->", s.ricci, s.ricci, s.g_inv, s.g_inv))
    trace_res = abs(2.0 * kappa * ric_norm2 - (2.0 * s.f**2 - 0.5 * kappa * s.f**4))
    eqs = dict(base.equations)
    eqs["strong_full"] = EquationResidual(float(np.max(np.abs(full))), tol)
    eqs["strong_skew"] = EquationResidual(abs(skew_scalar), tol)
    eqs["trace_identity"] = EquationResidual(trace_res, tol)
    return ResidualReport(eqs, meta=_meta(candidate))


def heisenberg_strong_soliton(kappa: float) -> SolitonCandidate:
    """Exact nilpotent strong soliton: ``g = diag(f^2, 1, 1)``, ``f = 1/sqrt(kappa)``.

    The Ricci spectrum is ``(f^2/2, -f^2/2, -f^2/2)`` (case 1) and the unit
    axis along the center satisfies ``nabla xi = -(f/2) * hodge(xi_flat)``.
    """
    if kappa <= 0.0:
        raise ValueError("coupling kappa must be positive")
    f = 1.0 / np.sqrt(kappa)
    alg = hg.catalog("heisenberg")
    g = np.diag([f * f, 1.0, 1.0])
    sample = hg.build_invariant_sample(alg, g, f)
    return SolitonCandidate(sample, float(kappa), name="heisenberg")


def hyperbolic_soliton(kappa: float) -> SolitonCandidate:
    """Exact Einstein strong soliton: curvature ``-1/(4 kappa)``, ``f = sqrt(3/kappa)``."""
    if kappa <= 0.0:
        raise ValueError("coupling kappa must be positive")
    alg = hg.catalog("hyperbolic", c=0.5 / np.sqrt(kappa))
    sample = hg.build_invariant_sample(alg, np.eye(3), float(np.sqrt(3.0 / kappa)))
    return SolitonCandidate(sample, float(kappa), name="hyperbolic")


def case1_axis(
    alg: hg.LieAlgebraData,
    g: np.ndarray,
    f: float,
    orientation: int = 1,
    tol: float = 1e-8,
) -> np.ndarray:
    """Unit eigenvector of the simple positive Ricci eigenvalue, oriented.

    The returned axis ``xi`` (sign fixed deterministically by its largest
    component) must satisfy ``d(xi_flat) = -f * hodge(xi_flat)``; a clean
    failure is raised when only the reversed-orientation relation
    ``d(xi_flat) = +f * hodge(xi_flat)`` fits, or when neither does.
    """
    gamma = hg.levi_civita_connection(alg, g)
    ricci = tc.ricci_from_riemann(g, hg.invariant_riemann(alg, g, gamma))
    w, vecs = scipy.linalg.eigh(ricci, g)
    scale = max(float(np.max(np.abs(w))), 1e-30)
    if w[2] <= 0.0 or (w[2] - w[1]) <= 1e-8 * scale:
        raise ValueError("Ricci spectrum has no simple positive eigenvalue")
    xi = vecs[:, 2]
    k = int(np.argmax(np.abs(xi)))
    xi = xi * np.sign(xi[k])
    xi_flat = g @ xi
    d_xi = hg.invariant_d(alg, xi_flat)
    target = -f * tc.hodge(g, xi_flat, orientation)
    err_scale = max(abs(f), 1.0)
    if float(np.max(np.abs(d_xi - target))) <= tol * err_scale:
        return xi
    if float(np.max(np.abs(d_xi + target))) <= tol * err_scale:
        raise ValueError("axis satisfies the reversed-orientation relation d xi = +f * xi")
    raise ValueError("axis satisfies neither orientation of d xi = -f * xi")


def heisenberg_auxiliary_connection(
    alg: hg.LieAlgebraData,
    g: np.ndarray,
    f: float,
    xi: np.ndarray,
    orientation: int = 1,
) -> np.ndarray:
    """Coefficients of the metric connection that parallelizes the axis.

    Implements ``nabla_bar_v = nabla_v - (f/2) A(v) + f g(v, xi) A(xi)``
    where ``A(u)`` is the skew endomorphism of the two-form
    ``hodge(u_flat)``; on the exact nilpotent soliton this connection has
    vanishing curvature and ``nabla_bar xi = 0``.
    """
    gamma = hg.levi_civita_connection(alg, g)
    g_inv = tc.metric_inverse(g)

    def skew_endo(u: np.ndarray) -> np.ndarray:
        return tc.endo_from_bilinear(g_inv, tc.hodge(g, tc.flat(g, u), orientation))

    xi_endo = skew_endo(xi)
    xi_flat = tc.flat(g, xi)
    gamma_bar = np.array(gamma)
    basis = np.eye(3)
    for a in range(3):
        corr = -0.5 * f * skew_endo(basis[a]) + f * xi_flat[a] * xi_endo
        # gamma[a, b, m] stores the e_m coefficient of the derivative along e_a of e_b.
        gamma_bar[a] += corr.T
    return gamma_bar


def _lam12_inner(g_inv: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Inner product on one-form (x) two-form blocks with 2-form weight 1/2."""
    return 0.5 * float(np.einsum("acd,bef,ab,ce,df->", a, b, g_inv, g_inv, g_inv))


def verify_divergence_identities(
    sample: GeometrySample, kappa: float, tol: float = TOL_JET
) -> ResidualReport:
    """Evaluate the three divergence identities of the coupled system.

    The report carries, as max-abs over the frame directions,

    * ``div_curvature_square`` — the divergence of ``Rhat o Rhat`` against
      its twisted-divergence/norm-gradient/flux expansion,
    * ``div_torsion_square`` — the divergence of ``H o H`` against its
      expansion through the skew map and the flux constraint,
    * ``div_einstein_map`` — the divergence of the full symmetric map
      against the curvature, dilaton-gradient, skew and flux terms.

    All three are identities of the geometry: they hold for every sample
    regardless of whether any soliton equation is satisfied, so a failure
    indicates an implementation defect rather than a non-soliton input.
    """
    s = sample
    ginv = s.g_inv
    phi_up = ginv @ s.dilaton
    e_sym, e_skew, _, e_bianchi = einstein_maps(s, kappa)
    div_tw = s.div_riemann_tw

    # Divergence of the twisted-curvature square.
    lhs1 = -np.einsum("ab,abv->v", ginv, s.nabla_riemann_tw_sq)
    rhs1 = np.empty(s.n)
    for v in range(s.n):
        rhs1[v] = (
            _lam12_inner(ginv, div_tw, s.riemann_tw[v])
            - 0.5 * s.d_riemann_tw_norm2[v]
            - 0.5
            * (1.0 / 6.0)
            * np.einsum("abc,def,ad,be,cf->", s.torsion, s.riemann_tw_wedge[v], ginv, ginv, ginv)
        )

    # Divergence of the torsion square.
    lhs2 = -np.einsum("ab,abv->v", ginv, s.nabla_torsion_sq)
    rhs2 = np.empty(s.n)
    for v in range(s.n):
        rhs2[v] = (
            -0.5 * s.d_torsion_norm2[v]
            - float(phi_up @ s.torsion_sq[:, v])
            - kappa
            * (1.0 / 6.0)
            * np.einsum("abc,abc->", s.torsion, tc.raise_all(ginv, s.riemann_tw_wedge[v]))
            + np.einsum("cd,ef,ce,df->", e_skew, s.torsion[v], ginv, ginv)
            + (1.0 / 6.0) * np.einsum("abc,abc->", s.torsion, tc.raise_all(ginv, e_bianchi[v]))
        )

    # Divergence of the symmetric map.
    nabla_e = (
        s.nabla_ricci
        + s.nabla2_dilaton
        - 0.5 * s.nabla_torsion_sq
        + kappa * s.nabla_riemann_tw_sq
    )
    div_e = -np.einsum("ab,abv->v", ginv, nabla_e)
    phi_e = np.einsum("m,mv->v", phi_up, e_sym)
    tr_e_d = (
        s.d_scalar
        - s.d_delta_dilaton
        - 1.5 * s.d_torsion_norm2
        + 2.0 * kappa * s.d_riemann_tw_norm2
    )
    lhs3 = div_e + phi_e + 0.5 * tr_e_d
    d_e_dil = (
        s.d_delta_dilaton
        + s.d_dilaton_norm2
        - s.d_torsion_norm2
        + kappa * s.d_riemann_tw_norm2
    )
    phi_curv = np.einsum("m,macd->acd", phi_up, s.riemann_tw)
    rhs3 = np.empty(s.n)
    for v in range(s.n):
        rhs3[v] = (
            kappa * _lam12_inner(ginv, s.riemann_tw[v], div_tw + phi_curv)
            + 0.5 * d_e_dil[v]
            - 0.5 * np.einsum("cd,ef,ce,df->", e_skew, s.torsion[v], ginv, ginv)
            - 0.5 * (1.0 / 6.0) * np.einsum("abc,abc->", s.torsion, tc.raise_all(ginv, e_bianchi[v]))
        )

    eqs = {
        "div_curvature_square": EquationResidual(float(np.max(np.abs(lhs1 - rhs1))), tol),
        "div_torsion_square": EquationResidual(float(np.max(np.abs(lhs2 - rhs2))), tol),
        "div_einstein_map": EquationResidual(float(np.max(np.abs(lhs3 - rhs3))), tol),
    }
    meta = {"backend": s.backend, "dim": int(s.n), "kappa": float(kappa), "f": float(s.f)}
    return ResidualReport(eqs, meta=meta)
