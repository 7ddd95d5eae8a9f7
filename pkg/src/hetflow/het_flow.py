"""Curvature-corrected torsion flow on left-invariant data.

The flow couples a metric, a closed 3-form torsion, and a coupling constant
``kappa >= 0``.  Two right-hand sides are provided:

* :func:`rhs_general` evolves ``(g, H)`` in any dimension:
  ``g' = -2 Ric + hoh_coeff * HoH - 2 kappa sym(RhoR)`` with ``HoH`` the
  half-normalized torsion square and ``Rh`` the curvature of the metric
  connection with torsion ``-H``; ``H' = -d delta H``.
* :func:`rhs_3d` evolves the three-dimensional reduction ``(g, f)`` with
  ``H = f vol_g``, where every curvature contraction collapses to Ricci data:

  ``g' = 2k Ric.Ric - (2 + k(2s - f^2)) Ric
         + (hoh_coeff f^2 + k(s^2 - 2|Ric|^2 - f^4/4)) g``,
  ``f' = -1/2 Tr_g(g') f``.

  Gradient terms of ``f`` (``[*df, Ric]``, ``df (x) df``, ``|df|^2``, and the
  Laplacian in ``f'``) vanish identically on invariant data and are omitted.

``hoh_coeff = 1.0`` is the default torsion-square coefficient; it is the
unique choice under which the general rhs, the 3D reduction, and the soliton
residuals agree (``hoh_coeff = 2.0`` selects the alternative normalization
that doubles the ``HoH`` term, exposed for comparison only).

Flows are integrated only on invariant data; pointwise chart samples are
never integrated.  Both fixed-point families of the soliton module are
stationary under :func:`rhs_3d`, and on Einstein initial data the flow
preserves the conformal family so that the metric trace obeys a scalar ODE.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import tensor_core as tc
from .homogeneous import (
    LieAlgebraData,
    connection_twisted,
    invariant_cov_deriv,
    invariant_d,
    invariant_riemann,
    levi_civita_connection,
)

__all__ = [
    "FlowState3",
    "FlowParams",
    "FlowEvent3",
    "FlowTrajectory",
    "rhs_3d",
    "rhs_general",
    "bianchi_residual",
    "dilaton_rhs",
    "integrate_flow",
]

EPS_DEGENERATE = 1e-8
M_BLOWUP = 1e8


@dataclass
class FlowState3:
    """Invariant three-dimensional configuration ``(g, f)`` at time ``t``.

    ``f`` is the torsion density (``H = f vol_g``); the orientation entering
    ``vol_g`` is fixed to +1 throughout (the rhs is even in the density, so
    the choice never matters on invariant data).
    """

    algebra: LieAlgebraData
    g: np.ndarray
    f: float
    t: float = 0.0

    def __post_init__(self) -> None:
        if self.algebra.dim != 3:
            raise ValueError("FlowState3 requires a three-dimensional algebra")
        g = np.asarray(self.g, dtype=float)
        if not np.all(np.isfinite(g)) or not np.isfinite(self.f):
            raise ValueError("flow state entries must be finite")
        tc.validate_metric(g)
        self.g = g
        self.f = float(self.f)


@dataclass(frozen=True)
class FlowParams:
    """Coupling constant, tolerances, and output control for one integration."""

    kappa: float
    t_span: tuple = (0.0, 1.0)
    rtol: float = 1e-10
    atol: float = 1e-12
    n_points: int = 201
    hoh_coeff: float = 1.0

    def __post_init__(self) -> None:
        if self.kappa < 0.0:
            raise ValueError("kappa must be non-negative")
        if self.n_points < 2:
            raise ValueError("n_points must be at least 2")


@dataclass(frozen=True)
class FlowEvent3:
    kind: str  # "degenerate" | "blowup"
    t: float
    detail: float


@dataclass(frozen=True)
class FlowTrajectory:
    algebra: LieAlgebraData
    params: FlowParams
    t: np.ndarray
    g: np.ndarray  # (n_samples, 3, 3)
    f: np.ndarray  # (n_samples,)
    events: tuple
    status: str

    @property
    def torsion_volume(self) -> np.ndarray:
        """Conserved coupling ``f sqrt(det g)`` sampled along the flow."""
        return self.f * np.sqrt(np.linalg.det(self.g))


def _curvature_data(alg: LieAlgebraData, g: np.ndarray):
    g_inv = tc.metric_inverse(g)
    gamma = levi_civita_connection(alg, g)
    riemann = invariant_riemann(alg, g, gamma)
    ricci = tc.ricci_from_riemann(g, riemann)
    scalar = tc.scalar_curvature(g, ricci)
    return g_inv, gamma, ricci, scalar


def _rhs_3d_core(alg: LieAlgebraData, g: np.ndarray, f: float, kappa: float, hoh_coeff: float) -> tuple:
    g_inv, _, ricci, scalar = _curvature_data(alg, g)
    ric_comp = ricci @ g_inv @ ricci
    ric_norm2 = float(np.einsum("ab,cd,ac,bd->", ricci, ricci, g_inv, g_inv))
    g_dot = (
        2.0 * kappa * ric_comp
        - (2.0 + kappa * (2.0 * scalar - f * f)) * ricci
        + (hoh_coeff * f * f + kappa * (scalar**2 - 2.0 * ric_norm2 - 0.25 * f**4)) * g
    )
    f_dot = -0.5 * float(np.einsum("ab,ab->", g_inv, g_dot)) * f
    return g_dot, f_dot


def rhs_3d(state: FlowState3, kappa: float, hoh_coeff: float = 1.0) -> tuple:
    """Time derivative ``(g', f')`` of the three-dimensional reduction."""
    if kappa < 0.0:
        raise ValueError("kappa must be non-negative")
    tc.validate_metric(state.g)
    return _rhs_3d_core(state.algebra, state.g, state.f, kappa, hoh_coeff)


def _twisted_riemann(alg: LieAlgebraData, g: np.ndarray, torsion: np.ndarray) -> np.ndarray:
    gamma_tw = connection_twisted(alg, g, torsion)
    return invariant_riemann(alg, g, gamma_tw)


def rhs_general(
    alg: LieAlgebraData,
    g: np.ndarray,
    torsion: np.ndarray,
    kappa: float,
    hoh_coeff: float = 1.0,
) -> tuple:
    """Time derivative ``(g', H')`` of the unreduced flow in any dimension.

    ``H' = -d delta H`` vanishes on three-dimensional invariant torsion
    (``delta(f vol) = 0`` there) but is generically nonzero from dimension
    four on.
    """
    if kappa < 0.0:
        raise ValueError("kappa must be non-negative")
    g = np.asarray(g, dtype=float)
    torsion = np.asarray(torsion, dtype=float)
    tc.validate_metric(g)
    g_inv, gamma, ricci, _ = _curvature_data(alg, g)
    riemann_tw = _twisted_riemann(alg, g, torsion)
    rr = tc.riemann_square(g, riemann_tw)
    g_dot = (
        -2.0 * ricci
        + hoh_coeff * tc.torsion_square(g, torsion)
        - 2.0 * kappa * 0.5 * (rr + rr.T)
    )
    nabla_torsion = invariant_cov_deriv(gamma, torsion)
    delta_torsion = tc.codifferential_from_nabla(g_inv, nabla_torsion)
    h_dot = -invariant_d(alg, delta_torsion)
    return g_dot, h_dot


def bianchi_residual(alg: LieAlgebraData, g: np.ndarray, torsion: np.ndarray, kappa: float) -> np.ndarray:
    """Constraint 4-form ``dH + kappa <Rh ^ Rh>`` (identically zero in dim 3)."""
    g = np.asarray(g, dtype=float)
    torsion = np.asarray(torsion, dtype=float)
    tc.validate_metric(g)
    riemann_tw = _twisted_riemann(alg, g, torsion)
    return invariant_d(alg, torsion) + kappa * tc.riemann_wedge_riemann(g, riemann_tw)


def dilaton_rhs(state: FlowState3, kappa: float) -> float:
    """Scalar rate ``(|H|^2 - kappa |Rh|^2) / 2`` driving the density weight.

    The codifferential/Laplacian contribution vanishes on invariant data.
    Zero on both constant-density fixed points (stationarity).
    """
    g, f = state.g, state.f
    torsion = f * tc.volume_form(g)
    riemann_tw = _twisted_riemann(state.algebra, g, torsion)
    h_norm2 = tc.torsion_norm2(g, torsion)
    return 0.5 * (h_norm2 - kappa * tc.riemann_norm2(g, riemann_tw))


_TRIU = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


def _pack(g: np.ndarray, f: float) -> np.ndarray:
    return np.array([g[i, j] for i, j in _TRIU] + [f])


def _unpack(y: np.ndarray) -> tuple:
    g = np.empty((3, 3))
    for val, (i, j) in zip(y[:6], _TRIU):
        g[i, j] = val
        g[j, i] = val
    return g, float(y[6])


def integrate_flow(state: FlowState3, params: FlowParams) -> FlowTrajectory:
    """Integrate the 3D reduction from ``state`` over ``params.t_span``.

    Terminal events: metric degeneration (smallest eigenvalue of ``g``
    reaching ``1e-8``) and blow-up (largest entry magnitude reaching
    ``1e8``).  The trajectory is sampled on ``n_points`` uniform times up to
    the end or the first event.
    """
    alg = state.algebra

    def rhs(t, y):
        # Trial steps may momentarily leave the SPD cone near a degeneration;
        # returning NaN makes the stepper reject and shrink instead of dying.
        g, f = _unpack(y)
        try:
            g_dot, f_dot = _rhs_3d_core(alg, g, f, params.kappa, params.hoh_coeff)
        except np.linalg.LinAlgError:
            return np.full(7, np.nan)
        return _pack(g_dot, f_dot)

    def ev_degenerate(t, y):
        g, _ = _unpack(y)
        return float(np.min(np.linalg.eigvalsh(g))) - EPS_DEGENERATE

    def ev_blowup(t, y):
        return float(np.max(np.abs(y[:6]))) - M_BLOWUP

    ev_degenerate.terminal = True
    ev_degenerate.direction = -1
    ev_blowup.terminal = True
    ev_blowup.direction = 1

    sol = solve_ivp(
        rhs,
        params.t_span,
        _pack(state.g, state.f),
        method="RK45",
        rtol=params.rtol,
        atol=params.atol,
        dense_output=True,
        events=[ev_degenerate, ev_blowup],
    )
    if sol.status == -1:
        # Step-size underflow.  Approaches to a singular metric can be too
        # steep for double-precision time stepping, leaving the eigenvalue /
        # magnitude thresholds unreachable; when the final state is
        # unambiguously degenerating or blowing up, the terminal event is
        # emitted at the last resolvable time (within machine precision of
        # the singular time).  Any other underflow is re-raised.
        t_u = float(sol.t[-1])
        g_u, f_u = _unpack(sol.y[:, -1])
        completed = None
        try:
            eigvals, eigvecs = np.linalg.eigh(g_u)
            g_dot_u, _ = _rhs_3d_core(alg, g_u, f_u, params.kappa, params.hoh_coeff)
            v_min = eigvecs[:, 0]
            min_rate = float(v_min @ g_dot_u @ v_min)
            if eigvals[0] <= 0.0 or (eigvals[0] <= 0.1 and min_rate < 0.0):
                completed = FlowEvent3(kind="degenerate", t=t_u, detail=float(eigvals[0]))
            elif float(np.max(np.abs(g_u))) >= 1e6 and float(np.max(np.abs(g_dot_u))) > 0.0:
                completed = FlowEvent3(kind="blowup", t=t_u, detail=float(np.max(np.abs(g_u))))
        except (ValueError, np.linalg.LinAlgError):
            completed = None
        if completed is None:
            raise RuntimeError(f"flow integration failed: {sol.message}")
        ts = np.linspace(params.t_span[0], t_u, params.n_points)
        ys = sol.sol(ts)
        gs = np.empty((params.n_points, 3, 3))
        fs = np.empty(params.n_points)
        for k in range(params.n_points):
            gs[k], fs[k] = _unpack(ys[:, k])
        return FlowTrajectory(
            algebra=alg,
            params=params,
            t=ts,
            g=gs,
            f=fs,
            events=(completed,),
            status="event",
        )

    ts = np.linspace(params.t_span[0], float(sol.t[-1]), params.n_points)
    ys = sol.sol(ts)
    gs = np.empty((params.n_points, 3, 3))
    fs = np.empty(params.n_points)
    for k in range(params.n_points):
        gs[k], fs[k] = _unpack(ys[:, k])

    found = []
    for kind, t_ev, y_ev in zip(("degenerate", "blowup"), sol.t_events, sol.y_events):
        for te, ye in zip(t_ev, y_ev):
            g_ev, _ = _unpack(ye)
            detail = float(np.min(np.linalg.eigvalsh(g_ev))) if kind == "degenerate" else float(np.max(np.abs(ye[:6])))
            found.append(FlowEvent3(kind=kind, t=float(te), detail=detail))
    found.sort(key=lambda e: abs(e.t))

    return FlowTrajectory(
        algebra=alg,
        params=params,
        t=ts,
        g=gs,
        f=fs,
        events=tuple(found),
        status="event" if found else "completed",
    )
