"""Second moments, squeezing factor and coupling sweeps.

The EPR witness used throughout is the variance product of the commuting
pair (t_minus, p_plus): sqrt(<dt_-^2><dp_+^2>) = 1/(2s).  s = 1 for two
uncoupled junctions in their ground states and grows with the capacitive
coupling; s > 1 means the pair is correlated more tightly than either
junction's own uncertainty limit allows.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .discretization import (
    WaveFunction2D,
    build_h_2d_collective,
    collective_grid_for,
    first_derivative_matrix_4th,
    second_derivative_matrix,
)
from .errors import ValidationError
from .model import JunctionSystem, collective_masses, harmonic_reference
from .spectra import bo_ground_state, eigensolve


@dataclass(frozen=True)
class CovarianceReport:
    """Centered second moments of a two-mode state.

    Collective-mode variances plus the lab-frame cross correlations
    <dt1 dt2> and <dp1 dp2> obtained from the orthogonal mode transform,
    and the squeezing factor s = 1/(2 sqrt(<dt_-^2><dp_+^2>)).
    """

    var_theta_plus: float
    var_theta_minus: float
    var_p_plus: float
    var_p_minus: float
    cross_theta: float
    cross_p: float
    s: float
    state_label: tuple[int, int] | None = None

    def cross_theta_normalized(self, sys: JunctionSystem) -> float:
        return math.sqrt(sys.e_j / (2.0 * sys.e_c)) * self.cross_theta


def covariance(psi: WaveFunction2D, state_label: tuple[int, int] | None = None) -> CovarianceReport:
    """Second moments of theta_pm by quadrature and of p_pm by differentiation.

    Momentum moments apply the same finite-difference stencils as the
    Hamiltonian assembly, so boundary treatment is identical to the solve
    that produced the state.  Rejects states whose norm deviates from one
    by more than 1e-6.
    """
    nrm = psi.norm()
    if abs(nrm - 1.0) > 1e-6:
        raise ValidationError(f"covariance requires a normalized state (norm deviates by {abs(nrm-1):.2e})")

    gp, gm = psi.grid.axis_plus, psi.grid.axis_minus
    amps = psi.amplitudes
    w = psi.weights
    prob = w * np.abs(amps) ** 2

    tp = gp.points[:, None]
    tm = gm.points[None, :]
    mean_tp = float(np.sum(prob * tp))
    mean_tm = float(np.sum(prob * tm))
    var_tp = float(np.sum(prob * (tp - mean_tp) ** 2))
    var_tm = float(np.sum(prob * (tm - mean_tm) ** 2))

    d2p = second_derivative_matrix(gp.n, gp.step)
    d2m = second_derivative_matrix(gm.n, gm.step)
    d1p = first_derivative_matrix_4th(gp.n, gp.step)
    d1m = first_derivative_matrix_4th(gm.n, gm.step)

    conj = np.conj(amps)
    # <p^2> = <psi| -d^2 |psi>, <p> = <psi| -i d |psi>
    p2_plus = float(np.real(np.sum(w * conj * (-(d2p @ amps)))))
    p2_minus = float(np.real(np.sum(w * conj * (-(d2m @ amps.T).T))))
    p_plus = float(np.real(np.sum(w * conj * (-1j * (d1p @ amps)))))
    p_minus = float(np.real(np.sum(w * conj * (-1j * (d1m @ amps.T).T))))
    var_pp = p2_plus - p_plus**2
    var_pm = p2_minus - p_minus**2

    if min(var_tp, var_tm, var_pp, var_pm) < 0:
        raise ValidationError("negative variance: state is too poorly resolved")

    # t1 t2 = (t_+^2 - t_-^2)/2 and likewise for momenta (exact operator identity)
    cross_theta = 0.5 * (var_tp - var_tm)
    cross_p = 0.5 * (var_pp - var_pm)
    s = 1.0 / (2.0 * math.sqrt(var_tm * var_pp))
    return CovarianceReport(
        var_theta_plus=var_tp,
        var_theta_minus=var_tm,
        var_p_plus=var_pp,
        var_p_minus=var_pm,
        cross_theta=cross_theta,
        cross_p=cross_p,
        s=s,
        state_label=state_label,
    )


@dataclass(frozen=True)
class GridPolicy:
    """Sizing rules for the 2D solves in a coupling sweep."""

    points_per_sigma: float = 10.0
    span_sigmas: float = 7.0
    max_points_per_axis: int = 512
    min_points: int = 48

    def required_points(self) -> int:
        return int(math.ceil(2.0 * self.span_sigmas * self.points_per_sigma)) + 1


def ground_state_2d(sys: JunctionSystem, policy: GridPolicy = GridPolicy()) -> tuple[WaveFunction2D, str]:
    """Exact 2D ground state, or the factorized product state when the grid
    the policy asks for would exceed its per-axis cap.

    Returns the state and a method flag, "exact2d" or "bo".
    """
    needed = policy.required_points()
    grid = collective_grid_for(
        sys,
        points_per_sigma=policy.points_per_sigma,
        span_sigmas=policy.span_sigmas,
        max_points_per_axis=policy.max_points_per_axis,
        min_points=policy.min_points,
    )
    if needed > policy.max_points_per_axis:
        return bo_ground_state(sys, grid), "bo"
    masses = collective_masses(sys)
    h = build_h_2d_collective(grid, masses, sys)
    spectrum = eigensolve(h, 1)
    psi = spectrum.wavefunction(0)
    return psi.normalized(), "exact2d"


@dataclass(frozen=True)
class SweepRow:
    zeta: float
    log10_inv_one_minus_zeta: float
    s_numeric: float
    s_harmonic: float
    cross_theta_norm_numeric: float
    cross_theta_norm_harmonic: float
    cross_p: float
    method_flag: str


SWEEP_COLUMNS = (
    "zeta",
    "log10_inv_one_minus_zeta",
    "s_numeric",
    "s_harmonic",
    "cross_theta_norm_numeric",
    "cross_theta_norm_harmonic",
    "cross_p",
    "method_flag",
)


def _sweep_row(sys: JunctionSystem, policy: GridPolicy) -> SweepRow:
    ref = harmonic_reference(sys)
    log_axis = math.log10(1.0 / (1.0 - sys.zeta)) if sys.zeta > 0 else 0.0
    try:
        psi, flag = ground_state_2d(sys, policy)
        rep = covariance(psi, state_label=(0, 0))
        return SweepRow(
            zeta=sys.zeta,
            log10_inv_one_minus_zeta=log_axis,
            s_numeric=rep.s,
            s_harmonic=ref.s_harmonic,
            cross_theta_norm_numeric=rep.cross_theta_normalized(sys),
            cross_theta_norm_harmonic=ref.cross_theta_norm,
            cross_p=rep.cross_p,
            method_flag=flag,
        )
    except Exception as exc:  # row failures are recorded, the sweep continues
        return SweepRow(
            zeta=sys.zeta,
            log10_inv_one_minus_zeta=log_axis,
            s_numeric=float("nan"),
            s_harmonic=ref.s_harmonic,
            cross_theta_norm_numeric=float("nan"),
            cross_theta_norm_harmonic=ref.cross_theta_norm,
            cross_p=float("nan"),
            method_flag=f"failed:{type(exc).__name__}",
        )


def zeta_sweep(
    sys_template: JunctionSystem,
    zetas,
    policy: GridPolicy = GridPolicy(),
    workers: int = 1,
) -> list[SweepRow]:
    """Ground-state covariance row per coupling value, ordered as given.

    Rows are independent; with workers > 1 they run on a thread pool and are
    still emitted in input order.
    """
    systems = [sys_template.with_zeta(float(z)) for z in zetas]
    if workers <= 1:
        return [_sweep_row(s, policy) for s in systems]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: _sweep_row(s, policy), systems))
