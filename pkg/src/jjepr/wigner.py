"""Phase-space transform of one-mode states.

W(t, p) = (1/pi) integral dy rho(t + y, t - y) e^{-2 i p y}

evaluated on the stored grid: for a uniform grid the anti-diagonal slice
rho(t_i + y, t_i - y) is available exactly at y = m * step, so the integral
is a plain lattice sum with zero padding outside the box (consistent with
hard-wall solver states).  The p axis is arbitrary; sampling it finer than
pi / (box half-width) keeps the lattice sum alias-free, which is what makes
the marginal identities hold to quadrature precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discretization import Grid1D, WaveFunction1D
from .errors import NumericalError, ValidationError
from .teleport import DensityMatrix1D


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """Real phase-space table W(theta, p) with its two axes."""

    theta_axis: Grid1D
    p_axis: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.theta_axis.n, self.p_axis.n):
            raise ValidationError("Wigner table shape does not match its axes")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def mass(self) -> float:
        return float(self.values.sum()) * self.theta_axis.step * self.p_axis.step

    def theta_marginal(self) -> np.ndarray:
        return self.values.sum(axis=1) * self.p_axis.step


def default_p_axis(rho: DensityMatrix1D, n: int = 257, span_sigmas: float = 7.0) -> Grid1D:
    """Symmetric momentum axis covering the state's momentum spread."""
    grid = rho.grid
    h = grid.step
    m = rho.matrix
    # <p^2> = Tr(rho (-d^2)) with the same 5-point stencil as the solvers
    lap = np.zeros_like(m)
    lap[:] = -30.0 * m
    lap[:-1] += 16.0 * m[1:]
    lap[1:] += 16.0 * m[:-1]
    lap[:-2] += -1.0 * m[2:]
    lap[2:] += -1.0 * m[:-2]
    lap /= 12.0 * h * h
    p2 = -float(np.real(np.trace(lap))) * h
    sigma = math.sqrt(max(p2, 1e-12))
    span = span_sigmas * sigma
    return Grid1D(-span, span, n)


def wigner_of_density(
    rho: DensityMatrix1D,
    p_axis: Grid1D | None = None,
    marginal_tol: float = 1e-6,
    pure_input: bool = False,
) -> WignerGrid:
    """Wigner table of a density matrix.

    Centers run on the half-step lattice (2n - 1 points): the anti-diagonal
    of rho through the midpoint of two grid points is itself exactly grid
    sampled, and with both center parities present the transform is
    invertible on the grid (see density_from_wigner).  Raises when the p
    axis is too coarse for the box (aliasing) or when the theta marginal
    disagrees with the diagonal of rho beyond marginal_tol, which catches an
    insufficient p range.  With pure_input the magnitude bound
    |W| <= 1/pi is asserted as well.
    """
    p_axis = p_axis or default_p_axis(rho)
    grid = rho.grid
    h = grid.step
    half_width = 0.5 * (grid.max - grid.min)
    if p_axis.step > math.pi / half_width:
        raise NumericalError(
            f"p-axis step {p_axis.step:g} aliases the box; need <= {math.pi / half_width:g}"
        )
    n = grid.n
    pax = p_axis.points
    m = rho.matrix
    n_centers = 2 * n - 1
    w = np.empty((n_centers, p_axis.n))
    for k in range(n_centers):
        a = np.arange(max(0, k - n + 1), min(k, n - 1) + 1)
        slice_vals = m[a, k - a]
        y = (a - 0.5 * k) * h
        phases = np.exp(-2j * np.outer(y, pax))
        w[k] = np.real(slice_vals @ phases) * h / math.pi

    centers = Grid1D(grid.min, grid.max, n_centers)
    table = WignerGrid(theta_axis=centers, p_axis=p_axis, values=w)
    marg_err = float(np.abs(table.theta_marginal()[::2] - np.real(np.diag(m))).max())
    if marg_err > marginal_tol:
        raise NumericalError(
            f"theta marginal off by {marg_err:.2e} (> {marginal_tol:g}); p axis range is insufficient"
        )
    mass = table.mass()
    if abs(mass - 1.0) > 1e-6:
        raise NumericalError(f"Wigner mass {mass} deviates from 1; p axis range is insufficient")
    if pure_input and float(np.abs(w).max()) > 1.0 / math.pi + 1e-6:
        raise NumericalError("pure-state bound |W| <= 1/pi violated; state is under-resolved")
    return table


def density_from_wigner(w: WignerGrid, grid: Grid1D) -> DensityMatrix1D:
    """Inverse transform back to rho(t, t') on the state grid.

    rho(c + y, c - y) = integral W(c, p) e^{2ipy} dp, with every matrix
    entry's center c on the Wigner table's half-step lattice.  Requires a
    table produced by wigner_of_density for the same state grid.
    """
    n = grid.n
    if w.theta_axis.n != 2 * n - 1 or w.theta_axis.min != grid.min or w.theta_axis.max != grid.max:
        raise ValidationError("Wigner table centers do not match the target grid")
    h = grid.step
    pax = w.p_axis.points
    dp = w.p_axis.step
    rho = np.empty((n, n), dtype=complex)
    for k in range(2 * n - 1):
        a = np.arange(max(0, k - n + 1), min(k, n - 1) + 1)
        y = (a - 0.5 * k) * h
        phases = np.exp(2j * np.outer(pax, y))
        rho[a, k - a] = (w.values[k] @ phases) * dp
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix1D(grid, rho / (np.real(np.trace(rho)) * h))


def wigner_of_state(psi: WaveFunction1D, p_axis: Grid1D | None = None) -> WignerGrid:
    return wigner_of_density(DensityMatrix1D.pure(psi), p_axis=p_axis, pure_input=True)


def wigner_overlap_fidelity(w_in: WignerGrid, w_out: WignerGrid) -> float:
    """Overlap 2 pi integral(W_in W_out); equals <psi|rho|psi> for pure inputs."""
    if w_in.theta_axis != w_out.theta_axis or w_in.p_axis != w_out.p_axis:
        raise ValidationError("Wigner overlap requires matching axes")
    return (
        2.0
        * math.pi
        * float(np.sum(w_in.values * w_out.values))
        * w_in.theta_axis.step
        * w_in.p_axis.step
    )


def gaussian_blur(w: WignerGrid, var_theta: float, var_p: float) -> WignerGrid:
    """Convolve a Wigner table with a separable Gaussian kernel.

    This is the phase-space form of the additive noise channel; kernels are
    sampled on each axis lattice and unit-normalized, matching the lattice
    quadrature used by the position-representation channel.
    """
    vals = w.values
    if var_theta > 0:
        vals = _convolve_axis(vals, var_theta, w.theta_axis.step, axis=0)
    if var_p > 0:
        vals = _convolve_axis(vals, var_p, w.p_axis.step, axis=1)
    return WignerGrid(theta_axis=w.theta_axis, p_axis=w.p_axis, values=vals)


def _convolve_axis(values: np.ndarray, var: float, step: float, axis: int) -> np.ndarray:
    kmax = int(math.ceil(6.0 * math.sqrt(var) / step))
    ks = np.arange(-kmax, kmax + 1)
    kern = np.exp(-((ks * step) ** 2) / (2.0 * var))
    kern /= kern.sum()
    moved = np.moveaxis(values, axis, 0)
    out = np.zeros_like(moved)
    n = moved.shape[0]
    for k, wk in zip(ks, kern):
        if k == 0:
            out += wk * moved
        elif k > 0:
            out[k:] += wk * moved[:-k]
        else:
            out[:k] += wk * moved[-k:]
    return np.moveaxis(out, 0, axis)
