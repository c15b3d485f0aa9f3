"""Uniform grids, wavefunctions and finite-difference Hamiltonians.

Second derivatives use the 5-point fourth-order central stencil

    f''(x) ~ (-f[i-2] + 16 f[i-1] - 30 f[i] + 16 f[i+1] - f[i+2]) / (12 h^2)

with hard-wall (Dirichlet) boundaries: stencil legs that leave the grid read
zeros, which pins the wavefunction to zero one step outside either edge.  The
mixed p1*p2 term of the lab-frame kinetic energy uses the 9-point product of
two 3-point first-derivative stencils.  All inner products are trapezoidal,
whose error is subordinate to the stencil error on decaying states.

Assembled operators are immutable sparse matrices and exactly symmetric by
construction; grids and wavefunctions are frozen values, so everything here
can be shared freely across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError
from .model import CollectiveMasses, JunctionSystem, harmonic_reference, potential_2d, potential_lab

GRID2D_POINT_CAP = 512 * 512


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of n points spanning [min, max] inclusive."""

    min: float
    max: float
    n: int

    def __post_init__(self) -> None:
        if self.n < 16:
            raise ValidationError(f"grid needs at least 16 points, got {self.n}")
        if not self.max > self.min:
            raise ValidationError("grid max must exceed min")

    @property
    def step(self) -> float:
        return (self.max - self.min) / (self.n - 1)

    @cached_property
    def points(self) -> np.ndarray:
        pts = np.linspace(self.min, self.max, self.n)
        pts.flags.writeable = False
        return pts

    @cached_property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n, self.step)
        w[0] *= 0.5
        w[-1] *= 0.5
        w.flags.writeable = False
        return w


@dataclass(frozen=True)
class Grid2D:
    """Product grid; axis_plus runs along the first (outer) array axis."""

    axis_plus: Grid1D
    axis_minus: Grid1D
    cap: int = GRID2D_POINT_CAP

    def __post_init__(self) -> None:
        if self.total_points > self.cap:
            raise ValidationError(
                f"2D grid of {self.axis_plus.n} x {self.axis_minus.n} points exceeds the cap {self.cap}"
            )

    @property
    def total_points(self) -> int:
        return self.axis_plus.n * self.axis_minus.n

    def meshes(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis_plus.points, self.axis_minus.points, indexing="ij")


def _normalized(amplitudes: np.ndarray, weights) -> np.ndarray:
    nrm = math.sqrt(float(np.real(np.sum(weights * np.abs(amplitudes) ** 2))))
    if not (nrm > 0.0 and math.isfinite(nrm)):
        raise ValidationError("cannot normalize a zero or non-finite wavefunction")
    out = np.asarray(amplitudes, dtype=complex) / nrm
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class WaveFunction1D:
    grid: Grid1D
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.n,):
            raise ValidationError("amplitude array does not match the grid")
        if not np.all(np.isfinite(amps.view(float))):
            raise ValidationError("wavefunction amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        w = self.grid.trapezoid_weights
        return math.sqrt(float(np.sum(w * np.abs(self.amplitudes) ** 2)))

    def normalized(self) -> "WaveFunction1D":
        return WaveFunction1D(self.grid, _normalized(self.amplitudes, self.grid.trapezoid_weights))

    def overlap(self, other: "WaveFunction1D") -> complex:
        if other.grid != self.grid:
            raise ValidationError("overlap requires matching grids")
        w = self.grid.trapezoid_weights
        return complex(np.sum(w * np.conj(self.amplitudes) * other.amplitudes))

    def probability_density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class WaveFunction2D:
    """Complex amplitudes on a Grid2D, row-major with axis_plus outer."""

    grid: Grid2D
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        shape = (self.grid.axis_plus.n, self.grid.axis_minus.n)
        if amps.shape != shape:
            raise ValidationError(f"amplitude array {amps.shape} does not match grid {shape}")
        if not np.all(np.isfinite(amps.view(float))):
            raise ValidationError("wavefunction amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def weights(self) -> np.ndarray:
        return np.outer(self.grid.axis_plus.trapezoid_weights, self.grid.axis_minus.trapezoid_weights)

    def norm(self) -> float:
        return math.sqrt(float(np.sum(self.weights * np.abs(self.amplitudes) ** 2)))

    def normalized(self) -> "WaveFunction2D":
        return WaveFunction2D(self.grid, _normalized(self.amplitudes, self.weights))

    def overlap(self, other: "WaveFunction2D") -> complex:
        if other.grid != self.grid:
            raise ValidationError("overlap requires matching grids")
        return complex(np.sum(self.weights * np.conj(self.amplitudes) * other.amplitudes))


@dataclass(frozen=True, eq=False)
class HamiltonianOperator:
    """Sparse symmetric real Hamiltonian over a grid.

    potential holds the diagonal potential samples (flattened for 2D);
    escape_barrier is the lowest adjacent barrier top of the potential
    restricted to the solver domain, used for bound/unbound classification.
    """

    matrix: sp.csr_matrix
    grid: Grid1D | Grid2D
    potential: np.ndarray
    description: str
    escape_barrier: float | None = None
    mass_info: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        n = self.matrix.shape[0]
        expected = self.grid.n if isinstance(self.grid, Grid1D) else self.grid.total_points
        if self.matrix.shape != (n, n) or n != expected:
            raise ValidationError("operator shape does not match its grid")
        asym = abs(self.matrix - self.matrix.T)
        max_asym = asym.max() if asym.nnz else 0.0
        scale = max(abs(self.matrix).max(), 1.0)
        if max_asym > 1e-12 * scale:
            raise ValidationError(f"assembled operator is not symmetric (max asymmetry {max_asym:g})")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def second_derivative_matrix(n: int, step: float, periodic: bool = False) -> sp.csr_matrix:
    """Fourth-order d^2/dx^2 with zero (or periodic) closure outside the grid."""
    main = np.full(n, -30.0)
    off1 = np.full(n - 1, 16.0)
    off2 = np.full(n - 2, -1.0)
    d2 = sp.diags([off2, off1, main, off1, off2], [-2, -1, 0, 1, 2], format="lil")
    if periodic:
        d2[0, -1] = 16.0
        d2[0, -2] = -1.0
        d2[1, -1] = -1.0
        d2[-1, 0] = 16.0
        d2[-1, 1] = -1.0
        d2[-2, 0] = -1.0
    return (d2 / (12.0 * step * step)).tocsr()


def first_derivative_matrix(n: int, step: float) -> sp.csr_matrix:
    """3-point antisymmetric d/dx (zero outside the grid)."""
    off = np.full(n - 1, 1.0)
    return (sp.diags([-off, off], [-1, 1], format="csr") / (2.0 * step)).tocsr()


def first_derivative_matrix_4th(n: int, step: float) -> sp.csr_matrix:
    """5-point antisymmetric d/dx, same order as the kinetic stencil."""
    off1 = np.full(n - 1, 8.0)
    off2 = np.full(n - 2, -1.0)
    return (sp.diags([-off2, -off1, off1, off2], [-2, -1, 1, 2], format="csr") / (12.0 * step)).tocsr()


def _potential_samples(potential, points: np.ndarray) -> np.ndarray:
    values = potential(points) if callable(potential) else np.asarray(potential, dtype=float)
    values = np.broadcast_to(np.asarray(values, dtype=float), points.shape).copy()
    if not np.all(np.isfinite(values)):
        raise ValidationError("potential is not finite on the grid")
    return values


def _escape_barrier_1d(values: np.ndarray) -> float:
    """Lowest of the two directional maxima seen from the global minimum."""
    i0 = int(np.argmin(values))
    left = values[: i0 + 1].max() if i0 > 0 else values[0]
    right = values[i0:].max()
    return float(min(left, right))


def _escape_barrier_2d(values: np.ndarray) -> float:
    ip, im = np.unravel_index(int(np.argmin(values)), values.shape)
    row = values[ip, :]
    col = values[:, im]
    candidates = [
        col[: ip + 1].max() if ip > 0 else col[0],
        col[ip:].max(),
        row[: im + 1].max() if im > 0 else row[0],
        row[im:].max(),
    ]
    return float(min(candidates))


def build_h_1d(
    grid: Grid1D,
    mass: float,
    potential: Callable[[np.ndarray], np.ndarray] | np.ndarray,
    periodic: bool = False,
    description: str = "1d",
) -> HamiltonianOperator:
    """Assemble -(1/2m) d^2/dt^2 + V(t) on the grid.

    With periodic=True the stencil wraps around; pass a grid whose last
    point stops one step short of the period in that case.
    """
    if mass <= 0:
        raise ValidationError("mass must be positive")
    values = _potential_samples(potential, grid.points)
    d2 = second_derivative_matrix(grid.n, grid.step, periodic=periodic)
    h = (-0.5 / mass) * d2 + sp.diags(values)
    return HamiltonianOperator(
        matrix=h.tocsr(),
        grid=grid,
        potential=values,
        description=description,
        escape_barrier=_escape_barrier_1d(values),
        mass_info=(mass,),
    )


def build_h_2d_collective(
    grid: Grid2D,
    masses: CollectiveMasses,
    sys: JunctionSystem,
    potential_override: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
) -> HamiltonianOperator:
    """Collective-frame Hamiltonian: axis-separable kinetic terms, full potential.

    potential_override(tp_mesh, tm_mesh) substitutes the diagonal, e.g. a
    quadratic truncation used as an analytic test oracle.
    """
    tp, tm = grid.meshes()
    values = (potential_override or (lambda a, b: potential_2d(sys, a, b)))(tp, tm)
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValidationError("potential is not finite on the grid")
    np_, nm = grid.axis_plus.n, grid.axis_minus.n
    d2p = second_derivative_matrix(np_, grid.axis_plus.step)
    d2m = second_derivative_matrix(nm, grid.axis_minus.step)
    kin = sp.kron((-0.5 / masses.m_plus) * d2p, sp.identity(nm)) + sp.kron(
        sp.identity(np_), (-0.5 / masses.m_minus) * d2m
    )
    h = kin + sp.diags(values.ravel())
    return HamiltonianOperator(
        matrix=h.tocsr(),
        grid=grid,
        potential=values.ravel(),
        description="2d-collective",
        escape_barrier=_escape_barrier_2d(values),
        mass_info=(masses.m_plus, masses.m_minus),
    )


def build_h_2d_lab(grid: Grid2D, sys: JunctionSystem) -> HamiltonianOperator:
    """Lab-frame Hamiltonian with the mixed 2 zeta p1 p2 kinetic term.

    The cross term uses the 9-point product of 3-point first derivatives,
    which keeps the matrix exactly symmetric; the axis grids here carry the
    junction coordinates t1 (outer) and t2 (inner).
    """
    t1, t2 = grid.meshes()
    values = np.asarray(potential_lab(sys, t1, t2), dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValidationError("potential is not finite on the grid")
    n1, n2 = grid.axis_plus.n, grid.axis_minus.n
    coeff = 4.0 * sys.e_c / (1.0 + sys.zeta)
    d2a = second_derivative_matrix(n1, grid.axis_plus.step)
    d2b = second_derivative_matrix(n2, grid.axis_minus.step)
    d1a = first_derivative_matrix(n1, grid.axis_plus.step)
    d1b = first_derivative_matrix(n2, grid.axis_minus.step)
    # p^2 -> -d^2, p1 p2 -> -d1 x d1
    kin = coeff * (
        sp.kron(-d2a, sp.identity(n2))
        + sp.kron(sp.identity(n1), -d2b)
        + 2.0 * sys.zeta * sp.kron(-d1a, d1b)
    )
    h = kin + sp.diags(values.ravel())
    return HamiltonianOperator(
        matrix=h.tocsr(),
        grid=grid,
        potential=values.ravel(),
        description="2d-lab",
        escape_barrier=_escape_barrier_2d(values),
        mass_info=(1.0 / (8.0 * sys.e_c),),
    )


def boundary_amplitude_ratio(psi: WaveFunction1D | WaveFunction2D) -> float:
    """Peak-relative amplitude on the domain boundary.

    Values above ~1e-6 indicate the Dirichlet box clips the state and the
    domain should be enlarged.
    """
    amps = np.abs(psi.amplitudes)
    peak = amps.max()
    if peak == 0.0:
        return 0.0
    if amps.ndim == 1:
        edge = max(amps[0], amps[-1])
    else:
        edge = max(amps[0, :].max(), amps[-1, :].max(), amps[:, 0].max(), amps[:, -1].max())
    return float(edge / peak)


def washboard_grid(j: float = 0.0, n: int = 401, padding: float = 0.0) -> Grid1D:
    """Barrier-to-barrier domain for a single tilted washboard well.

    For J = 0 this is [-pi, pi]; for J != 0 the box runs between the two
    barrier tops adjacent to the arcsin(J) minimum, optionally padded.
    """
    from .model import washboard_barriers

    lo, hi = washboard_barriers(j)
    return Grid1D(lo - padding, hi + padding, n)


def collective_grid_for(
    sys: JunctionSystem,
    points_per_sigma: float = 10.0,
    span_sigmas: float = 7.0,
    max_points_per_axis: int = 512,
    min_points: int = 48,
    cap: int = GRID2D_POINT_CAP,
) -> Grid2D:
    """Mode-adapted collective grid sized from the harmonic ground-state widths.

    Each axis spans +-span_sigmas standard deviations of the corresponding
    harmonic mode and is sampled at points_per_sigma; per-axis point counts
    are clipped to max_points_per_axis.
    """
    ref = harmonic_reference(sys)
    n = int(math.ceil(2.0 * span_sigmas * points_per_sigma)) + 1
    n = max(min_points, min(n, max_points_per_axis))
    sig_p = math.sqrt(ref.var_theta_plus)
    sig_m = math.sqrt(ref.var_theta_minus)
    axis_p = Grid1D(-span_sigmas * sig_p, span_sigmas * sig_p, n)
    axis_m = Grid1D(-span_sigmas * sig_m, span_sigmas * sig_m, n)
    return Grid2D(axis_p, axis_m, cap=cap)
