"""Eigensolvers and the fast/slow-mode factorization machinery.

The 2D coupled problem separates approximately when the slow (-) mode is much
heavier than the fast (+) mode: the fast mode is solved at frozen slow
coordinate, producing energy curves eps_n(t_minus), and the slow mode then
moves on those curves.  This module provides the exact eigensolver, the
sampled surfaces, the closed-form level estimates used as oracles, and the
factorized ground-state construction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.interpolate import CubicSpline

from .discretization import (
    Grid1D,
    Grid2D,
    HamiltonianOperator,
    WaveFunction1D,
    WaveFunction2D,
    build_h_1d,
    second_derivative_matrix,
    washboard_grid,
)
from .errors import NumericalError, ValidationError
from .model import (
    JunctionSystem,
    collective_masses,
    pendulum_asymptotic_energy,
    potential_washboard_1d,
)

SQRT2 = math.sqrt(2.0)

DENSE_CUTOFF = 2048
MAX_LEVELS = 64


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Ordered eigenpairs of a symmetric operator.

    vectors holds one eigenvector per column, normalized in the grid's L2
    inner product when a grid is attached (plain unit 2-norm otherwise).
    bound_flags marks eigenvalues below the operator's escape barrier;
    it is None when no potential information was available.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    grid: Grid1D | Grid2D | None = None
    bound_flags: np.ndarray | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "eigenvalues", np.asarray(self.eigenvalues, dtype=float))
        if np.any(np.diff(self.eigenvalues) < -1e-10):
            raise NumericalError("eigenvalues are not in nondecreasing order")

    @property
    def k(self) -> int:
        return len(self.eigenvalues)

    def wavefunction(self, i: int) -> WaveFunction1D | WaveFunction2D:
        if self.grid is None:
            raise ValidationError("spectrum has no grid attached")
        v = self.vectors[:, i]
        if isinstance(self.grid, Grid1D):
            return WaveFunction1D(self.grid, v)
        return WaveFunction2D(self.grid, v.reshape(self.grid.axis_plus.n, self.grid.axis_minus.n))


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude component of each column real positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        i = int(np.argmax(np.abs(out[:, j])))
        if out[i, j].real < 0:
            out[:, j] = -out[:, j]
    return out


def _orthonormalize_degenerate(values: np.ndarray, vectors: np.ndarray, scale: float) -> np.ndarray:
    """Deterministic basis inside degenerate clusters.

    Within each cluster of near-equal eigenvalues the solver's basis is
    arbitrary; re-span it by Gram-Schmidt on projections of the coordinate
    basis vectors taken in grid-lexicographic order so repeated runs agree.
    """
    out = vectors.copy()
    tol = 1e-9 * max(scale, 1.0)
    i = 0
    while i < len(values):
        j = i + 1
        while j < len(values) and values[j] - values[j - 1] <= tol:
            j += 1
        if j - i > 1:
            block = out[:, i:j]
            proj = block @ block.conj().T if np.iscomplexobj(block) else block @ block.T
            new = []
            row = 0
            while len(new) < j - i and row < block.shape[0]:
                cand = proj[:, row]
                for q in new:
                    cand = cand - q * np.dot(q, cand)
                nrm = np.linalg.norm(cand)
                if nrm > 1e-8:
                    new.append(cand / nrm)
                row += 1
            if len(new) == j - i:
                out[:, i:j] = np.column_stack(new)
        i = j
    return out


def eigensolve(
    h: HamiltonianOperator | sp.spmatrix | np.ndarray,
    k: int,
    dense_cutoff: int = DENSE_CUTOFF,
    maxiter: int | None = None,
) -> SpectrumResult:
    """Lowest k eigenpairs of a symmetric operator.

    Dense LAPACK below dense_cutoff rows, ARPACK (implicitly restarted,
    reorthogonalized Lanczos) above, with a fixed starting vector so runs
    are reproducible.  Residuals ||Hv - lambda v|| are checked against
    1e-8 * ||H||_inf for every pair.
    """
    if isinstance(h, HamiltonianOperator):
        matrix = h.matrix
        grid = h.grid
        barrier = h.escape_barrier
    else:
        matrix = sp.csr_matrix(h) if not sp.issparse(h) else h.tocsr()
        grid = None
        barrier = None
    n = matrix.shape[0]
    if not 1 <= k <= min(n, MAX_LEVELS):
        raise ValidationError(f"k={k} must lie in [1, {min(n, MAX_LEVELS)}] for dimension {n}")

    scale = float(abs(matrix).sum(axis=1).max())
    if n <= dense_cutoff:
        values, vectors = scipy.linalg.eigh(matrix.toarray(), subset_by_index=(0, k - 1))
    else:
        v0 = np.ones(n) / math.sqrt(n)
        try:
            values, vectors = spla.eigsh(
                matrix, k=k, which="SA", v0=v0, maxiter=maxiter, tol=0
            )
        except spla.ArpackNoConvergence as exc:
            got = len(exc.eigenvalues)
            raise NumericalError(
                f"eigensolver converged only {got}/{k} pairs on dimension {n}; "
                "increase maxiter or shrink the grid"
            ) from exc
        order = np.argsort(values)
        values, vectors = values[order], vectors[:, order]

    vectors = _orthonormalize_degenerate(values, vectors, scale)
    vectors = _fix_phases(vectors)

    residuals = np.linalg.norm(matrix @ vectors - vectors * values, axis=0)
    if np.any(residuals > 1e-8 * scale):
        raise NumericalError(
            f"eigenpair residuals {residuals.max():.3e} exceed 1e-8 * ||H|| = {1e-8 * scale:.3e}"
        )
    gram = vectors.T @ vectors
    if np.abs(gram - np.eye(k)).max() > 1e-8:
        raise NumericalError("eigenvectors lost orthonormality")

    if grid is not None:
        if isinstance(grid, Grid1D):
            vectors = vectors / math.sqrt(grid.step)
        else:
            vectors = vectors / math.sqrt(grid.axis_plus.step * grid.axis_minus.step)
    bound = None if barrier is None else values < barrier
    return SpectrumResult(eigenvalues=values, vectors=vectors, grid=grid, bound_flags=bound)


def washboard_spectrum(
    e_c: float,
    e_j: float,
    j: float = 0.0,
    k: int = 8,
    grid: Grid1D | None = None,
) -> tuple[SpectrumResult, HamiltonianOperator]:
    """Spectrum of a single current-biased junction on its well domain."""
    grid = grid or washboard_grid(j)
    mass = 1.0 / (8.0 * e_c)
    h = build_h_1d(grid, mass, lambda t: potential_washboard_1d(e_j, j, t), description="washboard")
    return eigensolve(h, k), h


@dataclass(frozen=True, eq=False)
class BOSurface:
    """Samples of the fast-mode level n versus the frozen slow coordinate."""

    n: int
    theta_minus: np.ndarray
    energies: np.ndarray

    def spline(self) -> CubicSpline:
        return CubicSpline(self.theta_minus, self.energies)

    def fitted_curvature(self) -> float:
        """Effective spring constant k_eff from a quadratic fit near the minimum."""
        t = self.theta_minus
        e = self.energies
        i0 = int(np.argmin(e))
        span = max(2, len(t) // 8)
        lo, hi = max(0, i0 - span), min(len(t), i0 + span + 1)
        coeffs = np.polyfit(t[lo:hi], e[lo:hi], 2)
        return 2.0 * float(coeffs[0])


def _fast_axis_for(sys: JunctionSystem, span_sigmas: float = 8.0, n: int = 181) -> Grid1D:
    from .model import harmonic_reference

    sig = math.sqrt(harmonic_reference(sys).var_theta_plus)
    return Grid1D(-span_sigmas * sig, span_sigmas * sig, n)


def _fast_hamiltonian(sys: JunctionSystem, grid_plus: Grid1D, theta_minus: float) -> HamiltonianOperator:
    masses = collective_masses(sys)
    cos_m = math.cos(theta_minus / SQRT2)
    bias = sys.e_j / SQRT2 * (sys.j1 + sys.j2)

    def vfast(tp: np.ndarray) -> np.ndarray:
        return -2.0 * sys.e_j * np.cos(tp / SQRT2) * cos_m - bias * tp

    return build_h_1d(grid_plus, masses.m_plus, vfast, description="fast-mode")


def fast_mode_surface(
    sys: JunctionSystem,
    n: int,
    theta_minus_samples,
    grid_plus: Grid1D | None = None,
) -> BOSurface:
    """Energy curve eps_n(t_minus) of the frozen-slow-coordinate fast mode."""
    if n > 10:
        raise ValidationError("surface quantum number capped at 10")
    samples = np.asarray(theta_minus_samples, dtype=float)
    grid_plus = grid_plus or _fast_axis_for(sys)
    energies = np.empty_like(samples)
    for i, tm in enumerate(samples):
        h = _fast_hamiltonian(sys, grid_plus, float(tm))
        energies[i] = eigensolve(h, n + 1).eigenvalues[n]
    return BOSurface(n=n, theta_minus=samples, energies=energies)


@dataclass(frozen=True)
class BOAnalyticLevels:
    """Closed-form level quantities in the phase regime.

    epsilon_n0: fast-mode level at the slow-coordinate minimum,
        -2 E_J + omega0 (n + 1/2) - (1/16 m_plus)(n^2 + n + 1/2).
    Omega_n: slow-mode frequency
        omega0 (1 - (n + 1/2)/(4 sqrt(E_J m_plus))) sqrt(m_plus/m_minus).
    E_n_nu: slow-mode ladder hbar Omega_n (nu + 1/2).
    """

    epsilon_n0: float
    omega0: float
    Omega_n: float
    E_n_nu: float


def bo_levels_analytic(sys: JunctionSystem, n: int, nu: int) -> BOAnalyticLevels:
    """Evaluate the closed-form fast/slow level formulas verbatim.

    Warns outside the phase regime E_J/(8 E_C) >= 10 where the expansion
    degrades.
    """
    masses = collective_masses(sys)
    lam2 = sys.e_j * masses.m_plus
    if lam2 < 10.0:
        warnings.warn(
            f"E_J/(8 E_C) = {lam2:.2f} < 10: phase-regime level formulas are inaccurate",
            stacklevel=2,
        )
    omega0 = math.sqrt(sys.e_j / masses.m_plus)
    eps_n0 = -2.0 * sys.e_j + omega0 * (n + 0.5) - (n * n + n + 0.5) / (16.0 * masses.m_plus)
    omega_n = omega0 * (1.0 - (n + 0.5) / (4.0 * math.sqrt(lam2))) * math.sqrt(
        masses.m_plus / masses.m_minus
    )
    return BOAnalyticLevels(
        epsilon_n0=eps_n0,
        omega0=omega0,
        Omega_n=omega_n,
        E_n_nu=omega_n * (nu + 0.5),
    )


def bo_ground_state(sys: JunctionSystem, grid: Grid2D) -> WaveFunction2D:
    """Factorized ground state phi0(t_plus; t_minus) * Phi0(t_minus).

    The fast problem is solved on every slow-axis slice (with the sign of
    phi0 carried continuously across slices); the slow problem then runs on
    the sampled eps_0 surface plus the slow-mode bias term.  The result is
    normalized on the full 2D grid.
    """
    masses = collective_masses(sys)
    gp, gm = grid.axis_plus, grid.axis_minus
    d2p = second_derivative_matrix(gp.n, gp.step)
    kin_fast = ((-0.5 / masses.m_plus) * d2p).toarray()
    bias_fast = sys.e_j / SQRT2 * (sys.j1 + sys.j2)

    eps0 = np.empty(gm.n)
    phi = np.empty((gp.n, gm.n))
    prev: np.ndarray | None = None
    tp = gp.points
    for jidx, tm in enumerate(gm.points):
        v = -2.0 * sys.e_j * np.cos(tp / SQRT2) * math.cos(tm / SQRT2) - bias_fast * tp
        hf = kin_fast + np.diag(v)
        vals, vecs = scipy.linalg.eigh(hf, subset_by_index=(0, 0))
        eps0[jidx] = vals[0]
        col = vecs[:, 0] / math.sqrt(gp.step)
        if prev is None:
            if col[int(np.argmax(np.abs(col)))] < 0:
                col = -col
        elif float(np.dot(col, prev)) < 0:
            col = -col
        phi[:, jidx] = col
        prev = col

    surface = CubicSpline(gm.points, eps0)
    slow_bias = sys.e_j / SQRT2 * (sys.j1 - sys.j2)
    h_slow = build_h_1d(
        gm,
        masses.m_minus,
        lambda tm: surface(tm) - slow_bias * tm,
        description="slow-mode",
    )
    slow = eigensolve(h_slow, 1)
    big_phi = slow.vectors[:, 0]
    if big_phi[int(np.argmax(np.abs(big_phi)))] < 0:
        big_phi = -big_phi
    product = phi * big_phi[None, :]
    return WaveFunction2D(grid, product).normalized()


def pendulum_reference_levels(e_j: float, mass: float, count: int) -> np.ndarray:
    """Closed-form pendulum levels for H = p^2/2m - E_J cos t, n < count."""
    return np.array([pendulum_asymptotic_energy(e_j, mass, n) for n in range(count)])
