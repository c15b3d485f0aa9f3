"""Continuous-variable teleportation over an EPR-correlated junction pair.

Protocol: junctions 1 and 2 share an EPR-correlated state, junction 3 holds
the unknown input.  The joint pair (t2 - t3, p2 + p3) is measured, the
outcome is communicated classically, and junction 1 is displaced by
(-tbar, +pbar).  For a zero-mean Gaussian resource the outcome-averaged
output equals the input sent through an additive Gaussian noise channel
whose variances are

    var_theta_T = Var(t1 - t2) + measurement theta noise,
    var_p_T     = Var(p1 + p2) + measurement p noise,

i.e. finite squeezing and detector inaccuracy enter on equal footing and
simply add.  In the position representation the channel reads

    rho_out(t, t') = integral dmu G_{var_theta_T}(mu) psi(t - mu)
                     psi*(t' - mu) * exp(-var_p_T (t - t')^2 / 2),

equivalently a Gaussian blur of the Wigner function by
(var_theta_T, var_p_T).  Both the analytic channel and the sampled
single-shot path (measure, communicate, shift) are implemented; their
ensemble agreement is a cross-check of each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discretization import Grid1D, WaveFunction1D
from .errors import NumericalError, ValidationError
from .model import JunctionSystem, harmonic_reference
from .spectra import SpectrumResult

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class NoiseBudget:
    """Additive channel variances split into EPR and measurement shares."""

    var_theta_epr: float
    var_p_epr: float
    var_theta_meas: float = 0.0
    var_p_meas: float = 0.0

    def __post_init__(self) -> None:
        for name in ("var_theta_epr", "var_p_epr", "var_theta_meas", "var_p_meas"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")

    @property
    def var_theta_total(self) -> float:
        return self.var_theta_epr + self.var_theta_meas

    @property
    def var_p_total(self) -> float:
        return self.var_p_epr + self.var_p_meas

    @classmethod
    def from_totals(cls, var_theta_t: float, var_p_t: float) -> "NoiseBudget":
        """Budget with the totals injected directly (no EPR/measurement split)."""
        return cls(var_theta_epr=0.0, var_p_epr=0.0, var_theta_meas=var_theta_t, var_p_meas=var_p_t)


def noise_budget_from_epr(report, meas_var_theta: float = 0.0, meas_var_p: float = 0.0) -> NoiseBudget:
    """Channel budget from a covariance report plus measurement variances.

    t1 - t2 = sqrt(2) t_minus and p1 + p2 = sqrt(2) p_plus, so the EPR
    shares are twice the collective-mode variances.
    """
    return NoiseBudget(
        var_theta_epr=2.0 * report.var_theta_minus,
        var_p_epr=2.0 * report.var_p_plus,
        var_theta_meas=meas_var_theta,
        var_p_meas=meas_var_p,
    )


@dataclass(frozen=True, eq=False)
class DensityMatrix1D:
    """Mixed one-mode state rho(t, t') on a uniform grid."""

    grid: Grid1D
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.grid.n, self.grid.n):
            raise ValidationError("density matrix shape does not match the grid")
        herm = np.abs(m - m.conj().T).max()
        if herm > 1e-10 * max(np.abs(m).max(), 1.0):
            raise ValidationError(f"density matrix is not hermitian (defect {herm:g})")
        m = 0.5 * (m + m.conj().T)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def trace(self) -> float:
        return float(np.real(np.sum(np.diag(self.matrix))) * self.grid.step)

    def validate(self, trace_tol: float = 1e-8, psd_tol: float = -1e-8) -> None:
        tr = self.trace()
        if abs(tr - 1.0) > trace_tol:
            raise ValidationError(f"trace {tr} deviates from 1 beyond {trace_tol}")
        eigs = np.linalg.eigvalsh(self.matrix * self.grid.step)
        if eigs.min() < psd_tol:
            raise ValidationError(f"density matrix has negative eigenvalue {eigs.min():g}")

    @classmethod
    def pure(cls, psi: WaveFunction1D) -> "DensityMatrix1D":
        a = psi.normalized().amplitudes
        return cls(psi.grid, np.outer(a, a.conj()))


@dataclass(frozen=True, eq=False)
class InputState:
    """Superposition over bound washboard eigenstates of the input junction."""

    coefficients: np.ndarray
    basis: SpectrumResult
    wavefunction: WaveFunction1D


def build_input_state(coeffs, spectrum: SpectrumResult) -> InputState:
    """Normalize the coefficients and realize the superposition wavefunction.

    Every referenced level must be bound; indexing an unbound (box-artifact)
    level is an error that names the level.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or len(c) == 0 or len(c) > spectrum.k:
        raise ValidationError(f"need 1..{spectrum.k} coefficients, got shape {c.shape}")
    nrm = np.linalg.norm(c)
    if nrm == 0:
        raise ValidationError("coefficients are all zero")
    c = c / nrm
    if spectrum.bound_flags is not None:
        for idx in np.nonzero(np.abs(c) > 0)[0]:
            if not spectrum.bound_flags[idx]:
                raise ValidationError(
                    f"level {idx} (energy {spectrum.eigenvalues[idx]:.6g}) is not bound"
                )
    if not isinstance(spectrum.grid, Grid1D):
        raise ValidationError("input states require a 1D eigenbasis")
    amps = spectrum.vectors[:, : len(c)] @ c
    psi = WaveFunction1D(spectrum.grid, amps).normalized()
    return InputState(coefficients=c, basis=spectrum, wavefunction=psi)


def _lattice_gaussian(var: float, step: float, span_sigmas: float = 6.0) -> tuple[np.ndarray, np.ndarray]:
    """Grid-lattice Gaussian quadrature (offsets in steps, normalized weights)."""
    kmax = int(math.ceil(span_sigmas * math.sqrt(var) / step))
    ks = np.arange(-kmax, kmax + 1)
    w = np.exp(-((ks * step) ** 2) / (2.0 * var))
    return ks, w / w.sum()


def _shift_lattice(psi: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros_like(psi)
    if k == 0:
        out[:] = psi
    elif k > 0:
        out[k:] = psi[:-k]
    else:
        out[:k] = psi[-k:]
    return out


def apply_channel(state: InputState | WaveFunction1D, budget: NoiseBudget) -> DensityMatrix1D:
    """Send a pure state through the additive Gaussian noise channel.

    The position noise is integrated on the grid lattice itself (shifts are
    exact index moves), so the discrete channel commutes exactly with the
    grid-sampled Wigner blur; the momentum noise enters as the analytic
    coherence-damping factor exp(-var_p (t - t')^2 / 2).
    """
    psi_wf = state.wavefunction if isinstance(state, InputState) else state
    psi_wf = psi_wf.normalized()
    grid = psi_wf.grid
    psi = psi_wf.amplitudes
    vt, vp = budget.var_theta_total, budget.var_p_total
    if not (math.isfinite(vt) and math.isfinite(vp)):
        raise ValidationError("noise budget totals must be finite")
    if vt > 0 and grid.step > math.sqrt(vt):
        raise NumericalError(
            f"grid step {grid.step:g} cannot resolve position-noise width {math.sqrt(vt):g}"
        )
    if vt > 0:
        ks, w = _lattice_gaussian(vt, grid.step)
        rho = np.zeros((grid.n, grid.n), dtype=complex)
        for k, wk in zip(ks, w):
            shifted = _shift_lattice(psi, int(k))
            rho += wk * np.outer(shifted, shifted.conj())
    else:
        rho = np.outer(psi, psi.conj())
    if vp > 0:
        diff = grid.points[:, None] - grid.points[None, :]
        rho = rho * np.exp(-0.5 * vp * diff**2)
    tr = float(np.real(np.sum(np.diag(rho))) * grid.step)
    if abs(tr - 1.0) > 1e-3:
        raise NumericalError(f"channel lost {abs(tr-1):.2e} of the trace; enlarge the grid")
    return DensityMatrix1D(grid, rho / tr)


def fidelity(state: InputState | WaveFunction1D, rho: DensityMatrix1D) -> float:
    """Input-output overlap <psi| rho |psi> by double quadrature."""
    psi_wf = state.wavefunction if isinstance(state, InputState) else state
    if psi_wf.grid != rho.grid:
        raise ValidationError("fidelity requires matching grids")
    psi = psi_wf.normalized().amplitudes
    h = rho.grid.step
    val = float(np.real(psi.conj() @ rho.matrix @ psi)) * h * h
    if val > 1.0 + 1e-8:
        raise NumericalError(f"fidelity {val} exceeds 1 beyond tolerance")
    return val


def trace_distance(a: DensityMatrix1D, b: DensityMatrix1D) -> float:
    """(1/2) ||a - b||_1 with the grid measure."""
    if a.grid != b.grid:
        raise ValidationError("trace distance requires matching grids")
    diff = (a.matrix - b.matrix) * a.grid.step
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())


# --------------------------------------------------------------------------
# EPR resources for the single-shot path


@dataclass(frozen=True)
class GaussianEPRResource:
    """Zero-mean two-mode Gaussian wavefunction in the junction coordinates.

    Parametrized by the physical variances Var(t1 - t2) and Var(t1 + t2);
    the conjugate spread Var(p1 + p2) = 1 / Var(t1 + t2) for this
    minimum-uncertainty family.
    """

    var_theta_diff: float
    var_theta_sum: float

    def __post_init__(self) -> None:
        if self.var_theta_diff <= 0 or self.var_theta_sum <= 0:
            raise ValidationError("Gaussian resource variances must be positive")

    @property
    def var_p_sum(self) -> float:
        return 1.0 / self.var_theta_sum

    @classmethod
    def from_system(cls, sys: JunctionSystem) -> "GaussianEPRResource":
        """Harmonic-approximation resource for a coupled pair's ground state."""
        ref = harmonic_reference(sys)
        return cls(var_theta_diff=2.0 * ref.var_theta_minus, var_theta_sum=2.0 * ref.var_theta_plus)

    def budget(self, meas_var_theta: float = 0.0, meas_var_p: float = 0.0) -> NoiseBudget:
        return NoiseBudget(
            var_theta_epr=self.var_theta_diff,
            var_p_epr=self.var_p_sum,
            var_theta_meas=meas_var_theta,
            var_p_meas=meas_var_p,
        )

    def amplitude(self, t1, t2):
        a2 = self.var_theta_diff
        b2 = self.var_theta_sum
        lognorm = -0.25 * math.log(math.pi * math.pi * a2 * b2)
        return np.exp(lognorm - (t1 - t2) ** 2 / (4.0 * a2) - (t1 + t2) ** 2 / (4.0 * b2))

    def marginal_sigma(self) -> float:
        return math.sqrt((self.var_theta_diff + self.var_theta_sum) / 4.0)


class NumericEPRResource:
    """Interpolating wrapper for an EPR pair given as a 2D collective-frame state.

    The stored wavefunction lives on (t_plus, t_minus); amplitude(t1, t2)
    rotates the requested lab points into that frame and interpolates
    bicubically, returning zero outside the tabulated box.
    """

    def __init__(self, psi) -> None:
        from scipy.interpolate import RectBivariateSpline

        self.psi = psi.normalized()
        grid = self.psi.grid
        amps = self.psi.amplitudes
        self._spl_re = RectBivariateSpline(
            grid.axis_plus.points, grid.axis_minus.points, amps.real, kx=3, ky=3
        )
        self._spl_im = RectBivariateSpline(
            grid.axis_plus.points, grid.axis_minus.points, amps.imag, kx=3, ky=3
        )
        self._box = (grid.axis_plus, grid.axis_minus)

    def amplitude(self, t1, t2):
        tp = (np.asarray(t1) + np.asarray(t2)) / SQRT2
        tm = (np.asarray(t1) - np.asarray(t2)) / SQRT2
        ax_p, ax_m = self._box
        inside = (tp >= ax_p.min) & (tp <= ax_p.max) & (tm >= ax_m.min) & (tm <= ax_m.max)
        vals = self._spl_re(tp, tm, grid=False) + 1j * self._spl_im(tp, tm, grid=False)
        return np.where(inside, vals, 0.0)

    def marginal_sigma(self) -> float:
        grid = self.psi.grid
        prob = self.psi.weights * np.abs(self.psi.amplitudes) ** 2
        tp = grid.axis_plus.points[:, None]
        tm = grid.axis_minus.points[None, :]
        var_t1 = 0.5 * (float(np.sum(prob * tp**2)) + float(np.sum(prob * tm**2)))
        return math.sqrt(var_t1)


@dataclass(frozen=True)
class IdealEPRResource:
    """Delta-correlated test resource; outcomes are uniform over the windows."""

    theta_window: float = 1.0
    p_window: float = 1.0


@dataclass(frozen=True, eq=False)
class ShotResult:
    measured_theta: float
    measured_p: float
    output: WaveFunction1D
    clipped_norm: float


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    rho: DensityMatrix1D
    measured_theta: np.ndarray
    measured_p: np.ndarray


class TeleportSession:
    """Precomputed single-shot machinery for one (input, resource) pair.

    The joint outcome density P(tbar, pbar) of the (t2 - t3, p2 + p3)
    measurement is tabulated once on a rectangular outcome window (the p
    axis comes from a zero-padded FFT over the input coordinate); shots then
    draw outcomes by inverse CDF with sub-cell jitter, build the collapsed
    state of junction 1 by quadrature against the resource amplitude, and
    apply the corrective displacement exactly on the output grid.
    """

    def __init__(
        self,
        input_state: InputState,
        resource: GaussianEPRResource | NumericEPRResource,
        theta1_points: int = 121,
        outcome_theta_points: int = 257,
        outcome_span_sigmas: float = 4.5,
        pad_factor: int = 4,
    ) -> None:
        self.input = input_state
        self.resource = resource
        psi = input_state.wavefunction.normalized()
        self.grid = psi.grid
        self.psi = psi.amplitudes
        th = self.grid.points
        h = self.grid.step

        sig1 = resource.marginal_sigma()
        self.t1 = np.linspace(-5.0 * sig1, 5.0 * sig1, theta1_points)
        h1 = self.t1[1] - self.t1[0]

        prob3 = np.abs(self.psi) ** 2 * h
        var3 = float(np.sum(prob3 * th**2))
        sig_tbar = math.sqrt(sig1**2 + var3)
        self.tbars = np.linspace(
            -outcome_span_sigmas * sig_tbar, outcome_span_sigmas * sig_tbar, outcome_theta_points
        )

        npad = pad_factor * len(th)
        freqs = 2.0 * np.pi * np.fft.fftfreq(npad, d=h)
        order = np.argsort(freqs)
        pgrid = freqs[order]

        table = np.empty((len(self.tbars), npad))
        phase0 = np.exp(-1j * freqs * th[0]) * h
        for i, tbar in enumerate(self.tbars):
            bmat = resource.amplitude(self.t1[:, None], th[None, :] + tbar) * self.psi[None, :]
            fmat = np.fft.fft(bmat, n=npad, axis=1) * phase0[None, :]
            table[i] = np.sum(np.abs(fmat) ** 2, axis=0) * h1 / (2.0 * np.pi)
        table = table[:, order]

        marg_p = table.sum(axis=0)
        marg_p = marg_p / marg_p.sum()
        mean_p = float(np.sum(marg_p * pgrid))
        sd_p = math.sqrt(float(np.sum(marg_p * (pgrid - mean_p) ** 2)))
        keep = np.abs(pgrid - mean_p) <= 5.0 * sd_p
        self.pbars = pgrid[keep]
        self.table = table[:, keep]

        cells = self.table.ravel()
        total = cells.sum()
        if not total > 0:
            raise NumericalError("outcome distribution vanished; check the resource and grids")
        self.cdf = np.cumsum(cells) / total
        self.d_tbar = self.tbars[1] - self.tbars[0]
        self.d_pbar = self.pbars[1] - self.pbars[0]

    def sample_outcome(self, u: float, rng: np.random.Generator) -> tuple[float, float]:
        idx = int(np.searchsorted(self.cdf, u, side="left"))
        idx = min(idx, self.table.size - 1)
        iy, ix = np.unravel_index(idx, self.table.shape)
        tbar = self.tbars[iy] + (rng.random() - 0.5) * self.d_tbar
        pbar = self.pbars[ix] + (rng.random() - 0.5) * self.d_pbar
        return float(tbar), float(pbar)

    def collapse_and_shift(self, tbar: float, pbar: float, extended_check: bool = True) -> tuple[WaveFunction1D, float]:
        """Collapsed-and-corrected output state of junction 1.

        output(t) = e^{i pbar t} * integral dtau Psi(t + tbar, tau + tbar)
        psi(tau) e^{-i pbar tau}; the corrective displacement is folded into
        the evaluation points, so no separate interpolation of the output is
        needed.  Returns the state and the norm fraction lost outside the
        output window (measured on a 1.5x extended evaluation when
        extended_check is set).
        """
        th = self.grid.points
        h = self.grid.step
        weighted = self.psi * np.exp(-1j * pbar * th) * h
        kernel = self.resource.amplitude(th[:, None] + tbar, th[None, :] + tbar)
        chi = kernel @ weighted
        out = np.exp(1j * pbar * th) * chi
        nrm_in = float(np.sum(np.abs(out) ** 2) * h)
        if nrm_in <= 0:
            raise NumericalError("collapsed state vanished on the output grid")
        clipped = 0.0
        if extended_check:
            half = 0.5 * (self.grid.max - self.grid.min)
            wide = np.linspace(self.grid.min - 0.5 * half, self.grid.max + 0.5 * half, int(1.5 * self.grid.n))
            kernel_w = self.resource.amplitude(wide[:, None] + tbar, th[None, :] + tbar)
            chi_w = kernel_w @ weighted
            nrm_tot = float(np.sum(np.abs(chi_w) ** 2) * (wide[1] - wide[0]))
            clipped = max(0.0, 1.0 - nrm_in / nrm_tot) if nrm_tot > 0 else 0.0
        psi_out = WaveFunction1D(self.grid, out).normalized()
        return psi_out, clipped


def single_shot(
    input_state: InputState,
    epr_state,
    rng_seed: int,
    meas_var_theta: float = 0.0,
    meas_var_p: float = 0.0,
) -> ShotResult:
    """One measure-communicate-shift run of the protocol.

    epr_state may be a GaussianEPRResource, a NumericEPRResource, a
    collective-frame WaveFunction2D (wrapped automatically), or an
    IdealEPRResource for the exact delta-correlated limit.  Measurement
    inaccuracy is modelled as seeded Gaussian error added to the
    communicated outcome before the corrective shift.
    """
    rng = np.random.default_rng(rng_seed)
    if isinstance(epr_state, IdealEPRResource):
        tbar = (rng.random() - 0.5) * epr_state.theta_window
        pbar = (rng.random() - 0.5) * epr_state.p_window
        # delta resource: the collapse reproduces the input displaced by the
        # outcome and the corrective shift undoes it exactly
        psi = input_state.wavefunction.normalized()
        return ShotResult(measured_theta=tbar, measured_p=pbar, output=psi, clipped_norm=0.0)
    resource = _as_resource(epr_state)
    session = TeleportSession(input_state, resource)
    tbar, pbar = session.sample_outcome(rng.random(), rng)
    if meas_var_theta > 0:
        tbar += rng.normal(0.0, math.sqrt(meas_var_theta))
    if meas_var_p > 0:
        pbar += rng.normal(0.0, math.sqrt(meas_var_p))
    out, clipped = session.collapse_and_shift(tbar, pbar)
    if clipped > 1e-6:
        raise NumericalError(f"displacement clipped {clipped:.2e} of the norm; enlarge the grid")
    return ShotResult(measured_theta=tbar, measured_p=pbar, output=out, clipped_norm=clipped)


def _as_resource(epr_state):
    if isinstance(epr_state, (GaussianEPRResource, NumericEPRResource)):
        return epr_state
    if hasattr(epr_state, "grid") and hasattr(epr_state, "amplitudes"):
        return NumericEPRResource(epr_state)
    raise ValidationError(f"unsupported EPR resource type {type(epr_state).__name__}")


def ensemble_shots(
    input_state: InputState,
    epr_state,
    n_shots: int,
    seed: int,
    meas_var_theta: float = 0.0,
    meas_var_p: float = 0.0,
    stratified: bool = True,
) -> EnsembleResult:
    """Average density matrix over many single shots.

    With stratified=True the inverse-CDF uniforms cover the outcome
    distribution in equal-probability strata (randomly assigned to shots),
    which removes most of the outcome-sampling variance while every shot
    remains an unbiased draw.  Reduction order is fixed, so results are
    deterministic for a given seed.
    """
    if n_shots < 1:
        raise ValidationError("need at least one shot")
    rng = np.random.default_rng(seed)
    resource = _as_resource(epr_state)
    session = TeleportSession(input_state, resource)
    if stratified:
        u = (np.arange(n_shots) + rng.random(n_shots)) / n_shots
        rng.shuffle(u)
    else:
        u = rng.random(n_shots)
    grid = session.grid
    acc = np.zeros((grid.n, grid.n), dtype=complex)
    tbars = np.empty(n_shots)
    pbars = np.empty(n_shots)
    for i in range(n_shots):
        tbar, pbar = session.sample_outcome(float(u[i]), rng)
        if meas_var_theta > 0:
            tbar += rng.normal(0.0, math.sqrt(meas_var_theta))
        if meas_var_p > 0:
            pbar += rng.normal(0.0, math.sqrt(meas_var_p))
        out, _ = session.collapse_and_shift(tbar, pbar, extended_check=False)
        acc += np.outer(out.amplitudes, out.amplitudes.conj())
        tbars[i] = tbar
        pbars[i] = pbar
    acc /= float(np.real(np.trace(acc))) * grid.step
    return EnsembleResult(rho=DensityMatrix1D(grid, acc), measured_theta=tbars, measured_p=pbars)


def displace(psi: WaveFunction1D, dtheta: float, dp: float) -> WaveFunction1D:
    """Phase-space displacement: translate by dtheta, then ramp the momentum.

    psi'(t) = e^{i dp t} psi(t - dtheta).  The translation runs through a
    4x zero-padded Fourier shift, exact for states that decay inside the
    box.  The protocol's corrective shift for outcome (tbar, pbar) is
    displace(chi, -tbar, +pbar).
    """
    n = psi.grid.n
    npad = 4 * n
    amps = np.zeros(npad, dtype=complex)
    amps[:n] = psi.amplitudes
    k = 2.0 * np.pi * np.fft.fftfreq(npad, d=psi.grid.step)
    shifted = np.fft.ifft(np.fft.fft(amps) * np.exp(-1j * k * dtheta))[:n]
    out = np.exp(1j * dp * psi.grid.points) * shifted
    return WaveFunction1D(psi.grid, out)
