"""Circuit parameters, collective variables and closed-form oracles.

Two current-biased Josephson junctions coupled by a capacitance are modelled
(with hbar = 1 and energies in a caller-chosen unit, charging energy E_C = 1
recommended) by

    H = 4 E_C (1 + zeta)^-1 (p1^2 + p2^2 + 2 zeta p1 p2)
        - E_J (cos t1 + cos t2 + J1 t1 + J2 t2)

where t1, t2 are the junction phases, p = -i d/dt their conjugate charges,
J1, J2 the normalized bias currents and zeta = C_c / (C_c + C_J) the coupling.
In the symmetric/antisymmetric (collective) variables
x_pm = (x1 +- x2) / sqrt(2) the same Hamiltonian separates in the kinetic
part,

    H = p_+^2 / 2 m_+ + p_-^2 / 2 m_-
        - (E_J/sqrt2) (J1 + J2) t_+ - (E_J/sqrt2) (J1 - J2) t_-
        - 2 E_J cos(t_+/sqrt2) cos(t_-/sqrt2)

with mode masses m_pm = (1 + zeta) / [8 E_C (1 +- zeta)].  Everything in
this module is a pure function of immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import ValidationError

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class JunctionSystem:
    """Dimensionless parameters of the coupled-junction circuit.

    e_c, e_j are the charging and Josephson energies in a common energy
    unit; j1, j2 are bias currents normalized to the critical current;
    zeta is the capacitive coupling in [0, 1).
    """

    e_c: float
    e_j: float
    j1: float = 0.0
    j2: float = 0.0
    zeta: float = 0.0

    def __post_init__(self) -> None:
        if not (self.e_c > 0.0 and math.isfinite(self.e_c)):
            raise ValidationError(f"charging energy must be positive, got {self.e_c}")
        if not (self.e_j > 0.0 and math.isfinite(self.e_j)):
            raise ValidationError(f"Josephson energy must be positive, got {self.e_j}")
        if not (0.0 <= self.zeta < 1.0):
            raise ValidationError(
                f"coupling zeta must lie in [0, 1); zeta={self.zeta} makes the slow-mode mass diverge"
            )
        for name, j in (("j1", self.j1), ("j2", self.j2)):
            if not (abs(j) < 1.0):
                raise ValidationError(f"|{name}| must be < 1 for bound states, got {j}")

    def with_zeta(self, zeta: float) -> "JunctionSystem":
        return JunctionSystem(self.e_c, self.e_j, self.j1, self.j2, zeta)


@dataclass(frozen=True)
class CollectiveMasses:
    """Masses of the fast (+) and slow (-) collective modes, in 1/energy."""

    m_plus: float
    m_minus: float

    @property
    def ratio(self) -> float:
        return self.m_minus / self.m_plus


@dataclass(frozen=True)
class PhysicalUnits:
    """SI circuit quantities, used only to derive dimensionless parameters.

    Never enters solver math; solvers work with hbar = 1 throughout.
    """

    flux_quantum: float
    junction_capacitance: float
    critical_current: float
    coupling_capacitance: float = 0.0

    def __post_init__(self) -> None:
        for name, value in (
            ("flux_quantum", self.flux_quantum),
            ("junction_capacitance", self.junction_capacitance),
            ("critical_current", self.critical_current),
        ):
            if not (value > 0.0 and math.isfinite(value)):
                raise ValidationError(f"{name} must be positive, got {value}")
        if self.coupling_capacitance < 0.0:
            raise ValidationError("coupling_capacitance must be >= 0")


def collective_masses(sys: JunctionSystem) -> CollectiveMasses:
    """Masses m_pm = (1 + zeta) / [8 E_C (1 +- zeta)] of the collective modes.

    The (1 + zeta) factors cancel exactly in m_plus, so the fast mode mass
    is 1 / (8 E_C) independent of the coupling.
    """
    m_plus = 1.0 / (8.0 * sys.e_c)
    m_minus = (1.0 + sys.zeta) / (8.0 * sys.e_c * (1.0 - sys.zeta))
    return CollectiveMasses(m_plus=m_plus, m_minus=m_minus)


def potential_2d(sys: JunctionSystem, theta_plus, theta_minus):
    """Full collective-frame potential at (theta_plus, theta_minus).

    Accepts scalars or broadcastable arrays.
    """
    tp = np.asarray(theta_plus, dtype=float)
    tm = np.asarray(theta_minus, dtype=float)
    cos_term = -2.0 * sys.e_j * np.cos(tp / SQRT2) * np.cos(tm / SQRT2)
    bias = -(sys.e_j / SQRT2) * ((sys.j1 + sys.j2) * tp + (sys.j1 - sys.j2) * tm)
    out = cos_term + bias
    return float(out) if out.ndim == 0 else out


def potential_lab(sys: JunctionSystem, theta1, theta2):
    """Lab-frame potential -E_J (cos t1 + cos t2 + J1 t1 + J2 t2)."""
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    out = -sys.e_j * (np.cos(t1) + np.cos(t2) + sys.j1 * t1 + sys.j2 * t2)
    return float(out) if out.ndim == 0 else out


def potential_washboard_1d(e_j: float, j: float, theta):
    """Tilted-washboard potential -E_J (cos t + J t) of a single junction."""
    t = np.asarray(theta, dtype=float)
    out = -e_j * (np.cos(t) + j * t)
    return float(out) if out.ndim == 0 else out


def to_collective(x1, x2):
    """Orthogonal transform (x1, x2) -> ((x1+x2)/sqrt2, (x1-x2)/sqrt2).

    The same rotation applies to coordinates, momenta and, congruently,
    covariance matrices.  The matrix is its own inverse.
    """
    return (x1 + x2) / SQRT2, (x1 - x2) / SQRT2


def from_collective(plus, minus):
    """Inverse of :func:`to_collective` (the transform is an involution)."""
    return (plus + minus) / SQRT2, (plus - minus) / SQRT2


@dataclass(frozen=True)
class HarmonicReference:
    """Small-oscillation closed forms for the unbiased coupled system.

    Derived by expanding the cosine product to quadratic order about the
    origin, which gives both modes the spring constant E_J.  Ground-state
    second moments follow from the two independent oscillators; they serve
    as analytic oracles for the exact diagonalization.
    """

    omega0: float
    s_harmonic: float
    cross_theta_norm: float
    var_theta_plus: float
    var_theta_minus: float
    var_p_plus: float
    var_p_minus: float


def harmonic_reference(sys: JunctionSystem) -> HarmonicReference:
    """Harmonic-oracle record for the (assumed unbiased) system.

    omega0 = sqrt(E_J / m_plus) is the fast-mode frequency,
    s_harmonic = ((1+zeta)/(1-zeta))^(1/4) the ground-state squeezing factor
    1 / (2 sqrt(<dt_-^2><dp_+^2>)), and cross_theta_norm the normalized
    lab-frame correlation sqrt(E_J/(2 E_C)) <dt1 dt2>
    = (1/2) [1 - sqrt((1-zeta)/(1+zeta))].
    """
    masses = collective_masses(sys)
    omega0 = math.sqrt(sys.e_j / masses.m_plus)
    var_tp = 1.0 / (2.0 * math.sqrt(sys.e_j * masses.m_plus))
    var_tm = 1.0 / (2.0 * math.sqrt(sys.e_j * masses.m_minus))
    var_pp = math.sqrt(sys.e_j * masses.m_plus) / 2.0
    var_pm = math.sqrt(sys.e_j * masses.m_minus) / 2.0
    s = ((1.0 + sys.zeta) / (1.0 - sys.zeta)) ** 0.25
    cross = 0.5 * (1.0 - math.sqrt((1.0 - sys.zeta) / (1.0 + sys.zeta)))
    return HarmonicReference(
        omega0=omega0,
        s_harmonic=s,
        cross_theta_norm=cross,
        var_theta_plus=var_tp,
        var_theta_minus=var_tm,
        var_p_plus=var_pp,
        var_p_minus=var_pm,
    )


def si_conversion(
    units: PhysicalUnits,
    j1: float = 0.0,
    j2: float = 0.0,
    reference_energy: float | None = None,
) -> JunctionSystem:
    """Dimensionless circuit parameters from SI capacitances and current.

    E_C = e^2 / C_J and E_J = hbar I_c / (2 e) in joules, then both are
    expressed in units of ``reference_energy`` (default: E_C itself, so the
    returned system has e_c = 1).  zeta = C_c / (C_c + C_J).
    """
    e = constants.elementary_charge
    hbar = constants.hbar
    e_c_joule = e**2 / units.junction_capacitance
    e_j_joule = hbar * units.critical_current / (2.0 * e)
    zeta = units.coupling_capacitance / (
        units.coupling_capacitance + units.junction_capacitance
    )
    ref = e_c_joule if reference_energy is None else reference_energy
    if ref <= 0:
        raise ValidationError("reference_energy must be positive")
    return JunctionSystem(
        e_c=e_c_joule / ref, e_j=e_j_joule / ref, j1=j1, j2=j2, zeta=zeta
    )


def pendulum_asymptotic_energy(v0: float, mass: float, n: int) -> float:
    """Phase-regime level formula for the pendulum H = p^2/2m - V0 cos t.

    E_n ~ -V0 + omega (n + 1/2) - (1/16m)(n^2 + n + 1/2) with
    omega = sqrt(V0/m); valid for V0 * m >> 1, with remainder
    O(omega / (V0 m)).
    """
    if v0 <= 0 or mass <= 0:
        raise ValidationError("pendulum depth and mass must be positive")
    omega = math.sqrt(v0 / mass)
    return -v0 + omega * (n + 0.5) - (n * n + n + 0.5) / (16.0 * mass)


def washboard_well_minimum(j: float) -> float:
    """Location arcsin(J) of the stable minimum of -(cos t + J t)."""
    if not abs(j) < 1.0:
        raise ValidationError(f"|J| must be < 1, got {j}")
    return math.asin(j)


def washboard_barriers(j: float) -> tuple[float, float]:
    """Positions of the barrier tops adjacent to the arcsin(J) well.

    Left top sits at -pi - arcsin(J), right top at pi - arcsin(J); for J > 0
    the right one is the lower (escape) barrier.
    """
    if not abs(j) < 1.0:
        raise ValidationError(f"|J| must be < 1, got {j}")
    a = math.asin(j)
    return -math.pi - a, math.pi - a
