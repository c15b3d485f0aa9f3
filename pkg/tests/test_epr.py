import math

import numpy as np
import pytest

from jjepr.discretization import Grid1D, Grid2D, WaveFunction2D
from jjepr.epr import SWEEP_COLUMNS, CovarianceReport, GridPolicy, covariance, ground_state_2d, zeta_sweep
from jjepr.errors import ValidationError
from jjepr.model import JunctionSystem, harmonic_reference


def gaussian_2d(sig_p2: float, sig_m2: float, kick_p: float = 0.0, n: int = 181, span: float = 8.0):
    """Product Gaussian with known covariance, optionally momentum-kicked."""
    gp = Grid1D(-span * math.sqrt(sig_p2), span * math.sqrt(sig_p2), n)
    gm = Grid1D(-span * math.sqrt(sig_m2), span * math.sqrt(sig_m2), n)
    tp = gp.points[:, None]
    tm = gm.points[None, :]
    amps = np.exp(-(tp**2) / (4 * sig_p2) - (tm**2) / (4 * sig_m2) + 1j * kick_p * tp)
    return WaveFunction2D(Grid2D(gp, gm), amps).normalized()


class TestCovariance:
    def test_gaussian_oracle(self):
        sig_p2, sig_m2 = 0.35, 0.02
        psi = gaussian_2d(sig_p2, sig_m2)
        rep = covariance(psi)
        assert rep.var_theta_plus == pytest.approx(sig_p2, abs=1e-6)
        assert rep.var_theta_minus == pytest.approx(sig_m2, abs=1e-6)
        assert rep.var_p_plus == pytest.approx(1 / (4 * sig_p2), abs=1e-6)
        assert rep.var_p_minus == pytest.approx(1 / (4 * sig_m2), abs=1e-4)
        assert rep.cross_theta == pytest.approx((sig_p2 - sig_m2) / 2, abs=1e-6)
        expected_s = 1.0 / (2 * math.sqrt(sig_m2 / (4 * sig_p2)))
        assert rep.s == pytest.approx(expected_s, rel=1e-5)

    def test_momentum_kick_does_not_shift_variances(self):
        rep0 = covariance(gaussian_2d(0.2, 0.05))
        repk = covariance(gaussian_2d(0.2, 0.05, kick_p=3.0))
        assert repk.var_p_plus == pytest.approx(rep0.var_p_plus, rel=1e-6)
        assert repk.var_theta_plus == pytest.approx(rep0.var_theta_plus, rel=1e-8)

    def test_rejects_unnormalized(self):
        psi = gaussian_2d(0.2, 0.05)
        bad = WaveFunction2D(psi.grid, psi.amplitudes * 1.001)
        with pytest.raises(ValidationError):
            covariance(bad)

    def test_uncoupled_ground_state(self, covariance_cache):
        rep, flag = covariance_cache(0.0)
        assert flag == "exact2d"
        assert rep.s == pytest.approx(1.0, rel=0.02)
        assert abs(rep.cross_theta) < 1e-6

    def test_threshold_coupling(self, covariance_cache):
        rep, _ = covariance_cache(0.976)
        ref = harmonic_reference(JunctionSystem(1.0, 100.0, zeta=0.976))
        assert rep.s >= 3.0
        assert rep.s == pytest.approx(ref.s_harmonic, rel=0.03)

    def test_heisenberg_and_epr_direction(self, covariance_cache):
        for zeta in (0.0, 0.6, 0.95):
            rep, _ = covariance_cache(zeta)
            assert rep.var_theta_plus * rep.var_p_plus >= 0.25 - 1e-6
            assert rep.var_theta_minus * rep.var_p_minus >= 0.25 - 1e-6
            commuting = math.sqrt(rep.var_theta_minus * rep.var_p_plus)
            if zeta > 0:
                assert commuting < 0.5
            conjugate = math.sqrt(rep.var_theta_plus * rep.var_p_minus)
            assert conjugate >= 0.5 - 1e-6

    def test_exchange_symmetry(self, ground_state_cache):
        psi, _ = ground_state_cache(0.9)
        # <dt1^2> = <dt2^2> reduces to a vanishing <t_+ t_-> cross moment
        prob = psi.weights * np.abs(psi.amplitudes) ** 2
        tp = psi.grid.axis_plus.points[:, None]
        tm = psi.grid.axis_minus.points[None, :]
        cross_pm = float(np.sum(prob * tp * tm))
        assert abs(cross_pm) < 1e-8

    def test_grid_independence(self):
        sysj = JunctionSystem(1.0, 100.0, zeta=0.9)
        coarse, _ = ground_state_2d(sysj, GridPolicy(points_per_sigma=8.0))
        fine, _ = ground_state_2d(sysj, GridPolicy(points_per_sigma=16.0))
        assert covariance(fine).s == pytest.approx(covariance(coarse).s, rel=0.005)


class TestZetaSweep:
    def test_reference_rows(self, jj100):
        rows = zeta_sweep(jj100, [0.0, 0.6], GridPolicy(points_per_sigma=8.0))
        assert rows[0].s_numeric == pytest.approx(1.0, rel=0.02)
        assert abs(rows[0].cross_theta_norm_numeric) < 1e-4
        assert rows[1].cross_theta_norm_numeric == pytest.approx(0.25, rel=0.05)
        assert rows[1].method_flag == "exact2d"

    def test_monotone_trends(self, jj100):
        zetas = [0.0, 0.3, 0.6, 0.9]
        rows = zeta_sweep(jj100, zetas, GridPolicy(points_per_sigma=8.0))
        s = [r.s_numeric for r in rows]
        cross = [r.cross_theta_norm_numeric for r in rows]
        assert all(a < b for a, b in zip(s, s[1:]))
        assert all(a < b for a, b in zip(cross, cross[1:]))

    def test_log_axis_column(self, jj100):
        rows = zeta_sweep(jj100, [0.9], GridPolicy(points_per_sigma=8.0))
        assert rows[0].log10_inv_one_minus_zeta == pytest.approx(1.0)

    def test_bo_fallback_when_grid_capped(self, jj100):
        policy = GridPolicy(points_per_sigma=10.0, span_sigmas=7.0, max_points_per_axis=96)
        rows = zeta_sweep(jj100, [0.9], policy)
        assert rows[0].method_flag == "bo"
        assert rows[0].s_numeric == pytest.approx(rows[0].s_harmonic, rel=0.03)

    def test_row_failure_is_recorded(self, jj100):
        # per-axis budget passes the policy check but overflows the 2D cap
        policy = GridPolicy(points_per_sigma=100.0, span_sigmas=7.0, max_points_per_axis=2000)
        rows = zeta_sweep(jj100, [0.5, 0.6], policy)
        assert all(r.method_flag.startswith("failed:") for r in rows)
        assert all(math.isnan(r.s_numeric) for r in rows)

    def test_parallel_matches_serial(self, jj100):
        zetas = [0.0, 0.5, 0.9]
        policy = GridPolicy(points_per_sigma=8.0)
        serial = zeta_sweep(jj100, zetas, policy, workers=1)
        parallel = zeta_sweep(jj100, zetas, policy, workers=3)
        for a, b in zip(serial, parallel):
            assert a.zeta == b.zeta
            assert a.s_numeric == b.s_numeric

    def test_columns_contract(self):
        assert SWEEP_COLUMNS == (
            "zeta",
            "log10_inv_one_minus_zeta",
            "s_numeric",
            "s_harmonic",
            "cross_theta_norm_numeric",
            "cross_theta_norm_harmonic",
            "cross_p",
            "method_flag",
        )
