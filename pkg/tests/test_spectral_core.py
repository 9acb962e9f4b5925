"""Spectral representation, operators, projections, and norms."""

import math

import numpy as np
import pytest

from qgbal import ops
from qgbal.field import EVEN, NONE, ODD, SpectralField, hermitianize
from qgbal.grid import Grid
from qgbal.initial import random_field
from qgbal.norms import (
    NormReport,
    gevrey_norm,
    l2_norm,
    physical_l2_integral,
    sobolev_norm,
)


class TestGrid:
    def test_validation(self):
        with pytest.raises(ValueError, match="even"):
            Grid(7, 8, 8)
        with pytest.raises(ValueError, match="even"):
            Grid(8, 8, 2)
        with pytest.raises(ValueError, match="dealias"):
            Grid(8, 8, 8, dealias_fraction=0.0)
        with pytest.raises(ValueError, match="positive"):
            Grid(8, 8, 8, L1=-1.0)

    def test_wavevector_map(self):
        g = Grid(8, 8, 8, L1=2 * np.pi, L2=np.pi, L3=4 * np.pi)
        idx = g.index_of((1, 1, 1))
        assert np.broadcast_to(g.kp1, g.shape)[idx] == pytest.approx(1.0)
        assert np.broadcast_to(g.kp2, g.shape)[idx] == pytest.approx(2.0)
        assert np.broadcast_to(g.kp3, g.shape)[idx] == pytest.approx(0.5)

    def test_dealias_cut_two_thirds(self):
        # 2/3 rule on N=12 keeps |k_i| <= 4
        g = Grid(12, 12, 12)
        assert g.dealias_cut == (4, 4, 4)

    def test_index_of_range(self):
        g = Grid(8, 8, 8)
        with pytest.raises(ValueError):
            g.index_of((4, 0, 0))  # Nyquist is outside [-4, 4)
        assert g.index_of((-4, 0, 0)) == (4, 0, 0)


class TestTransforms:
    def test_round_trip(self, grid16, rng):
        vals = rng.standard_normal(grid16.shape)
        f = SpectralField.from_physical(grid16, vals)
        err = np.max(np.abs(f.to_physical() - vals)) / np.max(np.abs(vals))
        assert err <= 1e-12

    def test_parseval(self, grid16, rng):
        f = random_field(grid16, decay=0.3, seed=5)
        lhs = physical_l2_integral(f)
        rhs = l2_norm(f) ** 2 * grid16.volume
        assert abs(lhs - rhs) <= 1e-12 * abs(rhs)

    def test_hermitian_by_construction(self, grid16, rng):
        f = SpectralField.from_physical(grid16, rng.standard_normal(grid16.shape))
        assert f.hermitian_error() <= 1e-14


class TestDerivatives:
    def test_laplacian3_eigenfunction(self, grid8):
        f = SpectralField.from_modes(grid8, {(1, 1, 1): 1.0})
        out = ops.laplacian3(f)
        assert out.at((1, 1, 1)) == pytest.approx(-3.0)

    def test_perp_grad_single_mode(self, grid8):
        f = SpectralField.from_modes(grid8, {(1, 0, 0): 1.0})
        gx, gy = ops.perp_grad(f)
        assert gx.at((1, 0, 0)) == pytest.approx(0.0)
        assert gy.at((1, 0, 0)) == pytest.approx(1j)

    def test_grad3_trace_is_laplacian(self, grid8):
        f = random_field(grid8, decay=0.4, seed=2)
        fx, fy, fz = ops.grad3(f)
        trace = ops.ddx(fx) + ops.ddy(fy) + ops.ddz(fz)
        lap = ops.laplacian3(f)
        assert np.max(np.abs(trace.coeffs - lap.coeffs)) <= 1e-13 * np.max(np.abs(lap.coeffs))

    def test_ddz_flips_parity(self, grid8):
        f = SpectralField.zeros(grid8, EVEN)
        assert ops.ddz(f).z_parity == ODD
        assert ops.ddx(f).z_parity == EVEN


class TestInverses:
    def test_inv_laplacian2_mode(self, grid8):
        f = SpectralField.from_modes(grid8, {(1, 1, 0): 1.0})
        assert ops.inv_laplacian2(f).at((1, 1, 0)) == pytest.approx(-0.5)

    def test_inv_laplacian2_mean_profile(self, grid8):
        f = SpectralField.from_modes(grid8, {(0, 0, 3): 1.0})
        assert ops.inv_laplacian2(f).at((0, 0, 3)) == 0.0

    def test_inv_laplacian2_round_trip(self, grid16):
        f = random_field(grid16, decay=0.4, seed=3)
        back = ops.laplacian2(ops.inv_laplacian2(f))
        expected = ops.pz_project(f)
        assert np.max(np.abs(back.coeffs - expected.coeffs)) <= 1e-13 * np.max(
            np.abs(expected.coeffs)
        )

    def test_inv_laplacian3_mode_and_round_trip(self, grid16):
        f = SpectralField.from_modes(grid16, {(1, 1, 1): 1.0})
        assert ops.inv_laplacian3(f).at((1, 1, 1)) == pytest.approx(-1.0 / 3.0)
        r = random_field(grid16, decay=0.4, seed=4)
        back = ops.laplacian3(ops.inv_laplacian3(r))
        assert np.max(np.abs(back.coeffs - r.coeffs)) <= 1e-13 * np.max(np.abs(r.coeffs))
        zero_mode = SpectralField.from_modes(grid16, {(0, 0, 0): 1.0}, hermitianize=False)
        assert ops.inv_laplacian3(zero_mode).at((0, 0, 0)) == 0.0


class TestVerticalIntegral:
    def test_single_mode_antiderivative(self, grid16):
        # f = -2 cos z cos(x+y)-type: check w = -int lap2 chi for
        # chi = cos z cos(x+y): lap2 chi = -2 cos z cos(x+y)
        x, y, z = grid16.meshgrid()
        chi = SpectralField.from_physical(grid16, np.cos(z) * np.cos(x + y), EVEN)
        w = -ops.vertical_integral(ops.laplacian2(chi)) * 1.0
        expect = 2.0 * np.sin(z) * np.cos(x + y)
        assert np.max(np.abs(w.to_physical() - expect)) <= 1e-13

    def test_sin_z_mean_convention(self, grid16):
        x, y, z = grid16.meshgrid()
        f = SpectralField.from_physical(grid16, np.sin(z), ODD)
        out = ops.vertical_integral(f)
        # int_0^z sin = 1 - cos z; zero-mean projection removes the 1
        assert np.max(np.abs(out.to_physical() - (-np.cos(z)))) <= 1e-13
        assert out.z_parity == EVEN

    def test_quadrature_oracle(self, grid16):
        # independent oracle: composite Simpson on a 64-point z-line
        scipy_int = pytest.importorskip("scipy.integrate")
        z64 = np.linspace(0.0, 2 * np.pi, 65)
        vals = np.sin(3 * z64)
        x, y, z = grid16.meshgrid()
        f = SpectralField.from_physical(grid16, np.sin(3 * z), ODD)
        out = ops.vertical_integral(f).to_physical()[0, 0, :]
        z16 = grid16.axes()[2]
        oracle = []
        for zt in z16:
            n = max(int(round(zt / (2 * np.pi) * 64)), 0)
            seg = np.linspace(0.0, zt, 2 * n + 2)
            oracle.append(scipy_int.simpson(np.sin(3 * seg), x=seg))
        oracle = np.array(oracle)
        oracle -= np.mean(np.array([
            scipy_int.simpson(np.sin(3 * np.linspace(0, zz, 200)), x=np.linspace(0, zz, 200))
            if zz > 0 else 0.0
            for zz in np.linspace(0, 2 * np.pi, 400, endpoint=False)
        ]))
        assert np.max(np.abs(out - oracle)) <= 1e-4

    def test_zero(self, grid8):
        f = SpectralField.zeros(grid8, ODD)
        assert np.max(np.abs(ops.vertical_integral(f).coeffs)) == 0.0

    def test_rejects_nonperiodic_primitive(self, grid8):
        f = SpectralField.from_modes(grid8, {(1, 0, 0): 1.0}, NONE)
        with pytest.raises(ops.OperatorError):
            ops.vertical_integral(f)


class TestProjections:
    def test_xy_average_profile(self, grid16):
        x, y, z = grid16.meshgrid()
        f = SpectralField.from_physical(grid16, np.cos(z))
        assert np.max(np.abs(ops.xy_average(f).coeffs - f.coeffs)) <= 1e-15
        assert np.max(np.abs(ops.pz_project(f).coeffs)) <= 1e-15
        fx = SpectralField.from_physical(grid16, np.cos(x))
        assert np.max(np.abs(ops.xy_average(fx).coeffs)) <= 1e-15

    def test_projector_sum(self, grid16):
        f = random_field(grid16, decay=0.4, seed=6)
        total = ops.xy_average(f) + ops.pz_project(f)
        assert np.max(np.abs(total.coeffs - f.coeffs)) <= 1e-15

    def test_low_pass_strict_shell(self, grid8):
        f = SpectralField.from_modes(grid8, {(1, 1, 1): 1.0, (2, 0, 0): 1.0})
        out = ops.low_pass(f, 2.0)
        assert out.at((1, 1, 1)) == pytest.approx(1.0)  # sqrt(3) < 2 kept
        assert out.at((2, 0, 0)) == 0.0  # |k| = 2 excluded (strict)

    def test_low_pass_below_one(self, grid8):
        f = random_field(grid8, decay=0.2, seed=7)
        out = ops.low_pass(f, 0.5)
        assert np.max(np.abs(out.coeffs)) == 0.0  # zero mode excluded upstream

    def test_low_pass_orthogonality(self, grid16):
        f = random_field(grid16, decay=0.3, seed=8)
        lo = ops.low_pass(f, 3.0)
        hi = f - lo
        total = l2_norm(lo) ** 2 + l2_norm(hi) ** 2
        assert abs(total - l2_norm(f) ** 2) <= 1e-13 * l2_norm(f) ** 2

    def test_parity_project(self, grid16):
        x, y, z = grid16.meshgrid()
        f = SpectralField.from_physical(grid16, np.cos(z))
        even = ops.parity_project(f, EVEN)
        odd = ops.parity_project(f, ODD)
        assert np.max(np.abs(even.coeffs - f.coeffs)) <= 1e-15
        assert np.max(np.abs(odd.coeffs)) <= 1e-15
        r = random_field(grid16, decay=0.3, seed=9, z_parity=NONE)
        back = ops.parity_project(r, EVEN) + ops.parity_project(r, ODD)
        assert np.max(np.abs(back.coeffs - r.coeffs)) <= 1e-15
        # idempotent
        twice = ops.parity_project(ops.parity_project(r, ODD), ODD)
        assert np.max(np.abs(twice.coeffs - ops.parity_project(r, ODD).coeffs)) == 0.0


class TestDealias:
    def test_idempotent(self, grid16):
        f = random_field(grid16, decay=0.1, seed=10)
        once = ops.dealias(f)
        twice = ops.dealias(once)
        assert np.max(np.abs(once.coeffs - twice.coeffs)) == 0.0

    def test_product_analytic_convolution(self):
        g = Grid(16, 16, 16)
        x, y, z = g.meshgrid()
        a = SpectralField.from_physical(g, np.cos(2 * x))
        b = SpectralField.from_physical(g, np.cos(3 * x))
        prod = ops.multiply(a, b)
        # cos2x cos3x = (cos x + cos 5x)/2
        expect = SpectralField.from_physical(g, 0.5 * (np.cos(x) + np.cos(5 * x)))
        assert np.max(np.abs(prod.coeffs - ops.dealias(expect).coeffs)) <= 1e-15


class TestNorms:
    def test_gevrey_cos_x(self, grid8):
        x, _, _ = grid8.meshgrid()
        f = SpectralField.from_physical(grid8, np.cos(x))
        sigma = 0.3
        assert gevrey_norm(f, sigma) ** 2 == pytest.approx(math.exp(2 * sigma) / 2.0)

    def test_gevrey_sigma_zero_is_l2(self, grid16):
        f = random_field(grid16, decay=0.5, seed=11)
        assert gevrey_norm(f, 0.0) == pytest.approx(l2_norm(f))

    def test_overflow_guard(self, grid16):
        f = SpectralField.from_modes(grid16, {(5, 5, 5): 1e200})
        assert gevrey_norm(f, 50.0) == float("inf")

    def test_norm_report_ordering(self, grid16):
        f = random_field(grid16, decay=0.5, seed=12)
        rep = NormReport.of(f, s=2.0, sigma=0.3)
        assert 0 <= rep.l2 <= rep.sobolev_s

    def test_reverse_poincare_exhaustive(self, grid16):
        # for band-limited f: |grad3 f|_s <= kappa |f|_s on the 2 pi cube
        kappa = 4.0
        f = ops.low_pass(random_field(grid16, decay=0.2, seed=13), kappa)
        fx, fy, fz = ops.grad3(f)
        s = 2.0
        lhs = math.sqrt(sum(sobolev_norm(h, s) ** 2 for h in (fx, fy, fz)))
        assert lhs <= kappa * sobolev_norm(f, s) * (1 + 1e-12)

    def test_exponential_tail_bound(self, grid16):
        sigma, kappa = 0.5, 3.0
        f = random_field(grid16, decay=0.9, seed=14)
        hi = f - ops.low_pass(f, kappa)
        assert l2_norm(hi) <= math.exp(-sigma * kappa) * gevrey_norm(f, sigma) * (1 + 1e-12)

    def test_operators_commute_with_projections(self, grid16):
        f = random_field(grid16, decay=0.3, seed=15)
        a = ops.low_pass(ops.laplacian3(f), 3.0)
        b = ops.laplacian3(ops.low_pass(f, 3.0))
        assert np.max(np.abs(a.coeffs - b.coeffs)) == 0.0
        c = ops.parity_project(ops.laplacian2(f), EVEN)
        d = ops.laplacian2(ops.parity_project(f, EVEN))
        assert np.max(np.abs(c.coeffs - d.coeffs)) <= 1e-15


class TestFieldAlgebra:
    def test_parity_combination(self, grid8):
        e = SpectralField.zeros(grid8, EVEN)
        o = SpectralField.zeros(grid8, ODD)
        assert (e + e).z_parity == EVEN
        assert (e + o).z_parity == NONE
        assert ops.multiply(e, o).z_parity == ODD
        assert ops.multiply(o, o).z_parity == EVEN

    def test_from_modes_hermitian(self, grid8):
        f = SpectralField.from_modes(grid8, {(1, 2, 3): 1.0 + 0.5j})
        assert f.hermitian_error() <= 1e-15
        g = hermitianize(f)
        assert np.max(np.abs(g.coeffs - f.coeffs)) <= 1e-15
