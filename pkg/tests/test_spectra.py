import math

import numpy as np
import pytest

from ptlame import elliptic as ell
from ptlame import floquet as flq
from ptlame import potentials as pot
from ptlame import spectra as spc

M, BETA = 0.75, 0.5

# from the closed-form expressions at m = 0.75 (delta3 = 1)
A3_ENERGIES = (0.0, 4.25 - 2 * math.sqrt(3.8125), 5 - 2 * math.sqrt(2.5),
               3.75, 4.0, 4.25 + 2 * math.sqrt(3.8125), 5 + 2 * math.sqrt(2.5))
A3_CLASSES = ("P", "A", "A", "P", "P", "A", "A")
A21_CLASSES = ("P", "A", "A", "P", "P")


def _shifted_pt_spec(kind, a, b, m=M, beta=BETA):
    base = pot.associated_lame(a, b, m)
    eg = spc.ground_energy(kind, a, b, m, pt=True)
    return pot.Shifted(pot.PTTransform(base, beta), eg)


class TestEdgeConstants:
    def test_values_at_reference_parameter(self):
        d = spc.edge_constants(M)
        assert abs(d.delta3 - 1.0) < 1e-15
        assert abs(d.delta1 - math.sqrt(2.5)) < 1e-15
        assert abs(d.delta2 - math.sqrt(3.8125)) < 1e-15
        assert abs(d.delta4 - math.sqrt(0.8125)) < 1e-15

    @pytest.mark.parametrize("m", (0.05, 0.3, 0.5, 0.75, 0.95))
    def test_positive_on_domain(self, m):
        d = spc.edge_constants(m)
        assert min(d.delta1, d.delta2, d.delta3, d.delta4) > 0


class TestClosedFormEdges:
    def test_a1_energies(self):
        edges = spc.lame_pt_edges_a1(M, BETA)
        assert [e.energy for e in edges] == [0.0, M, 1.0]
        assert [e.period_class for e in edges] == ["P", "A", "A"]

    def test_a3_energies_match_reference(self):
        edges = spc.lame_pt_edges_a3(M, BETA)
        assert np.allclose([e.energy for e in edges], A3_ENERGIES, atol=1e-12)
        # four-decimal quotes for m = 0.75 (mixed rounding/truncation upstream)
        assert np.allclose([e.energy for e in edges],
                           [0.0, 0.3448, 1.8377, 3.75, 4.0, 8.1552, 8.1623], atol=1.2e-4)
        assert tuple(e.period_class for e in edges) == A3_CLASSES

    def test_a21_energies_and_classes(self):
        sg = math.sqrt(4 - 3 * M)
        d4 = math.sqrt(4 - 5 * M + M * M)
        ref = [0.0, 2 * sg - M - 2 * d4, 2 * sg - M + 2 * d4, 4 * sg, 5 - 3 * M + 2 * sg]
        edges = spc.assoc_pt_edges_21(M, BETA)
        assert np.allclose([e.energy for e in edges], ref, atol=1e-12)
        assert tuple(e.period_class for e in edges) == A21_CLASSES

    @pytest.mark.parametrize("kind,a,b", spc.ptlame_families)
    @pytest.mark.parametrize("m", (0.3, 0.5, 0.75, 0.9))
    def test_energies_ascend(self, kind, a, b, m):
        for pt in (True, False):
            es = spc.closed_form_energies(kind, a, b, m, pt=pt)
            assert all(x < y for x, y in zip(es, es[1:]))

    def test_real_edges_a1(self):
        edges = spc.real_band_edges("lame", 1, 0, M)
        assert np.allclose([e.energy for e in edges], [M, 1.0, 1.0 + M], atol=1e-14)
        assert [e.period_class for e in edges] == ["P", "A", "A"]

    def test_real_ground_energies(self):
        assert abs(spc.ground_energy("lame", 1, 0, M, pt=False) - M) < 1e-14
        assert abs(spc.ground_energy("assoc", 2, 1, M, pt=False) - 4 * M) < 1e-14
        d1 = spc.edge_constants(M).delta1
        assert abs(spc.ground_energy("lame", 3, 0, M, pt=False) - (2 + 5 * M - 2 * d1)) < 1e-14

    def test_unknown_family_raises(self):
        with pytest.raises(pot.MissingGroundStateError):
            spc.ground_energy("lame", 2, 0, M, pt=True)


class TestEigenfunctions:
    @pytest.mark.parametrize("kind,a,b", spc.ptlame_families)
    @pytest.mark.parametrize("m", (0.3, 0.75))
    def test_pt_ode_residuals(self, kind, a, b, m):
        spec = _shifted_pt_spec(kind, a, b, m)
        f = pot.compiled_value_fn(spec)
        edges = spc.pt_band_edges(kind, a, b, m, BETA)
        xs = np.linspace(0.0, spec.period, 40, endpoint=False)
        for e in edges:
            rmax = vmax = 0.0
            for x in xs:
                psi, _, d2psi = e.jet(float(x))
                rmax = max(rmax, abs(-d2psi + (f(float(x)) - e.energy) * psi))
                vmax = max(vmax, abs(f(float(x)) * psi))
            assert rmax / vmax < 1e-8

    @pytest.mark.parametrize("kind,a,b", spc.ptlame_families)
    def test_real_ode_residuals(self, kind, a, b):
        base = pot.associated_lame(a, b, M)
        f = pot.compiled_value_fn(base)
        edges = spc.real_band_edges(kind, a, b, M)
        xs = np.linspace(0.0, base.period, 40, endpoint=False)
        for e in edges:
            rmax = vmax = 0.0
            for x in xs:
                psi, _, d2psi = e.jet(float(x))
                rmax = max(rmax, abs(-d2psi + (f(float(x)) - e.energy) * psi))
                vmax = max(vmax, abs(f(float(x)) * psi) + 1e-30)
            assert rmax / max(vmax, 1e-12) < 1e-8

    @pytest.mark.parametrize("kind,a,b", spc.ptlame_families)
    def test_periodicity_classes_literal(self, kind, a, b):
        spec = _shifted_pt_spec(kind, a, b)
        L = spec.period
        for e in spc.pt_band_edges(kind, a, b, M, BETA):
            sgn = 1.0 if e.period_class == "P" else -1.0
            for x in (0.123, 1.01):
                assert abs(e.eigenfunction(x + L) - sgn * e.eigenfunction(x)) < 1e-9

    def test_normalization(self):
        for e in spc.lame_pt_edges_a3(M, BETA):
            vals = [abs(e.eigenfunction(float(x)))
                    for x in np.linspace(0, 2 * ell.modulus(M).Kprime, 301, endpoint=False)]
            assert max(vals) < 1.0 + 1e-6

    def test_first_derivative_consistency(self):
        e = spc.lame_pt_edges_a3(M, BETA)[2]
        h = 1e-5
        for x in (0.2, 0.9):
            fd = (e.eigenfunction(x + h) - e.eigenfunction(x - h)) / (2 * h)
            assert abs(fd - e.jet(x)[1]) < 1e-8


class TestEnergyMaps:
    def test_pt_map_a1(self):
        assert spc.pt_energy_map([M, 1.0, 1.0 + M], 1) == [-(1.0 + M), -1.0, -M]

    def test_involution(self):
        edges = list(spc.closed_form_energies("lame", 3, 0, M, pt=False))
        assert spc.pt_energy_map(spc.pt_energy_map(edges, 3), 3) == edges

    def test_preserves_ascending_order(self):
        out = spc.pt_energy_map([1.0, 2.0, 5.0], 1)
        assert out == sorted(out)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            spc.pt_energy_map([1.0, 2.0], 1)


class TestDualities:
    def test_a1_modulus_duality_closed_form(self):
        # E_0(m) = m while a(a+1) - E_2(1-m) = 2 - (1 + (1-m)) = m
        r = spc.modulus_duality_check(1, 0.3)
        assert r.passed and r.max_violation < 1e-12

    @pytest.mark.parametrize("a", (1, 3))
    @pytest.mark.parametrize("m", (0.3, 0.5, 0.75))
    def test_closed_form_dualities(self, a, m):
        assert spc.modulus_duality_check(a, m).passed
        assert spc.pt_duality_check(a, m).passed

    @pytest.mark.parametrize("a", (1, 3))
    def test_half_parameter_sum_rule(self, a):
        es = spc.closed_form_energies("lame", a, 0, 0.5, pt=False)
        s = a * (a + 1)
        for j in range(len(es)):
            assert abs(es[j] + es[2 * a - j] - s) < 1e-12
        assert abs(es[a] - s / 2) < 1e-12

    def test_rejects_unsupported_index(self):
        with pytest.raises(ValueError):
            spc.modulus_duality_check(4, 0.5)


class TestDispersion:
    def test_band_edge_wavenumbers(self):
        L = 2 * ell.modulus(M).Kprime
        for E, target in ((0.0, 0.0), (M, math.pi / L), (1.0, math.pi / L)):
            dp = spc.dispersion_analytic(M, BETA, E)
            assert abs(dp.k - target) < 1e-7 / L

    def test_in_band_reality_invariant(self):
        for E in np.linspace(0.02, 0.73, 9):
            dp = spc.dispersion_analytic(M, BETA, float(E))
            assert abs(dp.k.imag) < 1e-8
            assert dp.branch in (-1, 1)

    def test_matches_floquet_mid_band(self):
        spec = _shifted_pt_spec("lame", 1, 0)
        for E in (M / 2, 1.8):
            dp = spc.dispersion_analytic(M, BETA, E)
            kn = flq.dispersion_numeric(spec, E)
            assert abs(dp.k - kn) < 1e-6

    def test_gap_attenuation(self):
        dp = spc.dispersion_analytic(M, BETA, 0.85)
        L = 2 * ell.modulus(M).Kprime
        assert dp.k.imag > 1e-3
        assert abs(dp.k.real - math.pi / L) < 1e-9

    def test_alpha_solves_the_energy_relation(self):
        for E in (0.1, 0.5, 2.0):
            dp = spc.dispersion_analytic(M, BETA, E)
            assert abs(M * ell.jacobi_complex(dp.alpha1, M).sn ** 2 - E) < 1e-10


class TestBlochSolutions:
    def test_ode_residual(self):
        spec = _shifted_pt_spec("lame", 1, 0)
        f = pot.compiled_value_fn(spec)
        E = M / 2
        for x in np.linspace(0.0, spec.period, 20, endpoint=False):
            for sign in (1, -1):
                psi, _, d2psi = spc.bloch_solution_jet(M, BETA, E, sign, float(x))
                assert abs(-d2psi + (f(float(x)) - E) * psi) < 1e-7 * abs(f(float(x)) * psi)

    def test_bloch_factors_are_conjugate_momenta(self):
        E = M / 2
        L = 2 * ell.modulus(M).Kprime
        dp = spc.dispersion_analytic(M, BETA, E)
        x0 = 0.3
        facs = []
        for sign in (1, -1):
            p0 = spc.bloch_solution_eval(M, BETA, E, sign, x0)
            p1 = spc.bloch_solution_eval(M, BETA, E, sign, x0 + L)
            facs.append(p1 / p0)
        assert abs(facs[0] * facs[1] - 1.0) < 1e-7
        assert any(abs(f - np.exp(1j * dp.k * L)) < 1e-7 or abs(f - np.exp(-1j * dp.k * L)) < 1e-7
                   for f in facs)

    def test_first_derivative_consistency(self):
        E, h, x = M / 2, 1e-5, 0.7
        fd = (spc.bloch_solution_eval(M, BETA, E, 1, x + h)
              - spc.bloch_solution_eval(M, BETA, E, 1, x - h)) / (2 * h)
        assert abs(fd - spc.bloch_solution_jet(M, BETA, E, 1, x)[1]) < 1e-8

    def test_rejects_bad_sign(self):
        with pytest.raises(ValueError):
            spc.bloch_solution_jet(M, BETA, 0.3, 0, 0.1)
