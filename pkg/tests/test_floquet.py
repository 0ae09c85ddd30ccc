import math

import numpy as np
import pytest

from ptlame import elliptic as ell
from ptlame import floquet as flq
from ptlame import potentials as pot
from ptlame import spectra as spc

M, BETA = 0.75, 0.5

FREE = pot.CustomPotential(lambda z: 0.0j, math.pi)


def _a1_spec(m=M, beta=BETA):
    return pot.Shifted(pot.PTTransform(pot.Lame(1, m), beta), -(1.0 + m))


class TestMonodromy:
    def test_free_particle_discriminant(self):
        r = flq.monodromy(FREE, 1.0)
        assert abs(r.discriminant + 2.0) < 1e-9
        assert r.stats.det_defect < 1e-9

    def test_free_particle_matches_cosine(self):
        for E in (0.25, 2.0, 7.3):
            d = flq.monodromy(FREE, E).discriminant
            assert abs(d - 2.0 * math.cos(math.sqrt(E) * math.pi)) < 1e-9

    def test_wronskian_conservation(self):
        spec = pot.PTTransform(pot.Lame(3, M), BETA)
        r = flq.monodromy(spec, 2.0)
        det = r.M[0, 0] * r.M[1, 1] - r.M[0, 1] * r.M[1, 0]
        assert abs(det - 1.0) < 1e-9

    def test_trace_independent_of_start_point(self):
        spec = _a1_spec()
        a = flq.monodromy(spec, 0.4)
        b = flq.monodromy(spec, 0.4, x0=spec.period / 3.0)
        assert abs(a.discriminant - b.discriminant) < 1e-9

    def test_real_discriminant_for_pt_spec(self):
        spec = pot.Shifted(pot.PTTransform(pot.Lame(3, M), BETA),
                           spc.ground_energy("lame", 3, 0, M, pt=True))
        for E in (0.5, 2.0, 6.0):
            assert abs(flq.monodromy(spec, E).discriminant.imag) < 1e-7


class TestScan:
    def test_free_particle_columns(self):
        scan = flq.discriminant_scan(FREE, 0.3, 6.0, 40)
        ref = 2.0 * np.cos(np.sqrt(scan.energies) * math.pi)
        assert np.max(np.abs(scan.discriminants.real - ref)) < 1e-8
        assert not scan.im_flags.any()

    def test_pt_spec_imaginary_part_stays_small(self):
        spec = pot.Shifted(pot.PTTransform(pot.AssociatedLame(2, 1, M), BETA),
                           spc.ground_energy("assoc", 2, 1, M, pt=True))
        scan = flq.discriminant_scan(spec, -0.4, 6.0, 80)
        assert not scan.im_flags.any()
        assert np.max(np.abs(scan.discriminants.imag)) < 1e-7

    def test_coarse_candidates_present(self):
        scan = flq.discriminant_scan(_a1_spec(), -0.3, 1.5, 240)
        kinds = {cls for _, cls, _ in scan.edges_found}
        assert kinds == {"P", "A"}

    def test_input_validation(self):
        with pytest.raises(ValueError):
            flq.discriminant_scan(FREE, 2.0, 1.0, 10)
        with pytest.raises(ValueError):
            flq.discriminant_scan(FREE, 0.0, 1.0, 1)


class TestEdgeFinding:
    def test_a1_pt_edges(self):
        found = flq.find_band_edges(_a1_spec(), -0.5, 1.8)
        assert len(found) == 3
        assert np.allclose([e.energy for e in found], [0.0, M, 1.0], atol=1e-8)
        assert [e.period_class for e in found] == ["P", "A", "A"]

    def test_free_particle_closed_gaps(self):
        found = flq.find_band_edges(FREE, 0.2, 10.0)
        assert [round(e.energy, 6) for e in found] == [1.0, 4.0, 9.0]
        assert all(e.multiplicity == 2 for e in found)
        assert [e.period_class for e in found] == ["A", "P", "A"]

    def test_convergence_under_tolerance_halving(self):
        a = flq.find_band_edges(_a1_spec(), -0.4, 1.6, rtol=1e-11, atol=1e-13)
        b = flq.find_band_edges(_a1_spec(), -0.4, 1.6, rtol=5e-12, atol=5e-14)
        for x, y in zip(a, b):
            assert abs(x.energy - y.energy) < 1e-8

    def test_warns_when_range_too_small(self):
        with pytest.warns(UserWarning, match="range is probably too small"):
            flq.find_band_edges(_a1_spec(), -0.3, 0.5, density=300)

    def test_real_assoc21_closed_gap_detected(self):
        # the real (2,1) potential has all four simple excited edges
        # antiperiodic; its second band carries a doubly degenerate periodic
        # point where the discriminant touches +2 from below
        found = flq.find_band_edges(pot.AssociatedLame(2, 1, M), 2.5, 9.0, density=200)
        simple = [e for e in found if e.multiplicity == 1]
        closed = [e for e in found if e.multiplicity == 2]
        ref = spc.closed_form_energies("assoc", 2, 1, M, pt=False)
        assert np.allclose([e.energy for e in simple], ref, atol=1e-7)
        assert [e.period_class for e in simple] == ["P", "A", "A", "A", "A"]
        assert len(closed) == 1 and closed[0].period_class == "P"
        notes = flq.check_interleaving(found)
        assert any("closed gap" in s for s in notes)
        assert any("deviate" in s for s in notes)

    def test_landen_reduced_pt_edges_match(self):
        # a = b associated potential vs its Landen-reduced Lame form: the PT
        # band edges agree after undoing the additive constant and the
        # argument rescaling (energies scale by 1/alpha**2)
        m = 0.75
        spec = pot.AssociatedLame(1, 1, m)
        lame, const = pot.landen_reduce_equal_ab(spec)
        alpha, _ = ell.landen_descend(m)
        pt_assoc = pot.PTTransform(spec, BETA)
        pt_lame = pot.PTTransform(lame, BETA)
        found = flq.find_band_edges(pt_assoc, -2 * 2 * m - 3.0, 0.5, density=300)
        found_l = flq.find_band_edges(pt_lame, -2.5, 0.5, density=300)
        # above the top edge every gap is closed; compare the true edges only
        mapped = [-const + e.energy / alpha**2 for e in found_l if e.multiplicity == 1]
        got = [e.energy for e in found if e.multiplicity == 1]
        assert len(got) == len(mapped) == 3
        assert np.allclose(got, mapped, atol=1e-6)


class TestClassification:
    def test_classes_from_discriminant(self):
        assert flq.classify_periodicity(2.0 + 0j) == "P"
        assert flq.classify_periodicity(-2.0 + 0j) == "A"

    def test_ambiguous_raises(self):
        with pytest.raises(flq.ClassificationError):
            flq.classify_periodicity(1.5 + 0j)
        with pytest.raises(flq.ClassificationError):
            flq.classify_periodicity(2.0 + 1e-3j)

    def test_interleave_pattern(self):
        assert flq._interleave_pattern(7) == "PAAPPAA"
        assert flq._interleave_pattern(5) == "PAAPP"


class TestDispersionNumeric:
    def test_edges_snap_to_zone_points(self):
        spec = _a1_spec()
        L = spec.period
        assert abs(flq.dispersion_numeric(spec, 0.0) * L) < 1e-7
        assert abs(flq.dispersion_numeric(spec, M) * L - math.pi) < 1e-7

    def test_gap_has_positive_imaginary_part(self):
        spec = pot.Shifted(pot.PTTransform(pot.Lame(3, M), BETA),
                           spc.ground_energy("lame", 3, 0, M, pt=True))
        k = flq.dispersion_numeric(spec, 1.0)  # inside the first gap
        assert k.imag > 1e-3

    def test_matches_analytic_mid_band(self):
        spec = _a1_spec()
        for E in (0.3, 2.2):
            dp = spc.dispersion_analytic(M, BETA, E)
            assert abs(flq.dispersion_numeric(spec, E) - dp.k) < 1e-6


class TestDefaults:
    def test_default_energy_range_brackets_edges(self):
        spec = _a1_spec()
        lo, hi = flq.default_energy_range(spec)
        assert lo <= 0.0 and hi >= 1.0

    def test_integration_failure_reports(self):
        blower = pot.CustomPotential(lambda z: 1.0 / (z.real - 0.5 if abs(z.real - 0.5) > 1e-14 else 1e-14) ** 2, 1.0)
        with pytest.raises(flq.FloquetIntegrationError):
            flq.monodromy(blower, 1.0)
