"""Closed-form band edges, eigenfunctions, duality maps, and dispersion.

Three potential families carry complete closed-form edge data: the a=1 and
a=3 Lame potentials and the (a=2, b=1) associated Lame potential, each in
both the real and the PT-transformed version.  Eigenfunctions are built as
second-order jets so that Schrodinger residuals, superpotentials, and
partner potentials all use analytic derivatives.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import elliptic as ell
from . import floquet
from . import potentials
from .elliptic import Jet2, jets_from_scd

__all__ = [
    "EdgeConstants",
    "edge_constants",
    "BandEdge",
    "DispersionPoint",
    "DualityReport",
    "BranchResolutionError",
    "lame_pt_edges_a1",
    "lame_pt_edges_a3",
    "assoc_pt_edges_21",
    "real_band_edges",
    "pt_band_edges",
    "closed_form_energies",
    "ground_state_builder",
    "ground_energy",
    "pt_energy_map",
    "modulus_duality_check",
    "pt_duality_check",
    "dispersion_analytic",
    "bloch_solution_eval",
    "bloch_solution_jet",
    "ptlame_families",
]

# period class of each eigenfunction type under one real period of the
# potential: u -> u + 2K for the real family, u -> u + 2iK' for the PT one
_REAL_CLASS = {"sn": "A", "cn": "A", "dn": "P", "sncndn": "P", "cn/dn": "A", "sn/dn": "A", "dn2": "P"}
_PT_CLASS = {"sn": "P", "cn": "A", "dn": "A", "sncndn": "P", "cn/dn": "P", "sn/dn": "A", "dn2": "P"}

ptlame_families = (("lame", 1, 0), ("lame", 3, 0), ("assoc", 2, 1))


class BranchResolutionError(RuntimeError):
    """No sign branch of the analytic dispersion gives a real in-band k."""


@dataclass(frozen=True)
class EdgeConstants:
    """The four square-root combinations entering the closed-form edges."""

    delta1: float
    delta2: float
    delta3: float
    delta4: float


def edge_constants(m: float) -> EdgeConstants:
    return EdgeConstants(
        delta1=math.sqrt(1.0 - m + 4.0 * m * m),
        delta2=math.sqrt(4.0 - m + m * m),
        delta3=math.sqrt(4.0 - 7.0 * m + 4.0 * m * m),
        delta4=math.sqrt(4.0 - 5.0 * m + m * m),
    )


def _sigma(m: float) -> float:
    return math.sqrt(4.0 - 3.0 * m)


def _rows_lame1(m: float):
    return [
        (0.0, "sn", lambda S, C, D: S),
        (m, "cn", lambda S, C, D: C),
        (1.0, "dn", lambda S, C, D: D),
    ]


def _rows_lame3(m: float):
    d = edge_constants(m)
    fm = 5.0 * m

    def poly(A):
        return lambda S, C, D, A=A: A - fm * (S * S)

    return [
        (0.0, "sn", lambda S, C, D, p=poly(2 + 2 * m - d.delta3): S * p(S, C, D)),
        (3 * m + 2 * d.delta3 - 2 * d.delta2, "cn", lambda S, C, D, p=poly(2 + m - d.delta2): C * p(S, C, D)),
        (3 + 2 * d.delta3 - 2 * d.delta1, "dn", lambda S, C, D, p=poly(1 + 2 * m - d.delta1): D * p(S, C, D)),
        (1 + m + 2 * d.delta3, "sncndn", lambda S, C, D: S * C * D),
        (4 * d.delta3, "sn", lambda S, C, D, p=poly(2 + 2 * m + d.delta3): S * p(S, C, D)),
        (3 * m + 2 * d.delta3 + 2 * d.delta2, "cn", lambda S, C, D, p=poly(2 + m + d.delta2): C * p(S, C, D)),
        (3 + 2 * d.delta3 + 2 * d.delta1, "dn", lambda S, C, D, p=poly(1 + 2 * m + d.delta1): D * p(S, C, D)),
    ]


def _rows_assoc21(m: float):
    d4 = edge_constants(m).delta4
    sg = _sigma(m)
    tm = 3.0 * m

    def bracket(c0):
        return lambda S, C, D, c0=c0: tm * (S * S) + c0

    return [
        (0.0, "cn/dn", lambda S, C, D, p=bracket(-2 + sg): (C / D) * p(S, C, D)),
        (2 * sg - m - 2 * d4, "sn/dn", lambda S, C, D, p=bracket(-2 - m + d4): (S / D) * p(S, C, D)),
        (2 * sg - m + 2 * d4, "sn/dn", lambda S, C, D, p=bracket(-2 - m - d4): (S / D) * p(S, C, D)),
        (4 * sg, "cn/dn", lambda S, C, D, p=bracket(-2 - sg): (C / D) * p(S, C, D)),
        (5 - 3 * m + 2 * sg, "dn2", lambda S, C, D: D * D),
    ]


_FAMILY_ROWS = {
    ("lame", 1, 0): _rows_lame1,
    ("lame", 3, 0): _rows_lame3,
    ("assoc", 2, 1): _rows_assoc21,
}


def ground_energy(kind: str, a: int, b: int, m: float, pt: bool) -> float:
    """Absolute energy of the lowest band edge for the family."""
    if (kind, a, b) not in _FAMILY_ROWS:
        raise potentials.MissingGroundStateError(f"no closed forms for family {(kind, a, b)!r}")
    if kind == "lame" and a == 1:
        return -(1.0 + m) if pt else m
    if kind == "lame" and a == 3:
        d = edge_constants(m)
        return -(5.0 + 5.0 * m + 2.0 * d.delta3) if pt else 2.0 + 5.0 * m - 2.0 * d.delta1
    sg = _sigma(m)
    return -(5.0 + m + 2.0 * sg) if pt else 4.0 * m


def ground_state_builder(kind: str, a: int, b: int, m: float, pt: bool):
    """(jet builder, absolute ground energy) for a family.

    The builder maps (S, C, D) jets in the natural argument u (real for the
    plain potential, u = i x + beta for the PT version) to the ground-state
    jet.  For the PT version the ground state corresponds to the top row of
    the real family, reached through the level-reversing energy map, which is
    why the builder differs between the two.
    """
    key = (kind, a, b)
    if key not in _FAMILY_ROWS:
        raise potentials.MissingGroundStateError(f"no closed forms for family {key!r}")
    rows = _FAMILY_ROWS[key](m)
    builder = rows[0][2] if pt else rows[-1][2]
    return builder, ground_energy(kind, a, b, m, pt)


@dataclass(frozen=True)
class BandEdge:
    """One closed-form band edge.

    For the PT families ``energy`` is relative to the zero ground state of the
    shifted potential; for the real families it is the plain eigenvalue.
    ``period_class`` is 'P' (period L) or 'A' (antiperiod 2L);
    ``eigenfunction`` evaluates the edge state normalized to max|psi| = 1 over
    one period; ``jet`` returns (psi, psi', psi'') with analytic derivatives.
    """

    index: int
    energy: float
    period_class: str
    eigenfunction: Callable[[float], complex]
    jet: Callable[[float], tuple[complex, complex, complex]]


def _make_edges(kind: str, a: int, b: int, m: float, beta: float | None, pt: bool) -> list[BandEdge]:
    rows = _FAMILY_ROWS[(kind, a, b)](m)
    e_g = ground_energy(kind, a, b, m, pt=True)
    if pt:
        mod = ell.modulus(m)
        length = 2.0 * mod.Kprime
        entries = [(erel, _PT_CLASS[tag], build) for erel, tag, build in rows]
    else:
        length = 2.0 * ell.modulus(m).K
        # level-reversed: real edge j carries the PT row 2a - j
        entries = []
        for j in range(len(rows)):
            erel, tag, build = rows[len(rows) - 1 - j]
            entries.append((-(erel + e_g), _REAL_CLASS[tag], build))

    edges = []
    for idx, (energy, cls, build) in enumerate(entries):
        if pt:
            def raw(x: float, build=build) -> Jet2:
                u = 1j * x + beta
                jv = ell.jacobi_complex(u, m)
                return build(*jets_from_scd(jv.sn, jv.cn, jv.dn, m))

            dfac = 1j
        else:
            def raw(x: float, build=build) -> Jet2:
                jv = ell.jacobi_complex(complex(x), m)
                return build(*jets_from_scd(jv.sn, jv.cn, jv.dn, m))

            dfac = 1.0

        norm = max(abs(raw(x).f) for x in np.linspace(0.0, length, 256, endpoint=False))

        def jet(x: float, raw=raw, norm=norm, dfac=dfac) -> tuple[complex, complex, complex]:
            j = raw(x)
            return j.f / norm, dfac * j.d1 / norm, dfac * dfac * j.d2 / norm

        def eigenfunction(x: float, jet=jet) -> complex:
            return jet(x)[0]

        edges.append(BandEdge(idx, energy, cls, eigenfunction, jet))
    return edges


def lame_pt_edges_a1(m: float, beta: float) -> list[BandEdge]:
    """Three edges of the shifted PT a=1 Lame potential: energies {0, m, 1}."""
    return _make_edges("lame", 1, 0, m, beta, pt=True)


def lame_pt_edges_a3(m: float, beta: float) -> list[BandEdge]:
    """Seven edges of the shifted PT a=3 Lame potential."""
    return _make_edges("lame", 3, 0, m, beta, pt=True)


def assoc_pt_edges_21(m: float, beta: float) -> list[BandEdge]:
    """Five edges of the shifted PT (a=2, b=1) associated Lame potential."""
    return _make_edges("assoc", 2, 1, m, beta, pt=True)


def pt_band_edges(kind: str, a: int, b: int, m: float, beta: float) -> list[BandEdge]:
    return _make_edges(kind, a, b, m, beta, pt=True)


def real_band_edges(kind: str, a: int, b: int, m: float) -> list[BandEdge]:
    """Closed-form edges of the plain (real) family member, absolute energies."""
    return _make_edges(kind, a, b, m, None, pt=False)


def closed_form_energies(kind: str, a: int, b: int, m: float, pt: bool, shifted: bool = False) -> list[float]:
    """Edge energies only.  PT energies are absolute unless ``shifted``."""
    rows = _FAMILY_ROWS[(kind, a, b)](m)
    e_g = ground_energy(kind, a, b, m, pt=True)
    if pt:
        rel = [r[0] for r in rows]
        return rel if shifted else [e + e_g for e in rel]
    return [-(rows[len(rows) - 1 - j][0] + e_g) for j in range(len(rows))]


# ---------------------------------------------------------------------------
# energy maps


def pt_energy_map(lame_edges: list[float], a: int) -> list[float]:
    """Map 2a+1 ascending Lame edges to the PT edges: E_j -> -E_{2a-j}."""
    if len(lame_edges) != 2 * a + 1:
        raise ValueError(f"expected {2 * a + 1} edges for a={a}, got {len(lame_edges)}")
    return [-e for e in reversed(list(lame_edges))]


@dataclass(frozen=True)
class DualityReport:
    relation: str
    a: int
    m: float
    lhs: tuple
    rhs: tuple
    max_violation: float
    tol: float
    passed: bool


def _lame_edges_any(a: int, m: float, **floquet_kw) -> list[float]:
    if a in (1, 3):
        return closed_form_energies("lame", a, 0, m, pt=False)
    spec = potentials.Lame(a, m)
    found = floquet.find_band_edges(spec, -0.5, a * (a + 1) + 0.5, **floquet_kw)
    return [e.energy for e in found if e.multiplicity == 1]


def modulus_duality_check(a: int, m: float, tol: float | None = None, **floquet_kw) -> DualityReport:
    """Check E_j(m) = a(a+1) - E_{2a-j}(1-m) on the Lame family.

    Closed forms for a in {1, 3}; the Floquet engine supplies a=2 (both
    parameters).  At m = 1/2 this is exactly the sum rule
    E_j + E_{2a-j} = a(a+1).
    """
    if a not in (1, 2, 3):
        raise ValueError("duality checks support a in {1, 2, 3}")
    if tol is None:
        tol = 1e-8 if a in (1, 3) else 1e-6
    lhs = _lame_edges_any(a, m, **floquet_kw)
    other = _lame_edges_any(a, 1.0 - m, **floquet_kw)
    rhs = [a * (a + 1) - e for e in reversed(other)]
    viol = max(abs(x - y) for x, y in zip(lhs, rhs))
    return DualityReport("modulus", a, m, tuple(lhs), tuple(rhs), viol, tol, viol < tol)


def pt_duality_check(a: int, m: float, beta: float = 0.5, tol: float | None = None, **floquet_kw) -> DualityReport:
    """Check E^PT_j(m) = E_j(1-m) - a(a+1) between the PT and plain spectra."""
    if a not in (1, 2, 3):
        raise ValueError("duality checks support a in {1, 2, 3}")
    if tol is None:
        tol = 1e-8 if a in (1, 3) else 1e-6
    if a in (1, 3):
        lhs = closed_form_energies("lame", a, 0, m, pt=True)
    else:
        spec = potentials.PTTransform(potentials.Lame(a, m), beta)
        found = floquet.find_band_edges(spec, -(a * (a + 1)) - 0.5, 0.5, **floquet_kw)
        lhs = [e.energy for e in found if e.multiplicity == 1]
    rhs = [e - a * (a + 1) for e in _lame_edges_any(a, 1.0 - m, **floquet_kw)]
    viol = max(abs(x - y) for x, y in zip(lhs, rhs))
    return DualityReport("pt", a, m, tuple(lhs), tuple(rhs), viol, tol, viol < tol)


# ---------------------------------------------------------------------------
# dispersion for the a=1 PT potential


@dataclass(frozen=True)
class DispersionPoint:
    """Bloch point of the shifted a=1 PT potential.

    ``k`` is reduced to the first Brillouin zone with Re k in [0, pi/L] and
    Im k >= 0; ``branch`` records which sign of the raw quasi-momentum was
    selected by the reality criterion.
    """

    E: float
    alpha1: complex
    k: complex
    branch: int


def _alpha_kappa(m: float, E: float) -> tuple[complex, complex]:
    mod = ell.modulus(m)
    w = cmath.sqrt(complex(E) / m)
    alpha1 = ell.inverse_sn(w, m)
    z1 = ell.zeta_Z(ell.theta_bundle(m), alpha1)
    kappa = z1 + math.pi * alpha1 / (2.0 * mod.K * mod.Kprime)
    return alpha1, kappa


def _fold_bz(k: complex, L: float) -> complex:
    g = 2.0 * math.pi / L
    return k - g * round(k.real / g)


def dispersion_analytic(m: float, beta: float, E: float, branch_tol: float = 1e-6) -> DispersionPoint:
    """Analytic Bloch wavenumber k(E) for the shifted a=1 PT potential.

    The energy fixes alpha1 through m*sn(alpha1)**2 = E on the fundamental
    rectangle; the quasi-momentum is Z(alpha1) + pi*alpha1/(2KK'), with the
    sign branch resolved by requiring Im k = 0 inside the open bands
    (0, m) and (1, inf).  A failure of that requirement raises
    :class:`BranchResolutionError` rather than being silently patched.
    """
    mod = ell.modulus(m)
    L = 2.0 * mod.Kprime
    alpha1, kappa = _alpha_kappa(m, E)
    in_band = (branch_tol < E < m - branch_tol) or (E > 1.0 + branch_tol)
    candidates = [(-1, _fold_bz(-kappa, L)), (+1, _fold_bz(kappa, L))]
    if in_band:
        real_ones = [(b, k) for b, k in candidates if abs(k.imag) < branch_tol]
        if not real_ones:
            raise BranchResolutionError(
                f"no sign branch gives a real Bloch wavenumber at E={E} (candidates {candidates})"
            )
        branch, k = max(real_ones, key=lambda bk: bk[1].real)
        k = complex(abs(k.real), 0.0)
    else:
        branch, k = max(candidates, key=lambda bk: bk[1].imag)
        k = complex(abs(k.real), k.imag)
        if abs(k.imag) < branch_tol:
            k = complex(k.real, 0.0)
    return DispersionPoint(E, alpha1, k, branch)


def bloch_solution_jet(m: float, beta: float, E: float, sign: int, x: float):
    """(psi, psi', psi'') of the closed-form Bloch solution at real x.

    psi(x) = H(i x + beta + sign*alpha1) exp(-sign*(i x + beta) Z(alpha1))
             / Theta(i x + beta),
    with all derivatives taken term-wise through the theta series.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    bundle = ell.theta_bundle(m)
    alpha1, _ = _alpha_kappa(m, E)
    z1 = ell.zeta_Z(bundle, alpha1)
    u = 1j * x + beta
    (h, dh, d2h), _ = ell.theta_jets(bundle, u + sign * alpha1)
    (_, _, _), (t, dt, d2t) = ell.theta_jets(bundle, u)
    if abs(t) < 1e-12:
        raise ell.ThetaZeroError(f"Theta vanishes near x={x}")
    val = h * cmath.exp(-sign * u * z1) / t
    g = dh / h - sign * z1 - dt / t
    gp = (d2h / h - (dh / h) ** 2) - (d2t / t - (dt / t) ** 2)
    return val, 1j * val * g, -val * (g * g + gp)


def bloch_solution_eval(m: float, beta: float, E: float, sign: int, x: float) -> complex:
    return bloch_solution_jet(m, beta, E, sign, x)[0]
