"""Jacobi elliptic functions, complete integrals, and theta functions.

Everything uses the *parameter* convention: the second argument ``m`` equals
k**2 and is restricted to the open interval (0, 1).  Complete integrals come
from the arithmetic-geometric mean, real-argument Jacobi functions from the
descending-Landen backward recursion, and complex arguments from the
real/imaginary addition decomposition, which is stable everywhere away from
the pole lattice of sn.  Theta functions are nome series with term-wise
derivatives, so logarithmic derivatives never touch numerical differencing.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "EllipticDomainError",
    "PoleProximityError",
    "ThetaZeroError",
    "InversionError",
    "Modulus",
    "JacobiValues",
    "ThetaBundle",
    "Jet2",
    "complete_K",
    "modulus",
    "jacobi_real",
    "jacobi_complex",
    "line_jacobi",
    "sn_pole_lattice_point",
    "theta_bundle",
    "theta_functions",
    "theta_jets",
    "zeta_Z",
    "inverse_sn",
    "landen_descend",
    "jacobi_jets",
    "jets_from_scd",
]

_AGM_EPS = 4e-16


class EllipticDomainError(ValueError):
    """Parameter m outside the supported open interval (0, 1)."""


class PoleProximityError(ValueError):
    """Argument too close to the pole lattice of the Jacobi functions."""

    def __init__(self, z: complex, pole: complex, tol: float):
        super().__init__(
            f"argument {z} lies within {tol} of the pole at {pole}"
        )
        self.z = z
        self.pole = pole
        self.tol = tol


class ThetaZeroError(ValueError):
    """Argument too close to a zero of the Jacobi theta function."""


class InversionError(RuntimeError):
    """Newton refinement for an inverse elliptic function did not converge."""


def _check_parameter(m: float) -> float:
    m = float(m)
    if not 0.0 < m < 1.0:
        raise EllipticDomainError(f"parameter m={m!r} outside the open interval (0, 1)")
    return m


def complete_K(m: float) -> float:
    """Complete elliptic integral of the first kind, K(m), by the AGM.

    The arithmetic-geometric mean converges quadratically, so the result is
    accurate to a relative error below 1e-14 for any m in (0, 1).  The
    endpoints are rejected: K(1) diverges logarithmically.
    """
    m = _check_parameter(m)
    a, b = 1.0, math.sqrt(1.0 - m)
    while a - b > _AGM_EPS * a:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


@dataclass(frozen=True)
class Modulus:
    """Elliptic parameter with its cached quarter periods and nome.

    Attributes
    ----------
    m : parameter in (0, 1)
    K : complete integral K(m)
    Kprime : complementary integral K(1 - m)
    q : nome exp(-pi * Kprime / K), always in (0, 1)
    """

    m: float
    K: float
    Kprime: float
    q: float

    @classmethod
    def from_parameter(cls, m: float) -> "Modulus":
        K = complete_K(m)
        Kp = complete_K(1.0 - m)
        return cls(m, K, Kp, math.exp(-math.pi * Kp / K))


@lru_cache(maxsize=512)
def modulus(m: float) -> Modulus:
    """Cached :class:`Modulus` for the parameter m."""
    return Modulus.from_parameter(m)


@dataclass(frozen=True)
class JacobiValues:
    """The triple (sn, cn, dn) at one complex point."""

    z: complex
    sn: complex
    cn: complex
    dn: complex


@lru_cache(maxsize=512)
def _landen_schedule(m: float) -> tuple[float, tuple[float, ...]]:
    # Descending-Landen coefficients c_n / a_n; they depend only on m, so the
    # per-argument work reduces to one sin/asin pass.
    _check_parameter(m)
    a, b = 1.0, math.sqrt(1.0 - m)
    ratios = []
    while True:
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        ratios.append(c / a)
        if abs(c) <= _AGM_EPS * a:
            break
    return a * 2.0 ** len(ratios), tuple(ratios)


def _jacobi_real_tuple(u: float, m: float) -> tuple[float, float, float]:
    scale, ratios = _landen_schedule(m)
    phi = scale * u
    for r in reversed(ratios):
        phi = 0.5 * (phi + math.asin(r * math.sin(phi)))
    sn = math.sin(phi)
    cn = math.cos(phi)
    dn = math.sqrt(1.0 - m * sn * sn)
    return sn, cn, dn


def _jacobi_real_arrays(u, m: float):
    scale, ratios = _landen_schedule(m)
    phi = scale * np.asarray(u, dtype=float)
    for r in reversed(ratios):
        phi = 0.5 * (phi + np.arcsin(r * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(1.0 - m * sn * sn)
    return sn, cn, dn


def jacobi_real(u: float, m: float) -> JacobiValues:
    """Jacobi sn, cn, dn for real argument via the Landen backward recursion."""
    sn, cn, dn = _jacobi_real_tuple(float(u), _check_parameter(m))
    return JacobiValues(complex(u), complex(sn), complex(cn), complex(dn))


def sn_pole_lattice_point(z: complex, m: float) -> complex:
    """Nearest point of the pole lattice i*K' + 2K*Z + 2i*K'*Z to z."""
    mod = modulus(m)
    w = complex(z) - 1j * mod.Kprime
    nx = round(w.real / (2.0 * mod.K))
    ny = round(w.imag / (2.0 * mod.Kprime))
    return 2.0 * mod.K * nx + 2j * mod.Kprime * ny + 1j * mod.Kprime


def jacobi_complex(z: complex, m: float, tol_pole: float = 1e-6) -> JacobiValues:
    """Jacobi sn, cn, dn for complex argument.

    The argument is split as z = x + i*y and the real-argument values at
    (x, m) and (y, 1-m) are recombined with the addition formulas.  Arguments
    closer than ``tol_pole`` to the common pole lattice are rejected, since
    every downstream tolerance dies near a pole.
    """
    m = _check_parameter(m)
    z = complex(z)
    pole = sn_pole_lattice_point(z, m)
    if abs(z - pole) < tol_pole:
        raise PoleProximityError(z, pole, tol_pole)
    if z.imag == 0.0:
        return jacobi_real(z.real, m)
    s, c, d = _jacobi_real_tuple(z.real, m)
    s1, c1, d1 = _jacobi_real_tuple(z.imag, 1.0 - m)
    den = c1 * c1 + m * (s * s1) ** 2
    sn = (s * d1 + 1j * c * d * s1 * c1) / den
    cn = (c * c1 - 1j * s * d * s1 * d1) / den
    dn = (d * c1 * d1 - 1j * m * s * c * s1) / den
    return JacobiValues(z, sn, cn, dn)


def line_jacobi(beta: float, m: float, tol_pole: float = 1e-6):
    """Fast evaluator for (sn, cn, dn) along the vertical line z = i*x + beta.

    The real-argument triple at (beta, m) is fixed along the line, so each
    call costs a single real Landen pass at (x, 1-m) plus the recombination.
    Returns a callable x -> (sn, cn, dn).
    """
    m = _check_parameter(m)
    beta = float(beta)
    mod = modulus(m)
    # Pole lattice sits on Re z = 0 (mod 2K); keep the whole line clear.
    dist = abs(beta - 2.0 * mod.K * round(beta / (2.0 * mod.K)))
    if dist < tol_pole:
        raise PoleProximityError(complex(beta), sn_pole_lattice_point(complex(beta, mod.Kprime), m), tol_pole)
    s, c, d = _jacobi_real_tuple(beta, m)
    m1 = 1.0 - m
    ss = m * s * s
    cd = c * d
    msc = m * s * c

    def values(x: float) -> tuple[complex, complex, complex]:
        s1, c1, d1 = _jacobi_real_tuple(x, m1)
        den = c1 * c1 + ss * s1 * s1
        return (
            complex(s * d1, cd * s1 * c1) / den,
            complex(c * c1, -s * d * s1 * d1) / den,
            complex(d * c1 * d1, -msc * s1) / den,
        )

    return values


# ---------------------------------------------------------------------------
# theta functions


@dataclass(frozen=True)
class ThetaBundle:
    """Nome series context for the Jacobi eta/theta pair at fixed parameter.

    ``truncation`` is the baseline number of retained series terms for real
    arguments; evaluation extends it automatically for complex arguments so
    the last retained term always falls below 1e-16 of the running sum
    (q**(n**2) decay makes this cheap).
    """

    modulus: Modulus
    truncation: int

    @classmethod
    def for_parameter(cls, m: float, tol: float = 1e-16) -> "ThetaBundle":
        mod = modulus(m)
        n = 1
        while mod.q ** ((n + 0.5) ** 2) > tol * mod.q ** 0.25 and n < 64:
            n += 1
        return cls(mod, n + 1)


@lru_cache(maxsize=512)
def theta_bundle(m: float) -> ThetaBundle:
    return ThetaBundle.for_parameter(m)


def theta_jets(bundle: ThetaBundle, u: complex):
    """Values and first two derivatives of H (eta) and Theta at u.

    Returns ((H, H', H''), (T, T', T'')).  Derivatives are term-wise
    derivatives of the nome series in the reduced variable pi*u/(2K).
    """
    mod = bundle.modulus
    q = mod.q
    w = math.pi / (2.0 * mod.K)
    v = w * complex(u)
    H = dH = d2H = 0j
    T = 1.0 + 0j
    dT = d2T = 0j
    hmax = tmax = 0.0
    small = 0
    n = 0
    while n < 300:
        sgn = -1.0 if n & 1 else 1.0
        qh = q ** ((n + 0.5) ** 2)
        k1 = (2 * n + 1) * w
        a1 = (2 * n + 1) * v
        sh = cmath.sin(a1)
        ch = cmath.cos(a1)
        th = 2.0 * sgn * qh * sh
        H += th
        dH += 2.0 * sgn * qh * k1 * ch
        d2H -= 2.0 * sgn * qh * k1 * k1 * sh
        hterm = 2.0 * qh * max(abs(sh), abs(ch))
        hmax = max(hmax, hterm)
        tterm = 0.0
        if n >= 1:
            qt = q ** (n * n)
            k2 = 2 * n * w
            a2 = 2 * n * v
            st = cmath.sin(a2)
            ct = cmath.cos(a2)
            T += 2.0 * sgn * qt * ct
            dT -= 2.0 * sgn * qt * k2 * st
            d2T -= 2.0 * sgn * qt * k2 * k2 * ct
            tterm = 2.0 * qt * max(abs(st), abs(ct))
            tmax = max(tmax, tterm)
        if n >= bundle.truncation and hterm <= 1e-17 * max(hmax, 1.0) and tterm <= 1e-17 * max(tmax, 1.0):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
        n += 1
    return (H, dH, d2H), (T, dT, d2T)


def theta_functions(bundle: ThetaBundle, u: complex) -> tuple[complex, complex]:
    """Jacobi eta H(u) and theta Theta(u) from the nome series."""
    (H, _, _), (T, _, _) = theta_jets(bundle, u)
    return H, T


def zeta_Z(bundle: ThetaBundle, u: complex, tol_zero: float = 1e-8) -> complex:
    """Jacobi zeta Z(u) = Theta'(u)/Theta(u), via the differentiated series.

    Zeros of Theta coincide with the sn pole lattice; arguments within
    ``tol_zero`` of it are rejected.
    """
    mod = bundle.modulus
    pole = sn_pole_lattice_point(u, mod.m)
    if abs(complex(u) - pole) < tol_zero:
        raise ThetaZeroError(f"argument {u} lies within {tol_zero} of the theta zero at {pole}")
    (_, _, _), (T, dT, _) = theta_jets(bundle, u)
    return dT / T


# ---------------------------------------------------------------------------
# inversion


def _real_inverse_sn(x: float, mod: Modulus) -> complex:
    """Inverse of sn restricted to real values, traced along the boundary
    0 -> K -> K + i*K' -> i*K' of the fundamental rectangle."""
    m = mod.m
    rm = math.sqrt(m)
    sgn = 1.0 if x >= 0.0 else -1.0
    x = abs(x)
    if x < 1e-15:
        return 0j
    if abs(x - 1.0) < 1e-13:
        return complex(sgn * mod.K, 0.0)
    if abs(x - 1.0 / rm) < 1e-13:
        return complex(sgn * mod.K, mod.Kprime)
    if x < 1.0:
        t = brentq(lambda t: _jacobi_real_tuple(t, m)[0] - x, 0.0, mod.K, xtol=1e-14, rtol=8.9e-16)
        return complex(sgn * t, 0.0)
    if x < 1.0 / rm:
        # right edge: sn(K + i s) = 1/dn(s, 1-m); the sign flip moves to -K.
        s = brentq(lambda s: _jacobi_real_tuple(s, 1.0 - m)[2] * x - 1.0, 0.0, mod.Kprime, xtol=1e-14, rtol=8.9e-16)
        return complex(sgn * mod.K, s)
    # top edge: sn(t + i K') = 1/(sqrt(m) sn(t))
    target = 1.0 / (rm * x)
    t = brentq(lambda t: _jacobi_real_tuple(t, m)[0] - target, 0.0, mod.K, xtol=1e-14, rtol=8.9e-16)
    return complex(sgn * t, mod.Kprime)


@lru_cache(maxsize=64)
def _inverse_seed_grid(m: float):
    mod = modulus(m)
    re = np.linspace(-mod.K * 0.995, mod.K * 0.995, 41)
    im = np.linspace(0.0, mod.Kprime * 0.96, 21)
    pts = (re[:, None] + 1j * im[None, :]).ravel()
    vals = np.array([jacobi_complex(p, m).sn for p in pts])
    return pts, vals


def _canonical_rectangle(alpha: complex, w: complex, mod: Modulus) -> complex:
    K, Kp = mod.K, mod.Kprime
    a = complex(alpha)
    a -= 4.0 * K * math.floor((a.real + 2.0 * K) / (4.0 * K))
    a -= 2j * Kp * math.floor((a.imag + Kp) / (2.0 * Kp))
    if a.imag > Kp + 1e-12:
        a = 2.0 * K + 2j * Kp - a
        a -= 4.0 * K * math.floor((a.real + 2.0 * K) / (4.0 * K))
    if a.real > K + 1e-12:
        a = 2.0 * K - a
    elif a.real < -K - 1e-12:
        a = -2.0 * K - a
    if a.imag < -1e-12 and abs(w.imag) < 1e-12:
        a = a.conjugate()
    return a


def inverse_sn(w: complex, m: float, tol: float = 1e-10, max_iter: int = 50) -> complex:
    """Solve sn(alpha, m) = w for alpha in the fundamental rectangle.

    The representative satisfies Re(alpha) in [-K, K] and Im(alpha) in
    [0, K'] whenever w is real or lies in the upper half plane; lower
    half-plane values land in the mirror strip Im(alpha) in [-K', 0).  Real w
    is solved by bracketing along the rectangle boundary; general w by Newton
    on sn(alpha) - w seeded from a precomputed grid.
    """
    m = _check_parameter(m)
    mod = modulus(m)
    w = complex(w)
    if abs(w.imag) < 1e-14:
        alpha = _real_inverse_sn(w.real, mod)
    else:
        pts, vals = _inverse_seed_grid(m)
        alpha = complex(pts[int(np.argmin(np.abs(vals - w)))])
        converged = False
        for _ in range(max_iter):
            jv = jacobi_complex(alpha, m)
            f = jv.sn - w
            if abs(f) < tol:
                converged = True
                break
            deriv = jv.cn * jv.dn
            if abs(deriv) < 1e-14:
                deriv = 1e-14
            step = f / deriv
            if abs(step) > mod.K:
                step *= mod.K / abs(step)
            alpha -= step
        if not converged:
            raise InversionError(f"inverse_sn failed to converge for w={w}, m={m}")
        alpha = _canonical_rectangle(alpha, w, mod)
    residual = abs(jacobi_complex(alpha, m).sn - w)
    if residual > 100.0 * tol * max(1.0, abs(w)):
        raise InversionError(f"inverse_sn residual {residual:.3e} for w={w}, m={m}")
    return alpha


def landen_descend(m: float) -> tuple[float, float]:
    """Descending Landen step: returns (alpha, m_tilde) with m_tilde < m.

    alpha = 1/(1 + sqrt(1-m)) rescales the argument, m_tilde is the reduced
    parameter ((1 - sqrt(1-m))/(1 + sqrt(1-m)))**2.
    """
    m = _check_parameter(m)
    s = math.sqrt(1.0 - m)
    alpha = 1.0 / (1.0 + s)
    mt = ((1.0 - s) / (1.0 + s)) ** 2
    return alpha, mt


# ---------------------------------------------------------------------------
# second-order jets


class Jet2:
    """Second-order jet (value, first, second derivative) in one variable.

    Arithmetic on jets applies the product/quotient rules exactly, which keeps
    every derived quantity (eigenfunction derivatives, superpotentials,
    partner potentials) analytic rather than finite-differenced.
    """

    __slots__ = ("f", "d1", "d2")

    def __init__(self, f, d1=0.0, d2=0.0):
        self.f = f
        self.d1 = d1
        self.d2 = d2

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.f + other.f, self.d1 + other.d1, self.d2 + other.d2)
        return Jet2(self.f + other, self.d1, self.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.f, -self.d1, -self.d2)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet2) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            return Jet2(
                self.f * other.f,
                self.d1 * other.f + self.f * other.d1,
                self.d2 * other.f + 2.0 * self.d1 * other.d1 + self.f * other.d2,
            )
        return Jet2(self.f * other, self.d1 * other, self.d2 * other)

    __rmul__ = __mul__

    def reciprocal(self):
        g, g1, g2 = self.f, self.d1, self.d2
        inv = 1.0 / g
        return Jet2(inv, -g1 * inv * inv, (2.0 * g1 * g1 - g * g2) * inv * inv * inv)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        return Jet2(self.f / other, self.d1 / other, self.d2 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other


def jets_from_scd(s, c, d, m: float) -> tuple[Jet2, Jet2, Jet2]:
    """Jets of sn, cn, dn given their values at a point.

    The derivative rules sn' = cn dn, cn' = -sn dn, dn' = -m sn cn close on
    the triple itself, so jets of any rational expression in (sn, cn, dn)
    follow by jet arithmetic.
    """
    S = Jet2(s, c * d, -s * (d * d) - m * s * (c * c))
    C = Jet2(c, -s * d, -c * (d * d) + m * (s * s) * c)
    D = Jet2(d, -m * s * c, -m * (c * c) * d + m * (s * s) * d)
    return S, C, D


def jacobi_jets(z: complex, m: float) -> tuple[Jet2, Jet2, Jet2]:
    """Jets of sn, cn, dn at a complex point."""
    jv = jacobi_complex(z, m)
    return jets_from_scd(jv.sn, jv.cn, jv.dn, m)
