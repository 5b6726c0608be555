"""Parabolic cylinder functions, their second solutions, and Airy pairs.

``parabolic_d`` evaluates D_nu(z) for the orders this project needs
(nu = -1/2, nonnegative integers, and nu = -n-1 at rotated arguments) for
real or complex z:

* nonnegative integer nu: the exact Hermite closed form
  D_n(z) = 2^{-n/2} e^{-z^2/4} H_n(z / sqrt 2);
* otherwise a parity decomposition in Kummer functions,

      D_nu(z) = c1 y_even(z) + c2 y_odd(z),
      y_even = e^{-z^2/4} M(-nu/2, 1/2, z^2/2),
      y_odd  = z e^{-z^2/4} M((1-nu)/2, 3/2, z^2/2),
      c1 = 2^{nu/2} sqrt(pi) / Gamma((1-nu)/2),
      c2 = -2^{(nu+1)/2} sqrt(pi) / Gamma(-nu/2),

  with the Kummer transformation M(a,b,t) = e^t M(b-a,b,-t) applied whenever
  Re t < 0, which keeps the series free of cancellation (for the rotated
  arguments needed by the second solutions it terminates); beyond
  ``asymptotic_threshold`` the standard large-|z| expansion is used.

The second solutions C_n are built from the defining combination of
D_{-n-1}(+-iz); an independent validation path integrates the parabolic
cylinder equation from closed-form initial values at the origin.
"""

from __future__ import annotations

import math
import cmath
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from ._accel import integrate_nodes

__all__ = [
    "SpecialFunctionConfig",
    "DEFAULT_CONFIG",
    "SpecialFunctionError",
    "parabolic_d",
    "parabolic_d_pair",
    "parabolic_d_real_with_deriv",
    "c_second_solution",
    "c_second_solution_pair",
    "c_second_solution_ode",
    "airy_pair",
]


class SpecialFunctionError(RuntimeError):
    """Unsupported order or accuracy not reached within the cutoff."""


@dataclass(frozen=True)
class SpecialFunctionConfig:
    target_accuracy: float = 1e-10
    series_cutoff: int = 600
    asymptotic_threshold: float = 6.0

    def __post_init__(self):
        if not 0.0 < self.target_accuracy <= 1e-4:
            raise ValueError("target_accuracy must lie in (0, 1e-4]")
        if self.series_cutoff <= 0 or self.asymptotic_threshold <= 0:
            raise ValueError("cutoffs must be positive")


DEFAULT_CONFIG = SpecialFunctionConfig()

_SQRT_PI = math.sqrt(math.pi)


def _kummer_m(a: float, b: float, t: complex, cfg: SpecialFunctionConfig):
    """M(a, b, t) and dM/dt, Kummer-stabilized for Re t < 0."""
    if t.real < 0.0:
        m, dm = _kummer_series(b - a, b, -t, cfg)
        et = cmath.exp(t)
        return et * m, et * (m - dm)
    return _kummer_series(a, b, t, cfg)


def _kummer_series(a: float, b: float, t: complex, cfg: SpecialFunctionConfig):
    term = 1.0 + 0.0j
    total = term
    dtotal = 0.0 + 0.0j
    k = 0
    # negative-integer a terminates the series exactly
    nmax = cfg.series_cutoff
    if a <= 0 and abs(a - round(a)) == 0.0:
        nmax = min(nmax, int(-round(a)) + 1)
    while k < nmax:
        dtotal += term * (a + k) / ((b + k) * (k + 1)) * (k + 1)
        term = term * (a + k) * t / ((b + k) * (k + 1))
        total += term
        k += 1
        if abs(term) <= cfg.target_accuracy * 1e-3 * max(abs(total), 1e-30) and k > abs(t):
            return total, dtotal
    if a <= 0 and abs(a - round(a)) == 0.0:
        return total, dtotal
    raise SpecialFunctionError(
        f"Kummer series did not reach {cfg.target_accuracy} within {cfg.series_cutoff} terms"
    )


def _hermite_closed_form(n: int, z: complex) -> complex:
    w = z / math.sqrt(2.0)
    h_prev, h_cur = 1.0 + 0.0j, 2.0 * w
    if n == 0:
        h = h_prev
    elif n == 1:
        h = h_cur
    else:
        for k in range(2, n + 1):
            h = 2.0 * w * h_cur - 2.0 * (k - 1) * h_prev
            h_prev, h_cur = h_cur, h
    return 2.0 ** (-n / 2.0) * cmath.exp(-z * z / 4.0) * h


def _d_asymptotic(nu: float, z: complex, cfg: SpecialFunctionConfig) -> complex:
    """e^{-z^2/4} z^nu sum_k (-1)^k (-nu)_{2k} / (k! (2 z^2)^k), |arg z| < 3pi/4."""
    if abs(cmath.phase(z)) >= 2.35:
        raise SpecialFunctionError("asymptotic expansion outside its sector")
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    zz2 = 2.0 * z * z
    best = abs(term)
    for k in range(cfg.series_cutoff):
        term = -term * (-nu + 2 * k) * (-nu + 2 * k + 1) / ((k + 1) * zz2)
        if abs(term) > best:
            break
        best = abs(term)
        total += term
        if abs(term) <= cfg.target_accuracy * abs(total):
            break
    return cmath.exp(-z * z / 4.0) * cmath.exp(nu * cmath.log(z)) * total


_GL64 = np.polynomial.legendre.leggauss(64)


def _d_integral_real(nu: float, z: float) -> float:
    """D_nu(z) for real z > 0, nu < 0, via the Laplace-type representation

        D_nu(z) = e^{-z^2/4}/Gamma(-nu) * int_0^inf t^{-nu-1} e^{-t^2/2 - z t} dt

    with t = v^2.  The integrand is positive and smooth, so a composite
    Gauss-Legendre rule reaches near machine accuracy with no cancellation;
    this covers the window where both the power series and the asymptotic
    expansion degrade.
    """
    vmax = max(3.4, (2.0 * abs(nu) + 2.0) ** 0.25 + 2.4)
    xg, wg = _GL64
    total = 0.0
    panels = 4
    for i in range(panels):
        a = vmax * i / panels
        b = vmax * (i + 1) / panels
        v = 0.5 * (b - a) * xg + 0.5 * (a + b)
        w = 0.5 * (b - a) * wg
        total += np.sum(
            w * 2.0 * v ** (-2.0 * nu - 1.0) * np.exp(-0.5 * v ** 4 - z * v * v)
        )
    return math.exp(-z * z / 4.0) / math.gamma(-nu) * total


def parabolic_d(nu: float, z: complex,
                config: SpecialFunctionConfig = DEFAULT_CONFIG) -> complex:
    """D_nu(z) for real nu, real or complex z (see module docstring)."""
    if float(nu).is_integer() and nu >= 0:
        return _hermite_closed_form(int(nu), complex(z))
    z = complex(z)
    if z.imag == 0.0 and z.real > 4.5 and nu < 0:
        return complex(_d_integral_real(nu, z.real))
    if abs(z) > config.asymptotic_threshold and abs(cmath.phase(z)) < 2.35:
        return _d_asymptotic(nu, z, config)
    t = z * z / 2.0
    m1, _ = _kummer_m(-nu / 2.0, 0.5, t, config)
    m2, _ = _kummer_m((1.0 - nu) / 2.0, 1.5, t, config)
    c1 = 2.0 ** (nu / 2.0) * _SQRT_PI * sp.rgamma((1.0 - nu) / 2.0)
    c2 = -(2.0 ** ((nu + 1.0) / 2.0)) * _SQRT_PI * sp.rgamma(-nu / 2.0)
    egz = cmath.exp(-z * z / 4.0)
    return c1 * egz * m1 + c2 * z * egz * m2


def parabolic_d_pair(nu: float, z: complex,
                     config: SpecialFunctionConfig = DEFAULT_CONFIG):
    """(D_nu(z), D_nu'(z)) via the ladder relation D' = nu D_{nu-1} - (z/2) D."""
    d = parabolic_d(nu, z, config)
    dm1 = parabolic_d(nu - 1.0, z, config)
    return d, nu * dm1 - 0.5 * z * d


def parabolic_d_real_with_deriv(nu: float, x):
    """Vectorized (D_nu, D_nu') on real arguments (library-backed fast path)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0:
        d, dp = sp.pbdv(nu, float(x))
        return float(d), float(dp)
    d, dp = sp.pbdv(nu, x)
    return d, dp


def _ipow(n: int) -> complex:
    return (1.0, 1.0j, -1.0, -1.0j)[n % 4]


def c_second_solution(n: int, z: float,
                      config: SpecialFunctionConfig = DEFAULT_CONFIG) -> float:
    """Second solution C_n(z) = (i/sqrt(2 pi)) [i^n D_{-n-1}(iz) - (-i)^n D_{-n-1}(-iz)].

    Real for real z; the residual imaginary part is checked against the
    configured accuracy.
    """
    if not 0 <= n <= 120:
        raise SpecialFunctionError("second solution supported for 0 <= n <= 120")
    zi = 1j * z
    dp = parabolic_d(-n - 1.0, zi, config)
    dm = parabolic_d(-n - 1.0, -zi, config)
    val = 1j / math.sqrt(2.0 * math.pi) * (_ipow(n) * dp - _ipow(-n) * dm)
    if abs(val.imag) > 1e-6 * max(1.0, abs(val.real)):
        raise SpecialFunctionError("second solution lost reality")
    return val.real


def c_second_solution_pair(n: int, z: float,
                           config: SpecialFunctionConfig = DEFAULT_CONFIG):
    """(C_n(z), C_n'(z)) with the derivative taken through the ladder relation."""
    zi = 1j * z
    dp, dpp = parabolic_d_pair(-n - 1.0, zi, config)
    dm, dmp = parabolic_d_pair(-n - 1.0, -zi, config)
    pref = 1j / math.sqrt(2.0 * math.pi)
    val = pref * (_ipow(n) * dp - _ipow(-n) * dm)
    der = pref * (_ipow(n) * 1j * dpp + _ipow(-n) * 1j * dmp)
    return val.real, der.real


def _c_origin_values(n: int):
    """Closed-form C_n(0), C_n'(0) from the Gamma-function values of D."""
    d0 = 2.0 ** (-(n + 1) / 2.0) * _SQRT_PI * sp.rgamma((n + 2) / 2.0)
    d0p = -(2.0 ** (-n / 2.0)) * _SQRT_PI * sp.rgamma((n + 1) / 2.0)
    pref = 1j / math.sqrt(2.0 * math.pi)
    c0 = pref * (_ipow(n) - _ipow(-n)) * d0
    c0p = pref * 1j * (_ipow(n) + _ipow(-n)) * d0p
    return c0.real, c0p.real


def c_second_solution_ode(n: int, z: float, rtol: float = 1e-11) -> float:
    """Validation path: integrate y'' = (z^2/4 - n - 1/2) y from the origin.

    Initial values come from the closed-form origin constants; outward
    integration follows the growing solution, which is numerically stable.
    """
    c0, c0p = _c_origin_values(n)
    if z == 0.0:
        return c0
    nodes = np.linspace(0.0, z, max(8, int(8 * abs(z)) + 1)).astype(np.complex128)
    vals, lsc, *_ = integrate_nodes(nodes, complex(c0), complex(c0p), 2,
                                    float(n), 0.0, rtol, 1e-300)
    return float((vals[-1] * np.exp(lsc[-1])).real)


def airy_pair(r: float, config: SpecialFunctionConfig = DEFAULT_CONFIG):
    """(Ai(r), Bi(r)); overflow on the growing branch is reported, not clamped."""
    if abs(r) > 30.0:
        raise SpecialFunctionError("airy_pair supports |r| <= 30")
    ai, _, bi, _ = sp.airy(r)
    if not (np.isfinite(ai) and np.isfinite(bi)):
        raise SpecialFunctionError("airy overflow on the growing branch")
    return float(ai), float(bi)
