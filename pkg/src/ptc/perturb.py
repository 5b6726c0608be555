"""Perturbative eigenfunctions and energies for both model Hamiltonians.

Two independent routes are provided and must agree exactly:

* transcribed closed-form coefficient tables (``cubic_table_wavefunction``,
  ``quartic_table_wavefunction`` and the energy/normalization series), and
* a from-scratch Rayleigh-Schrodinger recursion in the Hermite basis
  (``derive_wavefunction``), which serves as the anti-transcription oracle.

Conventions: the eigenfunction of level n is

    phi_n(x) = i^n a_n / (pi^{1/4} 2^{n/2} sqrt(n!)) * e^{-x^2/2} * B_n(x; eps)

where the bracket B_n is an EpsilonSeries of HermiteSeries with B_n(eps=0) =
H_n, no H_n component at higher orders, and a_n is the scalar series fixed by
the PT normalization  int phi_n^2 dx = (-1)^n  through the truncation order.
The cubic model is expanded through eps^3, the quartic through eps^1; higher
orders are rejected, not extrapolated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .hermite import (
    EpsilonSeries,
    HermiteSeries,
    RC_I,
    RC_ONE,
    RC_ZERO,
    RationalComplex,
    invert_series,
    plain_bilinear_raw,
    sqrt_one_plus,
)

__all__ = [
    "PerturbativeWavefunction",
    "cubic_table_wavefunction",
    "quartic_table_wavefunction",
    "cubic_energy",
    "quartic_energy",
    "derive_wavefunction",
    "CUBIC_ORDER",
    "QUARTIC_ORDER",
]

CUBIC_ORDER = 3
QUARTIC_ORDER = 1

F = Fraction


# -- small exact polynomial helpers (coefficients ascending in n) -----------

def poly_mul(a, b):
    out = [F(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return tuple(out)


def poly_scale(a, s):
    s = F(s)
    return tuple(ai * s for ai in a)


def falling(k):
    """n (n-1) ... (n-k+1) as a coefficient tuple."""
    out = (F(1),)
    for j in range(k):
        out = poly_mul(out, (F(-j), F(1)))
    return out


def poly_eval(a, n):
    total = F(0)
    for c in reversed(a):
        total = total * n + c
    return total


# -- transcribed coefficient tables ------------------------------------------
# Each row is (index shift, polynomial in n).  Rows with negative shifted
# index are absent for small n; their polynomial prefactors vanish there.

CUBIC_P_ROWS = (
    (3, (F(1, 24),)),
    (1, (F(3, 4), F(3, 4))),
    (-1, poly_scale(poly_mul((F(0), F(1)), (F(0), F(1))), F(-3, 2))),
    (-3, poly_scale(falling(3), F(-1, 3))),
)

CUBIC_Q_ROWS = (
    (6, (F(1, 1152),)),
    (4, (F(7, 128), F(4, 128))),
    (2, (F(27, 32), F(33, 32), F(7, 32))),
    (-2, poly_scale(poly_mul(falling(2), (F(1), F(-19), F(7))), F(1, 8))),
    (-4, poly_scale(poly_mul(falling(4), (F(-3), F(4))), F(1, 8))),
    (-6, poly_scale(falling(6), F(1, 18))),
)

CUBIC_R_ROWS = (
    (9, (F(1, 82944),)),
    (7, (F(5, 3072), F(2, 3072))),
    (5, (F(549, 7680), F(465, 7680), F(80, 7680))),
    (3, (F(7506, 6912), F(9832, 6912), F(3639, 6912), F(488, 6912))),
    (1, (F(228 * 3, 128), F(408 * 3, 128), F(203 * 3, 128), F(-3, 128), F(60, 128))),
    (-1, poly_scale(poly_mul((F(0), F(1)), (F(44), F(81), F(326), F(81), F(20))),
                    F(-3, 64))),
    (-3, poly_scale(poly_mul(falling(3), (F(-825), F(4018), F(-2175), F(488))),
                    F(-1, 864))),
    (-5, poly_scale(poly_mul(falling(5), (F(164), F(-305), F(80))), F(-1, 240))),
    (-7, poly_scale(poly_mul(falling(7), (F(-3), F(2))), F(-1, 24))),
    (-9, poly_scale(falling(9), F(-1, 162))),
)

QUARTIC_P_ROWS = (
    (4, (F(1, 64),)),
    (2, (F(3, 8), F(2, 8))),
    (-2, poly_scale(poly_mul(falling(2), (F(-1), F(2))), F(-1, 2))),
    (-4, poly_scale(falling(4), F(-1, 4))),
)

# energy corrections: cubic eps^2 and quartic eps^1 coefficients
CUBIC_E2_POLY = (F(11, 8), F(30, 8), F(30, 8))
QUARTIC_E1_POLY = (F(-3, 4), F(-6, 4), F(-6, 4))

# cubic normalization: a_n = 1 + A2(n) eps^2 + O(eps^4)
CUBIC_A2_POLY = poly_scale(
    poly_mul((F(1), F(2)), (F(87), F(82), F(82))), F(1, 144)
)


def _instantiate(rows, n: int) -> HermiteSeries:
    coeffs = {}
    for shift, poly in rows:
        k = n + shift
        if k < 0:
            continue
        c = poly_eval(poly, n)
        if c != 0:
            coeffs[k] = RationalComplex(c)
    return HermiteSeries(coeffs)


@dataclass(frozen=True)
class PerturbativeWavefunction:
    """Level-n eigenfunction expansion; see module docstring for conventions."""

    model: str
    n: int
    bracket: EpsilonSeries     # of HermiteSeries
    a: EpsilonSeries           # scalar normalization series

    @property
    def order(self) -> int:
        return self.bracket.order

    def dressed(self) -> EpsilonSeries:
        """a_n(eps) * B_n(x; eps): the full expansion inside the prefactor."""
        return self.a.convolve(
            self.bracket, lambda s, h: h.scale(s), HermiteSeries.zero()
        )

    def pt_norm(self) -> EpsilonSeries:
        """(phi_n, phi_n) per eps order; equals (-1)^n exactly at order 0."""
        d = self.dressed()
        pt = d.map(lambda h: h.pt_conjugate())
        raw = pt.convolve(d, plain_bilinear_raw, RC_ZERO)
        den = 1
        for k in range(1, self.n + 1):
            den *= 2 * k
        return raw.map(lambda s: s / den)

    def evaluate(self, x, eps: float):
        """Numeric phi_n(x) at real coupling eps, full convention included."""
        x = np.asarray(x, dtype=np.complex128)
        d = self.dressed()
        total = np.zeros(x.shape, dtype=np.complex128)
        for k, series in enumerate(d.terms):
            total += (eps ** k) * series.evaluate(x)
        lognorm = 0.25 * math.log(math.pi) + 0.5 * (
            self.n * math.log(2.0) + math.lgamma(self.n + 1)
        )
        return (1j ** self.n) * total * math.exp(-lognorm)


def _zero_series(order: int) -> list[HermiteSeries]:
    return [HermiteSeries.zero() for _ in range(order + 1)]


def cubic_table_wavefunction(n: int) -> PerturbativeWavefunction:
    """Transcribed cubic expansion: bracket H_n - i P_n eps - Q_n eps^2 + i R_n eps^3."""
    if n < 0:
        raise ValueError("level index must be nonnegative")
    terms = [
        HermiteSeries.basis(n),
        _instantiate(CUBIC_P_ROWS, n).scale(-RC_I),
        _instantiate(CUBIC_Q_ROWS, n).scale(-RC_ONE),
        _instantiate(CUBIC_R_ROWS, n).scale(RC_I),
    ]
    a = EpsilonSeries([
        RC_ONE,
        RC_ZERO,
        RationalComplex(poly_eval(CUBIC_A2_POLY, n)),
        RC_ZERO,
    ])
    return PerturbativeWavefunction("cubic", n, EpsilonSeries(terms), a)


def quartic_table_wavefunction(n: int) -> PerturbativeWavefunction:
    """Transcribed quartic expansion: bracket H_n + P_n eps, a_n = 1 + O(eps^2)."""
    if n < 0:
        raise ValueError("level index must be nonnegative")
    terms = [HermiteSeries.basis(n), _instantiate(QUARTIC_P_ROWS, n)]
    a = EpsilonSeries([RC_ONE, RC_ZERO])
    return PerturbativeWavefunction("quartic", n, EpsilonSeries(terms), a)


def cubic_energy(n: int) -> EpsilonSeries:
    """E_n series through eps^3; odd-order coefficients vanish."""
    if n < 0:
        raise ValueError("level index must be nonnegative")
    return EpsilonSeries([
        RationalComplex(F(2 * n + 1, 2)),
        RC_ZERO,
        RationalComplex(poly_eval(CUBIC_E2_POLY, n)),
        RC_ZERO,
    ])


def quartic_energy(n: int) -> EpsilonSeries:
    """E_n series through eps^1."""
    if n < 0:
        raise ValueError("level index must be nonnegative")
    return EpsilonSeries([
        RationalComplex(F(2 * n + 1, 2)),
        RationalComplex(poly_eval(QUARTIC_E1_POLY, n)),
    ])


def rs_energy_coefficients(model: str, n: int, order: int) -> list[complex]:
    """Energy series coefficients from the bare recursion, any order.

    Solver-seeding plumbing: the public wavefunction expansions stay capped
    at the published orders, but bracketing the numerical eigenvalue search
    benefits from a few more energy terms of the (asymptotic) series.
    """
    bracket = [HermiteSeries.basis(n)]
    energies = [RationalComplex(F(2 * n + 1, 2))]
    for k in range(1, order + 1):
        g = _perturbation_term(model, bracket[k - 1]).scale(-RC_ONE)
        for j in range(1, k):
            g = g + bracket[k - j].scale(energies[j])
        e_k = -g.coeffs.get(n, RC_ZERO)
        energies.append(e_k)
        coeffs = {}
        for m, c in g.coeffs.items():
            if m == n:
                continue
            coeffs[m] = c / RationalComplex(m - n)
        bracket.append(HermiteSeries(coeffs))
    return [complex(e) for e in energies]


def _perturbation_term(model: str, f: HermiteSeries) -> HermiteSeries:
    """W f for the coupling term: i x^3 (cubic) or -x^4 (quartic)."""
    g = f.multiply_by_x().multiply_by_x().multiply_by_x()
    if model == "cubic":
        return g.scale(RC_I)
    return g.multiply_by_x().scale(-RC_ONE)


def derive_wavefunction(model: str, n: int, order: int | None = None):
    """Independent Rayleigh-Schrodinger recursion in the Hermite basis.

    Solves (H0 - E0) B^(k) = sum_j E^(j) B^(k-j) - W B^(k-1) order by order,
    taking the H_n component of each correction to vanish inside the bracket
    and fixing the overall a_n(eps) from the PT normalization afterwards.
    Returns (wavefunction, energy_series).  Raises if the solvability
    condition cannot be met, which would signal an implementation bug.
    """
    if model not in ("cubic", "quartic"):
        raise ValueError(f"unknown model {model!r}")
    if n < 0:
        raise ValueError("level index must be nonnegative")
    max_order = CUBIC_ORDER if model == "cubic" else QUARTIC_ORDER
    if order is None:
        order = max_order
    if not 0 <= order <= max_order:
        raise ValueError(f"{model} expansion is only carried through order {max_order}")

    bracket = [HermiteSeries.basis(n)]
    energies = [RationalComplex(F(2 * n + 1, 2))]
    for k in range(1, order + 1):
        g = _perturbation_term(model, bracket[k - 1]).scale(-RC_ONE)
        for j in range(1, k):
            g = g + bracket[k - j].scale(energies[j])
        e_k = -g.coeffs.get(n, RC_ZERO)
        energies.append(e_k)
        coeffs = {}
        for m, c in g.coeffs.items():
            if m == n:
                if not (c + e_k).is_zero():
                    raise ArithmeticError("solvability condition violated")
                continue
            coeffs[m] = c / RationalComplex(m - n)
        bracket.append(HermiteSeries(coeffs))

    # PT normalization: the i^{2n} prefactor supplies the (-1)^n of the norm,
    # so the bracket square must satisfy a^2 * (plain square) = 2^n n!.
    bseries = EpsilonSeries(bracket)
    sq = bseries.convolve(bseries, plain_bilinear_raw, RC_ZERO)
    den = 1
    for k in range(1, n + 1):
        den *= 2 * k
    rel = sq.map(lambda s: s / den)   # 1 + O(eps^2)
    u = EpsilonSeries([t - (RC_ONE if k == 0 else RC_ZERO)
                       for k, t in enumerate(rel.terms)])
    a = invert_series(sqrt_one_plus(u))
    wf = PerturbativeWavefunction(model, n, bseries, a)
    return wf, EpsilonSeries(energies)
