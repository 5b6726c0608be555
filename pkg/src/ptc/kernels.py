"""Two-point distributional kernels and the eigenfunction-bilinear reducer.

A :class:`DeltaKernel` is a finite combination of terms

    c(eps) * x^a y^b (d/dx)^k  delta(x+y)   ("plus" parity)
    c(eps) * x^a y^b (d/dx)^k  delta(x-y)   ("minus" parity)

in normal order: polynomial prefactors stand left of the derivatives and the
derivatives act only on the delta.  Kernel equality is decided by a canonical
normal form in which the second-variable powers are eliminated through
y^b delta(x -+ y) = (+-x)^b delta(x -+ y).

The central construction sums eigenfunction bilinears

    sum_n w_n phi_n(x) phi_n(+-y)

symbolically.  After absorbing phases, every such sum is a
:class:`BilinearHermiteSum`, a combination of

    sum_{n>=0} alpha(n)/(2^n n!) H_{n+p}(x) H_{n+q}(u) e^{-(x^2+u^2)/2}/sqrt(pi)

with alpha polynomial in n (absent terms where a shifted index is negative).
Reduction proceeds by (i) reindexing so both shifts are nonnegative, which
requires an exact polynomial division by the falling factorial supplied by
the coefficient tables, (ii) converting alpha to the falling-factorial basis,
so that only pure shifted base sums S_{P,Q} remain, and (iii) using the
raising operator  psi_{k+1} = (x - d/dx) psi_k  to write

    S_{P,Q} = (x - d_x)^P (u - d_u)^Q delta(x - u).

Normal-ordering the operator word and replacing d_u -> -d_x on the delta
yields the closed-form kernel, exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import perturb
from ._accel import wave_bilinear_mollified
from .hermite import (
    EpsilonSeries,
    HermiteSeries,
    RC_I,
    RC_ONE,
    RC_ZERO,
    RationalComplex,
)

__all__ = [
    "DeltaKernel",
    "BilinearHermiteSum",
    "ReductionError",
    "reduce_bilinear_sum",
    "c_from_eigenfunctions",
    "parity_from_eigenfunctions",
    "identity_from_eigenfunctions",
    "hamiltonian_from_eigenfunctions",
    "quartic_c_sum_kernel",
    "exponentiated_c",
    "apply_kernel",
    "apply_kernel_series",
    "transcribed_c_kernel",
    "PLUS",
    "MINUS",
]

PLUS = "plus"     # delta(x + y)
MINUS = "minus"   # delta(x - y)

F = Fraction


class ReductionError(ValueError):
    """A bilinear term cannot be reduced to closed form."""


# ---------------------------------------------------------------------------
# exact polynomials in the summation index n, coefficients RationalComplex
# ---------------------------------------------------------------------------

def _rc(v):
    return v if isinstance(v, RationalComplex) else RationalComplex(v)


def _poly_trim(p):
    while p and p[-1].is_zero():
        p = p[:-1]
    return tuple(p)


def _poly_add(a, b):
    n = max(len(a), len(b))
    out = []
    for k in range(n):
        x = a[k] if k < len(a) else RC_ZERO
        y = b[k] if k < len(b) else RC_ZERO
        out.append(x + y)
    return _poly_trim(out)


def _poly_mul(a, b):
    if not a or not b:
        return ()
    out = [RC_ZERO] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return _poly_trim(out)


def _poly_scale(a, s):
    s = _rc(s)
    return _poly_trim([c * s for c in a])


def _poly_eval(a, n):
    total = RC_ZERO
    for c in reversed(a):
        total = total * n + c
    return total


def _poly_shift(a, s: int):
    """p(n) -> p(n + s)."""
    out = ()
    # Horner in (n + s)
    for c in reversed(a):
        out = _poly_add(_poly_mul(out, (RationalComplex(s), RC_ONE)), (c,))
    return out


def _poly_div_linear(a, root):
    """Divide p(n) by (n - root) exactly; raise on nonzero remainder."""
    if not a:
        return ()
    out = [RC_ZERO] * (len(a) - 1)
    carry = RC_ZERO
    for k in range(len(a) - 1, 0, -1):
        carry = a[k] + carry * root if k < len(a) - 1 else a[k]
        out[k - 1] = carry
    rem = a[0] + carry * root
    if not rem.is_zero():
        raise ReductionError("coefficient polynomial lacks the required root")
    return _poly_trim(out)


def _falling_coefficients(a):
    """gamma_j with p(m) = sum_j gamma_j m(m-1)...(m-j+1); Newton differences."""
    deg = len(a) - 1 if a else -1
    vals = [_poly_eval(a, m) for m in range(deg + 1)]
    gammas = []
    fact = 1
    level = vals
    for j in range(deg + 1):
        if j > 0:
            fact *= j
            level = [level[i + 1] - level[i] for i in range(len(level) - 1)]
        if level:
            gammas.append(level[0] / fact)
    return gammas


# ---------------------------------------------------------------------------
# normal-ordered operator words in (x, d/dx)
# ---------------------------------------------------------------------------

class OperatorPoly:
    """Finite combination of normal-ordered words x^a (d/dx)^k."""

    __slots__ = ("words",)

    def __init__(self, words=()):
        items = words.items() if isinstance(words, dict) else words
        clean = {}
        for (a, k), c in items:
            c = _rc(c)
            if not c.is_zero():
                key = (int(a), int(k))
                acc = clean.get(key, RC_ZERO) + c
                if acc.is_zero():
                    clean.pop(key, None)
                else:
                    clean[key] = acc
        self.words = clean

    @staticmethod
    def identity():
        return OperatorPoly({(0, 0): RC_ONE})

    @staticmethod
    def x():
        return OperatorPoly({(1, 0): RC_ONE})

    @staticmethod
    def d():
        return OperatorPoly({(0, 1): RC_ONE})

    def __add__(self, other):
        out = dict(self.words)
        for key, c in other.words.items():
            out[key] = out.get(key, RC_ZERO) + c
        return OperatorPoly(out)

    def scale(self, s):
        s = _rc(s)
        return OperatorPoly({k: c * s for k, c in self.words.items()})

    def __mul__(self, other):
        """Operator composition, re-normal-ordered via [d, x] = 1."""
        out = {}
        for (a, k), c in self.words.items():
            for (b, m), e in other.words.items():
                # d^k x^b = sum_j C(k,j) b!/(b-j)! x^{b-j} d^{k-j}
                for j in range(min(k, b) + 1):
                    coeff = c * e * _binom(k, j) * _fallfact(b, j)
                    key = (a + b - j, k + m - j)
                    out[key] = out.get(key, RC_ZERO) + coeff
        return OperatorPoly(out)

    def power(self, p: int):
        result = OperatorPoly.identity()
        for _ in range(p):
            result = result * self
        return result

    def __eq__(self, other):
        return isinstance(other, OperatorPoly) and self.words == other.words

    def __repr__(self):
        return f"OperatorPoly({self.words!r})"


def _binom(n, k):
    out = 1
    for j in range(k):
        out = out * (n - j) // (j + 1)
    return out


def _fallfact(n, k):
    out = 1
    for j in range(k):
        out *= n - j
    return out


# primitive generators of the eps-graded exponent of the exponentiated form
_X = OperatorPoly.x()
_D = OperatorPoly.d()


def generator_a() -> OperatorPoly:
    """(4/3) d^3 - 2 x d x, normal-ordered."""
    return _D.power(3).scale(F(4, 3)) + (_X * _D * _X).scale(-2)


def generator_b() -> OperatorPoly:
    """(128/15) d^5 - (40/3) x d^3 x + 8 x^2 d x^2 - 32 d."""
    return (
        _D.power(5).scale(F(128, 15))
        + (_X * _D.power(3) * _X).scale(F(-40, 3))
        + (_X.power(2) * _D * _X.power(2)).scale(8)
        + _D.scale(-32)
    )


# ---------------------------------------------------------------------------
# DeltaKernel
# ---------------------------------------------------------------------------

@dataclass
class DeltaKernel:
    """eps-truncated combination of delta-derivative terms.

    ``terms[r]`` maps (a, b, k, parity) -> RationalComplex: the coefficient of
    eps^r x^a y^b (d/dx)^k delta(x + y) (parity "plus") or delta(x - y)
    (parity "minus").
    """

    order: int
    terms: dict = field(default_factory=dict)

    def _cleaned(self):
        return {
            r: {key: c for key, c in tmap.items() if not c.is_zero()}
            for r, tmap in self.terms.items()
        }

    def add_term(self, r, a, b, k, parity, coeff):
        coeff = _rc(coeff)
        tmap = self.terms.setdefault(r, {})
        key = (a, b, k, parity)
        acc = tmap.get(key, RC_ZERO) + coeff
        if acc.is_zero():
            tmap.pop(key, None)
        else:
            tmap[key] = acc

    def term_items(self):
        for r, tmap in sorted(self.terms.items()):
            for (a, b, k, parity), c in sorted(tmap.items()):
                if not c.is_zero():
                    yield r, a, b, k, parity, c

    def scale(self, s) -> "DeltaKernel":
        out = DeltaKernel(self.order)
        for r, a, b, k, parity, c in self.term_items():
            out.add_term(r, a, b, k, parity, c * _rc(s))
        return out

    def __add__(self, other: "DeltaKernel") -> "DeltaKernel":
        out = DeltaKernel(min(self.order, other.order))
        for r, a, b, k, parity, c in itertools.chain(
            self.term_items(), other.term_items()
        ):
            if r <= out.order:
                out.add_term(r, a, b, k, parity, c)
        return out

    def conjugate(self) -> "DeltaKernel":
        out = DeltaKernel(self.order)
        for r, a, b, k, parity, c in self.term_items():
            out.add_term(r, a, b, k, parity, c.conjugate())
        return out

    def reflect_second_argument(self) -> "DeltaKernel":
        """K(x, y) -> K(x, -y): flips parity and the sign of odd y powers."""
        out = DeltaKernel(self.order)
        for r, a, b, k, parity, c in self.term_items():
            newpar = PLUS if parity == MINUS else MINUS
            out.add_term(r, a, b, k, newpar, c * ((-1) ** b))
        return out

    def epsilon_coefficient(self, r: int) -> dict:
        return dict(self.terms.get(r, {}))

    def canonical(self):
        """Per-order canonical form with y powers eliminated.

        y^b delta(x -+ y) = (+-x)^b delta(x -+ y), commuted through the
        derivatives:  x^a y^b d^k delta = (+-1)^b sum_j C(k,j) (b)_j
        x^{a+b-j} d^{k-j} delta.
        """
        canon = {}
        for r, a, b, k, parity, c in self.term_items():
            sign = RC_ONE if parity == MINUS else _rc((-1) ** b)
            for j in range(min(k, b) + 1):
                coeff = c * sign * _binom(k, j) * _fallfact(b, j)
                key = (a + b - j, k - j, parity)
                bucket = canon.setdefault(r, {})
                acc = bucket.get(key, RC_ZERO) + coeff
                if acc.is_zero():
                    bucket.pop(key, None)
                else:
                    bucket[key] = acc
        return {r: m for r, m in canon.items() if m}

    def canonicalized(self) -> "DeltaKernel":
        """Equivalent kernel in the unique normal form with no y powers."""
        out = DeltaKernel(self.order)
        for r, tmap in self.canonical().items():
            for (a, k, parity), c in tmap.items():
                out.add_term(r, a, 0, k, parity, c)
        return out

    def equals(self, other: "DeltaKernel", through_order: int | None = None) -> bool:
        order = min(self.order, other.order)
        if through_order is not None:
            order = min(order, through_order)
        a = self.canonical()
        b = other.canonical()
        for r in range(order + 1):
            if a.get(r, {}) != b.get(r, {}):
                return False
        return True

    def is_zero(self, orders: Iterable[int] | None = None) -> bool:
        canon = self.canonical()
        if orders is None:
            return not canon
        return all(not canon.get(r) for r in orders)

    # -- text form (one term per line) --------------------------------------
    def dumps(self) -> str:
        lines = ["# eps_power re im a b k parity"]
        for r, a, b, k, parity, c in self.term_items():
            lines.append(
                f"{r} {c.re.numerator}/{c.re.denominator} "
                f"{c.im.numerator}/{c.im.denominator} {a} {b} {k} {parity}"
            )
        return "\n".join(lines)

    @staticmethod
    def loads(text: str, order: int | None = None) -> "DeltaKernel":
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            r, re_, im_, a, b, k, parity = line.split()
            rows.append((int(r), F(re_), F(im_), int(a), int(b), int(k), parity))
        if order is None:
            order = max((r for r, *_ in rows), default=0)
        out = DeltaKernel(order)
        for r, re_, im_, a, b, k, parity in rows:
            out.add_term(r, a, b, k, parity, RationalComplex(re_, im_))
        return out


# ---------------------------------------------------------------------------
# bilinear sums and their reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BilinearHermiteSum:
    """Terms (alpha poly in n, p, q) over the weighted bilinear base sum.

    ``reflected`` records that the second argument u stands for -y, i.e. the
    reduced kernel must be reflected into delta(x+y) form.
    """

    terms: tuple
    reflected: bool = False

    @staticmethod
    def from_rows(rows, reflected=False) -> "BilinearHermiteSum":
        terms = tuple(
            (tuple(_rc(c) for c in poly), int(p), int(q)) for poly, p, q in rows
        )
        return BilinearHermiteSum(terms, reflected)


def _reduce_to_base_sums(terms):
    """Collapse (alpha, p, q) terms to coefficients of S_{P,Q}, exactly."""
    acc: dict[tuple, RationalComplex] = {}
    for poly, p, q in terms:
        poly = _poly_trim(tuple(_rc(c) for c in poly))
        if not poly:
            continue
        s = -min(p, q, 0)
        if s > 0:
            shifted = _poly_shift(poly, s)
            for j in range(1, s + 1):
                shifted = _poly_div_linear(shifted, RationalComplex(-j))
            shifted = _poly_scale(shifted, F(1, 2 ** s))
            p, q = p + s, q + s
        gammas = _falling_coefficients(poly if s == 0 else shifted)
        for j, gam in enumerate(gammas):
            if gam.is_zero():
                continue
            key = (p + j, q + j)
            acc[key] = acc.get(key, RC_ZERO) + gam / (2 ** j)
    return {k: c for k, c in acc.items() if not c.is_zero()}


_RAISE_CACHE: dict[int, OperatorPoly] = {}


def _raising_power(p: int) -> OperatorPoly:
    op = _RAISE_CACHE.get(p)
    if op is None:
        op = (_X + _D.scale(-1)).power(p)
        _RAISE_CACHE[p] = op
    return op


def _base_sum_kernel_terms(P: int, Q: int):
    """S_{P,Q} = (x-d_x)^P (u-d_u)^Q delta(x-u) as (a, b, k, coeff) terms."""
    out = []
    for (a, jx), cx in _raising_power(P).words.items():
        for (b, ju), cu in _raising_power(Q).words.items():
            out.append((a, b, jx + ju, cx * cu * ((-1) ** ju)))
    return out


def reduce_bilinear_sum(S: BilinearHermiteSum, order: int = 0,
                        eps_power: int = 0) -> DeltaKernel:
    """Closed-form kernel of a bilinear sum, exact.

    The result lives at ``eps_power`` inside a kernel of truncation
    ``order`` (both default to a plain order-0 kernel).  Raises
    :class:`ReductionError` when a coefficient polynomial lacks the falling
    factorial required by a negative index shift.
    """
    kern = DeltaKernel(order)
    for (P, Q), c in _reduce_to_base_sums(S.terms).items():
        for a, b, k, coeff in _base_sum_kernel_terms(P, Q):
            kern.add_term(eps_power, a, b, k, MINUS, coeff * c)
    if S.reflected:
        kern = kern.reflect_second_argument()
    return kern


# ---------------------------------------------------------------------------
# symbolic eigenfunction bilinears for the spectral sums
# ---------------------------------------------------------------------------

def _rcpoly_from_fractions(poly):
    return tuple(RationalComplex(c) for c in poly)


def _beta_rows(model: str):
    """Bracket rows per eps power: lists of (shift, RC poly), phases folded."""
    if model == "cubic":
        rows = [
            [(0, (RC_ONE,))],
            [(s, _poly_scale(_rcpoly_from_fractions(p), -RC_I))
             for s, p in perturb.CUBIC_P_ROWS],
            [(s, _poly_scale(_rcpoly_from_fractions(p), -RC_ONE))
             for s, p in perturb.CUBIC_Q_ROWS],
            [(s, _poly_scale(_rcpoly_from_fractions(p), RC_I))
             for s, p in perturb.CUBIC_R_ROWS],
        ]
    elif model == "quartic":
        rows = [
            [(0, (RC_ONE,))],
            [(s, _rcpoly_from_fractions(p)) for s, p in perturb.QUARTIC_P_ROWS],
        ]
    else:
        raise ValueError(f"unknown model {model!r}")
    return rows


def _scalar_weight_series(model: str, order: int, with_energy: bool):
    """a_n(eps)^2, optionally times E_n(eps), as polynomials in n per order."""
    if model == "cubic":
        a2 = [(RC_ONE,), (), _poly_scale(
            _rcpoly_from_fractions(perturb.CUBIC_A2_POLY), 2), ()]
    else:
        a2 = [(RC_ONE,), ()]
    a2 = a2[: order + 1] + [()] * max(0, order + 1 - len(a2))
    if not with_energy:
        return a2
    if model != "cubic":
        raise ValueError("energy-weighted sums are built for the cubic model")
    e = [
        (RationalComplex(F(1, 2)), RC_ONE),
        (),
        _rcpoly_from_fractions(perturb.CUBIC_E2_POLY),
        (),
    ][: order + 1]
    e = e + [()] * max(0, order + 1 - len(e))
    out = []
    for r in range(order + 1):
        acc = ()
        for j in range(r + 1):
            if a2[j] and e[r - j]:
                acc = _poly_add(acc, _poly_mul(a2[j], e[r - j]))
        out.append(acc)
    return out


def _bilinear_terms_per_order(model: str, order: int, weight: str):
    """Bilinear (alpha, p, q) term lists per eps order for the spectral sums.

    weight selects the summand:
      "c"        -> sum phi_n(x) phi_n(y)          (reflected, sign (-1)^q)
      "parity"   -> sum (-1)^n phi_n(x) phi_n(-y)  (reflected, no sign)
      "identity" -> sum (-1)^n phi_n(x) phi_n(y)   (direct)
      "hamiltonian" -> identity weighted by E_n     (direct)
    """
    beta = _beta_rows(model)
    beta = beta[: order + 1]
    sc = _scalar_weight_series(model, order, with_energy=(weight == "hamiltonian"))
    reflected = weight in ("c", "parity")
    qsign = weight == "c"
    per_order = []
    for r in range(order + 1):
        bucket: dict[tuple, tuple] = {}
        for jx in range(min(r, len(beta) - 1) + 1):
            for jy in range(min(r - jx, len(beta) - 1) + 1):
                k = r - jx - jy
                if k >= len(sc) or not sc[k]:
                    continue
                for p, ax in beta[jx]:
                    for q, ay in beta[jy]:
                        poly = _poly_mul(_poly_mul(ax, ay), sc[k])
                        if qsign and q % 2:
                            poly = _poly_scale(poly, -1)
                        key = (p, q)
                        bucket[key] = _poly_add(bucket.get(key, ()), poly)
        per_order.append(
            [(poly, p, q) for (p, q), poly in bucket.items() if poly]
        )
    return per_order, reflected


def _spectral_kernel(model: str, order: int, weight: str) -> DeltaKernel:
    per_order, reflected = _bilinear_terms_per_order(model, order, weight)
    total = DeltaKernel(order)
    for r, terms in enumerate(per_order):
        part = reduce_bilinear_sum(
            BilinearHermiteSum.from_rows(terms, reflected=False), order, r
        )
        total = total + part
    if reflected:
        total = total.reflect_second_argument()
    return total


def c_from_eigenfunctions(order: int = 3, model: str = "cubic") -> DeltaKernel:
    """Assemble C(x,y) = sum_n phi_n(x) phi_n(y) and reduce to closed form."""
    max_order = perturb.CUBIC_ORDER if model == "cubic" else perturb.QUARTIC_ORDER
    if not 0 <= order <= max_order:
        raise ValueError(f"{model} C kernel is available through order {max_order}")
    return _spectral_kernel(model, order, "c")


def parity_from_eigenfunctions(order: int = 3, model: str = "cubic") -> DeltaKernel:
    """sum_n (-1)^n phi_n(x) phi_n(-y); all corrections must cancel."""
    return _spectral_kernel(model, order, "parity")


def identity_from_eigenfunctions(order: int = 3, model: str = "cubic") -> DeltaKernel:
    """sum_n (-1)^n phi_n(x) phi_n(y) = delta(x-y) plus vanishing corrections."""
    return _spectral_kernel(model, order, "identity")


def hamiltonian_from_eigenfunctions(order: int = 3) -> DeltaKernel:
    """sum_n (-1)^n E_n phi_n(x) phi_n(y) for the cubic model."""
    return _spectral_kernel("cubic", order, "hamiltonian")


def quartic_c_sum_kernel(order: int = 1) -> DeltaKernel:
    return c_from_eigenfunctions(order=order, model="quartic")


# ---------------------------------------------------------------------------
# exponentiated form
# ---------------------------------------------------------------------------

def exponentiated_c(order: int = 4) -> DeltaKernel:
    """exp(-i eps A - i eps^3 B) delta(x+y), expanded through eps^order."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    graded = {1: generator_a().scale(-RC_I), 3: generator_b().scale(-RC_I)}
    # exp(M) = sum M^j / j!, eps-graded and truncated
    total = {0: OperatorPoly.identity()}
    power = {0: OperatorPoly.identity()}
    fact = 1
    for j in range(1, order + 1):
        fact *= j
        nxt: dict[int, OperatorPoly] = {}
        for r1, op1 in power.items():
            for r2, op2 in graded.items():
                r = r1 + r2
                if r <= order:
                    prod = op1 * op2
                    nxt[r] = nxt[r] + prod if r in nxt else prod
        power = nxt
        if not power:
            break
        inv = RationalComplex(F(1, fact))
        for r, op in power.items():
            scaled = op.scale(inv)
            total[r] = total[r] + scaled if r in total else scaled
    kern = DeltaKernel(order)
    for r, op in total.items():
        for (a, k), c in op.words.items():
            kern.add_term(r, a, 0, k, PLUS, c)
    return kern


# ---------------------------------------------------------------------------
# kernel action on Hermite series
# ---------------------------------------------------------------------------

def _apply_terms(tmap: dict, f: HermiteSeries) -> HermiteSeries:
    out = HermiteSeries.zero()
    for (a, b, k, parity), c in tmap.items():
        g = f
        for _ in range(b):
            g = g.multiply_by_x()
        if parity == PLUS:
            g = g.parity_reflect()
        for _ in range(k):
            g = g.differentiate()
        for _ in range(a):
            g = g.multiply_by_x()
        out = out + g.scale(c)
    return out


def apply_kernel(K: DeltaKernel, f: HermiteSeries) -> EpsilonSeries:
    """int dy K(x,y) f(y) per eps power; f is a fixed Hermite series."""
    return EpsilonSeries(
        [_apply_terms(K.terms.get(r, {}), f) for r in range(K.order + 1)]
    )


def apply_kernel_series(K: DeltaKernel, fs: EpsilonSeries) -> EpsilonSeries:
    """Kernel action on an eps-expanded function, truncated convolution."""
    order = min(K.order, fs.order)
    out = []
    for r in range(order + 1):
        acc = HermiteSeries.zero()
        for j in range(r + 1):
            acc = acc + _apply_terms(K.terms.get(j, {}), fs.terms[r - j])
        out.append(acc)
    return EpsilonSeries(out)


# ---------------------------------------------------------------------------
# reference transcription of the closed-form cubic kernel
# ---------------------------------------------------------------------------

def transcribed_c_kernel() -> DeltaKernel:
    """The printed third-order C kernel for the cubic model, term for term."""
    k = DeltaKernel(3)
    k.add_term(0, 0, 0, 0, PLUS, RC_ONE)
    k.add_term(1, 0, 0, 3, PLUS, RC_I.conjugate() * F(4, 3))   # -i * 4/3
    k.add_term(1, 1, 1, 1, PLUS, RC_I.conjugate() * 2)         # -i * 2 x y d
    k.add_term(2, 0, 0, 6, PLUS, RationalComplex(F(-8, 9)))
    k.add_term(2, 1, 1, 4, PLUS, RationalComplex(F(-8, 3)))
    k.add_term(2, 2, 2, 2, PLUS, RationalComplex(-2))
    k.add_term(2, 0, 0, 2, PLUS, RationalComplex(12))
    k.add_term(3, 0, 0, 9, PLUS, RC_I * F(32, 81))
    k.add_term(3, 1, 1, 7, PLUS, RC_I * F(16, 9))
    k.add_term(3, 2, 2, 5, PLUS, RC_I * F(8, 3))
    k.add_term(3, 0, 0, 5, PLUS, RC_I * F(-176, 5))
    k.add_term(3, 3, 3, 3, PLUS, RC_I * F(4, 3))
    k.add_term(3, 1, 1, 3, PLUS, RC_I * (-48))
    k.add_term(3, 2, 2, 1, PLUS, RC_I * (-8))
    k.add_term(3, 0, 0, 1, PLUS, RC_I * 64)
    return k


# ---------------------------------------------------------------------------
# mollified numeric oracles
# ---------------------------------------------------------------------------

def bilinear_sum_mollified(S: BilinearHermiteSum, x: float, u: float,
                           sigma: float, nmax: int) -> complex:
    """Truncated numeric value of a bilinear sum, second argument convolved
    with a Gaussian of width sigma.  Uses the closed form of the mollified
    oscillator functions: (psi_k * g_sigma)(u) = lam^{k+1} psi_k(lam u),
    lam = (1+sigma^2)^{-1/2}.
    """
    if not S.terms:
        return 0.0j
    powmax = max(len(poly) for poly, _, _ in S.terms)
    nterms = len(S.terms)
    coeffs = np.zeros((nterms, powmax), dtype=np.complex128)
    p = np.zeros(nterms, dtype=np.int64)
    q = np.zeros(nterms, dtype=np.int64)
    for t, (poly, pt, qt) in enumerate(S.terms):
        for d, c in enumerate(poly):
            coeffs[t, d] = complex(c)
        p[t] = pt
        q[t] = qt
    lam = 1.0 / np.sqrt(1.0 + sigma * sigma)
    shiftmax = int(max(abs(p).max(), abs(q).max(), 0))
    return complex(
        wave_bilinear_mollified(coeffs, powmax, p, q, float(x),
                                float(u) * lam, lam, nmax, shiftmax)
    )


def _gaussian_deriv(m: int, u: float, sigma: float) -> float:
    """m-th derivative of the unit-mass Gaussian of width sigma at u."""
    z = u / (sigma * np.sqrt(2.0))
    herm = np.polynomial.hermite.hermval(z, [0.0] * m + [1.0])
    base = np.exp(-z * z) / (sigma * np.sqrt(2.0 * np.pi))
    return ((-1.0) ** m) * herm * base / (sigma * np.sqrt(2.0)) ** m


def kernel_mollified_value(K: DeltaKernel, x: float, y: float,
                           sigma: float) -> list[complex]:
    """Per-order value of int dt K(x,t) g_sigma(y - t)."""
    out = []
    for r in range(K.order + 1):
        acc = 0.0j
        for (a, b, k, parity), c in K.terms.get(r, {}).items():
            s = -1.0 if parity == PLUS else 1.0
            arg = y + x if parity == PLUS else y - x
            dsign = 1.0 if parity == PLUS else -1.0
            for j in range(min(k, b) + 1):
                acc += (
                    complex(c)
                    * (s ** b)
                    * _binom(k, j)
                    * _fallfact(b, j)
                    * x ** (a + b - j)
                    * (dsign ** (k - j))
                    * _gaussian_deriv(k - j, arg, sigma)
                )
        out.append(acc)
    return out
