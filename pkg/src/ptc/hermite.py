"""Exact arithmetic on Gaussian-weighted Hermite series.

The working representation for all symbolic computations is

    f(x) = e^{-x^2/2} * sum_n c_n H_n(x),

with coefficients c_n that are exact Gaussian rationals (rational real part
plus rational imaginary part).  The irrational normalization pieces
pi^{1/4} 2^{n/2} sqrt(n!) of the oscillator convention are *not* folded into
the coefficients; they are tracked separately (see :class:`WavePart`) so every
manipulation below stays inside exact rational arithmetic.

Identities used throughout:

    x H_n = (1/2) H_{n+1} + n H_{n-1}
    H_n'  = 2 n H_{n-1}
    d/dx [e^{-x^2/2} H_n] = e^{-x^2/2} (n H_{n-1} - (1/2) H_{n+1})
    (x - d/dx) [e^{-x^2/2} H_n] = e^{-x^2/2} H_{n+1}
    int e^{-x^2} H_m H_n dx = sqrt(pi) 2^n n! delta_{mn}
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import numpy as np

__all__ = [
    "RationalComplex",
    "RC_ZERO",
    "RC_ONE",
    "RC_I",
    "HermiteSeries",
    "EpsilonSeries",
    "WavePart",
    "pt_bilinear_raw",
    "pt_bilinear",
]


class RationalComplex:
    """Exact scalar a + b*i with a, b rational."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    # -- algebra ----------------------------------------------------------
    def __add__(self, other):
        other = _as_rc(other)
        return RationalComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return RationalComplex(-self.re, -self.im)

    def __sub__(self, other):
        other = _as_rc(other)
        return RationalComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_rc(other) - self

    def __mul__(self, other):
        other = _as_rc(other)
        return RationalComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rc(other)
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero RationalComplex")
        return RationalComplex(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def __rtruediv__(self, other):
        return _as_rc(other) / self

    def conjugate(self):
        return RationalComplex(self.re, -self.im)

    # -- predicates / conversions -----------------------------------------
    def is_zero(self):
        return self.re == 0 and self.im == 0

    def is_real(self):
        return self.im == 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, RationalComplex)):
            other = _as_rc(other)
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return float(self.re) + 1j * float(self.im)

    def __repr__(self):
        if self.im == 0:
            return f"RC({self.re})"
        return f"RC({self.re}, {self.im})"


def _as_rc(v) -> RationalComplex:
    if isinstance(v, RationalComplex):
        return v
    if isinstance(v, (int, Fraction)):
        return RationalComplex(v)
    raise TypeError(f"cannot coerce {type(v).__name__} to RationalComplex")


RC_ZERO = RationalComplex(0)
RC_ONE = RationalComplex(1)
RC_I = RationalComplex(0, 1)


def i_power(k: int) -> RationalComplex:
    """i**k as an exact scalar."""
    return (RC_ONE, RC_I, -RC_ONE, -RC_I)[k % 4]


class HermiteSeries:
    """Finite combination e^{-x^2/2} sum_n coeffs[n] H_n(x), canonical form.

    Canonical means: no stored coefficient is zero.  Instances are immutable
    by convention; all operations return new series.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, RationalComplex] | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        clean = {}
        for n, c in items:
            if n < 0:
                raise ValueError("Hermite index must be nonnegative")
            c = c if isinstance(c, RationalComplex) else _as_rc(c)
            if not c.is_zero():
                clean[int(n)] = clean.get(int(n), RC_ZERO) + c
        self.coeffs = {n: c for n, c in clean.items() if not c.is_zero()}

    # -- construction helpers ----------------------------------------------
    @staticmethod
    def basis(n: int, coeff=1) -> "HermiteSeries":
        return HermiteSeries({n: _as_rc(coeff)})

    @staticmethod
    def zero() -> "HermiteSeries":
        return HermiteSeries()

    # -- ring operations ----------------------------------------------------
    def __add__(self, other: "HermiteSeries") -> "HermiteSeries":
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out.get(n, RC_ZERO) + c
        return HermiteSeries(out)

    def __sub__(self, other: "HermiteSeries") -> "HermiteSeries":
        return self + other.scale(-RC_ONE)

    def scale(self, s) -> "HermiteSeries":
        s = _as_rc(s)
        if s.is_zero():
            return HermiteSeries()
        return HermiteSeries({n: c * s for n, c in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, HermiteSeries):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted((n, c.re, c.im) for n, c in self.coeffs.items())))

    def is_zero(self):
        return not self.coeffs

    def max_index(self):
        return max(self.coeffs) if self.coeffs else -1

    # -- the operator actions ------------------------------------------------
    def multiply_by_x(self) -> "HermiteSeries":
        """x * f(x); the Gaussian weight is untouched by multiplication."""
        out: dict[int, RationalComplex] = {}
        for n, c in self.coeffs.items():
            out[n + 1] = out.get(n + 1, RC_ZERO) + c * Fraction(1, 2)
            if n >= 1:
                out[n - 1] = out.get(n - 1, RC_ZERO) + c * n
        return HermiteSeries(out)

    def differentiate(self) -> "HermiteSeries":
        """d/dx of the full weighted function, re-expressed in the basis."""
        out: dict[int, RationalComplex] = {}
        for n, c in self.coeffs.items():
            out[n + 1] = out.get(n + 1, RC_ZERO) - c * Fraction(1, 2)
            if n >= 1:
                out[n - 1] = out.get(n - 1, RC_ZERO) + c * n
        return HermiteSeries(out)

    def raise_index(self) -> "HermiteSeries":
        """(x - d/dx) f, which maps H_n -> H_{n+1} termwise."""
        return HermiteSeries({n + 1: c for n, c in self.coeffs.items()})

    def parity_reflect(self) -> "HermiteSeries":
        """f(-x): the coefficient of H_n flips sign iff n is odd."""
        return HermiteSeries(
            {n: (c if n % 2 == 0 else -c) for n, c in self.coeffs.items()}
        )

    def pt_conjugate(self) -> "HermiteSeries":
        """Parity reflection followed by complex conjugation of coefficients."""
        return HermiteSeries(
            {
                n: (c.conjugate() if n % 2 == 0 else -c.conjugate())
                for n, c in self.coeffs.items()
            }
        )

    # -- numeric rendering ----------------------------------------------------
    def evaluate(self, x):
        """Float value(s) of the weighted series via the three-term recurrence.

        Accepts a scalar or ndarray, real or complex.
        """
        x = np.asarray(x)
        out = np.zeros(x.shape, dtype=np.complex128)
        if not self.coeffs:
            return out if out.ndim else complex(out)
        nmax = self.max_index()
        h_prev = np.ones_like(out)          # H_0
        h_cur = 2.0 * x.astype(np.complex128)  # H_1
        for n in range(nmax + 1):
            if n == 0:
                hn = h_prev
            elif n == 1:
                hn = h_cur
            else:
                hn = 2.0 * x * h_cur - 2.0 * (n - 1) * h_prev
                h_prev, h_cur = h_cur, hn
            c = self.coeffs.get(n)
            if c is not None:
                out = out + complex(c) * hn
        out = out * np.exp(-0.5 * x.astype(np.complex128) ** 2)
        return out if out.ndim else complex(out)

    # -- text form --------------------------------------------------------------
    def dumps(self) -> str:
        """One term per line: ``n:re_num/re_den`` or ``n:re+im i`` form."""
        lines = []
        for n in sorted(self.coeffs):
            c = self.coeffs[n]
            s = f"{n}:{c.re.numerator}/{c.re.denominator}"
            if c.im != 0:
                sign = "+" if c.im >= 0 else "-"
                im = abs(c.im)
                s += f"{sign}{im.numerator}/{im.denominator}i"
            lines.append(s)
        return "\n".join(lines)

    @staticmethod
    def loads(text: str) -> "HermiteSeries":
        coeffs = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            idx, _, rest = line.partition(":")
            rest = rest.replace(" ", "")
            im = Fraction(0)
            if rest.endswith("i"):
                body = rest[:-1]
                # split at the sign of the imaginary part (not the leading sign)
                for pos in range(len(body) - 1, 0, -1):
                    if body[pos] in "+-" and body[pos - 1] not in "+-/":
                        re = Fraction(body[:pos])
                        im = Fraction(body[pos:].lstrip("+"))
                        break
                else:
                    re = Fraction(0)
                    im = Fraction(body)
            else:
                re = Fraction(rest)
            coeffs[int(idx)] = RationalComplex(re, im)
        return HermiteSeries(coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "HermiteSeries(0)"
        inner = ", ".join(f"H{n}: {c!r}" for n, c in sorted(self.coeffs.items()))
        return f"HermiteSeries({inner})"


def _weight_2nn(n: int) -> int:
    w = 1
    for k in range(1, n + 1):
        w *= 2 * k
    return w


def plain_bilinear_raw(f: HermiteSeries, g: HermiteSeries) -> RationalComplex:
    """(1/sqrt(pi)) * int f(x) g(x) dx  (no PT conjugation), raw basis."""
    total = RC_ZERO
    for n in sorted(set(f.coeffs) & set(g.coeffs)):
        total = total + f.coeffs[n] * g.coeffs[n] * _weight_2nn(n)
    return total


def pt_bilinear_raw(f: HermiteSeries, g: HermiteSeries) -> RationalComplex:
    """(1/sqrt(pi)) * int [PT f](x) g(x) dx in the raw H_n basis.

    Orthogonality gives sum_n (PT f)_n g_n 2^n n!, an exact Gaussian rational.
    """
    return plain_bilinear_raw(f.pt_conjugate(), g)


@dataclass(frozen=True)
class WavePart:
    """A Hermite series carrying the oscillator normalization of level n.

    Represents  series(x) / (pi^{1/4} 2^{n/2} sqrt(n!)).  The i^n phase of
    the eigenfunction convention is exact and must already be folded into
    the series coefficients.
    """

    level: int
    series: HermiteSeries


def pt_bilinear(f: WavePart, g: WavePart) -> RationalComplex:
    """Exact PT inner product of two normalized wave parts.

    Rational whenever the levels match or the raw integral vanishes; the
    remaining case (nonzero cross-level overlap) has an irrational
    normalization ratio and signals a computational error upstream.
    """
    raw = pt_bilinear_raw(f.series, g.series)
    if raw.is_zero():
        return RC_ZERO
    if f.level == g.level:
        den = 1
        for k in range(1, f.level + 1):
            den *= 2 * k
        return raw / den
    raise ValueError(
        "nonzero cross-level PT product has an irrational normalization"
    )


class EpsilonSeries:
    """Truncated power series in the coupling, payloads of any linear type.

    ``terms[k]`` is the coefficient of eps^k; length is order+1.  Payloads
    must support ``+`` and multiplication by RationalComplex via ``scale``
    (HermiteSeries) or ``*`` (RationalComplex scalars).
    """

    __slots__ = ("order", "terms")

    def __init__(self, terms, order=None):
        terms = list(terms)
        if order is None:
            order = len(terms) - 1
        if len(terms) != order + 1:
            raise ValueError("terms length must equal order + 1")
        self.order = order
        self.terms = tuple(terms)

    @staticmethod
    def constant(value, order: int, zero) -> "EpsilonSeries":
        return EpsilonSeries([value] + [zero] * order)

    def __eq__(self, other):
        if not isinstance(other, EpsilonSeries):
            return NotImplemented
        return self.order == other.order and self.terms == other.terms

    def __add__(self, other: "EpsilonSeries") -> "EpsilonSeries":
        order = min(self.order, other.order)
        return EpsilonSeries(
            [self.terms[k] + other.terms[k] for k in range(order + 1)]
        )

    def map(self, fn: Callable) -> "EpsilonSeries":
        return EpsilonSeries([fn(t) for t in self.terms])

    def scale(self, s) -> "EpsilonSeries":
        s = _as_rc(s)
        return EpsilonSeries(
            [t.scale(s) if hasattr(t, "scale") else t * s for t in self.terms]
        )

    def truncate(self, order: int) -> "EpsilonSeries":
        if order >= self.order:
            return self
        return EpsilonSeries(self.terms[: order + 1])

    def convolve(self, other: "EpsilonSeries", mul: Callable, zero) -> "EpsilonSeries":
        """Cauchy product truncated to the smaller order."""
        order = min(self.order, other.order)
        out = []
        for k in range(order + 1):
            acc = zero
            for j in range(k + 1):
                acc = acc + mul(self.terms[j], other.terms[k - j])
            out.append(acc)
        return EpsilonSeries(out)

    def shift(self, powers: int, zero) -> "EpsilonSeries":
        """Multiply by eps**powers, keeping the truncation order."""
        out = [zero] * min(powers, self.order + 1) + list(
            self.terms[: self.order + 1 - powers]
        )
        return EpsilonSeries(out[: self.order + 1])

    def evaluate(self, eps: float):
        """Numeric evaluation; payloads must themselves be RC or evaluatable."""
        total = 0.0
        for k, t in enumerate(self.terms):
            total += complex(t) * eps ** k
        return total

    def __repr__(self):
        return f"EpsilonSeries(order={self.order}, terms={list(self.terms)!r})"


def sqrt_one_plus(series: EpsilonSeries) -> EpsilonSeries:
    """(1 + u)^{1/2} for a scalar EpsilonSeries u with u(0) = 0, exact."""
    if not series.terms[0].is_zero():
        raise ValueError("expansion point must be zero")
    order = series.order
    out = [RC_ONE] + [RC_ZERO] * order
    # Newton iteration on r^2 = 1 + u in truncated arithmetic
    for _ in range(order.bit_length() + 1):
        r = EpsilonSeries(out)
        r2 = r.convolve(r, lambda a, b: a * b, RC_ZERO)
        err = [series.terms[k] + (RC_ONE if k == 0 else RC_ZERO) - r2.terms[k]
               for k in range(order + 1)]
        # r <- r + err / (2 r); divide series by 2r via leading-term recursion
        corr = _series_div(err, [t * 2 for t in out])
        out = [out[k] + corr[k] for k in range(order + 1)]
    return EpsilonSeries(out)


def invert_series(series: EpsilonSeries) -> EpsilonSeries:
    """1 / series for a scalar EpsilonSeries with nonzero constant term."""
    one = [RC_ONE] + [RC_ZERO] * series.order
    return EpsilonSeries(_series_div(one, list(series.terms)))


def _series_div(num, den):
    n = len(num)
    out = [RC_ZERO] * n
    lead = den[0]
    for k in range(n):
        acc = num[k]
        for j in range(1, k + 1):
            acc = acc - den[j] * out[k - j]
        out[k] = acc / lead
    return out
