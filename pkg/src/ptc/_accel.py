"""Hot numeric kernels: numba-jitted with a pure-numpy fallback.

The jitted path is used by default.  Setting the environment variable
``PTC_DISABLE_NUMBA=1`` (or running without numba installed) selects the
fallback implementations, which are plain Python/numpy versions of the
same algorithms.  ``benchmarks/bench_accel.py`` times both paths.

Kernels live here because they dominate runtime:

* ``integrate_nodes`` -- adaptive Dormand-Prince 5(4) integration of the
  linear second-order ODE  phi''(z) = w(z) phi(z)  along a polyline in the
  complex plane, recording phi at prescribed nodes (the shooting solver
  calls this hundreds of times per eigenvalue).
* ``spectral_g_sum`` -- millions-of-terms oscillator spectral sums for the
  Green's function cross-check.
* ``wave_bilinear_mollified`` -- truncated eigenfunction bilinear sums
  against a Gaussian mollifier (distributional identity oracles).
* ``e417-style bracket`` -- tensor Gauss-Legendre evaluation of the double
  integral representing the nonperturbative correction (float64 path).
"""

from __future__ import annotations

import math
import os

import numpy as np


def _numba_requested() -> bool:
    flag = os.environ.get("PTC_DISABLE_NUMBA", "").strip().lower()
    return flag not in {"1", "true", "yes", "on"}


USE_NUMBA = False
if _numba_requested():
    try:
        from numba import njit as _njit

        USE_NUMBA = True
    except ImportError:
        USE_NUMBA = False

if USE_NUMBA:
    def _accel(fn):
        return _njit(cache=True)(fn)
else:
    def _accel(fn):
        return fn


# ---------------------------------------------------------------------------
# ODE right-hand side:  phi'' = w(z) phi
#   kind 0: cubic model      w = z^2 + 2i*p*z^3 - 2E
#   kind 1: quartic model    w = z^2 - 2*p*z^4 - 2E
#   kind 2: parabolic cyl.   w = z^2/4 - p - 1/2      (E ignored)
# ---------------------------------------------------------------------------

def _omega_impl(kind, p, E, z):
    if kind == 0:
        return z * z + 2j * p * z * z * z - 2.0 * E
    elif kind == 1:
        return z * z - 2.0 * p * z * z * z * z - 2.0 * E
    else:
        return 0.25 * z * z - p - 0.5


omega = _accel(_omega_impl)


def _make_integrate(omega_fn):
    def _integrate_nodes_impl(nodes, phi0, dphi0, kind, p, E, rtol, atol):
        """March (phi, phi') from nodes[0] across every node in order.

        Returns (values, logscales, phi_end, dphi_end, logscale_end): phi at
        node j equals values[j] * exp(logscales[j]) in exact arithmetic; the
        running rescale keeps magnitudes inside float64 range.
        """
        n = nodes.shape[0]
        vals = np.zeros(n, dtype=np.complex128)
        lscales = np.zeros(n, dtype=np.float64)
        y0 = phi0
        y1 = dphi0
        lsc = 0.0
        vals[0] = y0
        safety = 0.9
        for j in range(1, n):
            za = nodes[j - 1]
            zb = nodes[j]
            dz = zb - za
            t = 0.0
            h = 0.1
            while t < 1.0:
                if h > 1.0 - t:
                    h = 1.0 - t
                # Dormand-Prince 5(4) on y' = f(t, y), z = za + t*dz
                # f = (dz*y1, dz*w(z)*y0)
                z1_ = za + t * dz
                k1a = dz * y1
                k1b = dz * omega_fn(kind, p, E, z1_) * y0
                z2_ = za + (t + 0.2 * h) * dz
                y0b = y0 + h * 0.2 * k1a
                y1b = y1 + h * 0.2 * k1b
                k2a = dz * y1b
                k2b = dz * omega_fn(kind, p, E, z2_) * y0b
                z3_ = za + (t + 0.3 * h) * dz
                y0c = y0 + h * (0.075 * k1a + 0.225 * k2a)
                y1c = y1 + h * (0.075 * k1b + 0.225 * k2b)
                k3a = dz * y1c
                k3b = dz * omega_fn(kind, p, E, z3_) * y0c
                z4_ = za + (t + 0.8 * h) * dz
                y0d = y0 + h * ((44.0 / 45.0) * k1a - (56.0 / 15.0) * k2a + (32.0 / 9.0) * k3a)
                y1d = y1 + h * ((44.0 / 45.0) * k1b - (56.0 / 15.0) * k2b + (32.0 / 9.0) * k3b)
                k4a = dz * y1d
                k4b = dz * omega_fn(kind, p, E, z4_) * y0d
                z5_ = za + (t + (8.0 / 9.0) * h) * dz
                y0e = y0 + h * ((19372.0 / 6561.0) * k1a - (25360.0 / 2187.0) * k2a
                                + (64448.0 / 6561.0) * k3a - (212.0 / 729.0) * k4a)
                y1e = y1 + h * ((19372.0 / 6561.0) * k1b - (25360.0 / 2187.0) * k2b
                                + (64448.0 / 6561.0) * k3b - (212.0 / 729.0) * k4b)
                k5a = dz * y1e
                k5b = dz * omega_fn(kind, p, E, z5_) * y0e
                z6_ = za + (t + h) * dz
                y0f = y0 + h * ((9017.0 / 3168.0) * k1a - (355.0 / 33.0) * k2a
                                + (46732.0 / 5247.0) * k3a + (49.0 / 176.0) * k4a
                                - (5103.0 / 18656.0) * k5a)
                y1f = y1 + h * ((9017.0 / 3168.0) * k1b - (355.0 / 33.0) * k2b
                                + (46732.0 / 5247.0) * k3b + (49.0 / 176.0) * k4b
                                - (5103.0 / 18656.0) * k5b)
                k6a = dz * y1f
                k6b = dz * omega_fn(kind, p, E, z6_) * y0f
                y0n = y0 + h * ((35.0 / 384.0) * k1a + (500.0 / 1113.0) * k3a
                                + (125.0 / 192.0) * k4a - (2187.0 / 6784.0) * k5a
                                + (11.0 / 84.0) * k6a)
                y1n = y1 + h * ((35.0 / 384.0) * k1b + (500.0 / 1113.0) * k3b
                                + (125.0 / 192.0) * k4b - (2187.0 / 6784.0) * k5b
                                + (11.0 / 84.0) * k6b)
                k7a = dz * y1n
                k7b = dz * omega_fn(kind, p, E, z6_) * y0n
                erra = h * ((71.0 / 57600.0) * k1a - (71.0 / 16695.0) * k3a
                            + (71.0 / 1920.0) * k4a - (17253.0 / 339200.0) * k5a
                            + (22.0 / 525.0) * k6a - (1.0 / 40.0) * k7a)
                errb = h * ((71.0 / 57600.0) * k1b - (71.0 / 16695.0) * k3b
                            + (71.0 / 1920.0) * k4b - (17253.0 / 339200.0) * k5b
                            + (22.0 / 525.0) * k6b - (1.0 / 40.0) * k7b)
                sca = atol + rtol * max(abs(y0), abs(y0n))
                scb = atol + rtol * max(abs(y1), abs(y1n))
                err = math.sqrt(0.5 * ((abs(erra) / sca) ** 2 + (abs(errb) / scb) ** 2))
                if err <= 1.0:
                    t += h
                    y0 = y0n
                    y1 = y1n
                    m = abs(y0)
                    if m > 1e120:
                        y0 /= m
                        y1 /= m
                        lsc += math.log(m)
                if err == 0.0:
                    h *= 5.0
                else:
                    fac = safety * err ** -0.2
                    if fac < 0.2:
                        fac = 0.2
                    elif fac > 5.0:
                        fac = 5.0
                    h *= fac
                if h < 1e-14:
                    h = 1e-14
            vals[j] = y0
            lscales[j] = lsc
        return vals, lscales, y0, y1, lsc

    return _integrate_nodes_impl


_integrate_nodes_py = _make_integrate(_omega_impl)
integrate_nodes = _accel(_make_integrate(omega)) if USE_NUMBA else _integrate_nodes_py


def _spectral_g_sum_impl(x, y, nmax, e2):
    """Partial sum of sum_n (-1)^n phi_n(x) phi_n(y) / E_n for the
    oscillator (E_n = n + 1/2 + e2*...; e2 = 0 gives the pure
    oscillator resolvent).  Also returns the smooth-tail coefficient
    estimated from the last terms, so callers can add the integral tail
    c * sum_{n>N} n^{-3/2}.
    """
    pref = math.pi ** -0.25
    h0x = pref * math.exp(-0.5 * x * x)
    h0y = pref * math.exp(-0.5 * y * y)
    h1x = math.sqrt(2.0) * x * h0x
    h1y = math.sqrt(2.0) * y * h0y
    total = h0x * h0y / 0.5 + (-1.0) * h1x * h1y / 1.5
    pax, pbx = h0x, h1x
    pay, pby = h0y, h1y
    tail_acc = 0.0
    tail_cnt = 0
    win = nmax // 5 + 1
    for n in range(2, nmax + 1):
        c1 = math.sqrt(2.0 / n)
        c2 = math.sqrt((n - 1.0) / n)
        hx = c1 * x * pbx - c2 * pax
        hy = c1 * y * pby - c2 * pay
        pax, pbx = pbx, hx
        pay, pby = pby, hy
        sign = 1.0 if n % 2 == 0 else -1.0
        term = sign * hx * hy / (n + 0.5)
        total += term
        if n > nmax - win:
            tail_acc += term * n ** 1.5
            tail_cnt += 1
    cfit = tail_acc / tail_cnt if tail_cnt > 0 else 0.0
    return total, cfit


spectral_g_sum = _accel(_spectral_g_sum_impl)


def _wave_bilinear_mollified_impl(coeffs, powmax, pshift, qshift, x, yhat, lam,
                                  nmax, shiftmax):
    """sum_{n<=nmax} alpha_t(n)/(2^n n!) psi_{n+p_t}(x) psi_{n+q_t}(y)*g_sigma
    with the mollified factor folded in as lam^(n+q+1) and yhat = y/sqrt(1+s^2).

    alpha_t(n) = sum_d coeffs[t, d] n^d (complex).  psi_k = e^{-x^2/2} H_k.
    Terms whose shifted index is negative are absent.  Everything is carried
    in normalized-oscillator form to stay inside float64 range.
    """
    nterms = pshift.shape[0]
    kmax = nmax + shiftmax
    # normalized oscillator functions up to kmax at x and yhat
    psx = np.zeros(kmax + 1)
    psy = np.zeros(kmax + 1)
    pref = math.pi ** -0.25
    psx[0] = pref * math.exp(-0.5 * x * x)
    psy[0] = pref * math.exp(-0.5 * yhat * yhat)
    if kmax >= 1:
        psx[1] = math.sqrt(2.0) * x * psx[0]
        psy[1] = math.sqrt(2.0) * yhat * psy[0]
    for k in range(2, kmax + 1):
        c1 = math.sqrt(2.0 / k)
        c2 = math.sqrt((k - 1.0) / k)
        psx[k] = c1 * x * psx[k - 1] - c2 * psx[k - 2]
        psy[k] = c1 * yhat * psy[k - 1] - c2 * psy[k - 2]
    # lgamma-based half-log of 2^k k!
    halflog = np.zeros(kmax + 1)
    for k in range(kmax + 1):
        halflog[k] = 0.5 * (k * math.log(2.0) + math.lgamma(k + 1.0))
    loglam = math.log(lam)
    logpi4 = 0.25 * math.log(math.pi)
    total = 0.0 + 0.0j
    for n in range(nmax + 1):
        logw = -(n * math.log(2.0) + math.lgamma(n + 1.0))
        for t in range(nterms):
            kx = n + pshift[t]
            ky = n + qshift[t]
            if kx < 0 or ky < 0:
                continue
            alpha = 0.0 + 0.0j
            npow = 1.0
            for d in range(powmax):
                alpha += coeffs[t, d] * npow
                npow *= n
            if alpha.real == 0.0 and alpha.imag == 0.0:
                continue
            # alpha/(2^n n!) * psi_kx(x) psi_ky(yh) * lam^(ky+1), with the
            # psi's rebuilt from normalized ones: psi_k = pi^(1/4) sqrt(2^k k!) * psnorm_k
            lg = logw + halflog[kx] + halflog[ky] + (ky + 1) * loglam + 2.0 * logpi4
            total += alpha * psx[kx] * psy[ky] * math.exp(lg)
    # overall 1/sqrt(pi) from the completeness normalization
    return total / math.sqrt(math.pi)


wave_bilinear_mollified = _accel(_wave_bilinear_mollified_impl)


# ---------------------------------------------------------------------------
# Double-integral bracket for the nonperturbative quartic correction.
# The integrand (before the d/dx prefactor and x<->y symmetrization) is
#   exp(Q^2/(1+s^2)) / sqrt(1+s^2),  Q = 2 sqrt(2 s / eps) cos(theta) - ix - isy
# applied derivative in x:  d/dx exp(...) = exp(...) * 2 Q (-i)/(1+s^2).
# s runs over [0,1] via s = t^2 (endpoint regularization), theta over [0, pi].
# ---------------------------------------------------------------------------

def _e417_bracket_jit_impl(x, y, eps, tnodes, tweights, thnodes, thweights):
    total = 0.0 + 0.0j
    for i in range(tnodes.shape[0]):
        t = tnodes[i]
        s = t * t
        wps = 1.0 + s * s
        a = 2.0 * math.sqrt(2.0 * s / eps)
        acc = 0.0 + 0.0j
        for j in range(thnodes.shape[0]):
            ct = math.cos(thnodes[j])
            qx = a * ct - 1j * x - 1j * s * y
            qy = a * ct - 1j * y - 1j * s * x
            ex = np.exp(qx * qx / wps) * (-2j * qx / wps)
            ey = np.exp(qy * qy / wps) * (-2j * qy / wps)
            acc += thweights[j] * (ex + ey)
        # ds = 2 t dt
        total += tweights[i] * 2.0 * t * acc / math.sqrt(wps)
    return total


def _e417_bracket_numpy(x, y, eps, tnodes, tweights, thnodes, thweights):
    t = tnodes[:, None]
    s = t * t
    wps = 1.0 + s * s
    a = 2.0 * np.sqrt(2.0 * s / eps)
    ct = np.cos(thnodes)[None, :]
    qx = a * ct - 1j * x - 1j * s * y
    qy = a * ct - 1j * y - 1j * s * x
    gx = np.exp(qx * qx / wps) * (-2j * qx / wps)
    gy = np.exp(qy * qy / wps) * (-2j * qy / wps)
    inner = (gx + gy) @ thweights
    return np.sum(tweights * 2.0 * tnodes * inner / np.sqrt(wps[:, 0]))


if USE_NUMBA:
    _e417_bracket_jit = _accel(_e417_bracket_jit_impl)

    def e417_bracket(x, y, eps, tnodes, tweights, thnodes, thweights):
        return _e417_bracket_jit(x, y, eps, tnodes, tweights, thnodes, thweights)
else:
    def e417_bracket(x, y, eps, tnodes, tweights, thnodes, thweights):
        return _e417_bracket_numpy(x, y, eps, tnodes, tweights, thnodes, thweights)
