"""Reference computations that share no code path with the package."""

import math

import mpmath
import numpy as np


def laguerre_explicit(k, s, x, dps=60):
    """Alternating explicit sum for L_k^s(x) evaluated in high precision."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        total = mpmath.mpf(0)
        for l in range(k + 1):
            total += (-1) ** l * mpmath.binomial(k + s, k - l) * x**l / mpmath.factorial(l)
        return float(total)


def expm_taylor(m, terms=40):
    """Matrix exponential by scaling and squaring a truncated Taylor series."""
    m = np.asarray(m, dtype=complex)
    norm = np.max(np.sum(np.abs(m), axis=1))
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0 else 0
    a = m / 2**squarings
    out = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for j in range(1, terms):
        term = term @ a / j
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def ladder(dim):
    a = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        a[n - 1, n] = math.sqrt(n)
    return a


def poisson(mean, m):
    if mean == 0:
        return 1.0 if m == 0 else 0.0
    return math.exp(-mean + m * math.log(mean) - math.lgamma(m + 1))


def displacement_element(alpha, m, k, dps=40):
    """<m|D(alpha)|k> from the Laguerre closed form in high precision."""
    with mpmath.workdps(dps):
        alpha = mpmath.mpc(alpha)
        r2 = abs(alpha) ** 2
        if m >= k:
            pref = mpmath.sqrt(mpmath.factorial(k) / mpmath.factorial(m)) * alpha ** (m - k)
            lag = mpmath.laguerre(k, m - k, r2)
        else:
            pref = mpmath.sqrt(mpmath.factorial(m) / mpmath.factorial(k)) * (-mpmath.conj(alpha)) ** (k - m)
            lag = mpmath.laguerre(m, k - m, r2)
        return complex(pref * mpmath.exp(-r2 / 2) * lag)
