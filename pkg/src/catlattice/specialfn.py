"""Log-factorials and associated Laguerre polynomials.

Every Green-function and Wigner closed form in this package is a product of
a factorial ratio, a power of the displacement, a Gaussian and a Laguerre
polynomial.  The individual factors over/underflow long before the product
does, so amplitudes are assembled as ``(log|value|, sign)`` pairs.
"""

from __future__ import annotations

import math
import threading

import numpy as np

__all__ = [
    "DomainError",
    "log_factorial",
    "assoc_laguerre",
    "laguerre_sequence",
    "log_abs_laguerre",
    "log_amplitude_prefactor",
]

_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)


class DomainError(ValueError):
    """Argument outside the domain of a special function or closed form."""


_log_fact = np.zeros(1)
_log_fact_lock = threading.Lock()


def _extend_log_factorial(n: int) -> np.ndarray:
    global _log_fact
    with _log_fact_lock:
        table = _log_fact
        if n < table.size:
            return table
        # grow geometrically so repeated small extensions stay cheap
        size = max(n + 1, 2 * table.size)
        terms = np.log(np.arange(table.size, size, dtype=float))
        tail = table[-1] + np.cumsum(terms)
        _log_fact = np.concatenate([table, tail])
        return _log_fact


def log_factorial(n: int) -> float:
    """Return ``ln(n!)`` from a cached cumulative table."""
    if n < 0:
        raise DomainError(f"log_factorial needs n >= 0, got {n}")
    table = _log_fact
    if n >= table.size:
        table = _extend_log_factorial(n)
    return float(table[n])


def _check_ks(k: int, s: int) -> None:
    if k < 0 or s < 0:
        raise DomainError(f"Laguerre L_k^s needs k >= 0 and s >= 0, got k={k}, s={s}")


def assoc_laguerre(k: int, s: int, x: float) -> float:
    """Associated Laguerre polynomial ``L_k^s(x)`` by upward recurrence in k.

    Uses ``(j+1) L_{j+1} = (2j+1+s-x) L_j - (j+s) L_{j-1}`` starting from
    ``L_0 = 1`` and ``L_1 = 1 + s - x``.
    """
    _check_ks(k, s)
    if x < 0:
        raise DomainError(f"Laguerre argument must be >= 0, got {x}")
    prev, cur = 1.0, 1.0 + s - x
    if k == 0:
        return prev
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1 + s - x) * cur - (j + s) * prev) / (j + 1)
    return cur


def laguerre_sequence(kmax: int, s, x: float) -> np.ndarray:
    """``L_k^s(x)`` for ``k = 0..kmax`` and every entry of ``s`` at once.

    Returns an array of shape ``(kmax + 1,) + np.shape(s)``.  Same recurrence
    as :func:`assoc_laguerre`, vectorised over the superscript.
    """
    s = np.asarray(s, dtype=float)
    if kmax < 0 or np.any(s < 0):
        raise DomainError("laguerre_sequence needs kmax >= 0 and s >= 0")
    if x < 0:
        raise DomainError(f"Laguerre argument must be >= 0, got {x}")
    out = np.empty((kmax + 1,) + s.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = 1.0 + s - x
    for j in range(1, kmax):
        out[j + 1] = ((2 * j + 1 + s - x) * out[j] - (j + s) * out[j - 1]) / (j + 1)
    return out


def log_abs_laguerre(k: int, s: int, x: float) -> tuple[float, int]:
    """``(ln|L_k^s(x)|, sign)`` without overflow for large k and s.

    The recurrence is run on a rescaled pair; the common scale is tracked in
    the log.  An exact zero returns ``(-inf, 0)``.
    """
    _check_ks(k, s)
    if x < 0:
        raise DomainError(f"Laguerre argument must be >= 0, got {x}")
    log_scale = 0.0
    prev, cur = 1.0, 1.0 + s - x
    if k == 0:
        cur = prev
    for j in range(1, k):
        prev, cur = cur, ((2 * j + 1 + s - x) * cur - (j + s) * prev) / (j + 1)
        big = abs(cur)
        if big > _RESCALE:
            prev /= _RESCALE
            cur /= _RESCALE
            log_scale += _LOG_RESCALE
        elif 0.0 < big < 1.0 / _RESCALE and abs(prev) < 1.0 / _RESCALE:
            prev *= _RESCALE
            cur *= _RESCALE
            log_scale -= _LOG_RESCALE
    if cur == 0.0:
        return -math.inf, 0
    return math.log(abs(cur)) + log_scale, 1 if cur > 0 else -1


def log_amplitude_prefactor(m: int, k: int, theta: float) -> tuple[float, int]:
    """Log-magnitude and sign of ``sqrt(lo!/hi!) theta^|m-k| e^{-theta^2/2} L_lo^{|m-k|}(theta^2)``.

    ``lo = min(m, k)`` and ``hi = max(m, k)``.  This is the common modulus of
    every off-diagonal element of a real displacement (or of the lattice
    propagator); callers attach the phase.  ``theta = 0`` yields the Kronecker
    delta, i.e. ``(0.0, 1)`` on the diagonal and ``(-inf, 1)`` elsewhere.
    """
    if m < 0 or k < 0:
        raise DomainError(f"indices must be >= 0, got m={m}, k={k}")
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    lo, hi = min(m, k), max(m, k)
    d = hi - lo
    if theta == 0.0:
        return (0.0, 1) if d == 0 else (-math.inf, 1)
    log_lag, sign = log_abs_laguerre(lo, d, theta * theta)
    log_mag = (
        0.5 * (log_factorial(lo) - log_factorial(hi))
        + d * math.log(theta)
        - 0.5 * theta * theta
        + log_lag
    )
    return log_mag, sign
