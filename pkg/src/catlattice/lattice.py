"""Deformed Glauber-Fock waveguide lattice.

Site ``m`` couples to ``m+1`` with strength ``g (-1)^m sqrt(m+1)``, i.e. the
Hamiltonian ``H = g (a^dagger P + P a)`` with ``P = (-1)^n``.  Fields evolve
as ``E(z) = exp(-i z H) E(0)``, which is the deformed displacement
``D_NL(-i g z)``.  Two independent propagators are provided:

* :func:`evolve_numeric` diagonalises the finite tridiagonal ``H`` once;
* :func:`green_analytic` / :func:`green_matrix` evaluate the closed-form
  Green function of the semi-infinite lattice via Laguerre polynomials.

They agree wherever the field stays clear of the last sites.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal

from . import fock
from .cats import CatComponent, CatDecomposition, displaced_fock
from .fock import DEFAULT_GUARD, EDGE_ROWS, TruncationGuard
from .specialfn import (
    DomainError,
    laguerre_sequence,
    log_amplitude_prefactor,
    log_factorial,
)

__all__ = [
    "LatticeSpec",
    "EvolutionRecord",
    "LeakageWarning",
    "Variant",
    "hamiltonian",
    "couplings",
    "evolve_numeric",
    "evolve_analytic",
    "integrate_coupled_modes",
    "green_analytic",
    "green_column",
    "green_matrix",
    "appendix_matrix_element",
    "appendix_propagator",
    "propagate_cat",
    "estimate_safe_sites",
]

_SQRT_HALF = 1.0 / math.sqrt(2.0)


class LeakageWarning(UserWarning):
    """Population reached the last sites of a finite lattice."""


@dataclass(frozen=True)
class LatticeSpec:
    g: float = 1.0
    sites: int = 60
    leakage_tol: float = 1e-8

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"coupling g must be positive, got {self.g}")
        if int(self.sites) != self.sites or self.sites < 2:
            raise ValueError(f"a lattice needs at least 2 sites, got {self.sites}")
        if not self.leakage_tol > 0:
            raise ValueError("leakage_tol must be positive")


@dataclass
class EvolutionRecord:
    """Field amplitudes ``fields[j, m] = E_m(z_grid[j])``."""

    z_grid: np.ndarray
    fields: np.ndarray
    input_label: str = ""
    leakage: np.ndarray = field(default_factory=lambda: np.zeros(0))
    leakage_tol: float = 1e-8
    warning: str | None = None
    safe_sites: int | None = None

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.fields) ** 2

    @property
    def norms(self) -> np.ndarray:
        return np.sqrt(np.sum(self.intensity, axis=1))

    @property
    def ok(self) -> bool:
        return self.warning is None

    @property
    def max_leakage(self) -> float:
        return float(np.max(self.leakage, initial=0.0))


def couplings(spec: LatticeSpec) -> np.ndarray:
    """Off-diagonal ``H[m, m+1] = g (-1)^m sqrt(m+1)``, m = 0..sites-2."""
    m = np.arange(spec.sites - 1)
    return spec.g * (-1.0) ** m * np.sqrt(m + 1.0)


def hamiltonian(spec: LatticeSpec) -> np.ndarray:
    off = couplings(spec)
    return np.diag(off, 1) + np.diag(off, -1)


def estimate_safe_sites(
    psi: np.ndarray, reach: float, guard: TruncationGuard = DEFAULT_GUARD
) -> int:
    """Rough lattice size that keeps ``psi`` clear of the edge after a displacement of ``reach``."""
    return guard.required_dim(abs(reach) + math.sqrt(fock.mean_occupation(psi)), 0)


def _as_grid(z_grid) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z_grid, dtype=float))
    if z.ndim != 1:
        raise ValueError("z_grid must be one-dimensional")
    if np.any(z < 0) or np.any(np.diff(z) < 0):
        raise ValueError("z_grid must be nonnegative and ascending")
    return z


def _edge_leakage(fields: np.ndarray) -> np.ndarray:
    edge = min(EDGE_ROWS, fields.shape[1])
    return np.sum(np.abs(fields[:, -edge:]) ** 2, axis=1)


def _finish_record(spec, z, fields, psi, label) -> EvolutionRecord:
    leak = _edge_leakage(fields)
    rec = EvolutionRecord(z, fields, label, leak, spec.leakage_tol)
    if rec.max_leakage > spec.leakage_tol:
        j = int(np.argmax(leak))
        rec.safe_sites = estimate_safe_sites(psi, spec.g * z[-1])
        rec.warning = (
            f"leakage {leak[j]:.3e} at z={z[j]:.6g} exceeds {spec.leakage_tol:.1e} "
            f"on {spec.sites} sites; roughly {rec.safe_sites} sites needed"
        )
        warnings.warn(rec.warning, LeakageWarning, stacklevel=3)
    return rec


def evolve_numeric(
    spec: LatticeSpec, psi: np.ndarray, z_grid, label: str = ""
) -> EvolutionRecord:
    """Propagate ``psi`` through the finite lattice by eigendecomposition of ``H``."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (spec.sites,):
        raise fock.InvalidDimensionError(
            f"input has {psi.size} amplitudes, lattice has {spec.sites} sites"
        )
    z = _as_grid(z_grid)
    w, v = eigh_tridiagonal(np.zeros(spec.sites), couplings(spec))
    coeff = v.T @ psi
    fields = (np.exp(-1j * np.outer(z, w)) * coeff) @ v.T
    # z = 0 should hand back the launch field untouched, not V V^T psi
    fields[z == 0] = psi
    return _finish_record(spec, z, fields, psi, label)


def integrate_coupled_modes(
    spec: LatticeSpec, psi: np.ndarray, z_grid, rtol: float = 1e-12, atol: float = 1e-14
) -> np.ndarray:
    """Step the coupled-mode equations ``i dE/dz = H E`` with an adaptive Runge-Kutta scheme.

    Slow; only meant as an integrator-based cross-check of :func:`evolve_numeric`.
    """
    z = _as_grid(z_grid)
    off = couplings(spec)

    def rhs(_z, e):
        he = np.zeros_like(e)
        he[:-1] += off * e[1:]
        he[1:] += off * e[:-1]
        return -1j * he

    sol = solve_ivp(
        rhs, (0.0, float(z[-1]) if z[-1] > 0 else 0.0), np.asarray(psi, dtype=complex),
        method="DOP853", t_eval=z, rtol=rtol, atol=atol,
    )
    return sol.y.T


def _branch_phase(d: int, a: int) -> complex:
    # (exp(i a pi/4) theta^d + exp(-i a pi/4) (-theta)^d) / (sqrt2 theta^d)
    return (cmath.exp(1j * a * math.pi / 4) + cmath.exp(-1j * a * math.pi / 4) * (-1) ** d) * _SQRT_HALF


def _green_left(m: int, k: int, theta: float) -> complex:
    """Closed form for sites at or left of the launch site (m <= k)."""
    if m > k:
        raise DomainError(f"left branch needs m <= k, got m={m}, k={k}")
    log_mag, sign = log_amplitude_prefactor(m, k, theta)
    a = 1 if k % 2 == 0 else -1
    return sign * math.exp(log_mag) * _branch_phase(k - m, a)


def _green_right(m: int, k: int, theta: float) -> complex:
    """Closed form for sites at or right of the launch site (m >= k)."""
    if m < k:
        raise DomainError(f"right branch needs m >= k, got m={m}, k={k}")
    log_mag, sign = log_amplitude_prefactor(m, k, theta)
    a = -1 if k % 2 == 0 else 1
    return sign * math.exp(log_mag) * _branch_phase(m - k, a)


def green_analytic(m: int, k: int, theta: float) -> complex:
    """``E_m = <m| exp(-i z H) |k>`` of the semi-infinite lattice, ``theta = g z``."""
    if m < 0 or k < 0:
        raise DomainError(f"site indices must be >= 0, got m={m}, k={k}")
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    if theta == 0:
        return 1.0 + 0j if m == k else 0j
    return _green_left(m, k, theta) if m <= k else _green_right(m, k, theta)


def _column_leakage_check(col: np.ndarray, tol: float, what: str) -> None:
    missing = max(0.0, 1.0 - float(np.vdot(col, col).real))
    leak = missing + float(np.sum(np.abs(col[-EDGE_ROWS:]) ** 2))
    if leak > tol:
        warnings.warn(f"{what}: {leak:.3e} of the field lies at or beyond the lattice edge",
                      LeakageWarning, stacklevel=3)


def green_column(k: int, spec: LatticeSpec, z: float) -> np.ndarray:
    """Analytic field across all sites after launching into site ``k``."""
    if not 0 <= k < spec.sites:
        raise fock.InvalidDimensionError(f"launch site {k} outside 0..{spec.sites - 1}")
    theta = spec.g * z
    col = np.array([green_analytic(m, k, theta) for m in range(spec.sites)])
    _column_leakage_check(col, spec.leakage_tol, f"green column k={k}, z={z:.6g}")
    return col


def green_matrix(sites: int, theta: float) -> np.ndarray:
    """All ``<m|U|k>`` for ``m, k < sites`` at once (vectorised Laguerre recurrence).

    Entry magnitudes use plain floats for the Laguerre factor, which stays
    finite up to roughly 1000 sites.
    """
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    if theta == 0:
        return np.eye(sites, dtype=complex)
    if sites > 1000:
        return np.array([[green_analytic(m, k, theta) for k in range(sites)] for m in range(sites)])
    idx = np.arange(sites)
    d = np.abs(idx[:, None] - idx[None, :])
    lo = np.minimum(idx[:, None], idx[None, :])
    hi = lo + d
    lag = laguerre_sequence(sites - 1, np.arange(sites), theta * theta)[lo, d]
    logfact = np.array([log_factorial(j) for j in range(sites)])
    with np.errstate(divide="ignore"):
        log_mag = 0.5 * (logfact[lo] - logfact[hi]) + d * math.log(theta) - 0.5 * theta**2
    mag = np.exp(log_mag) * lag

    k_even = (idx[None, :] % 2 == 0)
    right = idx[:, None] >= idx[None, :]
    a = np.where(right, np.where(k_even, -1, 1), np.where(k_even, 1, -1))
    phase = (np.exp(1j * a * np.pi / 4) + np.exp(-1j * a * np.pi / 4) * (-1.0) ** d) * _SQRT_HALF
    return mag * phase


def evolve_analytic(
    spec: LatticeSpec, psi: np.ndarray, z_grid, label: str = ""
) -> EvolutionRecord:
    """Superpose analytic Green columns; the semi-infinite-lattice counterpart of :func:`evolve_numeric`."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (spec.sites,):
        raise fock.InvalidDimensionError(
            f"input has {psi.size} amplitudes, lattice has {spec.sites} sites"
        )
    z = _as_grid(z_grid)
    fields = np.array([green_matrix(spec.sites, spec.g * zj) @ psi for zj in z])
    return _finish_record(spec, z, fields, psi, label)


class Variant(enum.Enum):
    """Closed-form matrix elements of the disentangled propagator.

    ``PLUS`` is ``exp(theta a^dagger) exp(-theta a)``, ``MINUS`` is
    ``exp(-theta a^dagger) exp(theta a)``; ``PARITY`` appends ``(-1)^n`` on
    the right.  ``LOWER`` holds for ``m >= k``, ``UPPER`` for ``m <= k``.
    """

    PLUS_PARITY_LOWER = ("plus", True, "lower")
    PLUS_PARITY_UPPER = ("plus", True, "upper")
    MINUS_PARITY_LOWER = ("minus", True, "lower")
    MINUS_PARITY_UPPER = ("minus", True, "upper")
    MINUS_LOWER = ("minus", False, "lower")
    MINUS_UPPER = ("minus", False, "upper")
    PLUS_LOWER = ("plus", False, "lower")
    PLUS_UPPER = ("plus", False, "upper")

    @property
    def order(self) -> str:
        return self.value[0]

    @property
    def with_parity(self) -> bool:
        return self.value[1]

    @property
    def region(self) -> str:
        return self.value[2]

    @classmethod
    def pick(cls, order: str, with_parity: bool, m: int, k: int) -> "Variant":
        region = "lower" if m >= k else "upper"
        for v in cls:
            if v.value == (order, with_parity, region):
                return v
        raise DomainError(f"no variant for {order!r}, parity={with_parity}")


def appendix_matrix_element(variant: Variant, m: int, k: int, theta: float) -> float:
    """Closed-form ``<m| exp(+-theta a^dagger) exp(-+theta a) [(-1)^n] |k>``.

    With ``d = |m - k|`` and ``lo = min(m, k)`` every variant is
    ``(+-theta)^d sqrt(lo!/hi!) L_lo^d(theta^2)`` times ``(-1)^k`` when the
    parity is present; the sign of ``theta`` depends on exponent order and
    region.
    """
    if m < 0 or k < 0:
        raise DomainError(f"indices must be >= 0, got m={m}, k={k}")
    if variant.region == "lower" and m < k:
        raise DomainError(f"{variant.name} needs m >= k, got m={m}, k={k}")
    if variant.region == "upper" and m > k:
        raise DomainError(f"{variant.name} needs m <= k, got m={m}, k={k}")
    d = abs(m - k)
    if theta == 0:
        base = 1.0 if d == 0 else 0.0
    else:
        log_mag, sign = log_amplitude_prefactor(m, k, theta)
        # undo the Gaussian: the disentangled factors carry it outside
        base = sign * math.exp(log_mag + 0.5 * theta * theta)
    # exp(theta a^dag) raises with +theta, exp(-theta a) lowers with -theta
    negative = (variant.order == "plus") == (variant.region == "upper")
    value = base * ((-1) ** d if negative else 1)
    if variant.with_parity:
        value *= (-1) ** k
    return value


def appendix_propagator(dim: int, theta: float) -> np.ndarray:
    """``U`` assembled from the disentangled form and the eight closed forms.

    ``U = e^{-theta^2/2} [N+ (1 - iP)/2 + N- (1 + iP)/2]`` with
    ``N+- = exp(+-theta a^dagger) exp(-+theta a)``.  Entries equal the
    semi-infinite lattice propagator exactly.
    """
    u = np.empty((dim, dim), dtype=complex)
    gauss = math.exp(-0.5 * theta * theta)
    for m in range(dim):
        for k in range(dim):
            plus = appendix_matrix_element(Variant.pick("plus", False, m, k), m, k, theta)
            plus_p = appendix_matrix_element(Variant.pick("plus", True, m, k), m, k, theta)
            minus = appendix_matrix_element(Variant.pick("minus", False, m, k), m, k, theta)
            minus_p = appendix_matrix_element(Variant.pick("minus", True, m, k), m, k, theta)
            u[m, k] = gauss * ((plus - 1j * plus_p) + (minus + 1j * minus_p)) / 2
    return u


def propagate_cat(
    spec: LatticeSpec,
    beta: complex,
    k: int,
    z: float,
    guard: TruncationGuard | None = DEFAULT_GUARD,
) -> tuple[np.ndarray, CatDecomposition]:
    """Launch ``|beta, k>`` and split the output into four displaced Fock states.

    The lattice acts as ``D_NL(-i g z)``, so the components sit at
    ``+-g z +- beta`` with phases ``exp(+-i g z Im(beta))``.  With
    ``guard=None`` the finite lattice is propagated even when the field
    reaches its edge; the decomposition then describes the truncated
    lattice, not the semi-infinite one.
    """
    beta = complex(beta)
    theta = spec.g * z
    phase = cmath.exp(1j * theta * beta.imag)
    s = (-1) ** k
    decomp = CatDecomposition(
        (
            CatComponent(phase / 2, -theta + beta, k),
            CatComponent(-1j * s * phase / 2, theta - beta, k),
            CatComponent(phase.conjugate() / 2, theta + beta, k),
            CatComponent(1j * s * phase.conjugate() / 2, -theta - beta, k),
        )
    )
    if guard is not None:
        reach = max(abs(beta), decomp.max_reach())
        fock.check_guard(reach, k, spec.sites, guard, what="propagated cat")
        psi0 = displaced_fock(beta, k, spec.sites, guard)
    else:
        psi0 = displaced_fock(beta, k, spec.sites, check=False)
    rec = evolve_numeric(spec, psi0, [z], label=f"dfock {beta}, {k}")
    return rec.fields[0], decomp
