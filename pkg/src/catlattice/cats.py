"""Coherent states, displaced Fock states and parity-deformed cat states.

The deformed displacement ``D_NL(alpha) = exp(alpha A^dagger - alpha^* A)``
with ``A = (-1)^n a`` splits into ordinary Glauber displacements:

    D_NL(alpha) = (D(i alpha) + D(-i alpha)) / 2
                  - (i/2) (D(i alpha) - D(-i alpha)) (-1)^n

so acting on ``|k>`` or on ``|beta, k>`` it produces superpositions of two or
four displaced Fock states.  :class:`CatDecomposition` carries those
components so the state can be rebuilt from ordinary displacements.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import fock
from .fock import DEFAULT_GUARD, TruncationGuard
from .specialfn import log_factorial

__all__ = [
    "CatComponent",
    "CatDecomposition",
    "coherent_state",
    "glauber_displacement",
    "displaced_fock",
    "deformed_displacement",
    "deformed_displacement_direct",
    "deformed_displacement_normal_ordered",
    "cat_from_fock",
    "cat_from_displaced",
]


@dataclass(frozen=True)
class CatComponent:
    weight: complex
    displacement: complex
    fock_index: int


@dataclass(frozen=True)
class CatDecomposition:
    components: tuple[CatComponent, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def reconstruct(self, dim: int) -> np.ndarray:
        """Sum of ``weight * D(displacement)|k>`` over the components."""
        out = np.zeros(dim, dtype=complex)
        for c in self.components:
            out += c.weight * displaced_fock(c.displacement, c.fock_index, dim, check=False)
        return out

    def merged(self, tol: float = 1e-12) -> "CatDecomposition":
        """Combine components sharing a displacement and drop vanishing weights."""
        acc: list[list] = []
        for c in self.components:
            for entry in acc:
                if abs(entry[1] - c.displacement) <= tol and entry[2] == c.fock_index:
                    entry[0] += c.weight
                    break
            else:
                acc.append([c.weight, c.displacement, c.fock_index])
        return CatDecomposition(
            tuple(CatComponent(w, d, k) for w, d, k in acc if abs(w) > tol)
        )

    def max_reach(self) -> float:
        return max((abs(c.displacement) for c in self.components), default=0.0)


def coherent_state(
    beta: complex, dim: int, guard: TruncationGuard = DEFAULT_GUARD, check: bool = True
) -> np.ndarray:
    """``c_n = exp(-|beta|^2/2) beta^n / sqrt(n!)``, assembled in log space."""
    fock._check_dim(dim)
    if check:
        fock.check_guard(beta, 0, dim, guard, what="coherent state")
    beta = complex(beta)
    if beta == 0:
        return fock.basis(0, dim)
    r, phi = abs(beta), cmath.phase(beta)
    n = np.arange(dim)
    logfact = np.array([log_factorial(j) for j in n])
    log_mag = -0.5 * r * r + n * math.log(r) - 0.5 * logfact
    return np.exp(log_mag) * np.exp(1j * phi * n)


def glauber_displacement(alpha: complex, dim: int) -> np.ndarray:
    """``exp(alpha a^dagger - alpha^* a)`` of the truncated ladder operators.

    Exactly unitary at any ``dim``; matches the infinite-dimensional operator
    on the block given by :func:`catlattice.fock.interior_size`.
    """
    a = fock.annihilation(dim)
    alpha = complex(alpha)
    if alpha == 0:
        return np.eye(dim, dtype=complex)
    return expm(alpha * a.conj().T - alpha.conjugate() * a)


def displaced_fock(
    alpha: complex,
    k: int,
    dim: int,
    guard: TruncationGuard = DEFAULT_GUARD,
    check: bool = True,
) -> np.ndarray:
    """``|alpha, k> = D(alpha)|k>``, column k of :func:`glauber_displacement`."""
    fock._check_dim(dim)
    if not 0 <= k < dim:
        raise fock.InvalidDimensionError(f"Fock index {k} outside 0..{dim - 1}")
    if check:
        fock.check_guard(alpha, k, dim, guard, what="displaced Fock state")
    if alpha == 0:
        return fock.basis(k, dim)
    return glauber_displacement(alpha, dim)[:, k].copy()


def deformed_displacement(alpha: complex, dim: int) -> np.ndarray:
    """``D_NL(alpha)`` from the two Glauber displacements ``D(+-i alpha)`` and parity."""
    d = glauber_displacement(1j * complex(alpha), dim)
    d_dag = d.conj().T
    p = fock.parity(dim)
    return (d - d_dag) @ p / 2j + (d + d_dag) / 2


def deformed_displacement_direct(alpha: complex, dim: int) -> np.ndarray:
    """``D_NL(alpha)`` as the plain matrix exponential of its generator."""
    A, A_dag = fock.deformed_ladder(dim)
    alpha = complex(alpha)
    return expm(alpha * A_dag - alpha.conjugate() * A)


def deformed_displacement_normal_ordered(alpha: complex, dim: int) -> np.ndarray:
    """``exp(-|alpha|^2/2) exp(alpha A^dagger) exp(-alpha^* A)``.

    Only valid away from the truncation edge and not unitary as a truncated
    matrix; kept as an independent check of the parity decomposition.
    """
    A, A_dag = fock.deformed_ladder(dim)
    alpha = complex(alpha)
    return math.exp(-abs(alpha) ** 2 / 2) * (expm(alpha * A_dag) @ expm(-alpha.conjugate() * A))


def cat_from_fock(
    alpha: complex, k: int, dim: int, guard: TruncationGuard | None = DEFAULT_GUARD
) -> tuple[np.ndarray, CatDecomposition]:
    """``D_NL(alpha)|k>`` and its two displaced-Fock components ``|+-i alpha, k>``.

    ``guard=None`` skips the truncation check.
    """
    alpha = complex(alpha)
    if guard is not None:
        fock.check_guard(alpha, k, dim, guard, what="cat state")
    state = deformed_displacement(alpha, dim) @ fock.basis(k, dim)
    s = (-1) ** k
    quarter = cmath.exp(-1j * s * math.pi / 4) / math.sqrt(2)
    decomp = CatDecomposition(
        (
            CatComponent(quarter, 1j * alpha, k),
            CatComponent(quarter.conjugate(), -1j * alpha, k),
        )
    )
    return state, decomp


def _four_components(alpha: complex, beta: complex, k: int) -> CatDecomposition:
    # D_NL(alpha)|beta,k>: D(i alpha) D(beta) = exp(i Re(alpha beta^*)) D(i alpha + beta), etc.
    phase = cmath.exp(1j * (alpha * beta.conjugate()).real)
    s = (-1) ** k
    return CatDecomposition(
        (
            CatComponent(phase.conjugate() / 2, -1j * alpha + beta, k),
            CatComponent(-1j * s * phase.conjugate() / 2, 1j * alpha - beta, k),
            CatComponent(phase / 2, 1j * alpha + beta, k),
            CatComponent(1j * s * phase / 2, -1j * alpha - beta, k),
        )
    )


def cat_from_displaced(
    alpha: complex,
    beta: complex,
    k: int,
    dim: int,
    guard: TruncationGuard | None = DEFAULT_GUARD,
) -> tuple[np.ndarray, CatDecomposition]:
    """``D_NL(alpha)|beta, k>`` and its four displaced-Fock components."""
    alpha, beta = complex(alpha), complex(beta)
    decomp = _four_components(alpha, beta, k)
    if guard is not None:
        reach = max(abs(beta), decomp.max_reach())
        fock.check_guard(reach, k, dim, guard, what="four-component cat")
    state = deformed_displacement(alpha, dim) @ displaced_fock(beta, k, dim, check=False)
    return state, decomp
