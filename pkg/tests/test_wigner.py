import math

import numpy as np
import pytest

from catlattice import cats, fock, wigner
from catlattice.fock import TruncationError
from catlattice.lattice import LatticeSpec


def test_vacuum_origin():
    assert wigner.wigner_point(fock.basis(0, 30), 0) == pytest.approx(1, abs=1e-14)


@pytest.mark.parametrize("k", range(6))
def test_fock_origin_is_parity(k):
    assert wigner.wigner_point(fock.basis(k, 30), 0) == pytest.approx((-1) ** k, abs=1e-14)


def test_first_excited_at_half_radius():
    # W_1 = -e^{-2r^2}(1 - 4r^2); r^2 = 1/2 gives e^{-1}
    alpha = math.sqrt(0.5) * np.exp(0.3j)
    assert wigner.wigner_point(fock.basis(1, 40), alpha) == pytest.approx(math.exp(-1), abs=1e-12)


def test_closed_forms_by_hand():
    assert wigner.wigner_fock_closed(0, 1.0) == pytest.approx(math.exp(-2))
    assert wigner.wigner_fock_closed(1, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert wigner.wigner_coherent_closed(1 + 1j, 1 + 1j) == 1
    assert wigner.wigner_coherent_closed(0, 1) == pytest.approx(math.exp(-2))


def test_standard_normalisation_integrates_to_one():
    psi = fock.basis(2, fock.required_dim(3 * math.sqrt(2), 2))
    grid = wigner.wigner_grid(psi, (-3, 3), (-3, 3), 41)
    assert not np.isnan(grid.values).any()
    h = grid.x_axis[1] - grid.x_axis[0]
    assert wigner.STANDARD_NORMALIZATION * np.sum(grid.values) * h * h == pytest.approx(1, abs=1e-5)


def test_point_respects_guard():
    with pytest.raises(TruncationError):
        wigner.wigner_point(fock.basis(3, 20), 3.0)


def test_grid_marks_unreachable_points():
    grid = wigner.wigner_grid(fock.basis(0, 25), (-4, 4), (-4, 4), 9)
    assert np.isnan(grid.at(4 + 4j))
    assert grid.at(0) == pytest.approx(1)


def test_fock3_grid_has_rings():
    psi = fock.basis(3, fock.required_dim(2.0, 3))
    row = np.array([wigner.wigner_point(psi, x) for x in np.linspace(0, 2, 201)])
    # L_3 has three positive roots, so the radial cut changes sign three times
    assert np.count_nonzero(np.diff(np.sign(row)) != 0) == 3
    assert row[0] == pytest.approx(-1)


def test_coherent_grid_peaks_at_amplitude():
    beta = 0.8 - 0.6j
    psi = cats.coherent_state(beta, 60)
    grid = wigner.wigner_grid(psi, (-2, 2), (-2, 2), 41)
    i, j = np.unravel_index(np.nanargmax(grid.values), grid.values.shape)
    assert complex(grid.x_axis[j], grid.y_axis[i]) == pytest.approx(beta, abs=1e-12)
    assert grid.at(beta) == pytest.approx(1, abs=1e-12)


def test_cat_wigner_is_real_with_negative_fringes():
    state, _ = cats.cat_from_fock(1.5, 0, 80)
    grid = wigner.wigner_grid(state, (-1.5, 1.5), (-2.5, 2.5), 31)
    assert np.nanmin(grid.values) < -0.1
    assert np.nanmax(grid.values) <= 1 + 1e-10


@pytest.mark.parametrize("k", range(6))
def test_diagonal_trace_is_fock_wigner(k):
    spec = LatticeSpec(sites=60)
    z = np.linspace(0, 5, 51)
    trace = wigner.diagonal_trace(spec, k, z)
    ref = np.array([(-1) ** k * wigner.wigner_fock_closed(k, t / 2) for t in z])
    assert np.max(np.abs(trace - ref)) <= 1e-10


def test_first_trace_vanishes_at_unit_length():
    z = np.linspace(0, 4, 401)
    trace = wigner.diagonal_trace(LatticeSpec(), 1, z)
    i = int(np.flatnonzero(trace[:-1] * trace[1:] <= 0)[0])
    assert z[i] <= 1.0 <= z[i + 1]


def test_diagonal_trace_rejects_bad_site():
    with pytest.raises(fock.InvalidDimensionError):
        wigner.diagonal_trace(LatticeSpec(sites=5), 5, [1.0])
