"""Tests for beam splitters, rotations, displacements and routing."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from hybridcat.errors import ValidationError
from hybridcat.fock_core import basis_state, build_register, inner, norm, tensor
from hybridcat.optics import (
    BsParams,
    apply_beam_splitter,
    bs_fock_coefficient,
    displacement_matrix,
    pbs_route,
    polarization_rotation,
    required_displacement_cutoff,
    two_mode_kernel,
)
from hybridcat.resource_states import coherent


def _sector_unitary(kernel, dim, total):
    """Extract the photon-number sector (n_i + n_j = total) as a matrix."""
    index = [(total - j, j) for j in range(total + 1)]
    block = np.zeros((total + 1, total + 1), dtype=complex)
    for row, (a, b) in enumerate(index):
        for col, (c, d) in enumerate(index):
            block[row, col] = kernel[a * dim + b, c * dim + d]
    return block


def test_kernel_matches_exponential_generator():
    """The Fock-basis kernel must equal expm of the quadratic generator.

    For scattering S = expm(i G) acting on the mode operators, the Fock
    representation is expm(i a^dag G a). Compared entry by entry on the
    interior so truncation plays no role.
    """
    from scipy.linalg import logm

    t = 0.73
    params = BsParams.from_transmissivity(t)
    s = params.scattering_matrix()
    # generator G with expm(iG) = S (principal branch)
    g = logm(s) / 1j
    dim = 6
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    n_ops = {
        (0, 0): np.kron(a.conj().T @ a, np.eye(dim)),
        (0, 1): np.kron(a.conj().T, a),
        (1, 0): np.kron(a, a.conj().T),
        (1, 1): np.kron(np.eye(dim), a.conj().T @ a),
    }
    generator = sum(g[i, j] * n_ops[(i, j)] for i in range(2) for j in range(2))
    expected = expm(1j * generator)
    kernel = two_mode_kernel(s, dim, dim)
    # compare on the interior where truncation cannot leak
    for total in range(4):
        got = _sector_unitary(kernel, dim, total)
        want = _sector_unitary(expected, dim, total)
        assert np.max(np.abs(got - want)) < 1e-10


def test_bs_coefficient_square_sums():
    # the splitting coefficients square-sum to one for every input
    for n, m in ((0, 0), (1, 0), (2, 1), (3, 3)):
        total = sum(
            bs_fock_coefficient(n, m, p, q, 0.62) ** 2
            for p in range(n + 1)
            for q in range(m + 1)
        )
        assert abs(total - 1.0) < 1e-12


def test_bs_coefficient_matches_kernel_single_mode_input():
    # with vacuum in the second port the kernel column is the printed
    # coefficient up to the output phase convention
    t = 0.81
    dim = 7
    params = BsParams.from_transmissivity(t)
    kernel = two_mode_kernel(params.scattering_matrix(), dim, dim)
    n = 3
    col = kernel[:, n * dim + 0]
    for p in range(n + 1):
        amp = col[p * dim + (n - p)]
        coeff = bs_fock_coefficient(n, 0, p, 0, t)
        assert abs(abs(amp) - abs(coeff)) < 1e-12


def test_hom_dip():
    """Two indistinguishable photons on a 50:50 splitter never split."""
    reg = build_register((("i", 2), ("j", 2)))
    state = basis_state(reg, (1, 1))
    out = apply_beam_splitter(state, "i", "j", BsParams.from_transmissivity(0.5))
    assert abs(out.amplitude((1, 1))) < 1e-12
    assert abs(abs(out.amplitude((2, 0))) - 1 / math.sqrt(2)) < 1e-12
    assert abs(abs(out.amplitude((0, 2))) - 1 / math.sqrt(2)) < 1e-12


def test_coherent_states_stay_coherent():
    """A coherent input scatters to coherent outputs at the matrix amplitudes."""
    alpha = 0.7
    t = 0.84
    params = BsParams.from_transmissivity(t)
    s = params.scattering_matrix()
    state = tensor(coherent(alpha, 14, label="i"), coherent(0.0, 14, label="j"))
    out = apply_beam_splitter(state, "i", "j", params)
    expected = tensor(
        coherent(s[0, 0] * alpha, 14, label="i"),
        coherent(s[1, 0] * alpha, 14, label="j"),
    )
    assert abs(abs(inner(out, expected)) - 1.0) < 1e-9


def test_beam_splitter_preserves_norm():
    state = tensor(coherent(0.5, 12, label="i"), coherent(0.3, 12, label="j"))
    out = apply_beam_splitter(state, "i", "j", BsParams.from_transmissivity(0.9))
    assert abs(norm(out) - 1.0) < 1e-9


def test_polarization_rotation_diagonal_to_h():
    reg = build_register((("h", 1), ("v", 1)))
    diagonal = (basis_state(reg, (1, 0)) + basis_state(reg, (0, 1))) * (
        1 / math.sqrt(2)
    )
    out = polarization_rotation(diagonal, "h", "v", math.pi / 4)
    assert abs(abs(out.amplitude((1, 0))) - 1.0) < 1e-12
    assert abs(out.amplitude((0, 1))) < 1e-12


def test_polarization_rotation_inverts():
    reg = build_register((("h", 2), ("v", 2)))
    state = (basis_state(reg, (1, 1)) + basis_state(reg, (2, 0))) * (
        1 / math.sqrt(2)
    )
    theta = 0.3
    back = polarization_rotation(
        polarization_rotation(state, "h", "v", theta), "h", "v", -theta
    )
    assert abs(abs(inner(back, state)) - 1.0) < 1e-12


def test_displacement_matrix_unitary_interior():
    # truncation error drains from the top of the matrix; with eight
    # levels of headroom the low-lying block is unitary to high accuracy
    alpha = 0.45
    cutoff = required_displacement_cutoff(alpha) + 8
    d = displacement_matrix(alpha, cutoff).matrix
    product = d.conj().T @ d
    interior = product[:6, :6]
    assert np.max(np.abs(interior - np.eye(6))) < 1e-10


def test_displacement_of_vacuum_is_coherent():
    alpha = 0.6
    cutoff = 14
    d = displacement_matrix(alpha, cutoff).matrix
    column = d[:, 0]
    expected = coherent(alpha, cutoff, label="m").amps
    assert np.max(np.abs(column - expected)) < 1e-10


def test_displacements_compose():
    alpha = 0.5
    cutoff = required_displacement_cutoff(alpha) + 8
    d_plus = displacement_matrix(alpha, cutoff).matrix
    d_minus = displacement_matrix(-alpha, cutoff).matrix
    product = d_minus @ d_plus
    interior = product[:6, :6]
    assert np.max(np.abs(interior - np.eye(6))) < 1e-9


def test_pbs_route_bookkeeping():
    reg = build_register((("4H", 2), ("4V", 2)))
    routed = pbs_route(reg, "4")
    with pytest.raises(ValidationError):
        pbs_route(routed, "4")
    with pytest.raises(ValidationError):
        pbs_route(reg, "9")


def test_required_displacement_cutoff_monotone():
    values = [required_displacement_cutoff(a) for a in (0.1, 0.5, 1.0, 2.0)]
    assert values == sorted(values)
    assert values[0] >= 4
