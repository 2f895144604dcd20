import numpy as np
import pytest

from floqsim.drives import DriveSpec, XYZParams, driven_xyz, single_qubit_example
from floqsim.hamiltonian import RegisterLayout, build_extended, shifted_squared
from floqsim.pauli import PauliSum, to_dense

from oracles import dense_from_sum, random_pauli_sum


def shirley_dense(modes_dense, omega, n_a, phys_dim, subtract_asym=True):
    """Direct block assembly of the extended Hamiltonian (test oracle).

    modes_dense: dict r -> dense physical matrix. Zones -N_c .. N_c + 1;
    zone couplings via every valid |n+r><n| pair, minus the top-zone
    corrections when subtract_asym is set.
    """
    n_c = 2 ** (n_a - 1) - 1
    zones = list(range(-n_c, n_c + 2))
    nz = len(zones)
    dim = nz * phys_dim
    out = np.zeros((dim, dim), dtype=complex)

    def block(i, j):
        return slice(i * phys_dim, (i + 1) * phys_dim), slice(
            j * phys_dim, (j + 1) * phys_dim
        )

    for i, n in enumerate(zones):
        rows, cols = block(i, i)
        out[rows, cols] = modes_dense[0] + n * omega * np.eye(phys_dim)
    for r, mat in modes_dense.items():
        if r == 0:
            continue
        for j, n in enumerate(zones):
            if not (-n_c <= n + r <= n_c + 1):
                continue
            # the asymmetric correction removes the coupling touching the
            # top zone: the target for r > 0, the source for r < 0
            if subtract_asym and (n + r == n_c + 1 if r > 0 else n == n_c + 1):
                continue
            rows, cols = block(zones.index(n + r), j)
            out[rows, cols] += mat
    return out


def test_layout_indexing():
    layout = RegisterLayout(n_a=2, L=3)
    assert layout.total == 5
    assert layout.dim == 32
    assert layout.basis_index(1, 5) == 13
    with pytest.raises(ValueError):
        RegisterLayout(n_a=0, L=2)


def test_static_single_mode_build():
    drive = DriveSpec(modes={0: PauliSum.from_string("Z")}, omega=2.0, L=1)
    h = build_extended(drive, n_a=1)
    np.testing.assert_allclose(to_dense(h.op), np.diag([1.0, -1.0, 3.0, 1.0]), atol=1e-12)


def test_single_qubit_example_matches_shirley_assembly():
    d1, d2, d3 = 0.7, 0.4, 0.3
    omega = 2.5
    drive = single_qubit_example(d1, d2, d3, omega)
    h = build_extended(drive, n_a=2)

    modes_dense = {r: dense_from_sum(drive.mode(r)) for r in (-2, -1, 0, 1, 2)}
    expected = shirley_dense(modes_dense, omega, n_a=2, phys_dim=2)
    np.testing.assert_allclose(to_dense(h.op), expected, atol=1e-12)


def test_single_qubit_example_matches_five_zone_display_sub_block():
    # the central three zones of the five-zone matrix coincide with the
    # symmetric large block of the four-zone qubit encoding
    d1, d2, d3 = 0.7, 0.4, 0.3
    omega = 2.5
    drive = single_qubit_example(d1, d2, d3, omega)
    h = build_extended(drive, n_a=2)
    dense = to_dense(h.op)

    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Y = np.array([[0, -1j], [1j, 0]])
    Z = np.array([[1, 0], [0, -1]], dtype=complex)
    zeros = np.zeros((2, 2))
    five_zone = np.block(
        [
            [d1 * X - 2 * omega * np.eye(2), d2 * Y, 1j * d3 * Z, zeros, zeros],
            [d2 * Y, d1 * X - omega * np.eye(2), d2 * Y, 1j * d3 * Z, zeros],
            [-1j * d3 * Z, d2 * Y, d1 * X, d2 * Y, 1j * d3 * Z],
            [zeros, -1j * d3 * Z, d2 * Y, d1 * X + omega * np.eye(2), d2 * Y],
            [zeros, zeros, -1j * d3 * Z, d2 * Y, d1 * X + 2 * omega * np.eye(2)],
        ]
    )
    np.testing.assert_allclose(dense[:6, :6], five_zone[2:8, 2:8], atol=1e-12)


def test_xyz_build_hermitian_and_top_zone_decoupled():
    drive = driven_xyz(
        XYZParams(L=2, j_bar=(1.0, 0.8, 0.6), delta_j=(0.2, 0.1, 0.3), b_bar=0.4,
                  delta_b=0.5),
        omega=3.0,
    )
    h = build_extended(drive, n_a=2)
    assert h.op.is_hermitian
    dense = to_dense(h.op)
    np.testing.assert_allclose(dense, dense.conj().T, atol=1e-12)
    top = slice(3 * 4, 4 * 4)  # aux index 3 = zone |2>
    rest = slice(0, 3 * 4)
    np.testing.assert_allclose(dense[top, rest], 0.0, atol=1e-12)
    np.testing.assert_allclose(dense[rest, top], 0.0, atol=1e-12)


def test_build_random_drives_hermitian():
    rng = np.random.default_rng(31)
    for _ in range(10):
        h0 = random_pauli_sum(rng, 2, 3, hermitian=True)
        h1 = random_pauli_sum(rng, 2, 2)
        modes = {0: h0 + h0.adjoint(), 1: h1, -1: h1.adjoint()}
        drive = DriveSpec(modes=modes, omega=float(rng.uniform(1, 5)), L=2)
        h = build_extended(drive, n_a=2)
        assert h.op.is_hermitian
        dense = to_dense(h.op)
        np.testing.assert_allclose(dense, dense.conj().T, atol=1e-12)


def test_build_rejects_wide_modes():
    drive = single_qubit_example(0.5, 0.3, 0.2, omega=2.0)  # modes up to |r| = 2
    with pytest.raises(ValueError):
        build_extended(drive, n_a=1)


def test_build_warns_when_top_mode_touches_truncation_edge():
    drive = single_qubit_example(0.5, 0.3, 0.2, omega=2.0)
    with pytest.warns(UserWarning):
        build_extended(drive, n_a=2)  # |r| = 2 reaches zone N_c + 1 exactly


def test_shifted_squared_closed_form():
    drive = DriveSpec(modes={0: PauliSum.from_string("Z")}, omega=10.0, L=1)
    h = build_extended(drive, n_a=1)
    # collapse to the 1-qubit algebra: (Z - I)^2 = 2I - 2Z on the physical part
    z = PauliSum.from_string("Z")
    ident = PauliSum.identity(1)
    sq = (z - ident) @ (z - ident)
    assert sq.approx_equal(2.0 * ident - 2.0 * z)


def test_shifted_squared_psd_and_spectrum():
    rng = np.random.default_rng(37)
    drive = driven_xyz(
        XYZParams(L=2, j_bar=(1.0, 0.5, 0.7), delta_j=(0.3, 0.0, 0.1), b_bar=0.2),
        omega=4.0,
    )
    h = build_extended(drive, n_a=2)
    dense_h = to_dense(h.op)
    evals = np.linalg.eigvalsh(dense_h)
    for lam in (0.0, 1.3, -0.8):
        sq = shifted_squared(h, lam)
        assert sq.is_hermitian
        dense_sq = to_dense(sq)
        sq_evals = np.linalg.eigvalsh(dense_sq)
        assert sq_evals.min() >= -1e-10
        np.testing.assert_allclose(
            np.sort(sq_evals), np.sort((evals - lam) ** 2), atol=1e-9
        )
    # nonnegative expectation on random states
    dim = dense_h.shape[0]
    sq0 = to_dense(shifted_squared(h, 0.6))
    for _ in range(5):
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v /= np.linalg.norm(v)
        assert (v.conj() @ sq0 @ v).real >= -1e-10


def test_central_zone_matches_definition_assembly_xyz():
    drive = driven_xyz(
        XYZParams(L=2, j_bar=(1.1, 0.9, 0.7), delta_j=(0.4, 0.2, 0.1), b_bar=0.3,
                  delta_b=0.6),
        omega=6.0,
    )
    h = build_extended(drive, n_a=3)
    modes_dense = {r: dense_from_sum(drive.mode(r)) for r in (-1, 0, 1)}
    expected = shirley_dense(modes_dense, 6.0, n_a=3, phys_dim=4)
    np.testing.assert_allclose(to_dense(h.op), expected, atol=1e-12)
