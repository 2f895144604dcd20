import numpy as np
import pytest

from floqsim.pauli import (
    PauliString,
    PauliSum,
    WidthMismatchError,
    commutator,
    multiply,
    strings_commute,
    tensor,
    to_dense,
    trace_decompose,
)

from oracles import dense_from_letters, dense_from_sum, random_pauli_sum


def test_letters_round_trip():
    for letters in ("I", "X", "Y", "Z", "IXZ", "YYXI", "ZIXY"):
        s = PauliString.from_letters(letters)
        assert s.letters == letters
        assert s.width == len(letters)


def test_letter_order_convention():
    # qubit 0 is the rightmost letter / least-significant bit
    s = PauliString.from_letters("XIZ")
    assert s.z == 0b001
    assert s.x == 0b100


def test_multiply_single_qubit():
    phase, prod = multiply(PauliString.from_letters("X"), PauliString.from_letters("Y"))
    assert phase == 1j
    assert prod.letters == "Z"


def test_multiply_involution():
    zi = PauliString.from_letters("ZI")
    phase, prod = multiply(zi, zi)
    assert phase == 1
    assert prod.letters == "II"


def test_multiply_dense_oracle():
    a = PauliString.from_letters("XX")
    b = PauliString.from_letters("ZI")
    phase, prod = multiply(a, b)
    assert phase == -1j
    assert prod.letters == "YX"
    lhs = dense_from_letters("XX") @ dense_from_letters("ZI")
    np.testing.assert_allclose(phase * dense_from_letters(prod.letters), lhs, atol=1e-12)


def test_multiply_random_against_dense():
    rng = np.random.default_rng(7)
    letters = "IXYZ"
    for _ in range(200):
        sa = "".join(rng.choice(list(letters)) for _ in range(3))
        sb = "".join(rng.choice(list(letters)) for _ in range(3))
        phase, prod = multiply(
            PauliString.from_letters(sa), PauliString.from_letters(sb)
        )
        lhs = dense_from_letters(sa) @ dense_from_letters(sb)
        np.testing.assert_allclose(
            phase * dense_from_letters(prod.letters), lhs, atol=1e-12
        )


def test_multiply_width_mismatch():
    with pytest.raises(WidthMismatchError):
        multiply(PauliString.from_letters("X"), PauliString.from_letters("XX"))


def test_sum_multiply_projector_orthogonality():
    plus = PauliSum.from_terms(1, [("I", 1.0), ("Z", 1.0)])
    minus = PauliSum.from_terms(1, [("I", 1.0), ("Z", -1.0)])
    assert len(plus @ minus) == 0


def test_sum_multiply_involution():
    x = PauliSum.from_string("X")
    assert (x @ x).approx_equal(PauliSum.identity(1))


def test_sum_multiply_random_dense():
    rng = np.random.default_rng(11)
    for _ in range(30):
        a = random_pauli_sum(rng, 3, 5)
        b = random_pauli_sum(rng, 3, 4)
        np.testing.assert_allclose(
            dense_from_sum(a @ b), dense_from_sum(a) @ dense_from_sum(b), atol=1e-12
        )


def test_product_term_count_bound():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = random_pauli_sum(rng, 4, 6)
        b = random_pauli_sum(rng, 4, 5)
        assert len(a @ b) <= len(a) * len(b)


def test_commutator_trivial():
    two_i_z = commutator(PauliSum.from_string("X"), PauliSum.from_string("Y"))
    assert two_i_z.approx_equal(PauliSum.from_string("Z", 2j))

    disjoint = commutator(PauliSum.from_string("ZI"), PauliSum.from_string("IX"))
    assert len(disjoint) == 0


def test_commutator_dense():
    a = PauliSum.from_string("XX")
    b = PauliSum.from_string("ZI")
    c = commutator(a, b)
    assert c.approx_equal(PauliSum.from_string("YX", -2j))
    da, db = dense_from_sum(a), dense_from_sum(b)
    np.testing.assert_allclose(dense_from_sum(c), da @ db - db @ da, atol=1e-12)


def test_adjoint():
    assert PauliSum.from_string("Z", 1j).adjoint().approx_equal(
        PauliSum.from_string("Z", -1j)
    )
    rng = np.random.default_rng(5)
    h = random_pauli_sum(rng, 3, 6, hermitian=True)
    assert h.adjoint().approx_equal(h)
    g = random_pauli_sum(rng, 3, 6)
    np.testing.assert_allclose(
        dense_from_sum(g.adjoint()), dense_from_sum(g).conj().T, atol=1e-12
    )


def test_tensor_trivial():
    iz = tensor(PauliSum.identity(1), PauliSum.from_string("Z"))
    assert iz.approx_equal(PauliSum.from_string("IZ"))
    zi = tensor(PauliSum.from_string("Z"), PauliSum.identity(1))
    assert zi.approx_equal(PauliSum.from_string("ZI"))


def test_tensor_ladder_dense():
    p_minus = PauliSum.from_terms(1, [("X", 0.5), ("Y", -0.5j)])
    prod = tensor(p_minus, PauliSum.from_string("X"))
    expected = PauliSum.from_terms(2, [("XX", 0.5), ("YX", -0.5j)])
    assert prod.approx_equal(expected)
    np.testing.assert_allclose(
        dense_from_sum(prod),
        np.kron(dense_from_sum(p_minus), dense_from_letters("X")),
        atol=1e-12,
    )


def test_to_dense_identity_and_ladder():
    np.testing.assert_allclose(to_dense(PauliSum.identity(1)), np.eye(2), atol=0)
    lower = PauliSum.from_terms(1, [("X", 0.5), ("Y", -0.5j)])
    np.testing.assert_allclose(to_dense(lower), [[0, 0], [1, 0]], atol=1e-15)


def test_to_dense_matches_kron_oracle():
    rng = np.random.default_rng(13)
    for _ in range(20):
        a = random_pauli_sum(rng, 3, 6)
        np.testing.assert_allclose(to_dense(a), dense_from_sum(a), atol=1e-12)


def test_to_dense_width_limit():
    with pytest.raises(ValueError):
        to_dense(PauliSum.identity(13))


def test_trace_decompose_trivial():
    d = trace_decompose(np.diag([0.0, 1.0]))
    assert d.approx_equal(PauliSum.from_terms(1, [("I", 0.5), ("Z", -0.5)]))
    lower = trace_decompose(np.array([[0.0, 0.0], [1.0, 0.0]]))
    assert lower.approx_equal(PauliSum.from_terms(1, [("X", 0.5), ("Y", -0.5j)]))


def test_trace_decompose_round_trip():
    rng = np.random.default_rng(17)
    m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    np.testing.assert_allclose(to_dense(trace_decompose(m)), m, atol=1e-12)


def test_trace_decompose_identity_on_sums():
    rng = np.random.default_rng(19)
    for _ in range(10):
        a = random_pauli_sum(rng, 3, 5)
        assert trace_decompose(to_dense(a)).approx_equal(a, tol=1e-12)


def test_trace_decompose_rejects_bad_shape():
    with pytest.raises(ValueError):
        trace_decompose(np.zeros((3, 3)))


def test_hermiticity_agrees_with_dense():
    rng = np.random.default_rng(23)
    for _ in range(20):
        herm = bool(rng.integers(2))
        a = random_pauli_sum(rng, 3, 5, hermitian=herm)
        d = dense_from_sum(a)
        dense_hermitian = np.allclose(d, d.conj().T, atol=1e-12)
        assert a.is_hermitian == dense_hermitian


def test_simplification_threshold():
    tiny = PauliSum.from_terms(1, [("X", 1e-15)])
    assert len(tiny) == 0
    cancel = PauliSum.from_terms(1, [("X", 1.0), ("X", -1.0)])
    assert len(cancel) == 0


def test_serialization_round_trip():
    rng = np.random.default_rng(29)
    a = random_pauli_sum(rng, 3, 6)
    b = PauliSum.from_lines(a.to_lines())
    assert b.approx_equal(a, tol=0.0)


def test_strings_commute():
    assert strings_commute(
        PauliString.from_letters("XX"), PauliString.from_letters("YY")
    )
    assert not strings_commute(
        PauliString.from_letters("XI"), PauliString.from_letters("ZI")
    )
