import itertools

import numpy as np
import pytest

from z22susy.graded_matrix import (
    ENTRY_DEGREE,
    LISTED_BRACKETS,
    GradedMatrix,
    alpha,
    bracket_table,
    direct_sum,
    graded_commutator,
    parity_matrices,
    pauli,
    sigma,
    skew_sum,
    standard_basis,
    verify_z22_lie,
)
from z22susy.grading import Degree, bracket_sign


def test_pauli_entries():
    assert np.array_equal(pauli(0), np.eye(2))
    assert np.array_equal(pauli(2), np.array([[0, -1j], [1j, 0]]))
    assert np.array_equal(pauli(3), np.diag([1, -1]))
    with pytest.raises(IndexError):
        pauli(4)


def test_direct_and_skew_sums():
    s1 = direct_sum(pauli(1), pauli(1))
    rows = ["".join(str(int(v.real)) for v in row) for row in s1.entries]
    assert rows == ["0100", "1000", "0001", "0010"]
    a3 = skew_sum(pauli(3), pauli(3))
    nz = {(r + 1, c + 1): a3.entries[r, c].real for r, c in zip(*np.nonzero(a3.entries))}
    assert nz == {(1, 3): 1, (2, 4): -1, (3, 1): 1, (4, 2): -1}
    a0 = skew_sum(pauli(0), pauli(0))
    assert np.array_equal(a0.entries, np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]]))


def test_degrees_of_basis():
    assert sigma(1).degree is Degree.D01
    assert alpha(2).degree is Degree.D10
    assert alpha(0).degree is Degree.D11
    assert [sigma(i).degree for i in range(4)] == [Degree.D00, Degree.D01, Degree.D01, Degree.D00]
    assert [alpha(i).degree for i in range(4)] == [Degree.D11, Degree.D10, Degree.D10, Degree.D11]


def test_basis_respects_block_invariant():
    for m in standard_basis().values():
        assert m.respects_degree()
        for r, c in zip(*np.nonzero(m.entries)):
            assert ENTRY_DEGREE[r][c] is m.degree


def test_hermitian_and_unitary():
    for m in standard_basis().values():
        assert m.is_hermitian()
        assert m.is_unitary()


def test_identities_used_in_model_proof():
    s0 = sigma(0)
    for m in (sigma(1), sigma(2), alpha(1), alpha(2)):
        assert m @ m == s0
    assert (sigma(1) @ sigma(2)).scale(-1j) == sigma(3)
    assert (alpha(2) @ alpha(1)).scale(1j) == sigma(3)
    assert sigma(0) @ alpha(3) == alpha(3)
    assert sigma(3) @ alpha(3) == alpha(0)


def test_graded_commutator_examples():
    assert graded_commutator(sigma(1), sigma(2)).is_zero()
    assert graded_commutator(alpha(0), alpha(1)) == sigma(1).scale(2)
    assert graded_commutator(sigma(2), sigma(3)) == sigma(1).scale(2j)


def test_commutator_degree_additive():
    basis = list(standard_basis().values())
    for a, b in itertools.product(basis, repeat=2):
        c = graded_commutator(a, b)
        assert c.degree is a.degree + b.degree
        assert c.respects_degree()


def test_inhomogeneous_bracket_is_bilinear():
    s1, a0, s3 = sigma(1), alpha(0), sigma(3)
    mixed = s1 + a0
    assert mixed.degree is None
    want = graded_commutator(s1, s3).entries + graded_commutator(a0, s3).entries
    assert np.array_equal(graded_commutator(mixed, s3).entries, want)


def test_verify_full_basis():
    report = verify_z22_lie(list(standard_basis().values()))
    assert report.passed
    assert report.triples_checked == 8**3
    assert report.pairs_checked == 64


def test_verify_abelian_singleton():
    assert verify_z22_lie([sigma(0)]).passed


def test_verify_detects_missing_closure():
    report = verify_z22_lie([sigma(1), alpha(0)])
    assert not report.passed
    assert report.closure


def test_verify_rejects_bad_basis():
    with pytest.raises(ValueError):
        verify_z22_lie([sigma(1), sigma(1).scale(2)])
    with pytest.raises(ValueError):
        verify_z22_lie([sigma(1) + alpha(0)])


def test_plain_commutator_breaks_jacobi():
    # using the total-parity sign instead of the scalar product is not a Z2^2 bracket
    basis = list(standard_basis().values())

    def naive(a, b):
        odd = lambda d: (d.gamma1 + d.gamma2) % 2
        sign = -1 if odd(a.degree) and odd(b.degree) else 1
        return a.entries @ b.entries - sign * (b.entries @ a.entries)

    diffs = [
        (a.label, b.label)
        for a, b in itertools.product(basis, repeat=2)
        if not np.array_equal(naive(a, b), graded_commutator(a, b).entries)
    ]
    assert diffs  # e.g. [Sigma1, alpha1]
    assert bracket_sign(sigma(1).degree, alpha(1).degree) == 1


def test_bracket_table_examples():
    report = bracket_table()
    assert report.passed
    assert len(report.entries) == 12
    assert report.entries["Sigma1", "Sigma3"] == sigma(2).scale(-2j)
    assert report.entries["alpha2", "alpha2"] == sigma(0).scale(2)
    assert report.entries["Sigma2", "alpha1"] == alpha(3).scale(-2j)


def test_bracket_table_against_raw_products():
    basis = standard_basis()
    for (a, b), (coef, target) in LISTED_BRACKETS.items():
        x, y = basis[a].entries, basis[b].entries
        sign = bracket_sign(basis[a].degree, basis[b].degree)
        assert np.array_equal(x @ y - sign * (y @ x), coef * basis[target].entries)


def test_bracket_table_reports_unlisted_brackets():
    # two non-vanishing brackets are not part of the expected table
    report = bracket_table()
    assert set(report.unlisted_nonvanishing) == {("Sigma3", "alpha1"), ("Sigma3", "alpha2")}
    assert report.unlisted_nonvanishing["Sigma3", "alpha1"] == alpha(2).scale(2j)
    assert report.unlisted_nonvanishing["Sigma3", "alpha2"] == alpha(1).scale(-2j)


def test_fault_injection_is_detected():
    basis = standard_basis()
    basis["alpha2"] = basis["alpha2"].scale(-1)
    assert not bracket_table(basis).passed


def test_parity_matrices():
    k1, k2 = parity_matrices()
    one = sigma(0)
    assert k1 @ k1 == one and k2 @ k2 == one
    assert k1 @ k2 == k2 @ k1
    assert np.array_equal(np.diag(k2.entries).real, [1, -1, 1, -1])


def test_matrix_shape_validation():
    with pytest.raises(ValueError):
        GradedMatrix(np.eye(3))
    m = sigma(1)
    with pytest.raises(ValueError):
        m.entries[0, 0] = 5
