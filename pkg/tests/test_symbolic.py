from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from z22susy.exact import QI
from z22susy.graded_matrix import alpha, sigma
from z22susy.grading import Degree
from z22susy.symbolic import (
    Coeff,
    DerivativeCapExceeded,
    NCPolynomial,
    RewriteBudgetExceeded,
    bd_morphism_check,
    bd_system,
    build_symbolic_model,
    canonical_system,
    central_relation,
    format_polynomial,
    g_commutator,
    verify_central_relation,
    verify_supertranslation,
)
from z22susy.symbolic.coeff import HBAR
from z22susy.symbolic.model import supertranslation_targets

SYS = canonical_system(derivative_cap=8)
MINUS_I_HBAR = Coeff.monomial(QI(0, -1), hbar=1)


def word(*letters, c=1):
    return NCPolynomial.from_word(SYS, letters, c)


# -- exact action oracle ----------------------------------------------------------
# Polynomials in x are dicts power -> QI. With hbar = 1 and 2m = 1 every Coeff
# collapses to the sum of its Gaussian-rational parts.

W_POLY = {0: QI(1), 1: QI(2), 3: QI(Fraction(1, 3))}


def _pmul(a, b):
    out = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = out.get(i + j, QI(0)) + x * y
    return {k: v for k, v in out.items() if v}


def _pderiv(a):
    return {k - 1: v * k for k, v in a.items() if k}


def _w(k):
    f = W_POLY
    for _ in range(k):
        f = _pderiv(f)
    return f


def _act(letters, f):
    for x in reversed(letters):
        if x == "p":
            f = {k: v * QI(0, -1) for k, v in _pderiv(f).items()}
        else:
            f = _pmul(_w(int(x[1:])), f)
    return f


def _collapse(c: Coeff) -> QI:
    total = QI(0)
    for q in c.terms.values():
        total = total + q
    return total


def action(poly: NCPolynomial, f):
    out = {}
    for (w, unit), c in poly.terms.items():
        assert unit is None
        for k, v in _act(w, f).items():
            out[k] = out.get(k, QI(0)) + _collapse(c) * v
    return {k: v for k, v in out.items() if v}


TEST_FN = {0: QI(1), 2: QI(-3), 5: QI(1, 2)}

letters = st.sampled_from(["p", "W0", "W1", "W2"])
words = st.lists(letters, min_size=0, max_size=6).map(tuple)
small = st.integers(min_value=-3, max_value=3).filter(bool)
raw_polys = st.lists(st.tuples(words, small), min_size=1, max_size=4).map(
    lambda ts: sum((word(*w, c=c) for w, c in ts), NCPolynomial.zero(SYS))
)


# -- rewriting ---------------------------------------------------------------------


def test_defining_rule():
    got = word("p") * word("W0")
    want = word("W0", "p") + NCPolynomial.from_word(SYS, ("W1",), MINUS_I_HBAR)
    assert got == want


def test_commutator_with_square():
    got = g_commutator(word("p"), word("W0", "W0"))
    want = NCPolynomial.from_word(SYS, ("W0", "W1"), MINUS_I_HBAR * Coeff.const(2))
    assert got == want


def test_pwp_hand_reduction():
    got = word("p", "W0", "p").normalize()
    want = word("W0", "p", "p") + NCPolynomial.from_word(SYS, ("W1", "p"), MINUS_I_HBAR)
    assert got == want


def test_function_letters_commute_and_sort():
    assert word("W2", "W0", "W1").normalize() == word("W0", "W1", "W2")


@settings(max_examples=60, deadline=None)
@given(raw_polys)
def test_normalize_is_idempotent(x):
    n = x.normalize()
    assert n.is_normal()
    assert n.normalize() == n


@settings(max_examples=60, deadline=None)
@given(raw_polys, raw_polys)
def test_normalize_is_multiplicative(x, y):
    assert x.concat(y).normalize() == (x.normalize().concat(y.normalize())).normalize()


@settings(max_examples=60, deadline=None)
@given(raw_polys)
def test_normal_form_preserves_operator_action(x):
    assert action(x.normalize(), TEST_FN) == action(x, TEST_FN)


def test_derivative_cap_is_enforced():
    tight = canonical_system(derivative_cap=1)
    x = NCPolynomial.from_word(tight, ("p", "p", "W0"))
    with pytest.raises(DerivativeCapExceeded):
        x.normalize()


def test_budget_exceeded_is_reported():
    system = bd_system(budget=3)
    long = NCPolynomial.from_word(system, ("Q2d", "Q1d", "Q2", "Q1", "H", "Q2d", "Q1"))
    with pytest.raises(RewriteBudgetExceeded):
        long.normalize()


# -- model -------------------------------------------------------------------------

MODEL = build_symbolic_model()


def test_supertranslation_theorem_exact():
    report = verify_supertranslation(MODEL)
    assert report.passed, [i.name for i in report.failures()]
    assert len(report.brackets) == 10
    for ident in report.brackets:
        assert ident.residual.is_zero()


def test_supertranslation_on_free_particle():
    assert verify_supertranslation(build_symbolic_model(w_zero=True)).passed


def test_q01_squares_to_half_hamiltonian():
    got = g_commutator(MODEL.Q01, MODEL.Q01)
    assert got == MODEL.H00.scale(Fraction(1, 2)).normalize()
    text = format_polynomial(MODEL.H00)
    assert "W' ⊗ Sigma3" in text and "p^2 ⊗ Sigma0" in text and "W^2 ⊗ Sigma0" in text


def test_mixed_bracket_gives_half_central_charge():
    got = g_commutator(MODEL.Q10, MODEL.Q01)
    assert got == MODEL.Z11.scale(Fraction(1, 2))
    assert "alpha3" in format_polynomial(got) and "alpha0" in format_polynomial(got)


def test_central_charge_is_central():
    for x in (MODEL.Q01, MODEL.Q10, MODEL.H00):
        assert g_commutator(x, MODEL.Z11).is_zero()


def test_hermiticity():
    assert MODEL.Q01.adjoint() == MODEL.Q01.normalize()
    assert MODEL.Q10.adjoint() == MODEL.Q10.normalize()
    assert MODEL.H00.adjoint() == MODEL.H00.normalize()
    assert MODEL.Z11.adjoint() == -MODEL.Z11.normalize()
    assert MODEL.A.adjoint() == MODEL.A_dag


def test_generator_degrees():
    assert MODEL.Q01.degree is Degree.D01
    assert MODEL.Q10.degree is Degree.D10
    assert MODEL.H00.degree is Degree.D00
    assert MODEL.Z11.degree is Degree.D11


def test_broken_model_is_detected():
    # flipping the sign of the W term in Q10 must break the algebra
    s = MODEL.system
    p_over = NCPolynomial.from_word(s, ("p",), Coeff.monomial(root2m=-1))
    W = NCPolynomial.from_word(s, ("W0",))
    bad = (NCPolynomial.tensor(p_over, alpha(2)) + NCPolynomial.tensor(W, alpha(1))).scale(Fraction(1, 2))
    resid = g_commutator(bad, bad) - MODEL.H00.scale(Fraction(1, 2))
    assert not resid.normalize().is_zero()


def test_central_relation_sign():
    rep = central_relation(MODEL)
    assert verify_central_relation(MODEL)
    assert rep.holds
    # the opposite sign leaves 2 H00 alpha3 behind
    assert not rep.literal_holds
    one = NCPolynomial.from_word(MODEL.system, ())
    assert rep.literal_residual == (MODEL.H00 * NCPolynomial.tensor(one, alpha(3))).scale(2)


def test_central_relation_fails_for_flipped_z():
    one = NCPolynomial.from_word(MODEL.system, ())
    flipped = (MODEL.H00 * NCPolynomial.tensor(one, alpha(3))).scale(QI(0, 1))
    assert not verify_central_relation(replace(MODEL, Z11=flipped))


def test_central_relation_free_particle():
    assert verify_central_relation(build_symbolic_model(w_zero=True))


JACOBI_POOL = ["Q01", "Q10", "H00", "Z11", "A"]


def _gen(name):
    if name == "A":
        return NCPolynomial.tensor(MODEL.A, sigma(0))
    return MODEL.generators()[name]


@settings(max_examples=40, deadline=None)
@given(st.tuples(*(st.sampled_from(JACOBI_POOL),) * 3))
def test_jacobi_on_model_generators(names):
    x, y, z = (_gen(n) for n in names)
    sign = 1 if (x.degree.gamma1 * y.degree.gamma1 + x.degree.gamma2 * y.degree.gamma2) % 2 == 0 else -1
    lhs = g_commutator(x, g_commutator(y, z))
    rhs = g_commutator(g_commutator(x, y), z) + g_commutator(y, g_commutator(x, z)).scale(sign)
    assert (lhs - rhs).is_zero()


@settings(max_examples=30, deadline=None)
@given(st.tuples(*(st.sampled_from(JACOBI_POOL),) * 2))
def test_bracket_degree_is_additive(names):
    x, y = (_gen(n) for n in names)
    c = g_commutator(x, y)
    assert c.is_zero() or c.degree is x.degree + y.degree


def test_targets_cover_all_pairs():
    pairs = {frozenset((a, b)) for a, b, _ in supertranslation_targets(MODEL)}
    assert len(pairs) == 10


def test_coefficients_evaluate():
    c = HBAR * Coeff.monomial(root2m=-1)
    assert abs(c.evaluate(hbar=2.0, m=2.0) - 1.0) < 1e-15
    assert str(c) == "hbar*(2m)^(-1/2)"


# -- Beckers-Debergh ------------------------------------------------------------------


def test_bd_morphism_reductions():
    report = bd_morphism_check()
    assert report.passed
    assert [r.bracket for r in report.reductions] == [
        "[Q01,Q01]",
        "[Q10,Q10]",
        "[Q10,Q01]",
        "[Q01,H00]",
        "[Q10,H00]",
    ]


def test_bd_rules_are_nilpotent():
    s = bd_system()
    assert NCPolynomial.from_word(s, ("Q1", "Q1")).normalize().is_zero()
    assert NCPolynomial.from_word(s, ("Q2d", "Q2d")).normalize().is_zero()
    got = NCPolynomial.from_word(s, ("Q1d", "Q1")).normalize()
    want = NCPolynomial.from_word(s, ("H",)) - NCPolynomial.from_word(s, ("Q1", "Q1d"))
    assert got == want
