"""Exact coefficients: Gaussian-rational combinations of hbar^a (2m)^(b/2)."""

from __future__ import annotations

from fractions import Fraction

from ..exact import QI


class Coeff:
    """Finite sum of ``q * hbar**a * (2m)**(b/2)`` with q a Gaussian rational.

    hbar and m are formal positive parameters, so the (a, b) monomials are
    linearly independent and this representation is unique.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for key, q in terms.items():
                q = QI.coerce(q)
                if q:
                    clean[key] = q
        self.terms: dict[tuple[int, int], QI] = clean

    @classmethod
    def const(cls, q) -> Coeff:
        return cls({(0, 0): q})

    @classmethod
    def monomial(cls, q=1, hbar: int = 0, root2m: int = 0) -> Coeff:
        return cls({(hbar, root2m): q})

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other) -> Coeff:
        other = _coerce(other)
        out = dict(self.terms)
        for k, q in other.terms.items():
            out[k] = out[k] + q if k in out else q
        return Coeff(out)

    __radd__ = __add__

    def __neg__(self) -> Coeff:
        return Coeff({k: -q for k, q in self.terms.items()})

    def __sub__(self, other) -> Coeff:
        return self + (-_coerce(other))

    def __mul__(self, other) -> Coeff:
        other = _coerce(other)
        out: dict[tuple[int, int], QI] = {}
        for (a1, b1), q1 in self.terms.items():
            for (a2, b2), q2 in other.terms.items():
                k = (a1 + a2, b1 + b2)
                q = q1 * q2
                out[k] = out[k] + q if k in out else q
        return Coeff(out)

    __rmul__ = __mul__

    def conjugate(self) -> Coeff:
        return Coeff({k: q.conjugate() for k, q in self.terms.items()})

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def evaluate(self, hbar: float = 1.0, m: float = 1.0) -> complex:
        root = (2.0 * m) ** 0.5
        return sum(complex(q) * hbar**a * root**b for (a, b), q in self.terms.items())

    def __str__(self):
        if not self.terms:
            return "0"
        parts = [_monomial_str(k, q) for k, q in sorted(self.terms.items())]
        return parts[0] if len(parts) == 1 else "(" + " + ".join(parts) + ")"

    __repr__ = __str__


def _coerce(value) -> Coeff:
    if isinstance(value, Coeff):
        return value
    return Coeff.const(QI.coerce(value))


def _monomial_str(key: tuple[int, int], q: QI) -> str:
    a, b = key
    factors = []
    if a:
        factors.append("hbar" if a == 1 else f"hbar^{a}")
    if b:
        exp = Fraction(b, 2)
        exp_s = str(exp) if exp.denominator == 1 else f"({exp})"
        factors.append(f"(2m)^{exp_s}")
    qs = str(q)
    if not factors:
        return qs
    if q == 1:
        return "*".join(factors)
    if q == -1:
        return "-" + "*".join(factors)
    return "*".join([qs] + factors)


HALF = Coeff.const(Fraction(1, 2))
I = Coeff.const(QI(0, 1))
HBAR = Coeff.monomial(hbar=1)
INV_ROOT2M = Coeff.monomial(root2m=-1)
