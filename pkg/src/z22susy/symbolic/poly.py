"""Noncommutative polynomials with matrix-unit coefficients and word rewriting.

A term is keyed by ``(word, unit)`` where ``word`` is a tuple of letter names
and ``unit`` is a 4x4 matrix unit ``(row, col)`` (or ``None`` for operator
algebras without a spin factor). Matrix units commute with every letter, so
the product of two terms is the concatenated word times the unit product.

Words are brought to normal form by a :class:`RewriteSystem` whose rules all
have length-two left-hand sides and strictly decrease the length-then-lex
order; reduction therefore terminates.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..exact import QI
from ..graded_matrix import ENTRY_DEGREE, GradedMatrix, standard_basis
from ..grading import Degree, bracket_sign
from .coeff import Coeff

Word = tuple[str, ...]
Unit = "tuple[int, int] | None"
RuleResult = "list[tuple[Word, Coeff]] | None"


class RewriteError(RuntimeError):
    pass


class DerivativeCapExceeded(RewriteError):
    pass


class RewriteBudgetExceeded(RewriteError):
    pass


@dataclass(frozen=True)
class Letter:
    name: str
    degree: Degree
    adjoint: str
    rank: int  # position in the term order


@dataclass(eq=False)
class RewriteSystem:
    """Letters, their grading and adjoints, plus oriented length-2 rules."""

    name: str
    letters: dict[str, Letter]
    rule: Callable[[str, str], RuleResult]
    budget: int = 100_000
    _memo: dict = field(default_factory=dict, repr=False)

    def word_key(self, word: Word):
        return (len(word), tuple(self.letters[x].rank for x in word))

    def word_degree(self, word: Word) -> Degree:
        d = Degree.D00
        for x in word:
            d = d + self.letters[x].degree
        return d

    def adjoint_word(self, word: Word) -> Word:
        return tuple(self.letters[x].adjoint for x in reversed(word))

    def normal_form(self, word: Word) -> dict[Word, Coeff]:
        steps = [0]
        return self._nf(tuple(word), steps)

    def _nf(self, word: Word, steps) -> dict[Word, Coeff]:
        cached = self._memo.get(word)
        if cached is not None:
            return cached
        for i in range(len(word) - 1):
            rhs = self.rule(word[i], word[i + 1])
            if rhs is None:
                continue
            steps[0] += 1
            if steps[0] > self.budget:
                raise RewriteBudgetExceeded(
                    f"{self.name}: no normal form within {self.budget} rewrites"
                )
            out: dict[Word, Coeff] = {}
            for piece, c in rhs:
                new = word[:i] + tuple(piece) + word[i + 2 :]
                for w, cw in self._nf(new, steps).items():
                    val = out.get(w)
                    out[w] = c * cw if val is None else val + c * cw
            out = {w: c for w, c in out.items() if c}
            self._memo[word] = out
            return out
        result = {word: Coeff.const(1)}
        self._memo[word] = result
        return result

    def is_normal(self, word: Word) -> bool:
        return all(self.rule(word[i], word[i + 1]) is None for i in range(len(word) - 1))


def _unit_mul(u, v):
    if u is None:
        return v, True
    if v is None:
        return u, True
    return (u[0], v[1]), u[1] == v[0]


class NCPolynomial:
    """Immutable noncommutative polynomial over a rewrite system."""

    __slots__ = ("system", "terms")

    def __init__(self, system: RewriteSystem, terms=None):
        self.system = system
        clean = {}
        for key, c in (terms or {}).items():
            c = c if isinstance(c, Coeff) else Coeff.const(QI.coerce(c))
            if c:
                clean[key] = c
        self.terms: dict[tuple[Word, object], Coeff] = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, system: RewriteSystem) -> NCPolynomial:
        return cls(system)

    @classmethod
    def from_word(cls, system, word: Iterable[str], coeff=1, unit=None) -> NCPolynomial:
        c = coeff if isinstance(coeff, Coeff) else Coeff.const(QI.coerce(coeff))
        return cls(system, {(tuple(word), unit): c})

    @classmethod
    def tensor(cls, scalar: NCPolynomial, matrix: GradedMatrix) -> NCPolynomial:
        """``scalar (x) matrix`` for a spin-free ``scalar``."""
        out = {}
        for (word, unit), c in scalar.terms.items():
            if unit is not None:
                raise ValueError("left factor already carries a matrix part")
            for r in range(4):
                for col in range(4):
                    z = matrix.entries[r, col]
                    if z:
                        key = (word, (r, col))
                        out[key] = out.get(key, Coeff()) + c * QI.coerce(complex(z))
        return cls(scalar.system, out)

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other):
        if other.system is not self.system:
            raise ValueError("polynomials live in different rewrite systems")

    def __add__(self, other: NCPolynomial) -> NCPolynomial:
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return NCPolynomial(self.system, out)

    def __neg__(self) -> NCPolynomial:
        return NCPolynomial(self.system, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: NCPolynomial) -> NCPolynomial:
        return self + (-other)

    def scale(self, c) -> NCPolynomial:
        c = c if isinstance(c, Coeff) else Coeff.const(QI.coerce(c))
        return NCPolynomial(self.system, {k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c) -> NCPolynomial:
        return self.scale(c)

    def __mul__(self, other):
        if not isinstance(other, NCPolynomial):
            return self.scale(other)
        return self.concat(other).normalize()

    def __matmul__(self, other: NCPolynomial) -> NCPolynomial:
        return self * other

    def concat(self, other: NCPolynomial) -> NCPolynomial:
        """Product without normalization (words are simply concatenated)."""
        self._check(other)
        out: dict = {}
        for (w1, u1), c1 in self.terms.items():
            for (w2, u2), c2 in other.terms.items():
                unit, ok = _unit_mul(u1, u2)
                if not ok:
                    continue
                key = (w1 + w2, unit)
                val = c1 * c2
                out[key] = out[key] + val if key in out else val
        return NCPolynomial(self.system, out)

    def normalize(self) -> NCPolynomial:
        out: dict = {}
        for (word, unit), c in self.terms.items():
            for w, cw in self.system.normal_form(word).items():
                key = (w, unit)
                val = c * cw
                out[key] = out[key] + val if key in out else val
        return NCPolynomial(self.system, out)

    def adjoint(self) -> NCPolynomial:
        """Formal adjoint: reverse words, adjoint letters, conjugate scalars,
        transpose the spin part."""
        out: dict = {}
        for (word, unit), c in self.terms.items():
            u = None if unit is None else (unit[1], unit[0])
            key = (self.system.adjoint_word(word), u)
            val = c.conjugate()
            out[key] = out[key] + val if key in out else val
        return NCPolynomial(self.system, out).normalize()

    # -- inspection ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_normal(self) -> bool:
        return all(self.system.is_normal(w) for w, _ in self.terms)

    def __eq__(self, other):
        if not isinstance(other, NCPolynomial):
            return NotImplemented
        return self.system is other.system and self.terms == other.terms

    __hash__ = None

    def degrees(self) -> set[Degree]:
        out = set()
        for word, unit in self.terms:
            d = self.system.word_degree(word)
            if unit is not None:
                d = d + ENTRY_DEGREE[unit[0]][unit[1]]
            out.add(d)
        return out

    @property
    def degree(self) -> Degree | None:
        """The common degree of all terms, or None (zero or inhomogeneous)."""
        ds = self.degrees()
        return next(iter(ds)) if len(ds) == 1 else None

    def max_word_length(self) -> int:
        return max((len(w) for w, _ in self.terms), default=0)

    def evaluate_coefficients(self, hbar=1.0, m=1.0) -> dict:
        return {k: c.evaluate(hbar, m) for k, c in self.terms.items()}

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"NCPolynomial({self})"


def g_commutator(x: NCPolynomial, y: NCPolynomial) -> NCPolynomial:
    """Graded commutator XY - (-1)^<deg X, deg Y> YX, in normal form.

    Inhomogeneous operands are split into homogeneous parts and the brackets
    summed.
    """
    if x.is_zero() or y.is_zero():
        return NCPolynomial.zero(x.system)
    xs, ys = homogeneous_parts(x), homogeneous_parts(y)
    total = NCPolynomial.zero(x.system)
    for dx, px in xs.items():
        for dy, py in ys.items():
            sign = bracket_sign(dx, dy)
            total = total + px.concat(py) - py.concat(px).scale(sign)
    return total.normalize()


def homogeneous_parts(x: NCPolynomial) -> dict[Degree, NCPolynomial]:
    parts: dict[Degree, dict] = {}
    for (word, unit), c in x.terms.items():
        d = x.system.word_degree(word)
        if unit is not None:
            d = d + ENTRY_DEGREE[unit[0]][unit[1]]
        parts.setdefault(d, {})[(word, unit)] = c
    return {d: NCPolynomial(x.system, t) for d, t in parts.items()}


# -- printing -----------------------------------------------------------------

_BASIS = standard_basis()
_QUARTER = Coeff.const(QI(Fraction(1, 4)))


def _word_str(word: Word, system: RewriteSystem) -> str:
    if not word:
        return "1"
    names = [getattr(system, "display", {}).get(x, x) for x in word]
    out, i = [], 0
    while i < len(names):
        j = i
        while j < len(names) and names[j] == names[i]:
            j += 1
        n = j - i
        out.append(names[i] if n == 1 else f"{names[i]}^{n}")
        i = j
    return "*".join(out)


def _decompose(units: dict) -> list[tuple[Coeff, str]] | None:
    """Write a 4x4 matrix of Coeffs in the Sigma/alpha basis, if it lies in the span."""
    out = []
    recon = {}
    for label, b in _BASIS.items():
        # Sigma/alpha are unitary and trace-orthogonal: coefficient = tr(B^dag M)/4
        c = Coeff()
        for (r, col), v in units.items():
            z = b.entries[r, col]
            if z:
                c = c + v * QI.coerce(complex(z)).conjugate()
        c = c * _QUARTER
        if c:
            out.append((c, label))
            for r in range(4):
                for col in range(4):
                    z = b.entries[r, col]
                    if z:
                        recon[(r, col)] = recon.get((r, col), Coeff()) + c * QI.coerce(complex(z))
    recon = {k: v for k, v in recon.items() if v}
    if recon != {k: v for k, v in units.items() if v}:
        return None
    return out


def format_polynomial(poly: NCPolynomial) -> str:
    """Linear syntax, e.g. ``(1/2)*hbar*(2m)^(-1/2) * W' ⊗ Sigma3 + ...``."""
    if poly.is_zero():
        return "0"
    by_word: dict[Word, dict] = {}
    for (word, unit), c in poly.terms.items():
        by_word.setdefault(word, {})[unit] = c
    pieces = []
    for word in sorted(by_word, key=poly.system.word_key):
        units = by_word[word]
        ws = _word_str(word, poly.system)
        if None in units:
            pieces.append(_scaled(units[None], ws))
            continue
        dec = _decompose(units)
        if dec is None:
            for (r, col), c in sorted(units.items()):
                pieces.append(_scaled(c, f"{ws} ⊗ E{r + 1}{col + 1}"))
        else:
            for c, label in dec:
                pieces.append(_scaled(c, f"{ws} ⊗ {label}"))
    return " + ".join(pieces)


def _scaled(c: Coeff, body: str) -> str:
    cs = str(c)
    if cs == "1":
        return body
    if cs == "-1":
        return f"-{body}"
    return f"{cs}*{body}"


def matrix_of(poly: NCPolynomial, word: Word, hbar=1.0, m=1.0) -> np.ndarray:
    """Numeric 4x4 coefficient matrix of ``word`` (debugging aid)."""
    out = np.zeros((4, 4), dtype=complex)
    for (w, unit), c in poly.terms.items():
        if w == word and unit is not None:
            out[unit] += c.evaluate(hbar, m)
    return out
