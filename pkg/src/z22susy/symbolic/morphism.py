"""Beckers-Debergh parasupersymmetry relations and the morphism onto the
supertranslation algebra with vanishing central charge.

Generators are ordered H < Q1 < Q1d < Q2 < Q2d (``d`` = dagger). Oriented
rules, each strictly decreasing in length-then-lex order:

    Qi Qi -> 0,   Qid Qid -> 0,   Qid Qi -> H - Qi Qid,
    x y -> y x    for x in {Q2, Q2d}, y in {Q1, Q1d},
    x H -> H x    for every charge x.

The last family uses [H, Qi] = 0 and its adjoint [H, Qid] = 0.
Confluence is not claimed; only the reductions below are certified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..exact import QI
from ..grading import Degree
from .coeff import Coeff
from .poly import Letter, NCPolynomial, RewriteSystem, format_polynomial, g_commutator

_ORDER = ("H", "Q1", "Q1d", "Q2", "Q2d")
_DEGREES = {
    "H": Degree.D00,
    "Q1": Degree.D01,
    "Q1d": Degree.D01,
    "Q2": Degree.D10,
    "Q2d": Degree.D10,
}
_ADJ = {"H": "H", "Q1": "Q1d", "Q1d": "Q1", "Q2": "Q2d", "Q2d": "Q2"}


def bd_system(budget: int = 10_000) -> RewriteSystem:
    letters = {g: Letter(g, _DEGREES[g], _ADJ[g], k) for k, g in enumerate(_ORDER)}
    one = Coeff.const(1)

    def rule(a: str, b: str):
        if a == b and a != "H":
            return []  # nilpotent charges
        if a in ("Q1d", "Q2d") and b == a[:-1]:
            return [(("H",), one), ((b, a), -one)]
        if a in ("Q2", "Q2d") and b in ("Q1", "Q1d"):
            return [((b, a), one)]
        if b == "H" and a != "H":
            return [(("H", a), one)]
        return None

    system = RewriteSystem("beckers-debergh", letters, rule, budget=budget)
    system.display = {g: g.replace("d", "†") for g in _ORDER}
    return system


@dataclass
class Reduction:
    bracket: str
    result: NCPolynomial
    expected: NCPolynomial

    @property
    def holds(self) -> bool:
        return (self.result - self.expected).is_zero()

    def to_dict(self) -> dict:
        return {
            "bracket": self.bracket,
            "holds": self.holds,
            "normal_form": format_polynomial(self.result),
            "expected": format_polynomial(self.expected),
        }


@dataclass
class MorphismReport:
    reductions: list[Reduction] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.holds for r in self.reductions)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "reductions": [r.to_dict() for r in self.reductions]}


def bd_morphism_check(system: RewriteSystem | None = None) -> MorphismReport:
    """Map Q01 = (Q1 + Q1d)/2, Q10 = (Q2 + Q2d)/2, H00 = H and reduce the five
    brackets of the supertranslation algebra."""
    system = bd_system() if system is None else system

    def g(name):
        return NCPolynomial.from_word(system, (name,))

    half = Coeff.const(QI(Fraction(1, 2)))
    q01 = (g("Q1") + g("Q1d")).scale(half)
    q10 = (g("Q2") + g("Q2d")).scale(half)
    h00 = g("H")
    zero = NCPolynomial.zero(system)
    cases = [
        ("[Q01,Q01]", q01, q01, h00.scale(half)),
        ("[Q10,Q10]", q10, q10, h00.scale(half)),
        ("[Q10,Q01]", q10, q01, zero),
        ("[Q01,H00]", q01, h00, zero),
        ("[Q10,H00]", q10, h00, zero),
    ]
    report = MorphismReport()
    for name, x, y, want in cases:
        report.reductions.append(Reduction(name, g_commutator(x, y), want))
    return report
