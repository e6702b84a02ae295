"""Symbolic model operators and exact verification of their graded algebra.

Letters are the momentum ``p`` and the superpotential derivatives ``W0``
(W), ``W1`` (W'), ``W2`` (W''), ... . With p = -i hbar d/dx the only
relation needed is

    p W^(k) = W^(k) p - i hbar W^(k+1),

plus commutativity of the W^(k) among themselves. Normal form puts all
function letters (sorted by derivative order) left of all p's.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..exact import QI
from ..graded_matrix import alpha, sigma
from ..grading import Degree
from .coeff import HALF, HBAR, INV_ROOT2M, Coeff
from .poly import (
    DerivativeCapExceeded,
    Letter,
    NCPolynomial,
    RewriteSystem,
    g_commutator,
)

DEFAULT_DERIVATIVE_CAP = 4

_MINUS_I_HBAR = Coeff.monomial(QI(0, -1), hbar=1)


def _w(k: int) -> str:
    return f"W{k}"


def canonical_system(derivative_cap: int = DEFAULT_DERIVATIVE_CAP) -> RewriteSystem:
    """Rewrite system for p and W, W', ..., W^(cap)."""
    letters = {
        _w(k): Letter(_w(k), Degree.D00, _w(k), k) for k in range(derivative_cap + 1)
    }
    letters["p"] = Letter("p", Degree.D00, "p", derivative_cap + 1)

    def rule(a: str, b: str):
        if a == "p" and b != "p":
            k = int(b[1:])
            if k >= derivative_cap:
                raise DerivativeCapExceeded(
                    f"rewriting p*{b} needs W^({k + 1}) beyond the cap {derivative_cap}"
                )
            return [((b, "p"), Coeff.const(1)), ((_w(k + 1),), _MINUS_I_HBAR)]
        if a != "p" and b != "p" and int(a[1:]) > int(b[1:]):
            return [((b, a), Coeff.const(1))]
        return None

    system = RewriteSystem("canonical", letters, rule)
    system.display = {_w(k): "W" + "'" * k for k in range(derivative_cap + 1)}
    system.display["p"] = "p"
    return system


def normalize(poly: NCPolynomial) -> NCPolynomial:
    return poly.normalize()


def g_commutator_sym(x: NCPolynomial, y: NCPolynomial) -> NCPolynomial:
    return g_commutator(x, y)


@dataclass
class SymbolicModel:
    system: RewriteSystem
    Q01: NCPolynomial
    Q10: NCPolynomial
    H00: NCPolynomial
    Z11: NCPolynomial
    A: NCPolynomial  # spin-free
    A_dag: NCPolynomial

    def scalar(self, word, coeff=1) -> NCPolynomial:
        return NCPolynomial.from_word(self.system, word, coeff)

    def spin(self, poly: NCPolynomial, matrix) -> NCPolynomial:
        return NCPolynomial.tensor(poly, matrix)

    def generators(self) -> dict[str, NCPolynomial]:
        return {"Q01": self.Q01, "Q10": self.Q10, "H00": self.H00, "Z11": self.Z11}


def build_symbolic_model(
    derivative_cap: int = DEFAULT_DERIVATIVE_CAP, *, w_zero: bool = False
) -> SymbolicModel:
    """Q01, Q10, H00, Z11 and the ladder operators A, A^dag.

    ``w_zero`` drops every W term (free particle specialization).
    """
    system = canonical_system(derivative_cap)

    def s(word, c=1):
        return NCPolynomial.from_word(system, word, c)

    zero = NCPolynomial.zero(system)
    p_over = s(("p",), INV_ROOT2M)  # p / sqrt(2m)
    W = zero if w_zero else s(("W0",))
    Wp = zero if w_zero else s(("W1",))
    T = NCPolynomial.tensor

    H0 = s(("p", "p"), Coeff.monomial(root2m=-2)) + (zero if w_zero else s(("W0", "W0")))
    shift = Wp.scale(HBAR * INV_ROOT2M)  # hbar W' / sqrt(2m)

    Q01 = (T(p_over, sigma(1)) + T(W, sigma(2))).scale(HALF)
    Q10 = (T(p_over, alpha(2)) - T(W, alpha(1))).scale(HALF)
    H00 = T(H0, sigma(0)) + T(shift, sigma(3))
    Z11 = (T(H0, alpha(3)) + T(shift, alpha(0))).scale(QI(0, -1))
    A = p_over.scale(QI(0, 1)) + W
    A_dag = p_over.scale(QI(0, -1)) + W
    return SymbolicModel(system, Q01, Q10, H00, Z11, A, A_dag)


# -- verification -----------------------------------------------------------


@dataclass
class Identity:
    name: str
    residual: NCPolynomial

    @property
    def holds(self) -> bool:
        return self.residual.is_zero()

    def to_dict(self) -> dict:
        return {"identity": self.name, "holds": self.holds, "residual": str(self.residual)}


@dataclass
class TheoremReport:
    brackets: list[Identity] = field(default_factory=list)
    hermiticity: list[Identity] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(i.holds for i in self.brackets + self.hermiticity)

    def failures(self) -> list[Identity]:
        return [i for i in self.brackets + self.hermiticity if not i.holds]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "brackets": [i.to_dict() for i in self.brackets],
            "hermiticity": [i.to_dict() for i in self.hermiticity],
        }


def supertranslation_targets(model: SymbolicModel) -> list[tuple[str, str, NCPolynomial]]:
    """(left, right, expected bracket) for every unordered pair of generators."""
    half = HALF
    zero = NCPolynomial.zero(model.system)
    return [
        ("Q01", "Q01", model.H00.scale(half)),
        ("Q10", "Q10", model.H00.scale(half)),
        ("Q10", "Q01", model.Z11.scale(half)),
        ("Q01", "H00", zero),
        ("Q10", "H00", zero),
        ("Q01", "Z11", zero),
        ("Q10", "Z11", zero),
        ("H00", "Z11", zero),
        ("H00", "H00", zero),
        ("Z11", "Z11", zero),
    ]


def verify_supertranslation(model: SymbolicModel | None = None) -> TheoremReport:
    """Reduce each supertranslation bracket minus its target to normal form;
    every residual must be the zero polynomial."""
    model = build_symbolic_model() if model is None else model
    gens = model.generators()
    report = TheoremReport()
    for a, b, target in supertranslation_targets(model):
        resid = g_commutator(gens[a], gens[b]) - target
        rhs = "0" if target.is_zero() else ("H00/2" if a == b else "Z11/2")
        report.brackets.append(Identity(f"[{a},{b}] = {rhs}", resid))
    for name in ("Q01", "Q10", "H00"):
        op = gens[name]
        report.hermiticity.append(Identity(f"{name}^dag = {name}", op.adjoint() - op))
    report.hermiticity.append(Identity("Z11^dag = -Z11", model.Z11.adjoint() + model.Z11))
    return report


@dataclass
class CentralRelationReport:
    residual: NCPolynomial  # H00 alpha3 - i Z11
    literal_residual: NCPolynomial  # H00 alpha3 + i Z11

    @property
    def holds(self) -> bool:
        return self.residual.is_zero()

    @property
    def literal_holds(self) -> bool:
        return self.literal_residual.is_zero()

    def to_dict(self) -> dict:
        return {
            "identity": "H00*alpha3 = i*Z11  (Z11 = -i*H00*alpha3)",
            "holds": self.holds,
            "residual": str(self.residual),
            "sign_flipped_form": {
                "identity": "H00*alpha3 = -i*Z11",
                "holds": self.literal_holds,
                "residual": str(self.literal_residual),
            },
        }


def central_relation(model: SymbolicModel | None = None) -> CentralRelationReport:
    model = build_symbolic_model() if model is None else model
    one = NCPolynomial.from_word(model.system, ())
    a3 = NCPolynomial.tensor(one, alpha(3))
    lhs = model.H00 * a3
    iz = model.Z11.scale(QI(0, 1))
    return CentralRelationReport(lhs - iz, lhs + iz)


def verify_central_relation(model: SymbolicModel | None = None) -> bool:
    """True iff H00 (1 (x) alpha3) and i Z11 agree as exact polynomials."""
    return central_relation(model).holds
