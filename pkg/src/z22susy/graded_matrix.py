"""4x4 matrices carrying Z2^2 degrees: the Sigma and alpha matrices.

Sigma_i is the direct sum sigma_i (+) sigma_i and alpha_i the skew sum
sigma_i (-) sigma_i. All entries are 0, +-1 or +-i, so equality checks
here are exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .exact import exact_rank
from .grading import SECTORS, Degree, bracket_sign, deg_add

_PAULI = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

SIGMA_DEGREES = (Degree.D00, Degree.D01, Degree.D01, Degree.D00)
ALPHA_DEGREES = (Degree.D11, Degree.D10, Degree.D10, Degree.D11)

# degree carried by entry (r, c) of any 4x4 matrix
ENTRY_DEGREE = tuple(tuple(deg_add(SECTORS[r], SECTORS[c]) for c in range(4)) for r in range(4))


def _mask(d: Degree) -> np.ndarray:
    return np.array([[ENTRY_DEGREE[r][c] is d for c in range(4)] for r in range(4)])


_MASKS = {d: _mask(d) for d in Degree}


@dataclass(frozen=True, eq=False)
class GradedMatrix:
    entries: np.ndarray
    degree: Degree | None = None
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex)
        if arr.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    # -- algebra -----------------------------------------------------------
    def __matmul__(self, other: GradedMatrix) -> GradedMatrix:
        deg = None
        if self.degree is not None and other.degree is not None:
            deg = self.degree + other.degree
        return GradedMatrix(self.entries @ other.entries, deg)

    def __add__(self, other: GradedMatrix) -> GradedMatrix:
        deg = self.degree if self.degree is other.degree else None
        out = GradedMatrix(self.entries + other.entries, deg)
        return out if deg is not None else out.with_inferred_degree()

    def __sub__(self, other: GradedMatrix) -> GradedMatrix:
        return self + other.scale(-1)

    def __neg__(self) -> GradedMatrix:
        return self.scale(-1)

    def scale(self, c: complex) -> GradedMatrix:
        return GradedMatrix(c * self.entries, self.degree)

    def __rmul__(self, c: complex) -> GradedMatrix:
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, GradedMatrix):
            return NotImplemented
        return bool(np.array_equal(self.entries, other.entries))

    __hash__ = None

    def dagger(self) -> GradedMatrix:
        return GradedMatrix(self.entries.conj().T, self.degree)

    # -- predicates --------------------------------------------------------
    def is_zero(self) -> bool:
        return not np.any(self.entries)

    def is_hermitian(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.conj().T))

    def is_unitary(self) -> bool:
        return bool(np.array_equal(self.entries @ self.entries.conj().T, np.eye(4)))

    def respects_degree(self, deg: Degree | None = None) -> bool:
        """True iff every nonzero entry sits in a block of degree ``deg``."""
        deg = self.degree if deg is None else deg
        if deg is None:
            return False
        return not np.any(self.entries[~_MASKS[deg]])

    def homogeneous_parts(self) -> dict[Degree, GradedMatrix]:
        parts = {}
        for d in Degree:
            block = np.where(_MASKS[d], self.entries, 0)
            if np.any(block):
                parts[d] = GradedMatrix(block, d)
        return parts

    def with_inferred_degree(self) -> GradedMatrix:
        parts = self.homogeneous_parts()
        if len(parts) == 1:
            (d,) = parts
            return GradedMatrix(self.entries, d, self.label)
        return GradedMatrix(self.entries, None, self.label)

    def to_list(self) -> list[list[list[float]]]:
        return [[[float(z.real), float(z.imag)] for z in row] for row in self.entries]

    def __repr__(self):
        name = self.label or "GradedMatrix"
        return f"{name}[{self.degree}]" if self.degree else f"{name}[inhomogeneous]"


def pauli(i: int) -> np.ndarray:
    if i not in range(4):
        raise IndexError(f"Pauli index must be 0..3, got {i}")
    return _PAULI[i].copy()


def direct_sum(a, b) -> GradedMatrix:
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = a
    out[2:, 2:] = b
    return GradedMatrix(out).with_inferred_degree()


def skew_sum(a, b) -> GradedMatrix:
    out = np.zeros((4, 4), dtype=complex)
    out[:2, 2:] = a
    out[2:, :2] = b
    return GradedMatrix(out).with_inferred_degree()


def sigma(i: int) -> GradedMatrix:
    p = pauli(i)
    return GradedMatrix(direct_sum(p, p).entries, SIGMA_DEGREES[i], f"Sigma{i}")


def alpha(i: int) -> GradedMatrix:
    p = pauli(i)
    return GradedMatrix(skew_sum(p, p).entries, ALPHA_DEGREES[i], f"alpha{i}")


def standard_basis() -> dict[str, GradedMatrix]:
    """Sigma0..Sigma3, alpha0..alpha3 keyed by label."""
    mats = [sigma(i) for i in range(4)] + [alpha(i) for i in range(4)]
    return {m.label: m for m in mats}


def parity_matrices() -> tuple[GradedMatrix, GradedMatrix]:
    """K1 = sigma0 (+) (-sigma0), K2 = sigma3 (+) sigma3, both of degree 00."""
    k1 = direct_sum(pauli(0), -pauli(0))
    k2 = direct_sum(pauli(3), pauli(3))
    return (
        GradedMatrix(k1.entries, Degree.D00, "K1"),
        GradedMatrix(k2.entries, Degree.D00, "K2"),
    )


def graded_commutator(x: GradedMatrix, y: GradedMatrix) -> GradedMatrix:
    """X Y - (-1)^<deg X, deg Y> Y X, extended to inhomogeneous inputs by linearity."""
    if x.degree is None or y.degree is None:
        xs = x.homogeneous_parts().values() if x.degree is None else [x]
        ys = y.homogeneous_parts().values() if y.degree is None else [y]
        total = np.zeros((4, 4), dtype=complex)
        for a, b in itertools.product(xs, ys):
            total = total + graded_commutator(a, b).entries
        return GradedMatrix(total).with_inferred_degree()
    sign = bracket_sign(x.degree, y.degree)
    out = x.entries @ y.entries - sign * (y.entries @ x.entries)
    return GradedMatrix(out, x.degree + y.degree)


def plain_bracket(a: np.ndarray, b: np.ndarray, sign: int) -> np.ndarray:
    """[A, B]_-+ = AB - sign*BA (sign=+1 commutator, -1 anticommutator)."""
    return a @ b - sign * (b @ a)


# -- Z2^2-Lie algebra axioms ---------------------------------------------------


@dataclass
class AxiomReport:
    labels: list[str]
    degree_additivity: list[tuple] = field(default_factory=list)
    antisymmetry: list[tuple] = field(default_factory=list)
    jacobi: list[tuple] = field(default_factory=list)
    closure: list[tuple] = field(default_factory=list)
    pairs_checked: int = 0
    triples_checked: int = 0

    @property
    def passed(self) -> bool:
        return not (self.degree_additivity or self.antisymmetry or self.jacobi or self.closure)

    def to_dict(self) -> dict:
        def dump(failures):
            return [
                {"elements": list(f[0]), "residual": f[1].to_list() if f[1] is not None else None}
                for f in failures
            ]

        return {
            "basis": self.labels,
            "passed": self.passed,
            "pairs_checked": self.pairs_checked,
            "triples_checked": self.triples_checked,
            "axioms": {
                name: {"passed": not fails, "failures": dump(fails)}
                for name, fails in [
                    ("degree_additivity", self.degree_additivity),
                    ("graded_antisymmetry", self.antisymmetry),
                    ("jacobi", self.jacobi),
                    ("closure", self.closure),
                ]
            },
        }


def _flat(m: GradedMatrix) -> list[complex]:
    return [complex(z) for z in m.entries.ravel()]


def verify_z22_lie(basis: list[GradedMatrix]) -> AxiomReport:
    """Check degree additivity, graded antisymmetry, the Loday-Leibniz form of
    the Jacobi identity and closure on every pair/triple of ``basis``."""
    for m in basis:
        if m.degree is None or not m.respects_degree():
            raise ValueError(f"basis element {m!r} is not homogeneous")
    rows = [_flat(m) for m in basis]
    rank = exact_rank(rows)
    if rank != len(basis):
        raise ValueError("basis elements are linearly dependent")

    labels = [m.label or f"b{k}" for k, m in enumerate(basis)]
    report = AxiomReport(labels)
    n = len(basis)
    brackets = {}
    for i, j in itertools.product(range(n), repeat=2):
        a, b = basis[i], basis[j]
        ab = graded_commutator(a, b)
        brackets[i, j] = ab
        report.pairs_checked += 1
        if not ab.respects_degree(a.degree + b.degree):
            report.degree_additivity.append(((labels[i], labels[j]), ab))
        ba = graded_commutator(b, a)
        resid = ab.entries + bracket_sign(a.degree, b.degree) * ba.entries
        if np.any(resid):
            report.antisymmetry.append(((labels[i], labels[j]), GradedMatrix(resid)))
        if not ab.is_zero() and exact_rank(rows + [_flat(ab)]) != rank:
            report.closure.append(((labels[i], labels[j]), ab))

    for i, j, k in itertools.product(range(n), repeat=3):
        a, b, c = basis[i], basis[j], basis[k]
        lhs = graded_commutator(a, brackets[j, k])
        rhs1 = graded_commutator(brackets[i, j], c)
        rhs2 = graded_commutator(b, brackets[i, k])
        resid = lhs.entries - rhs1.entries - bracket_sign(a.degree, b.degree) * rhs2.entries
        report.triples_checked += 1
        if np.any(resid):
            report.jacobi.append(((labels[i], labels[j], labels[k]), GradedMatrix(resid)))
    return report


# -- the bracket table -------------------------------------------------------

# (left, right) -> (coefficient, result label); all brackets displayed as non-vanishing
LISTED_BRACKETS: dict[tuple[str, str], tuple[complex, str]] = {
    ("Sigma1", "Sigma1"): (2, "Sigma0"),
    ("Sigma1", "Sigma3"): (-2j, "Sigma2"),
    ("Sigma2", "Sigma2"): (2, "Sigma0"),
    ("Sigma2", "Sigma3"): (2j, "Sigma1"),
    ("alpha0", "alpha1"): (2, "Sigma1"),
    ("alpha0", "alpha2"): (2, "Sigma2"),
    ("alpha1", "alpha1"): (2, "Sigma0"),
    ("alpha2", "alpha2"): (2, "Sigma0"),
    ("Sigma1", "alpha0"): (2, "alpha1"),
    ("Sigma1", "alpha2"): (2j, "alpha3"),
    ("Sigma2", "alpha0"): (2, "alpha2"),
    ("Sigma2", "alpha1"): (-2j, "alpha3"),
}


@dataclass
class BracketTableReport:
    entries: dict[tuple[str, str], GradedMatrix]
    mismatches: list[tuple[str, str]]
    derived_identity_failures: list[str]
    # non-vanishing unordered brackets found by enumeration but absent from the table
    unlisted_nonvanishing: dict[tuple[str, str], GradedMatrix]

    @property
    def passed(self) -> bool:
        return not self.mismatches and not self.derived_identity_failures

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "entries": {f"[{a},{b}]": m.to_list() for (a, b), m in self.entries.items()},
            "mismatches": [list(p) for p in self.mismatches],
            "derived_identity_failures": self.derived_identity_failures,
            "unlisted_nonvanishing": {
                f"[{a},{b}]": m.to_list() for (a, b), m in self.unlisted_nonvanishing.items()
            },
        }


def bracket_table(basis: dict[str, GradedMatrix] | None = None) -> BracketTableReport:
    """Recompute every listed bracket and compare it to the expected table.

    ``basis`` defaults to :func:`standard_basis`; passing a modified basis is how
    faults are injected in tests.
    """
    basis = standard_basis() if basis is None else basis
    reference = standard_basis()
    entries = {}
    mismatches = []
    for (a, b), (coef, target) in LISTED_BRACKETS.items():
        got = graded_commutator(basis[a], basis[b])
        expected = reference[target].scale(coef)
        # brute-force route: raw products with the sign worked out by hand
        sign = bracket_sign(basis[a].degree, basis[b].degree)
        raw = basis[a].entries @ basis[b].entries - sign * (basis[b].entries @ basis[a].entries)
        entries[a, b] = got
        if got != expected or not np.array_equal(raw, expected.entries):
            mismatches.append((a, b))

    failures = []
    for i, j in itertools.product(range(4), repeat=2):
        for s in (1, -1):
            ps = plain_bracket(pauli(i), pauli(j), s)
            want_direct = direct_sum(ps, ps).entries
            want_skew = skew_sum(ps, ps).entries
            si, sj = basis[f"Sigma{i}"].entries, basis[f"Sigma{j}"].entries
            ai, aj = basis[f"alpha{i}"].entries, basis[f"alpha{j}"].entries
            op = "-" if s == 1 else "+"
            if not np.array_equal(plain_bracket(si, sj, s), want_direct):
                failures.append(f"[Sigma{i},Sigma{j}]{op}")
            if not np.array_equal(plain_bracket(ai, aj, s), want_direct):
                failures.append(f"[alpha{i},alpha{j}]{op}")
            if not np.array_equal(plain_bracket(si, aj, s), want_skew):
                failures.append(f"[Sigma{i},alpha{j}]{op}")

    listed = {frozenset(p) for p in LISTED_BRACKETS}
    unlisted = {}
    names = list(basis)
    for ia, a in enumerate(names):
        for b in names[ia:]:
            if frozenset((a, b)) in listed:
                continue
            m = graded_commutator(basis[a], basis[b])
            if not m.is_zero():
                unlisted[a, b] = m
    return BracketTableReport(entries, mismatches, failures, unlisted)
