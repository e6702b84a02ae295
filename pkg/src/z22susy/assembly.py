"""Finite-difference assembly of the model operators on L^2(grid) (x) C^4.

Grid functions live on the ``n_points`` nodes of a uniform grid including
both end points; values outside the grid are taken to be zero (Dirichlet
closure). 4N vectors are laid out sector-major in the order 00, 01, 11, 10.

* p = -i hbar D with D the antisymmetric central difference.
* p^2 = -hbar^2 L with L the 3-point Laplacian (not D^2).
* A = i p / sqrt(2m) + W = (hbar / sqrt(2m)) D + W, so A^dag = A^T.

H_+ and H_- are assembled directly as p^2/2m + W^2 +- hbar W'/sqrt(2m)
("direct" form, the canonical one for spectra) and as the products A A^dag,
A^dag A ("product" form). The two differ at O(h^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.io
import scipy.sparse as sp

from .graded_matrix import ENTRY_DEGREE
from .grading import SECTORS, Degree, bracket_sign
from .potential import PotentialExpr

FORMS = ("direct", "product")


@dataclass(frozen=True)
class GridSpec:
    x_min: float = -12.0
    x_max: float = 12.0
    n_points: int = 2048

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise ValueError(f"need x_min < x_max, got {self.x_min} >= {self.x_max}")
        if int(self.n_points) != self.n_points or self.n_points < 16:
            raise ValueError(f"n_points must be an integer >= 16, got {self.n_points}")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def refined(self) -> GridSpec:
        return GridSpec(self.x_min, self.x_max, 2 * self.n_points)

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "n_points": self.n_points, "h": self.h}


@dataclass(frozen=True)
class Units:
    hbar: float = 1.0
    m: float = 1.0

    @classmethod
    def from_params(cls, params: dict[str, float]) -> Units:
        return cls(params.get("hbar", 1.0), params.get("m", 1.0))

    @property
    def root2m(self) -> float:
        return math.sqrt(2.0 * self.m)


@dataclass(eq=False)
class GridOperator:
    matrix: sp.csr_matrix
    n_grid: int
    name: str = ""
    hermitian: bool = False
    antihermitian: bool = False
    degree: Degree | None = None
    # real symmetric tridiagonal (diag, offdiag) when the operator is one
    tridiagonal: tuple[np.ndarray, np.ndarray] | None = None
    # four N x N diagonal blocks when the 4N operator is block diagonal
    diagonal_blocks: tuple[GridOperator, ...] | None = None

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        if isinstance(other, GridOperator):
            return self.matrix @ other.matrix
        return self.matrix @ other

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def hermiticity_defect(self) -> float:
        d = self.matrix - self.matrix.conj().T
        return float(abs(d).max()) if d.nnz else 0.0

    def antihermiticity_defect(self) -> float:
        d = self.matrix + self.matrix.conj().T
        return float(abs(d).max()) if d.nnz else 0.0

    def respects_degree(self) -> bool:
        """Nonzero N x N blocks only where sector(r) + sector(c) = degree."""
        if self.degree is None or self.dim != 4 * self.n_grid:
            return False
        n = self.n_grid
        coo = self.matrix.tocoo()
        nz = coo.data != 0
        rs, cs = coo.row[nz] // n, coo.col[nz] // n
        return all(ENTRY_DEGREE[r][c] is self.degree for r, c in set(zip(rs.tolist(), cs.tolist())))

    def block(self, r: int, c: int) -> sp.csr_matrix:
        n = self.n_grid
        return self.matrix[r * n : (r + 1) * n, c * n : (c + 1) * n]


# -- elementary operators ------------------------------------------------------


def difference_matrix(grid: GridSpec) -> sp.csr_matrix:
    """Central difference D, D[i,i+1] = 1/2h, D[i,i-1] = -1/2h."""
    n, h = grid.n_points, grid.h
    off = np.full(n - 1, 1.0 / (2.0 * h))
    return sp.diags([-off, off], [-1, 1], format="csr")


def laplacian_tridiagonal(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    n, h = grid.n_points, grid.h
    return np.full(n, -2.0 / h**2), np.full(n - 1, 1.0 / h**2)


def momentum_matrix(grid: GridSpec, params: dict[str, float] | None = None) -> GridOperator:
    units = Units.from_params(params or {})
    p = (-1j * units.hbar) * difference_matrix(grid).astype(complex)
    return GridOperator(p.tocsr(), grid.n_points, "p", hermitian=True, degree=Degree.D00)


def _tridiag_operator(diag, off, n, name) -> GridOperator:
    mat = sp.diags([off, diag, off], [-1, 0, 1], format="csr", dtype=float)
    return GridOperator(
        mat.astype(complex), n, name, hermitian=True, degree=Degree.D00, tridiagonal=(diag, off)
    )


def _hermitian_part(mat) -> sp.csr_matrix:
    mat = sp.csr_matrix(mat)
    return ((mat + mat.conj().T) * 0.5).tocsr()


# -- ladder -------------------------------------------------------------------------


@dataclass(eq=False)
class Ladder:
    grid: GridSpec
    units: Units
    W: np.ndarray
    Wp: np.ndarray
    A: GridOperator
    A_dag: GridOperator
    H_plus: GridOperator  # direct form
    H_minus: GridOperator
    H_plus_product: GridOperator
    H_minus_product: GridOperator

    def H(self, form: str = "direct") -> tuple[GridOperator, GridOperator]:
        if form == "direct":
            return self.H_plus, self.H_minus
        if form == "product":
            return self.H_plus_product, self.H_minus_product
        raise ValueError(f"unknown form {form!r}; expected one of {FORMS}")

    def product_residual(self, probes: np.ndarray | None = None) -> dict[str, float]:
        """Interior max-norm of (A A^dag - H_+) f and (A^dag A - H_-) f on probes."""
        probes = probe_functions(self.grid) if probes is None else probes
        out = {}
        for name, prod, direct in (
            ("AAdag-H+", self.H_plus_product, self.H_plus),
            ("AdagA-H-", self.H_minus_product, self.H_minus),
        ):
            out[name] = interior_max(self.grid, (prod.matrix - direct.matrix) @ probes)
        return out


def build_ladder(W: PotentialExpr, grid: GridSpec, params: dict[str, float] | None = None) -> Ladder:
    params = W.params if params is None else {**W.params, **params}
    units = Units.from_params(params)
    x = grid.x
    Wx = W.with_params(**params).eval_grid(x)
    Wpx = W.with_params(**params).differentiate().eval_grid(x)
    n = grid.n_points
    kin = units.hbar / units.root2m
    a = (kin * difference_matrix(grid) + sp.diags(Wx)).tocsr()
    a_dag = a.T.tocsr()
    lap_d, lap_o = laplacian_tridiagonal(grid)
    c2 = -units.hbar**2 / (2.0 * units.m)
    base_d = c2 * lap_d + Wx**2
    base_o = c2 * lap_o
    shift = kin * Wpx
    h_plus = _tridiag_operator(base_d + shift, base_o, n, "H+")
    h_minus = _tridiag_operator(base_d - shift, base_o, n, "H-")
    hp_prod = GridOperator(
        _hermitian_part(a @ a_dag).astype(complex), n, "AAdag", hermitian=True, degree=Degree.D00
    )
    hm_prod = GridOperator(
        _hermitian_part(a_dag @ a).astype(complex), n, "AdagA", hermitian=True, degree=Degree.D00
    )
    return Ladder(
        grid,
        units,
        Wx,
        Wpx,
        GridOperator(a.astype(complex), n, "A"),
        GridOperator(a_dag.astype(complex), n, "Adag"),
        h_plus,
        h_minus,
        hp_prod,
        hm_prod,
    )


# -- 4N model ---------------------------------------------------------------------------


def _bmat(blocks, n):
    grid = [[blocks.get((r, c)) for c in range(4)] for r in range(4)]
    for r in range(4):
        if grid[r][r] is None:
            grid[r][r] = sp.csr_matrix((n, n), dtype=complex)
    return sp.bmat(grid, format="csr", dtype=complex)


@dataclass(eq=False)
class GridModel:
    grid: GridSpec
    ladder: Ladder
    form: str
    Q01: GridOperator
    Q10: GridOperator
    H00: GridOperator
    Z11: GridOperator
    K1: GridOperator
    K2: GridOperator

    def generators(self) -> dict[str, GridOperator]:
        return {"Q01": self.Q01, "Q10": self.Q10, "H00": self.H00, "Z11": self.Z11}


def build_model(
    W: PotentialExpr,
    grid: GridSpec,
    params: dict[str, float] | None = None,
    form: str = "direct",
    ladder: Ladder | None = None,
) -> GridModel:
    """Assemble Q01, Q10, H00, Z11 (and K1, K2) from the ladder blocks."""
    lad = build_ladder(W, grid, params) if ladder is None else ladder
    hp, hm = lad.H(form)
    n = grid.n_points
    A, Ad = lad.A.matrix, lad.A_dag.matrix

    # Q01 = (i/2) [[0,-A],[A^dag,0]] (+) same; the lower blocks are the adjoints
    up = -0.5j * A
    q01 = _bmat({(0, 1): up, (1, 0): up.conj().T, (2, 3): up, (3, 2): up.conj().T}, n)
    # Q10 = -(1/2) skew([[0,A],[A^dag,0]])
    a_half, ad_half = -0.5 * A, -0.5 * Ad
    q10 = _bmat({(0, 3): a_half, (3, 0): ad_half, (1, 2): ad_half, (2, 1): a_half}, n)
    h00 = _bmat({(0, 0): hp.matrix, (1, 1): hm.matrix, (2, 2): hp.matrix, (3, 3): hm.matrix}, n)
    z11 = _bmat(
        {
            (0, 2): -1j * hp.matrix,
            (2, 0): -1j * hp.matrix,
            (1, 3): 1j * hm.matrix,
            (3, 1): 1j * hm.matrix,
        },
        n,
    )
    k1, k2 = parity_operators(grid)
    return GridModel(
        grid,
        lad,
        form,
        GridOperator(q01, n, "Q01", hermitian=True, degree=Degree.D01),
        GridOperator(q10, n, "Q10", hermitian=True, degree=Degree.D10),
        GridOperator(h00, n, "H00", hermitian=True, degree=Degree.D00, diagonal_blocks=(hp, hm, hp, hm)),
        GridOperator(z11, n, "Z11", antihermitian=True, degree=Degree.D11),
        k1,
        k2,
    )


def alpha3_grid(grid: GridSpec) -> GridOperator:
    """I_N (x) alpha3."""
    n = grid.n_points
    eye = sp.identity(n, dtype=complex, format="csr")
    mat = _bmat({(0, 2): eye, (2, 0): eye, (1, 3): -eye, (3, 1): -eye}, n)
    return GridOperator(mat, n, "alpha3", hermitian=True, degree=Degree.D11)


def parity_operators(grid: GridSpec) -> tuple[GridOperator, GridOperator]:
    """K1 = diag(+,+,-,-), K2 = diag(+,-,-,+) over sectors, tensored with I_N."""
    n = grid.n_points
    out = []
    for name, bit in (("K1", 0), ("K2", 1)):
        signs = np.repeat([(-1.0) ** d.value[bit] for d in SECTORS], n)
        out.append(
            GridOperator(sp.diags(signs.astype(complex), format="csr"), n, name, hermitian=True, degree=Degree.D00)
        )
    return tuple(out)


# -- residuals and convergence ----------------------------------------------------------


def probe_functions(grid: GridSpec) -> np.ndarray:
    """Smooth, asymmetric, well-localized test functions (columns)."""
    x = grid.x
    L = grid.x_max - grid.x_min
    s = L / 24.0
    c = 0.5 * (grid.x_min + grid.x_max) + 0.3 * s
    t = (x - c) / s
    f = np.exp(-0.5 * t**2) * (1.0 + 0.3 * t)
    g = np.exp(-0.5 * (t - 0.5) ** 2) * t
    return np.column_stack([f, g]).astype(complex)


def sector_probes(grid: GridSpec) -> np.ndarray:
    """Probe functions placed in each of the four sectors (4N x 8)."""
    base = probe_functions(grid)
    n, k = base.shape
    out = np.zeros((4 * n, 4 * k), dtype=complex)
    for s in range(4):
        out[s * n : (s + 1) * n, s * k : (s + 1) * k] = base
    return out


def interior_max(grid: GridSpec, values: np.ndarray, margin: int = 2) -> float:
    """max |values| over rows whose grid node is at least ``margin`` from an end."""
    n = grid.n_points
    v = np.asarray(values)
    rows = v.shape[0]
    idx = np.arange(rows) % n
    keep = (idx >= margin) & (idx < n - margin)
    return float(np.abs(v[keep]).max()) if np.any(keep) else 0.0


def graded_apply(x: GridOperator, y: GridOperator, v: np.ndarray) -> np.ndarray:
    """[X, Y] v for homogeneous X, Y, without forming the product."""
    sign = bracket_sign(x.degree, y.degree)
    return x.matrix @ (y.matrix @ v) - sign * (y.matrix @ (x.matrix @ v))


SUPERTRANSLATION_RELATIONS = (
    ("Q01", "Q01", "H00", 0.5),
    ("Q10", "Q10", "H00", 0.5),
    ("Q10", "Q01", "Z11", 0.5),
    ("Q01", "H00", None, 0.0),
    ("Q10", "H00", None, 0.0),
    ("Q01", "Z11", None, 0.0),
    ("Q10", "Z11", None, 0.0),
    ("H00", "Z11", None, 0.0),
)

# (name, parity, operator, sign): K X = sign * X K
PARITY_INTERTWINING = (
    ("K1 Q01 = +Q01 K1", "K1", "Q01", 1),
    ("K2 Q01 = -Q01 K2", "K2", "Q01", -1),
    ("K1 Q10 = -Q10 K1", "K1", "Q10", -1),
    ("K2 Q10 = +Q10 K2", "K2", "Q10", 1),
    ("K1 Z11 = -Z11 K1", "K1", "Z11", -1),
    ("K2 Z11 = -Z11 K2", "K2", "Z11", -1),
    ("[K1,H00] = 0", "K1", "H00", 1),
    ("[K2,H00] = 0", "K2", "H00", 1),
)


def supertranslation_residuals(model: GridModel, probes: np.ndarray | None = None) -> dict[str, float]:
    probes = sector_probes(model.grid) if probes is None else probes
    gens = model.generators()
    out = {}
    for a, b, target, c in SUPERTRANSLATION_RELATIONS:
        r = graded_apply(gens[a], gens[b], probes)
        label = f"[{a},{b}]"
        if target is not None:
            r = r - c * (gens[target].matrix @ probes)
            label += f" - {target}/2"
        out[label] = interior_max(model.grid, r)
    return out


def _max_abs(mat) -> float:
    mat = sp.csr_matrix(mat)
    mat.eliminate_zeros()
    return float(abs(mat).max()) if mat.nnz else 0.0


def parity_residuals(model: GridModel) -> dict[str, float]:
    """Exact (whole-operator, max-norm) residuals of the parity relations."""
    ops = {**model.generators(), "K1": model.K1, "K2": model.K2}
    out = {}
    for name, k, x, sign in PARITY_INTERTWINING:
        K, X = ops[k].matrix, ops[x].matrix
        out[name] = _max_abs(K @ X - sign * (X @ K))
    eye = sp.identity(model.K1.dim, dtype=complex, format="csr")
    out["[K1,K2] = 0"] = _max_abs(model.K1.matrix @ model.K2.matrix - model.K2.matrix @ model.K1.matrix)
    out["K1^2 = 1"] = _max_abs(model.K1.matrix @ model.K1.matrix - eye)
    out["K2^2 = 1"] = _max_abs(model.K2.matrix @ model.K2.matrix - eye)
    return out


def central_relation_residual(model: GridModel, sign: int = -1) -> float:
    """max |H00 (I (x) alpha3) + sign * i Z11| over all entries.

    sign=-1 is the form consistent with Z11 = -i (H0 (x) alpha3 + ...);
    sign=+1 is the sign-flipped variant.
    """
    a3 = alpha3_grid(model.grid)
    return _max_abs(model.H00.matrix @ a3.matrix + sign * 1j * model.Z11.matrix)


@dataclass
class ConvergenceReport:
    grids: list[GridSpec]
    form: str
    residuals: dict[str, list[float]]
    parity: list[dict[str, float]]
    orders: dict[str, list[float | None]] = field(default_factory=dict)
    fitted_order: dict[str, float | None] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "form": self.form,
            "grids": [g.to_dict() for g in self.grids],
            "residuals": self.residuals,
            "pairwise_orders": self.orders,
            "fitted_order": self.fitted_order,
            "parity": self.parity,
        }


def _orders(hs, rs, floor):
    pair = []
    for (h0, r0), (h1, r1) in zip(zip(hs, rs), zip(hs[1:], rs[1:])):
        if r0 <= floor or r1 <= floor:
            pair.append(None)
        else:
            pair.append(math.log(r0 / r1) / math.log(h0 / h1))
    if any(r <= floor for r in rs):
        return pair, None
    slope = float(np.polyfit(np.log(hs), np.log(rs), 1)[0])
    return pair, slope


def residual_report(
    W: PotentialExpr,
    grids: list[GridSpec],
    params: dict[str, float] | None = None,
    form: str = "direct",
    floor: float = 1e-11,
) -> ConvergenceReport:
    """Interior residuals of the graded algebra and of the product/direct
    Hamiltonians on a sequence of nested grids, with empirical orders.

    Residuals at or below ``floor`` (relative to the probe-scaled operator size)
    are treated as exact and get no order.
    """
    if len(grids) < 2:
        raise ValueError("need at least two grids")
    for g0, g1 in zip(grids, grids[1:]):
        if (g0.x_min, g0.x_max) != (g1.x_min, g1.x_max) or g1.n_points != 2 * g0.n_points:
            raise ValueError("grid sequence must share bounds and double n_points each step")
    residuals: dict[str, list[float]] = {}
    parity = []
    scales = []
    for g in grids:
        model = build_model(W, g, params, form)
        res = supertranslation_residuals(model)
        res.update(model.ladder.product_residual())
        for k, v in res.items():
            residuals.setdefault(k, []).append(v)
        parity.append(parity_residuals(model))
        scales.append(max(1.0, float(np.abs(model.H00.matrix @ sector_probes(g)).max())))
    report = ConvergenceReport(list(grids), form, residuals, parity)
    hs = [g.h for g in grids]
    for k, rs in residuals.items():
        pair, slope = _orders(hs, rs, floor * max(scales))
        report.orders[k] = pair
        report.fitted_order[k] = slope
    return report


# -- export -----------------------------------------------------------------------------


def export_binary(op: GridOperator, path) -> None:
    """Dense matrix as row-major (re, im) pairs of little-endian float64; no header."""
    dense = np.ascontiguousarray(op.dense(), dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(dense.view("<f8").tobytes())


def read_binary(path) -> np.ndarray:
    raw = np.fromfile(path, dtype="<f8")
    n = math.isqrt(raw.size // 2)
    if n * n * 2 != raw.size:
        raise ValueError(f"{path}: size {raw.size} is not 2*n^2 doubles")
    return raw.view("<c16").reshape(n, n)


def export_matrix_market(op: GridOperator, path) -> None:
    scipy.io.mmwrite(str(path), op.matrix, comment=f"{op.name} degree={op.degree}")
