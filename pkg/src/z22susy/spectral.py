"""Eigensolves, level clustering, positivity, multiplets and zero modes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla
from scipy.integrate import cumulative_trapezoid

from .assembly import GridModel, GridOperator, GridSpec, Units, build_ladder
from .grading import SECTORS, Degree, deg_add, sector_index
from .potential import PotentialExpr


class SpectralError(RuntimeError):
    pass


class ConvergenceFailure(SpectralError):
    pass


# -- eigensolve ---------------------------------------------------------------


@dataclass
class Eigenpairs:
    values: np.ndarray
    vectors: np.ndarray  # columns, h-weighted orthonormal
    h: float
    sectors: list[Degree] | None = None
    residuals: np.ndarray | None = None

    def __len__(self):
        return len(self.values)


def fix_sign(v: np.ndarray, rel: float = 1e-12) -> np.ndarray:
    """Make the first non-negligible component real and positive."""
    mag = np.abs(v)
    idx = np.flatnonzero(mag > rel * mag.max())
    if idx.size == 0:
        return v
    z = v[idx[0]]
    return v * (abs(z) / z)


def _tridiagonal_solve(op: GridOperator, k: int, h: float):
    d, e = op.tridiagonal
    k = min(k, len(d))
    vals, vecs = sla.eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1))
    return vals, vecs


def _bandwidth(op: GridOperator) -> int:
    coo = op.matrix.tocoo()
    return int(np.abs(coo.row - coo.col).max()) if coo.nnz else 0


def _lower_bands(op: GridOperator, band: int) -> np.ndarray:
    """Lower banded storage as expected by ``scipy.linalg.eig_banded``."""
    n = op.dim
    ab = np.zeros((band + 1, n), dtype=op.matrix.dtype)
    for d in range(band + 1):
        ab[d, : n - d] = op.matrix.diagonal(-d)
    if not np.iscomplexobj(ab) or not np.any(ab.imag):
        ab = ab.real
    return ab


def eigensolve(op: GridOperator, k: int, h: float | None = None, check: bool = True) -> Eigenpairs:
    """k lowest eigenpairs of a Hermitian grid operator.

    Tridiagonal N x N operators go to LAPACK's tridiagonal solver; block
    diagonal 4N operators are solved block by block and merged (ascending
    energy, ties broken by sector order).
    """
    if not op.hermitian or op.hermiticity_defect() != 0.0:
        raise SpectralError(f"{op.name or 'operator'} is not Hermitian")
    if k < 1 or k > op.dim:
        raise ValueError(f"k must be in 1..{op.dim}, got {k}")
    n = op.n_grid
    h = 1.0 if h is None else h
    if op.diagonal_blocks is not None:
        solved: dict[int, tuple] = {}
        entries = []
        for s, blk in enumerate(op.diagonal_blocks):
            key = id(blk)
            if key not in solved:
                solved[key] = eigensolve(blk, min(k, n), h, check=False)
            sub = solved[key]
            for j, val in enumerate(sub.values):
                entries.append((float(val), s, j, key))
        entries.sort(key=lambda t: (t[0], t[1], t[2]))
        entries = entries[:k]
        vals = np.array([t[0] for t in entries])
        vecs = np.zeros((op.dim, len(entries)), dtype=complex)
        for col, (_, s, j, key) in enumerate(entries):
            vecs[s * n : (s + 1) * n, col] = solved[key].vectors[:, j]
        pairs = Eigenpairs(vals, vecs, h, [SECTORS[t[1]] for t in entries])
    else:
        if op.tridiagonal is not None:
            vals, vecs = _tridiagonal_solve(op, k, h)
        elif (band := _bandwidth(op)) <= 8:
            vals, vecs = sla.eig_banded(
                _lower_bands(op, band), lower=True, select="i", select_range=(0, k - 1)
            )
        elif op.dim <= 4096:
            vals, vecs = sla.eigh(op.dense(), subset_by_index=(0, k - 1))
        else:
            try:
                vals, vecs = spla.eigsh(op.matrix, k=k, which="SA")
            except spla.ArpackNoConvergence as exc:
                raise ConvergenceFailure(f"ARPACK did not converge: {exc}") from exc
            order = np.argsort(vals)
            vals, vecs = vals[order], vecs[:, order]
        vecs = np.column_stack([fix_sign(vecs[:, j]) for j in range(vecs.shape[1])]) / math.sqrt(h)
        pairs = Eigenpairs(np.asarray(vals, dtype=float), vecs, h)
    if check:
        pairs.residuals = eigen_residuals(op, pairs)
        scale = max(1.0, float(np.abs(pairs.values).max()), _norm_estimate(op))
        bad = np.flatnonzero(pairs.residuals > 1e-10 * scale)
        if bad.size:
            raise ConvergenceFailure(
                f"eigenpair {int(bad[0])} has residual {pairs.residuals[bad[0]]:.3e}"
            )
    return pairs


def _norm_estimate(op: GridOperator) -> float:
    return float(abs(op.matrix).sum(axis=1).max())


def eigen_residuals(op: GridOperator, pairs: Eigenpairs) -> np.ndarray:
    v = pairs.vectors
    r = op.matrix @ v - v * pairs.values
    return np.linalg.norm(r, axis=0) / np.maximum(np.linalg.norm(v, axis=0), 1e-300)


# -- clustering ----------------------------------------------------------------------


def default_tolerance(h: float, scale: float) -> float:
    return max(1e-6, 50.0 * h * h * abs(scale))


@dataclass
class Level:
    energy: float
    degeneracy: int
    sectors: list[Degree]
    indices: list[int]
    spread: float
    resolved: bool = True
    truncated: bool = False

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "degeneracy": self.degeneracy,
            "sectors": [str(s) for s in self.sectors],
            "spread": self.spread,
            "resolved": self.resolved,
            "truncated": self.truncated,
        }


@dataclass
class SpectrumReport:
    levels: list[Level]
    tolerance: float
    eigenvalues: np.ndarray
    sectors: list[Degree] | None = None
    grid: GridSpec | None = None
    pairs: Eigenpairs | None = field(default=None, repr=False)

    @property
    def degeneracies(self) -> list[int]:
        return [lv.degeneracy for lv in self.levels]

    @property
    def energies(self) -> list[float]:
        return [lv.energy for lv in self.levels]

    def complete_levels(self) -> list[Level]:
        return [lv for lv in self.levels if not lv.truncated]

    def to_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "grid": self.grid.to_dict() if self.grid else None,
            "n_eigenpairs": int(len(self.eigenvalues)),
            "levels": [lv.to_dict() for lv in self.levels],
        }

    def csv_rows(self) -> list[list]:
        rows = [["index", "energy", "level", "sector"]]
        level_of = {}
        for li, lv in enumerate(self.levels):
            for i in lv.indices:
                level_of[i] = li
        for i, e in enumerate(self.eigenvalues):
            sec = str(self.sectors[i]) if self.sectors else ""
            rows.append([i, repr(float(e)), level_of[i], sec])
        return rows


def cluster_levels(
    eigenvalues,
    tol: float,
    sectors: list[Degree] | None = None,
    next_eigenvalue: float | None = None,
) -> SpectrumReport:
    """Greedy clustering in ascending order: a value joins the running level
    while it is within ``tol`` of that level's minimum."""
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    vals = np.asarray(eigenvalues, dtype=float)
    order = np.argsort(vals, kind="stable")
    groups: list[list[int]] = []
    for i in order:
        if groups and vals[i] - vals[groups[-1][0]] <= tol:
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
    levels = []
    for g in groups:
        e = vals[g]
        levels.append(
            Level(
                float(e.mean()),
                len(g),
                [sectors[i] for i in g] if sectors else [],
                g,
                float(e.max() - e.min()),
            )
        )
    for li, lv in enumerate(levels):
        lo = vals[lv.indices].min()
        hi = vals[lv.indices].max()
        gaps = []
        if li > 0:
            gaps.append(lo - vals[levels[li - 1].indices].max())
        if li + 1 < len(levels):
            gaps.append(vals[levels[li + 1].indices].min() - hi)
        elif next_eigenvalue is not None:
            gaps.append(next_eigenvalue - hi)
            if next_eigenvalue - lo <= tol:
                lv.truncated = True
        lv.resolved = all(gp >= 10 * tol for gp in gaps)
    return SpectrumReport(levels, tol, vals, sectors)


def spectrum(model: GridModel, n_eigen: int, tol: float | None = None) -> SpectrumReport:
    """Lowest ``n_eigen`` eigenpairs of H00, clustered."""
    pairs = eigensolve(model.H00, n_eigen + 1, model.grid.h)
    nxt = float(pairs.values[-1]) if len(pairs) > n_eigen else None
    vals = pairs.values[:n_eigen]
    if tol is None:
        tol = default_tolerance(model.grid.h, float(np.abs(vals).max()))
    report = cluster_levels(vals, tol, pairs.sectors[:n_eigen], next_eigenvalue=nxt)
    report.grid = model.grid
    report.pairs = Eigenpairs(vals, pairs.vectors[:, :n_eigen], pairs.h, pairs.sectors[:n_eigen], pairs.residuals[:n_eigen])
    return report


# -- positivity ------------------------------------------------------------------------


@dataclass
class PositivityVerdict:
    min_energy: float
    tolerance: float
    samples: list[dict]
    max_relative_error: float

    @property
    def energies_ok(self) -> bool:
        return self.min_energy >= -self.tolerance

    def passed(self, rel_tol: float = 1e-8) -> bool:
        return self.energies_ok and self.max_relative_error <= rel_tol

    def to_dict(self, rel_tol: float = 1e-8) -> dict:
        return {
            "passed": self.passed(rel_tol),
            "min_energy": self.min_energy,
            "tolerance": self.tolerance,
            "max_relative_error": self.max_relative_error,
            "samples": self.samples,
        }


def _product_h00_apply(model: GridModel, v: np.ndarray) -> np.ndarray:
    hp, hm = model.ladder.H("product")
    n = model.grid.n_points
    blocks = (hp, hm, hp, hm)
    out = np.empty_like(v)
    for s in range(4):
        out[s * n : (s + 1) * n] = blocks[s].matrix @ v[s * n : (s + 1) * n]
    return out


def positivity_check(
    report: SpectrumReport,
    model: GridModel,
    tol: float | None = None,
    n_samples: int = 10,
    vectors: np.ndarray | None = None,
) -> PositivityVerdict:
    """min energy >= -tol, and <psi|H00|psi> = 4||Q01 psi||^2 = 4||Q10 psi||^2.

    The expectation identity is tested against the product-form H00, which is
    4 Q^dag Q on the grid by construction; the direct-form expectation is
    reported alongside.
    """
    tol = report.tolerance if tol is None else tol
    vals = report.eigenvalues
    vecs = report.pairs.vectors if vectors is None else vectors
    h = model.grid.h
    m = vecs.shape[1]
    picks = sorted(set(np.linspace(0, m - 1, min(n_samples, m)).round().astype(int).tolist()))
    samples = []
    worst = 0.0
    for j in picks:
        psi = vecs[:, j]
        e_prod = float(np.real(np.vdot(psi, _product_h00_apply(model, psi)))) * h
        e_dir = float(np.real(np.vdot(psi, model.H00.matrix @ psi))) * h
        q01 = 4.0 * float(np.vdot(model.Q01.matrix @ psi, model.Q01.matrix @ psi).real) * h
        q10 = 4.0 * float(np.vdot(model.Q10.matrix @ psi, model.Q10.matrix @ psi).real) * h
        scale = max(abs(e_prod), 1.0)  # near-zero states are compared absolutely
        rel = max(abs(e_prod - q01), abs(e_prod - q10)) / scale
        worst = max(worst, rel)
        samples.append(
            {
                "index": j,
                "expectation_H00": e_prod,
                "expectation_H00_direct": e_dir,
                "four_norm2_Q01": q01,
                "four_norm2_Q10": q10,
                "relative_error": rel,
            }
        )
    return PositivityVerdict(float(np.min(vals)), tol, samples, worst)


# -- multiplets ---------------------------------------------------------------------------


def sector_support(v: np.ndarray, n: int) -> list[Degree]:
    """Sectors in which ``v`` has any nonzero component (exact test)."""
    return [SECTORS[s] for s in range(4) if np.any(v[s * n : (s + 1) * n] != 0)]


def sector_of(v: np.ndarray, n: int) -> Degree:
    sup = sector_support(v, n)
    if len(sup) != 1:
        raise SpectralError(f"vector is not supported in a single sector: {[str(s) for s in sup]}")
    return sup[0]


@dataclass
class Multiplet:
    energy: float
    reference_sector: Degree
    members: dict[str, np.ndarray]  # role -> 4N vector
    member_sectors: dict[str, Degree]
    image_energies: dict[str, float]
    fourth_corner_ratio: complex
    gram_determinant: float
    gram_scale: float
    dimension: int
    pattern: dict[str, float] = field(default_factory=dict)

    @property
    def linearly_dependent_corner(self) -> bool:
        return self.gram_determinant <= 1e-12 * self.gram_scale

    def expected_sectors(self) -> dict[str, Degree]:
        s = self.reference_sector
        return {
            "reference": s,
            "Q01": deg_add(s, Degree.D01),
            "Q10": deg_add(s, Degree.D10),
            "Q10Q01": deg_add(s, Degree.D11),
        }

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "reference_sector": str(self.reference_sector),
            "member_sectors": {k: str(v) for k, v in self.member_sectors.items()},
            "image_energies": self.image_energies,
            "fourth_corner_ratio": [self.fourth_corner_ratio.real, self.fourth_corner_ratio.imag],
            "gram_determinant": self.gram_determinant,
            "dimension": self.dimension,
            "pattern_errors": self.pattern,
        }


def build_multiplet(
    model: GridModel,
    psi: np.ndarray,
    energy: float,
    tol: float,
) -> Multiplet:
    """Images of an H00 eigenvector under the normalized charges 2 Q / sqrt(E)."""
    if energy <= tol:
        raise SpectralError(f"E = {energy:.3e} <= tolerance {tol:.3e}: zero modes have no full multiplet")
    n = model.grid.n_points
    h = model.grid.h
    ref = sector_of(psi, n)
    c = 2.0 / math.sqrt(energy)
    q01 = c * (model.Q01.matrix @ psi)
    q10 = c * (model.Q10.matrix @ psi)
    q10q01 = c * (model.Q10.matrix @ q01)
    q01q10 = c * (model.Q01.matrix @ q10)
    members = {"reference": psi, "Q01": q01, "Q10": q10, "Q10Q01": q10q01}
    norms = {k: math.sqrt(float(np.vdot(v, v).real) * h) for k, v in members.items()}
    for k, nv in norms.items():
        if nv < 1e-8 * norms["reference"]:
            raise SpectralError(f"image {k} vanishes (norm {nv:.3e})")
    sectors = {k: sector_of(v, n) for k, v in members.items()}
    energies = {}
    for k, v in members.items():
        hv = model.H00.matrix @ v
        energies[k] = float(np.vdot(v, hv).real / np.vdot(v, v).real)
        if abs(energies[k] - energy) > tol:
            raise SpectralError(f"image {k} has energy {energies[k]:.6g}, expected {energy:.6g}")

    a, b = q10q01, q01q10
    aa = float(np.vdot(a, a).real)
    bb = float(np.vdot(b, b).real)
    ab = np.vdot(a, b)
    ratio = complex(ab / aa)
    gram = float(aa * bb - abs(ab) ** 2)
    stack = np.column_stack([v / np.linalg.norm(v) for v in members.values()])
    sv = np.linalg.svd(stack, compute_uv=False)
    dim = int(np.sum(sv > 1e-8 * sv[0]))

    pattern = {}
    if ref is Degree.D00:
        # display pattern: (i/sqrt E) A^dag psi in 01, -(1/sqrt E) A^dag psi in 10, -i psi in 11
        p = psi[:n]
        adp = model.ladder.A_dag.matrix @ p
        s01, s10, s11 = (sector_index(d) for d in (Degree.D01, Degree.D10, Degree.D11))
        pn = np.linalg.norm(p)
        pattern["Q01"] = float(np.linalg.norm(q01[s01 * n : (s01 + 1) * n] - 1j / math.sqrt(energy) * adp) / pn)
        pattern["Q10"] = float(np.linalg.norm(q10[s10 * n : (s10 + 1) * n] + adp / math.sqrt(energy)) / pn)
        pattern["Q10Q01"] = float(np.linalg.norm(q10q01[s11 * n : (s11 + 1) * n] + 1j * p) / pn)
        pattern["Q01Q10"] = float(np.linalg.norm(q01q10[s11 * n : (s11 + 1) * n] - 1j * p) / pn)
    return Multiplet(
        energy, ref, members, sectors, energies, ratio, gram, aa * bb, dim, pattern
    )


def multiplets_for_levels(
    model: GridModel, report: SpectrumReport, reference_sector: Degree = Degree.D00, max_levels: int = 3
) -> list[Multiplet]:
    """One multiplet per positive, complete level, seeded from ``reference_sector``."""
    out = []
    for lv in report.levels:
        if len(out) >= max_levels:
            break
        if lv.energy <= report.tolerance or lv.truncated:
            continue
        cands = [i for i in lv.indices if report.sectors[i] is reference_sector]
        if not cands:
            continue
        i = cands[0]
        out.append(build_multiplet(model, report.pairs.vectors[:, i], float(report.eigenvalues[i]), report.tolerance))
    return out


# -- zero modes ----------------------------------------------------------------------------

EVEN_ZERO = "H00+H11"
ODD_ZERO = "H01+H10"
BROKEN = "broken"
INCONCLUSIVE = "inconclusive"


@dataclass
class Candidate:
    name: str
    log_amplitude: np.ndarray = field(repr=False)
    decay_left: float
    decay_right: float
    status: str  # "normalizable", "not normalizable", "inconclusive"

    @property
    def normalizable(self) -> bool:
        return self.status == "normalizable"

    def wavefunction(self, h: float) -> np.ndarray:
        f = np.exp(self.log_amplitude - self.log_amplitude.max())
        return f / math.sqrt(float(np.sum(f * f)) * h)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "decay_left_nats": self.decay_left,
            "decay_right_nats": self.decay_right,
        }


@dataclass
class ZeroModeReport:
    chi: Candidate  # kernel of A^dag, lives in H00 + H11
    psi: Candidate  # kernel of A, lives in H01 + H10
    classification: str
    exclusive: bool
    lowest_H_plus: float
    lowest_H_minus: float
    tolerance: float
    grid: GridSpec

    @property
    def eigen_consistent(self) -> bool:
        zp = abs(self.lowest_H_plus) <= self.tolerance
        zm = abs(self.lowest_H_minus) <= self.tolerance
        if self.classification == INCONCLUSIVE:
            return True
        return zp == self.chi.normalizable and zm == self.psi.normalizable

    @property
    def good_susy(self) -> bool:
        return self.classification in (EVEN_ZERO, ODD_ZERO)

    @property
    def zero_mode_sectors(self) -> set[Degree]:
        if self.classification == EVEN_ZERO:
            return {Degree.D00, Degree.D11}
        if self.classification == ODD_ZERO:
            return {Degree.D01, Degree.D10}
        return set()

    def to_dict(self) -> dict:
        return {
            "classification": self.classification,
            "exclusive": self.exclusive,
            "eigen_consistent": self.eigen_consistent,
            "good_susy": self.good_susy,
            "kernel_of_Adag": self.chi.to_dict(),
            "kernel_of_A": self.psi.to_dict(),
            "lowest_H_plus": self.lowest_H_plus,
            "lowest_H_minus": self.lowest_H_minus,
            "tolerance": self.tolerance,
        }


def _candidate(name, logf, margin):
    peak = float(logf.max())
    dl, dr = peak - float(logf[0]), peak - float(logf[-1])
    if min(dl, dr) >= margin:
        status = "normalizable"
    elif min(dl, dr) > margin / 4 and 0 < int(np.argmax(logf)) < len(logf) - 1:
        status = "inconclusive"
    else:
        status = "not normalizable"
    return Candidate(name, logf, dl, dr, status)


def zero_mode_analysis(
    W: PotentialExpr,
    grid: GridSpec,
    params: dict[str, float] | None = None,
    margin: float = 20.0,
    tol: float | None = None,
) -> ZeroModeReport:
    """Classify zero-energy states from the first-order kernels of A and A^dag.

    chi ~ exp(+sqrt(2m)/hbar * int W) solves A^dag chi = 0 and psi ~ exp(-...)
    solves A psi = 0; amplitudes stay in the log domain so nothing overflows.
    """
    params = W.params if params is None else {**W.params, **params}
    units = Units.from_params(params)
    x = grid.x
    wx = W.with_params(**params).eval_grid(x)
    integral = cumulative_trapezoid(wx, x, initial=0.0)
    k = units.root2m / units.hbar
    chi = _candidate("chi", k * integral, margin)
    psi = _candidate("psi", -k * integral, margin)
    exclusive = not (chi.normalizable and psi.normalizable)
    if chi.status == INCONCLUSIVE or psi.status == INCONCLUSIVE:
        cls = INCONCLUSIVE
    elif chi.normalizable and not psi.normalizable:
        cls = EVEN_ZERO
    elif psi.normalizable and not chi.normalizable:
        cls = ODD_ZERO
    elif not chi.normalizable and not psi.normalizable:
        cls = BROKEN
    else:
        cls = INCONCLUSIVE

    lad = build_ladder(W, grid, params)
    lp = float(eigensolve(lad.H_plus, 1, grid.h).values[0])
    lm = float(eigensolve(lad.H_minus, 1, grid.h).values[0])
    if tol is None:
        tol = default_tolerance(grid.h, max(abs(lp), abs(lm), 1.0))
    return ZeroModeReport(chi, psi, cls, exclusive, lp, lm, tol, grid)


# -- degeneracy theorem ----------------------------------------------------------------------


@dataclass
class DegeneracyCheck:
    positive_levels_ok: bool
    zero_level_ok: bool
    zero_sectors_ok: bool
    details: list[str]

    @property
    def passed(self) -> bool:
        return self.positive_levels_ok and self.zero_level_ok and self.zero_sectors_ok

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "positive_levels_fourfold": self.positive_levels_ok,
            "zero_level_degeneracy_ok": self.zero_level_ok,
            "zero_level_sectors_match": self.zero_sectors_ok,
            "details": self.details,
        }


def check_degeneracies(report: SpectrumReport, zero_modes: ZeroModeReport | None = None) -> DegeneracyCheck:
    """Four-fold degeneracy above zero; zero level absent or two-fold in the
    sectors predicted by the zero-mode analysis."""
    tol = report.tolerance
    details = []
    pos_ok = True
    zero_ok = True
    sect_ok = True
    zero_levels = [lv for lv in report.levels if abs(lv.energy) <= tol]
    for lv in report.levels:
        if lv.truncated or abs(lv.energy) <= tol:
            continue
        if lv.degeneracy != 4:
            pos_ok = False
            details.append(f"level E={lv.energy:.6g} has degeneracy {lv.degeneracy}")
    if len(zero_levels) > 1:
        zero_ok = False
        details.append("more than one level within tolerance of zero")
    for lv in zero_levels:
        if lv.degeneracy not in (0, 2):
            zero_ok = False
            details.append(f"zero level has degeneracy {lv.degeneracy}")
    if zero_modes is not None and zero_modes.classification != INCONCLUSIVE:
        want = zero_modes.zero_mode_sectors
        got = set(zero_levels[0].sectors) if zero_levels else set()
        if want != got:
            sect_ok = False
            details.append(
                f"zero-level sectors {sorted(map(str, got))} != predicted {sorted(map(str, want))}"
            )
    return DegeneracyCheck(pos_ok, zero_ok, sect_ok, details)
