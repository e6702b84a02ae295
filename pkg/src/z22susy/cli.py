"""Command-line entry point: ``z22susy verify|solve|oscillator|multiplet``.

Exit codes (stable):
    verify      0 all suites pass, 1 a residual is nonzero, 2 internal error
    solve       0 ok, 3 parse error, 4 domain error, 5 eigensolver failure
    oscillator  0 within tolerance, 1 tolerance violation
    multiplet   0 all multiplet checks pass, 1 otherwise
Invalid command lines and configurations exit with 2.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .assembly import GridSpec, build_model, central_relation_residual, residual_report
from .graded_matrix import bracket_table, standard_basis, verify_z22_lie
from .grading import Degree
from .potential import DomainError, PotentialError, PotentialSyntaxError, check_confinement, parse
from .spectral import (
    SpectralError,
    build_multiplet,
    check_degeneracies,
    positivity_check,
    spectrum,
    zero_mode_analysis,
)
from .symbolic.model import central_relation, verify_supertranslation
from .symbolic.morphism import bd_morphism_check

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INTERNAL = 2
EXIT_PARSE = 3
EXIT_DOMAIN = 4
EXIT_CONVERGENCE = 5

OSCILLATOR = "-sqrt(m/2)*omega*x"
SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    subcommand: str
    potential: str | None = None
    params: dict[str, float] = field(default_factory=dict)
    grid: GridSpec = field(default_factory=GridSpec)
    tolerances: dict[str, float | None] = field(default_factory=dict)
    outputs: dict[str, str | None] = field(default_factory=dict)
    n_levels: int | None = None

    def validate(self) -> RunConfig:
        for k, v in self.params.items():
            if not np.isfinite(v) or v <= 0:
                raise ValueError(f"parameter {k} must be positive, got {v}")
        if self.n_levels is not None and self.n_levels < 1:
            raise ValueError("--levels must be at least 1")
        for k, v in self.tolerances.items():
            if v is not None and not v > 0:
                raise ValueError(f"tolerance {k} must be positive")
        return self

    def to_dict(self) -> dict:
        src = self.potential
        return {
            "subcommand": self.subcommand,
            "potential": src,
            "potential_sha256": hashlib.sha256(src.encode()).hexdigest() if src is not None else None,
            "params": dict(sorted(self.params.items())),
            "grid": self.grid.to_dict(),
            "tolerances": dict(sorted(self.tolerances.items())),
            "outputs": dict(sorted(self.outputs.items())),
            "n_levels": self.n_levels,
        }


def _plain(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=_plain) + "\n"


def write_json(path: str, config: RunConfig, body: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, "config": config.to_dict(), **body}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(payload))


def write_csv(path: str, config: RunConfig, rows: list[list]) -> None:
    # provenance goes in a leading comment-free header row pair to stay RFC 4180
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["config_json"])
        w.writerow([json.dumps(config.to_dict(), sort_keys=True)])
        w.writerows(rows)


def _params(pairs: list[str]) -> dict[str, float]:
    out = {}
    for item in pairs or []:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise ValueError(f"--param expects name=value, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise ValueError(f"--param {name}: {value!r} is not a number") from None
    return out


def _grid(args) -> GridSpec:
    return GridSpec(args.xmin, args.xmax, args.n)


# -- verify -----------------------------------------------------------------------


def _faulty_basis():
    basis = standard_basis()
    basis["alpha2"] = basis["alpha2"].scale(-1)
    return basis


def run_verify(fault: str | None = None) -> dict:
    if fault == "crash":
        raise RuntimeError("injected internal error")
    basis = _faulty_basis() if fault == "alpha2" else standard_basis()
    suites = {}
    t = time.perf_counter()
    lie = verify_z22_lie(list(basis.values()))
    suites["z22_lie_axioms"] = (lie.passed, lie.to_dict(), time.perf_counter() - t)
    t = time.perf_counter()
    table = bracket_table(basis)
    suites["bracket_table"] = (table.passed, table.to_dict(), time.perf_counter() - t)
    t = time.perf_counter()
    thm = verify_supertranslation()
    suites["supertranslation"] = (thm.passed, thm.to_dict(), time.perf_counter() - t)
    t = time.perf_counter()
    cr = central_relation()
    suites["central_relation"] = (cr.holds, cr.to_dict(), time.perf_counter() - t)
    t = time.perf_counter()
    bd = bd_morphism_check()
    suites["bd_morphism"] = (bd.passed, bd.to_dict(), time.perf_counter() - t)
    return suites


def cmd_verify(args) -> int:
    config = RunConfig("verify", outputs={"json": args.json}).validate()
    suites = run_verify(args.inject_fault)
    width = max(map(len, suites))
    for name, (ok, _, secs) in suites.items():
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  ({secs:.3f} s)")
    ok = all(v[0] for v in suites.values())
    print("all suites pass" if ok else "verification FAILED")
    if args.json:
        body = {"passed": ok, "suites": {k: {"passed": v[0], **v[1]} for k, v in suites.items()}}
        write_json(args.json, config, body)
    return EXIT_OK if ok else EXIT_FAIL


# -- solve ------------------------------------------------------------------------


def _solve_config(args, name) -> RunConfig:
    return RunConfig(
        name,
        potential=args.potential,
        params=_params(args.param),
        grid=_grid(args),
        tolerances={"cluster": args.tol},
        outputs={"json": args.json, "csv": args.csv},
        n_levels=args.levels,
    ).validate()


def n_eigen_for(levels: int) -> int:
    """Eigenpairs needed to see ``levels`` full levels of H00."""
    return 4 * levels


def analyse(config: RunConfig, with_convergence: bool = True) -> dict:
    W = parse(config.potential, config.params)
    grid = config.grid
    model = build_model(W, grid)
    n_eig = n_eigen_for(config.n_levels or 8)
    report = spectrum(model, n_eig, config.tolerances.get("cluster"))
    zm = zero_mode_analysis(W, grid)
    pos = positivity_check(report, model)
    deg = check_degeneracies(report, zm)
    multiplets = []
    for lv in report.levels:
        if len(multiplets) >= 3:
            break
        if lv.energy <= report.tolerance or lv.truncated:
            continue
        i = lv.indices[0]
        try:
            mu = build_multiplet(model, report.pairs.vectors[:, i], float(report.eigenvalues[i]), report.tolerance)
            multiplets.append(mu.to_dict())
        except SpectralError as exc:
            multiplets.append({"energy": lv.energy, "error": str(exc)})
    body = {
        "potential": {"source": config.potential, "normalized": str(W)},
        "confinement": check_confinement(W, (grid.x_min, grid.x_max)).to_dict(),
        "spectrum": report.to_dict(),
        "positivity": pos.to_dict(),
        "zero_modes": zm.to_dict(),
        "degeneracy": deg.to_dict(),
        "multiplets": multiplets,
        "central_relation_residual": central_relation_residual(model),
    }
    if with_convergence and grid.n_points // 4 >= 16 and grid.n_points % 4 == 0:
        grids = [GridSpec(grid.x_min, grid.x_max, grid.n_points // 4)]
        grids += [grids[0].refined(), grids[0].refined().refined()]
        body["convergence"] = residual_report(W, grids).to_dict()
    return {"body": body, "report": report, "model": model, "zero_modes": zm}


def _print_levels(report, limit=None):
    for k, lv in enumerate(report.levels[:limit]):
        tags = ",".join(str(s) for s in lv.sectors)
        flags = "" if lv.resolved else " (unresolved)"
        flags += " (truncated)" if lv.truncated else ""
        print(f"  E[{k}] = {lv.energy:.8f}  x{lv.degeneracy}  sectors {tags}{flags}")


def cmd_solve(args) -> int:
    config = _solve_config(args, "solve")
    try:
        res = analyse(config)
    except PotentialSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except PotentialError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SpectralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    body, report, zm = res["body"], res["report"], res["zero_modes"]
    print(f"W(x) = {body['potential']['normalized']}   grid N={config.grid.n_points} h={config.grid.h:.4g}")
    print(f"cluster tolerance {report.tolerance:.3g}")
    _print_levels(report)
    print(f"zero modes: {zm.classification}  (SUSY {'good' if zm.good_susy else 'broken or undetermined'})")
    print(f"min energy {body['positivity']['min_energy']:.3e}  positivity {'ok' if body['positivity']['passed'] else 'VIOLATED'}")
    print(f"degeneracy pattern {'ok' if body['degeneracy']['passed'] else 'VIOLATED'}")
    if args.json:
        write_json(args.json, config, body)
    if args.csv:
        write_csv(args.csv, config, report.csv_rows())
    return EXIT_OK


# -- oscillator ------------------------------------------------------------------


def cmd_oscillator(args) -> int:
    if not args.omega > 0:
        print(f"error: omega must be positive, got {args.omega}", file=sys.stderr)
        return EXIT_INTERNAL
    levels = args.levels or 8
    config = RunConfig(
        "oscillator",
        potential=OSCILLATOR,
        params={"omega": args.omega, "m": 1.0, "hbar": 1.0},
        grid=_grid(args),
        tolerances={"energy": args.tol, "cluster": None},
        outputs={"json": args.json, "csv": args.csv},
        n_levels=levels,
    ).validate()
    W = parse(OSCILLATOR, config.params)
    model = build_model(W, config.grid)
    report = spectrum(model, 4 * levels - 2)
    expected_deg = [2] + [4] * (levels - 1)
    rows = []
    worst = (0.0, None)
    got = report.levels[:levels]
    for n in range(levels):
        target = n * args.omega
        if n >= len(got):
            rows.append({"n": n, "expected": target, "energy": None, "error": None, "degeneracy": 0})
            worst = (float("inf"), n)
            continue
        err = abs(got[n].energy - target)
        rows.append(
            {
                "n": n,
                "expected": target,
                "energy": got[n].energy,
                "error": err,
                "degeneracy": got[n].degeneracy,
                "expected_degeneracy": expected_deg[n],
            }
        )
        print(f"  n={n}  E={got[n].energy:.8f}  |E-n*omega|={err:.2e}  deg={got[n].degeneracy}")
        if err > worst[0]:
            worst = (err, n)
    deg_ok = [r["degeneracy"] for r in rows] == expected_deg
    ok = worst[0] <= args.tol and deg_ok
    if ok:
        print(f"oscillator OK: max error {worst[0]:.2e} <= {args.tol:g}, degeneracies {expected_deg}")
    else:
        why = f"level n={worst[1]} error {worst[0]:.3e}" if worst[0] > args.tol else "degeneracy mismatch"
        print(f"oscillator FAILED: {why}", file=sys.stderr)
    if args.json:
        write_json(args.json, config, {"passed": ok, "levels": rows, "spectrum": report.to_dict()})
    if args.csv:
        write_csv(args.csv, config, report.csv_rows())
    return EXIT_OK if ok else EXIT_FAIL


# -- multiplet --------------------------------------------------------------------


def cmd_multiplet(args) -> int:
    config = _solve_config(args, "multiplet")
    try:
        W = parse(config.potential, config.params)
        model = build_model(W, config.grid)
        report = spectrum(model, 4 * (args.level + 2))
    except PotentialSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    positive = [lv for lv in report.levels if lv.energy > report.tolerance and not lv.truncated]
    if args.level < 1 or args.level > len(positive):
        print(f"error: level {args.level} not available ({len(positive)} positive levels)", file=sys.stderr)
        return EXIT_INTERNAL
    lv = positive[args.level - 1]
    ref = Degree.parse(args.sector)
    cands = [i for i in lv.indices if report.sectors[i] is ref]
    if not cands:
        print(f"error: level has no state in sector {ref}", file=sys.stderr)
        return EXIT_FAIL
    i = cands[0]
    try:
        mu = build_multiplet(model, report.pairs.vectors[:, i], float(report.eigenvalues[i]), report.tolerance)
    except SpectralError as exc:
        print(f"multiplet FAILED: {exc}", file=sys.stderr)
        return EXIT_FAIL
    sectors_ok = mu.member_sectors == mu.expected_sectors()
    ratio_ok = abs(mu.fourth_corner_ratio + 1) <= 1e-8
    ok = sectors_ok and ratio_ok and mu.dimension == 4 and mu.linearly_dependent_corner
    print(f"E = {mu.energy:.8f}, reference sector {mu.reference_sector}")
    for role, s in mu.member_sectors.items():
        print(f"  {role:<9} sector {s}  E = {mu.image_energies[role]:.8f}")
    r = mu.fourth_corner_ratio
    print(f"  fourth-corner ratio {r.real:+.12f}{r.imag:+.3e}i, Gram det {mu.gram_determinant:.2e}, span dim {mu.dimension}")
    if args.json:
        write_json(args.json, config, {"passed": ok, "multiplet": mu.to_dict()})
    return EXIT_OK if ok else EXIT_FAIL


# -- parser -----------------------------------------------------------------------


def _grid_flags(p, n_default=2048):
    p.add_argument("--xmin", type=float, default=-12.0)
    p.add_argument("--xmax", type=float, default=12.0)
    p.add_argument("--n", type=int, default=n_default, help="grid points")
    p.add_argument("--json", metavar="PATH")
    p.add_argument("--csv", metavar="PATH")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="z22susy", description="Z2^2-graded supersymmetric QM toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="exact algebraic verification suites")
    v.add_argument("--json", metavar="PATH")
    v.add_argument("--inject-fault", choices=["alpha2", "crash"], help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", help="assemble and diagonalize the model for a superpotential")
    s.add_argument("--potential", required=True)
    s.add_argument("--param", action="append", default=[], metavar="k=v")
    s.add_argument("--levels", type=int, default=8)
    s.add_argument("--tol", type=float, default=None, help="cluster tolerance")
    _grid_flags(s)
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oscillator", help="canonical oscillator check")
    o.add_argument("--omega", type=float, default=1.0)
    o.add_argument("--levels", type=int, default=8)
    o.add_argument("--tol", type=float, default=1e-2, help="max |E_n - n*omega|")
    _grid_flags(o)
    o.set_defaults(func=cmd_oscillator)

    m = sub.add_parser("multiplet", help="build the multiplet of a positive level")
    m.add_argument("--potential", default=OSCILLATOR)
    m.add_argument("--param", action="append", default=[], metavar="k=v")
    m.add_argument("--level", type=int, default=1, help="1-based index among positive levels")
    m.add_argument("--sector", default="00", help="reference sector")
    m.add_argument("--levels", type=int, default=None, help=argparse.SUPPRESS)
    m.add_argument("--tol", type=float, default=None, help="cluster tolerance")
    _grid_flags(m)
    m.set_defaults(func=cmd_multiplet)
    return ap


def _attach_values(argv: list[str]) -> list[str]:
    """Glue ``--potential -x`` into ``--potential=-x`` so argparse does not
    mistake a leading minus for an option."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a == "--potential" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_attach_values(list(argv)))
    try:
        return args.func(args)
    except (ValueError, PotentialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - exit-code contract
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
