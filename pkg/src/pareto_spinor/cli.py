"""Command line entry point: ``pareto-spinor <subcommand> [flags]``.

Every subcommand prints a JSON report (and writes ``report.json`` plus data
files into ``--out`` when given). Exit status: 0 success, 1 usage error,
2 when a checked identity or criterion fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import factorization as fz
from . import hamiltonians as hm
from . import helmholtz as hz
from . import normal_form as nf
from . import pareto as pc
from .algebra import ETA, XI, PolyMatrix2
from .schemas import SCHEMA_ID, validate

log = logging.getLogger("pareto_spinor")

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2
COMMANDS = ("factorize-check", "skew-check", "pareto-quadratic", "pareto-scan", "klein",
            "normal-form", "helmholtz", "graphene")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    args: argparse.Namespace
    out: Path | None = None
    files: list[str] = field(default_factory=list)


def _bounds(text: str) -> tuple[float, float, float, float]:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 4 or not (parts[1] > parts[0] and parts[3] > parts[2]):
        raise argparse.ArgumentTypeError("bounds are x0,x1,y0,y1 with x0<x1 and y0<y1")
    return tuple(parts)


def _res(text: str) -> tuple[int, int]:
    try:
        nx, ny = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError("resolution is NxM") from None
    if nx < 2 or ny < 2:
        raise argparse.ArgumentTypeError("resolution must be at least 2x2")
    return nx, ny


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _sym(text: str) -> tuple[Fraction, Fraction, Fraction]:
    try:
        vals = tuple(Fraction(v.strip()) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("symmetric matrix is m11,m12,m22") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("symmetric matrix is m11,m12,m22")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--bounds", type=_bounds, help="x0,x1,y0,y1")
    common.add_argument("--res", type=_res, help="grid resolution NxM")
    common.add_argument("--tol", type=_positive, default=1e-9)
    common.add_argument("--order", type=int, default=6)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", type=Path, help="directory for report.json and data files")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="pareto-spinor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    sub.add_parser("factorize-check", parents=[common])
    sub.add_parser("skew-check", parents=[common])
    for name in ("pareto-quadratic", "pareto-scan"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--a1", type=_sym, default=(1, 0, 1), help="Hessian of u1 as m11,m12,m22")
        p.add_argument("--a2", type=_sym, default=(1, 0, -1), help="Hessian of u2 as m11,m12,m22")
        if name == "pareto-scan":
            p.add_argument("--oracle-k", type=int, default=1440)
    p = sub.add_parser("klein", parents=[common])
    p.add_argument("--r", type=float, default=3.0)
    p = sub.add_parser("normal-form", parents=[common])
    p.add_argument("--family", choices=("generic", "realizable"), default="generic")
    p = sub.add_parser("helmholtz", parents=[common])
    p.add_argument("--tau", type=_positive, default=1.0)
    p.add_argument("--h", type=_positive, default=1.0)
    p = sub.add_parser("graphene", parents=[common])
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--a", type=_positive, default=1.0)
    p.add_argument("--variant", choices=hm.VARIANTS, default="standard")
    return parser


def _base(cmd: str, ok: bool, **payload) -> dict:
    return {"schema": SCHEMA_ID, "command": cmd, "ok": bool(ok), **payload}


# subcommands ----------------------------------------------------------------

def cmd_factorize_check(cfg: RunConfig) -> dict:
    data = fz.elasticity_factorization()
    H = hm.elasticity_spatial()
    res = fz.verify_pareto_factorization(H, data)
    rho = XI * XI + ETA * ETA
    gram = PolyMatrix2.identity().conjugate_by(data.du)
    conformal = gram == PolyMatrix2.diag(rho * Fraction(1, 2), rho * Fraction(1, 2))
    det_ok = H.det2() == rho * rho * Fraction(1, 2)
    ok = res.is_zero() and conformal and det_ok
    return _base(cfg.command, ok, factorization_residual_zero=res.is_zero(),
                 conformal_identity=conformal, det_is_half_r4=det_ok, residual=res.to_json())


def cmd_skew_check(cfg: RunConfig) -> dict:
    rep = fz.skew_diag_check().to_json()
    ok = rep["corrected_residual_is_zero"] and not rep["printed_residual_is_zero"]
    return _base(cfg.command, ok, **rep)


def _pair(args) -> pc.QuadraticPair:
    return pc.QuadraticPair(tuple(args.a1), tuple(args.a2))


def cmd_pareto_quadratic(cfg: RunConfig) -> dict:
    args = cfg.args
    strata = pc.quadratic_pareto_set(_pair(args))
    theta = "plane" if strata.whole_plane else ("lines" if strata.lines else "origin")
    return _base(cfg.command, True, A1=[str(v) for v in args.a1], A2=[str(v) for v in args.a2],
                 theta=theta, strata=strata.to_json())


def cmd_pareto_scan(cfg: RunConfig) -> dict:
    args = cfg.args
    bounds = args.bounds or (-1.0, 1.0, -1.0, 1.0)
    res = args.res or (101, 101)
    grid = pc.grid_scan(pc.quadratic_map(_pair(args)), bounds, res, args.tol)
    agree = pc.oracle_agreement(grid, args.oracle_k, args.tol)
    strata = pc.extract_strata(grid)
    if cfg.out and args.format == "csv":
        grid.write_csv(cfg.out / "grid.csv")
        cfg.files.append("grid.csv")
    return _base(cfg.command, agree >= 0.999, res=list(res), bounds=list(bounds),
                 n_critical=int(grid.critical.sum()), oracle_agreement=agree,
                 strata=strata.to_json())


def cmd_klein(cfg: RunConfig) -> dict:
    args = cfg.args
    res = args.res or (400, 400)
    smap = pc.klein_bottle_utilities(args.r)
    grid = pc.grid_scan(smap, args.bounds or pc.KLEIN_RECT, res, args.tol, adaptive=True)
    strata = pc.extract_strata(grid, wrap=(False, True))
    if cfg.out and args.format == "csv":
        grid.write_csv(cfg.out / "grid.csv", "theta", "v")
        cfg.files.append("grid.csv")
    crit = grid.critical
    return _base(cfg.command, bool(crit.any()), r=args.r, res=list(res),
                 n_critical=int(crit.sum()), n_rank1=int((crit & (grid.rank == 1)).sum()),
                 n_rank0=int((crit & (grid.rank == 0)).sum()),
                 n_terminal_points=len(strata.terminal_points), strata=strata.to_json())


def cmd_normal_form(cfg: RunConfig) -> dict:
    args = cfg.args
    rng = random.Random(args.seed)
    if args.family == "realizable":
        H = nf.realizable_perturbation(rng, N=args.order)
    else:
        H = nf.random_perturbation(rng)
    payload = dict(order=args.order, seed=args.seed, family=args.family,
                   hamiltonian=H.to_json(), correction=None,
                   reconstruction_residual_zero=None, obstruction=None)
    try:
        corr = nf.solve_graded(H, args.order)
    except nf.ObstructionError as exc:
        payload["obstruction"] = {
            "degree": exc.degree, "entry": exc.component,
            "residual": {"monomial": list(exc.residual["monomial"]),
                         "value": exc.residual["value"]},
            "det_remainder_mod_rho": nf.determinant_obstruction(H).to_json(),
        }
        return _base(cfg.command, False, **payload)
    zero = nf.reconstruction_residual(H, corr, args.order).is_zero()
    payload.update(correction=corr.to_json(), reconstruction_residual_zero=zero)
    return _base(cfg.command, zero, **payload)


def cmd_helmholtz(cfg: RunConfig) -> dict:
    args = cfg.args
    bounds = args.bounds or (-4.0, 4.0, -4.0, 4.0)
    nx, ny = args.res or (401, 401)
    grid = hz.FieldGrid(*bounds, nx, ny)
    residuals = {}
    ok = True
    for kind in ("phi", "psi", "spinor"):
        coarse, fine, ratio = hz.convergence_ratio(kind, args.tau, args.h, grid)
        residuals[kind] = {"coarse": coarse, "fine": fine, "ratio": ratio}
        ok &= 3.5 <= ratio <= 4.5
    if cfg.out:
        phi, psi = hz.eigenfields(args.tau, args.h, grid)
        w = hz.synthesize_spinor(args.tau, args.h, grid)
        hz.write_binary(cfg.out / "fields.bin", grid, phi, psi, w.phi, w.psi)
        cfg.files.append("fields.bin")
        if args.format == "csv":
            hz.write_csv(cfg.out / "fields.csv", grid, ["phi1", "psi1", "w1", "w2"],
                         phi, psi, w.phi, w.psi)
            cfg.files.append("fields.csv")
    return _base(cfg.command, ok, tau=args.tau, h=args.h, bounds=list(bounds),
                 res=[nx, ny], residuals=residuals)


def cmd_graphene(cfg: RunConfig) -> dict:
    args = cfg.args
    params = hm.GrapheneParams(args.t, args.a, args.variant)
    lam0 = hm.graphene_dispersion([0.0, 0.0], params)
    nres = max(args.res) if args.res else 240
    points = hm.find_dirac_points(params, cell=args.bounds, res=nres)
    if params.variant == "standard":
        ok = len(points) == 2 and all(p.lam < 1e-8 for p in points)
    else:
        ok = True
    return _base(cfg.command, ok, t=args.t, a=args.a, variant=args.variant,
                 lambda_at_origin=lam0, dirac_points=[p.to_json() for p in points])


HANDLERS = {
    "factorize-check": cmd_factorize_check,
    "skew-check": cmd_skew_check,
    "pareto-quadratic": cmd_pareto_quadratic,
    "pareto-scan": cmd_pareto_scan,
    "klein": cmd_klein,
    "normal-form": cmd_normal_form,
    "helmholtz": cmd_helmholtz,
    "graphene": cmd_graphene,
}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.tol <= 0:
            raise UsageError("--tol must be positive")
        out = args.out
        if out is not None:
            try:
                out.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                raise UsageError(f"cannot create output directory: {exc}") from None
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    cfg = RunConfig(args.command, args, out)
    try:
        report = HANDLERS[args.command](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    validate(report)
    text = json.dumps(report, indent=2, sort_keys=True, allow_nan=False)
    if out is not None:
        (out / "report.json").write_text(text + "\n")
        log.info("wrote %s", ", ".join(["report.json", *cfg.files]))
    print(text, file=stdout)
    return EXIT_OK if report["ok"] else EXIT_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
