"""``twistgeom`` command-line driver.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
configuration, expression or fit-conditioning errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from ..errors import ConfigError, EvaluationError, ExpressionError, FitConditioningError
from .config import REPORT_ENV, RunConfig, build_config
from .report import Report, check, write_table

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="key=value configuration file (flags override it)")
    g.add_argument("--m", type=int, help="half dimension m (gamma matrices are 2^m x 2^m)")
    g.add_argument("--N", type=int, help="grid points per axis")
    g.add_argument("--L", type=float, help="torus period")
    g.add_argument("--derivative", choices=("spectral", "fd2"), help="derivative scheme")
    g.add_argument("--tol-algebraic", type=float, dest="tol_algebraic")
    g.add_argument("--tol-derivative", type=float, dest="tol_derivative")
    g.add_argument("--tol-relative", type=float, dest="tol_relative")
    g.add_argument("--tolerance", type=float, help="set all three tolerances at once")
    g.add_argument("--seed", type=int)
    g.add_argument("--report", help=f"JSON report path (also ${REPORT_ENV})")
    g.add_argument("--out-dir", dest="out_dir", help="directory for CSV output")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="twistgeom", description="Twisted spectral triples with torsion on the flat torus.")
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    v = sub.add_parser("verify", parents=[common], help="run the verification suites")
    v.add_argument("--suites", help="comma-separated subset of clifford,geometry,torsion,twist,action")
    v.add_argument("--include-m3", dest="include_m3", action="store_true", default=None,
                   help="also run the m=3 gamma and Hodge checks")

    t = sub.add_parser("torsion", parents=[common], help="torsion from a scalar field")
    src = t.add_mutually_exclusive_group(required=True)
    src.add_argument("--h", help="nowhere-vanishing complex field h; omega = d ln|h|^2")
    src.add_argument("--f", help="real field f; co-exact torsion K = -star df")

    f = sub.add_parser("fermionic", parents=[common], help="fermionic action for an odd gamma product R")
    f.add_argument("--R", required=True, help="strictly increasing gamma indices, e.g. 0 or 0,1,2")
    f.add_argument("--f", default="0,0,0,0", help="four comma-separated expressions for f_mu")

    s = sub.add_parser("spectral", parents=[common], help="spectral action coefficients for constant f")
    s.add_argument("--f", default="0,0,0,0", help="four comma-separated constants")
    s.add_argument("--lambda", dest="lambdas", default="4,4.8,5.6,6.4,7.2,8",
                   help="comma-separated scales Lambda")
    s.add_argument("--cutoff", type=int, default=24, help="box cutoff |n_mu| <= cutoff")
    return parser


def _version() -> str:
    from .. import __version__

    return f"twistgeom {__version__}"


def _config(args) -> RunConfig:
    keys = ("m", "N", "L", "derivative", "tol_algebraic", "tol_derivative", "tol_relative",
            "seed", "report", "out_dir", "tolerance", "include_m3")
    overrides = {k: getattr(args, k, None) for k in keys}
    if getattr(args, "suites", None):
        overrides["suites"] = tuple(s.strip() for s in args.suites.split(",") if s.strip())
    return build_config(args.config, overrides)


def _finish(report: Report, cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    path = report.write(cfg.report)
    failed = [c for c in report.checks if not c.passed]
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        err = "n/a" if not math.isfinite(c.max_abs_error) else f"{c.max_abs_error:.3e}"
        print(f"{status}  {c.name:<48} err={err}  tol={c.tolerance:.1e}", file=out)
    print(f"{len(report.checks) - len(failed)}/{len(report.checks)} checks passed; report: {path}", file=out)
    return EXIT_OK if report.passed else EXIT_FAIL


# ------------------------------------------------------------- commands

def cmd_verify(cfg: RunConfig) -> tuple[int, Report]:
    from .suites import run_suites

    checks, pinned = run_suites(cfg)
    report = Report("verify", cfg.echo(), checks, pinned)
    return _finish(report, cfg), report


def _grid(cfg: RunConfig):
    from ..geometry import TorusGrid

    return TorusGrid(2 * cfg.m, cfg.N, cfg.L, cfg.derivative)


def _field(source: str, grid) -> np.ndarray:
    from ..geometry import parse_field_expr

    return parse_field_expr(source).on_grid(grid).values


def cmd_torsion(cfg: RunConfig, h: str | None, f: str | None) -> tuple[int, Report]:
    from ..clifford import euclidean_gammas, real_structure_dim4
    from ..geometry import hodge_dual, one_form
    from ..torsion import (LIFT_ONEFORM_FACTOR, classify_contorsion, lift_from_oneform,
                           oneform_from_torsion, torsion_from_oneform)
    from ..twist import (NONVANISHING, coexact_torsion, dirac_with_torsion, generate_torsion,
                         operator_deviation, random_spinors)

    if cfg.m != 2:
        raise ConfigError("torsion runs on the four-torus (m = 2)")
    grid = _grid(cfg)
    rep = euclidean_gammas(2)
    rng = np.random.default_rng(cfg.seed)
    fields = random_spinors(grid, 4, 3, rng)
    report = Report("torsion", {**cfg.echo(), "h": h, "f": f})
    anchor = "torsion generated by a twisted inner fluctuation" if h is not None else "co-exact torsion"
    if h is not None:
        hv = _field(h, grid)
        if np.min(np.abs(hv)) < NONVANISHING:
            raise EvaluationError(f"h vanishes somewhere on the grid (min |h| = {np.min(np.abs(hv)):.3g})")
        gen = generate_torsion(hv, rep, grid, real_structure_dim4(rep), fields=fields, tol=math.inf)
        omega = gen.omega
        K = torsion_from_oneform(one_form(grid, omega))
        tail = _spectral_tail(hv, grid)
        report.checks.append(check("torsion.operator_identity", anchor, gen.residual, cfg.tol_derivative,
                                   f"Ad(u_h) D Ad(u_h)^dagger against the closed form; spectral tail of "
                                   f"h is {tail:.2e} (raise N if this is not negligible)"))
    else:
        fv = _field(f, grid)
        if np.max(np.abs(fv.imag)) > 0:
            raise EvaluationError("f must be real")
        K = coexact_torsion(fv.real, grid)
        omega = oneform_from_torsion(K).components.real
    cls = classify_contorsion(K)
    three = K.as_threeform()
    report.checks.append(check("torsion.totally_antisymmetric", anchor,
                               max(cls.deviations[k] for k in ("skew_12", "skew_13", "skew_23")),
                               cfg.tol_algebraic))
    report.checks.append(check("torsion.roundtrip_star", anchor,
                               np.max(np.abs(oneform_from_torsion(K).components - omega)),
                               cfg.tol_algebraic))
    mstar = -hodge_dual(three).components.real
    lift_dev = operator_deviation(lift_from_oneform(omega, rep, grid),
                                  dirac_with_torsion(LIFT_ONEFORM_FACTOR * mstar, rep, grid), fields)
    report.checks.append(check("torsion.lift_vs_twisted_dirac", "spin lift of a connection with torsion",
                               lift_dev, cfg.tol_derivative))
    report.results = {
        "classification": {"orthogonal": cls.orthogonal, "geodesic_preserving": cls.geodesic_preserving,
                           "totally_antisymmetric": cls.totally_antisymmetric},
        "omega_max_abs": [float(np.max(np.abs(omega[mu]))) for mu in range(4)],
        "K_flat_max_abs": {"".join(map(str, t)): float(np.max(np.abs(K.K_flat[t])))
                           for t in three.tuples},
    }
    columns = {f"omega_{mu}": omega[mu] for mu in range(4)}
    columns.update({"K_" + "".join(map(str, t)): K.K_flat[t] for t in three.tuples})
    from ..geometry import export_csv

    csv_path = Path(cfg.out_dir) / "torsion.csv"
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    export_csv(csv_path, grid, columns)
    report.results["csv"] = csv_path.name
    return _finish(report, cfg), report


def _spectral_tail(values: np.ndarray, grid) -> float:
    """Largest Fourier amplitude in the outer half of the modes, relative to the largest overall."""
    c = np.abs(np.fft.fftn(values))
    k = np.abs(np.fft.fftfreq(grid.N, d=1.0 / grid.N))
    outer = np.zeros(c.shape, dtype=bool)
    for mu in range(grid.n):
        shape = [1] * grid.n
        shape[mu] = grid.N
        outer |= (k >= grid.N // 4).reshape(shape)
    top = c.max()
    return float(c[outer].max() / top) if top > 0 else 0.0


def _indices(text: str) -> list[int]:
    try:
        idx = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"invalid R index list {text!r}") from None
    return idx


def cmd_fermionic(cfg: RunConfig, R: str, f: str) -> tuple[int, Report]:
    from ..action import (FermionicConfig, compare_closed_form, eigen_projection, signature_classify,
                          symmetry_ratio)
    from ..clifford import euclidean_gammas, real_structure_dim4
    from ..geometry import random_band_limited
    from ..twist import r_matrix

    if cfg.m != 2:
        raise ConfigError("the fermionic action is implemented for m = 2")
    idx = _indices(R)
    rep = euclidean_gammas(2)
    try:
        r_matrix(idx, rep)
    except ValueError as exc:
        raise ConfigError(f"invalid R: {exc}") from None
    grid = _grid(cfg)
    sources = [s.strip() for s in f.split(",")]
    if len(sources) != 4:
        raise ConfigError("--f needs four comma-separated expressions")
    fv = np.array([_field(s, grid) for s in sources])
    if np.max(np.abs(fv.imag)) > 0:
        raise EvaluationError("f must be real")
    fv = fv.real
    J = real_structure_dim4(rep)
    rng = np.random.default_rng(cfg.seed)
    report = Report("fermionic", {**cfg.echo(), "R": idx, "f": sources})
    cfgR = FermionicConfig.build(idx, fv, rep, grid, J)
    p1 = eigen_projection(cfgR.R, random_band_limited(grid, rng, 4, max_mode=1))
    p2 = eigen_projection(cfgR.R, random_band_limited(grid, rng, 4, max_mode=1))
    ratio = symmetry_ratio(p1, p2, cfgR)
    report.checks.append(check("fermionic.antisymmetry", "symmetry factor of the fermionic bilinear",
                               abs(ratio + 1), cfg.tol_relative, f"A(phi,psi)/A(psi,phi) = {ratio:.12g}"))
    report.results = {"alpha": cfgR.alpha, "symmetry_ratio": ratio, "l": (len(idx) - 1) // 2}
    rows = []
    if len(idx) == 1:
        a = idx[0]
        xi = random_band_limited(grid, rng, 2, max_mode=1)
        zeta = random_band_limited(grid, rng, 2, max_mode=1)
        comp = compare_closed_form(a, fv, xi, zeta, rep, grid, J, tol=math.inf)
        report.checks.append(check("fermionic.closed_form", "closed form of the twisted fermionic action",
                                   comp.relative_deviation, cfg.tol_relative))
        fmean = fv.reshape(4, -1).mean(axis=1)
        if a == 0:
            fmean[0] = round(fmean[0])
        sig = signature_classify([a], fmean, grid, rng)
        report.checks.append(check("fermionic.signature_witness", "change of signature by R",
                                   sig.witness_residual, cfg.tol_derivative,
                                   f"witness with constant f = {[float(x) for x in fmean]}"))
        report.results.update({"signature": sig.signature, "replaced_axis": sig.replaced_axis,
                               "bilinear": comp.bilinear, "closed_form": comp.closed})
        rows.append(["bilinear", comp.bilinear.real, comp.bilinear.imag])
        rows.append(["closed_form", comp.closed.real, comp.closed.imag])
    else:
        report.results["signature"] = None
        report.results["note"] = "closed form and signature are defined for a single gamma matrix"
    rows.append(["symmetry_ratio", complex(ratio).real, complex(ratio).imag])
    report.results["csv"] = "fermionic.csv"
    write_table(Path(cfg.out_dir) / "fermionic.csv", ["quantity", "re", "im"], rows)
    return _finish(report, cfg), report


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"invalid {what} list {text!r}") from None


def cmd_spectral(cfg: RunConfig, f: str, lambdas: str, cutoff: int) -> tuple[int, Report]:
    from ..action import fourier_spectral_action, heat_coefficients
    from ..clifford import euclidean_gammas
    from ..geometry import TorusGrid

    if cfg.m != 2:
        raise ConfigError("the spectral action oracle runs on the four-torus (m = 2)")
    fvec = _floats(f, "f")
    if len(fvec) != 4:
        raise ConfigError("--f needs four constants")
    lam = _floats(lambdas, "lambda")
    rep = euclidean_gammas(2)
    grid = TorusGrid(4, 4, cfg.L)  # constant f: the heat densities are constant
    heat = heat_coefficients(fvec, grid, rep, a4=True)
    fs = fourier_spectral_action(fvec, lam, cutoff, rep, L=cfg.L, seed=cfg.seed)
    report = Report("spectral", {**cfg.echo(), "f": fvec, "lambda": lam, "cutoff": cutoff})
    a0, a2 = heat.a0.real, heat.a2.real
    anchor = "spectral action from the mode sum"
    report.checks.append(check("spectral.a0", anchor, (fs.a0_fit - a0) / a0, 0.02))
    if abs(a2) > 0:
        report.checks.append(check("spectral.a2", anchor, (fs.a2_fit - a2) / a2, 0.05))
    else:
        report.checks.append(check("spectral.a2", anchor, fs.a2_fit / a0, 0.05,
                                   "a2 vanishes; fitted value measured against the a0 scale"))
    report.checks.append(check("spectral.trace_invariance_gauge", "trace invariance of the spectral action",
                               fs.certifications["gauge_heat_trace_dev"], cfg.tol_algebraic * 100))
    report.checks.append(check("spectral.trace_invariance_rho_unitary", "trace invariance of the spectral action",
                               fs.certifications["rho_unitary_trace_dev"], cfg.tol_algebraic * 100))
    report.results = {
        "heat": {"a0": a0, "a2": a2, "a4_flat": heat.a4, "breakdown": heat.breakdown},
        "fit": {"a0": fs.a0_fit, "a2": fs.a2_fit, "constant": fs.constant_fit,
                "condition_number": fs.condition_number, "residual": fs.fit_residual, "modes": fs.modes},
        "relative_deviation": {"a0": (fs.a0_fit - a0) / a0,
                               "a2": (fs.a2_fit - a2) / a2 if a2 else None},
        "csv": "spectral.csv",
    }
    write_table(Path(cfg.out_dir) / "spectral.csv", ["lambda", "trace"], zip(fs.lambdas, fs.traces))
    return _finish(report, cfg), report


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "verify":
            code, _ = cmd_verify(cfg)
        elif args.command == "torsion":
            code, _ = cmd_torsion(cfg, args.h, args.f)
        elif args.command == "fermionic":
            code, _ = cmd_fermionic(cfg, args.R, args.f)
        else:
            code, _ = cmd_spectral(cfg, args.f, args.lambdas, args.cutoff)
    except FitConditioningError as exc:
        print(f"twistgeom: fit-conditioning error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExpressionError as exc:
        print(f"twistgeom: expression error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, EvaluationError) as exc:
        print(f"twistgeom: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
