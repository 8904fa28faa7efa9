"""Command-line front end.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or solver
error.  Tables are CSV with ``#`` metadata lines, or JSON.  Floats are
written with ``repr`` so every value parses back exactly.
"""
import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .algebra import build_eta_set, build_s_map, clifford_residual, s_decode, s_encode
from .exceptions import GridTooCoarse, OutOfGrid, RealDiracError, SolverError
from .perturbation import (
    CouplingOperator,
    anticommutator_residue,
    coupling_from_potential,
    first_order_source,
    quadratic_remainder,
)
from .potentials import (
    charge_density,
    coulomb_external,
    laplacian_residual,
    radial_poisson,
    ret_adv_difference,
)
from .radial import (
    FINE_STRUCTURE,
    MIN_POINTS,
    PhysParams,
    RadialGrid,
    StateLabel,
    build_phi_state,
    pattern_deviation,
    sommerfeld_energy,
    solve_radial,
)

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    alpha: float = FINE_STRUCTURE
    Z: int = 1
    n: int = 1
    kappa: int = -1
    mj: float = 0.5
    r_min: float = None
    r_max: float = None
    points: int = 4000
    tol: float = 1e-8
    output_path: str = None
    format: str = "csv"

    def params(self):
        p = PhysParams(alpha=self.alpha, Z=self.Z)
        if p.za <= 0:
            raise UsageError("Z*alpha must be positive")
        return p

    def label(self):
        return StateLabel(self.n, self.kappa, self.mj)

    def grid(self, n=None):
        za = self.params().za
        r_min = 1e-4 / za if self.r_min is None else self.r_min
        r_max = 40.0 * (n or self.n) / za if self.r_max is None else self.r_max
        if not 0 < r_min < r_max:
            raise UsageError(f"need 0 < rmin < rmax, got {r_min}, {r_max}")
        return RadialGrid.logarithmic(r_min, r_max, self.points)

    def validate(self):
        self.params()
        self.label()
        if self.tol <= 0:
            raise UsageError("tol must be positive")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def render_table(columns, rows, metadata, fmt):
    if fmt == "json":
        doc = {
            "metadata": {k: _jsonable(v) for k, v in metadata.items()},
            "columns": list(columns),
            "rows": [[_jsonable(v) for v in row] for row in rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    lines = [f"# {k} = {_fmt(v)}" for k, v in metadata.items()]
    lines.append(",".join(columns))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _emit(text, config):
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def level_labels(n_max):
    """Valid ``(n, kappa)`` in the order -1, +1, -2, +2, ... per shell."""
    out = []
    for n in range(1, n_max + 1):
        for k in range(1, n + 1):
            for kappa in (-k, k):
                if kappa != n:
                    out.append((n, kappa))
    return out


def cmd_levels(config, n_max=3):
    if not 1 <= n_max <= 5:
        raise UsageError("nmax must be between 1 and 5")
    params = config.params()
    rows, worst = [], 0.0
    for n, kappa in level_labels(n_max):
        label = StateLabel(n, kappa)
        try:
            sol = solve_radial(label, params, config.grid(n), tol=config.tol)
        except SolverError as exc:
            raise SolverError(f"state (n={n}, kappa={kappa}): {exc}") from exc
        e_ref = sommerfeld_energy(label, params)
        rel = abs(sol.energy - e_ref) / e_ref
        worst = max(worst, rel)
        rows.append((n, kappa, sol.energy, e_ref, rel))
    meta = {"alpha": config.alpha, "Z": config.Z, "nmax": n_max, "tol": config.tol}
    text = render_table(("n", "kappa", "E_shooting", "E_formula", "rel_error"), rows, meta, config.format)
    return text, EXIT_OK if worst <= config.tol else EXIT_FAIL


def cmd_radial(config):
    params, label = config.params(), config.label()
    sol = solve_radial(label, params, config.grid(), tol=config.tol)
    meta = {
        "alpha": config.alpha, "Z": config.Z, "n": label.n, "kappa": label.kappa,
        "E": sol.energy, "normalization": sol.norm,
    }
    rows = zip(sol.grid.r, sol.g, sol.f)
    return render_table(("r", "g", "f"), rows, meta, config.format), EXIT_OK


def cmd_phi(config, samples):
    params, label = config.params(), config.label()
    sol = solve_radial(label, params, config.grid(), tol=config.tol)
    smap = build_s_map()
    rows = []
    for point in samples:
        try:
            vals, status = build_phi_state(sol, smap, point), "ok"
        except OutOfGrid:
            vals, status = [float("nan")] * 8, "out_of_grid"
        rows.append((*point, *vals, status))
    meta = {"alpha": config.alpha, "Z": config.Z, "n": label.n, "kappa": label.kappa,
            "mj": label.mj, "E": sol.energy}
    cols = ("r", "theta", "phi", "x0", *(f"Phi{i}" for i in range(1, 9)), "status")
    return render_table(cols, rows, meta, config.format), EXIT_OK


def cmd_selfpot(config):
    params, label = config.params(), config.label()
    sol = solve_radial(label, params, config.grid(), tol=config.tol)
    rho = charge_density(sol)
    pot = radial_poisson(rho)
    meta = {"alpha": config.alpha, "Z": config.Z, "n": label.n, "kappa": label.kappa,
            "E": sol.energy, "total_charge": rho.total_charge}
    rows = zip(sol.grid.r, rho.rho, pot.a0)
    return render_table(("r", "rho", "A0"), rows, meta, config.format), EXIT_OK


def run_checks(config):
    """Every verification check as ``(name, value, threshold, passed)``, in order."""
    checks = []

    def add(name, fn, threshold):
        try:
            value = float(fn())
        except GridTooCoarse:
            value = float("inf")
        checks.append((name, value, threshold, value <= threshold))

    eta, smap = build_eta_set(), build_s_map()
    params = config.params()
    add("clifford", lambda: clifford_residual(eta), 1e-14)

    rng = np.random.default_rng(20240101)
    spinors = rng.normal(size=(100, 4)) + 1j * rng.normal(size=(100, 4))
    add("s_map_round_trip", lambda: np.max(np.abs(s_decode(s_encode(spinors, smap), smap) - spinors)), 1e-13)
    add("complex_structure", lambda: np.max(np.abs(
        s_encode(1j * spinors, smap) - s_encode(spinors, smap) @ eta.J.T)), 1e-13)

    try:
        grid = config.grid()
    except GridTooCoarse:
        # the only check where larger is better
        checks.append(("grid_points", float(config.points), float(MIN_POINTS), False))
        return checks

    def spectrum():
        worst = 0.0
        for n, kappa in level_labels(3):
            label = StateLabel(n, kappa)
            sol = solve_radial(label, params, config.grid(n), tol=config.tol)
            e_ref = sommerfeld_energy(label, params)
            worst = max(worst, abs(sol.energy - e_ref) / e_ref)
        return worst

    add("spectrum_oracle", spectrum, config.tol)

    state = {}

    def ground():
        if "sol" not in state:
            state["sol"] = solve_radial(StateLabel(1, -1), params, config.grid(1), tol=config.tol)
            state["rho"] = charge_density(state["sol"])
            state["pot"] = radial_poisson(state["rho"])
        return state

    add("poisson_residual", lambda: laplacian_residual(ground()["pot"], ground()["rho"]), 1e-4)
    add("gauss_law", lambda: abs(ground()["pot"].a0[-1] * ground()["sol"].grid.r[-1]
                                 - ground()["rho"].total_charge), 1e-8)
    add("ret_equals_adv", lambda: ret_adv_difference(ground()["rho"], 0.0), 1e-12)

    def remainder():
        worst = 0.0
        for a in (0.05, 0.1, 0.2):
            op = CouplingOperator.constant(a, eta)
            exact = a ** 3 * eta.eta[0] - a ** 4 * np.eye(8)
            worst = max(worst, float(np.max(np.abs(quadratic_remainder(op)[0] - exact))))
        return worst

    add("quadratic_remainder", remainder, 1e-13)

    def scalarity():
        st = ground()
        a = coupling_from_potential(coulomb_external(params, st["sol"].grid), eta, params)
        b = coupling_from_potential(st["pot"], eta, params)
        return anticommutator_residue(a, b) / max(1.0, float(np.max(np.abs(2 * a.scalar * b.scalar))))

    add("anticommutator_scalarity", scalarity, 1e-14)

    def stationary():
        sol = solve_radial(config.label(), params, grid, tol=config.tol)
        report = first_order_source(sol, params, eta)
        return report.source_norm if report.phi1_zero else float("inf")

    add("first_order_source", stationary, 1e-10)

    def fixture():
        sol = solve_radial(StateLabel(2, -1, 0.5), params, config.grid(2), tol=config.tol)
        r = np.geomspace(sol.grid.r[1], sol.grid.r[-2] / 4, 7)
        pts = np.array([(ri, th, ph, x0) for ri in r for th in (0.3, 1.2, 2.5)
                        for ph in (0.0, 1.0) for x0 in (0.0, 0.7, 5.0)])
        c, dev = pattern_deviation(sol, smap, pts)
        return dev if c > 0 else float("inf")

    add("real_field_pattern", fixture, 1e-10)
    return checks


def cmd_verify(config):
    checks = run_checks(config)
    rows = checks
    passed = all(row[3] for row in rows)
    if config.format == "json":
        doc = {
            "checks": [{"check": n, "value": _jsonable(v), "threshold": t, "pass": bool(p)} for n, v, t, p in rows],
            "passed": passed,
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        meta = {"alpha": config.alpha, "Z": config.Z, "points": config.points, "passed": passed}
        text = render_table(("check", "value", "threshold", "pass"), rows, meta, "csv")
    failing = next((row[0] for row in rows if not row[3]), None)
    return text, (EXIT_OK if passed else EXIT_FAIL), failing


def _parse_sample(text):
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("a sample is r,theta,phi,x0")
    return tuple(parts)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=FINE_STRUCTURE)
    common.add_argument("--Z", type=int, default=1)
    common.add_argument("--n", type=int, default=1)
    common.add_argument("--kappa", type=int, default=-1)
    common.add_argument("--mj", type=float, default=0.5)
    common.add_argument("--rmin", type=float, default=None, help="default 1e-4/(Z alpha)")
    common.add_argument("--rmax", type=float, default=None, help="default 40 n/(Z alpha)")
    common.add_argument("--points", type=int, default=4000)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="realdirac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    levels = sub.add_parser("levels", parents=[common], help="bound-state energies vs closed form")
    levels.add_argument("--nmax", type=int, default=3)
    sub.add_parser("radial", parents=[common], help="radial amplitudes g, f")
    phi = sub.add_parser("phi", parents=[common], help="real 8-component field at sample points")
    phi.add_argument("--sample", type=_parse_sample, action="append", default=[],
                     metavar="R,THETA,PHI,X0")
    phi.add_argument("--samples", default=None, help="CSV file of r,theta,phi,x0 rows")
    sub.add_parser("selfpot", parents=[common], help="charge density and its static potential")
    sub.add_parser("verify", parents=[common], help="run the verification suite")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    config = RunConfig(
        alpha=args.alpha, Z=args.Z, n=args.n, kappa=args.kappa, mj=args.mj,
        r_min=args.rmin, r_max=args.rmax, points=args.points, tol=args.tol,
        output_path=args.out, format=args.format,
    )
    try:
        config.validate()
        if args.command == "verify":
            text, code, failing = cmd_verify(config)
            _emit(text, config)
            if failing:
                print(f"verification failed: {failing}", file=sys.stderr)
            return code
        if args.command == "levels":
            text, code = cmd_levels(config, args.nmax)
        elif args.command == "radial":
            text, code = cmd_radial(config)
        elif args.command == "phi":
            samples = list(args.sample)
            if args.samples:
                samples.extend(map(tuple, np.loadtxt(args.samples, delimiter=",", ndmin=2)))
            if not samples:
                raise UsageError("phi needs at least one --sample or --samples file")
            text, code = cmd_phi(config, samples)
        else:
            text, code = cmd_selfpot(config)
    except (UsageError, RealDiracError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _emit(text, config)
    return code


if __name__ == "__main__":
    sys.exit(main())
