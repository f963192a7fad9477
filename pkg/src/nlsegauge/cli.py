"""Command-line entry point: ``nlsegauge <command> ...``.

Exit codes: 0 success, 1 verification failure (or no linearizing gauge),
2 input error, 3 numerical abort (stability guard, density floor, blow-up).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .coeffs import (
    GaugeParams,
    classify,
    compose,
    invariants,
    linearizing_gauge,
    schrodinger,
    transform,
)
from .errors import (
    EvolutionAborted,
    GaugeError,
    NotLinearizable,
    PreconditionError,
    StabilityGuardError,
    TorusIncompatibleVelocity,
    WindingObstructionError,
    DensityFloorError,
)
from .evolution import EvolutionConfig, evolve, gauge_covariance_experiment, gaussian_packet
from .fields import Grid, WaveField, random_smooth_field
from .gauge import ExtendedGaugeParams, separation_check
from .oracle import (
    functoriality_sampling,
    group_axiom_sampling,
    invariant_sampling,
    law_sampling,
)

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
TOL_ENV = "NLSE_DEFAULT_TOL"


@dataclass
class RunManifest:
    command: str
    inputs: list = field(default_factory=list)
    overrides: dict = field(default_factory=dict)
    output_dir: str | None = None
    seed: int | None = None

    def validate(self):
        for p in self.inputs:
            if not Path(p).exists():
                raise PreconditionError(f"{p}: no such file")
        if self.output_dir is not None:
            out = Path(self.output_dir)
            out.mkdir(parents=True, exist_ok=True)
            if not os.access(out, os.W_OK):
                raise PreconditionError(f"{out}: output directory is not writable")


def _default_tol():
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return 1e-9
    try:
        tol = float(raw)
    except ValueError:
        raise PreconditionError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not tol > 0:
        raise PreconditionError(f"{TOL_ENV} must be positive")
    return tol


def _emit(result, args, manifest):
    """Print the JSON result; with --out also write result.json and manifest.json."""
    text = io.dumps(result)
    sys.stdout.write(text)
    if manifest.output_dir is not None:
        out = Path(manifest.output_dir)
        (out / "result.json").write_text(text)
        io.write_json(asdict(manifest), out / "manifest.json")


def _gauge_from_args(args):
    return GaugeParams(args.gamma, args.lam, args.eta)


def cmd_invariants(args, manifest):
    c = io.load_coefficients(args.coeff_file)
    _emit(invariants(c).as_dict(), args, manifest)
    return EXIT_OK


def cmd_classify(args, manifest):
    c = io.load_coefficients(args.coeff_file)
    tol = args.tol if args.tol is not None else _default_tol()
    manifest.overrides["tol"] = tol
    _emit(classify(c, tol).as_dict(), args, manifest)
    return EXIT_OK


def cmd_transform(args, manifest):
    c = io.load_coefficients(args.coeff_file)
    _emit(transform(c, _gauge_from_args(args), args.law).as_dict(), args, manifest)
    return EXIT_OK


def cmd_compose(args, manifest):
    g2 = GaugeParams(*args.g2)
    g1 = GaugeParams(*args.g1)
    _emit(compose(g2, g1).as_dict(), args, manifest)
    return EXIT_OK


def cmd_linearize(args, manifest):
    c = io.load_coefficients(args.coeff_file)
    tol = args.tol if args.tol is not None else _default_tol()
    try:
        g = linearizing_gauge(c, args.hbar, args.m, tol)
    except NotLinearizable as exc:
        print(f"not linearizable: {exc}", file=sys.stderr)
        return EXIT_FAILED
    _emit(g.as_dict(), args, manifest)
    return EXIT_OK


def _initial_field(spec, grid):
    kind, _, value = spec.partition(":")
    if kind == "plane" and value:
        k = float(value)
        turns = k * grid.length / (2 * math.pi)
        if abs(turns - round(turns)) > 1e-9:
            raise PreconditionError(f"plane wave k = {k} is not periodic on a box of length {grid.length:.6g}")
        return WaveField(grid, np.exp(1j * k * grid.axis))
    if kind == "gaussian" and value:
        sigma = float(value)
        if not sigma > 0:
            raise PreconditionError("gaussian width must be positive")
        return gaussian_packet(grid, sigma)
    psi = io.read_field_csv(spec)
    if psi.grid.n != grid.n:
        raise PreconditionError(f"{spec}: has {psi.grid.n} points, --n is {grid.n}")
    return psi


def cmd_evolve(args, manifest):
    c = io.load_coefficients(args.coeff_file)
    dx = args.dx if args.dx is not None else 2 * math.pi / args.n
    grid = Grid(args.n, dx)
    psi0 = _initial_field(args.initial, grid)
    floor = args.floor
    if floor is None and args.initial.startswith("gaussian:"):
        floor = 0.0
    cfg = EvolutionConfig(dt=args.dt, t_max=args.tmax, floor=floor, record_every=args.record_every)
    try:
        traj = evolve(psi0, c, cfg)
    except EvolutionAborted as exc:
        if exc.trajectory is not None and exc.trajectory.times:
            io.write_trajectory(exc.trajectory, args.out)
        raise
    io.write_trajectory(traj, args.out)
    summary = {
        "points": grid.n,
        "dx": dx,
        "dt": cfg.dt,
        "t_max": cfg.t_max,
        "snapshots": len(traj.times),
        "final": traj.diagnostics[-1],
    }
    _emit(summary, args, manifest)
    return EXIT_OK


def _verify_law(args):
    rep = law_sampling(args.n, args.seed, args.points, args.law, args.tol or 1e-5)
    return rep.passed, rep.as_dict()


def _verify_invariants(args):
    rep = invariant_sampling(args.n, args.seed, args.tol or 1e-9, args.law)
    return rep.passed, rep.as_dict()


def _verify_functoriality(args):
    tol = args.tol or 1e-9
    act = functoriality_sampling(args.n, args.seed, tol)
    grp = group_axiom_sampling(args.n, args.seed, tol)
    return act.passed and grp.passed, {"functoriality": act.as_dict(), "group_axioms": grp.as_dict()}


def _verify_separation(args):
    """Random two-eta gauges on random product states over a 64 x 64 grid."""
    tol = args.tol or 1e-8
    rng = np.random.default_rng(args.seed)
    grid = Grid.periodic(64)
    worst = {"gauge_discrepancy": 0.0, "r2_additivity": 0.0, "r5_additivity": 0.0}
    worst_case = None
    for _ in range(args.n):
        g = ExtendedGaugeParams(
            rng.uniform(-2, 2), float(rng.choice([-1, 1]) * rng.uniform(0.25, 4)),
            rng.uniform(-1, 1), rng.uniform(-1, 1),
        )
        rep = separation_check(random_smooth_field(grid, rng), random_smooth_field(grid, rng), g)
        for key in worst:
            if getattr(rep, key) > worst[key]:
                worst[key] = getattr(rep, key)
                worst_case = {"gauge": asdict(g), "report": rep.as_dict()}
    passed = all(v <= tol for v in worst.values())
    return passed, {"n": args.n, "seed": args.seed, "tol": tol, "points": grid.n, "passed": passed,
                    "worst": worst, "worst_case": worst_case}


def _verify_covariance(args):
    """Schroedinger equation, random strictly local gauges, N = 64, t = 0.01."""
    tol = args.tol or 1e-4
    rng = np.random.default_rng(args.seed)
    grid = Grid.periodic(64)
    c = schrodinger()
    cfg = EvolutionConfig(dt=1e-4, t_max=1e-2, record_every=10)
    results = []
    for _ in range(args.n):
        g = GaugeParams(rng.uniform(-1, 1), float(rng.choice([-1, 1]) * rng.uniform(0.5, 2)), 0.0)
        rep = gauge_covariance_experiment(random_smooth_field(grid, rng), c, g, cfg)
        results.append({"gauge": g.as_dict(), "max_density_discrepancy": rep.max_density_discrepancy})
    worst = max(r["max_density_discrepancy"] for r in results)
    passed = worst <= tol
    return passed, {"n": args.n, "seed": args.seed, "tol": tol, "passed": passed, "worst": worst,
                    "runs": results}


VERIFIERS = {
    "law": _verify_law,
    "invariants": _verify_invariants,
    "functoriality": _verify_functoriality,
    "separation": _verify_separation,
    "covariance": _verify_covariance,
}


def cmd_verify(args, manifest):
    if args.n < 1:
        raise PreconditionError("--n must be >= 1")
    passed, report = VERIFIERS[args.what](args)
    report = {"check": args.what, **report}
    _emit(report, args, manifest)
    return EXIT_OK if passed else EXIT_FAILED


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser():
    p = argparse.ArgumentParser(
        prog="nlsegauge",
        description="Gauge invariants, classification and numerical checks for the sixth-order NLSE family.",
        epilog="exit codes: 0 ok, 1 verification failed, 2 input error, 3 numerical abort",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help="directory for result.json and manifest.json")
        return sp

    sp = add("invariants", cmd_invariants, "gauge invariants tau1..tau12, tau5hat")
    sp.add_argument("coeff_file")

    sp = add("classify", cmd_classify, "equivalence and symmetry verdicts")
    sp.add_argument("coeff_file")
    sp.add_argument("--tol", type=float, help=f"default 1e-9 or ${TOL_ENV}")

    sp = add("transform", cmd_transform, "apply a gauge to a coefficient vector")
    sp.add_argument("coeff_file")
    sp.add_argument("--gamma", type=float, default=0.0)
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--eta", type=float, default=0.0)
    sp.add_argument("--law", choices=("corrected", "printed"), default="corrected")

    sp = add("compose", cmd_compose, "group product g2 * g1")
    sp.add_argument("--g1", type=float, nargs=3, required=True, metavar=("GAMMA", "LAMBDA", "ETA"))
    sp.add_argument("--g2", type=float, nargs=3, required=True, metavar=("GAMMA", "LAMBDA", "ETA"))

    sp = add("linearize", cmd_linearize, "gauge to the free Schroedinger equation")
    sp.add_argument("coeff_file")
    sp.add_argument("--hbar", type=float, default=1.0)
    sp.add_argument("--m", type=float, default=1.0)
    sp.add_argument("--tol", type=float)

    sp = add("evolve", cmd_evolve, "RK4 evolution on a periodic 1D grid")
    sp.add_argument("coeff_file")
    sp.add_argument("--initial", required=True, help="plane:K, gaussian:SIGMA or a field CSV")
    sp.add_argument("--n", type=int, default=256)
    sp.add_argument("--dx", type=float, help="grid spacing (default 2 pi / n)")
    sp.add_argument("--dt", type=float, required=True)
    sp.add_argument("--tmax", type=float, required=True)
    sp.add_argument("--floor", type=float, help="absolute density floor")
    sp.add_argument("--record-every", type=_positive_int, default=1)
    # evolve always writes the trajectory, so --out is mandatory here
    for action in sp._actions:
        if action.dest == "out":
            action.required = True

    sp = add("verify", cmd_verify, "randomized verification suites")
    sp.add_argument("what", choices=sorted(VERIFIERS))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n", type=int, default=20)
    sp.add_argument("--points", type=int, default=256, help="grid points for field checks")
    sp.add_argument("--law", choices=("corrected", "printed"), default="corrected")
    sp.add_argument("--tol", type=float)
    return p


def _inputs(args):
    out = []
    if getattr(args, "coeff_file", None):
        out.append(args.coeff_file)
    initial = getattr(args, "initial", None)
    if initial and not initial.startswith(("plane:", "gaussian:")):
        out.append(initial)
    return out


def main(argv=None):
    args = build_parser().parse_args(argv)
    skip = {"func", "command", "out", "coeff_file", "seed", "what"}
    overrides = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    if getattr(args, "what", None):
        overrides["check"] = args.what
    manifest = RunManifest(args.command, _inputs(args), overrides, args.out, getattr(args, "seed", None))
    try:
        manifest.validate()
        return args.func(args, manifest)
    except (StabilityGuardError, EvolutionAborted, DensityFloorError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (PreconditionError, TorusIncompatibleVelocity, WindingObstructionError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GaugeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
