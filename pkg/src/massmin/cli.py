"""Command-line front end.

    python -m massmin <command> [--config run.json] [flags]

Commands: minimize, curve, mstar, shoot, mp-path, verify.  A JSON config
supplies any of the RunConfig keys; flags override it.  Outputs go to
``--output`` or, failing that, ``$MASSMIN_OUTPUT/<command>`` (default root
``runs``).  Every run writes ``manifest.json`` with the resolved config.

Exit status: 0 ok, 1 computation error, 2 bad usage or config, 3 a
verification verdict failed.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

from . import critical_mass, minimizer, mp_path, shooting, verification
from .nonlinearity import InadmissibleModel, check_hypotheses, model_from_dict, parse_model
from .radial import RadialGrid

log = logging.getLogger("massmin")

COMMANDS = ("minimize", "curve", "mstar", "shoot", "mp-path", "verify")
OUTPUT_ENV = "MASSMIN_OUTPUT"


class ConfigError(ValueError):
    pass


@dataclass
class GridBlock:
    R: float = 20.0
    M: int = 4000


@dataclass
class SolverBlock:
    dt: float = 1.0
    tol: float = 1e-9
    max_iter: int = 20000
    restarts: int = 1
    seed: int = 0
    init: str = "gaussian"
    width: float = 1.0


@dataclass
class RunConfig:
    command: str = "minimize"
    model: object = "single-power:p=4"
    dim: int = 1
    mass: Optional[float] = None
    masses: Optional[list] = None
    mu: Optional[float] = None
    mus: Optional[list] = None
    grid: GridBlock = field(default_factory=GridBlock)
    solver: SolverBlock = field(default_factory=SolverBlock)
    output: Optional[str] = None
    tolerances: dict = field(default_factory=dict)
    workers: int = 0  # 0: available parallelism
    bracket: list = field(default_factory=lambda: [0.1, 200.0])
    tol_mass: float = 1e-2
    suite: str = "all"
    samples: int = 32
    delta: Optional[float] = None
    M_target: Optional[float] = None


_BLOCKS = {"grid": GridBlock, "solver": SolverBlock}


def _check_keys(d: dict, cls, where: str):
    known = {f.name for f in fields(cls)}
    extra = set(d) - known
    if extra:
        raise ConfigError(f"unknown keys in {where}: {sorted(extra)}")


def config_from_dict(d: dict) -> RunConfig:
    _check_keys(d, RunConfig, "config")
    d = dict(d)
    for key, cls in _BLOCKS.items():
        if key in d:
            if not isinstance(d[key], dict):
                raise ConfigError(f"{key} must be an object")
            _check_keys(d[key], cls, key)
            d[key] = cls(**d[key])
    if "tolerances" in d:
        bad = set(d["tolerances"]) - set(verification.TOLERANCES)
        if bad:
            raise ConfigError(f"unknown tolerance keys: {sorted(bad)}")
    return RunConfig(**d)


def resolve_model(spec):
    try:
        if isinstance(spec, dict):
            return model_from_dict(spec)
        return parse_model(str(spec))
    except (InadmissibleModel, ValueError, TypeError) as exc:
        raise ConfigError(f"bad model {spec!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="massmin", description=__doc__.split("\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON run config")
    p.add_argument("--model", help="family:key=val,... e.g. single-power:p=4")
    p.add_argument("--dim", type=int)
    p.add_argument("--mass", type=float)
    p.add_argument("--masses", type=lambda s: [float(x) for x in s.split(",")])
    p.add_argument("--mu", type=float)
    p.add_argument("--mus", type=lambda s: [float(x) for x in s.split(",")])
    p.add_argument("--R", type=float, dest="grid_R")
    p.add_argument("--M", type=int, dest="grid_M")
    p.add_argument("--dt", type=float, dest="solver_dt")
    p.add_argument("--tol", type=float, dest="solver_tol")
    p.add_argument("--max-iter", type=int, dest="solver_max_iter")
    p.add_argument("--restarts", type=int, dest="solver_restarts")
    p.add_argument("--seed", type=int, dest="solver_seed")
    p.add_argument("--init", dest="solver_init", choices=minimizer.INIT_KINDS[:2])
    p.add_argument("--bracket", type=lambda s: [float(x) for x in s.split(",")])
    p.add_argument("--tol-mass", type=float, dest="tol_mass")
    p.add_argument("--suite")
    p.add_argument("--samples", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--M-target", type=float, dest="M_target")
    p.add_argument("--workers", type=int)
    p.add_argument("--output", "-o")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def merge(args: argparse.Namespace) -> RunConfig:
    base: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(base, dict):
            raise ConfigError("config must be a JSON object")
    base["command"] = args.command
    for key, val in vars(args).items():
        if val is None or key in ("command", "config", "verbose"):
            continue
        if key.startswith(("grid_", "solver_")):
            block, _, sub = key.partition("_")
            base.setdefault(block, {})[sub] = val
        else:
            base[key] = val
    return config_from_dict(base)


def output_dir(cfg: RunConfig) -> str:
    if cfg.output:
        return cfg.output
    return os.path.join(os.environ.get(OUTPUT_ENV, "runs"), cfg.command)


def write_manifest(cfg: RunConfig, out: str) -> None:
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(asdict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(x) -> str:
    return repr(float(x))


def write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for r in rows:
            wr.writerow([_fmt(v) if isinstance(v, float) else v for v in r])


def emit_plotdata(table, kind: str, out: str) -> list:
    """Gnuplot-style columns: curve -> curve.dat; path -> path_action.dat + path_mass.dat."""
    os.makedirs(out, exist_ok=True)
    if kind == "curve":
        path = os.path.join(out, "curve.dat")
        with open(path, "w") as fh:
            fh.write("# m E\n")
            for r in table:
                fh.write(f"{r.m!r} {r.E!r}\n")
        return [path]
    if kind == "path":
        files = []
        for name, attr in (("path_action.dat", "action"), ("path_mass.dat", "mass")):
            path = os.path.join(out, name)
            with open(path, "w") as fh:
                fh.write(f"# t {attr}\n")
                for s in table:
                    fh.write(f"{s.t!r} {getattr(s, attr)!r}\n")
            files.append(path)
        return files
    raise ValueError(f"unknown plot-data kind {kind!r}")


def _solver(cfg: RunConfig, **over) -> minimizer.SolverConfig:
    d = asdict(cfg.solver)
    d.update(over)
    try:
        return minimizer.SolverConfig(**d)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _grid(cfg: RunConfig) -> RadialGrid:
    try:
        return RadialGrid(cfg.dim, float(cfg.grid.R), int(cfg.grid.M))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _require(value, name):
    if value is None:
        raise ConfigError(f"--{name} is required for this command")
    return value


# -- commands ---------------------------------------------------------------

def cmd_minimize(cfg, model, out) -> int:
    m = _require(cfg.mass, "mass")
    res = minimizer.minimize(model, cfg.dim, m, _grid(cfg), _solver(cfg))
    res.profile.to_csv(os.path.join(out, "profile.csv"))
    row = res.csv_row()
    write_rows(os.path.join(out, "result.csv"), minimizer.CSV_FIELDS,
               [[row[k] for k in minimizer.CSV_FIELDS]])
    print(f"minimize {model.describe()} N={cfg.dim} m={m:g}: status {res.status}")
    print(f"  E  = {res.E:.6f}")
    print(f"  mu = {res.mu:.6f}")
    print(f"  iterations {res.iterations}, Pohozaev rel {res.residuals.pohozaev_rel:.2e}, "
          f"Nehari rel {res.residuals.nehari_rel:.2e}")
    return 0


def cmd_curve(cfg, model, out) -> int:
    masses = _require(cfg.masses, "masses")
    workers = cfg.workers or (os.cpu_count() or 1)
    rows = minimizer.energy_curve(model, cfg.dim, masses, _grid(cfg), _solver(cfg), workers)
    write_rows(os.path.join(out, "curve.csv"), ["m", "E", "mu", "converged", "status"],
               [[r.m, r.E, r.mu, int(r.converged), r.status] for r in rows])
    emit_plotdata(rows, "curve", out)
    print(f"curve {model.describe()} N={cfg.dim}")
    for r in rows:
        print(f"  m={r.m:<10g} E={r.E:<14.8g} mu={r.mu:<12.6g} {r.status}")
    if len(rows) >= 4:
        rep = critical_mass.curve_properties(rows, cfg.dim, tol=cfg.solver.tol)
        print(f"  nonincreasing={rep.nonincreasing} subhomogeneous={rep.subhomogeneous} "
              f"concave={rep.concave} continuous={rep.continuous_gap}")
    return 0


def cmd_mstar(cfg, model, out) -> int:
    est = critical_mass.estimate_mstar(model, cfg.dim, tuple(cfg.bracket), cfg.tol_mass,
                                       _grid(cfg), _solver(cfg, restarts=max(cfg.solver.restarts, 4)))
    write_rows(os.path.join(out, "mstar.csv"), critical_mass.HISTORY_FIELDS, est.history)
    print(f"mstar {model.describe()} N={cfg.dim}: {est.classification}")
    print(f"  bracket [{est.lower:.6f}, {est.upper:.6f}] width {est.width:.2e}, "
          f"E(upper) = {est.E_upper:.3e}")
    return 0


def cmd_shoot(cfg, model, out) -> int:
    mu = _require(cfg.mu, "mu")
    la = shooting.least_action(model, cfg.dim, mu)
    rows = []
    for c in la.candidates:
        rows.append([c.mu, c.zeta, c.action, c.mass, c.status])
    write_rows(os.path.join(out, "shoot.csv"), ["mu", "zeta_or_b", "action", "mass", "status"], rows)
    print(f"shoot {model.describe()} N={cfg.dim} mu={mu:g}")
    if not la.found:
        print("  no decaying solution found")
        return 1
    w = la.witness
    write_rows(os.path.join(out, "trajectory.csv"), ["x", "u", "uprime"],
               zip(w.x.tolist(), w.u.tolist(), w.uprime.tolist()))
    kind = "least action" if cfg.dim == 1 else "least action (radial, upper bound)"
    print(f"  {kind}: action {w.action:.4f}, mass {w.mass:.4f}, start {w.zeta:.6f}")
    return 0


def cmd_mp_path(cfg, model, out) -> int:
    mu = _require(cfg.mu, "mu")
    if cfg.dim == 1:
        la = shooting.least_action(model, 1, mu)
        w = la.witness
        if w is not None and w.sign > 0:
            neg = shooting.shoot_1d(model, mu, -1)
            w = neg if neg.decayed else w
        if w is None:
            print("no witness solution")
            return 1
        path = mp_path.plateau_path_1d(model, w, cfg.samples, cfg.M_target)
    else:
        la = shooting.least_action(model, cfg.dim, mu)
        if not la.found:
            print("no witness solution")
            return 1
        w = shooting.reshoot(la.witness, 1.25e-4)
        if cfg.dim == 2:
            path = mp_path.two_param_path_2d(model, w, mu, max(cfg.samples // 4, 4),
                                             cfg.delta, cfg.M_target)
        else:
            path = mp_path.dilation_path(model, w, mu, cfg.samples, cfg.M_target)
    mp_path.write_path_csv(path, os.path.join(out, "path.csv"))
    emit_plotdata(path.samples, "path", out)
    rep = mp_path.check_path_result(path, cfg.delta, cfg.M_target)
    print(f"mp-path {path.kind} {model.describe()} N={cfg.dim} mu={mu:g}: {len(path.samples)} samples")
    print(f"  J(w) = {path.J_w:.6f}, J(T) = {path.samples[-1].action:.4f}, m(T) = {path.samples[-1].mass:.4f}")
    print(f"  (i) {rep.item_i}  (ii) {rep.item_ii}  (iii) {rep.item_iii}")
    for r in rep.reasons:
        print(f"  - {r}")
    return 0


def cmd_verify(cfg, model, out) -> int:
    m = _require(cfg.mass, "mass")
    verdicts = verification.run_suite(model, cfg.dim, m, _grid(cfg), _solver(cfg), cfg.suite,
                                      cfg.tolerances or None, cfg.mus, cfg.masses)
    verification.write_verdicts_csv(verdicts, os.path.join(out, "verdicts.csv"))
    table = verification.summary_table(verdicts)
    with open(os.path.join(out, "verdicts.txt"), "w") as fh:
        fh.write(table + "\n")
    print(table)
    return verification.exit_status(verdicts)


HANDLERS = {"minimize": cmd_minimize, "curve": cmd_curve, "mstar": cmd_mstar,
            "shoot": cmd_shoot, "mp-path": cmd_mp_path, "verify": cmd_verify}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = merge(args)
        model = resolve_model(cfg.model)
        if cfg.dim < 1:
            raise ConfigError("dim must be >= 1")
        rep = check_hypotheses(model, cfg.dim)
        if not rep.all_pass:
            raise ConfigError(f"model inadmissible in dimension {cfg.dim}: {rep.reasons}")
        out = output_dir(cfg)
        try:
            os.makedirs(out, exist_ok=True)
            write_manifest(cfg, out)
        except OSError as exc:
            print(f"error: cannot write to {out}: {exc}", file=sys.stderr)
            return 1
        return HANDLERS[cfg.command](cfg, model, out)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (TypeError,) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - any computation failure is exit 1
        log.debug("computation failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
