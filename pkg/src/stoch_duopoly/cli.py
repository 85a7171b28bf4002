"""Command-line front end.

    stoch-duopoly analyze|sweep|density|simulate|mc-lambda [--config FILE] [overrides]

The configuration is one flat JSON object.  Every key can also be given as a
flag (``n_grid`` <-> ``--n-grid``), and flags win over the file.  Exit codes:
0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

import argparse
from dataclasses import dataclass, field, fields, replace
import json
import math
import sys

import numpy as np

from . import output
from .angular_system import AngularCoeffs, is_rotation_scaling
from .duopoly_model import (
    GameParams,
    characteristic_roots,
    gamma_offsets,
    half_trace_identity,
    linearize,
    roots_complex,
    stationary_state,
)
from .errors import ConfigError, DegenerateInput, NumericalFailure
from .lyapunov import DENSITIES, METHODS, MC_SCHEMES, find_sign_changes, game_lambda, lambda_monte_carlo, lambda_quadrature, sweep
from .phase_density import (
    COEFFICIENT_MODES,
    density_backward_difference,
    density_closed_form,
    density_rotation_closed_form,
)
from .sde_sim import SCHEMES, simulate

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
COMMANDS = ("analyze", "sweep", "density", "simulate", "mc-lambda")
DENSITY_METHODS = ("closed_form", "rotation", "backward_difference")


@dataclass
class RunConfig:
    # game; defaults are the reference parameters c1=0.2, c2=2, k1=0.2, k2=0.4
    c1: float = 0.2
    c2: float = 2.0
    k1: float = 0.2
    k2: float = 0.4
    b11: float = 0.0
    b12: float = 0.0
    b21: float = 0.0
    b22: float = 0.0
    alpha: float = None
    beta: float = None
    d1: float = 0.0  # fixed costs never enter the dynamics
    d2: float = 0.0
    # analyses
    n_grid: int = 4096
    param: str = "alpha"
    start: float = None
    stop: float = None
    steps: int = 121
    method: str = "quadrature"
    density: str = "rotation"
    density_methods: list = field(default_factory=lambda: ["rotation"])
    fpe_coefficients: str = "derived"
    domain: str = "full"
    dead_zone: float = 0.05
    scheme: str = "euler2"
    mc_scheme: str = "weak2"
    h: float = 1e-3
    n_steps: int = 20000
    horizon: float = 200.0
    n_paths: int = 256
    seed: int = 0
    keep_every: int = 10
    x0: list = None
    perturbation: float = 0.05
    deterministic: bool = False
    output: str = "stoch_duopoly"
    format: str = "text"

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self):
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(isinstance(self.n_grid, int) and 16 <= self.n_grid <= 2**20, f"n_grid must be an integer in [16, 2**20], got {self.n_grid!r}")
        need(isinstance(self.h, (int, float)) and 0 < self.h <= 0.1, f"h must lie in (0, 0.1], got {self.h!r}")
        need(isinstance(self.steps, int) and self.steps >= 2, f"steps must be an integer >= 2, got {self.steps!r}")
        need(self.param in ("alpha", "beta"), f"param must be alpha or beta, got {self.param!r}")
        need(self.method in METHODS, f"method must be one of {METHODS}, got {self.method!r}")
        need(self.density in DENSITIES, f"density must be one of {DENSITIES}, got {self.density!r}")
        need(self.fpe_coefficients in COEFFICIENT_MODES, f"fpe_coefficients must be one of {COEFFICIENT_MODES}")
        need(self.domain in ("half", "full"), "domain must be half or full")
        need(self.scheme in SCHEMES, f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        need(self.mc_scheme in MC_SCHEMES, f"mc_scheme must be one of {MC_SCHEMES}")
        need(isinstance(self.n_steps, int) and self.n_steps >= 1, "n_steps must be a positive integer")
        need(isinstance(self.n_paths, int) and self.n_paths >= 1, "n_paths must be a positive integer")
        need(isinstance(self.keep_every, int) and self.keep_every >= 1, "keep_every must be a positive integer")
        need(isinstance(self.seed, int) and self.seed >= 0, "seed must be a non-negative integer")
        need(self.horizon > 0, "horizon must be positive")
        need(self.format in ("text", "csv"), "format must be text or csv")
        methods = self.density_methods
        if isinstance(methods, str):
            methods = [m.strip() for m in methods.split(",") if m.strip()]
            self.density_methods = methods
        need(methods and all(m in DENSITY_METHODS for m in methods), f"density_methods must be drawn from {DENSITY_METHODS}")
        if self.x0 is not None:
            need(len(self.x0) == 2, "x0 must have two entries")
        self.game()

    def game(self):
        b = dict(b11=self.b11, b12=self.b12, b21=self.b21, b22=self.b22)
        if self.alpha is not None or self.beta is not None:
            alpha = self.alpha if self.alpha is not None else 0.0
            beta = self.beta if self.beta is not None else 0.0
            b = dict(b11=alpha, b12=-beta, b21=beta, b22=alpha)
        return GameParams(self.c1, self.c2, self.k1, self.k2, **b)


def _report_rows(cfg):
    game = cfg.game()
    x0 = stationary_state(game)
    gam = gamma_offsets(game)
    sys_ = linearize(game)
    mu1, mu2 = characteristic_roots(sys_)
    rows = [
        ("x10", x0.x10), ("x20", x0.x20),
        ("gamma1", gam.gamma1), ("gamma2", gam.gamma2),
        ("a11", sys_.a[0, 0]), ("a12", sys_.a[0, 1]), ("a21", sys_.a[1, 0]), ("a22", sys_.a[1, 1]),
        ("mu1_re", mu1.real), ("mu1_im", mu1.imag), ("mu2_re", mu2.real), ("mu2_im", mu2.imag),
        ("half_trace", 0.5 * (mu1 + mu2).real), ("half_trace_formula", half_trace_identity(game)),
        ("roots_complex", int(roots_complex(sys_))),
    ]
    ok, alpha, beta = is_rotation_scaling(sys_)
    if ok and beta != 0:
        est = game_lambda(game, "closed_form", cfg.n_grid)
        rows += [("alpha", alpha), ("beta", beta), ("lambda_closed_form", est.value),
                 ("D2", est.diagnostics["D2"]), ("E2", est.diagnostics["E2"])]
    return rows


def cmd_analyze(cfg, out=sys.stdout):
    rows = _report_rows(cfg)
    if cfg.format == "csv":
        out.write("key,value\n")
        for k, v in rows:
            out.write(f"{k},{output.fmt(v)}\n")
        return
    values = dict(rows)
    out.write(f"stationary state   x10 = {values['x10']:.6f}, x20 = {values['x20']:.6f}\n")
    out.write(f"noise offsets      gamma1 = {values['gamma1']:.9g}, gamma2 = {values['gamma2']:.9g}\n")
    out.write(f"drift matrix A     [[{values['a11']:.6g}, {values['a12']:.6g}], [{values['a21']:.6g}, {values['a22']:.6g}]]\n")
    for name in ("mu1", "mu2"):
        re, im = values[f"{name}_re"], values[f"{name}_im"]
        out.write(f"root {name:<13} {re:.6f}{im:+.6f}i\n")
    out.write(f"half trace         {values['half_trace']:.6f} (formula {values['half_trace_formula']:.6f})\n")
    out.write(f"complex roots      {'yes' if values['roots_complex'] else 'no'}\n")
    if "lambda_closed_form" in values:
        out.write(f"lambda (alpha={values['alpha']:g}, beta={values['beta']:g})  {values['lambda_closed_form']:.9g}\n")


def cmd_sweep(cfg, out=sys.stdout):
    default = (-3.0, 3.0) if cfg.param == "alpha" else (0.1, 4.0)
    start = default[0] if cfg.start is None else cfg.start
    stop = default[1] if cfg.stop is None else cfg.stop
    game = cfg.game()
    if not is_rotation_scaling(linearize(game))[0]:
        raise ConfigError("sweep needs a rotation-scaling diffusion: set alpha and beta")
    mc = dict(horizon=cfg.horizon, step=cfg.h, n_paths=cfg.n_paths, seed=cfg.seed, scheme=cfg.mc_scheme)
    result = sweep(game, cfg.param, start, stop, cfg.steps, cfg.method, cfg.n_grid, cfg.density,
                   cfg.fpe_coefficients, cfg.dead_zone, mc)
    if not any(p.ok for p in result.points):
        raise NumericalFailure("every sweep point failed: " + (result.points[0].error or "unknown error"))
    changes = find_sign_changes(result)
    output.write_sweep_csv(f"{cfg.output}_sweep.csv", result)
    output.write_roots_csv(f"{cfg.output}_roots.csv", changes)
    svg = output.line_plot(
        [(f"lambda ({cfg.method})", result.params, result.values)],
        title=f"top Lyapunov exponent vs {cfg.param}", xlabel=cfg.param, ylabel="lambda",
        zero_line=True, markers=[c.root_estimate for c in changes],
    )
    output.write_svg(f"{cfg.output}_sweep.svg", svg)
    gaps = sum(not p.ok for p in result.points)
    out.write(f"{len(result.points)} points ({gaps} gaps), {len(changes)} sign change(s)\n")
    for c in changes:
        out.write(f"  root {c.root_estimate:.6f} in [{c.param_lo:.6f}, {c.param_hi:.6f}]\n")


def _density(cfg, coeffs, method):
    # n_grid counts intervals on [0, pi]; full-domain solvers get twice as many
    # so that every method lands on the same grid
    if method == "closed_form":
        return density_closed_form(coeffs, 2 * cfg.n_grid, cfg.fpe_coefficients)
    if method == "backward_difference":
        return density_backward_difference(coeffs, cfg.n_grid, cfg.fpe_coefficients)
    ok, alpha, beta = is_rotation_scaling(coeffs.source)
    if not ok:
        raise ConfigError("rotation density needs a rotation-scaling diffusion: set alpha and beta")
    return density_rotation_closed_form(coeffs, alpha, beta, 2 * cfg.n_grid)


def cmd_density(cfg, out=sys.stdout):
    coeffs = AngularCoeffs(linearize(cfg.game()))
    series = []
    for method in cfg.density_methods:
        p = _density(cfg, coeffs, method)
        p = p.fold() if cfg.domain == "half" else p.unfold()
        output.write_density_csv(f"{cfg.output}_density_{method}.csv", p)
        series.append((method, p.theta, p.values))
        lam = lambda_quadrature(coeffs, p).value
        out.write(f"{method:<20} lambda = {lam:.9g}  flags = {','.join(p.flags) or '-'}\n")
    svg = output.line_plot(series, title="stationary phase density", xlabel="theta", ylabel="p(theta)")
    output.write_svg(f"{cfg.output}_density.svg", svg)


def _plots(prefix, traj, label):
    note = f"truncated at step {traj.truncated_at}" if traj.truncated_at is not None else None
    ts = output.line_plot([("x1", traj.steps, traj.x1), ("x2", traj.steps, traj.x2)],
                          title=f"{label}: outputs vs step", xlabel="n", ylabel="x", note=note)
    ph = output.line_plot([("", traj.x1, traj.x2)], title=f"{label}: phase plot", xlabel="x1", ylabel="x2", note=note)
    output.write_svg(f"{prefix}_timeseries.svg", ts)
    output.write_svg(f"{prefix}_phase.svg", ph)


def cmd_simulate(cfg, out=sys.stdout):
    game = cfg.game()
    if cfg.x0 is not None:
        x0 = np.array(cfg.x0, dtype=float)
    else:
        x0 = stationary_state(game).as_array() * (1.0 + cfg.perturbation)
    traj = simulate(game, x0, cfg.scheme, cfg.h, cfg.n_steps, cfg.seed, cfg.keep_every)
    output.write_trajectory_csv(f"{cfg.output}_trajectory.csv", traj)
    _plots(cfg.output, traj, "SDE" if cfg.scheme != "ode_rk4" else "ODE")
    out.write(f"{cfg.scheme}: {len(traj.steps)} states kept, final x = ({traj.x1[-1]:.9g}, {traj.x2[-1]:.9g})\n")
    if traj.truncated_at is not None:
        out.write(f"  trajectory truncated at step {traj.truncated_at}\n")
    if cfg.deterministic:
        ode = simulate(game, x0, "ode_rk4", cfg.h, cfg.n_steps, cfg.seed, cfg.keep_every)
        output.write_trajectory_csv(f"{cfg.output}_ode_trajectory.csv", ode)
        _plots(f"{cfg.output}_ode", ode, "ODE")
        out.write(f"ode_rk4: final x = ({ode.x1[-1]:.9g}, {ode.x2[-1]:.9g})\n")


def cmd_mc_lambda(cfg, out=sys.stdout):
    game = cfg.game()
    est = lambda_monte_carlo(linearize(game), cfg.horizon, cfg.h, cfg.n_paths, cfg.seed, cfg.mc_scheme)
    rows = [("lambda_monte_carlo", est.value), ("standard_error", est.standard_error), ("n_paths", est.diagnostics["n_paths"])]
    ok, _, beta = is_rotation_scaling(linearize(game))
    if ok and beta != 0:
        rows.append(("lambda_quadrature", game_lambda(game, "quadrature", cfg.n_grid).value))
    if cfg.format == "csv":
        out.write("key,value\n")
        for k, v in rows:
            out.write(f"{k},{output.fmt(v)}\n")
    else:
        for k, v in rows:
            out.write(f"{k:<20} {v:.9g}\n")


HANDLERS = {
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "density": cmd_density,
    "simulate": cmd_simulate,
    "mc-lambda": cmd_mc_lambda,
}


def _flag_type(f):
    if f.type in (float, "float"):
        return float
    if f.type in (int, "int"):
        return int
    return str


def build_parser():
    parser = argparse.ArgumentParser(prog="stoch-duopoly", description="Stochastic stability of a Cournot duopoly.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON configuration file")
    for f in fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name == "deterministic":
            parser.add_argument(flag, action="store_true", default=argparse.SUPPRESS)
        elif f.name == "x0":
            parser.add_argument(flag, type=float, nargs=2, default=argparse.SUPPRESS)
        elif f.name in ("alpha", "beta", "start", "stop"):
            parser.add_argument(flag, type=float, default=argparse.SUPPRESS)
        else:
            parser.add_argument(flag, type=_flag_type(f), default=argparse.SUPPRESS)
    return parser


def load_config(args):
    data = {}
    if args.config:
        with open(args.config) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{args.config}: top level must be a JSON object")
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    if "x0" in overrides:
        overrides["x0"] = list(overrides["x0"])
    data.update(overrides)
    return RunConfig.from_dict(data)


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        HANDLERS[args.command](cfg, out)
    except (ConfigError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, DegenerateInput) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
