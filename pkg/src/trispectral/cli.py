"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 verification failure,
4 I/O error.
"""

import argparse
import csv
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import approx
from .basis import ParamTriple, dimension
from .boundary_lift import BoundaryTrace, lift_mu
from .coupling import TABLE_VERSION, ItildeTable, build_itilde
from .diffmat import assemble_x, assemble_y, oracle_assemble, write_coo
from .evolve import evolve, norm_drift
from .fast_apply import OpCounter, apply_e, apply_f, apply_x, apply_y, build_factors

MAX_LEVEL = 200
EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_IO = 0, 2, 3, 4

LIFT_TRACES = {
    "affine": lambda x, y: 1.0 + 2.0 * x - 3.0 * y,
    "constant": lambda x, y: 1.0 + 0.0 * x,
    "smooth": lambda x, y: np.exp(x) * np.cos(2.0 * y),
}


class ConfigError(Exception):
    pass


class VerificationError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    alpha: float
    beta: float
    gamma: float
    level: int
    nmax: int
    quad: tuple
    grid: int
    out: str
    cache: str
    verify: bool
    seed: int
    dt: float
    tfinal: float
    function: str

    @property
    def params(self):
        return ParamTriple(self.alpha, self.beta, self.gamma)


def _fmt(v):
    return f"{v:.17g}"


def _parse_quad(text):
    try:
        a, b = text.lower().split("x")
        n1, n2 = int(a), int(b)
    except ValueError:
        raise ConfigError(f"--quad expects N1xN2, got {text!r}") from None
    if n1 < 1 or n2 < 1:
        raise ConfigError("--quad node counts must be positive")
    return n1, n2


def _field(name, default):
    name = name or default
    if name in approx.TEST_FUNCTIONS:
        return approx.TEST_FUNCTIONS[name]
    if name in LIFT_TRACES:
        return LIFT_TRACES[name]
    if name.startswith("custom:"):
        expr = name[len("custom:"):]
        code = compile(expr, "<function>", "eval")
        ns = {k: getattr(np, k) for k in ("sin", "cos", "exp", "sqrt", "log", "pi", "abs", "maximum")}
        return lambda x, y: eval(code, {"__builtins__": {}}, dict(ns, x=x, y=y))
    raise ConfigError(f"unknown function {name!r}")


def to_config(ns):
    cfg = RunConfig(ns.command, ns.alpha, ns.beta, ns.gamma, ns.level, ns.nmax,
                    _parse_quad(ns.quad), ns.grid, ns.out, ns.cache, ns.verify,
                    ns.seed, ns.dt, ns.tfinal, ns.function)
    try:
        cfg.params
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    for name in ("level", "nmax"):
        v = getattr(cfg, name)
        if not 0 <= v <= MAX_LEVEL:
            raise ConfigError(f"--{name} must lie in [0, {MAX_LEVEL}], got {v}")
    if cfg.grid < 1:
        raise ConfigError("--grid must be at least 1")
    return cfg


def _open_out(cfg):
    if cfg.out in (None, "-"):
        return sys.stdout, False
    return open(cfg.out, "w", newline=""), True


def cache_path(cache_dir, p, M):
    al, be, ga = p.astuple()
    return Path(cache_dir) / f"itilde_a{al!r}_b{be!r}_g{ga!r}_M{M}_v{TABLE_VERSION}.bin"


def load_table(cfg, M):
    """Table from the cache directory when present and current, else built (and stored)."""
    p = cfg.params
    if not cfg.cache:
        return build_itilde(M, p)
    path = cache_path(cfg.cache, p, M)
    if path.exists():
        try:
            tab = ItildeTable.load(path)
            if tab.M == M and tab.params == p:
                return tab
        except ValueError:
            pass  # stale or foreign file; rebuild
    tab = build_itilde(M, p)
    path.parent.mkdir(parents=True, exist_ok=True)
    tab.dump(path)
    return tab


def cmd_assemble(cfg):
    M, p = cfg.level, cfg.params
    table = load_table(cfg, M)
    ops = [assemble_x(M, p, table), assemble_y(M, p, table)]
    out = Path(cfg.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    print(f"D={dimension(M)}")
    failed = False
    for op in ops:
        write_coo(out / f"{op.which}.txt", op.dense)
        print(f"{op.which}: max_skew_residual={op.skew_residual():g}")
        if cfg.verify:
            ref = oracle_assemble(op.which, M, p)
            scale = max(np.abs(ref).max(), np.finfo(float).tiny)
            err = np.abs(op.dense - ref).max() / scale
            ok = err <= 1e-9 and op.skew_residual() == 0.0
            failed |= not ok
            print(f"{op.which}: oracle_rel_err={err:.3e} {'PASS' if ok else 'FAIL'}")
    if failed:
        raise VerificationError("assembly does not match the quadrature oracle")


def bench_levels(level):
    levels = [m for m in (2, 5, 10, 20, 40, 80, 160) if m < level]
    return levels + [level]


def cmd_bench(cfg):
    rng = np.random.default_rng(cfg.seed)
    fh, own = _open_out(cfg)
    worst = 0.0
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["M", "D", "flops_F", "flops_E", "flops_Y", "wall_time_fast",
                    "wall_time_dense", "max_rel_err_vs_dense"])
        for M in bench_levels(cfg.level):
            p = cfg.params
            fac = build_factors(M, p)
            v = rng.standard_normal(fac.D)
            cf, ce, cy = OpCounter(), OpCounter(), OpCounter()
            apply_f(fac, v, cf)
            apply_e(fac, v, ce)
            t0 = time.perf_counter()
            fx = apply_x(fac, v)
            apply_y(fac, v, cy)
            t_fast = time.perf_counter() - t0
            X = assemble_x(M, p).dense
            Y = assemble_y(M, p).dense
            t0 = time.perf_counter()
            dx = X @ v
            dy = Y @ v
            t_dense = time.perf_counter() - t0
            fy = apply_y(fac, v)
            err = 0.0
            for fast, dense in ((fx, dx), (fy, dy)):
                scale = max(np.abs(dense).max(), np.finfo(float).tiny)
                err = max(err, np.abs(fast - dense).max() / scale if M else np.abs(fast).max())
            worst = max(worst, err)
            w.writerow([M, fac.D, cf.flops, ce.flops, cy.flops, _fmt(t_fast), _fmt(t_dense), _fmt(err)])
    finally:
        if own:
            fh.close()
    if cfg.verify and worst > 1e-11:
        raise VerificationError(f"fast apply deviates from dense product by {worst:.3e}")


def cmd_converge(cfg):
    name = cfg.function or "ex1_sqrt"
    f = _field(name, "ex1_sqrt")
    p = cfg.params
    quad = approx.duffy_quadrature(*cfg.quad)
    table, _ = approx.convergence_table(f, p, cfg.nmax, cfg.grid, quad)
    fh, own = _open_out(cfg)
    try:
        approx.write_convergence_csv(fh, table)
    finally:
        if own:
            fh.close()
    verdicts = []
    rate = approx.tail_decay_rate(table[:, 1])
    print(f"tail decay ratio={rate:.4f}", file=sys.stderr)
    if rate >= 0.9:
        print("NON-SPECTRAL: coefficient tail decays algebraically", file=sys.stderr)
    if name == "ex1_sqrt" and p == ParamTriple(1.0, 1.0, 1.0):
        ok = table[-1, 3] <= 1e-8 and table[-1, 1] <= 1e-8
        verdicts.append(ok)
        print(f"final e_2={table[-1, 3]:.3e} last |f_N|={table[-1, 1]:.3e} "
              f"{'PASS' if ok else 'FAIL'}", file=sys.stderr)
    if name == "ex3_sine":
        ptab, _ = approx.convergence_table(f, p, cfg.nmax, cfg.grid, quad, basis="poly")
        ok = table[-1, 3] <= ptab[-1, 3]
        verdicts.append(ok)
        print(f"W-system e_2={table[-1, 3]:.3e} polynomial e_2={ptab[-1, 3]:.3e} "
              f"{'PASS' if ok else 'FAIL'}", file=sys.stderr)
    if cfg.verify and not all(verdicts):
        raise VerificationError("convergence thresholds not met")


def cmd_evolve(cfg):
    if not cfg.dt > 0:
        raise ConfigError("--dt must be positive")
    if not cfg.tfinal >= 0:
        raise ConfigError("--tfinal must be nonnegative")
    M, p = cfg.level, cfg.params
    f = _field(cfg.function, "ex3_sine")
    a0 = approx.expand(f, M, p, approx.duffy_quadrature(*cfg.quad)).coeffs.data
    fac = build_factors(M, p)
    times, norms, _ = evolve(lambda a: apply_x(fac, a), a0, cfg.dt, cfg.tfinal)
    fh, own = _open_out(cfg)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "norm"])
        for t, n in zip(times, norms):
            w.writerow([_fmt(t), _fmt(n)])
    finally:
        if own:
            fh.close()
    drift = norm_drift(norms)
    print(f"relative norm drift={drift:.3e}", file=sys.stderr)
    if cfg.verify and drift > 1e-6:
        raise VerificationError(f"norm drift {drift:.3e} too large")


def cmd_lift(cfg):
    g = _field(cfg.function, "smooth")
    tr = BoundaryTrace.from_function(g)
    x, y = approx.cosine_grid(cfg.grid)
    mu = lift_mu(tr, x, y)
    fh, own = _open_out(cfg)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "mu"])
        for row in zip(x, y, mu):
            w.writerow([_fmt(v) for v in row])
    finally:
        if own:
            fh.close()
    if cfg.verify:
        on_edge = (x == 0) | (y == 0) | np.isclose(x + y, 1.0, rtol=0, atol=1e-14)
        err = np.abs(mu[on_edge] - tr.at_boundary(x[on_edge], y[on_edge])).max()
        if err > 1e-12:
            raise VerificationError(f"lift misses the trace by {err:.3e}")


COMMANDS = {"assemble": cmd_assemble, "bench": cmd_bench, "converge": cmd_converge,
            "evolve": cmd_evolve, "lift": cmd_lift}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=2.0)
    common.add_argument("--beta", type=float, default=2.0)
    common.add_argument("--gamma", type=float, default=2.0)
    common.add_argument("--level", type=int, default=8, help="truncation level M")
    common.add_argument("--nmax", type=int, default=8, help="expansion level")
    common.add_argument("--quad", default="64x64", help="Duffy quadrature nodes, N1xN2")
    common.add_argument("--grid", type=int, default=4, help="cosine error grid parameter")
    common.add_argument("--out", default=None, help="output file (directory for assemble)")
    common.add_argument("--cache", default=None, help="directory for cached coupling tables")
    common.add_argument("--verify", action="store_true")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--dt", type=float, default=1e-3)
    common.add_argument("--tfinal", type=float, default=1.0)
    common.add_argument("--function", default=None,
                        help="ex1_sqrt, ex3_sine, affine, constant, smooth or custom:EXPR")
    parser = argparse.ArgumentParser(prog="trispectral", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {"assemble": "write X and Y in coordinate format",
             "bench": "fast versus dense matvec report",
             "converge": "coefficient and error table for a test function",
             "evolve": "RK4 advection demo with the fast X apply",
             "lift": "sample the boundary lift on the cosine grid"}
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = to_config(ns)
        COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
