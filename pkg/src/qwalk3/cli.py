"""
Command-line front end.

Usage::

    qwalk3 simulate --theta pi/4 --spin 1/sqrt3,1/sqrt3,1/sqrt3 --time 5000
    qwalk3 limit    --grover --spin 0,1,0 --window 20
    qwalk3 compare  --theta pi/4 --spin 1/sqrt3,1/sqrt3,1/sqrt3 --time 5000
    qwalk3 rescaled --theta pi/4 --spin 1/sqrt3,1/sqrt3,1/sqrt3 --time 2000
    qwalk3 uniform  --c-s 1/3,2*sqrt2/3 --example ex1 --n 5 --time 5000

Every command writes one table (CSV by default, or JSON) to ``--output`` or
stdout.  Exit codes: 0 success, 2 bad configuration, 3 a numerical
invariant was violated during the run.
"""

from __future__ import annotations

import argparse
import ast
import io
import json
import math
import operator
import re
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import __version__
from .core import (
    CoinParameters,
    InvalidParameters,
    SpinVector,
    WalkState,
    build_coin,
    iter_evolve,
    localized_initial_state,
    position_distribution,
)
from .limit import (
    empirical_moment,
    empirical_rescaled_cdf,
    is_localized,
    limit_constants,
    limit_distribution,
    limit_measure_origin,
    rescaled_grid,
)
from .uniform import (
    comb_envelope,
    delocalized_initial_state,
    example_spin,
    limit_measure_delocalized,
    uniform_plateau_report,
)

COMMANDS = ("simulate", "limit", "compare", "rescaled", "uniform")
EXAMPLES = ("ex1", "ex2", "ex3")
TRACE_TIMES = (100, 200, 500, 1000, 2000, 5000)
AVERAGE_WINDOW = 100
GRID_POINTS = 400
NORM_DRIFT_TOL = 1e-10
INPUT_UNIT_TOL = 1e-9

_DEFAULT_WINDOW = {"simulate": None, "limit": 20, "compare": 10, "rescaled": None, "uniform": 5}


class ConfigError(ValueError):
    """Invalid command-line configuration (exit code 2)."""


class InvariantViolation(RuntimeError):
    """A run broke a numerical invariant such as norm conservation (exit code 3)."""


# --- parsing ---------------------------------------------------------------

_NAMES = {
    "pi": math.pi,
    "sqrt2": math.sqrt(2.0),
    "sqrt3": math.sqrt(3.0),
    "i": 1j,
    "j": 1j,
}
_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {"sqrt": lambda v: v**0.5}
_IMAG_SUFFIX = re.compile(r"(\d\.?)i\b")


def parse_number(text: str) -> complex:
    """Evaluate a small arithmetic expression such as ``1/sqrt3`` or ``2*sqrt2/3``.

    Allowed: numeric literals, ``pi``, ``sqrt2``, ``sqrt3``, the imaginary
    unit ``i`` (or ``j``), ``sqrt(...)`` and ``+ - * / **``.
    """

    def ev(node: ast.AST) -> complex:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return node.value
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
            and not node.keywords
        ):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ConfigError(f"unsupported token in {text!r}")

    try:
        # 0.5i -> 0.5j, so the imaginary suffix printed in CSV output parses back
        tree = ast.parse(_IMAG_SUFFIX.sub(r"\1j", text.strip()), mode="eval")
        value = ev(tree)
    except ConfigError:
        raise
    except (SyntaxError, ZeroDivisionError, OverflowError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot parse number {text!r}: {exc}") from None
    return complex(value)


def parse_real(text: str) -> float:
    z = parse_number(text)
    if abs(z.imag) > 0.0:
        raise ConfigError(f"expected a real number, got {text!r}")
    return float(z.real)


def parse_spin(text: str) -> SpinVector:
    """Three (possibly complex) weights, or six numbers read as ``re,im`` pairs."""
    parts = [p for p in text.split(",")]
    if len(parts) == 3:
        vals = [parse_number(p) for p in parts]
    elif len(parts) == 6:
        re_im = [parse_real(p) for p in parts]
        vals = [complex(re_im[2 * i], re_im[2 * i + 1]) for i in range(3)]
    else:
        raise ConfigError(f"spin needs 3 values or 3 re,im pairs, got {len(parts)} fields")
    norm2 = sum(abs(v) ** 2 for v in vals)
    if abs(norm2 - 1.0) > INPUT_UNIT_TOL:
        raise ConfigError(f"spin is not normalised (|alpha|^2+|beta|^2+|gamma|^2 = {norm2:.17g})")
    return SpinVector.normalized(*vals)


def parse_coin(theta: str | None, grover: bool, cs: str | None) -> CoinParameters:
    if sum((theta is not None, bool(grover), cs is not None)) != 1:
        raise ConfigError("give exactly one of --theta, --grover, --c-s")
    try:
        if grover:
            return CoinParameters.grover()
        if theta is not None:
            return CoinParameters.from_theta(parse_real(theta))
        fields = cs.split(",")
        if len(fields) != 2:
            raise ConfigError(f"--c-s expects 'c,s', got {cs!r}")
        c, s = (parse_real(f) for f in fields)
        r2 = c * c + s * s
        if abs(r2 - 1.0) > INPUT_UNIT_TOL:
            raise ConfigError(f"(c, s) is not on the unit circle (c^2+s^2 = {r2:.17g})")
        r = math.sqrt(r2)
        return CoinParameters.from_cs(c / r, s / r)
    except InvalidParameters as exc:
        raise ConfigError(str(exc)) from None


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: CoinParameters
    spin: SpinVector | None
    time: int
    window: int | None
    n: int | None = None
    example: str | None = None
    format: str = "csv"
    output_path: str = "-"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwalk3", description="3-state quantum walk: simulation vs. limit theorems")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "exact distribution at time t",
        "limit": "pointwise limit measure for an origin start",
        "compare": "simulated vs. limit measure with error summary",
        "rescaled": "CDF of X_t/t vs. the rescaled weak limit",
        "uniform": "delocalized comb start and its uniform limit plateau",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        coin = p.add_argument_group("coin (exactly one)")
        coin.add_argument("--theta", help="coin angle, e.g. pi/4")
        coin.add_argument("--grover", action="store_true", help="Grover coin (c=-1/3, s=2*sqrt2/3)")
        coin.add_argument("--c-s", dest="cs", metavar="C,S", help="explicit cos,sin pair, e.g. 1/3,2*sqrt2/3")
        p.add_argument("--spin", help="alpha,beta,gamma (or six re,im numbers)")
        p.add_argument("--time", type=int, default=5000 if name == "uniform" else None)
        p.add_argument("--window", type=int, default=_DEFAULT_WINDOW[name])
        if name == "uniform":
            p.add_argument("--n", type=int, required=True)
            p.add_argument("--example", choices=EXAMPLES, required=True)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default="-", help="output file (default: stdout)")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = parse_coin(ns.theta, ns.grover, ns.cs)
    if ns.command == "uniform":
        if ns.spin is not None:
            raise ConfigError("uniform takes its spin from --example; drop --spin")
        spin = example_spin(ns.example)
        if ns.n < 1:
            raise ConfigError("--n must be >= 1")
    else:
        if ns.spin is None:
            raise ConfigError("--spin is required")
        spin = parse_spin(ns.spin)
    time = ns.time
    if time is None:
        if ns.command != "limit":
            raise ConfigError("--time is required")
        time = 0
    if time < 0:
        raise ConfigError("--time must be >= 0")
    if ns.command in ("compare", "rescaled") and time < 1:
        raise ConfigError(f"{ns.command} needs --time >= 1")
    if ns.window is not None and ns.window < 0:
        raise ConfigError("--window must be >= 0")
    return RunConfig(
        command=ns.command,
        params=params,
        spin=spin,
        time=time,
        window=ns.window,
        n=getattr(ns, "n", None),
        example=getattr(ns, "example", None),
        format=ns.format,
        output_path=ns.output,
    )


# --- tables and output -----------------------------------------------------


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple]
    metadata: dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{format_float(z.real)}{format(z.imag, '+.17g')}i"


def _csv_value(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    if isinstance(v, complex):
        return format_complex(v)
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(_json_value(v), separators=(",", ":"))
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def render(table: Table, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "metadata": _json_value(table.metadata),
            "rows": [{c: _json_value(v) for c, v in zip(table.columns, r)} for r in table.rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    for k, v in table.metadata.items():
        buf.write(f"# {k}: {_csv_value(v)}\n")
    buf.write(",".join(table.columns) + "\n")
    for r in table.rows:
        buf.write(",".join(_csv_value(v) for v in r) + "\n")
    return buf.getvalue()


def write_output(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# --- commands --------------------------------------------------------------


def _common_metadata(cfg: RunConfig) -> dict[str, Any]:
    md: dict[str, Any] = {
        "command": cfg.command,
        "theta": cfg.params.theta,
        "c": cfg.params.c,
        "s": cfg.params.s,
    }
    if cfg.spin is not None:
        md.update(alpha=cfg.spin.alpha, beta=cfg.spin.beta, gamma=cfg.spin.gamma)
    md["time"] = cfg.time
    return md


def _check_norm(state: WalkState, t: int) -> float:
    total = state.norm2()
    if abs(1.0 - total) > NORM_DRIFT_TOL:
        raise InvariantViolation(f"norm drift {abs(1.0 - total):.3e} at t={t}")
    return total


def _simulate(initial: WalkState, cfg: RunConfig, t: int) -> WalkState:
    state = initial
    for state in iter_evolve(initial, build_coin(cfg.params), t):
        pass
    _check_norm(state, t)
    return state


def cmd_simulate(cfg: RunConfig) -> Table:
    state = _simulate(localized_initial_state(cfg.spin), cfg, cfg.time)
    w = cfg.time if cfg.window is None else cfg.window
    xs = range(-w, w + 1)
    amps = state.window(-w, w)
    q = amps.real**2 + amps.imag**2
    p = q[:, 1] + (q[:, 0] + q[:, 2])
    rows = [(x, p[i], q[i, 0], q[i, 1], q[i, 2]) for i, x in enumerate(xs)]
    md = _common_metadata(cfg)
    md["total_probability"] = state.norm2()
    return Table(["x", "p", "p0", "p1", "p2"], rows, md)


def cmd_limit(cfg: RunConfig) -> Table:
    w = cfg.window
    xs = np.arange(-w, w + 1)
    lim = limit_measure_origin(cfg.params, cfg.spin, xs)
    consts = limit_constants(cfg.params, cfg.spin)
    md = _common_metadata(cfg)
    del md["time"]
    md.update(
        nu=consts.nu,
        A=complex(consts.a_const),
        B=complex(consts.b_const),
        delta=consts.delta_mass,
        localized=is_localized(cfg.params, cfg.spin),
        window_sum=math.fsum(lim),
    )
    return Table(["x", "limit"], [(int(x), float(v)) for x, v in zip(xs, lim)], md)


def cmd_compare(cfg: RunConfig) -> Table:
    w, t = cfg.window, cfg.time
    initial = localized_initial_state(cfg.spin)
    lim = limit_measure_origin(cfg.params, cfg.spin, np.arange(-w, w + 1))
    acc = np.zeros(2 * w + 1)
    at_t = None
    for tau, state in enumerate(iter_evolve(initial, build_coin(cfg.params), t + AVERAGE_WINDOW)):
        if tau < t:
            continue
        pw = position_distribution(state).window(-w, w)
        if tau == t:
            at_t = pw
            _check_norm(state, tau)
        acc += pw
    _check_norm(state, t + AVERAGE_WINDOW)
    avg = acc / (AVERAGE_WINDOW + 1)
    err = np.abs(at_t - lim)
    md = _common_metadata(cfg)
    md.update(
        delta=limit_constants(cfg.params, cfg.spin).delta_mass,
        max_error=float(err.max()),
        average_window=[t, t + AVERAGE_WINDOW],
        time_averaged_max_error=float(np.abs(avg - lim).max()),
    )
    rows = [(x, at_t[i], lim[i], err[i]) for i, x in enumerate(range(-w, w + 1))]
    return Table(["x", "simulated", "limit", "abs_error"], rows, md)


def cmd_rescaled(cfg: RunConfig) -> Table:
    t = cfg.time
    state = _simulate(localized_initial_state(cfg.spin), cfg, t)
    dist = position_distribution(state)
    law = limit_distribution(cfg.params, cfg.spin)
    grid = rescaled_grid(GRID_POINTS)
    emp = empirical_rescaled_cdf(dist, t, grid)
    lim = np.asarray(law.cdf(grid))
    y = dist.positions / t
    h = law.support_half_width
    md = _common_metadata(cfg)
    md.update(
        delta=law.atom_mass,
        support_half_width=h,
        kolmogorov_distance=float(np.abs(emp - lim).max()),
        moment1_empirical=empirical_moment(dist, t, 1),
        moment1_limit=law.moment(1),
        moment2_empirical=empirical_moment(dist, t, 2),
        moment2_limit=law.moment(2),
        mass_near_origin=float(dist.masses[np.abs(y) < 0.01].sum()),
        mass_outside_support=float(dist.masses[np.abs(y) > h + 0.02].sum()),
    )
    rows = [(grid[i], emp[i], lim[i]) for i in range(grid.size)]
    return Table(["y", "empirical_cdf", "limit_cdf"], rows, md)


def cmd_uniform(cfg: RunConfig) -> Table:
    n, w = cfg.n, cfg.window
    env = comb_envelope(n, cfg.params)
    initial = delocalized_initial_state(env, cfg.params, cfg.spin)
    report = uniform_plateau_report(n, cfg.params, cfg.spin)

    def limit_at(x: int) -> float:
        return limit_measure_delocalized(env, cfg.params, cfg.spin, x)

    # errors are measured on a fixed window around the plateau; the ballistic
    # fronts near x = +-h t carry O(1e-2) per site but leave every fixed x
    lo, hi = -1 - w, 2 * n - 1 + w
    lim = np.array([limit_at(x) for x in range(lo, hi + 1)])
    t_end = max(cfg.time, TRACE_TIMES[-1])
    trace = []
    at_t = None
    for tau, state in enumerate(iter_evolve(initial, build_coin(cfg.params), t_end)):
        if tau in TRACE_TIMES or tau == cfg.time:
            _check_norm(state, tau)
            pw = position_distribution(state).window(lo, hi)
            if tau in TRACE_TIMES:
                trace.append([tau, float(np.abs(pw - lim).max())])
            if tau == cfg.time:
                at_t = pw
    rows = [(x, at_t[i], lim[i]) for i, x in enumerate(range(lo, hi + 1))]
    md = _common_metadata(cfg)
    md.update(
        example=cfg.example,
        n=n,
        classification=report.kind,
        plateau=report.plateau,
        support=list(report.support),
        total_limit_mass=report.total_mass,
        max_error=float(np.abs(at_t - lim).max()),
        trace=trace,
    )
    return Table(["x", "simulated", "limit"], rows, md)


_DISPATCH = {
    "simulate": cmd_simulate,
    "limit": cmd_limit,
    "compare": cmd_compare,
    "rescaled": cmd_rescaled,
    "uniform": cmd_uniform,
}


def run(cfg: RunConfig) -> Table:
    return _DISPATCH[cfg.command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        text = render(run(cfg), cfg.format)
        write_output(text, cfg.output_path)
    except ConfigError as exc:
        print(f"qwalk3: error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"qwalk3: invariant violated: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"qwalk3: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
