"""Command-line front end: ``oscint <command> [flags]``.

Commands: det-sweep, propagator, converge, fluctuation, classical-exponent,
evolve, verify. Flags may also come from ``--config FILE`` holding
``key=value`` lines named like the long flags; explicit flags win.

Exit codes: 0 success, 1 a verification check failed, 2 usage or
configuration error (domain errors are reported by class name).
"""
from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import pathdecomp as pd
from . import propagator as prop
from . import tridiag as td
from .errors import EmitError, OscintError
from .model import OscillatorParams, validate
from .verify import VerifyConfig, run_battery

COMMANDS = ("det-sweep", "propagator", "converge", "fluctuation", "classical-exponent",
            "evolve", "verify")
CONVERGE_COLUMNS = ("n", "abs_err", "eps_det", "Q_n", "slope_running")


class ConfigError(Exception):
    pass


# -- serialization -----------------------------------------------------------

def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    return v


def render(rows: list[dict], fmt: str, meta: dict | None = None) -> str:
    if not rows:
        raise EmitError("refusing to emit an empty table")
    if fmt == "csv":
        cols = list(rows[0])
        lines = [",".join(cols)]
        lines += [",".join(_csv_cell(r[c]) for c in cols) for r in rows]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        doc = {"meta": _json_value(meta or {}), "rows": [_json_value(r) for r in rows]}
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    raise EmitError(f"unknown format {fmt!r}")


def emit(rows: list[dict], fmt: str, path: str | None, meta: dict | None = None) -> None:
    """Write ``rows`` as CSV or JSON to ``path`` (stdout when ``None``).

    The text is rendered completely before the file is opened, so a failure
    leaves no partial file behind.
    """
    text = render(rows, fmt, meta)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise EmitError(f"cannot write {path}: {exc}") from exc


# -- argument handling -------------------------------------------------------

def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    out = []
    for x in str(text).split(","):
        x = x.strip()
        if x:
            v = float(x)
            if v != int(v):
                raise argparse.ArgumentTypeError(f"not an integer: {x}")
            out.append(int(v))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oscint", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"oscint {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value file; explicit flags override it")
        p.add_argument("--lambda", dest="lam", type=float, default=1.0)
        p.add_argument("--t", type=float, default=1.0)
        p.add_argument("--mass", type=float, default=1.0)
        p.add_argument("--hbar", type=float, default=1.0)
        p.add_argument("--q0", type=_floats, default=[1.0 if name == "verify" else 0.0])
        p.add_argument("--q", type=_floats, default=[2.0 if name == "verify" else 1.0])
        p.add_argument("--dim", type=int, default=1)
        p.add_argument("--n", "--n-list", dest="n", type=_ints, default=None)
        p.add_argument("--path", default="linear",
                       help="linear | classical | sine | file:<path>")
        p.add_argument("--seed", type=int, default=7 if name == "verify" else 0)
        p.add_argument("--format", choices=("csv", "json"),
                       default="json" if name == "verify" else "csv")
        p.add_argument("--out", default=None)
        p.add_argument("--faithful", action="store_true",
                       help="use the exponent without the 1/2 (known not to solve the Schrodinger equation)")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
        if name == "verify":
            p.add_argument("--n-max", type=int, default=512)
        if name == "classical-exponent":
            p.add_argument("--paths", type=int, default=10, help="number of random sine paths")
        if name == "evolve":
            p.add_argument("--center", type=float, default=1.0)
            p.add_argument("--momentum", type=float, default=0.0)
            p.add_argument("--sigma", type=float, default=None,
                           help="position spread; default is the ground-state width")
            p.add_argument("--steps", type=int, default=10)
    return parser


_BOOL_KEYS = {"faithful"}


def _read_config(path: str) -> dict[str, str]:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.lstrip("-")] = v
    return out


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        return args
    cfg = _read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    by_flag = {}
    for action in sub._actions:
        for opt in action.option_strings:
            by_flag[opt.lstrip("-")] = action
    defaults = {}
    for key, val in cfg.items():
        action = by_flag.get(key)
        if action is None or action.dest in ("config", "help"):
            raise ConfigError(f"unknown config key {key!r}")
        if action.dest in _BOOL_KEYS:
            if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ConfigError(f"{key} must be a boolean, got {val!r}")
            defaults[action.dest] = val.lower() in ("true", "1", "yes")
        else:
            defaults[action.dest] = val
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _params(args) -> OscillatorParams:
    q0 = args.q0 if len(args.q0) > 1 else args.q0[0]
    q = args.q if len(args.q) > 1 else args.q[0]
    return OscillatorParams(lam=args.lam, t=args.t, mass=args.mass, hbar=args.hbar,
                            q0=q0, q=q, d=args.dim)


def _meta(args) -> dict:
    echo = {k: v for k, v in sorted(vars(args).items()) if k not in ("jobs", "out", "config")}
    return {"artifact": "oscint", "version": __version__, "config": echo}


def _pmap(func, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, items))
    return [func(x) for x in items]


# -- commands ----------------------------------------------------------------

def cmd_det_sweep(args):
    p = _params(args)
    validate(p, 1)
    ns = args.n or [1000, 10000, 100000]
    target = math.sin(p.lam * p.t) / p.lam if p.lam else p.t

    def row(n):
        v = td.scaled_det(n, p.lam, p.t)
        return {"n": n, "eps_det": v, "abs_err": abs(v - target)}

    return _pmap(row, ns, args.jobs), {}, True


def _complex_row(kind, n, z):
    return {"kind": kind, "n": n, "re": z.real, "im": z.imag, "mod": abs(z), "phase": cmath.phase(z)}


def cmd_propagator(args):
    p = _params(args)
    n = (args.n or [1000])[0]
    validate(p, n)
    if p.d == 1:
        kn = prop.finite_n_propagator(p, validate(p, n), faithful=args.faithful).amplitude
        kx = prop.exact_propagator(p, faithful=args.faithful).amplitude
    else:
        kn = prop.d_dim_propagator(p, n=n, faithful=args.faithful).amplitude
        kx = prop.d_dim_propagator(p, faithful=args.faithful).amplitude
    return [_complex_row("finite", n, kn), _complex_row("exact", None, kx)], {}, True


def cmd_converge(args):
    p = _params(args)
    ns = args.n or [1000, 10000, 100000]
    sweep = prop.convergence_sweep(p, ns, faithful=args.faithful, jobs=args.jobs)
    rows = [{c: getattr(r, c) for c in CONVERGE_COLUMNS} for r in sweep.rows]
    return rows, {"slope": sweep.slope}, True


def cmd_fluctuation(args):
    p = _params(args)
    validate(p, 1)
    n = (args.n or [100])[0]
    k, D, c = td.fluctuation_table(n, p.lam, p.t)
    rows = [{"k": int(a), "D_k": float(b), "cos_k": float(x), "diff": float(b - x)}
            for a, b, x in zip(k, D, c)]
    return rows, {"max_abs_diff": float(np.max(np.abs(D - c)))}, True


def _user_path(args, p, g):
    src = args.path
    if src.startswith("file:"):
        return pd.build_path(p, g, "table", table=src[5:])
    return pd.build_path(p, g, src, seed=args.seed)


def cmd_classical_exponent(args):
    p = _params(args)
    n = (args.n or [1000])[0]
    g = validate(p, n)
    reduced = pd.classical_exponent_reduced(p, g)
    paths = [("linear", pd.build_path(p, g, "linear")),
             ("classical", pd.build_path(p, g, "classical"))]
    if args.path not in ("linear", "classical"):
        paths.append((args.path, _user_path(args, p, g)))
    paths += [(f"sine:{args.seed + i}", w) for i, w in enumerate(pd.random_paths(p, g, args.paths, args.seed))]

    def row(item):
        label, w = item
        q = pd.classical_exponent_direct(p, g, w)
        return {"path": label, "Q_n_direct": q, "Q_n_reduced": reduced,
                "rel_diff": abs(q - reduced) / abs(reduced) if reduced else abs(q)}

    rows = _pmap(row, paths, args.jobs)
    qs = [r["Q_n_direct"] for r in rows]
    return rows, {"relative_spread": (max(qs) - min(qs)) / abs(reduced) if reduced else max(qs) - min(qs)}, True


def cmd_evolve(args):
    p = _params(args)
    validate(p, 1)
    if p.lam > 0 and args.sigma is None:
        sigma = math.sqrt(p.hbar / (2 * p.mass * p.lam))
    else:
        sigma = args.sigma if args.sigma is not None else 1.0
    state = prop.GaussianState.from_sigma(args.center, args.momentum, sigma, p.hbar)
    rows = []
    for t in np.linspace(0.0, p.t, args.steps + 1)[1:]:
        pt = p.with_(t=float(t))
        s = prop.evolve_gaussian(pt, state, faithful=args.faithful)
        rows.append({"t": float(t), "center": s.center, "momentum": s.momentum,
                     "width_re": s.width.real, "width_im": s.width.imag,
                     "amp_re": s.amplitude.real, "amp_im": s.amplitude.imag,
                     "classical_center": prop.classical_center(pt, args.center, args.momentum)})
    return rows, {}, True


def cmd_verify(args):
    p = _params(args)
    validate(p, 1)
    cfg = VerifyConfig(lam=p.lam, t=p.t, q0=p.endpoints_1d[0], q=p.endpoints_1d[1],
                       n_max=args.n_max, seed=args.seed)
    checks = run_battery(cfg, jobs=args.jobs)
    rows = [c.as_row() for c in checks]
    failed = [c.name for c in checks if not c.passed]
    return rows, {"passed": not failed, "failed": failed}, not failed


HANDLERS = {
    "det-sweep": cmd_det_sweep, "propagator": cmd_propagator, "converge": cmd_converge,
    "fluctuation": cmd_fluctuation, "classical-exponent": cmd_classical_exponent,
    "evolve": cmd_evolve, "verify": cmd_verify,
}


def run(argv=None) -> int:
    try:
        args = parse_args(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    try:
        rows, extra, ok = HANDLERS[args.command](args)
        meta = _meta(args)
        meta.update(extra)
        emit(rows, args.format, args.out, meta)
    except OscintError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if "slope" in extra and args.format == "csv":
        print(f"fitted slope: {extra['slope']!r}", file=sys.stderr)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
