"""Command-line front end.

Subcommands: analyze, simulate, sweep, verify, repro.  Run configuration
comes from an optional JSON config file (--config) overridden by flags; each
subcommand accepts exactly the keys it uses and rejects everything else.
Exit codes: 0 success, 1 usage or I/O failure, 2 inadmissible parameters,
3 verification or reproduction failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .dynamics import (
    DEFAULT_MAX_ITER,
    GridSpec,
    basin_counts,
    iterate,
    sweep_grid,
    write_basin_csv,
    write_trajectory_csv,
)
from .model import (
    PARAM_KEYS,
    DomainFault,
    ModelParams,
    RegimeKind,
    State,
    classify_regime,
    params_from_dict,
)
from .repro import SCENARIOS, run_repro
from .stability import build_report, dumps_17g, render_report_text
from .verify import run_suites

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INADMISSIBLE = 2
EXIT_VERIFICATION = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1, not argparse's 2
        raise UsageError(message)


#: Config keys each subcommand accepts; anything else is rejected.
COMMAND_KEYS = {
    "analyze": ({"params"}, {"format", "out"}),
    "simulate": ({"params", "initial", "steps"}, {"stride", "out", "format"}),
    "sweep": ({"params", "grid"}, {"tol", "max_iter", "out", "format"}),
    "verify": ({"params", "seed"},
               {"samples", "param_samples", "period_samples", "pmax",
                "format", "out"}),
    "repro": ({"which"}, {"out", "stride", "format"}),
}

ALLOWED_FORMATS = {
    "analyze": ("text", "json"),
    "simulate": ("csv",),
    "sweep": ("csv",),
    "verify": ("text", "json"),
    "repro": ("text",),
}

_FLAG_NAMES = {"max_iter": "--max-iter", "param_samples": "--param-samples",
               "period_samples": "--period-samples"}


def _flag(key: str) -> str:
    return _FLAG_NAMES.get(key, "--" + key)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="toppmap",
        description="Discrete-time glucose/insulin/beta-cell map toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def shared(p):
        p.add_argument("--config", metavar="PATH",
                       help="JSON config file; flags override it")
        p.add_argument("--out", metavar="PATH")
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--max-iter", type=int)
        p.add_argument("--stride", type=int)
        p.add_argument("--format", choices=["json", "csv", "text"])
        p.add_argument("--dump-config", action="store_true",
                       help="print the effective config as JSON and exit")
        for key in PARAM_KEYS:
            p.add_argument(f"--{key}", type=float, metavar="V")

    p = sub.add_parser("analyze", help="regime, bounds, fixed points, stability")
    shared(p)

    p = sub.add_parser("simulate", help="iterate an orbit and write a CSV")
    shared(p)
    p.add_argument("--initial", metavar="X,Y,Z")
    p.add_argument("--steps", type=int)

    p = sub.add_parser("sweep", help="basin labels over a state-space lattice")
    shared(p)
    p.add_argument("--grid", metavar="x=LO:HI:N,y=LO:HI:N,z=LO:HI:N")

    p = sub.add_parser("verify", help="seeded randomized property suites")
    shared(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--param-samples", type=int)
    p.add_argument("--period-samples", type=int)
    p.add_argument("--pmax", type=int)

    p = sub.add_parser("repro", help="run a bundled scenario end to end")
    shared(p)
    p.add_argument("which", nargs="?", choices=sorted(SCENARIOS))

    return parser


def _parse_initial(text: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"--initial expects X,Y,Z, got {text!r}")
    try:
        return [float(v) for v in parts]
    except ValueError as exc:
        raise UsageError(f"bad --initial value: {exc}") from None


def _parse_grid_flag(text: str) -> dict:
    axes: dict = {}
    for part in text.split(","):
        name, sep, rest = part.partition("=")
        pieces = rest.split(":")
        if not sep or name not in ("x", "y", "z") or len(pieces) != 3:
            raise UsageError(
                f"--grid expects x=LO:HI:N,y=LO:HI:N,z=LO:HI:N, got {text!r}")
        try:
            axes[name] = [float(pieces[0]), float(pieces[1]), int(pieces[2])]
        except ValueError as exc:
            raise UsageError(f"bad --grid value: {exc}") from None
    return axes


def _require_number(key, v, *, integer=False, minimum=None):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise UsageError(f"{key} must be a number, got {v!r}")
    if integer and not isinstance(v, int):
        raise UsageError(f"{key} must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise UsageError(f"{key} must be >= {minimum}, got {v!r}")
    return v


def _validate(command: str, cfg: dict) -> dict:
    required, optional = COMMAND_KEYS[command]
    missing = sorted(required - cfg.keys())
    if missing:
        raise UsageError(f"'{command}' needs: {', '.join(missing)}")
    if "params" in cfg:
        try:
            params_from_dict(cfg["params"])
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from None
    if "initial" in cfg:
        v = cfg["initial"]
        if not (isinstance(v, (list, tuple)) and len(v) == 3):
            raise UsageError("initial must be a list [x, y, z]")
        vals = []
        for comp in v:
            comp = _require_number("initial component", comp)
            if not math.isfinite(comp) or comp < 0:
                raise UsageError(f"initial components must be finite and >= 0, "
                                 f"got {comp!r}")
            vals.append(float(comp))
        cfg["initial"] = vals
    if "steps" in cfg:
        _require_number("steps", cfg["steps"], integer=True, minimum=1)
    if "stride" in cfg:
        _require_number("stride", cfg["stride"], integer=True, minimum=1)
    if "seed" in cfg:
        _require_number("seed", cfg["seed"], integer=True, minimum=0)
    if "tol" in cfg:
        _require_number("tol", cfg["tol"])
        if not cfg["tol"] > 0:
            raise UsageError(f"tol must be > 0, got {cfg['tol']!r}")
    if "max_iter" in cfg:
        _require_number("max_iter", cfg["max_iter"], integer=True, minimum=1)
    for key in ("samples", "param_samples", "period_samples", "pmax"):
        if key in cfg:
            _require_number(key, cfg[key], integer=True, minimum=1)
    if "grid" in cfg:
        try:
            GridSpec.from_dict(cfg["grid"])
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad grid: {exc}") from None
    if "which" in cfg and cfg["which"] not in SCENARIOS:
        raise UsageError(f"which must be one of {', '.join(sorted(SCENARIOS))}")
    if "format" in cfg:
        if cfg["format"] not in ALLOWED_FORMATS[command]:
            raise UsageError(
                f"'{command}' supports format "
                f"{'|'.join(ALLOWED_FORMATS[command])}, got {cfg['format']!r}")
    if "out" in cfg and not isinstance(cfg["out"], str):
        raise UsageError("out must be a path string")
    return cfg


def _effective_config(ns) -> dict:
    command = ns.command
    required, optional = COMMAND_KEYS[command]
    allowed = required | optional
    cfg: dict = {}
    if ns.config:
        try:
            data = json.loads(Path(ns.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        for key, val in data.items():
            if key not in allowed:
                raise UsageError(f"config key {key!r} is not used by '{command}'")
            cfg[key] = val

    flag_params = {key: getattr(ns, key) for key in PARAM_KEYS
                   if getattr(ns, key) is not None}
    if flag_params:
        if "params" not in allowed:
            raise UsageError(f"parameter flags are not used by '{command}'")
        base = cfg.get("params", {})
        if not isinstance(base, dict):
            raise UsageError("config key 'params' must be an object")
        cfg["params"] = {**base, **flag_params}

    for key in ("out", "seed", "tol", "max_iter", "stride", "format",
                "steps", "samples", "param_samples", "period_samples", "pmax"):
        val = getattr(ns, key, None)
        if val is None:
            continue
        if key not in allowed:
            raise UsageError(f"{_flag(key)} is not used by '{command}'")
        cfg[key] = val
    if getattr(ns, "initial", None) is not None:
        cfg["initial"] = _parse_initial(ns.initial)
    if getattr(ns, "grid", None) is not None:
        cfg["grid"] = _parse_grid_flag(ns.grid)
    if getattr(ns, "which", None) is not None:
        cfg["which"] = ns.which
    return _validate(command, cfg)


def _params(cfg: dict) -> ModelParams:
    return params_from_dict(cfg["params"])


def _write_text(out: str | None, text: str) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _refuse_inadmissible(regime) -> None:
    print("inadmissible parameters; violated: "
          + "; ".join(regime.violations), file=sys.stderr)


def _cmd_analyze(cfg: dict) -> int:
    params = _params(cfg)
    report = build_report(params)
    if cfg.get("format", "text") == "json":
        text = dumps_17g(report) + "\n"
    else:
        text = render_report_text(report)
    _write_text(cfg.get("out"), text)
    return EXIT_OK if report["regime"] != "Inadmissible" else EXIT_INADMISSIBLE


def _cmd_simulate(cfg: dict) -> int:
    params = _params(cfg)
    regime = classify_regime(params)
    if regime.kind is RegimeKind.INADMISSIBLE:
        _refuse_inadmissible(regime)
        return EXIT_INADMISSIBLE
    initial = State(*cfg["initial"])
    try:
        traj = iterate(params, initial, cfg["steps"])
    except DomainFault as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = cfg.get("out")
    stride = cfg.get("stride", 1)
    if out:
        rows = write_trajectory_csv(traj, out, stride)
        info = sys.stdout
    else:
        rows = write_trajectory_csv(traj, sys.stdout, stride)
        info = sys.stderr
    x, y, z = traj.states[-1]
    print(f"final state after {cfg['steps']} steps: "
          f"({float(x)!r}, {float(y)!r}, {float(z)!r})", file=info)
    if traj.omega_exit is None:
        print("orbit stayed in Omega", file=info)
    else:
        print(f"orbit left Omega at step {traj.omega_exit}", file=info)
    print(f"rows written: {rows} (stride {stride})"
          + (f" to {out}" if out else ""), file=info)
    return EXIT_OK


def _cmd_sweep(cfg: dict) -> int:
    params = _params(cfg)
    regime = classify_regime(params)
    if regime.kind is RegimeKind.INADMISSIBLE:
        _refuse_inadmissible(regime)
        return EXIT_INADMISSIBLE
    grid = GridSpec.from_dict(cfg["grid"])
    labels = sweep_grid(params, grid, cfg.get("tol"),
                        cfg.get("max_iter", DEFAULT_MAX_ITER))
    out = cfg.get("out")
    if out:
        write_basin_csv(labels, out)
        info = sys.stdout
    else:
        write_basin_csv(labels, sys.stdout)
        info = sys.stderr
    counts = basin_counts(labels)
    total_points = grid.x.count * grid.y.count * grid.z.count
    print("labels: " + " ".join(f"{key}={counts[key]}" for key in
                                ("u1", "u2", "undecided"))
          + f" (lattice {total_points}, outside Omega {total_points - len(labels)})",
          file=info)
    return EXIT_OK


def _cmd_verify(cfg: dict) -> int:
    params = _params(cfg)
    regime = classify_regime(params)
    if regime.kind is RegimeKind.INADMISSIBLE:
        _refuse_inadmissible(regime)
        return EXIT_INADMISSIBLE
    results = run_suites(
        params, cfg["seed"],
        samples=cfg.get("samples", 10_000),
        param_samples=cfg.get("param_samples", 1_000),
        period_samples=cfg.get("period_samples", 1_000),
        pmax=cfg.get("pmax", 64),
    )
    if cfg.get("format", "text") == "json":
        payload = [
            {"name": r.name, "passed": r.passed, "checked": r.checked,
             "failures": r.failures, "note": r.note}
            for r in results
        ]
        text = dumps_17g(payload) + "\n"
    else:
        lines = []
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            line = f"{status} {r.name} (checked {r.checked})"
            if r.note:
                line += f" [{r.note}]"
            if not r.passed and r.failures:
                line += f" counterexample: {r.failures[0]}"
            lines.append(line)
        text = "\n".join(lines) + "\n"
    _write_text(cfg.get("out"), text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFICATION


def _cmd_repro(cfg: dict) -> int:
    summary = run_repro(cfg["which"], cfg.get("out", "."), cfg.get("stride"))
    for orbit in summary["orbits"]:
        initial = tuple(orbit["initial"])
        reached = orbit["reached_target"] or "none"
        print(f"{orbit['csv']}: {initial} -> {reached} "
              f"in {orbit['iterations']} iterations "
              f"(expected {orbit['expected_target']}, "
              f"residual {orbit['achieved_residual']:.3e}, "
              f"{'ok' if orbit['ok'] else 'FAILED'})")
    print(f"summary: {cfg['which']}_summary.json "
          f"({'ok' if summary['ok'] else 'FAILED'})")
    return EXIT_OK if summary["ok"] else EXIT_VERIFICATION


_HANDLERS = {
    "analyze": _cmd_analyze,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
    "repro": _cmd_repro,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command is None:
            raise UsageError("a subcommand is required (analyze, simulate, "
                             "sweep, verify, repro)")
        cfg = _effective_config(ns)
        if ns.dump_config:
            print(json.dumps(cfg, indent=2, sort_keys=True))
            return EXIT_OK
        return _HANDLERS[ns.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
