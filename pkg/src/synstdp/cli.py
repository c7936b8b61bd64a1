"""Command-line interface.

Subcommands: window, statedist, fit, closedform, energy, validate.  Every
subcommand exits nonzero on any error.  Worker count for window sweeps comes
from --workers or the SYNSTDP_WORKERS environment variable.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import fit_exponential, fit_linear, fit_quadratic
from .closedform import ClosedFormParams, comparison_report
from .config import ConfigError, default_config, load_config
from .energy import (DEFAULT_GPU_BASELINE, SCENARIOS, EnergyScenario,
                     render_table, table1)
from .montecarlo import analytic_window, run_window
from .output import (read_mean_csv, write_states_csv, write_svg_scatter,
                     write_svg_states, write_window_csv)
from .validate import render_report, run_all


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="synstdp",
                                 description="Stochastic STDP window simulator for compound "
                                             "binary resistive synapses")
    ap.add_argument("--version", action="version", version=f"synstdp {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    w = sub.add_parser("window", help="run a Monte Carlo STDP window sweep")
    w.add_argument("--config", type=Path, help="JSON config (defaults reproduce the "
                                               "dendritic-attenuation reference setup)")
    w.add_argument("--out", type=Path, required=True, help="output directory")
    w.add_argument("--seed", type=int, help="override the config seed")
    w.add_argument("--epochs", type=int, help="override the config epoch count")
    w.add_argument("--workers", type=int, help="worker processes for the sweep")

    s = sub.add_parser("statedist", help="analytic switching-count state distributions")
    s.add_argument("--config", type=Path)
    s.add_argument("--out", type=Path, required=True)

    f = sub.add_parser("fit", help="fit a learning-function model to window results")
    f.add_argument("--in", dest="results", type=Path, required=True,
                   help="directory containing mean.csv from a window run")
    f.add_argument("--side", choices=("pos", "neg"), default="pos")
    f.add_argument("--model", choices=("exp", "lin", "quad"), default="exp")
    f.add_argument("--source", choices=("analytic", "mc"), default="analytic")
    f.add_argument("--domain", type=float, nargs=2, metavar=("LO", "HI"),
                   help="|delta_t| fit range; defaults to [tau_minus, tau_minus+tau_plus] "
                        "from the run's resolved config")
    f.add_argument("--out", type=Path, help="where to write fits.json (default: results dir)")

    c = sub.add_parser("closedform", help="closed-form quadratic analysis report")
    c.add_argument("--params", type=Path, help="JSON with n, a_total, delta_v, beta, v_th, gamma")
    c.add_argument("--interval", type=float, nargs=2, metavar=("LO", "HI"), default=(0.3, 0.4),
                   help="offset interval for the fitted quadratic (default 0.3 0.4)")
    c.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")

    e = sub.add_parser("energy", help="energy-efficiency table")
    e.add_argument("--scenario", default="all",
                   choices=("all", "conservative", "medium", "aggressive", "custom"))
    e.add_argument("--params", type=Path, help="JSON scenario fields (required for custom)")
    e.add_argument("--mode", choices=("head", "full"), default="head")
    e.add_argument("--baseline", type=float, default=DEFAULT_GPU_BASELINE,
                   help="GPU reference throughput in img/s/W")
    e.add_argument("--json", dest="json_out", type=Path, help="also write the table as JSON")

    v = sub.add_parser("validate", help="run the property suite and report pass/fail")
    v.add_argument("--epochs", type=int, default=10_000,
                   help="epochs for the Monte Carlo consistency checks")
    return ap


def _load_run_config(path: Path | None):
    return load_config(path) if path is not None else default_config()


def _cmd_window(args) -> int:
    cfg = _load_run_config(args.config)
    wcfg = cfg.window_config()
    if args.seed is not None:
        wcfg = dataclasses.replace(wcfg, seed=args.seed)
    if args.epochs is not None:
        wcfg = dataclasses.replace(wcfg, epochs=args.epochs)
    window = run_window(wcfg, workers=args.workers)
    paths = write_window_csv(window, args.out)
    resolved = cfg.to_dict()
    resolved["simulation"]["seed"] = wcfg.seed
    resolved["simulation"]["epochs"] = wcfg.epochs
    (args.out / "resolved-config.json").write_text(
        json.dumps(resolved, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if cfg.output.svg:
        svg = write_svg_scatter(window, level_bin=cfg.output.level_bin)
        (args.out / "window.svg").write_text(svg, encoding="utf-8")
    print(f"wrote {', '.join(str(p) for p in paths.values())} "
          f"({window.delta_t.size} points x {window.epochs} epochs)")
    return 0


def _cmd_statedist(args) -> int:
    cfg = _load_run_config(args.config)
    grid, _, states = analytic_window(cfg.window_config())
    args.out.mkdir(parents=True, exist_ok=True)
    path = write_states_csv(grid, states, args.out / "states.csv")
    if cfg.output.svg:
        (args.out / "states.svg").write_text(write_svg_states(grid, states), encoding="utf-8")
    print(f"wrote {path}")
    return 0


def _default_fit_domain(results: Path) -> tuple[float, float]:
    meta = results / "resolved-config.json"
    if not meta.exists():
        raise ConfigError("no resolved-config.json next to mean.csv; pass --domain LO HI")
    data = json.loads(meta.read_text(encoding="utf-8"))
    wf = data.get("waveform", {})
    tau_minus = float(wf.get("tau_minus", 1.0))
    tau_plus = float(wf.get("tau_plus", 5.0))
    return tau_minus, tau_minus + tau_plus


def _cmd_fit(args) -> int:
    mean_csv = args.results / "mean.csv"
    if not mean_csv.exists():
        raise ConfigError(f"{mean_csv} not found; run `synstdp window` first")
    delta_t, mc_mean, _, analytic = read_mean_csv(mean_csv)
    values = analytic if args.source == "analytic" else mc_mean
    lo, hi = args.domain if args.domain else _default_fit_domain(args.results)
    sign = 1.0 if args.side == "pos" else -1.0
    mask = (sign * delta_t >= lo) & (sign * delta_t <= hi)
    points = np.column_stack([delta_t[mask], values[mask]])
    if args.model == "exp":
        result = fit_exponential(points)
    elif args.model == "lin":
        result = fit_linear(points)
    else:
        result = fit_quadratic(points)
    payload = {"side": args.side, "source": args.source, **result.to_dict()}
    out = args.out if args.out else args.results / "fits.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_closedform(args) -> int:
    if args.params:
        raw = json.loads(args.params.read_text(encoding="utf-8"))
        try:
            params = ClosedFormParams(**raw)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{args.params}: {e}") from None
    else:
        from .validate import WORKED_PARAMS
        params = WORKED_PARAMS
    report = comparison_report(params, *args.interval)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def _cmd_energy(args) -> int:
    if args.scenario == "custom":
        if not args.params:
            raise ConfigError("--scenario custom requires --params FILE")
        raw = json.loads(args.params.read_text(encoding="utf-8"))
        try:
            scenarios = {"custom": EnergyScenario(**raw)}
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{args.params}: {e}") from None
    elif args.scenario == "all":
        scenarios = dict(SCENARIOS)
    else:
        scenarios = {args.scenario: SCENARIOS[args.scenario]}
    result = table1(scenarios, baseline_img_s_w=args.baseline, mode=args.mode)
    print(render_table(result))
    if args.json_out:
        args.json_out.parent.mkdir(parents=True, exist_ok=True)
        args.json_out.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n",
                                 encoding="utf-8")
    return 0


def _cmd_validate(args) -> int:
    checks = run_all(epochs=args.epochs)
    print(render_report(checks))
    return 0 if all(c.passed for c in checks) else 1


_COMMANDS = {
    "window": _cmd_window,
    "statedist": _cmd_statedist,
    "fit": _cmd_fit,
    "closedform": _cmd_closedform,
    "energy": _cmd_energy,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
