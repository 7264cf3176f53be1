"""Command-line front end for design, analysis and simulation experiments.

All commands are deterministic for a fixed (config, seed) pair and write
plain-text outputs (CSV curves, tab-separated tables, distribution files)
plus a manifest recording the resolved configuration.
"""

import argparse
import math
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import degree_dist, density_evolution, emr_sim, lp_design

USAGE_ERROR = 2
RUNTIME_ERROR = 1


class ConfigError(Exception):
    pass


def _parse_eps(text):
    if isinstance(text, tuple):
        return text
    try:
        return tuple(float(part) for part in str(text).split(","))
    except ValueError as exc:
        raise ConfigError(f"bad erasure probability list {text!r}") from exc


@dataclass
class ExperimentConfig:
    command: str = "simulate"
    users: int = 10
    k: int = 1000
    eps_up: tuple = (0.0,)
    eps_down: tuple = (0.0,)
    relay_dist: str = ""
    user_dist: str = "degree1"  # degree1 | rsd | path to a distribution file
    delta: float = 0.02
    max_degree: int = 0  # 0 means "use the user count"
    lp_grid_points: int = 200
    trials: int = 10
    seed: int = 0
    out: str = "out"
    mode: str = "buffered"
    overhead_max: float = 3.0
    overhead_step: float = 0.05
    rsd_c: float = 0.03
    rsd_sigma: float = 0.05
    workers: int = 1

    def serialize(self):
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(repr(x) for x in v)
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(name, value):
    if name not in _FIELD_TYPES:
        raise ConfigError(f"unknown config key {name!r}")
    kind = _FIELD_TYPES[name]
    try:
        if name in ("eps_up", "eps_down"):
            return _parse_eps(value)
        if kind in (int, "int"):
            return int(value)
        if kind in (float, "float"):
            return float(value)
        return str(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {value!r}") from exc


def parse_config_text(text):
    """Parse key=value lines into an ExperimentConfig; unknown keys rejected."""
    cfg = ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        setattr(cfg, key.strip(), _coerce(key.strip(), value.strip()))
    return cfg


def load_config_file(path):
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path) as fh:
        return parse_config_text(fh.read())


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dltcodes",
        description="Design and simulate distributed LT codes for the erasure multi-way relay channel.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--users", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out")

    p = sub.add_parser("design", help="optimize the relay degree distribution")
    common(p)
    p.add_argument("--delta", type=float, help="target erasure rate")
    p.add_argument("--max-degree", dest="max_degree", type=int)
    p.add_argument("--lp-grid-points", dest="lp_grid_points", type=int)
    p.add_argument("--overhead-max", dest="overhead_max", type=float)
    p.add_argument("--overhead-step", dest="overhead_step", type=float)

    p = sub.add_parser("de-curve", help="density-evolution erasure-vs-overhead curve")
    common(p)
    p.add_argument("--relay-dist", dest="relay_dist")
    p.add_argument("--overhead-max", dest="overhead_max", type=float)
    p.add_argument("--overhead-step", dest="overhead_step", type=float)

    for name, text in (
        ("simulate", "Monte Carlo campaign for one relay mode"),
        ("compare", "buffered/unbuffered/uncoded campaigns on common random numbers"),
    ):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--k", type=int)
        p.add_argument("--eps-up", dest="eps_up")
        p.add_argument("--eps-down", dest="eps_down")
        p.add_argument("--relay-dist", dest="relay_dist")
        p.add_argument("--user-dist", dest="user_dist")
        p.add_argument("--trials", type=int)
        p.add_argument("--mode", choices=[emr_sim.BUFFERED, emr_sim.UNBUFFERED, emr_sim.UNCODED])
        p.add_argument("--overhead-max", dest="overhead_max", type=float)
        p.add_argument("--overhead-step", dest="overhead_step", type=float)
        p.add_argument("--workers", type=int)
    return parser


def resolve_config(args):
    cfg = load_config_file(args.config) if getattr(args, "config", None) else ExperimentConfig()
    cfg.command = args.command
    for f in fields(ExperimentConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(cfg, f.name, _coerce(f.name, value) if isinstance(value, str) else value)
    return cfg


def _write_manifest(cfg):
    os.makedirs(cfg.out, exist_ok=True)
    with open(os.path.join(cfg.out, "manifest.txt"), "w") as fh:
        fh.write(cfg.serialize())


def _overhead_grid(cfg):
    n = int(round(cfg.overhead_max / cfg.overhead_step))
    return np.round(np.arange(1, n + 1) * cfg.overhead_step, 12)


def _load_relay_dist(cfg):
    if not cfg.relay_dist:
        raise ConfigError("a relay distribution file is required (--relay-dist)")
    if not os.path.exists(cfg.relay_dist):
        raise ConfigError(f"relay distribution file not found: {cfg.relay_dist}")
    try:
        dist = degree_dist.load_distribution(cfg.relay_dist)
    except (degree_dist.InvalidDistributionError, ValueError) as exc:
        raise ConfigError(f"invalid relay distribution file: {exc}") from exc
    if dist.perspective != degree_dist.NODE:
        raise ConfigError("relay distribution must be node perspective")
    return dist


def _user_dist(cfg):
    if cfg.user_dist == "degree1":
        return degree_dist.DegreeDistribution.from_pairs(degree_dist.NODE, {1: 1.0})
    if cfg.user_dist == "rsd":
        return degree_dist.robust_soliton(cfg.k, cfg.rsd_c, cfg.rsd_sigma)
    if not os.path.exists(cfg.user_dist):
        raise ConfigError(f"user distribution file not found: {cfg.user_dist}")
    try:
        return degree_dist.load_distribution(cfg.user_dist)
    except (degree_dist.InvalidDistributionError, ValueError) as exc:
        raise ConfigError(f"invalid user distribution file: {exc}") from exc


def cmd_design(cfg):
    _write_manifest(cfg)
    d_max = cfg.max_degree or cfg.users
    result = lp_design.sweep_design(cfg.users, d_max, cfg.delta, cfg.lp_grid_points)
    lp_design.write_design_report(os.path.join(cfg.out, "design_report.txt"), result)
    degree_dist.save_distribution(result.gamma_node, os.path.join(cfg.out, "gamma.dist"))
    grid = _overhead_grid(cfg)
    curve = density_evolution.de_curve(result.gamma_node, cfg.users, grid)
    density_evolution.save_curve_csv(os.path.join(cfg.out, "de_curve.csv"), grid, curve)
    print(
        f"design: overhead {result.design_overhead:.4f} at sweep parameter "
        f"{result.sweep_parameter:.4f}; outputs in {cfg.out}"
    )
    return 0


def cmd_de_curve(cfg):
    _write_manifest(cfg)
    gamma = _load_relay_dist(cfg)
    grid = _overhead_grid(cfg)
    curve = density_evolution.de_curve(gamma, cfg.users, grid)
    density_evolution.save_curve_csv(os.path.join(cfg.out, "de_curve.csv"), grid, curve)
    print(f"de-curve: wrote {len(grid)} points to {cfg.out}/de_curve.csv")
    return 0


def _network_config(cfg, mode):
    if mode == emr_sim.UNCODED:
        gamma = None
        omega = _user_dist(cfg)
    else:
        gamma = _load_relay_dist(cfg)
        # relay-combined modes run degree-1 user encoding unless a file
        # explicitly overrides it; "rsd" only applies to the uncoded baseline
        if cfg.user_dist in ("degree1", "rsd"):
            omega = degree_dist.DegreeDistribution.from_pairs(degree_dist.NODE, {1: 1.0})
        else:
            omega = _user_dist(cfg)
    return emr_sim.NetworkConfig(
        r=cfg.users,
        k=cfg.k,
        eps_up=cfg.eps_up if len(cfg.eps_up) > 1 else cfg.eps_up[0],
        eps_down=cfg.eps_down if len(cfg.eps_down) > 1 else cfg.eps_down[0],
        omega=omega,
        gamma=gamma,
        relay_mode=mode,
        seed=cfg.seed,
    )


def _run_mode(cfg, mode):
    net = _network_config(cfg, mode)
    grid = _overhead_grid(cfg)
    result = emr_sim.run_campaign(net, cfg.trials, grid, workers=max(1, cfg.workers))
    result.to_csv(os.path.join(cfg.out, f"campaign_{mode}.csv"))
    return result


def cmd_simulate(cfg):
    _write_manifest(cfg)
    result = _run_mode(cfg, cfg.mode)
    with open(os.path.join(cfg.out, "summary.txt"), "w") as fh:
        fh.write(f"mode = {cfg.mode}\n")
        fh.write(result.summary())
    print(result.summary(), end="")
    return 0


def cmd_compare(cfg):
    _write_manifest(cfg)
    if cfg.user_dist == "degree1":
        cfg.user_dist = "rsd"  # uncoded baseline needs a real LT distribution
    with open(os.path.join(cfg.out, "summary.txt"), "w") as fh:
        for mode in (emr_sim.BUFFERED, emr_sim.UNBUFFERED, emr_sim.UNCODED):
            result = _run_mode(cfg, mode)
            fh.write(f"mode = {mode}\n")
            fh.write(result.summary())
    print(f"compare: campaigns written to {cfg.out}")
    return 0


_COMMANDS = {
    "design": cmd_design,
    "de-curve": cmd_de_curve,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        cfg = resolve_config(args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (lp_design.NoDesignError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
