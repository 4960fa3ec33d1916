"""
Command-line front end.

Every subcommand takes ``--config FILE`` (a flat JSON object whose keys are
the long option names, dashes or underscores), ``--seed``, ``--threads``
and ``-o``. Values are resolved as built-in defaults < config file <
command-line flags, and the resolved set is echoed into each JSON report.
Angles are degrees throughout.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .attacks import (
    OBJECTIVES,
    STRATEGY_FAMILIES,
    InterceptResendBoth,
    InterceptResendOne,
    NoAttack,
    SourceControlProduct,
    optimize_attack,
    realize_attack,
)
from .figures import GridSpec, SectionSpec, contour_grid, section_curve
from .montecarlo import NoiseModel, SamplerConfig
from .polarization import deg
from .protocol import key_rate_comparison, run_session, security_verdict
from .security import WignerSettings, qber, wigner_w

SCHEMA_VERSION = "1"
PROG = "wigner-qkd"


class CLIError(Exception):
    def __init__(self, kind: str, message: str, code: int = 2):
        super().__init__(message)
        self.kind, self.code = kind, code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError("usage", message)


COMMON = {"seed": 0, "threads": 1, "config": None, "output": None}
ATTACK = {"attack": "none", "phi_a": 0.0, "phi_b": 0.0, "eve_basis": 0.0, "eve_basis_b": 0.0, "channel": "A"}
WIGNER = {"a1": -30.0, "a2": 0.0, "b1": 0.0, "b2": 30.0}

DEFAULTS = {
    "analyze": {**COMMON, **ATTACK, **WIGNER},
    "sweep": {**COMMON, "step": 0.5, "phi_a_min": 0.0, "phi_a_max": 180.0, "phi_b_min": 0.0, "phi_b_max": 180.0},
    "section": {**COMMON, "phi_b": 98.0, "step": 0.1, "phi_a_min": 0.0, "phi_a_max": 180.0},
    "simulate": {**COMMON, **ATTACK, **WIGNER, "pairs": 100_000, "sacrifice_fraction": 0.1,
                 "efficiency": 1.0, "dark_count": 0.0, "depolarization": 0.0,
                 "include_keys": False, "include_log": False},
    "optimize": {**COMMON, **WIGNER, "objective": "min_w", "family": "product", "grid_step": 0.5,
                 "refine": True, "channel": "A"},
    "keyrate": {**COMMON},
}


def _add_common(p):
    p.add_argument("--seed", type=int, help="64-bit unsigned seed for every random stream (default 0)")
    p.add_argument("--threads", type=int, help="worker threads; results do not depend on it (default 1)")
    p.add_argument("--config", metavar="PATH", help="JSON file with option values")
    p.add_argument("-o", "--output", metavar="PATH", help="output file (default: stdout)")


def _add_attack(p):
    p.add_argument("--attack", choices=("none", "product", "intercept-one", "intercept-both"),
                   help="eavesdropping strategy (default none)")
    p.add_argument("--phi-a", type=float, help="product attack: polarization sent to Alice, degrees")
    p.add_argument("--phi-b", type=float, help="product attack: polarization sent to Bob, degrees")
    p.add_argument("--eve-basis", type=float,
                   help="intercept attacks: Eve's basis on the intercepted channel (Alice's for intercept-both)")
    p.add_argument("--eve-basis-b", type=float, help="intercept-both: Eve's basis on Bob's channel")
    p.add_argument("--channel", choices=("A", "B"), help="intercept-one: which channel Eve taps")


def _add_wigner(p):
    for name, default in WIGNER.items():
        p.add_argument(f"--{name}", type=float, help=f"analyzer angle {name}, degrees (default {default:g})")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Ekert QKD with the Wigner test: attacks, simulation, figure data.",
                     argument_default=argparse.SUPPRESS)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("analyze", help="exact W, W~, QBER of an attack", argument_default=argparse.SUPPRESS)
    _add_attack(p)
    _add_wigner(p)
    _add_common(p)

    p = sub.add_parser("sweep", help="W / W~ over a (phi_a, phi_b) grid as CSV", argument_default=argparse.SUPPRESS)
    p.add_argument("--step", type=float, help="grid step, degrees (default 0.5)")
    for ax in ("a", "b"):
        p.add_argument(f"--phi-{ax}-min", type=float, help=f"phi_{ax} lower bound, degrees (default 0)")
        p.add_argument(f"--phi-{ax}-max", type=float, help=f"phi_{ax} upper bound, exclusive (default 180)")
    _add_common(p)

    p = sub.add_parser("section", help="W / W~ versus phi_a at fixed phi_b as CSV",
                       argument_default=argparse.SUPPRESS)
    p.add_argument("--phi-b", type=float, help="fixed phi_b, degrees (default 98)")
    p.add_argument("--step", type=float, help="phi_a step, degrees (default 0.1)")
    p.add_argument("--phi-a-min", type=float, help="phi_a lower bound, degrees (default 0)")
    p.add_argument("--phi-a-max", type=float, help="phi_a upper bound, exclusive (default 180)")
    _add_common(p)

    p = sub.add_parser("simulate", help="Monte Carlo key-distribution session as JSON",
                       argument_default=argparse.SUPPRESS)
    _add_attack(p)
    _add_wigner(p)
    p.add_argument("--pairs", type=int, help="number of photon pairs (default 100000)")
    p.add_argument("--sacrifice-fraction", type=float, help="share of key pairs used for W~/QBER (default 0.1)")
    p.add_argument("--efficiency", type=float, help="detector efficiency (default 1)")
    p.add_argument("--dark-count", type=float, help="dark-count probability per detector per pair (default 0)")
    p.add_argument("--depolarization", type=float, help="depolarization of the state (default 0)")
    p.add_argument("--include-keys", action="store_true", help="include sifted keys in the report")
    p.add_argument("--include-log", action="store_true", help="include the per-pair log in the report")
    _add_common(p)

    p = sub.add_parser("optimize", help="extremal W / W~ over an attack family as JSON",
                       argument_default=argparse.SUPPRESS)
    p.add_argument("--objective", choices=OBJECTIVES, help="quantity to extremize (default min_w)")
    p.add_argument("--family", choices=STRATEGY_FAMILIES, help="attack family (default product)")
    p.add_argument("--grid-step", type=float, help="scan step, degrees, at most 2 (default 0.5)")
    p.add_argument("--no-refine", dest="refine", action="store_false", help="skip coordinate-descent refinement")
    p.add_argument("--channel", choices=("A", "B"), help="intercept-one: which channel Eve taps")
    _add_wigner(p)
    _add_common(p)

    p = sub.add_parser("keyrate", help="key-rate constants, CHSH vs Wigner protocols, as JSON",
                       argument_default=argparse.SUPPRESS)
    _add_common(p)
    return parser


def load_config(path: str, allowed) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CLIError("io", f"cannot read config {path}: {exc.strerror}", 1) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CLIError("config", f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise CLIError("config", f"{path}: top level must be a JSON object")
    out = {}
    for key, value in data.items():
        name = key.replace("-", "_")
        if name not in allowed or name == "config":
            raise CLIError("config", f"{path}: unknown key '{key}'")
        out[name] = value
    return out


def resolve(args: argparse.Namespace) -> dict:
    given = vars(args).copy()
    command = given.pop("command")
    defaults = DEFAULTS[command]
    merged = dict(defaults)
    if given.get("config"):
        merged.update(load_config(given["config"], defaults))
    merged.update(given)
    _validate(command, merged)
    return merged


def _validate(command, cfg):
    expected = {k: type(v) for k, v in DEFAULTS[command].items() if v is not None}
    for key, typ in expected.items():
        v = cfg[key]
        if typ is float and isinstance(v, int) and not isinstance(v, bool):
            cfg[key] = float(v)
        elif not isinstance(v, typ) or (typ is int and isinstance(v, bool)):
            raise CLIError("validation", f"{key} must be of type {typ.__name__}, got {v!r}")
    if not 0 <= cfg["seed"] < 2**64:
        raise CLIError("validation", "seed must be a 64-bit unsigned integer")
    if cfg["threads"] < 1:
        raise CLIError("validation", "threads must be >= 1")
    if cfg.get("attack", "none") not in ("none", "product", "intercept-one", "intercept-both"):
        raise CLIError("validation", f"unknown attack {cfg['attack']!r}")


def _strategy(cfg):
    kind = cfg["attack"]
    if kind == "product":
        return SourceControlProduct(deg(cfg["phi_a"]), deg(cfg["phi_b"]))
    if kind == "intercept-one":
        return InterceptResendOne(deg(cfg["eve_basis"]), cfg["channel"])
    if kind == "intercept-both":
        return InterceptResendBoth(deg(cfg["eve_basis"]), deg(cfg["eve_basis_b"]))
    return NoAttack()


def _settings(cfg):
    return WignerSettings.from_degrees(cfg["a1"], cfg["a2"], cfg["b1"], cfg["b2"])


def _report(cfg, body):
    return {"schema_version": SCHEMA_VERSION, "command": cfg["command"], "config": _public(cfg), **body}


def _public(cfg):
    return {k: v for k, v in cfg.items() if k not in ("command",)}


def cmd_analyze(cfg):
    strategy, settings = _strategy(cfg), _settings(cfg)
    state = realize_attack(strategy)
    result = wigner_w(state, settings)
    return _report(cfg, {
        "strategy": strategy.to_dict(),
        **result.to_dict(),
        "qber": qber(state, settings.key_setting),
    })


def cmd_sweep(cfg):
    spec = GridSpec((cfg["phi_a_min"], cfg["phi_a_max"]), (cfg["phi_b_min"], cfg["phi_b_max"]), cfg["step"])
    return contour_grid(spec)


def cmd_section(cfg):
    return section_curve(SectionSpec(cfg["phi_b"], (cfg["phi_a_min"], cfg["phi_a_max"]), cfg["step"]))


def cmd_simulate(cfg):
    noise = NoiseModel(cfg["efficiency"], cfg["dark_count"], cfg["depolarization"])
    config = SamplerConfig(cfg["pairs"], cfg["seed"], noise)
    record = run_session(_strategy(cfg), config=config, settings=_settings(cfg),
                         sacrifice_fraction=cfg["sacrifice_fraction"], threads=cfg["threads"])
    body = record.to_dict(include_keys=cfg["include_keys"], include_log=cfg["include_log"])
    body["verdict"] = {t: security_verdict(record, t).value for t in ("w", "w_tilde")}
    return _report(cfg, {"session": body})


def cmd_optimize(cfg):
    rep = optimize_attack(cfg["objective"], cfg["family"], cfg["grid_step"], cfg["refine"],
                          settings=_settings(cfg), channel=cfg["channel"], threads=cfg["threads"])
    return _report(cfg, {"report": rep.to_dict()})


def cmd_keyrate(cfg):
    return _report(cfg, {"key_rates": key_rate_comparison().to_dict()})


COMMANDS = {
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "section": cmd_section,
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "keyrate": cmd_keyrate,
}


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _emit(result, path):
    if isinstance(result, dict):
        text = json.dumps(result, indent=2, default=_json_default) + "\n"
        if path:
            with open(path, "w", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    elif path:
        result.write_csv(path)
    else:
        from .figures import write_csv
        write_csv(result, sys.stdout)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve(args)
        cfg["command"] = args.command
        result = COMMANDS[args.command](cfg)
        _emit(result, cfg["output"])
    except CLIError as exc:
        print(f"{PROG}: error: {exc.kind}: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"{PROG}: error: io: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, RuntimeError) as exc:
        print(f"{PROG}: error: validation: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
