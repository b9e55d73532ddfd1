"""Command-line entry point: ``pilotshift {ccdf,power-sweep,detect-error,ber} ...``."""
from __future__ import annotations

import argparse
import configparser
import itertools
import sys

from .errors import ConfigurationError
from .experiments import (
    ExperimentConfig,
    format_csv,
    run_ber,
    run_ccdf,
    run_detection_error,
    run_gamma_power_grid,
    run_pilot_power_sweep,
    write_csv,
)

DEFAULT_POWERS = "1,4,9,16,25,39,49"

# option name -> (dest, parser of one value)
_KEYS = {
    "ns": ("ns", int),
    "np": ("np", int),
    "pilot-power": ("pilot_power", float),
    "oversample": ("oversample", int),
    "snr": ("snr", float),
    "frames": ("frames", int),
    "seed": ("seed", int),
    "gamma": ("gamma", float),
    "gamma-step": ("gamma_step", float),
    "gamma-min": ("gamma_min", float),
    "out": ("out", str),
    "powers": ("powers", float),
    "gamma-grid": ("gamma_grid", float),
    "power-grid": ("power_grid", float),
}
_LISTS = {"ns", "np", "snr", "powers", "gamma_grid", "power_grid"}


def _split(values, kind):
    """Flatten repeated and comma-separated values."""
    out = []
    for v in values:
        out += [kind(x) for x in str(v).split(",") if x.strip()]
    return out


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; keys are the long flag names without dashes."""
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_string("[run]\n" + fh.read())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc.strerror}") from exc
    values = {}
    for key, raw in parser["run"].items():
        name = key.replace("_", "-")
        if name not in _KEYS:
            raise ConfigurationError(f"unknown key {key!r} in {path}")
        dest, kind = _KEYS[name]
        values[dest] = _split([raw], kind) if dest in _LISTS else kind(raw)
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pilotshift",
        description="Pilot-shifting PAPR reduction and blind pilot detection experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "ccdf": "PAPR CCDF of fixed versus shifted pilots",
        "power-sweep": "PAPR CCDF of conventional OFDM for several pilot powers",
        "detect-error": "blind pilot detection error rate versus SNR",
        "ber": "BER with known versus detected pilot positions",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--ns", action="append", help="subcarriers (comma list allowed for detect-error)")
        p.add_argument("--np", action="append", help="pilots (comma list allowed for detect-error)")
        p.add_argument("--pilot-power", type=float)
        p.add_argument("--oversample", type=int, help="oversampling factor for PAPR measurement")
        p.add_argument("--snr", action="append", help="SNR in dB; repeatable or comma list; 'inf' is noise-free")
        p.add_argument("--frames", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--gamma", type=float)
        p.add_argument("--gamma-step", type=float)
        p.add_argument("--gamma-min", type=float)
        p.add_argument("--out", help="CSV path; stdout when omitted")
        p.add_argument("--config", help="flat key = value file; flags override it")
        if name == "power-sweep":
            p.add_argument("--powers", action="append", help=f"pilot powers (default {DEFAULT_POWERS})")
        if name == "detect-error":
            p.add_argument("--gamma-grid", action="append", help="fixed-gamma grid (with --power-grid)")
            p.add_argument("--power-grid", action="append", help="pilot powers for the gamma grid")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    values = read_config_file(args.config) if args.config else {}
    for name, (dest, kind) in _KEYS.items():
        flag = getattr(args, dest, None)
        if flag is None:
            continue
        values[dest] = _split(flag, kind) if dest in _LISTS else flag
    return values


def _config(values: dict, ns: int, np_: int) -> ExperimentConfig:
    kwargs = {"n_s": ns, "n_p": np_}
    for key in ("pilot_power", "oversample", "frames", "seed", "gamma", "gamma_step", "gamma_min", "out"):
        if key in values:
            kwargs[key] = values[key]
    if "snr" in values:
        kwargs["snr_db"] = tuple(values["snr"])
    return ExperimentConfig(**kwargs)


def _single(values: dict, key: str, default: int) -> int:
    v = values.get(key, [default])
    if len(v) != 1:
        raise ConfigurationError(f"--{key} takes a single value for this command")
    return v[0]


def run(args: argparse.Namespace):
    values = resolve(args)
    cmd = args.command
    if cmd == "detect-error":
        ns_list = values.get("ns", [64])
        np_list = values.get("np", [4])
        cells = [(a, b) for a, b in itertools.product(ns_list, np_list) if a % b == 0]
        if not cells:
            raise ConfigurationError("no (ns, np) pair with np dividing ns")
        config = _config(values, *cells[0])
        if "gamma_grid" in values or "power_grid" in values:
            gammas = values.get("gamma_grid", [config.gamma])
            powers = values.get("power_grid", [config.pilot_power])
            return run_gamma_power_grid(config, gammas, powers, snr_db=config.snr_db[0])
        return run_detection_error(config, cells)
    config = _config(values, _single(values, "ns", 64), _single(values, "np", 4))
    if cmd == "ccdf":
        return run_ccdf(config)
    if cmd == "power-sweep":
        return run_pilot_power_sweep(config, values.get("powers", _split([DEFAULT_POWERS], float)))
    return run_ber(config)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = run(args)
        out = resolve(args).get("out")
        if out:
            write_csv(result, out)
            print(f"wrote {len(result.rows)} rows to {out}", file=sys.stderr)
        else:
            sys.stdout.write(format_csv(result))
    except (ConfigurationError, OSError) as exc:
        print(f"pilotshift: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
