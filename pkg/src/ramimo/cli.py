"""``ramimo`` batch front-end: JSON experiment config in, CSV files out.

Usage::

    ramimo <command> --config <path> [--seed N] [--out <path>] [--threads N]

Commands are ``gain-table``, ``gain-mc``, ``ber-sweep`` and ``diversity``.
Every CSV is accompanied by ``<out>.manifest.json`` holding the resolved
config, its SHA-256, the seed and the tool version. Relative paths inside a
config file are resolved against the config file's directory.
"""

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import expected_max_gain, selection_gain_db
from .channel import make_uniform_topology, topology_from_matrix
from .montecarlo import (
    SimulationConfig,
    estimate_diversity_order,
    estimate_selection_gain_mc,
    read_ber_csv,
    run_ber_sweep,
    slope_window,
)

COMMANDS = ("gain-table", "gain-mc", "ber-sweep", "diversity")

_KEYS = {
    "gain-table": {"required": {"M_B", "N_B"}, "optional": {"M", "out"}},
    "gain-mc": {"required": {"M_B", "N_B"}, "optional": {"M", "trials", "master_seed", "out"}},
    "ber-sweep": {
        "required": {"topology", "snr_grid_db"},
        "optional": {
            "selection", "modulation", "max_trials", "target_bit_errors",
            "master_seed", "parallelism", "out",
        },
    },
    "diversity": {
        "required": {"inputs"},
        "optional": {"ber_window", "min_errors", "snr_lo_db", "snr_hi_db", "out"},
    },
}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentSpec:
    command: str
    config: object
    output_path: Path
    params: dict


def _positive_int(params, key, default=None):
    value = params.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{key!r} must be a positive integer, got {value!r}")
    return value


def _int_list(params, key):
    value = params[key]
    if isinstance(value, int) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, list) or not value or any(
        isinstance(v, bool) or not isinstance(v, int) or v < 1 for v in value
    ):
        raise ConfigError(f"{key!r} must be a positive integer or a non-empty list of them, got {value!r}")
    return value


def _parse_topology(value):
    if not isinstance(value, dict) or len(value) != 1:
        raise ConfigError("'topology' must be {\"uniform\": {...}} or {\"B\": [[...]]}")
    (kind, body), = value.items()
    try:
        if kind == "uniform":
            if not isinstance(body, dict):
                raise ConfigError("'topology.uniform' must be an object with keys M, N_B, M_B")
            unknown = set(body) - {"M", "N_B", "M_B"}
            if unknown:
                raise ConfigError(f"unknown key(s) in 'topology.uniform': {sorted(unknown)}")
            missing = {"N_B", "M_B"} - set(body)
            if missing:
                raise ConfigError(f"missing key(s) in 'topology.uniform': {sorted(missing)}")
            return make_uniform_topology(body.get("M", 2), body["N_B"], body["M_B"])
        if kind == "B":
            if not isinstance(body, list) or not all(isinstance(r, list) for r in body):
                raise ConfigError("'topology.B' must be a matrix (list of lists) of beam counts")
            return topology_from_matrix(body)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid 'topology.{kind}': {exc}") from None
    raise ConfigError(f"unknown topology kind {kind!r}; expected 'uniform' or 'B'")


def parse_config(text, command=None, seed=None, out=None, threads=None, base_dir=None):
    """Validate a JSON experiment description.

    Parameters
    ----------
    text : str
        JSON document.
    command : str, optional
        Command from the command line; must agree with the config's
        ``command`` key when both are present.
    seed, out, threads : optional
        Command-line overrides for ``master_seed``, ``out`` and
        ``parallelism``.
    base_dir : path, optional
        Directory that a relative ``out`` from the config is taken
        relative to (the config file's directory). ``out`` passed as an
        argument is used as is.

    Raises
    ------
    ConfigError
        Naming the offending key and constraint.
    """
    try:
        params = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from None
    if not isinstance(params, dict):
        raise ConfigError("config must be a JSON object")
    params = dict(params)
    cfg_command = params.pop("command", None)
    if command is not None and cfg_command is not None and command != cfg_command:
        raise ConfigError(f"command {command!r} does not match config 'command' {cfg_command!r}")
    command = command or cfg_command
    if command not in COMMANDS:
        raise ConfigError(f"'command' must be one of {list(COMMANDS)}, got {command!r}")

    keys = _KEYS[command]
    unknown = set(params) - keys["required"] - keys["optional"]
    if unknown:
        raise ConfigError(f"unknown key(s) for {command}: {', '.join(repr(k) for k in sorted(unknown))}")
    missing = keys["required"] - set(params)
    if missing:
        raise ConfigError(f"missing required key(s) for {command}: {', '.join(repr(k) for k in sorted(missing))}")

    if seed is not None:
        if "master_seed" not in keys["optional"]:
            raise ConfigError(f"--seed has no effect on {command}")
        params["master_seed"] = seed
    if out is not None:
        params["out"] = str(out)
        output_path = Path(out)
    else:
        if "out" not in params:
            raise ConfigError("no output path: set 'out' in the config or pass --out")
        if not isinstance(params["out"], str) or not params["out"]:
            raise ConfigError("'out' must be a non-empty path string")
        output_path = Path(params["out"])
        if base_dir is not None and not output_path.is_absolute():
            output_path = Path(base_dir) / output_path

    if command in ("gain-table", "gain-mc"):
        m_b = _int_list(params, "M_B")
        n_b = _int_list(params, "N_B")
        params["M_B"], params["N_B"] = m_b, n_b
        params["M"] = _positive_int(params, "M", 2)
        if command == "gain-mc":
            params["trials"] = _positive_int(params, "trials", 100_000)
            if params["trials"] < 10_000:
                raise ConfigError(f"'trials' must be at least 10000, got {params['trials']}")
            params.setdefault("master_seed", 0)
            if isinstance(params["master_seed"], bool) or not isinstance(params["master_seed"], int) or params["master_seed"] < 0:
                raise ConfigError(f"'master_seed' must be a non-negative integer, got {params['master_seed']!r}")
        pairs = [(mb, nb) for nb in n_b for mb in m_b if mb % nb == 0]
        if not pairs:
            raise ConfigError(f"M_B not divisible by N_B for any pair of M_B={m_b}, N_B={n_b}")
        config = pairs
    elif command == "ber-sweep":
        topology = _parse_topology(params["topology"])
        grid = params["snr_grid_db"]
        if not isinstance(grid, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in grid
        ):
            raise ConfigError("'snr_grid_db' must be a list of numbers")
        if threads is not None:
            params["parallelism"] = threads
        master_seed = params.get("master_seed", 0)
        if isinstance(master_seed, bool) or not isinstance(master_seed, int):
            raise ConfigError(f"'master_seed' must be a non-negative integer, got {master_seed!r}")
        kwargs = dict(
            topology=topology,
            selection=params.get("selection", "optimal"),
            modulation=params.get("modulation", "qpsk"),
            snr_grid_db=tuple(grid),
            max_trials=_positive_int(params, "max_trials", 10_000_000),
            target_bit_errors=_positive_int(params, "target_bit_errors", 100),
            master_seed=master_seed,
            parallelism=params.get("parallelism", 1),
        )
        try:
            config = SimulationConfig(**kwargs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    else:
        inputs = params["inputs"]
        if isinstance(inputs, str):
            inputs = [inputs]
        if not isinstance(inputs, list) or not inputs or not all(isinstance(p, str) for p in inputs):
            raise ConfigError("'inputs' must be a path or a non-empty list of paths to BER CSV files")
        params["inputs"] = inputs
        window = params.get("ber_window", [1e-5, 1e-3])
        if not (isinstance(window, list) and len(window) == 2 and 0 < window[0] < window[1] <= 1):
            raise ConfigError(f"'ber_window' must be [low, high] with 0 < low < high <= 1, got {window!r}")
        params["ber_window"] = window
        params["min_errors"] = _positive_int(params, "min_errors", 100)
        explicit = {"snr_lo_db", "snr_hi_db"} & set(params)
        if len(explicit) == 1:
            raise ConfigError("'snr_lo_db' and 'snr_hi_db' must be given together")
        config = params
    return ExperimentSpec(command, config, output_path, params)


def _canonical(spec):
    data = {k: v for k, v in spec.params.items() if k not in ("out", "parallelism")}
    data["command"] = spec.command
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _write_manifest(spec, outputs):
    canonical = _canonical(spec)
    manifest = {
        "command": spec.command,
        "config": json.loads(canonical),
        "config_sha256": hashlib.sha256(canonical.encode()).hexdigest(),
        "seed": spec.params.get("master_seed"),
        "tool": "ramimo",
        "tool_version": __version__,
        "numpy_version": np.__version__,
        "outputs": [str(p) for p in outputs],
    }
    path = Path(str(spec.output_path) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x):
    return repr(float(x))


def run_experiment(spec, base_dir=None):
    """Run a validated spec and write its CSV plus manifest.

    Returns the list of written paths.
    """
    out = spec.output_path
    if spec.command == "gain-table":
        rows = []
        for m_b, n_b in spec.config:
            topo = make_uniform_topology(spec.params["M"], n_b, m_b)
            b = m_b // n_b
            rows.append([m_b, n_b, b, _fmt(expected_max_gain(b)), _fmt(selection_gain_db(topo))])
        _write_csv(out, ["M_B", "N_B", "B", "expected_max", "gain_db"], rows)
    elif spec.command == "gain-mc":
        rows = []
        for m_b, n_b in spec.config:
            topo = make_uniform_topology(spec.params["M"], n_b, m_b)
            gain, se = estimate_selection_gain_mc(topo, spec.params["trials"], spec.params["master_seed"])
            rows.append([m_b, n_b, _fmt(gain), _fmt(se), _fmt(selection_gain_db(topo))])
        _write_csv(out, ["M_B", "N_B", "gain_db", "stderr_db", "analytic_db"], rows)
    elif spec.command == "ber-sweep":
        curve = run_ber_sweep(spec.config)
        with open(out, "w", newline="", encoding="utf-8") as fh:
            curve.to_csv(fh)
        for snr_db in curve.flagged:
            print(f"warning: no bit errors at {snr_db} dB within max_trials", file=sys.stderr)
    else:
        base = Path(base_dir) if base_dir is not None else Path.cwd()
        rows = []
        for name in spec.params["inputs"]:
            path = Path(name)
            if not path.is_absolute():
                path = base / path
            with open(path, newline="", encoding="utf-8") as fh:
                curve = read_ber_csv(fh)
            if "snr_lo_db" in spec.params:
                lo, hi = spec.params["snr_lo_db"], spec.params["snr_hi_db"]
            else:
                lo, hi = slope_window(curve, tuple(spec.params["ber_window"]), spec.params["min_errors"])
            slope = estimate_diversity_order(curve, lo, hi)
            rows.append([name, _fmt(lo), _fmt(hi), _fmt(curve.record_at(lo).ber),
                         _fmt(curve.record_at(hi).ber), _fmt(slope)])
        _write_csv(out, ["input", "snr_lo_db", "snr_hi_db", "ber_lo", "ber_hi", "diversity"], rows)
    manifest = _write_manifest(spec, [out])
    return [out, manifest]


def build_parser():
    parser = argparse.ArgumentParser(prog="ramimo", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--seed", type=int, help="override the config's master_seed")
    parser.add_argument("--out", help="override the config's output path")
    parser.add_argument("--threads", type=int, help="worker threads for ber-sweep")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    config_path = Path(args.config)
    try:
        text = config_path.read_text(encoding="utf-8")
        spec = parse_config(text, args.command, seed=args.seed, out=args.out, threads=args.threads,
                            base_dir=config_path.parent)
        run_experiment(spec, base_dir=config_path.parent)
    except (ConfigError, ValueError, KeyError) as exc:
        print(f"ramimo: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ramimo: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
