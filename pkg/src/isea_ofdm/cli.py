"""Command-line entry point: one subcommand per experiment, CSV out.

Configuration resolves as built-in defaults, then the ``--config`` JSON file,
then explicit flags. Every run writes the CSV plus a ``.config.json`` sidecar
holding the fully resolved configuration; passing that sidecar back through
``--config`` reproduces the run.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import analytics, harness
from .detectors import DETECTORS
from .records import ScatterRow, ThresholdRecord, write_records, write_rows

log = logging.getLogger("isea_ofdm")

SUBCOMMANDS = {
    "av-noise": dict(kappa="0:0.25:3", frames=2000),
    "threshold": dict(kappa="0.8:0.05:2.0", frames=4000),
    "iterations": dict(kappa="0.8:0.05:2.0", frames=4000),
    "ser-vs-snr": dict(kappa="1.2", snr_db="0:2:20", frames=2000),
    "ser-vs-kappa": dict(kappa="0:0.1:2.5", snr_db="12", frames=2000),
    "dispersion": dict(kappa="1.6", snr_db="20", dispersion="0:0.01:0.1", frames=2000),
    "scatter": dict(kappa="1.0", frames=4),
    "detect-one": dict(kappa="1.2", frames=1),
}


def parse_sweep(text) -> list[float]:
    """Parse ``start:step:stop`` (inclusive), a comma list, or a scalar.

    ``inf`` is accepted, so ``--snr inf`` means a noiseless channel.
    """
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, list):
        return [float(v) for v in text]
    text = str(text).strip()
    if not text:
        raise ValueError("empty sweep")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"sweep must be start:step:stop, got {text!r}")
        start, step, stop = map(float, parts)
        if step <= 0 or stop < start or not all(map(math.isfinite, (start, step, stop))):
            raise ValueError(f"invalid sweep {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9))
        return [round(start + i * step, 10) for i in range(n + 1)]
    return [float(v) for v in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isea-ofdm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON file with SimConfig fields")
        p.add_argument("--out", type=Path, help=f"CSV output path (default: {name}.csv)")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int, dest="workers", help="worker processes; results do not depend on it")
        p.add_argument("--constellation", choices=["qpsk", "8psk", "16psk", "16qam"])
        p.add_argument("--n-fft", type=int, dest="n_fft")
        p.add_argument("--kappa")
        p.add_argument("--snr", "--snr-db", dest="snr_db")
        p.add_argument("--dispersion")
        p.add_argument("--frames", type=int)
        p.add_argument("--detectors", help=f"comma list from {','.join(DETECTORS)}")
        p.add_argument("--max-iter", type=int, dest="max_iter")
        p.add_argument("--slm-candidates", type=int, dest="slm_candidates")
    return parser


_SWEEPS = ("kappa", "snr_db", "dispersion")
_SCALARS = ("seed", "workers", "constellation", "n_fft", "frames", "max_iter", "slm_candidates")


def resolve_config(args: argparse.Namespace) -> harness.SimConfig:
    values: dict = dict(SUBCOMMANDS[args.subcommand])
    if args.config is not None:
        data = json.loads(args.config.read_text())
        data.pop("subcommand", None)
        values.update(data)
    for name in _SWEEPS:
        if getattr(args, name) is not None:
            values[name] = getattr(args, name)
    for name in _SCALARS:
        if getattr(args, name) is not None:
            values[name] = getattr(args, name)
    if args.detectors is not None:
        values["detectors"] = [d.strip() for d in args.detectors.split(",") if d.strip()]
    for name in _SWEEPS:
        if name in values:
            values[name] = parse_sweep(values[name])
    return harness.SimConfig.from_dict(values)


def _write_sidecar(out: Path, subcommand: str, config: harness.SimConfig) -> Path:
    sidecar = out.with_suffix(".config.json")
    payload = {"subcommand": subcommand, **config.to_dict()}
    sidecar.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return sidecar


def run(subcommand: str, config: harness.SimConfig, out: Path) -> None:
    if subcommand == "av-noise":
        rows = analytics.empirical_av_stats(
            config.kappa, config.frames, n_fft=config.n_fft, constellation=config.constellation, seed=config.seed
        )
        write_rows(out, rows, analytics.AV_NOISE_COLUMNS)
    elif subcommand == "threshold":
        result = harness.run_noiseless_threshold(config)
        write_rows(out, result.records, tuple(ThresholdRecord.__dataclass_fields__))
        if result.kappa_threshold is None:
            print("no error-free kappa on the grid")
        else:
            print(f"kappa_threshold={result.kappa_threshold} p_th={result.p_th:.6g}")
    elif subcommand == "scatter":
        write_rows(out, harness.dump_constellation_scatter(config), tuple(ScatterRow.__dataclass_fields__))
    else:
        runner = {
            "iterations": harness.run_iteration_stats,
            "ser-vs-snr": harness.run_ser_vs_snr,
            "ser-vs-kappa": harness.run_ser_vs_kappa,
            "dispersion": harness.run_dispersion_sweep,
            "detect-one": harness.run_sweep,
        }[subcommand]
        records = runner(config)
        write_records(out, records)
        if subcommand == "detect-one":
            for r in records:
                iters = "" if r.iter_max is None else f" iterations={r.iter_max}"
                print(f"{r.detector}: errors={r.symbol_errors}{iters}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = resolve_config(args)
    except (ValueError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"isea-ofdm: invalid configuration: {exc}", file=sys.stderr)
        return 2
    out = args.out or Path(f"{args.subcommand}.csv")
    log.info("resolved config for %s: %s", args.subcommand, json.dumps(config.to_dict()))
    try:
        if out.parent and not out.parent.is_dir():
            raise OSError(f"output directory {out.parent} does not exist")
        run(args.subcommand, config, out)
        _write_sidecar(out, args.subcommand, config)
    except OSError as exc:
        print(f"isea-ofdm: cannot write output: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"isea-ofdm: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
