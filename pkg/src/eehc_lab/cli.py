"""Command-line front end: ``eehc-lab {analyze,sweep,simulate,optimal-k}``.

Config documents are JSON with flat dotted keys (``"cluster.n": 1000``,
``"radio.pa_efficiency": 0.4``, ``"sim.seed": 7``); nested objects are
flattened the same way. Command-line flags override the document.

Exit codes: 0 success, 2 usage or validation error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from . import __version__
from .analysis import (
    PAPER_DB_COMPAT, PHYSICAL, ClusterConfig, EnergyReport, analyze, optimal_clusters_closed,
    optimal_clusters_numeric, optimal_clusters_raw, start_energy,
)
from .errors import EEHCError, ValidationError
from .radio import RadioParams
from .reports import sidecar_path, write_csv, write_json
from .simulator import RNG_ALGORITHM, TRACE_HEADER, RoundRecord, analytic_comparison, init_network, run_lifetime
from .sweep import DEFAULT_SCENARIO, PRESET_NAMES, SweepSpec, figure_preset, run_sweep

COMMANDS = ("analyze", "sweep", "simulate", "optimal-k")
EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3

RADIO_KEYS = {f"radio.{name}" for name in RadioParams().to_dict()}
CLUSTER_KEYS = {f"cluster.{name}" for name in ClusterConfig().to_dict()}
OTHER_KEYS = {"sweep.preset", "sweep.axes", "sweep.outputs", "sweep.k_scale", "sim.seed",
              "sim.max_rounds", "sim.e_start", "sim.until", "sim.trace", "output_path",
              "compat.paper_db_compat", "optimal_k.scale"}
KNOWN_KEYS = RADIO_KEYS | CLUSTER_KEYS | OTHER_KEYS

# flag dest -> document key
FLAG_KEYS = {
    "n": "cluster.n", "k": "cluster.k", "m": "cluster.m", "l": "cluster.l",
    "nf": "cluster.n_frames", "d_bs": "cluster.d_bs", "d_intra": "cluster.d_intra",
    "field_side": "cluster.field_side", "eta": "radio.pa_efficiency", "snr_db": "radio.snr_min_db",
    "preset": "sweep.preset", "seed": "sim.seed", "rounds": "sim.max_rounds",
    "e_start": "sim.e_start", "until": "sim.until", "out": "output_path",
    "k_scale": "optimal_k.scale",
}


@dataclass
class SimOptions:
    seed: int = 0
    max_rounds: int = 10
    e_start: float | None = None  # None: the closed-form one-round battery
    until: str = "first_death"
    trace: bool = False


@dataclass
class RunConfig:
    command: str
    radio: RadioParams
    cluster: ClusterConfig
    sweep: SweepSpec | None = None
    preset: str | None = None
    sim: SimOptions = field(default_factory=SimOptions)
    output_path: Path | None = None
    compat_flags: frozenset[str] = frozenset()
    k_scale: float = 1.0

    @property
    def snr_mode(self) -> str:
        return PAPER_DB_COMPAT if PAPER_DB_COMPAT in self.compat_flags else PHYSICAL

    def resolved(self) -> dict:
        doc = {
            "command": self.command,
            "radio": self.radio.to_dict(),
            "cluster": self.cluster.to_dict(),
            "compat_flags": sorted(self.compat_flags),
            "output_path": None if self.output_path is None else str(self.output_path),
        }
        if self.command == "simulate":
            doc["sim"] = dict(vars(self.sim))
        if self.command == "sweep" and self.sweep is not None:
            doc["sweep"] = self.sweep.to_dict()
        if self.command == "optimal-k":
            doc["k_scale"] = self.k_scale
        return doc


def flatten(doc: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    out = {}
    for key, value in doc.items():
        path = f"{prefix}{key}"
        if isinstance(value, Mapping):
            out.update(flatten(value, path + "."))
        else:
            out[path] = value
    return out


def parse_config(command: str, document: Mapping[str, Any] | None = None,
                 overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Merge a config document with flag overrides into a validated RunConfig.

    Omitted radio fields take the reference transceiver defaults; omitted
    cluster fields take the default scenario.
    """
    if command not in COMMANDS:
        raise ValidationError("command", f"one of {', '.join(COMMANDS)}", command)
    doc = flatten(document or {})
    doc.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = sorted(set(doc) - KNOWN_KEYS)
    if unknown:
        raise ValidationError(unknown[0], "a known config key")

    radio_doc = {k.split(".", 1)[1]: v for k, v in doc.items() if k in RADIO_KEYS}
    cluster_doc = {k.split(".", 1)[1]: v for k, v in doc.items() if k in CLUSTER_KEYS}
    try:
        radio = RadioParams.from_dict(radio_doc)
    except ValidationError as exc:
        raise ValidationError(f"radio.{exc.field}", exc.rule, exc.value) from None
    except (TypeError, ValueError) as exc:
        raise ValidationError("radio", "numeric values", str(exc)) from None
    try:
        cluster = DEFAULT_SCENARIO.replace(**cluster_doc)
    except ValidationError as exc:
        raise ValidationError(f"cluster.{exc.field}", exc.rule, exc.value) from None
    except (TypeError, ValueError) as exc:
        raise ValidationError("cluster", "numeric values", str(exc)) from None

    compat = frozenset({PAPER_DB_COMPAT}) if doc.get("compat.paper_db_compat") else frozenset()
    rc = RunConfig(command=command, radio=radio, cluster=cluster, compat_flags=compat,
                   output_path=Path(doc["output_path"]) if doc.get("output_path") else None,
                   k_scale=float(doc.get("optimal_k.scale", 1.0)))

    sim = SimOptions()
    if "sim.seed" in doc:
        seed = int(doc["sim.seed"])
        if not 0 <= seed < 2 ** 64:
            raise ValidationError("sim.seed", "0 <= seed < 2**64", seed)
        sim.seed = seed
    if "sim.max_rounds" in doc:
        sim.max_rounds = int(doc["sim.max_rounds"])
        if sim.max_rounds < 0:
            raise ValidationError("sim.max_rounds", "max_rounds >= 0", sim.max_rounds)
    if doc.get("sim.e_start") is not None:
        sim.e_start = float(doc["sim.e_start"])
        if not sim.e_start > 0:
            raise ValidationError("sim.e_start", "e_start > 0", sim.e_start)
    if "sim.until" in doc:
        sim.until = str(doc["sim.until"])
        if sim.until not in ("first_death", "exhaustion"):
            raise ValidationError("sim.until", "'first_death' or 'exhaustion'", sim.until)
    sim.trace = bool(doc.get("sim.trace", False))
    rc.sim = sim

    if command == "sweep":
        rc.preset = doc.get("sweep.preset")
        if rc.preset is not None:
            rc.sweep = figure_preset(rc.preset)
            # explicit radio/cluster settings refine the preset's base scenario
            if radio_doc:
                rc.sweep.base_radio = rc.sweep.base_radio.replace(**radio_doc)
            if cluster_doc:
                rc.sweep.base_cluster = rc.sweep.base_cluster.replace(**cluster_doc)
        elif "sweep.axes" in doc:
            try:
                rc.sweep = SweepSpec(axes=[tuple(a) for a in doc["sweep.axes"]],
                                     outputs=list(doc.get("sweep.outputs", EnergyReport.HEADER)),
                                     base_radio=radio, base_cluster=cluster, snr_mode=rc.snr_mode,
                                     k_scale=float(doc.get("sweep.k_scale", 1.0)))
            except ValidationError as exc:
                raise ValidationError(f"sweep.{exc.field}", exc.rule, exc.value) from None
        else:
            raise ValidationError("sweep.preset", "a preset name or sweep.axes is given")
    return rc


def _metadata(rc: RunConfig, **extra) -> dict:
    doc = {"tool": "eehc-lab", "version": __version__, "config": rc.resolved(),
           "compat_flags": sorted(rc.compat_flags), "seed": None}
    doc.update(extra)
    return doc


def _emit(rc: RunConfig, header, rows, meta: dict, stdout) -> None:
    if rc.output_path is None:
        write_csv(header, rows, stdout)
        return
    write_csv(header, rows, rc.output_path)
    write_json(meta, sidecar_path(rc.output_path))


def cmd_analyze(rc: RunConfig, stdout=sys.stdout) -> EnergyReport:
    report = analyze(rc.cluster, rc.radio)
    _emit(rc, EnergyReport.HEADER, [report.as_row()], _metadata(rc), stdout)
    return report


def cmd_sweep(rc: RunConfig, stdout=sys.stdout):
    table = run_sweep(rc.sweep)
    assumed = {"scenario": DEFAULT_SCENARIO.to_dict(), "radio": RadioParams().to_dict()}
    _emit(rc, table.header, table.rows, _metadata(rc, assumed_defaults=assumed), stdout)
    return table


OPTIMAL_K_HEADER = ("n", "d_bs", "field_side", "k_scale", "k_closed_raw", "k_closed",
                    "k_numeric", "e_start_min")


def cmd_optimal_k(rc: RunConfig, stdout=sys.stdout) -> tuple:
    c, p = rc.cluster, rc.radio
    raw = rc.k_scale * optimal_clusters_raw(c.n, p, c.d_bs, c.field_side, rc.snr_mode)
    k_closed = optimal_clusters_closed(c.n, p, c.d_bs, c.field_side, rc.snr_mode, rc.k_scale)
    k_num, e_min = optimal_clusters_numeric(c, p)
    row = (c.n, c.d_bs, c.field_side, rc.k_scale, raw, k_closed, k_num, e_min)
    _emit(rc, OPTIMAL_K_HEADER, [row], _metadata(rc), stdout)
    return row


def cmd_simulate(rc: RunConfig, stdout=sys.stdout):
    c, p, sim = rc.cluster, rc.radio, rc.sim
    e_start = sim.e_start if sim.e_start is not None else start_energy(c, p)
    bs = (c.field_side / 2, c.field_side / 2 + c.d_bs)
    state = init_network(sim.seed, c.n, c.field_side, bs, e_start, trace=sim.trace)
    metrics = run_lifetime(state, c.k, c.m, int(c.n_frames), c.l, p, sim.max_rounds, sim.until)
    summary = metrics.summary()
    summary["e_start"] = e_start
    summary["base_station"] = list(bs)
    if metrics.rounds:
        summary["analytic_comparison"] = analytic_comparison(metrics, c, p)
    rows = [r.as_row() for r in metrics.rounds]
    meta = _metadata(rc, seed=sim.seed, rng_algorithm=RNG_ALGORITHM, summary=summary)
    _emit(rc, RoundRecord.HEADER, rows, meta, stdout)
    if sim.trace and rc.output_path is not None:
        write_csv(TRACE_HEADER, state.trace, sidecar_path(rc.output_path, ".trace.csv"))
    return metrics


DISPATCH = {"analyze": cmd_analyze, "sweep": cmd_sweep, "simulate": cmd_simulate,
            "optimal-k": cmd_optimal_k}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eehc-lab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"eehc-lab {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="JSON config document")
    parser.add_argument("--out", help="output CSV path (stdout if omitted)")
    parser.add_argument("--preset", help=f"figure preset: {', '.join(PRESET_NAMES)}")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--rounds", type=int, help="maximum simulated rounds")
    parser.add_argument("--until", choices=("first_death", "exhaustion"))
    parser.add_argument("--e-start", type=float, dest="e_start", help="initial battery, joules")
    parser.add_argument("--trace", action="store_true", help="also write the per-event ledger")
    parser.add_argument("--paper-db-compat", action="store_true", dest="paper_db_compat",
                        help="closed-form k takes the SNR as its dB number")
    parser.add_argument("--k-scale", type=float, dest="k_scale",
                        help="multiplier on the closed-form cluster count")
    for flag, dest, typ in (("--n", "n", int), ("--k", "k", int), ("--m", "m", int),
                            ("--l", "l", float), ("--nf", "nf", float), ("--eta", "eta", float),
                            ("--snr-db", "snr_db", float), ("--d-bs", "d_bs", float),
                            ("--d-intra", "d_intra", float), ("--field-side", "field_side", float)):
        parser.add_argument(flag, dest=dest, type=typ)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        document = {}
        if args.config is not None:
            with open(args.config, encoding="utf-8") as fh:
                document = json.load(fh)
            if not isinstance(document, dict):
                raise ValidationError("config", "a JSON object")
        overrides = {key: getattr(args, dest) for dest, key in FLAG_KEYS.items()}
        if args.paper_db_compat:
            overrides["compat.paper_db_compat"] = True
        if args.trace:
            overrides["sim.trace"] = True
        rc = parse_config(args.command, document, overrides)
        DISPATCH[rc.command](rc, stdout=stdout)
    except (EEHCError, json.JSONDecodeError) as exc:
        print(f"eehc-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"eehc-lab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
