"""Command-line runs for the coupler, CNOT and path-entanglement experiments.

Every command writes JSON (default) or CSV to stdout or ``--output``.
Exit status: 0 success, 1 runtime error, 2 usage, config or netlist error.

Parameter precedence: built-in defaults < ``--config`` file < flags. The
config file holds ``key = value`` lines with keys named like the long
flags without dashes (``delta_eta = 0.034``); ``#`` starts a comment.

JSON output carries ``"schema_version": 1``. CSV column orders:

* hom-scan: ``tau_s, coincidence_probability[, counts, counts_error]``
* visibility-curve: ``family, eta, visibility``
* truth-table: ``input, p00, p01, p10, p11, success_probability``
  (with ``--sweep``: ``eta_half, fidelity``)
* noon: ``quantity, value``
* compile: ``row, col, re, im``
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict
from typing import Any, Sequence

import numpy as np

from . import __version__
from .circuit import BUILTIN_CIRCUITS, ImperfectionSpec, builtin_netlist, cnot_with_hadamards, compile_netlist, \
    load_netlist
from .detection import DetectorSpec, ExperimentConfig, LossSpec, detected_pair_probability, point_seed, \
    sample_counts
from .errors import ParseError, WgsimError
from .fock import unitarity_error
from .gates import CNOT, CNOT_ENCODING, H_CONTROL, LOGICAL_LABELS, fidelity_vs_eta, ideal_truth_table, \
    logical_basis_fidelity, logical_equivalence, truth_table
from .interference import DistinguishabilitySpec, SourceSpec, hom_scan, visibility, visibility_curve
from .noon import estimate_density_matrix, noon_state, sample_count_record, simulate_count_record

SCHEMA_VERSION = 1

DEFAULTS: dict[str, Any] = {
    "eta": 0.5,
    "eta_half": 0.5,
    "eta_third": None,
    "delta_eta": 0.0,
    "epsilon": 0.0,
    "efficiency": 0.70,
    "transmission": 0.60,
    "splitter_ratio": 0.5,
    "pair_rate": 4000.0,
    "integration_time": 100.0,
    "wavelength": 804e-9,
    "filter_fwhm": 2e-9,
    "seed": 0,
    "format": "json",
    "delays": "-3e-12:3e-12:25",
    "half_etas": "0.40:0.60:21",
    "third_etas": "0.27:0.40:14",
    "circuit": None,
    "netlist": None,
    "sweep": None,
    "output": None,
    "sample": False,
    "noiseless": False,
    "check_cnot": False,
    "h_before": False,
    "h_after": False,
}


class UsageError(Exception):
    pass


def parse_grid(spec: str) -> list[float]:
    """``start:stop:count`` (inclusive, evenly spaced) or a comma list."""
    spec = spec.strip()
    try:
        if ":" in spec:
            start, stop, count = spec.split(":")
            n = int(count)
            if n < 1:
                raise ValueError
            return [float(x) for x in np.linspace(float(start), float(stop), n)]
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad grid {spec!r}; use start:stop:count or a comma list") from None


def read_config(path: str) -> dict[str, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    out = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value.strip()
    return out


_FLOAT_KEYS = {"eta", "eta_half", "eta_third", "delta_eta", "epsilon", "efficiency", "transmission",
               "splitter_ratio", "pair_rate", "integration_time", "wavelength", "filter_fwhm"}


def _coerce(key: str, value: Any) -> Any:
    if value is None or not isinstance(value, str):
        return value
    try:
        if key in _FLOAT_KEYS:
            return float(value)
        if key == "seed":
            return int(value)
    except ValueError:
        raise UsageError(f"bad value for {key}: {value!r}") from None
    if key in ("noiseless", "check_cnot", "sample", "h_before", "h_after"):
        return value.lower() in ("1", "true", "yes", "on")
    return value


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    params = dict(DEFAULTS)
    if args.config:
        params.update(read_config(args.config))
    for key, value in vars(args).items():
        if key in ("command", "config", "func"):
            continue
        if value is not None and value is not False:
            params[key] = value
        else:
            params.setdefault(key, value)
    params = {k: _coerce(k, v) for k, v in params.items()}
    if params["format"] not in ("json", "csv"):
        raise UsageError(f"unknown format {params['format']!r}")
    if params["circuit"] is not None and params["netlist"] is not None:
        raise UsageError("give either --circuit or --netlist, not both")
    if params["eta_third"] is None:
        params["eta_third"] = 2 * params["eta_half"] / 3
    return params


def _json_float(x: float):
    return None if isinstance(x, float) and math.isnan(x) else x


def _complex_pairs(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(mat)]


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows([["nan" if isinstance(v, float) and math.isnan(v) else v for v in row] for row in rows])
    return buf.getvalue()


def _json_text(command: str, params: dict, payload: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "command": command,
           "parameters": {k: params[k] for k in sorted(params) if k not in ("output", "format")}}
    doc.update(payload)
    return json.dumps(doc, indent=2) + "\n"


def _distinguishability(params) -> DistinguishabilitySpec:
    return DistinguishabilitySpec.from_epsilon(params["epsilon"])


def cmd_hom_scan(params: dict) -> str:
    source = SourceSpec(params["wavelength"], params["filter_fwhm"], params["pair_rate"])
    floor = _distinguishability(params)
    realized = min(1.0, max(0.0, params["eta"] + params["delta_eta"]))
    delays = parse_grid(params["delays"])
    scan = hom_scan(realized, source, floor, delays)
    header = ["tau_s", "coincidence_probability"]
    rows = [[t, p] for t, p in zip(scan.delays, scan.coincidence_probs)]
    if params.get("sample"):
        header += ["counts", "counts_error"]
        loss, det = LossSpec(params["transmission"]), DetectorSpec(params["efficiency"])
        for i, row in enumerate(rows):
            probs = detected_pair_probability({"coincidence": row[1], "other": 1 - row[1]}, loss, det)
            cfg = ExperimentConfig(params["pair_rate"], params["integration_time"], point_seed(params["seed"], i))
            n = sample_counts(probs, cfg)["coincidence"]
            row += [n, math.sqrt(n)]
    if params["format"] == "csv":
        return _csv_text(header, rows)
    payload = {"columns": header, "rows": rows, "realized_eta": realized,
               "scan_visibility": scan.visibility() if scan.delays else None}
    if 0 < realized < 1:
        payload["visibility"] = visibility(realized, floor)
    return _json_text("hom-scan", params, payload)


def cmd_visibility_curve(params: dict) -> str:
    rows = []
    for family, key in (("1/2", "half_etas"), ("1/3", "third_etas")):
        for eta, v in visibility_curve(parse_grid(params[key]), params["delta_eta"], params["epsilon"]):
            rows.append([family, eta, v])
    header = ["family", "eta", "visibility"]
    if params["format"] == "csv":
        return _csv_text(header, rows)
    rows = [[f, e, _json_float(v)] for f, e, v in rows]
    return _json_text("visibility-curve", params, {"columns": header, "rows": rows})


def _gate_target(h_before: bool, h_after: bool) -> np.ndarray:
    target = CNOT
    if h_before:
        target = target @ H_CONTROL
    if h_after:
        target = H_CONTROL @ target
    return target


def cmd_truth_table(params: dict) -> str:
    h_before, h_after = bool(params.get("h_before")), bool(params.get("h_after"))
    name = params["circuit"] or ("cnot" if params["netlist"] is None else None)
    if name is not None:
        if name == "cnot-h":
            h_before = True
        elif name == "cnot-hh":
            h_before = h_after = True
        elif name != "cnot":
            raise UsageError(f"truth-table needs a CNOT-family circuit, not {name!r}")
        net = cnot_with_hadamards(params["eta_half"], params["eta_third"], h_before, h_after)
    else:
        net = load_netlist(params["netlist"])
    u = compile_netlist(net, ImperfectionSpec(params["delta_eta"]))
    table = truth_table(u, CNOT_ENCODING, _distinguishability(params))
    ideal = ideal_truth_table(_gate_target(h_before, h_after))
    fidelity = logical_basis_fidelity(table, ideal) if not table.failed_rows else None
    sweep = None
    if params["sweep"]:
        sweep = fidelity_vs_eta(parse_grid(params["sweep"]), params["delta_eta"], params["epsilon"])
    if params["format"] == "csv":
        if sweep is not None:
            return _csv_text(["eta_half", "fidelity"], sweep)
        rows = [[LOGICAL_LABELS[i], *table.probs[i], table.success_probs[i]] for i in range(4)]
        return _csv_text(["input", "p00", "p01", "p10", "p11", "success_probability"], rows)
    payload = {
        "labels": list(LOGICAL_LABELS),
        "probabilities": table.probs.tolist(),
        "success_probabilities": table.success_probs.tolist(),
        "failed_rows": list(table.failed_rows),
        "ideal": ideal.probs.tolist(),
        "logical_basis_fidelity": fidelity,
    }
    if sweep is not None:
        payload["sweep"] = {"columns": ["eta_half", "fidelity"], "rows": [list(r) for r in sweep]}
    return _json_text("truth-table", params, payload)


def cmd_noon(params: dict) -> str:
    d = _distinguishability(params)
    realized = min(1.0, max(0.0, params["eta"] + params["delta_eta"]))
    amps = noon_state(realized)
    expected = simulate_count_record(params["eta"], params["delta_eta"], d, params["efficiency"],
                                     params["transmission"], params["splitter_ratio"], params["pair_rate"])
    if params.get("noiseless"):
        record = expected
    else:
        cfg = ExperimentConfig(params["pair_rate"], params["integration_time"], params["seed"])
        record = sample_count_record(expected, cfg)
    rho, bound = estimate_density_matrix(record)
    probs = {"20": abs(amps[0]) ** 2, "11": abs(amps[1]) ** 2, "02": abs(amps[2]) ** 2}
    rec = {k: (list(map(float, v)) if isinstance(v, tuple) else float(v)) for k, v in asdict(record).items()}
    if params["format"] == "csv":
        rows = [[f"p{k}", v] for k, v in probs.items()]
        rows += [["tap_coincidence_rate", rec["tap_coincidence_rate"]],
                 ["tap_bunched_rate_upper", rec["tap_bunched_rates"][0]],
                 ["tap_bunched_rate_lower", rec["tap_bunched_rates"][1]],
                 ["out_coincidence_rate", rec["out_coincidence_rate"]],
                 ["out_bunched_rate_upper", rec["out_bunched_rates"][0]],
                 ["out_bunched_rate_lower", rec["out_bunched_rates"][1]]]
        rows += [[f"rho_{i}{j}_re", rho.entries[i, j].real] for i in range(3) for j in range(3)]
        rows += [["fidelity_bound", bound]]
        return _csv_text(["quantity", "value"], rows)
    payload = {
        "basis": ["20", "11", "02"],
        "state_probabilities": probs,
        "count_record": rec,
        "density_matrix": _complex_pairs(rho.entries),
        "fidelity_bound": bound,
    }
    return _json_text("noon", params, payload)


def cmd_compile(params: dict) -> str:
    if params["netlist"] is not None:
        net = load_netlist(params["netlist"])
    else:
        net = builtin_netlist(params["circuit"] or "cnot", params["eta_half"], params["eta_third"])
    u = compile_netlist(net, ImperfectionSpec(params["delta_eta"]))
    if params["format"] == "csv":
        rows = [[i, j, float(z.real), float(z.imag)] for (i, j), z in np.ndenumerate(u.matrix)]
        return _csv_text(["row", "col", "re", "im"], rows)
    payload = {
        "mode_count": net.mode_count,
        "labels": {str(k): v for k, v in net.labels.items()},
        "unitary": _complex_pairs(u.matrix),
        "unitarity_error": unitarity_error(u.matrix),
    }
    if params.get("check_cnot"):
        if net.mode_count < 4:
            raise UsageError("CNOT equivalence needs at least four modes")
        ok, dist = logical_equivalence(u, CNOT_ENCODING, CNOT)
        payload["cnot_equivalence"] = {"equivalent": ok, "distance": dist}
    return _json_text("compile", params, payload)


COMMANDS = {
    "hom-scan": cmd_hom_scan,
    "visibility-curve": cmd_visibility_curve,
    "truth-table": cmd_truth_table,
    "noon": cmd_noon,
    "compile": cmd_compile,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wgsim", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value parameter file")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--output", "-o", help="write here instead of stdout")
    common.add_argument("--seed", type=int)
    common.add_argument("--delta-eta", type=float, help="offset added to every coupler reflectivity")
    common.add_argument("--epsilon", type=float, help="mode mismatch 1 - |gamma|^2")

    p = sub.add_parser("hom-scan", parents=[common], help="coincidence probability against delay")
    p.add_argument("--eta", type=float)
    p.add_argument("--delays", help="seconds; start:stop:count or comma list")
    p.add_argument("--wavelength", type=float)
    p.add_argument("--filter-fwhm", type=float)
    p.add_argument("--pair-rate", type=float)
    p.add_argument("--integration-time", type=float)
    p.add_argument("--efficiency", type=float)
    p.add_argument("--transmission", type=float)
    p.add_argument("--sample", action="store_true", help="add seeded Poisson counts per delay")

    p = sub.add_parser("visibility-curve", parents=[common], help="visibility against design reflectivity")
    p.add_argument("--half-etas")
    p.add_argument("--third-etas")

    p = sub.add_parser("truth-table", parents=[common], help="post-selected CNOT truth table")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--circuit", choices=("cnot", "cnot-h", "cnot-hh"))
    src.add_argument("--netlist")
    p.add_argument("--eta-half", type=float)
    p.add_argument("--eta-third", type=float)
    p.add_argument("--h-before", action="store_true")
    p.add_argument("--h-after", action="store_true")
    p.add_argument("--sweep", help="eta_half grid for a fidelity table")

    p = sub.add_parser("noon", parents=[common], help="path-entangled state and density-matrix bound")
    p.add_argument("--eta", type=float)
    p.add_argument("--efficiency", type=float)
    p.add_argument("--transmission", type=float)
    p.add_argument("--splitter-ratio", type=float)
    p.add_argument("--pair-rate", type=float)
    p.add_argument("--integration-time", type=float)
    p.add_argument("--noiseless", action="store_true", help="use expected rates, no sampling")

    p = sub.add_parser("compile", parents=[common], help="dump a circuit's mode unitary")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--circuit", choices=BUILTIN_CIRCUITS)
    src.add_argument("--netlist")
    p.add_argument("--eta-half", type=float)
    p.add_argument("--eta-third", type=float)
    p.add_argument("--check-cnot", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        params = resolve(args)
        text = COMMANDS[args.command](params)
    except (UsageError, ParseError) as exc:
        print(f"wgsim {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"wgsim {args.command}: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 2
    except (WgsimError, ValueError) as exc:
        print(f"wgsim {args.command}: {exc}", file=sys.stderr)
        return 1
    if params["output"]:
        with open(params["output"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
