"""Command-line front end.

Subcommands: ``example <id>``, ``catalog``, ``analyze``, ``scan``,
``region`` and ``multimeter-audit``.  Inputs are the JSON wire formats of
:mod:`waylab.serialization`; outputs are JSON documents, the two CSV
layouts (``alpha,min_bound,nx,ny,nz`` and ``x,z``) and optional SVG
renderings.  Identical configuration and inputs produce byte-identical
artifacts.

Exit codes: 0 success, 1 schema/model/numeric validation failure, 2 I/O
failure.  The environment variable ``WAYLAB_TOLERANCE`` (or ``--tolerance``)
overrides the predicate tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import config, measurement, multimeter, serialization, svg, way
from .catalog import CATALOG, build, run_facts
from .errors import MalformedCsv, SchemaError, WaylabError
from .measurement import NormalMeasurement
from .multimeter import Multimeter
from .observables import is_sharp, is_trivial, nontriviality


@dataclass
class RunConfig:
    command: str
    entry_id: str | None = None
    model_path: str | None = None
    quantity_path: str | None = None
    additive: bool = False
    multiplicative_path: str | None = None
    states_path: str | None = None
    alpha_min: float = 0.6
    alpha_max: float = 1.0
    steps: int = 81
    alpha: float | None = None
    grid: int = 401
    out: str | None = None
    svg_out: str | None = None
    tolerance: float | None = None

    def validate(self) -> None:
        if self.command in ("scan",) and self.steps < 8:
            raise SchemaError("steps", "grid sizes must be at least 8")
        if self.command in ("region",) and self.grid < 8:
            raise SchemaError("grid", "grid sizes must be at least 8")
        if self.command == "scan" and not (self.alpha_min <= self.alpha_max):
            raise SchemaError("alpha-min", "alpha-min must not exceed alpha-max")
        for name in ("alpha_min", "alpha_max"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise SchemaError(name.replace("_", "-"), "alpha values lie in [0, 1]")
        if self.command == "region" and not (0.0 <= float(self.alpha) <= 1.0):
            raise SchemaError("alpha", "alpha values lie in [0, 1]")


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(path, f"not valid JSON ({exc})") from None


def _fact_record(fact, result) -> dict:
    return {
        "name": fact.name,
        "tag": fact.tag,
        "description": fact.description,
        "passed": bool(result.passed),
        "values": {k: v for k, v in sorted(result.values.items())},
    }


def _cmd_example(cfg: RunConfig) -> int:
    entry = CATALOG.get(cfg.entry_id)
    if entry is None:
        raise SchemaError("id", f"unknown catalog id {cfg.entry_id!r}")
    records = [_fact_record(f, r) for f, r in run_facts(cfg.entry_id)]
    doc = {
        "id": entry.id,
        "description": entry.description,
        "facts": records,
        "all_passed": all(r["passed"] for r in records),
    }
    if not entry.facts:
        built = build(cfg.entry_id)
        if isinstance(built, NormalMeasurement):
            doc["object"] = serialization.measurement_to_json(built)
        elif isinstance(built, Multimeter):
            doc["object"] = serialization.multimeter_to_json(built)
        else:
            doc["object"] = serialization.quantity_to_json(built)
    _write_text(cfg.out, serialization.dumps(doc))
    if not doc["all_passed"]:
        failed = [r["name"] for r in records if not r["passed"]]
        print(f"validation error: facts failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def _cmd_catalog(cfg: RunConfig) -> int:
    entries = []
    for key in sorted(CATALOG):
        e = CATALOG[key]
        entries.append(
            {
                "id": e.id,
                "description": e.description,
                "parameters": list(e.parameters),
                "expected_facts": [
                    {"name": f.name, "tag": f.tag, "description": f.description}
                    for f in e.facts
                ],
            }
        )
    _write_text(cfg.out, serialization.dumps({"entries": entries}))
    return 0


def _bound_record(report: way.WayBoundReport) -> dict:
    return {
        "lhs": report.lhs,
        "rhs_terms": {name: value for name, value in report.rhs_terms},
        "rhs_total": report.rhs_total,
        "slack": report.slack,
    }


def _cmd_analyze(cfg: RunConfig) -> int:
    nm = serialization.measurement_from_json(_load_json(cfg.model_path), "model")
    obs = measurement.measured_observable(nm)
    doc: dict = {
        "model": {
            "system_dim": nm.system_dim,
            "apparatus_dim": nm.apparatus_dim,
            "sharpness_defect": measurement.sharpness_defect_breakdown(nm),
            "repeatable": measurement.is_repeatable(nm),
            "measured_observable": serialization.observable_to_json(obs),
            "measured_is_sharp": is_sharp(obs),
            "measured_is_trivial": is_trivial(obs),
            "measured_nontriviality": nontriviality(obs),
        }
    }
    if cfg.quantity_path is not None:
        q = serialization.quantity_from_json(_load_json(cfg.quantity_path), "quantity")
        full = nm.system_dim * nm.apparatus_dim
        if q.shape[0] == full:
            prop1 = way.prop1_check(nm, q)
            doc["quantity"] = {
                "dim": q.shape[0],
                "prop1": {
                    "weak_yanase": prop1.weak_yanase,
                    "sharpness": prop1.sharpness,
                    "conclusion": prop1.conclusion,
                },
                "prop2": {
                    x: _bound_record(way.prop2_bound(nm, q, x))
                    for x in nm.pointer.outcomes
                },
            }
        elif q.shape[0] == nm.system_dim:
            doc["quantity"] = {
                "dim": q.shape[0],
                "prop3": {
                    x: _bound_record(way.prop3_bound(nm, q, x))
                    for x in nm.pointer.outcomes
                },
            }
        else:
            raise SchemaError(
                "quantity.dim",
                f"quantity must live on the system ({nm.system_dim}) or the "
                f"composite ({full}) space, got {q.shape[0]}",
            )
    if cfg.additive:
        conserved = way.additive_conserved_space(
            nm.coupling, (nm.system_dim, nm.apparatus_dim)
        )
        weak = way.additive_weak_yanase_space(nm)
        agreement = []
        for pair in conserved.physical:
            agreement.append(
                {
                    "yanase_defect": measurement.yanase_defect(nm, pair.l2),
                    "weak_yanase_defect": measurement.weak_yanase_defect(
                        nm, pair.operator()
                    ),
                }
            )
        doc["additive"] = {
            "conserved_physical_dimension": conserved.physical_dimension,
            "conserved_kernel_dimension": conserved.kernel_dimension,
            "conserved_pairs": [
                {
                    "l1": serialization.matrix_to_pairs(p.l1),
                    "l2": serialization.matrix_to_pairs(p.l2),
                }
                for p in conserved.physical
            ],
            "weak_yanase_physical_dimension": weak.physical_dimension,
            "weak_yanase_system_trivial": weak.system_trivial(),
            "yanase_equivalence": agreement,
        }
    if cfg.multiplicative_path is not None:
        l2 = serialization.quantity_from_json(
            _load_json(cfg.multiplicative_path), "multiplicative"
        )
        space = way.multiplicative_weak_yanase_space(nm, l2)
        doc["multiplicative"] = {
            "dimension": space.dimension,
            "l1_basis": [serialization.matrix_to_pairs(m) for m in space.matrices],
        }
    _write_text(cfg.out, serialization.dumps(doc))
    return 0


def scan_rows_to_csv(points) -> str:
    lines = ["alpha,min_bound,nx,ny,nz"]
    for p in points:
        d = p.direction
        lines.append(
            f"{float(p.alpha)!r},{float(p.min_bound)!r},"
            f"{float(d[0])!r},{float(d[1])!r},{float(d[2])!r}"
        )
    return "\n".join(lines) + "\n"


def region_to_csv(region) -> str:
    lines = ["x,z"]
    for x, z in region.points:
        lines.append(f"{float(x)!r},{float(z)!r}")
    return "\n".join(lines) + "\n"


def _cmd_scan(cfg: RunConfig) -> int:
    alphas = np.linspace(cfg.alpha_min, cfg.alpha_max, cfg.steps)
    points = way.figure2_scan(alphas)
    text = scan_rows_to_csv(points)
    _write_text(cfg.out, text)
    if cfg.svg_out is not None:
        _write_text(cfg.svg_out, svg.render_svg(text))
    return 0


def _cmd_region(cfg: RunConfig) -> int:
    region = way.realisable_effect_region(float(cfg.alpha), grid=cfg.grid)
    text = region_to_csv(region)
    _write_text(cfg.out, text)
    if cfg.svg_out is not None:
        _write_text(
            cfg.svg_out,
            svg.render_region_svg(region.points, axis=region.direction,
                                  alpha=region.alpha),
        )
    return 0


def _cmd_multimeter_audit(cfg: RunConfig) -> int:
    mm = serialization.multimeter_from_json(_load_json(cfg.model_path), "model")
    states = serialization.states_from_json(_load_json(cfg.states_path))
    labels = [label for label, _ in states]
    if len(set(labels)) != len(labels):
        raise SchemaError("states", "state labels must be unique")

    cells: dict[tuple[str, str], str] = {}
    audits = []
    for label1, phi1 in states:
        obs1 = multimeter.program(mm, phi1)
        first_sharp = is_sharp(obs1)
        for label2, phi2 in states:
            audit = multimeter.orthogonality_audit(mm, phi1, phi2)
            record = {
                "first": label1,
                "second": label2,
                "overlap": audit.overlap,
                "distinct_sharp": audit.distinct_sharp,
                "sharp_first": audit.sharp_first,
                "sharp_second": audit.sharp_second,
                "max_effect_distance": audit.max_effect_distance,
            }
            if first_sharp:
                bounds = [
                    multimeter.prop5_bound(mm, phi1, phi2, x, y)
                    for x in mm.pointer.outcomes
                    for y in mm.pointer.outcomes
                ]
                worst = max(bounds, key=lambda r: r.rhs_total)
                record["prop5"] = {
                    "max_rhs": worst.rhs_total,
                    "max_lhs": max(r.lhs for r in bounds),
                    "min_slack": min(r.slack for r in bounds),
                }
                cells[(label1, label2)] = repr(float(worst.rhs_total))
            else:
                cells[(label1, label2)] = ""
            audits.append(record)

    lines = ["label," + ",".join(labels)]
    for label1 in labels:
        row = [label1] + [cells[(label1, label2)] for label2 in labels]
        lines.append(",".join(row))
    csv_text = "\n".join(lines) + "\n"
    json_text = serialization.dumps({"pairs": audits})
    if cfg.out is None:
        sys.stdout.write(csv_text)
        sys.stdout.write(json_text)
    else:
        _write_text(cfg.out, csv_text)
        _write_text(cfg.out + ".json", json_text)
    return 0


def run(cfg: RunConfig) -> int:
    """Execute a validated configuration; returns the process exit code."""
    cfg.validate()
    if cfg.tolerance is not None:
        config.set_default_tolerance(cfg.tolerance)
    try:
        if cfg.command == "example":
            return _cmd_example(cfg)
        if cfg.command == "catalog":
            return _cmd_catalog(cfg)
        if cfg.command == "analyze":
            return _cmd_analyze(cfg)
        if cfg.command == "scan":
            return _cmd_scan(cfg)
        if cfg.command == "region":
            return _cmd_region(cfg)
        if cfg.command == "multimeter-audit":
            return _cmd_multimeter_audit(cfg)
        raise SchemaError("command", f"unknown command {cfg.command!r}")
    finally:
        if cfg.tolerance is not None:
            config.set_default_tolerance(None)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="waylab",
        description="measured observables, commutant spaces and "
        "commutator-norm measurability bounds",
    )
    parser.add_argument("--tolerance", type=float, default=None,
                        help="override the predicate tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("example", help="replay a catalog entry's facts")
    p.add_argument("id")
    p.add_argument("--out", default=None)

    p = sub.add_parser("catalog", help="list catalog entries and facts")
    p.add_argument("--out", default=None)

    p = sub.add_parser("analyze", help="evaluate bounds for a measurement model")
    p.add_argument("--model", required=True)
    p.add_argument("--quantity", default=None)
    p.add_argument("--additive", action="store_true")
    p.add_argument("--multiplicative", default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("scan", help="minimised direction bound over alpha")
    p.add_argument("--alpha-min", type=float, required=True)
    p.add_argument("--alpha-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--svg", default=None)

    p = sub.add_parser("region", help="realisable-effect cross-section")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--grid", type=int, default=401)
    p.add_argument("--out", default=None)
    p.add_argument("--svg", default=None)

    p = sub.add_parser("multimeter-audit", help="pairwise programming bounds")
    p.add_argument("--model", required=True)
    p.add_argument("--states", required=True)
    p.add_argument("--out", default=None)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command, tolerance=args.tolerance)
    if args.command == "example":
        cfg.entry_id = args.id
        cfg.out = args.out
    elif args.command == "catalog":
        cfg.out = args.out
    elif args.command == "analyze":
        cfg.model_path = args.model
        cfg.quantity_path = args.quantity
        cfg.additive = args.additive
        cfg.multiplicative_path = args.multiplicative
        cfg.out = args.out
    elif args.command == "scan":
        cfg.alpha_min = args.alpha_min
        cfg.alpha_max = args.alpha_max
        cfg.steps = args.steps
        cfg.out = args.out
        cfg.svg_out = args.svg
    elif args.command == "region":
        cfg.alpha = args.alpha
        cfg.grid = args.grid
        cfg.out = args.out
        cfg.svg_out = args.svg
    elif args.command == "multimeter-audit":
        cfg.model_path = args.model
        cfg.states_path = args.states
        cfg.out = args.out
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    cfg = _config_from_args(args)
    try:
        return run(cfg)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except MalformedCsv as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except WaylabError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
