"""JSON wire formats for spaces, costs, measures, instances and reports.

Floats go through Python's shortest round-trip repr, so every value parses
back bit-for-bit.  Decoding validates eagerly and raises `ValidationError`
with a message naming the offending field.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import tempfile
from typing import Optional

import numpy as np

from .comparison import ComparisonReport
from .costs import CostSpec
from .duality import DiscreteMeasure, PotentialPair
from .errors import ValidationError
from .monge import MapVerificationReport, UniquenessReport
from .solver import TransportPlan
from .spaces import (
    AnnulusRegion,
    CapRegion,
    RectRegion,
    SpaceDescriptor,
    validate_point,
)


@dataclasses.dataclass(frozen=True)
class GridRegion:
    """Deterministic grid preset (generate-only; not a sampling region)."""

    nx: int
    ny: int
    xmin: float = 0.0
    xmax: float = 1.0
    ymin: float = 0.0
    ymax: float = 1.0


@dataclasses.dataclass(frozen=True)
class Instance:
    """A complete transport problem: space, cost and the two measures."""

    space: SpaceDescriptor
    cost: CostSpec
    source: DiscreteMeasure
    target: DiscreteMeasure
    seed: Optional[int] = None
    source_region: Optional[object] = None
    target_region: Optional[object] = None

    def __post_init__(self):
        self.source.validate_for_space(self.space)
        self.target.validate_for_space(self.space)


# ---------------------------------------------------------------------------
# encoders


def space_to_json(space: SpaceDescriptor) -> dict:
    if space.kind == "plane":
        return {"kind": "plane"}
    if space.kind == "sphere":
        return {"kind": "sphere", "curvature": space.curvature}
    return {"kind": "cone", "total_angle": space.total_angle}


def cost_to_json(spec: CostSpec) -> dict:
    if spec.kind == "quadratic":
        return {"kind": "quadratic"}
    return {"kind": "power", "p": spec.p}


def measure_to_json(measure: DiscreteMeasure) -> dict:
    return {
        "atoms": [
            {"point": [float(c) for c in p], "weight": float(w)}
            for p, w in zip(measure.points, measure.weights)
        ]
    }


def region_to_json(region) -> dict:
    if isinstance(region, RectRegion):
        return {"kind": "rect", "xmin": region.xmin, "xmax": region.xmax,
                "ymin": region.ymin, "ymax": region.ymax}
    if isinstance(region, AnnulusRegion):
        out = {"kind": "annulus", "r_min": region.r_min, "r_max": region.r_max}
        if region.phi_min != 0.0 or region.phi_max is not None:
            out["phi_min"] = region.phi_min
            out["phi_max"] = region.phi_max
        return out
    if isinstance(region, CapRegion):
        return {"kind": "cap", "angle": region.angle}
    if isinstance(region, GridRegion):
        return {"kind": "grid", "nx": region.nx, "ny": region.ny,
                "xmin": region.xmin, "xmax": region.xmax,
                "ymin": region.ymin, "ymax": region.ymax}
    raise ValidationError(f"cannot serialize region {type(region).__name__}")


def instance_to_json(inst: Instance) -> dict:
    out = {
        "space": space_to_json(inst.space),
        "cost": cost_to_json(inst.cost),
        "source": measure_to_json(inst.source),
        "target": measure_to_json(inst.target),
    }
    if inst.seed is not None:
        out["seed"] = inst.seed
    if inst.source_region is not None:
        out["source_region"] = region_to_json(inst.source_region)
    if inst.target_region is not None:
        out["target_region"] = region_to_json(inst.target_region)
    return out


def solution_to_json(plan: TransportPlan, pair: PotentialPair, gap: float) -> dict:
    return {
        "plan": [[i, j, m] for i, j, m in plan.entries],
        "cost": plan.cost_total,
        "phi": [float(x) for x in pair.phi],
        "phi_c": [float(x) for x in pair.phi_c],
        "gap": gap,
    }


def _clean_float(x: float):
    return None if (isinstance(x, float) and math.isnan(x)) else x


def comparison_report_to_json(report: ComparisonReport) -> dict:
    cfg = report.config
    out = {
        "samples": report.samples,
        "skipped": report.skipped,
        "evaluations": report.evaluations,
        "min_slack": _clean_float(report.min_slack),
        "mean_slack": _clean_float(report.mean_slack),
        "tol": report.tol,
        "passed": report.passed,
        "witness": None,
        "config": {
            "space": space_to_json(cfg["space"]),
            "k": cfg["k"],
            "n_samples": cfg["n_samples"],
            "seed": int(cfg["seed"]) if isinstance(cfg["seed"], (int, np.integer)) else str(cfg["seed"]),
            "region": region_to_json(cfg["region"]),
            "n_random_t": cfg["n_random_t"],
        },
    }
    if report.witness is not None:
        w = report.witness
        out["witness"] = {
            "p": [float(c) for c in w.p],
            "start": [float(c) for c in w.start],
            "end": [float(c) for c in w.end],
            "t": w.t,
            "slack": w.slack,
        }
    return out


def map_report_to_json(report: MapVerificationReport, include_rows: bool = False) -> dict:
    cfg = report.config
    out = {
        "n_atoms": report.n_atoms,
        "n_split": report.n_split,
        "n_verified": report.n_verified,
        "n_skipped": report.n_skipped,
        "n_assign_mismatch": report.n_assign_mismatch,
        "split_fraction": report.split_fraction,
        "max_formula_residual": report.max_formula_residual,
        "max_norm_residual": report.max_norm_residual,
        "fd_step": report.fd_step,
        "tol": report.tol,
        "passed": report.passed,
        "config": {
            "space": space_to_json(cfg["space"]),
            "cost": cost_to_json(cfg["cost"]),
            "fd_step": cfg["fd_step"],
            "tol": cfg["tol"],
            "pivot_rule": cfg["pivot_rule"],
            "n_source": cfg["n_source"],
            "n_target": cfg["n_target"],
        },
    }
    if include_rows:
        out["rows"] = [
            {
                "index": r.index,
                "status": r.status,
                "assigned": r.assigned,
                "argmin": r.argmin,
                "point": list(r.point),
                "target_point": list(r.target_point),
                "grad_norm": _clean_float(r.grad_norm),
                "dist_to_assigned": _clean_float(r.dist_to_assigned),
                "formula_residual": _clean_float(r.formula_residual),
                "norm_residual": _clean_float(r.norm_residual),
            }
            for r in report.rows
        ]
    return out


def uniqueness_report_to_json(report: UniquenessReport) -> dict:
    cfg = report.config
    return {
        "n_runs": report.n_runs,
        "n_atoms": report.n_atoms,
        "tie_atoms": report.tie_atoms,
        "disagreements": report.disagreements,
        "split_counts": report.split_counts,
        "agreed": report.agreed,
        "config": {
            "space": space_to_json(cfg["space"]),
            "cost": cost_to_json(cfg["cost"]),
            "perturbation_scale": cfg["perturbation_scale"],
            "trials": cfg["trials"],
            "seed": cfg["seed"],
        },
    }


def map_rows_to_csv(report: MapVerificationReport) -> str:
    """Flat per-atom table: one line per source atom, coordinates included."""
    dim = max((len(r.point) for r in report.rows), default=2)
    x_cols = ",".join(f"x{d}" for d in range(dim))
    y_cols = ",".join(f"y{d}" for d in range(dim))
    lines = [
        f"index,status,assigned,argmin,{x_cols},{y_cols},"
        "grad_norm,dist_to_assigned,formula_residual,norm_residual"
    ]
    for r in report.rows:
        x_vals = list(r.point) + [math.nan] * (dim - len(r.point))
        y_vals = list(r.target_point) + [math.nan] * (dim - len(r.target_point))
        coords = ",".join(_csv_float(v) for v in x_vals + y_vals)
        lines.append(
            f"{r.index},{r.status},{r.assigned},{r.argmin},{coords},"
            f"{_csv_float(r.grad_norm)},{_csv_float(r.dist_to_assigned)},"
            f"{_csv_float(r.formula_residual)},{_csv_float(r.norm_residual)}"
        )
    return "\n".join(lines) + "\n"


def _csv_float(x: float) -> str:
    return "" if math.isnan(x) else repr(x)


# ---------------------------------------------------------------------------
# decoders


def _require(obj: dict, key: str, context: str):
    if key not in obj:
        raise ValidationError(f"{context}: missing field {key!r}")
    return obj[key]


def space_from_json(obj) -> SpaceDescriptor:
    if not isinstance(obj, dict):
        raise ValidationError("space: expected a JSON object")
    kind = _require(obj, "kind", "space")
    if kind == "plane":
        return SpaceDescriptor("plane")
    if kind == "sphere":
        return SpaceDescriptor("sphere", curvature=float(_require(obj, "curvature", "space")))
    if kind == "cone":
        return SpaceDescriptor("cone", total_angle=float(_require(obj, "total_angle", "space")))
    raise ValidationError(f"space: unknown kind {kind!r}")


def cost_from_json(obj) -> CostSpec:
    if not isinstance(obj, dict):
        raise ValidationError("cost: expected a JSON object")
    kind = _require(obj, "kind", "cost")
    if kind == "quadratic":
        return CostSpec("quadratic")
    if kind == "power":
        return CostSpec("power", p=float(_require(obj, "p", "cost")))
    raise ValidationError(f"cost: unknown kind {kind!r}")


def measure_from_json(obj, space: SpaceDescriptor, context: str = "measure") -> DiscreteMeasure:
    if not isinstance(obj, dict):
        raise ValidationError(f"{context}: expected a JSON object")
    atoms = _require(obj, "atoms", context)
    if not isinstance(atoms, list) or not atoms:
        raise ValidationError(f"{context}: atoms must be a nonempty list")
    points = []
    weights = []
    for idx, atom in enumerate(atoms):
        point = _require(atom, "point", f"{context}.atoms[{idx}]")
        weight = _require(atom, "weight", f"{context}.atoms[{idx}]")
        points.append(validate_point(space, point))
        weights.append(float(weight))
    return DiscreteMeasure(np.asarray(points), np.asarray(weights))


def region_from_json(obj, space: SpaceDescriptor):
    if not isinstance(obj, dict):
        raise ValidationError("region: expected a JSON object")
    kind = _require(obj, "kind", "region")
    if kind == "rect":
        return RectRegion(
            float(_require(obj, "xmin", "region")), float(_require(obj, "xmax", "region")),
            float(_require(obj, "ymin", "region")), float(_require(obj, "ymax", "region")),
        )
    if kind == "annulus":
        phi_max = obj.get("phi_max")
        return AnnulusRegion(
            float(_require(obj, "r_min", "region")), float(_require(obj, "r_max", "region")),
            float(obj.get("phi_min", 0.0)),
            None if phi_max is None else float(phi_max),
        )
    if kind == "cap":
        return CapRegion(float(obj.get("angle", math.pi)))
    if kind == "grid":
        return GridRegion(
            int(_require(obj, "nx", "region")), int(_require(obj, "ny", "region")),
            float(obj.get("xmin", 0.0)), float(obj.get("xmax", 1.0)),
            float(obj.get("ymin", 0.0)), float(obj.get("ymax", 1.0)),
        )
    raise ValidationError(f"region: unknown kind {kind!r}")


def instance_from_json(obj) -> Instance:
    if not isinstance(obj, dict):
        raise ValidationError("instance: expected a JSON object")
    space = space_from_json(_require(obj, "space", "instance"))
    cost = cost_from_json(_require(obj, "cost", "instance"))
    source = measure_from_json(_require(obj, "source", "instance"), space, "source")
    target = measure_from_json(_require(obj, "target", "instance"), space, "target")
    seed = obj.get("seed")
    source_region = obj.get("source_region")
    target_region = obj.get("target_region")
    return Instance(
        space,
        cost,
        source,
        target,
        seed=None if seed is None else int(seed),
        source_region=None if source_region is None else region_from_json(source_region, space),
        target_region=None if target_region is None else region_from_json(target_region, space),
    )


# ---------------------------------------------------------------------------
# file I/O


def load_json(path: str):
    """Parse a JSON file, reporting the position of syntax errors."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"
        ) from exc


def dump_text_atomic(text: str, path: str) -> None:
    """Write a file atomically (temp file plus rename)."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_default(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(obj, path: Optional[str]) -> str:
    """Serialize to the canonical textual form; write atomically when asked."""
    text = json.dumps(obj, indent=2, sort_keys=False, default=_json_default) + "\n"
    if path is not None:
        dump_text_atomic(text, path)
    return text
