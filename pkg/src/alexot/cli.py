"""Command-line front end.

Subcommands: ``solve``, ``verify curvature|duality|map|uniqueness|
first-variation`` and ``generate``.  Commands read instance/space JSON,
run the requested computation and emit a machine-readable JSON report
(written atomically when ``--out`` is given).

Exit codes: 0 pass, 1 verification failure, 2 input error, 3 capability
error (for example ``--oracle`` on an instance too large to enumerate).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import comparison, costs, duality, monge, serialization, solver, spaces
from .duality import DiscreteMeasure
from .errors import AlexotError, SizeLimitError, ValidationError
from .serialization import GridRegion, Instance

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_CAPABILITY = 3


def _spec_arg(text: str):
    """Inline JSON, or the path of a JSON file."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            return json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"inline JSON:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return serialization.load_json(text)


def _emit(payload: dict, out_path) -> None:
    text = serialization.dump_json(payload, out_path)
    if out_path is None:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# solve


def cmd_solve(args) -> int:
    inst = serialization.instance_from_json(serialization.load_json(args.instance))
    plan, pair, cmat = solver.solve_for_measures(inst.cost, inst.space, inst.source, inst.target)
    gap = solver.duality_gap(plan, pair, inst.source, inst.target)
    payload = serialization.solution_to_json(plan, pair, gap)
    status = EXIT_PASS
    if args.oracle:
        value = solver.oracle_bruteforce(cmat, inst.source.weights, inst.target.weights)
        payload["oracle_value"] = value
        payload["oracle_abs_diff"] = abs(value - plan.cost_total)
        if payload["oracle_abs_diff"] > 1e-12 * (1.0 + abs(value)):
            status = EXIT_FAIL
    _emit(payload, args.out)
    return status


# ---------------------------------------------------------------------------
# verify curvature


def cmd_verify_curvature(args) -> int:
    space = serialization.space_from_json(_spec_arg(args.space))
    region = None
    if args.region is not None:
        region = serialization.region_from_json(_spec_arg(args.region), space)
    report = comparison.check_triangle_comparison(
        space, args.k, args.samples, seed=args.seed, tol=args.tol, region=region
    )
    _emit(serialization.comparison_report_to_json(report), args.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# verify duality


def cmd_verify_duality(args) -> int:
    inst = serialization.instance_from_json(serialization.load_json(args.instance))
    plan, pair, cmat = solver.solve_for_measures(inst.cost, inst.space, inst.source, inst.target)
    gap = solver.duality_gap(plan, pair, inst.source, inst.target)
    tol = args.tol

    gap_ok = abs(gap) <= tol * (1.0 + abs(plan.cost_total))
    feas_violation = pair.max_violation(cmat)
    cs_dev = 0.0
    for i, j, _ in plan.entries:
        cs_dev = max(cs_dev, abs(pair.phi[i] + pair.phi_c[j] - cmat[i, j]))
    scale = 1.0 + float(np.max(np.abs(cmat)))

    # the returned phi_c is the c-transform of phi; check its algebra
    t1 = duality.transform_from_matrix(cmat, pair.phi)
    t3 = duality.transform_from_matrix(cmat, duality.transform_from_matrix(cmat.T, t1))
    idempotence_dev = float(np.max(np.abs(t3 - t1)))

    all_pts = np.vstack([inst.source.points, inst.target.points])
    diam = float(costs.distance_matrix(inst.space, all_pts, all_pts).max())
    lip = float(costs.cost_derivative(inst.cost, diam))
    tgt_d = costs.distance_matrix(inst.space, inst.target.points, inst.target.points)
    lip_excess = float(
        np.max(np.abs(pair.phi_c[:, None] - pair.phi_c[None, :]) - lip * tgt_d)
    )

    checks = {
        "gap": gap,
        "gap_ok": gap_ok,
        "feasibility_violation": feas_violation,
        "feasibility_ok": feas_violation <= tol,
        "support_slackness_deviation": cs_dev,
        "support_slackness_ok": cs_dev <= tol,
        "idempotence_deviation": idempotence_dev,
        "idempotence_ok": idempotence_dev <= 1e-12 * scale,
        "lipschitz_excess": lip_excess,
        "lipschitz_ok": lip_excess <= 1e-9,
    }
    passed = all(v for k, v in checks.items() if k.endswith("_ok"))
    payload = {
        "cost": plan.cost_total,
        "checks": checks,
        "passed": passed,
        "config": {
            "space": serialization.space_to_json(inst.space),
            "cost": serialization.cost_to_json(inst.cost),
            "tol": tol,
            "n_source": inst.source.n_atoms,
            "n_target": inst.target.n_atoms,
        },
    }
    _emit(payload, args.out)
    return EXIT_PASS if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# verify map


def cmd_verify_map(args) -> int:
    inst = serialization.instance_from_json(serialization.load_json(args.instance))
    reports = []
    sizes = None
    if args.refine:
        sizes = [int(s) for s in args.refine.split(",") if s]
        if inst.source_region is None:
            raise SizeLimitError(
                "--refine needs an instance with an embedded source_region "
                "(produce one with `alexot generate`)"
            )
        if isinstance(inst.source_region, GridRegion):
            raise SizeLimitError("--refine needs a sampled (non-grid) source_region")
        seed = args.seed if args.seed is not None else (inst.seed or 0)
        for idx, n in enumerate(sizes):
            pts = spaces.sample_region(
                inst.space, inst.source_region, n,
                np.random.SeedSequence((seed, idx)),
            )
            mu0 = DiscreteMeasure.uniform(pts)
            reports.append(
                monge.verify_graph_and_formula(
                    inst.space, inst.cost, mu0, inst.target,
                    fd_step=args.fd_step, tol=args.tol,
                )
            )
    else:
        reports.append(
            monge.verify_graph_and_formula(
                inst.space, inst.cost, inst.source, inst.target,
                fd_step=args.fd_step, tol=args.tol,
            )
        )

    fractions = [r.split_fraction for r in reports]
    monotone = all(b <= a + 1e-15 for a, b in zip(fractions, fractions[1:]))
    passed = monotone and all(r.passed for r in reports)
    payload = {
        "reports": [serialization.map_report_to_json(r) for r in reports],
        "split_fractions": fractions,
        "monotone": monotone,
        "passed": passed,
    }
    if sizes is not None:
        payload["sizes"] = sizes
    if args.csv is not None:
        serialization.dump_text_atomic(
            serialization.map_rows_to_csv(reports[-1]), args.csv
        )
    _emit(payload, args.out)
    return EXIT_PASS if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# verify uniqueness


def cmd_verify_uniqueness(args) -> int:
    inst = serialization.instance_from_json(serialization.load_json(args.instance))
    report = monge.verify_uniqueness(
        inst.space, inst.cost, inst.source, inst.target,
        perturbation_scale=args.perturb_scale,
        trials=args.trials,
        seed=args.seed if args.seed is not None else (inst.seed or 0),
    )
    _emit(serialization.uniqueness_report_to_json(report), args.out)
    return EXIT_PASS if report.agreed else EXIT_FAIL


# ---------------------------------------------------------------------------
# verify first-variation


def first_variation_sweep(space, n_configs: int, seed: int, ratio_factor: float = 10.0):
    """Seeded first-variation ratio test; returns (rows, n_failed)."""
    region = spaces.default_region(space)
    seeds = np.random.SeedSequence(seed).spawn(3)
    rng = np.random.default_rng(seeds[2])
    pts_a = spaces.sample_region(space, region, 4 * n_configs, seeds[0])
    pts_x = spaces.sample_region(space, region, 4 * n_configs, seeds[1])
    angles = rng.uniform(0.0, 2.0 * math.pi, size=4 * n_configs)
    rows = []
    n_failed = 0
    for a, x, alpha in zip(pts_a, pts_x, angles):
        if len(rows) >= n_configs:
            break
        d0 = spaces.distance(space, a, x)
        if d0 < 1e-3:
            continue
        if space.kind == "sphere" and d0 > math.pi / math.sqrt(space.curvature) - 0.1:
            continue
        direction = spaces.TangentVector(x, np.array([math.cos(alpha), math.sin(alpha)]))
        geo = spaces.Geodesic(space, x, direction, length=0.2)
        table = comparison.check_first_variation(space, a, geo, t_values=(1e-2, 1e-4))
        ratio_big = abs(table[0].error) / table[0].t
        ratio_small = abs(table[1].error) / table[1].t
        # the expansion error is quadratic, so the per-t ratio must shrink
        # linearly; the floor absorbs double-precision distance roundoff
        bound = ratio_factor * ratio_big * (table[1].t / table[0].t) + 1e-10 * (1.0 + d0)
        ok = ratio_small <= bound
        n_failed += 0 if ok else 1
        rows.append(
            {
                "d0": d0,
                "ratio_at_1e-2": ratio_big,
                "ratio_at_1e-4": ratio_small,
                "bound": bound,
                "ok": ok,
            }
        )
    if len(rows) < n_configs:
        raise ValidationError("could not sample enough nondegenerate configurations")
    return rows, n_failed


def cmd_verify_first_variation(args) -> int:
    space = serialization.space_from_json(_spec_arg(args.space))
    rows, n_failed = first_variation_sweep(space, args.configs, args.seed)
    payload = {
        "n_configs": len(rows),
        "n_failed": n_failed,
        "passed": n_failed == 0,
        "config": {
            "space": serialization.space_to_json(space),
            "seed": args.seed,
            "configs": args.configs,
        },
        "rows": rows,
    }
    _emit(payload, args.out)
    return EXIT_PASS if n_failed == 0 else EXIT_FAIL


# ---------------------------------------------------------------------------
# generate


def _build_measure(space, region_obj, n, seed, context):
    region = serialization.region_from_json(region_obj, space)
    if isinstance(region, GridRegion):
        if space.kind != "plane":
            raise ValidationError(f"{context}: grid regions live on the plane")
        pts = spaces.grid_points(
            spaces.RectRegion(region.xmin, region.xmax, region.ymin, region.ymax),
            region.nx,
            region.ny,
        )
    else:
        if n is None or n <= 0:
            raise ValidationError(f"{context}: need a positive atom count")
        pts = spaces.sample_region(space, region, n, seed)
    if pts.shape[0] == 0:
        raise ValidationError(f"{context}: empty measure")
    return DiscreteMeasure.uniform(pts), region


def cmd_generate(args) -> int:
    space = serialization.space_from_json(_spec_arg(args.space))
    cost_spec = serialization.cost_from_json(_spec_arg(args.cost))
    seeds = np.random.SeedSequence(args.seed).spawn(2)
    source, source_region = _build_measure(
        space, _spec_arg(args.source), args.n_source, seeds[0], "source"
    )
    target_region = None
    if args.translate is not None:
        if space.kind != "plane":
            raise ValidationError("--translate applies to plane instances only")
        dx, dy = (float(t) for t in args.translate.split(","))
        target = DiscreteMeasure(source.points + np.array([dx, dy]), source.weights)
    elif args.target is not None:
        target, target_region = _build_measure(
            space, _spec_arg(args.target), args.n_target, seeds[1], "target"
        )
    else:
        raise ValidationError("generate needs --target or --translate")
    inst = Instance(
        space, cost_spec, source, target,
        seed=args.seed,
        source_region=source_region,
        target_region=target_region,
    )
    _emit(serialization.instance_to_json(inst), args.out)
    return EXIT_PASS


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alexot",
        description="Optimal transport on model geodesic surfaces: exact solves "
        "and numerical verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve an instance exactly")
    p_solve.add_argument("instance", help="instance JSON file")
    p_solve.add_argument("--oracle", action="store_true",
                         help="cross-check against exhaustive enumeration")
    p_solve.add_argument("--out", default=None, help="write the solution JSON here")
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    vsub = p_verify.add_subparsers(dest="suite", required=True)

    p_curv = vsub.add_parser("curvature", help="triangle comparison certification")
    p_curv.add_argument("--space", required=True, help="space JSON (inline or file)")
    p_curv.add_argument("--k", type=float, default=0.0, help="comparison curvature")
    p_curv.add_argument("--samples", type=int, default=100_000)
    p_curv.add_argument("--seed", type=int, default=0)
    p_curv.add_argument("--tol", type=float, default=1e-9)
    p_curv.add_argument("--region", default=None, help="sampling region JSON")
    p_curv.add_argument("--out", default=None)
    p_curv.set_defaults(func=cmd_verify_curvature)

    p_dual = vsub.add_parser("duality", help="dual certificate and c-transform algebra")
    p_dual.add_argument("instance")
    p_dual.add_argument("--tol", type=float, default=1e-9)
    p_dual.add_argument("--out", default=None)
    p_dual.set_defaults(func=cmd_verify_duality)

    p_map = vsub.add_parser("map", help="gradient-shooting map formula checks")
    p_map.add_argument("instance")
    p_map.add_argument("--fd-step", type=float, default=None)
    p_map.add_argument("--tol", type=float, default=None)
    p_map.add_argument("--refine", default=None,
                       help="comma-separated source sizes, e.g. 250,500,1000")
    p_map.add_argument("--seed", type=int, default=None)
    p_map.add_argument("--csv", default=None, help="write the per-atom table here")
    p_map.add_argument("--out", default=None)
    p_map.set_defaults(func=cmd_verify_map)

    p_uniq = vsub.add_parser("uniqueness", help="assignment stability across reruns")
    p_uniq.add_argument("instance")
    p_uniq.add_argument("--trials", type=int, default=3,
                        help="number of perturbed-cost reruns")
    p_uniq.add_argument("--perturb-scale", type=float, default=1e-9)
    p_uniq.add_argument("--seed", type=int, default=None)
    p_uniq.add_argument("--out", default=None)
    p_uniq.set_defaults(func=cmd_verify_uniqueness)

    p_fv = vsub.add_parser("first-variation", help="distance expansion ratio test")
    p_fv.add_argument("--space", required=True)
    p_fv.add_argument("--configs", type=int, default=100)
    p_fv.add_argument("--seed", type=int, default=0)
    p_fv.add_argument("--out", default=None)
    p_fv.set_defaults(func=cmd_verify_first_variation)

    p_gen = sub.add_parser("generate", help="build a reproducible instance")
    p_gen.add_argument("--space", required=True)
    p_gen.add_argument("--cost", required=True)
    p_gen.add_argument("--source", required=True, help="region JSON (inline or file)")
    p_gen.add_argument("--target", default=None, help="region JSON (inline or file)")
    p_gen.add_argument("--translate", default=None, metavar="DX,DY",
                       help="target = source translated (plane only)")
    p_gen.add_argument("--n-source", type=int, default=None)
    p_gen.add_argument("--n-target", type=int, default=None)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", default=None)
    p_gen.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except AlexotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
