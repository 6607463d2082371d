"""Command-line front end: gallery runs, curvature reports, flow sweeps,
embeddedness checks, and mesh/report export.

Exit codes: 0 on success, 1 on a numerical or verification failure (with a
diagnostic on standard error), 2 on a usage error.  Every JSON report embeds
the resolved configuration so a run can be reproduced from its own output.
"""

import argparse
import csv
import json
import math
import sys

import numpy as np

from .analysis import (
    GALLERY_NAMES,
    CurveImmersion,
    MeshImmersion,
    _domain_edge,
    boundary_at_infinity,
    first_embedded_time,
    gauss_winding,
    make_example,
    self_intersections,
)
from .conformal import ConformalMetric, realizability_report, rescale, schouten
from .correspondence import extrinsic_curvatures, immerse, lambda_kappa
from .errors import GeometryError
from .minkowski import to_poincare_ball
from .verify import CRITERIA, check_weingarten_calculus, run_all

EXAMPLE_CHOICES = GALLERY_NAMES + ("alpha",)


def _resolve_name(name):
    # short alias for the curve example
    return "alpha-curve" if name == "alpha" else name


def _config(args):
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit_json(payload, out):
    text = json.dumps(payload, indent=2, default=float)
    if out:
        with open(out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)


def _gallery_entry(args):
    name = _resolve_name(args.name)
    params = {}
    if name == "geodesic-sphere" and args.rho0 is not None:
        params["rho0"] = args.rho0
    if name == "alpha-curve" and args.samples is not None:
        params["m"] = args.samples
    return make_example(name, **params)


def _metric_lat_rows(metric, n_lat, inner=0.98):
    limit = math.pi / 2 - 1e-9
    hi = inner * _domain_edge(metric, 1.0, limit)
    lo = -inner * _domain_edge(metric, -1.0, limit)
    return np.linspace(lo, hi, n_lat)


def _metric_mesh(metric, n_az, n_lat, t):
    """Latitude-longitude triangulation of a two-dimensional metric example,
    with vertices in the Poincare ball."""
    if metric.chart.n != 2:
        raise GeometryError("mesh export needs a two-dimensional example")
    azimuths = np.linspace(0.0, 2.0 * math.pi, n_az, endpoint=False)
    if metric.chart.kind == "band":
        rows = _metric_lat_rows(metric, n_lat)
        grid = [np.array([s, a]) for s in rows for a in azimuths]
    else:
        colat = np.linspace(0.35, math.pi - 0.35, n_lat)
        radii = np.tan(0.5 * colat)
        grid = [r * np.array([math.cos(a), math.sin(a)])
                for r in radii for a in azimuths]
    verts = np.array([to_poincare_ball(immerse(metric, u, t).phi) for u in grid])
    faces = []
    for i in range(n_lat - 1):
        for j in range(n_az):
            q00 = i * n_az + j
            q01 = i * n_az + (j + 1) % n_az
            q10 = (i + 1) * n_az + j
            q11 = (i + 1) * n_az + (j + 1) % n_az
            faces.append((q00, q10, q11))
            faces.append((q00, q11, q01))
    return verts, faces


def _metric_samples(metric, n, rng):
    if metric.chart.kind == "band":
        limit = math.pi / 2 - 1e-9
        hi = 0.9 * _domain_edge(metric, 1.0, limit)
        lo = -0.9 * _domain_edge(metric, -1.0, limit)
        s = rng.uniform(lo, hi, n)
    else:
        return rng.uniform(-2.5, 2.5, size=(n, 2))
    theta = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.column_stack([s, theta])


def _write_obj(path, verts, faces=(), polylines=()):
    with open(path, "w") as f:
        for v in verts:
            f.write(f"v {v[0]:.9f} {v[1]:.9f} {v[2]:.9f}\n")
        for face in faces:
            f.write("f " + " ".join(str(i + 1) for i in face) + "\n")
        for line in polylines:
            f.write("l " + " ".join(str(i + 1) for i in line) + "\n")


def cmd_gallery(args):
    if args.action == "list":
        for name in GALLERY_NAMES:
            print(name)
        return 0
    entry = _gallery_entry(args)
    payload = entry.payload
    info = {"name": entry.name, "params": entry.params,
            "payload": type(payload).__name__}
    if isinstance(payload, CurveImmersion):
        info.update(resolution=payload.resolution, period=payload.period)
    elif isinstance(payload, MeshImmersion):
        info.update(vertices=len(payload.phi), faces=len(payload.faces))
    else:
        info.update(chart=payload.chart.kind, offset=payload.t)
    _emit_json({"config": _config(args), "results": info,
                "invariant_checks": []}, args.out)
    return 0


def cmd_immerse(args):
    entry = _gallery_entry(args)
    payload = entry.payload
    # mesh files are the point of --out here, so default to obj for them
    fmt = args.format or ("obj" if args.out else "json")
    faces, polylines = [], []
    if isinstance(payload, ConformalMetric):
        n_az = args.samples or 32
        verts, faces = _metric_mesh(payload, n_az, max(5, n_az // 2), args.t)
    elif isinstance(payload, CurveImmersion):
        moved = payload.flowed(args.t) if args.t else payload
        verts = moved.ball_points()
        if verts.shape[1] == 2:   # plane curve into the z = 0 slice
            verts = np.column_stack([verts, np.zeros(len(verts))])
        m = len(verts)
        polylines = [tuple(range(m)) + (0,)]
    else:
        moved = payload.flowed(args.t) if args.t else payload
        verts = moved.vertices_ball
        faces = [tuple(face) for face in payload.faces]

    radii = np.linalg.norm(verts, axis=1)
    if fmt == "obj":
        if not args.out:
            raise GeometryError("obj export needs --out PATH")
        _write_obj(args.out, verts, faces, polylines)
        print(f"wrote {args.out}: {len(verts)} vertices, {len(faces)} faces")
    elif fmt == "csv":
        target = open(args.out, "w", newline="") if args.out else sys.stdout
        try:
            writer = csv.writer(target)
            writer.writerow(["x", "y", "z"])
            writer.writerows(verts.tolist())
        finally:
            if args.out:
                target.close()
    else:
        _emit_json({
            "config": _config(args),
            "results": {"vertices": len(verts), "faces": len(faces),
                        "ball_radius_min": float(radii.min()),
                        "ball_radius_max": float(radii.max())},
            "invariant_checks": [{
                "name": "vertices-inside-ball",
                "max_error": float(radii.max()),
                "tolerance": 1.0,
                "pass": bool(radii.max() < 1.0)}],
        }, args.out)
    return 0


def cmd_schouten(args):
    entry = _gallery_entry(args)
    metric = entry.payload
    if not isinstance(metric, ConformalMetric):
        raise GeometryError("schouten reports need a conformal-metric example")
    rng = np.random.default_rng(args.seed)
    pts = _metric_samples(metric, args.samples, rng)
    report = realizability_report(metric, pts)
    asym = 0.0
    for u in pts[:50]:
        tensor = schouten(metric, u).tensor
        asym = max(asym, float(np.max(np.abs(tensor - tensor.T))))
    _emit_json({
        "config": _config(args),
        "results": {
            "lambda_min": report.lambda_min,
            "lambda_max": report.lambda_max,
            "realizable": report.realizable,
            "suggested_t0": report.suggested_t0,
            "n_samples": report.n_samples,
            "flags": list(report.flags),
        },
        "invariant_checks": [{
            "name": "schouten-symmetry",
            "max_error": asym,
            "tolerance": 1e-10,
            "pass": asym <= 1e-10}],
    }, args.out)
    return 0


def cmd_flow(args):
    entry = _gallery_entry(args)
    metric = entry.payload
    if not isinstance(metric, ConformalMetric):
        raise GeometryError("flow sweeps need a conformal-metric example")
    rng = np.random.default_rng(args.seed)
    pts = _metric_samples(metric, args.samples, rng)
    scaled = rescale(metric, args.t)
    n = metric.chart.n
    header = ([f"u{i+1}" for i in range(n)] + ["rho"]
              + [f"lambda{i+1}" for i in range(n)]
              + [f"kappa_ext{i+1}" for i in range(n)]
              + [f"kappa_pred{i+1}" for i in range(n)]
              + ["max_discrepancy"])
    rows, skipped = [], 0
    for u in pts:
        try:
            lam = schouten(scaled, u).eigenvalues
            pred = np.sort(lambda_kappa(lam))
            ext = np.sort(extrinsic_curvatures(metric, u, t=args.t, h=args.h).values)
        except GeometryError:
            skipped += 1
            continue
        rows.append(list(u) + [metric.rho.value(u)] + list(lam)
                    + list(ext) + list(pred)
                    + [float(np.max(np.abs(ext - pred)))])
    target = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(target)
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if args.out:
            target.close()
    if skipped:
        print(f"skipped {skipped} samples outside the immersion window",
              file=sys.stderr)
    return 0


def cmd_embed_check(args):
    entry = _gallery_entry(args)
    payload = entry.payload
    if isinstance(payload, ConformalMetric):
        raise GeometryError("embeddedness checks need a curve or mesh example")
    report = first_embedded_time(payload, t_max=args.t, tol=args.eps)
    _emit_json({
        "config": _config(args),
        "results": {
            "t_embedded": report.t_embedded,
            "crossings_before": report.crossings_before,
            "crossings_after": report.crossings_after,
            "crossings_now": len(self_intersections(payload)),
        },
        "invariant_checks": [{
            "name": "embedded-after-flow",
            "max_error": float(report.crossings_after),
            "tolerance": 0.0,
            "pass": report.crossings_after == 0}],
    }, args.out)
    return 0


def cmd_gauss_degree(args):
    entry = _gallery_entry(args)
    curve = entry.payload
    if not isinstance(curve, CurveImmersion):
        raise GeometryError("winding counts need a curve example")
    print(gauss_winding(curve))
    return 0


def cmd_boundary(args):
    clusters = boundary_at_infinity(
        _gallery_entry(args), escape_threshold=args.eps,
        t=args.t, n_directions=args.samples)
    _emit_json({
        "config": _config(args),
        "results": {"clusters": [
            {"direction": list(map(float, c.direction)), "count": c.count}
            for c in clusters]},
        "invariant_checks": [{
            "name": "directions-unit-length",
            "max_error": max((abs(float(np.linalg.norm(c.direction)) - 1.0)
                              for c in clusters), default=0.0),
            "tolerance": 1e-9,
            "pass": all(abs(float(np.linalg.norm(c.direction)) - 1.0) <= 1e-9
                        for c in clusters)}],
    }, args.out)
    return 0


def cmd_weingarten_check(args):
    result = check_weingarten_calculus(seed=args.seed)
    print(result.line())
    return 0 if result.passed else 1


def cmd_verify(args):
    results = run_all(only=set(args.only) if args.only else None)
    for result in results:
        print(result.line())
    if args.out:
        _emit_json({
            "config": _config(args),
            "results": [vars(r) for r in results],
            "invariant_checks": [{
                "name": r.name, "max_error": r.max_error,
                "tolerance": r.tolerance, "pass": r.passed}
                for r in results],
        }, args.out)
    return 0 if all(r.passed for r in results) else 1


def _add_common(sub, samples=None, t=0.0):
    sub.add_argument("--samples", type=int, default=samples)
    sub.add_argument("--t", type=float, default=t)
    sub.add_argument("--h", type=float, default=None)
    sub.add_argument("--eps", type=float, default=None)
    sub.add_argument("--out", default=None)
    sub.add_argument("--format", choices=("json", "csv", "obj"), default=None)
    sub.add_argument("--seed", type=int, default=7)
    sub.add_argument("--rho0", type=float, default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="horocorr",
        description="hypersurface immersions from conformal metrics: "
                    "reports, sweeps, and mesh export")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("gallery", help="list or inspect the examples")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?", choices=EXAMPLE_CHOICES)
    _add_common(p)
    p.set_defaults(func=cmd_gallery)

    p = commands.add_parser("schouten", help="eigenvalue sweep of an example metric")
    p.add_argument("name", choices=EXAMPLE_CHOICES)
    _add_common(p, samples=200)
    p.set_defaults(func=cmd_schouten)

    p = commands.add_parser("immerse", help="export an immersed example")
    p.add_argument("name", choices=EXAMPLE_CHOICES)
    _add_common(p, samples=32)
    p.set_defaults(func=cmd_immerse)

    p = commands.add_parser("flow", help="curvature sweep at a flow time (csv)")
    p.add_argument("name", choices=EXAMPLE_CHOICES)
    _add_common(p, samples=100, t=1.0)
    p.set_defaults(func=cmd_flow)

    p = commands.add_parser("embed-check", help="self-intersections under the flow")
    p.add_argument("name", choices=EXAMPLE_CHOICES)
    _add_common(p, samples=2048, t=5.0)
    p.set_defaults(func=cmd_embed_check)

    p = commands.add_parser("gauss-degree", help="winding count of a curve example")
    p.add_argument("name", choices=EXAMPLE_CHOICES)
    _add_common(p, samples=4096)
    p.set_defaults(func=cmd_gauss_degree)

    p = commands.add_parser("boundary", help="escape directions of a metric example")
    p.add_argument("name", choices=EXAMPLE_CHOICES)
    _add_common(p, samples=64, t=1.0)
    p.set_defaults(func=cmd_boundary)

    p = commands.add_parser("weingarten-check", help="eigenvalue-calculus spot checks")
    _add_common(p)
    p.set_defaults(func=cmd_weingarten_check)

    p = commands.add_parser("verify", help="run the acceptance battery")
    p.add_argument("--only", action="append",
                   choices=[key for key, _ in CRITERIA])
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gallery" and args.action == "show" and args.name is None:
        parser.error("gallery show needs an example name")
    if args.command == "embed-check" and args.eps is None:
        args.eps = 1e-2
    if args.command == "boundary" and args.eps is None:
        args.eps = 0.999
    try:
        return args.func(args)
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
