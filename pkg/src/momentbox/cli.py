"""Command line interface: ``momentbox bound`` and ``momentbox validate``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

from . import __version__
from .bounds import closed_form_bounds
from .dual import extract_certificate
from .errors import BreakdownError, CertificateUnavailable, MomentError
from .hierarchy import FAILED, INSUFFICIENT, UNBOUNDED, bound_box
from .ingest import (
    MarginalSet,
    load_moments_json,
    moments_closed_form,
    moments_from_samples,
    parse_family,
    read_samples_csv,
    validate,
)
from .ortho import extreme_nodes

SCHEMA = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3
DEFAULT_DMAX = 5



class InputError(Exception):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def load_input(args, default_degree):
    """Resolve the single input source into ``(MarginalSet, descriptor)``."""
    if args.moments:
        ms = load_moments_json(args.moments)
        if args.max_degree is not None:
            ms = MarginalSet(tuple(y.truncate(args.max_degree) for y in ms))
        return ms, {"source": "moments", "path": args.moments}
    if args.samples:
        if args.max_degree is None:
            raise MomentError("--samples needs --max-degree")
        pts = read_samples_csv(args.samples)
        ms = moments_from_samples(pts, args.max_degree)
        return ms, {"source": "samples", "path": args.samples, "points": int(pts.shape[0])}
    name, params = parse_family(args.family)
    degree = args.max_degree if args.max_degree is not None else default_degree
    y = moments_closed_form(name, *params, max_degree=degree)
    return MarginalSet((y,)), {"source": "family", "family": args.family}


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _endpoint_json(value, status, last_finite, level):
    if status == UNBOUNDED:
        trend = "-inf" if value < 0 else "+inf"
        return {"trend": trend, "last_finite": _num(last_finite), "level": level}
    return _num(value)


def _coordinate_report(i, y, levels, error, args):
    entry = {"index": i, "moments": [float(v) for v in y.values], "warnings": []}
    try:
        cf = closed_form_bounds(y)
        entry["closed_form_bounds"] = {
            "level": 1,
            "method": "closed-form",
            "a_upper": _num(cf.a_upper),
            "b_lower": _num(cf.b_lower),
            "b3_b4_applicable": cf.b3_b4_applicable,
        }
    except MomentError as exc:
        entry["closed_form_bounds"] = None
        entry["warnings"].append(f"closed-form bounds unavailable: {exc}")
    if error is not None:
        entry["error"] = error
        entry["levels"] = []
        return entry
    rows = []
    for est in levels:
        rows.append(
            {
                "level": est.level,
                "a": _endpoint_json(est.a, est.a_status, est.a_last_finite, est.level),
                "b": _endpoint_json(est.b, est.b_status, est.b_last_finite, est.level),
                "a_method": est.a_status,
                "b_method": est.b_status,
                "frame": est.a_frame,
                "conditioning": _num(est.conditioning),
                "clamp": {"a": est.a_clamp, "b": est.b_clamp},
            }
        )
        entry["warnings"].extend(est.warnings)
        if est.conditioning > 1e12:
            entry["warnings"].append(
                f"level {est.level}: H_d(y) condition number {est.conditioning:.2e} in the input frame"
            )
    entry["levels"] = rows
    if args.certify:
        certs = []
        for est in levels:
            for endpoint, value in (("lower", est.a), ("upper", est.b)):
                if not math.isfinite(value):
                    continue
                try:
                    certs.append(extract_certificate(y, est.level, endpoint, value).to_dict())
                except CertificateUnavailable as exc:
                    certs.append(
                        {"level": est.level, "endpoint": endpoint, "unavailable": str(exc)}
                    )
        entry["certificates"] = certs
    if args.oracle:
        checks = []
        for est in levels:
            try:
                lo, hi = extreme_nodes(y, est.level)
            except BreakdownError as exc:
                checks.append({"level": est.level, "method": "jacobi", "breakdown": exc.index})
                continue
            except MomentError as exc:
                checks.append({"level": est.level, "method": "jacobi", "unavailable": str(exc)})
                continue
            checks.append(
                {
                    "level": est.level,
                    "method": "jacobi",
                    "min_node": lo,
                    "max_node": hi,
                    "delta_a": _num(est.a - lo),
                    "delta_b": _num(est.b - hi),
                }
            )
        entry["oracle"] = checks
    return entry


def build_report(ms, descriptor, args):
    box = bound_box(ms, args.dmax, args.tol)
    coords = [
        _coordinate_report(i, y, box.levels[i], box.errors[i], args)
        for i, y in enumerate(ms.marginals)
    ]
    intervals = []
    if box.level:
        for lv in box.levels:
            est = lv[box.level - 1]
            intervals.append(
                [
                    _endpoint_json(est.a, est.a_status, est.a_last_finite, est.level),
                    _endpoint_json(est.b, est.b_status, est.b_last_finite, est.level),
                ]
            )
    return {
        "schema": SCHEMA,
        "version": __version__,
        "input": dict(descriptor, dims=ms.dims, max_degree=ms.degree),
        "settings": {
            "dmax": args.dmax,
            "tol": args.tol,
            "certify": bool(args.certify),
            "oracle": bool(args.oracle),
        },
        "coordinates": coords,
        "box": {"level": box.level, "intervals": intervals},
    }, box


def _all_failed(box):
    for i, lv in enumerate(box.levels):
        if lv is None:
            continue
        for est in lv:
            if est.a_status not in (FAILED, INSUFFICIENT) or est.b_status not in (FAILED, INSUFFICIENT):
                return False
    return True


def _csv_value(x):
    return repr(float(x))


def report_csv(box):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["coord", "d", "a_d", "b_d", "method"])
    for i, lv in enumerate(box.levels):
        for est in lv or []:
            method = est.a_status if est.a_status == est.b_status else f"{est.a_status}/{est.b_status}"
            w.writerow([i, est.level, _csv_value(est.a), _csv_value(est.b), method])
    return buf.getvalue()


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_bound(args) -> int:
    try:
        dmax = DEFAULT_DMAX if args.dmax is None else args.dmax
        if dmax < 1:
            raise MomentError("--dmax must be at least 1")
        ms, descriptor = load_input(args, 2 * dmax + 1)
        reports = [validate(y) for y in ms.marginals]
        bad = [(i, r) for i, r in enumerate(reports) if not r.valid]
        if bad:
            lines = [f"coordinate {i}: {r.summary()}" for i, r in bad]
            raise InputError("moment sequence has no representing measure", "\n".join(lines))
        if ms.degree < 2 * dmax + 1:
            if args.dmax is not None or ms.degree < 3:
                raise MomentError(
                    f"--dmax {dmax} needs moments through degree {2 * dmax + 1}, "
                    f"input stops at {ms.degree}"
                )
            dmax = (ms.degree - 1) // 2
            print(f"momentbox: input stops at degree {ms.degree}; using --dmax {dmax}", file=sys.stderr)
        args.dmax = dmax
    except (MomentError, OSError) as exc:
        print(f"momentbox: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"momentbox: {exc}", file=sys.stderr)
        print(exc.report, file=sys.stderr)
        return EXIT_INPUT

    report, box = build_report(ms, descriptor, args)
    if args.format == "csv":
        _emit(report_csv(box), args.out)
    else:
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    if _all_failed(box):
        print("momentbox: solver failed at every level", file=sys.stderr)
        return EXIT_SOLVER
    return 0


def cmd_validate(args) -> int:
    try:
        ms, descriptor = load_input(args, 2 * DEFAULT_DMAX + 1)
    except (MomentError, OSError) as exc:
        print(f"momentbox: {exc}", file=sys.stderr)
        return EXIT_INPUT
    reports = [validate(y, args.tol) for y in ms.marginals]
    if args.format == "json":
        doc = {
            "schema": SCHEMA,
            "input": dict(descriptor, dims=ms.dims, max_degree=ms.degree),
            "coordinates": [
                {
                    "index": i,
                    "valid": r.valid,
                    "valid_through": r.max_valid_level,
                    "violation_level": r.violation_level,
                    "min_eigenvalues": list(r.min_eigenvalues),
                    "tol": r.tol,
                }
                for i, r in enumerate(reports)
            ],
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        _emit("".join(f"coordinate {i}: {r.summary()}\n" for i, r in enumerate(reports)), args.out)
    return 0


def _add_input(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--moments", metavar="FILE", help='JSON {"dims": n, "marginals": [[y0, ...], ...]}')
    src.add_argument("--samples", metavar="FILE", help="CSV of points, one row each")
    src.add_argument("--family", metavar="NAME(ARGS)", help="closed-form family, e.g. 'uniform(0,1)'")
    p.add_argument("--max-degree", type=int, default=None, help="highest moment degree to use")
    p.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="momentbox", description="Bound the support of a measure from its marginal moments."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="compute the endpoint hierarchy and bounding box")
    _add_input(b)
    b.add_argument("--dmax", type=int, default=None, help=f"deepest hierarchy level (default {DEFAULT_DMAX})")
    b.add_argument("--tol", type=float, default=1e-9, help="endpoint tolerance (default 1e-9)")
    b.add_argument("--certify", action="store_true", help="add dual SOS certificates")
    b.add_argument("--oracle", action="store_true", help="cross-check against Gauss nodes")
    b.add_argument("--format", choices=["json", "csv"], default="json")
    b.set_defaults(func=cmd_bound)

    v = sub.add_parser("validate", help="check that the moments admit a representing measure")
    _add_input(v)
    v.add_argument("--tol", type=float, default=None, help="absolute eigenvalue tolerance")
    v.add_argument("--format", choices=["text", "json"], default="text")
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
