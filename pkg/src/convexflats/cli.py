"""Command-line interface.

Verbs: gen-octa, verify-octa, check-points, check-lines, check-hyperplanes,
verify-cert, extract, net, refute-cone, section, experiment.

Exit codes: 0 = convex / verified / success, 1 = negative or not certified,
2 = usage or input error.  All randomness is driven by --seed, so equal
seeds give byte-identical outputs.  Resource caps come from the environment:
CONVEXFLATS_MAX_LP_PIVOTS and CONVEXFLATS_MAX_NET_SIZE.
"""

import argparse
import csv
import io
import json
import random
import sys

import numpy as np

from .convexpos import (
    ConvexityCertificate,
    certificate_from_cell,
    hyperplanes_convex_position,
    lines_convex_position_2d,
    points_convex_position,
    verify_certificate,
)
from .eskit import (
    ExtractionError,
    ExtractionResult,
    extract_convex_flats,
    hyperplane_pipeline,
    largest_convex_subset_2d,
    generic_projection,
)
from .flats import Flat, GeometryError, Hyperplane
from .grassmann import EpsNet, NetBuildError, build_eps_net
from .nonconvex import (
    Cone,
    GuardError,
    OctaFamily,
    octa_family,
    refute_cone,
    section_to_affine,
    verify_octa_nonconvex,
)
from .randgen import random_flat, random_gp_lines, random_gp_hyperplanes, random_gp_points
from .rational import frac_from_str, frac_to_str


def _load_json(path: str) -> dict:
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("top-level JSON object expected")
    if obj.get("format", 1) != 1:
        raise ValueError(f"unsupported format version {obj.get('format')}")
    return obj


def _emit(obj: dict, out: str | None):
    text = json.dumps(obj, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _points_from_json(obj: dict):
    return [tuple(frac_from_str(c) for c in p) for p in obj["points"]]


def _hyperplanes_from_json(obj: dict):
    return [Hyperplane.from_json(h) for h in obj["hyperplanes"]]


def _cmd_gen_octa(args) -> int:
    fam = octa_family(args.d, seed=args.seed)
    _emit(fam.to_json(), args.out)
    return 0


def _cmd_verify_octa(args) -> int:
    fam = OctaFamily.from_json(_load_json(args.family))
    ok, log = verify_octa_nonconvex(fam)
    for line in log:
        print(line)
    return 0 if ok else 1


def _cmd_check_points(args) -> int:
    pts = _points_from_json(_load_json(args.points))
    convex = points_convex_position(pts)
    result = {"format": 1, "convex": convex, "certificate": None, "note": ""}
    if convex:
        d = len(pts[0])
        flats = [Flat(d, 0, p, ()) for p in pts]
        # the planar flattening may hide vertices for d > 2; try a few seeds
        last = "no attempt"
        for s in range(args.seed, args.seed + 8):
            try:
                res = extract_convex_flats(flats, len(pts), seed=s)
                result["certificate"] = res.certificate.to_json()
                result["note"] = "certified"
                if args.cert_out:
                    _emit(res.certificate.to_json(), args.cert_out)
                break
            except (ExtractionError, GeometryError) as e:
                last = str(e)
        else:
            result["note"] = f"convex but not certified: {last}"
    if args.out:
        _emit(result, args.out)
    else:
        print(json.dumps({k: v for k, v in result.items() if k != "certificate"}))
    return 0 if convex else 1


def _cmd_check_lines(args) -> int:
    lines = _hyperplanes_from_json(_load_json(args.lines))
    res = lines_convex_position_2d(lines)
    if not res.convex:
        print("not convex (no cell is bounded by every line)")
        return 1
    print(f"convex; witness cell sign vector {list(res.sign_vector)}")
    cert = certificate_from_cell(lines, res.sign_vector, res.sample_point)
    if args.cert_out:
        _emit(cert.to_json(), args.cert_out)
    return 0


def _cmd_check_hyperplanes(args) -> int:
    hps = _hyperplanes_from_json(_load_json(args.hyperplanes))
    dec = hyperplanes_convex_position(hps, seed=args.seed, sections=args.sections)
    if dec.convex:
        print(f"convex; {dec.detail}")
        if args.cert_out:
            _emit(dec.certificate.to_json(), args.cert_out)
        return 0
    print(f"negative: {dec.detail}")
    return 1


def _cmd_verify_cert(args) -> int:
    cert = ConvexityCertificate.from_json(_load_json(args.certificate))
    ok, why = verify_certificate(cert)
    print(("accepted: " if ok else "rejected: ") + why)
    return 0 if ok else 1


def _cmd_extract(args) -> int:
    obj = _load_json(args.flats)
    flats = [Flat.from_json(f) for f in obj["flats"]]
    d, k = flats[0].d, flats[0].k
    try:
        if k == d - 1:
            hps = []
            for f in flats:
                from .convexpos import _flat_normal
                from .rational import vdot

                nrm = _flat_normal(f)
                hps.append(Hyperplane(nrm, vdot(nrm, f.base)))
            res = hyperplane_pipeline(hps, args.n, seed=args.seed, retries=args.retries)
        else:
            res = extract_convex_flats(flats, args.n, seed=args.seed, retries=args.retries)
    except ExtractionError as e:
        print(f"extraction failed: {e}")
        return 1
    _emit(res.to_json(), args.out)
    return 0


def _cmd_net(args) -> int:
    try:
        net = build_eps_net(
            args.d, args.k, args.eps, args.seed, audit_samples=args.audit_samples
        )
    except NetBuildError as e:
        print(f"net build failed: {e}")
        return 1
    _emit(net.to_json(), args.out)
    return 0


def _cmd_refute_cone(args) -> int:
    cone = Cone.from_json(_load_json(args.cone))
    net = EpsNet.from_json(_load_json(args.net))
    try:
        res = refute_cone(cone, net)
    except GuardError as e:
        print(f"construction guard failed: {e}")
        return 1
    _emit(res.to_json(), args.out)
    return 0


def _cmd_section(args) -> int:
    net = EpsNet.from_json(_load_json(args.net))
    try:
        flats, report = section_to_affine(net)
    except RuntimeError as e:
        print(f"section failed: {e}")
        return 1
    _emit(
        {
            "format": 1,
            "flats": [f.to_json() for f in flats],
            "skipped": report["skipped"],
        },
        args.out,
    )
    return 0


def run_experiment(mode, d, k, n, N, trials, seed):
    """Seeded random trials of the extraction machinery; yields CSV rows
    (seed, N, found_size, verified) sorted by trial index."""
    rows = []
    for trial in range(trials):
        trial_seed = seed + trial
        rng = random.Random(trial_seed)
        found, verified = 0, False
        if mode == "points":
            pts = random_gp_points(rng, d, N)
            planar = pts if d == 2 else generic_projection(pts, seed=trial_seed)
            found = len(largest_convex_subset_2d(planar))
            verified = found >= n
        elif mode == "lines":
            lines = random_gp_lines(rng, N)
            from itertools import combinations

            for subset in combinations(range(N), n):
                if lines_convex_position_2d([lines[i] for i in subset]).convex:
                    found, verified = n, True
                    break
        elif mode == "hyperplanes":
            hps = random_gp_hyperplanes(rng, d, N)
            try:
                res = hyperplane_pipeline(hps, n, seed=trial_seed)
                found = len(res.chosen_indices)
                verified = verify_certificate(res.certificate)[0]
            except ExtractionError:
                pass
        elif mode == "flats":
            flats = [random_flat(rng, d, k) for _ in range(N)]
            try:
                res = extract_convex_flats(flats, n, seed=trial_seed)
                found = len(res.chosen_indices)
                verified = verify_certificate(res.certificate)[0]
            except ExtractionError:
                pass
        else:
            raise ValueError(f"unknown mode {mode!r}")
        rows.append((trial_seed, N, found, int(verified)))
    return rows


def _cmd_experiment(args) -> int:
    if args.mode == "flats" and args.k is None:
        raise ValueError("--k is required for mode=flats")
    rows = run_experiment(args.mode, args.d, args.k or 0, args.n, args.N, args.trials, args.seed)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["seed", "N", "found_size", "verified"])
    writer.writerows(rows)
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="convexflats",
        description="Convex position of k-flats: deciders, certificates, and counterexample families.",
    )
    sub = p.add_subparsers(dest="verb", required=True)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("gen-octa", _cmd_gen_octa, help="generate the perturbed octahedron-plus-axes family")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")

    sp = add("verify-octa", _cmd_verify_octa, help="certify non-convexity of an octa family")
    sp.add_argument("family")

    sp = add("check-points", _cmd_check_points, help="decide convex position of points")
    sp.add_argument("points")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cert-out")
    sp.add_argument("--out")

    sp = add("check-lines", _cmd_check_lines, help="decide convex position of planar lines")
    sp.add_argument("lines")
    sp.add_argument("--cert-out")

    sp = add("check-hyperplanes", _cmd_check_hyperplanes, help="decide convex position of hyperplanes")
    sp.add_argument("hyperplanes")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sections", type=int, default=1)
    sp.add_argument("--cert-out")

    sp = add("verify-cert", _cmd_verify_cert, help="verify a convexity certificate exactly")
    sp.add_argument("certificate")

    sp = add("extract", _cmd_extract, help="extract a certified convex subfamily of flats")
    sp.add_argument("flats")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--retries", type=int, default=32)
    sp.add_argument("--out")

    sp = add("net", _cmd_net, help="build an audited eps-net over Gr(k,d)")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--audit-samples", type=int, default=100_000)
    sp.add_argument("--out")

    sp = add("refute-cone", _cmd_refute_cone, help="refute face conditions of a cone against a net")
    sp.add_argument("--cone", required=True)
    sp.add_argument("--net", required=True)
    sp.add_argument("--out")

    sp = add("section", _cmd_section, help="cut a Gr(k+1,d+1) net into affine k-flats in R^d")
    sp.add_argument("--net", required=True)
    sp.add_argument("--out")

    sp = add("experiment", _cmd_experiment, help="seeded random trials, CSV output")
    sp.add_argument("--mode", choices=["points", "lines", "hyperplanes", "flats"], required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    return p


def dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (GeometryError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
