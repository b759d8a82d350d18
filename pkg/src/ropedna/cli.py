"""Command-line interface: one binary, subcommands per module, all
randomness flowing from a single --seed flag."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import angular, auth, calib, lev, rope, rotormap, seqio
from .rope import RopeParams

SCHEMA_VERSION = 1


def parse_rope_spec(spec: str) -> RopeParams:
    """Parse e.g. 's=8,m=4,t=4,fine' into RopeParams."""
    kwargs: dict = {}
    mode = "default"
    weighted = False
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if "=" in token:
            key, val = token.split("=", 1)
            if key not in ("s", "m", "t"):
                raise ValueError(f"unknown rope parameter {key!r}")
            kwargs[key] = int(val)
        elif token in ("fine", "fine_tuned"):
            mode = "fine_tuned"
        elif token == "default":
            mode = "default"
        elif token == "weighted":
            weighted = True
        else:
            raise ValueError(f"unknown rope flag {token!r}")
    if "s" not in kwargs or "m" not in kwargs:
        raise ValueError("rope spec needs at least s= and m=")
    return RopeParams(kwargs["s"], kwargs["m"], kwargs.get("t"), mode, weighted)


def _read_fasta(path: str, iupac: str = "randomize", seed: int = 0):
    with open(path, "rb") as fh:
        return seqio.parse_fasta(fh.read(), iupac=iupac, seed=seed)


def _emit(doc: dict, out: str | None):
    doc["schema_version"] = SCHEMA_VERSION
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_lev(args) -> int:
    if args.band is not None:
        res = lev.levenshtein_banded(args.a, args.b, args.band)
    else:
        res = lev.levenshtein(args.a, args.b)
    if args.json:
        _emit({"distance": res.distance, "exact": res.exact,
               "band": res.band}, None)
    else:
        print(res.distance)
    return 0


def cmd_correlate(args) -> int:
    params = parse_rope_spec(args.rope)
    rng = seqio.make_rng(args.seed)
    lo, hi = args.rate_min, args.rate_max
    rows = []
    for _ in range(args.pairs):
        rate = float(rng.uniform(lo, hi))
        fid, _ = calib._sample_fidelity(args.n, params, rate, rng)
        rows.append((rate, fid))
    with open(args.out + "_scatter.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rate (fraction)", "fidelity"])
        w.writerows((f"{r:.8g}", f"{f:.8g}") for r, f in rows)
    grid = np.linspace(lo, hi, args.knots)
    curve = calib.fit_curve(args.n, params, grid, args.samples_per_knot,
                            args.seed + 1)
    table = calib.rmse(curve, args.n, params, grid, args.eval_samples,
                       args.seed + 2)
    with open(args.out + "_curve.csv", "w") as fh:
        fh.write(calib.curve_to_csv(curve, table))
    with open(args.out + "_curve.json", "w") as fh:
        fh.write(calib.curve_to_json(curve, table) + "\n")
    print(f"wrote {args.out}_scatter.csv, {args.out}_curve.csv, "
          f"{args.out}_curve.json")
    return 0


def cmd_index(args) -> int:
    params = parse_rope_spec(args.rope)
    records = _read_fasta(args.ref, seed=args.seed)
    if not records:
        raise ValueError("reference FASTA has no records")
    ref_id, ref = records[0]
    index = rotormap.build_index(ref, args.window, args.step, params,
                                 ref_id=ref_id)
    if args.thresholds_rate is not None:
        index.thresholds = calib.estimate_thresholds(
            index, ref, args.thresholds_rate, args.threshold_samples,
            args.seed)
    rotormap.save_index(index, args.out)
    n_deg = int(index.degenerate.sum())
    print(f"indexed {index.fragment_count} fragments "
          f"({n_deg} degenerate) -> {args.out}")
    return 0


def cmd_map(args) -> int:
    index = rotormap.load_index(args.index)
    reads = _read_fasta(args.reads, seed=args.seed)
    both = args.strands == "both"
    search = (rotormap.search_top1 if args.regime == "top1"
              else rotormap.search_threshold)
    results = search(index, reads, both_strands=both)
    ref = None
    if args.refine > 0:
        records = _read_fasta(args.ref, seed=args.seed) if args.ref else None
        if records is None:
            raise ValueError("--refine requires --ref")
        ref = records[0][1]
    out_docs = []
    read_by_id = dict(reads)
    for res in results:
        doc = {"id": res.read_id, "strand": res.strand,
               "locations": [{"offset": o, "fidelity": f}
                             for o, f in res.locations]}
        if ref is not None and res.locations:
            read = read_by_id[res.read_id]
            if res.strand == "-":
                read = seqio.reverse_complement(read)
            enc = rope.encode(read.slice(0, index.window), index.params)
            off, fid = rotormap.refine(ref, enc, res.locations[0][0],
                                       args.refine)
            doc["refined"] = {"offset": off, "fidelity": fid}
        out_docs.append(doc)
    _emit({"results": out_docs}, args.out)
    return 0


def cmd_calibrate(args) -> int:
    params = parse_rope_spec(args.rope)
    grid = np.linspace(args.rate_min, args.rate_max, args.knots)
    curve = calib.fit_curve(args.n, params, grid, args.samples, args.seed)
    table = None
    if args.eval_samples:
        table = calib.rmse(curve, args.n, params, grid, args.eval_samples,
                           args.seed + 1)
    if args.format == "csv":
        text = calib.curve_to_csv(curve, table)
    else:
        text = calib.curve_to_json(curve, table) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _load_real_params(path: str) -> np.ndarray:
    enc = rope.load_encoding(path)
    return rope.to_real(enc)


def cmd_angular(args) -> int:
    build = (angular.build_standard if args.variant == "standard"
             else angular.build_compact)
    if args.action == "build":
        circ = build(_load_real_params(args.rope_file), args.qubits, args.scale)
        text = angular.serialize(circ)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return 0
    if args.action == "simulate":
        circ = build(_load_real_params(args.rope_file), args.qubits, args.scale)
        state = angular.simulate(circ)
        p0 = float(abs(state[0]) ** 2)
        zeros = angular.sample_shots(p0, args.shots, args.seed)
        _emit({"zero_probability": p0, "zero_count": zeros,
               "shots": args.shots}, args.out)
        return 0
    # mirror
    pa = _load_real_params(args.rope_file)
    pb = _load_real_params(args.rope_file_b or args.rope_file)
    fid = angular.mirror_fidelity_exact(pa, pb, args.qubits, args.variant,
                                        args.scale)
    zeros = angular.sample_shots(fid, args.shots, args.seed)
    _emit({"fidelity_exact": fid, "zero_count": zeros, "shots": args.shots},
          args.out)
    return 0


def cmd_auth(args) -> int:
    params = parse_rope_spec(args.rope)
    a = int(round(args.a_rate * args.n))
    b = int(round(args.b_rate * args.n))
    config = auth.calibrate_config(args.n, params, a, b, args.epsilon,
                                   samples=args.calib_samples, seed=args.seed,
                                   qubits=args.qubits, mode=args.mode)
    report = auth.simulate_protocol(config, args.trials, args.seed + 1)
    report.update({"f_a": config.f_a, "f_b": config.f_b})
    _emit(report, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ropedna",
        description="Rotary-phase DNA fingerprints, mapping, circuit "
                    "encodings and authentication simulation")
    ap.add_argument("--threads", type=int,
                    default=int(os.environ.get("RDNA_THREADS", "0")) or None,
                    help="worker cap (results are independent of this)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lev", help="exact Levenshtein distance")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--band", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lev)

    p = sub.add_parser("correlate", help="rate-vs-fidelity scatter + curve")
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--rope", default="s=5,m=4")
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--rate-min", type=float, default=0.01)
    p.add_argument("--rate-max", type=float, default=0.49)
    p.add_argument("--knots", type=int, default=13)
    p.add_argument("--samples-per-knot", type=int, default=20)
    p.add_argument("--eval-samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("index", help="build a fragment index")
    p.add_argument("--ref", required=True)
    p.add_argument("--window", type=int, default=20000)
    p.add_argument("--step", type=int, default=1250)
    p.add_argument("--rope", default="s=8,m=4,t=4,fine")
    p.add_argument("--thresholds-rate", type=float)
    p.add_argument("--threshold-samples", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("map", help="map reads against an index")
    p.add_argument("--index", required=True)
    p.add_argument("--reads", required=True)
    p.add_argument("--regime", choices=["top1", "threshold"], default="top1")
    p.add_argument("--strands", choices=["both", "forward"], default="both")
    p.add_argument("--refine", type=int, default=0, metavar="RADIUS")
    p.add_argument("--ref", help="reference FASTA (needed for --refine)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("calibrate", help="fit a fidelity-to-rate curve")
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--rope", default="s=5,m=4")
    p.add_argument("--rate-min", type=float, default=0.01)
    p.add_argument("--rate-max", type=float, default=0.49)
    p.add_argument("--knots", type=int, default=13)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--eval-samples", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("angular", help="circuit encoding operations")
    p.add_argument("action", choices=["build", "simulate", "mirror"])
    p.add_argument("--rope-file", required=True, help="saved encoding file")
    p.add_argument("--rope-file-b", help="second encoding for mirror")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--variant", choices=["standard", "compact"],
                   default="standard")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--shots", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_angular)

    p = sub.add_parser("auth", help="authentication protocol simulation")
    p.add_argument("action", choices=["simulate"])
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--a-rate", type=float, default=0.1)
    p.add_argument("--b-rate", type=float, default=0.3)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--mode", choices=["ideal", "angular"], default="ideal")
    p.add_argument("--qubits", type=int, default=12)
    p.add_argument("--rope", default="s=5,m=4")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--calib-samples", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_auth)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
