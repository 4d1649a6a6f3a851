#!/usr/bin/env python3
"""Survey second singular values against the closed-form bound.

Builds every orthogonality graph in a (ring, dimension) grid that fits
under the dense caps and tabulates how tight sigma_2 sits against
sqrt(q^((d-2)(2r-1))).  Ratios near 1 mean the bound is sharp there.
"""

import argparse
import json
import sys

from valring import (
    DEFAULT_CAPS,
    TooLarge,
    build_graph,
    class_count,
    lambda3_bound,
    spectrum,
)
from valring.cli import parse_ring

DEFAULT_RINGS = ("z:3:1", "z:3:2", "z:5:1", "z:5:2", "z:7:1", "f:9:1", "f:9:2")


def survey(ring_specs, dims, cap):
    rows = []
    for spec in ring_specs:
        ring = parse_ring(spec)
        for d in dims:
            n_cls = class_count(ring, d)
            if n_cls > cap:
                rows.append({"ring": spec, "d": d, "classes": n_cls, "skipped": True})
                continue
            g = build_graph(ring, d, cap)
            sv = spectrum(g, cap)
            bound = lambda3_bound(ring, d)
            rows.append(
                {
                    "ring": spec,
                    "d": d,
                    "classes": n_cls,
                    "degree": g.degree,
                    "sigma1": float(sv[0]),
                    "sigma2": float(sv[1]),
                    "bound": bound,
                    "tightness": float(sv[1]) / bound if bound else None,
                    "skipped": False,
                }
            )
    return rows


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rings", default=",".join(DEFAULT_RINGS),
                    help="comma-separated ring specs")
    ap.add_argument("--dims", default="2,3,4", help="comma-separated dimensions")
    ap.add_argument("--cap", type=int, default=DEFAULT_CAPS.max_graph_classes)
    ap.add_argument("--json", dest="json_out", default=None,
                    help="also write the full table to this path")
    args = ap.parse_args()

    try:
        rows = survey(args.rings.split(","), [int(t) for t in args.dims.split(",")], args.cap)
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    print(f"{'ring':>8} {'d':>2} {'classes':>8} {'degree':>7} "
          f"{'sigma2':>10} {'bound':>10} {'sigma2/bound':>12}")
    for row in rows:
        if row["skipped"]:
            print(f"{row['ring']:>8} {row['d']:>2} {row['classes']:>8}  (over cap, skipped)")
            continue
        print(f"{row['ring']:>8} {row['d']:>2} {row['classes']:>8} {row['degree']:>7} "
              f"{row['sigma2']:>10.4f} {row['bound']:>10.4f} {row['tightness']:>12.4f}")
    if args.json_out:
        with open(args.json_out, "w") as fh:
            json.dump({"kind": "spectral_survey", "rows": rows}, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
