"""Photon- vs dimensional-efficiency curves for every scheme.

Writes one CSV row per (scheme, energy) with c_p in bits/photon and c_d in
bits/mode.  Feed it to any plotting tool; log-log axes look best.
"""

import argparse
import csv
import sys

import numpy as np

from photonlim import capacity as C

SCHEMES = ["holevo", "heterodyne", "homodyne", "bpsk-holevo", "bpsk-dolinar",
           "ook-holevo", "ook-dolinar", "ook-counting", "ppm-counting-optimal"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=120)
    ap.add_argument("--e-min", type=float, default=1e-4)
    ap.add_argument("--e-max", type=float, default=10.0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    grid = np.geomspace(args.e_min, args.e_max, args.points)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["scheme", "E", "aux", "pie", "die"])
    for name in SCHEMES:
        for pt in C.tradeoff_curve(name, grid):
            w.writerow([name, pt.energy, "" if pt.aux is None else pt.aux,
                        "" if pt.pie is None else pt.pie, pt.die])
    # the two large-c_p asymptotes, on the Holevo curve's c_p values
    for pt in C.tradeoff_curve("holevo", grid):
        if pt.pie and pt.pie > 1:
            w.writerow(["approx1", "", "", pt.pie, C.approx1(pt.pie)])
            w.writerow(["approx2", "", "", pt.pie, C.approx2(pt.pie)])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
