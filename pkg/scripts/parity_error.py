"""Raw bit error of the third parity32 symbol, adaptive vs fixed receiver.

Also reports MI, c_d and c_p for both receivers and for the Hamming code.
"""

import argparse
import csv
import sys

import numpy as np

from photonlim import adaptive as A


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=50)
    ap.add_argument("--codes", default="parity32,hamming74")
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    grid = np.geomspace(1e-3, 10.0, args.points)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["code", "E", "mode", "mi", "die", "pie", "bit_error_last", "margin_vs_fixed"])
    for kind in args.codes.split(","):
        code = A.make_code(kind)
        for E in grid:
            ad = A.metrics(A.run_exact(code, E, "adaptive"))
            fx = A.metrics(A.run_exact(code, E, "fixed"))
            for mode, m in (("adaptive", ad), ("fixed", fx)):
                w.writerow([kind, E, mode, m.mi, m.die, m.pie, m.bit_error[-1],
                            fx.bit_error[-1] - m.bit_error[-1]])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
