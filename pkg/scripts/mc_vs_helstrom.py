"""Feedback receiver Monte Carlo against the Helstrom error, cell by cell."""

import argparse
import math

from photonlim import feedback as F
from photonlim.binary_channel import DolinarChannel, helstrom_error


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--energies", default="0.05,0.2,0.5")
    ap.add_argument("--priors", default="0.5,0.3")
    args = ap.parse_args()

    print(f"{'E':>6} {'xi':>5} {'pe':>10} {'stderr':>9} {'helstrom':>10} {'z':>7} {'parity':>7}")
    for E in map(float, args.energies.split(",")):
        for xi in map(float, args.priors.split(",")):
            r = F.run_monte_carlo(F.bpsk(E, xi), 1.0, args.trials, seed=args.seed)
            h = helstrom_error(DolinarChannel(math.exp(-4 * E), min(xi, 1 - xi)))
            z = (r.pe_estimate - h) / r.stderr if r.stderr > 0 else float("nan")
            print(f"{E:6.3g} {xi:5.2f} {r.pe_estimate:10.6f} {r.stderr:9.2e} {h:10.6f} "
                  f"{z:+7.2f} {r.parity_agreement:7.4f}")


if __name__ == "__main__":
    main()
