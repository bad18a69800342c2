"""Timed CNOT fidelity under dot relaxation for a ladder of gamma values.

Writes ``gamma,fidelity`` CSV to stdout.
"""

import argparse
import sys

from dotcavity.budget import rows_to_csv
from dotcavity.noise import NoiseChannels, cnot_pulse_plan, fidelity_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rate", type=float, default=1e-3, help="each intra-dot channel rate, 1/ps")
    ap.add_argument("--kappa", type=float, default=0.0, help="cavity loss, 1/ps")
    ap.add_argument("--omega", type=float, default=0.01, help="pulse couplings, meV")
    ap.add_argument("--gammas", default="1,1e-1,1e-2,1e-3,1e-4,1e-6")
    args = ap.parse_args()

    gammas = [float(g) for g in args.gammas.split(",")]
    intra = NoiseChannels(args.rate, args.rate, args.rate, args.kappa)
    plan = cnot_pulse_plan(args.omega, args.omega)
    sys.stdout.write(rows_to_csv(("gamma", "fidelity"), fidelity_table(gammas, intra, plan)))


if __name__ == "__main__":
    main()
