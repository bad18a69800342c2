"""Budget for the reference parameter set, for both frequency conventions,
followed by gamma and the enhancement across a range of tunnel couplings."""

import argparse

from dotcavity.budget import compute_budget, paper_preset
from dotcavity.dotmodel import DotPairParams, mix_pair
from dotcavity.units import parse_quantity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tau-d-intra", default="1ns")
    args = ap.parse_args()
    tau = parse_quantity(args.tau_d_intra, "time")

    for conv in ("h", "hbar"):
        print(f"# omega_c conversion: {conv}")
        rep = compute_budget(paper_preset(tau_d_intra=tau, freq_convention=conv))
        for name, value, unit in rep.items():
            print(f"{name:20s} {value:.5e} {unit}")
        print()

    print(f"{'t_meV':>8} {'gamma':>12} {'gamma_exact':>12} {'enhancement':>12}")
    for t in (0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0):
        pair = mix_pair(DotPairParams(0.0, 10.0, t))
        print(f"{t:8.3g} {pair.gamma:12.5e} {pair.gamma_exact:12.5e} {pair.gamma ** -0.5:12.5e}")


if __name__ == "__main__":
    main()
