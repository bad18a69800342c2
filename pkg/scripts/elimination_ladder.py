"""Full three-level dynamics against the eliminated coupling as delta grows."""

import argparse

from dotcavity.threelevel import ThreeLevelParams, validate_elimination


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega", type=float, default=0.1, help="Omega_2 = Omega_c, meV")
    ap.add_argument("--deltas", default="0.5,1,2,4,8")
    ap.add_argument("--steps", type=int, default=2000)
    args = ap.parse_args()

    print(f"{'delta_meV':>10} {'omega_eff':>12} {'omega_fit':>12} {'rel_dev':>10} {'max_pop_e~':>11}")
    for d in (float(x) for x in args.deltas.split(",")):
        r = validate_elimination(ThreeLevelParams(args.omega, args.omega, d), steps=args.steps)
        print(f"{d:10.3g} {r.omega_eff:12.5e} {r.omega_fit:12.5e} {r.rel_deviation:10.3e} {r.max_pop_etilde:11.3e}")


if __name__ == "__main__":
    main()
