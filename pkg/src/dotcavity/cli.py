"""Command-line front end: ``dotcavity {verify,adiabatic,budget,sweep,noise}``.

Settings come from a plain ``key = value`` config file (``--config`` or the
``DOTCAVITY_CONFIG`` environment variable) and are overridden by flags.
Dimensional values need a unit suffix (``0.1meV``, ``300MHz``, ``1ns``,
``1e-3/ps``).

Exit codes: 0 success, 1 verification or tolerance failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from dotcavity import budget, gates, noise, threelevel
from dotcavity.dotmodel import separation_factor
from dotcavity.errors import InputError
from dotcavity.qspace import SpaceLayout
from dotcavity.units import FREQ_CONVENTIONS, Quantity, UnitError, parse_quantity

log = logging.getLogger("dotcavity")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise InputError(f"expected an integer, got {text!r}") from None


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InputError(f"expected a number, got {text!r}") from None


def _floats(text: str) -> list[float]:
    return [_float(x) for x in str(text).split(",") if x.strip()]


def _dim(dimension: str) -> Callable[[str], Quantity]:
    return lambda text: parse_quantity(text, dimension)


def _coupling(text: str) -> Quantity:
    q = parse_quantity(text)
    if q.dimension not in ("energy", "frequency"):
        raise UnitError(f"{text!r}: expected an energy or frequency")
    return q


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise InputError(f"expected one of {options}, got {text!r}")
        return text

    return parse


KEYS: dict[str, Callable[[str], object]] = {
    "cutoff": _int,
    "omega2": _dim("energy"),
    "omegac": _dim("energy"),
    "delta": _dim("energy"),
    "steps": _int,
    "tolerance": _float,
    "preset": _choice("paper"),
    "gamma": _float,
    "t_coupling": _dim("energy"),
    "delta_e": _dim("energy"),
    "omega1_intra": _dim("energy"),
    "omegac_intra": _coupling,
    "tau_d_intra": _dim("time"),
    "rate_e_to_v": _dim("rate"),
    "rate_e_to_etilde_rad": _dim("rate"),
    "rate_e_to_etilde_ph": _dim("rate"),
    "kappa": _dim("rate"),
    "freq_convention": _choice(*FREQ_CONVENTIONS),
    "t_min": _dim("energy"),
    "t_max": _dim("energy"),
    "t_points": _int,
    "delta_e_min": _dim("energy"),
    "delta_e_max": _dim("energy"),
    "delta_e_points": _int,
    "gammas": _floats,
    "omega1": _dim("energy"),
    "omega_eff": _dim("energy"),
}


def read_config(path: str | os.PathLike) -> dict[str, object]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise InputError(f"{path}:{n}: expected 'key = value'")
        if key not in KEYS:
            raise InputError(f"{path}:{n}: unknown key {key!r}")
        out[key] = KEYS[key](value.strip())
    return out


@dataclass
class RunConfig:
    values: dict

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    def require(self, key: str, why: str = ""):
        if key not in self.values:
            raise InputError(f"missing required setting {key!r}{': ' + why if why else ''}")
        return self.values[key]


def load_run_config(args: argparse.Namespace) -> RunConfig:
    path = args.config or os.environ.get("DOTCAVITY_CONFIG")
    values = read_config(path) if path else {}
    for key in KEYS:
        flag = getattr(args, key, None)
        if flag is None:
            continue
        parsed = KEYS[key](flag)
        if key in values and values[key] != parsed:
            log.info("flag --%s overrides config value %s", key.replace("_", "-"), values[key])
        values[key] = parsed
    return RunConfig(values)


def fmt(x: float) -> str:
    """Short scientific notation without exponent padding: 1.0000e-6."""
    if x == 0 or not math.isfinite(x):
        return repr(float(x))
    mant, exp = f"{x:.4e}".split("e")
    return f"{mant}e{int(exp)}"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands ----------------------------------------------------------------


def cmd_verify(args, cfg: RunConfig) -> int:
    cutoff = cfg.get("cutoff", 3)
    if cutoff < 2:
        raise InputError(
            f"--cutoff {cutoff}: the sqrt(2)-Rabi pair |e,1> <-> |v,2> needs a cavity cutoff >= 2"
        )
    report = gates.verify_protocol(SpaceLayout.dots_and_cavity(("j", "k"), fock_cutoff=cutoff))
    _emit((report.to_json() if args.json else report.to_text()) + "\n", args.out)
    return EXIT_OK if report.all_passed else EXIT_FAIL


def cmd_adiabatic(args, cfg: RunConfig) -> int:
    p = threelevel.ThreeLevelParams(
        omega2=cfg.get("omega2", Quantity(0.1, "meV")).in_("meV"),
        omegac=cfg.get("omegac", Quantity(0.1, "meV")).in_("meV"),
        detuning=cfg.get("delta", Quantity(1.0, "meV")).in_("meV"),
        fock_cutoff=cfg.get("cutoff", 2),
    )
    steps = cfg.get("steps", 2000)
    tol = cfg.get("tolerance", 0.05)
    rep = threelevel.validate_elimination(p, steps=steps)
    csv_text = threelevel.trajectory_csv(rep.trajectory)
    summary = {
        "omega_eff_meV": rep.omega_eff,
        "omega_fit_meV": rep.omega_fit,
        "rel_deviation": rep.rel_deviation,
        "max_pop_etilde": rep.max_pop_etilde,
        "tolerance": tol,
    }
    if args.json:
        summary_text = json.dumps(summary, indent=2) + "\n"
    else:
        summary_text = rep.summary() + f"\ntolerance       = {tol!r}\n"
    if args.out:
        Path(args.out).write_text(csv_text)
        sys.stdout.write(summary_text)
    else:
        sys.stdout.write(csv_text)
        sys.stderr.write(summary_text)
    ok = math.isfinite(rep.rel_deviation) and rep.rel_deviation <= tol
    return EXIT_OK if ok else EXIT_FAIL


def _rates(cfg: RunConfig):
    keys = ("rate_e_to_v", "rate_e_to_etilde_rad", "rate_e_to_etilde_ph")
    if not any(k in cfg.values for k in keys):
        return None
    return tuple(cfg.get(k, Quantity(0.0, "1/ps")) for k in keys)


def _budget_params(cfg: RunConfig) -> budget.BudgetParams:
    conv = cfg.get("freq_convention", "h")
    tau = cfg.get("tau_d_intra")
    rates = _rates(cfg)
    if cfg.get("preset") == "paper":
        if tau is None:
            raise InputError("--preset paper requires --tau-d-intra (no intra-dot decoherence time is assumed)")
        p = budget.paper_preset(tau_d_intra=tau, intra_rates=rates, omega1_intra=cfg.get("omega1_intra"),
                                freq_convention=conv)
        overrides = {}
        if "gamma" in cfg.values:
            overrides["gamma"] = cfg.get("gamma")
        for key, field in (("omega2", "omega2"), ("omegac_intra", "omegac_intra"), ("delta", "detuning")):
            if key in cfg.values:
                overrides[field] = cfg.get(key)
        return dataclasses.replace(p, **overrides) if overrides else p
    if "gamma" in cfg.values:
        gamma = cfg.get("gamma")
    else:
        t = cfg.require("t_coupling", "give gamma or t_coupling and delta_e").in_("meV")
        gamma = separation_factor(t, cfg.require("delta_e", "give gamma or t_coupling and delta_e").in_("meV"))
    if tau is None and rates is None:
        raise InputError("missing intra-dot decoherence time: set tau_d_intra or the intra-dot rates")
    return budget.BudgetParams(
        gamma=gamma,
        omega1_intra=cfg.require("omega1_intra"),
        omega2=cfg.require("omega2"),
        omegac_intra=cfg.require("omegac_intra"),
        detuning=cfg.require("delta"),
        tau_d_intra=tau,
        intra_rates=rates,
        freq_convention=conv,
    )


def cmd_budget(args, cfg: RunConfig) -> int:
    rep = budget.compute_budget(_budget_params(cfg))
    if args.json:
        text = json.dumps({name: value for name, value, _ in rep.items()}, indent=2) + "\n"
    else:
        lines = [f"{name:<18} = {fmt(value)}{' ' + unit if unit else ''}" for name, value, unit in rep.items()]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _grid(cfg: RunConfig, lo: str, hi: str, n: str) -> np.ndarray:
    a, b, k = cfg.require(lo).in_("meV"), cfg.require(hi).in_("meV"), cfg.require(n)
    if k < 1 or a <= 0 or b <= 0:
        raise InputError(f"{lo}/{hi} must be > 0 and {n} >= 1")
    return np.geomspace(a, b, k) if k > 1 else np.array([a])


def cmd_sweep(args, cfg: RunConfig) -> int:
    values = dict(cfg.values)
    values.setdefault("preset", "paper")
    cfg = RunConfig(values)
    fixed = _budget_params(cfg)
    rows = budget.sweep(
        _grid(cfg, "t_min", "t_max", "t_points"),
        _grid(cfg, "delta_e_min", "delta_e_max", "delta_e_points"),
        fixed,
    )
    _emit(budget.rows_to_csv(budget.SWEEP_HEADER, rows), args.out)
    return EXIT_OK


def cmd_noise(args, cfg: RunConfig) -> int:
    def rate(key):
        return cfg.get(key, Quantity(0.0, "1/ps")).in_("1/ps")

    channels = noise.NoiseChannels(
        rate_e_to_v=rate("rate_e_to_v"),
        rate_e_to_etilde_rad=rate("rate_e_to_etilde_rad"),
        rate_e_to_etilde_ph=rate("rate_e_to_etilde_ph"),
        kappa_cavity=rate("kappa"),
    )
    plan = noise.cnot_pulse_plan(
        cfg.get("omega1", Quantity(0.01, "meV")).in_("meV"),
        cfg.get("omega_eff", Quantity(0.01, "meV")).in_("meV"),
    )
    gammas = cfg.get("gammas", [1.0, 1e-2, 1e-4, 1e-6])
    table = noise.fidelity_table(gammas, channels, plan)
    _emit(budget.rows_to_csv(("gamma", "fidelity"), table), args.out)
    return EXIT_OK


COMMANDS = {
    "verify": (cmd_verify, ["cutoff"]),
    "adiabatic": (cmd_adiabatic, ["omega2", "omegac", "delta", "steps", "tolerance", "cutoff"]),
    "budget": (
        cmd_budget,
        ["preset", "tau_d_intra", "gamma", "t_coupling", "delta_e", "omega1_intra", "omega2", "omegac_intra",
         "delta", "rate_e_to_v", "rate_e_to_etilde_rad", "rate_e_to_etilde_ph", "freq_convention"],
    ),
    "sweep": (
        cmd_sweep,
        ["preset", "tau_d_intra", "omega1_intra", "omega2", "omegac_intra", "delta", "rate_e_to_v",
         "rate_e_to_etilde_rad", "rate_e_to_etilde_ph", "freq_convention", "t_min", "t_max", "t_points",
         "delta_e_min", "delta_e_max", "delta_e_points"],
    ),
    "noise": (
        cmd_noise,
        ["gammas", "omega1", "omega_eff", "rate_e_to_v", "rate_e_to_etilde_rad", "rate_e_to_etilde_ph", "kappa"],
    ),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="key = value config file")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="write output here instead of stdout")
    common.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="dotcavity", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, keys) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common])
        for key in keys:
            sp.add_argument("--" + key.replace("_", "-"), dest=key, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for attr, default in (("config", None), ("json", False), ("out", None), ("verbose", False)):
        if not hasattr(args, attr):
            setattr(args, attr, default)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    handler, _ = COMMANDS[args.command]
    try:
        cfg = load_run_config(args)
        return handler(args, cfg)
    except (InputError, ValueError) as exc:
        print(f"dotcavity {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"dotcavity {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
