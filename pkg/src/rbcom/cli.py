"""Command-line front end.

    rbcom link-loss | threshold | stable-power | optimize
    rbcom sweep --var L --from 5 --to 30 --count 26 --emit delta,pth
    rbcom simulate --frames 1000 --slots 8 --seed 1 --out trace.csv
    rbcom mi-check --frames 10000 --slots 100

Parameters come from ``--config FILE`` (key = value) overridden by flags.
CSV goes to stdout or ``--out``; the one-line summary goes to stderr.
Exit status: 0 ok, 1 configuration or physics error, 2 numerical failure.
"""

import argparse
import contextlib
import csv
import logging
import math
import sys

import numpy as np

from rbcom.beam import link_loss, spot_radius_sq, waist_radius
from rbcom.capacity import PeakSnrPoint, capacity_lower, capacity_upper
from rbcom.channel_sim import empirical_mutual_information, scheme_for, simulate
from rbcom.config import UNITS, ConfigError, RunConfig, load_config
from rbcom.errors import DomainError, NumericalFailure, SchemeInfeasible
from rbcom.optimizer import modulation_parameters, optimize
from rbcom.resonance import alpha_upper_bound, stable_power, threshold_power
from rbcom.sweep import REFERENCE_CASES, header, parse_emit, run_sweep, sweep_values

log = logging.getLogger("rbcom")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _write_table(path, cols, rows):
    with _output(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _summary(text):
    print(text, file=sys.stderr)


def _common(p):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--out", help="CSV output path (default stdout)")
    for key, unit in UNITS.items():
        p.add_argument(f"--{key}", dest=f"cfg_{key}", metavar=unit.upper().replace("/", "_"),
                       help=f"override {key} [{unit}]")


def build_parser():
    parser = _Parser(prog="rbcom", description="Resonant beam communication channel toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, helptext in [
        ("link-loss", "diffraction link loss and beam radii"),
        ("threshold", "threshold pump power and splitting-ratio bound"),
        ("stable-power", "stable resonant-beam power at the configured alpha"),
        ("optimize", "grid/bisection optimum of the capacity bounds"),
    ]:
        _common(sub.add_parser(name, help=helptext))

    sp = sub.add_parser("sweep", help="tabulate quantities over one swept parameter")
    _common(sp)
    sp.add_argument("--var", required=True)
    sp.add_argument("--from", dest="start", type=float, required=True)
    sp.add_argument("--to", dest="stop", type=float, required=True)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--log", action="store_true", help="geometric spacing")
    sp.add_argument("--emit", required=True, help="comma-separated quantities")
    sp.add_argument("--cases", choices=["reference"],
                    help="repeat for r0 in {3,5} mm and phi in {0.2,0.3} mrad")

    sim = sub.add_parser("simulate", help="simulate frames at the optimum, write the trace")
    _common(sim)

    mi = sub.add_parser("mi-check", help="noise-variance and mutual-information check at the optimum")
    _common(mi)
    return parser


def _config_from(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {k[4:]: v for k, v in vars(args).items() if k.startswith("cfg_") and v is not None}
    return cfg.with_values(**overrides) if overrides else cfg


def _cmd_link_loss(cfg, args):
    g = cfg.geometry()
    d = link_loss(g)
    cols = ["L [m]", "delta [1]", "delta_db [dB]", "waist_radius [m]", "spot_radius_sq [m^2]"]
    _write_table(args.out, cols, [[cfg.L, d, 10 * math.log10(d), waist_radius(g), spot_radius_sq(g)]])
    _summary(f"delta = {d:.6g} ({10 * math.log10(d):.4f} dB) at L = {cfg.L:g} m")


def _cmd_threshold(cfg, args):
    d = link_loss(cfg.geometry())
    m = cfg.medium()
    pth = threshold_power(m, d)
    u = alpha_upper_bound(m, cfg.P_in, d)
    _write_table(args.out, ["delta [1]", "pth [W]", "P_in [W]", "alpha_max [1]"], [[d, pth, cfg.P_in, u]])
    state = "resonates" if cfg.P_in > pth else "below threshold"
    _summary(f"P_th = {pth:.6g} W; P_in = {cfg.P_in:g} W {state}; alpha < {u:.6g}")


def _cmd_stable_power(cfg, args):
    d = link_loss(cfg.geometry())
    sp = stable_power(cfg.physics(d))
    cols = ["alpha [1]", "pt [W]", "bracket_low [W]", "bracket_high [W]", "residual [1]", "iterations [count]"]
    _write_table(args.out, cols, [[cfg.alpha, sp.p_t, sp.bracket_low, sp.bracket_high, sp.residual, sp.iterations]])
    _summary(f"P_t = {sp.p_t:.9g} W (bracket {sp.bracket_low:.6g}..{sp.bracket_high:.6g}, {sp.iterations} iterations)")


OPTIMUM_COLUMNS = [
    ("c_up_star", "bits/use"),
    ("c_low_star", "bits/use"),
    ("alpha_star", "1"),
    ("a_hat_star", "sqrt(W)"),
    ("a_star", "sqrt(W)"),
    ("mu1_star", "1"),
    ("p_t_star", "W"),
    ("p_peak_star", "W"),
    ("link_loss", "1"),
    ("threshold_power", "W"),
]


def _cmd_optimize(cfg, args):
    opt = optimize(cfg.optimizer_config())
    cols = ["P_in [W]"] + [f"{n} [{u}]" for n, u in OPTIMUM_COLUMNS]
    _write_table(args.out, cols, [[cfg.P_in] + [getattr(opt, n) for n, _ in OPTIMUM_COLUMNS]])
    if opt.is_zero:
        _summary(f"no resonance: P_in = {cfg.P_in:g} W <= P_th = {opt.threshold_power:.6g} W; all-zero optimum")
    else:
        _summary(
            f"C_up* = {opt.c_up_star:.6g}, C_low* = {opt.c_low_star:.6g} bits/use at "
            f"alpha* = {opt.alpha_star:.6g}, P_peak* = {opt.p_peak_star:.6g} W"
        )


def _cmd_sweep(cfg, args):
    emit = parse_emit(args.emit)
    values = sweep_values(args.start, args.stop, args.count, args.log)
    cases = REFERENCE_CASES if args.cases else None
    rows = list(run_sweep(cfg, args.var, values, emit, cases))
    _write_table(args.out, header(args.var, emit, bool(cases)), rows)
    _summary(f"swept {args.var} over {args.count} points x {len(cases or [None])} case(s)")


def _scheme_at_optimum(cfg):
    opt = optimize(cfg.optimizer_config())
    a, mu1, p_t = modulation_parameters(opt)
    physics = cfg.physics(opt.link_loss, opt.alpha_star)
    sch = scheme_for(a, mu1, p_t, opt.alpha_star, opt.link_loss, cfg.sigma2, cfg.slots)
    return opt, physics, sch


def _cmd_simulate(cfg, args):
    opt, physics, sch = _scheme_at_optimum(cfg)
    trace = simulate(sch, physics, cfg.sigma2, cfg.frames, cfg.seed)
    with _output(args.out) as fh:
        trace.write_csv(fh)
    err = np.max(np.abs(trace.x - sch.a * trace.s)) / sch.a
    _summary(
        f"{cfg.frames} frames x {cfg.slots} slots, M = {sch.constellation.size}, "
        f"max |x - A s|/A = {err:.3g}, rng {trace.metadata['rng']} seed {cfg.seed}"
    )


def _cmd_mi_check(cfg, args):
    opt, physics, sch = _scheme_at_optimum(cfg)
    trace = simulate(sch, physics, cfg.sigma2, cfg.frames, cfg.seed)
    gain = math.sqrt(opt.alpha_star * opt.link_loss)
    resid = trace.y - gain * sch.a * trace.s
    var_ratio = float(np.var(resid) / cfg.sigma2)
    mi = empirical_mutual_information(trace, sch, opt.alpha_star, opt.link_loss, cfg.sigma2)
    pt = PeakSnrPoint(opt.p_peak_star, cfg.sigma2)
    c_low = capacity_lower(pt, sch.constellation.size)
    c_up = capacity_upper(pt)
    cols = ["samples [count]", "noise_var_ratio [1]", "mi_estimate [bits/use]", "clow [bits/use]", "cup [bits/use]"]
    _write_table(args.out, cols, [[trace.x.size, var_ratio, mi, c_low, c_up]])
    _summary(
        f"{trace.x.size} samples: var ratio {var_ratio:.5f}, MI {mi:.5f} vs C_low {c_low:.5f} "
        f"(diff {mi - c_low:+.4f}) bits/use"
    )


COMMANDS = {
    "link-loss": _cmd_link_loss,
    "threshold": _cmd_threshold,
    "stable-power": _cmd_stable_power,
    "optimize": _cmd_optimize,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "mi-check": _cmd_mi_check,
}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        cfg = _config_from(args)
        COMMANDS[args.command](cfg, args)
    except NumericalFailure as exc:
        print(f"rbcom: numerical failure: {exc}", file=sys.stderr)
        if exc.bracket is not None:
            print(f"rbcom: last bracket {exc.bracket}", file=sys.stderr)
        return 2
    except (ConfigError, DomainError, SchemeInfeasible, ValueError, OSError) as exc:
        print(f"rbcom: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
