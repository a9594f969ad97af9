import argparse
import logging
import math
import sys

import numpy as np

from . import __version__
from .analysis import (
    AnalysisException,
    approximation_error_sweep,
    arm_study,
    cum_rmse,
    equilibrium_exact,
    make_arm_study,
    trajectory_metrics,
)
from .control import gain_condition
from .dynamics import DynamicsException
from .export import ExportException, FORMATS, export_log, read_log
from .reporters import LoggingReporter
from .scenarios import (
    ScenarioException,
    list_presets,
    load_scenario,
    preset_text,
)
from .simulators import SimulationError, Simulator

logger = logging.getLogger("blimpq")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_RUNTIME = 3


class UsageError(Exception):
    """Command-line arguments that do not describe a valid input."""


def _simulate(args):
    config = load_scenario(args.config)
    log = Simulator(LoggingReporter()).simulate(config)
    if args.out:
        export_log(log, args.format, args.out)
        logger.info("wrote %s", args.out)
    print("{}: {} records".format(config.name, len(log)))
    if len(log):
        last = log.records[-1]
        print(
            "t={:.3f} s  p=({:.3f}, {:.3f}, {:.3f}) m  "
            "eta=({:.2f}, {:.2f}, {:.2f}) deg".format(
                last.t,
                *(list(last.p) + [math.degrees(a) for a in last.eta])
            )
        )
    return EXIT_OK


def _preset(args):
    if args.name is None:
        for name in list_presets():
            print(name)
    else:
        sys.stdout.write(preset_text(args.name))
    return EXIT_OK


def _gains_check(args):
    config = load_scenario(args.config)
    report = gain_condition(config.gains, config.params)
    for name, value in zip(report._fields, report):
        print("{:<18} {:.6g}".format(name, value))
    passed = report.weight_margin > 0 and report.damping_margin > 0
    print("gain condition {}".format("satisfied" if passed else "VIOLATED"))
    return EXIT_OK


def _arm_study(args):
    try:
        params = make_arm_study(L=args.L, h=args.h, ma=args.ma, ma2=args.ma2)
    except ValueError as e:
        raise UsageError(str(e))
    study = arm_study(params)
    print("K_cont      {:.4f}".format(study.K_cont))
    print("K_rig       {:.4f}".format(study.K_rig))
    print("|phi_cont|  {:.2f} deg".format(math.degrees(study.phi_cont)))
    print("|phi_rig|   {:.2f} deg".format(math.degrees(study.phi_rig)))
    print("ratio       {:.1f} %".format(100.0 * study.ratio))
    print("improvement {:.1f} %".format(100.0 * study.improvement))
    print()
    print("theta_deg  phi_cont_deg  phi_rig_deg  linear_cont  linear_rig")
    for theta_deg in range(-60, 61, 15):
        theta = math.radians(theta_deg)
        print(
            "{:9d}  {:12.2f}  {:11.2f}  {:11.2f}  {:10.2f}".format(
                theta_deg,
                math.degrees(equilibrium_exact(theta, params, "continuum")),
                math.degrees(equilibrium_exact(theta, params, "rigid")),
                -math.degrees(study.K_cont * theta),
                -math.degrees(study.K_rig * theta),
            )
        )
    sweep = approximation_error_sweep(params)
    print()
    print(
        "max linearization error: continuum {:.2f} deg, "
        "rigid {:.2f} deg".format(
            math.degrees(sweep.continuum), math.degrees(sweep.rigid)
        )
    )
    return EXIT_OK


def _print_metrics(report):
    for name, value in zip(report._fields, report):
        print("{:<22} {:.6g}".format(name, value))


def _metrics(args):
    _print_metrics(trajectory_metrics(read_log(args.log)))
    return EXIT_OK


def _compare(args):
    a, b = read_log(args.log_a), read_log(args.log_b)
    if not len(a) or not len(b):
        raise AnalysisException("both logs need samples")
    t = a.times()
    dt = t[1] - t[0] if len(t) > 1 else 1.0
    print("CumRMSE of A against B at t={:.3f} s".format(t[-1]))
    for index, name in enumerate(("roll", "pitch", "yaw")):
        other = np.interp(t, b.times(), b.column("eta", index))
        error = np.angle(np.exp(1j * (a.column("eta", index) - other)))
        value = cum_rmse(np.degrees(error), dt=dt)[-1]
        print("  {:<5} {:.4g} deg*s".format(name, value))
    metrics_a = trajectory_metrics(a)
    metrics_b = trajectory_metrics(b)
    print("metric deltas (A - B)")
    _print_metrics(
        metrics_a._make(x - y for x, y in zip(metrics_a, metrics_b))
    )
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="blimpq",
        description="Simulate a moving-mass blimp with a continuum arm.",
    )
    parser.add_argument(
        "--version", action="version", version="%(prog)s " + __version__
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="more progress output (repeat for debug)",
    )
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    p = commands.add_parser("simulate", help="run a scenario file or preset")
    p.add_argument("config")
    p.add_argument("--out", help="write the trajectory log here")
    p.add_argument(
        "--format",
        choices=FORMATS,
        default=None,
        help="log format (default: from the file extension)",
    )
    p.set_defaults(func=_simulate)

    p = commands.add_parser("preset", help="print a bundled scenario")
    p.add_argument("name", nargs="?", help="omit to list the presets")
    p.set_defaults(func=_preset)

    p = commands.add_parser("gains-check", help="check the gain conditions")
    p.add_argument("config")
    p.set_defaults(func=_gains_check)

    p = commands.add_parser("arm-study", help="rigid versus continuum arm")
    p.add_argument("--L", type=float, default=0.40, help="arm length, m")
    p.add_argument("--h", type=float, default=0.30, help="mount depth, m")
    p.add_argument("--ma", type=float, default=0.030, help="tip mass, kg")
    p.add_argument(
        "--ma2", type=float, default=0.015, help="joint actuator mass, kg"
    )
    p.set_defaults(func=_arm_study)

    p = commands.add_parser("metrics", help="flight metrics of a log")
    p.add_argument("log")
    p.set_defaults(func=_metrics)

    p = commands.add_parser("compare", help="compare two logs")
    p.add_argument("log_a")
    p.add_argument("log_b")
    p.set_defaults(func=_compare)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    levels = [logging.WARNING, logging.INFO, logging.DEBUG]
    logging.basicConfig(
        level=levels[min(args.verbose, 2)],
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ScenarioException, UsageError) as e:
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_INVALID
    except (
        SimulationError,
        DynamicsException,
        ExportException,
        AnalysisException,
        ValueError,
    ) as e:
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_RUNTIME
