"""
Command-line entry point.

    superjet verify SCENARIO [--udeg-bound N] [--json OUT] [--list]
    superjet expr eval --n N EXPR
    superjet expr bracket --n N P Q
    superjet atlas SPACE --n N --p-max P --d-max D
    superjet window --n N P D

Every subcommand also takes --config FILE, -v/--verbose and --log-json.
Exit status is 0 when everything passes, 1 when a task fails and 2 for
usage or validation errors.
"""
from __future__ import absolute_import, print_function

import argparse
import json
import logging
import sys

from superjet import config, jsonlog
from superjet.cohomolab import (SPACES, atlas, index_set, omega_lambda_window,
                                vbh_guaranteed_zero, window_cases)
from superjet.errors import IndexOutOfRange, ParseError, SuperjetError, ValidationError
from superjet.exprparse import parse_expr, to_text
from superjet.functionals import LocalFunctional, schouten
from superjet.jetring import DiffPoly
from superjet.scenario import Scenario, run_scenario

log = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _common():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="llsd file with engine settings")
    common.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG")
    common.add_argument("--log-json", action="store_true",
                        help="write log records to stderr as JSON objects")
    return common


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="superjet",
                                     description="Exact super jet-space bihamiltonian calculus.")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    verify = commands.add_parser("verify", parents=[common], help="run a scenario file")
    verify.add_argument("scenario", help="scenario JSON path, or a bundled name such as kdv")
    verify.add_argument("--udeg-bound", type=int, metavar="N",
                        help="u-degree bound for probes without their own")
    verify.add_argument("--json", metavar="OUT", help="write the JSON report here")
    verify.add_argument("--list", action="store_true", help="list the tasks without running them")
    verify.set_defaults(handler=cmd_verify)

    expr = commands.add_parser("expr", help="evaluate expressions")
    expr_commands = expr.add_subparsers(dest="expr_command", metavar="ACTION")
    expr_commands.required = True
    evaluate = expr_commands.add_parser("eval", parents=[common],
                                        help="print the canonical form of an expression")
    evaluate.add_argument("--n", type=int, required=True)
    evaluate.add_argument("text", metavar="EXPR")
    evaluate.set_defaults(handler=cmd_eval)
    bracket = expr_commands.add_parser("bracket", parents=[common],
                                       help="Schouten bracket of two local functionals")
    bracket.add_argument("--n", type=int, required=True)
    bracket.add_argument("p", metavar="P")
    bracket.add_argument("q", metavar="Q")
    bracket.set_defaults(handler=cmd_bracket)

    space = commands.add_parser("atlas", parents=[common], help="bidegree atlas of a space")
    space.add_argument("space", choices=sorted(SPACES))
    space.add_argument("--n", type=int, required=True)
    space.add_argument("--p-max", type=int, required=True)
    space.add_argument("--d-max", type=int, required=True)
    space.set_defaults(handler=cmd_atlas)

    window = commands.add_parser("window", parents=[common], help="vanishing-window lookup")
    window.add_argument("--n", type=int, required=True)
    window.add_argument("p", type=int)
    window.add_argument("d", type=int)
    window.set_defaults(handler=cmd_window)
    return parser


def _dump(data, out):
    print(json.dumps(data, sort_keys=True, indent=2), file=out)


def cmd_verify(args, out):
    if args.udeg_bound is not None:
        config.set("udeg_bound", args.udeg_bound)
    scenario = Scenario.from_file(args.scenario)
    if args.list:
        for name, task in scenario.inventory():
            print("%s\t%s" % (name, task), file=out)
        return EXIT_PASS
    report = run_scenario(scenario)
    for line in report.summary():
        print(line, file=out)
    if args.json:
        with open(args.json, "w") as stream:
            stream.write(report.to_json())
            stream.write("\n")
    return report.exit_code


def cmd_eval(args, out):
    print(to_text(parse_expr(args.text, n=args.n)), file=out)
    return EXIT_PASS


def _as_functional(value):
    if isinstance(value, DiffPoly):
        return LocalFunctional(value)
    if not isinstance(value, LocalFunctional):
        raise ValidationError("expected a local functional, got {kind}", kind=type(value).__name__)
    return value


def cmd_bracket(args, out):
    P = _as_functional(parse_expr(args.p, n=args.n))
    Q = _as_functional(parse_expr(args.q, n=args.n))
    print(schouten(P, Q).to_text(), file=out)
    return EXIT_PASS


def cmd_atlas(args, out):
    _dump(atlas(args.space, args.n, args.p_max, args.d_max).to_dict(), out)
    return EXIT_PASS


def cmd_window(args, out):
    n, p, d = args.n, args.p, args.d
    _dump({"n": n, "p": p, "d": d,
           "in_index_set": (p, d) in index_set(n),
           "vbh_guaranteed_zero": vbh_guaranteed_zero(n, p, d),
           "omega_lambda": omega_lambda_window(n, p, d),
           "cases": sorted(window_cases(n, p, d))}, out)
    return EXIT_PASS


def main(argv=None, out=None):
    """
    :param argv: arguments without the program name; sys.argv[1:] by default
    :param out: stream for results; sys.stdout by default
    :returns: the exit status
    """
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    jsonlog.configure(verbose=args.verbose, as_json=args.log_json)
    log.debug("command %s", args.command, extra={"argv": list(argv or sys.argv[1:])})
    try:
        if args.config:
            config.load(args.config)
        return args.handler(args, out)
    except (ValidationError, ParseError, IndexOutOfRange) as exc:
        print("superjet: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    except SuperjetError as exc:
        print("superjet: %s" % exc, file=sys.stderr)
        return EXIT_FAIL
    except (IOError, OSError) as exc:
        print("superjet: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
