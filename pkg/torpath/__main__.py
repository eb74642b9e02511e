import argparse
import contextlib
import logging
import os
import sys
import time
from typing import List, Optional

from .errors import ConfigurationError, TorPathError
from .harness.aggregate import METRICS
from .harness.runner import run_matrix
from .harness.scenarios import default_scenarios
from .network.params import ModelParameters
from .selection.kinds import STRATEGIES, StrategyKind
from .utils.cli import (ArgumentParser, EnumListAction, IntListAction, UsageError,
                        seed64, unit_interval)
from .utils.io import (CircuitLog, cell_table, circuit_log_path, dump_topology, gains_table,
                       matrix_table, ranking_table, read_results, summary_table,
                       trends_csv, write_csv, write_results)
from .utils.logger import setup_logging
from .utils.profiling import profiling

LOGGER = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
REPORT_FORMATS = ('summary', 'csv', 'matrix', 'gains', 'trends')


def _check_writable(filename: str):
    directory = os.path.dirname(os.path.abspath(filename))
    if not os.path.isdir(directory) or not os.access(directory, os.W_OK):
        raise OSError(f"cannot write to {filename}")


def cmd_run(args: argparse.Namespace) -> int:
    if args.config and not os.path.isfile(args.config):
        raise ConfigurationError(args.config, "no such config file")
    params = ModelParameters.from_yaml(args.config) if args.config else ModelParameters()
    selected = set(args.scenario or [s.scenario_id for s in default_scenarios()])
    scenarios = [s for s in default_scenarios() if s.scenario_id in selected]
    strategies = args.strategy or list(STRATEGIES)
    _check_writable(args.out)

    with contextlib.ExitStack() as stack:
        on_circuit = None
        if args.log_circuits:
            filename = circuit_log_path(args.out, args.log_circuits)
            LOGGER.info("logging circuits to %s", filename)
            stream = stack.enter_context(open(filename, 'w', encoding='utf-8', newline=''))
            on_circuit = CircuitLog(stream, args.log_circuits)
        on_topology = None
        if args.dump_topology:
            directory = args.dump_topology

            def on_topology(scenario, topology):
                dump_topology(topology, directory, scenario)

        tic = time.process_time()
        with profiling(args.trace_malloc, args.profile, "profile-run.stat"):
            report = run_matrix(scenarios, strategies, args.seed, args.scale, params,
                                on_circuit=on_circuit, on_topology=on_topology)
        toc = time.process_time()
        LOGGER.warning("evaluation duration: %.3f", toc - tic)

    write_results(report, args.out, with_timing=args.with_timing)
    print(cell_table(report))
    print()
    print(ranking_table(report))
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    report = read_results(args.results)
    if args.format == 'summary':
        print(summary_table(report))
    elif args.format == 'csv':
        write_csv(report, sys.stdout)
    elif args.format == 'matrix':
        print(matrix_table(report, args.metric))
    elif args.format == 'gains':
        print(gains_table(report, args.baseline))
    else:
        trends_csv(report, sys.stdout)
    return EXIT_OK


def cmd_scenarios(args: argparse.Namespace) -> int:
    print(f"{'scenario':>8} {'users':>9} {'relays':>7} {'circuits':>8} {'load':>6}  label")
    for scenario in default_scenarios():
        s = scenario.scaled(args.scale)
        print(f"{s.scenario_id:>8} {s.users:>9} {s.relays:>7} {s.circuits:>8} "
              f"{s.load_factor:>6.1f}  {s.label}")
    return EXIT_OK


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("-d", "--debug", help="activate debug logs",
                        action='store_const', dest="loglevel",
                        const=logging.DEBUG, default=logging.WARNING)
    common.add_argument("-v", "--verbose", help="activate verbose logs",
                        action='store_const', dest="loglevel",
                        const=logging.INFO, default=logging.WARNING)

    parser = ArgumentParser(prog="torpath", description="Tor path-selection benchmark")
    commands = parser.add_subparsers(dest='subcommand', required=True)

    run = commands.add_parser('run', parents=[common],
                              help="evaluate strategies over scenarios")
    run.set_defaults(command=cmd_run)
    run.add_argument("--scenario", help="scenario ids (repeatable, comma-separated)",
                     action=IntListAction, allowed=[s.scenario_id for s in default_scenarios()])
    run.add_argument("--strategy", help="strategy names (repeatable, comma-separated)",
                     type=StrategyKind, action=EnumListAction)
    run.add_argument("--seed", help="64-bit seed (default: %(default)s)",
                     type=seed64, default=42)
    run.add_argument("--scale", help="desk-scale multiplier in (0, 1] (default: %(default)s)",
                     type=unit_interval, default=1.0)
    run.add_argument("--out", help="results file (default: %(default)s)",
                     type=str, default="results.json")
    run.add_argument("--log-circuits", help="write per-circuit logs next to the results",
                     nargs='?', const='jsonl', default=None, choices=CircuitLog.FORMATS)
    run.add_argument("--config", help="YAML file of model parameter overrides", type=str)
    run.add_argument("--with-timing", help="include selection timing in the results",
                     action='store_true')
    run.add_argument("--dump-topology", metavar="DIR",
                     help="write each scenario's topology as JSON into DIR")
    run.add_argument("--trace-malloc", help="activate tracemalloc", action='store_true')
    run.add_argument("--profile", help="activate profiling", action='store_true')

    report = commands.add_parser('report', parents=[common],
                                 help="tabulate a results file")
    report.set_defaults(command=cmd_report)
    report.add_argument("results", help="results JSON file", type=str)
    report.add_argument("--format", choices=REPORT_FORMATS, default='summary',
                        help="output format (default: %(default)s)")
    report.add_argument("--metric", default='mean_efficiency', choices=METRICS,
                        help="metric of the matrix format (default: %(default)s)")
    report.add_argument("--baseline", type=StrategyKind.parse, default=StrategyKind.RANDOM,
                        help="baseline of the gains format (default: random)")

    scenarios = commands.add_parser('scenarios', parents=[common],
                                    help="print the scenario table")
    scenarios.set_defaults(command=cmd_scenarios)
    scenarios.add_argument("--scale", type=unit_interval, default=1.0,
                           help="desk-scale multiplier in (0, 1] (default: %(default)s)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    setup_logging(level=args.loglevel, without=['torpath.selection'])

    try:
        return args.command(args)
    except ConfigurationError as err:
        LOGGER.error("%s", err)
        return EXIT_USAGE
    except (TorPathError, OSError) as err:
        LOGGER.error("%s", err)
        return EXIT_RUNTIME


def main_entry():
    sys.exit(main())


if __name__ == '__main__':
    main_entry()
