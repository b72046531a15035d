"""Command-line interface.

Every subcommand accepts the experiment flags; a ``--config`` file of
``key=value`` lines is read first and the flags override it. Algorithmic
failures are reported in the output with exit code 0; configuration and
I/O errors exit with code 2.
"""

import argparse
import json
import sys
from typing import Dict, List, Optional

from qibo.config import log

from palettelab.decomposition import decompose
from palettelab.errors import PaletteLabError
from palettelab.graphcore import Family, regularize
from palettelab.harness.config import CONVERTERS, ExperimentConfig, load_config
from palettelab.harness.experiment import (
    cached_graph,
    estimate_threshold,
    instance,
    run_experiment,
    run_task,
)
from palettelab.harness.pipeline import draw_lists
from palettelab.harness.records import Mode
from palettelab.harness.solver import exact_list_colorable
from palettelab.palette import PaletteMode
from palettelab.rng import derive_seed
from palettelab.search import Strategy
from palettelab.serialize import dump_json, dumps_decomposition, dumps_graph

EXIT_ERROR = 2


def _common() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", help="key=value file, overridden by flags")
    graph = parser.add_argument_group("graph")
    graph.add_argument("--graph", choices=[f.value for f in Family])
    graph.add_argument("--n", type=int, help="vertex count")
    graph.add_argument("--d-degree", type=int, help="regularity degree D")
    graph.add_argument("--m-cliques", type=int, help="clique count")
    graph.add_argument("--graph-seed", type=int)
    graph.add_argument("--hybrid-mix", type=float)
    graph.add_argument("--graph-file", help="edge-list file of explicit-file graphs")
    lists = parser.add_argument_group("lists")
    lists.add_argument("--palette-mode", choices=[m.value for m in PaletteMode])
    lists.add_argument("--gamma-size", type=int, help="color universe size")
    lists.add_argument("--ell", type=int, nargs="+", help="absolute list sizes")
    lists.add_argument("--ell-factor", type=float, nargs="+", help="ell = c log n")
    params = parser.add_argument_group("parameters")
    params.add_argument("--delta", type=float)
    params.add_argument("--eps", type=float)
    params.add_argument("--b0", type=float)
    params.add_argument("--friend-slack", type=int)
    params.add_argument("--target-tol", type=float)
    params.add_argument("--spread-tol", type=float, help="retention spread, in units of D")
    run = parser.add_argument_group("run")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int, help="master seed")
    run.add_argument("--mode", choices=[m.value for m in Mode])
    run.add_argument("--jobs", type=int)
    run.add_argument("--out", help="output file")
    run.add_argument("--sparse-strategy", choices=[s.value for s in Strategy])
    run.add_argument("--budget", type=int, help="backtracking node budget")
    run.add_argument("--restarts", type=int)
    run.add_argument("--retries", type=int)
    run.add_argument(
        "--no-xi", dest="use_xi", action="store_const", const=False, default=None
    )
    run.add_argument("--timing", action="store_const", const=True, default=None)
    parser.add_argument("--verbose", "-v", action="store_true")
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="palettelab",
        description="Palette sparsification experiments on list coloring.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("gen", parents=[common], help="generate a graph")
    commands.add_parser(
        "decompose", parents=[common], help="sparse/dense decomposition of a graph"
    )
    commands.add_parser("color", parents=[common], help="one trial, printed as JSON")
    commands.add_parser(
        "experiment", parents=[common], help="trials over the list-size grid"
    )
    threshold = commands.add_parser(
        "threshold", parents=[common], help="estimate the success threshold c*"
    )
    threshold.add_argument("--target-rate", type=float, default=0.5)
    commands.add_parser(
        "oracle", parents=[common], help="exact list-colorability of one sample"
    )
    return parser


def options(args: argparse.Namespace) -> Dict:
    """Config-file options overridden by the given flags."""
    opts = dict(load_config(args.config)) if args.config else {}
    opts.update(
        {k: v for k, v in vars(args).items() if k in CONVERTERS and v is not None}
    )
    return opts


def _emit(text: str, config: ExperimentConfig):
    if config.out is None:
        sys.stdout.write(text)
    else:
        config.out.write_text(text)
        log.info("Written %s", config.out)


def _emit_json(record: dict, config: ExperimentConfig):
    if config.out is None:
        sys.stdout.write(json.dumps(record, indent=4, sort_keys=True) + "\n")
    else:
        dump_json(record, config.out)


def cmd_gen(config: ExperimentConfig):
    G = cached_graph(config.graph)
    _emit(dumps_graph(G), config)


def cmd_decompose(config: ExperimentConfig):
    G = cached_graph(config.graph)
    if not G.is_regular():
        G = regularize(G, G.D)
    dec = decompose(G, config.params.eps, config.params.friend_slack)
    if dec.audit is not None:
        log.info("Decomposition audit: %s", dec.audit.summary())
    _emit(dumps_decomposition(dec), config)


def cmd_color(config: ExperimentConfig):
    record = run_task((config, 0, config.grid.values[0], 0))
    _emit_json(record.to_dict(), config)


def cmd_experiment(config: ExperimentConfig):
    frame = run_experiment(config)
    if config.out is None:
        sys.stdout.write(frame.to_csv(index=False, float_format="%.10g"))


def cmd_threshold(config: ExperimentConfig, target_rate: float):
    estimate = estimate_threshold(config, target_rate)
    _emit_json(
        {
            "target_rate": target_rate,
            "c_star": estimate.c_star,
            "evaluations": [list(p) for p in estimate.evaluations],
            "non_monotone": estimate.non_monotone,
        },
        config,
    )


def cmd_oracle(config: ExperimentConfig):
    G, P = instance(config)
    ell = config.grid.ell(config.grid.values[0], G.n, P.D)
    seed = derive_seed(config.seed, 0, 0)
    lists = draw_lists(P, ell, seed)
    _emit_json(
        {
            "graph": config.graph.label,
            "ell": ell,
            "seed": seed,
            "colorable": exact_list_colorable(G, lists.L),
        },
        config,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        log.setLevel("DEBUG")
    try:
        config = ExperimentConfig.from_options(options(args))
        if args.command == "threshold":
            cmd_threshold(config, args.target_rate)
        else:
            COMMANDS[args.command](config)
    except (PaletteLabError, OSError) as error:
        print(f"palettelab: {error}", file=sys.stderr)
        return EXIT_ERROR
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "decompose": cmd_decompose,
    "color": cmd_color,
    "experiment": cmd_experiment,
    "oracle": cmd_oracle,
}
