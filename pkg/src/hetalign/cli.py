""" Command line entry point.

Subcommands:

* `run`: train on a source graph and classify a target graph.
* `reconstruct`: write the homophilic and heterophilic structures of a graph as edge lists.
* `homophily`: print the hop homophily of a graph for `l = 1..L`.
* `sweep`: grid over `mu1`, `mu2` and `l`, one metrics file per run.
"""

from .common import logger
from .common.exception import (
    HetalignError,
    InvalidSetting,
    NumericalAbort,
    PipelineError,
    ReconstructionError,
)
from .graph import Graph
from .io import (
    align_feature_dims,
    generate_synthetic,
    load_graph_dir,
    parse_synthetic_spec,
    write_metrics,
    write_structure,
)
from .pipeline import format_report, homophily_report, run_transfer
from .reconstruct import reconstruct_structures
from .setup import ABLATION_TAGS, RunConfig, task_config

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
import argparse
import itertools
import logging
import statistics
import sys

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    """Argument parser exiting with the usage error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _number_list(kind):
    def parse(text: str) -> list:
        try:
            return [kind(v) for v in text.split(",") if v.strip()]
        except ValueError as e:
            raise argparse.ArgumentTypeError(f"invalid list '{text}'") from e

    return parse


def _add_config_arguments(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("configuration")
    group.add_argument("--task", help="Shipped task, e.g. 'CO->WI', supplying mu1, mu2 and l.")
    group.add_argument("--l", type=int, help="Hop order of the homophilic reconstruction.")
    group.add_argument("--k", type=int, help="Filter order (defaults to l).")
    group.add_argument("--mu1", type=float, help="Weight of the reconstruction loss.")
    group.add_argument("--mu2", type=float, help="Weight of the alignment loss.")
    group.add_argument("--beta", type=float, help="Exponent of the scaled cosine error.")
    group.add_argument("--mu-ce", type=float, help="Weight of the source classifier loss.")
    group.add_argument("--lr", type=float, help="Learning rate.")
    group.add_argument("--weight-decay", type=float, help="Weight decay.")
    group.add_argument("--epochs", type=int, help="Training epochs.")
    group.add_argument("--seed", type=int, help="Run seed.")
    group.add_argument("--ablation", choices=ABLATION_TAGS, help="Ablation variant.")
    group.add_argument("--topk", type=int, help="Heterophilic edges kept per node.")
    group.add_argument("--outer-iters", type=int, help="Homophilic solver alternations.")
    group.add_argument(
        "--loose-ranges",
        action="store_true",
        help="Accept learning rates and weight decays outside the tuned ranges.",
    )


def _add_pair_arguments(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("graphs")
    group.add_argument("--source-dir", type=Path, help="Source dataset directory.")
    group.add_argument("--target-dir", type=Path, help="Target dataset directory.")
    group.add_argument("--synthetic-src", help="Synthetic source, e.g. 'n=500,h=0.8,seed=1'.")
    group.add_argument("--synthetic-tgt", help="Synthetic target, e.g. 'n=500,h=0.2,seed=2'.")
    group.add_argument("--source-declared", help="Declared statistics to validate the source.")
    group.add_argument("--target-declared", help="Declared statistics to validate the target.")


def _add_graph_arguments(parser: argparse.ArgumentParser):
    group = parser.add_argument_group("graph")
    group.add_argument("--graph-dir", type=Path, help="Dataset directory.")
    group.add_argument("--synthetic", help="Synthetic graph, e.g. 'n=500,h=0.4'.")
    group.add_argument("--declared", help="Declared statistics to validate against.")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hetalign", description=__doc__.splitlines()[0].strip())
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging.")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings only.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = commands.add_parser("run", help="Train on a source graph, classify a target graph.")
    _add_pair_arguments(run)
    _add_config_arguments(run)
    run.add_argument("--out", type=Path, help="Metrics file (JSON, plus a .txt record).")

    reconstruct = commands.add_parser("reconstruct", help="Write reconstructed structures.")
    _add_graph_arguments(reconstruct)
    _add_config_arguments(reconstruct)
    reconstruct.add_argument("--out-dir", type=Path, required=True, help="Output directory.")
    reconstruct.add_argument("--max-hop", type=int, default=1, help="Largest l reported.")

    homophily = commands.add_parser("homophily", help="Print hop homophily for l = 1..L.")
    _add_graph_arguments(homophily)
    homophily.add_argument("--max-hop", type=int, default=4, help="Largest l reported.")

    sweep = commands.add_parser("sweep", help="Grid over mu1, mu2 and l.")
    _add_pair_arguments(sweep)
    _add_config_arguments(sweep)
    sweep.add_argument("--mu1-grid", type=_number_list(float), default=[0.1, 0.5, 1.0])
    sweep.add_argument("--mu2-grid", type=_number_list(float), default=[0.1, 0.5, 1.0])
    sweep.add_argument("--l-grid", type=_number_list(int), default=[1, 2, 3, 4])
    sweep.add_argument("--seeds", type=_number_list(int), default=[0])
    sweep.add_argument("--workers", type=int, default=1, help="Parallel runs.")
    sweep.add_argument("--out-dir", type=Path, required=True, help="Output directory.")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Run configuration: shipped task settings (or defaults) overridden by explicit flags."""
    cfg = task_config(args.task) if args.task else RunConfig()
    weights = {
        name: value
        for name, value in (
            ("mu1", args.mu1),
            ("mu2", args.mu2),
            ("beta", args.beta),
            ("mu_ce", args.mu_ce),
        )
        if value is not None
    }
    overrides = {
        name: getattr(args, name)
        for name in (
            "l",
            "k",
            "lr",
            "weight_decay",
            "epochs",
            "seed",
            "ablation",
            "topk",
            "outer_iters",
        )
        if getattr(args, name) is not None
    }
    cfg = replace(
        cfg,
        weights=replace(cfg.weights, **weights),
        strict_ranges=not args.loose_ranges,
        **overrides,
    )
    cfg.validate()
    return cfg


def _load_graph(
    directory: Path | None, synthetic: str | None, declared: str | None, role: str
) -> Graph:
    if (directory is None) == (synthetic is None):
        raise InvalidSetting(
            f"Give exactly one of a directory or a synthetic spec for the {role}."
        )
    if synthetic is not None:
        return generate_synthetic(parse_synthetic_spec(synthetic))
    return load_graph_dir(directory, declared).graph


def _load_pair(args: argparse.Namespace) -> tuple[Graph, Graph]:
    source = _load_graph(args.source_dir, args.synthetic_src, args.source_declared, "source")
    target = _load_graph(args.target_dir, args.synthetic_tgt, args.target_declared, "target")
    return align_feature_dims(source, target)


def _run(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    source, target = _load_pair(args)
    metrics = run_transfer(source, target, cfg)
    if args.out is not None:
        json_path, record_path = write_metrics(args.out, metrics)
        logger.info(f"Wrote {json_path} and {record_path}.")
    accuracy = "n/a" if metrics.final_accuracy is None else f"{metrics.final_accuracy:.4f}"
    print(f"final_accuracy: {accuracy}")
    return EXIT_OK


def _reconstruct(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    g = _load_graph(args.graph_dir, args.synthetic, args.declared, "graph")
    structures = reconstruct_structures(g, cfg.solve_config(), cfg.topk, cfg.dense_limit)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_structure(args.out_dir / "a_o.txt", structures.a_o)
    write_structure(args.out_dir / "a_e.txt", structures.a_e)
    logger.info(f"Wrote structures to {args.out_dir}.")
    if g.labels is not None:
        print(format_report(homophily_report(g, structures, args.max_hop, cfg.topk)))
    return EXIT_OK


def _homophily(args: argparse.Namespace) -> int:
    g = _load_graph(args.graph_dir, args.synthetic, args.declared, "graph")
    print(format_report(homophily_report(g, None, args.max_hop)))
    return EXIT_OK


def _sweep_job(source: Graph, target: Graph, cfg: RunConfig, path: Path) -> float | None:
    metrics = run_transfer(source, target, cfg)
    write_metrics(path, metrics)
    return metrics.final_accuracy


def _sweep(args: argparse.Namespace) -> int:
    base = config_from_args(args)
    source, target = _load_pair(args)
    args.out_dir.mkdir(parents=True, exist_ok=True)

    grid = list(itertools.product(args.mu1_grid, args.mu2_grid, args.l_grid))
    jobs = []
    for (mu1, mu2, l), seed in itertools.product(grid, args.seeds):
        cfg = replace(
            base, l=l, seed=seed, weights=replace(base.weights, mu1=mu1, mu2=mu2)
        )
        cfg.validate()
        path = args.out_dir / f"mu1={mu1:g}_mu2={mu2:g}_l={l}_seed={seed}.json"
        jobs.append(((mu1, mu2, l), cfg, path))
    logger.info(f"Sweeping {len(jobs)} runs with {args.workers} worker(s).")

    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            futures = [pool.submit(_sweep_job, source, target, cfg, path) for _, cfg, path in jobs]
            accuracies = [f.result() for f in futures]
    else:
        accuracies = [_sweep_job(source, target, cfg, path) for _, cfg, path in jobs]

    by_point: dict[tuple, list[float]] = {point: [] for point in grid}
    for (point, _, _), accuracy in zip(jobs, accuracies):
        if accuracy is not None:
            by_point[point].append(accuracy)
    print(f"{'mu1':>6} {'mu2':>6} {'l':>3} {'accuracy':>9}")
    for (mu1, mu2, l), values in by_point.items():
        mean = f"{statistics.fmean(values):.4f}" if values else "n/a"
        print(f"{mu1:>6g} {mu2:>6g} {l:>3} {mean:>9}")
    return EXIT_OK


def exit_code(error: BaseException) -> int:
    """Exit code of an error, looking through pipeline stage wrappers."""
    while isinstance(error, PipelineError) and error.__cause__ is not None:
        error = error.__cause__
    match error:
        case InvalidSetting():
            return EXIT_USAGE
        case NumericalAbort() | ReconstructionError() | FloatingPointError():
            return EXIT_NUMERICAL
        case _:
            return EXIT_DATA


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    if args.verbose:
        logger.setLevel(logging.DEBUG)
    elif args.quiet:
        logger.setLevel(logging.WARNING)

    handlers = {
        "run": _run,
        "reconstruct": _reconstruct,
        "homophily": _homophily,
        "sweep": _sweep,
    }
    try:
        return handlers[args.command](args)
    except HetalignError as e:
        logger.error(str(e))
        return exit_code(e)
    except OSError as e:
        logger.error(f"Cannot write output: {e}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
