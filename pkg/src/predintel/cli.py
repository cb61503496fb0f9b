"""Command-line interface: measure mazes and series, benchmark the pipeline,
generate datasets, and serve the interactive API.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import maze as maze_mod
from . import timeseries as ts
from .complexity import get_compressor, k_ratio
from .measure import combine_umwelts, intelligence, weighted_pm
from .report import (
    ResultRecord,
    RunConfig,
    UmweltReport,
    parse_config_text,
    run_bench,
    write_bench,
    write_result,
    write_series_csv,
)
from .types import ValidationError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4


class DataError(Exception):
    pass


def _load_world(spec: str) -> maze_mod.MazeWorld:
    if spec in maze_mod.BUILTIN_MAZES:
        return maze_mod.load_builtin(spec)
    path = Path(spec)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read maze file {spec}: {exc}") from exc
    try:
        return maze_mod.parse_maze(text, name=path.stem)
    except ValidationError as exc:
        raise DataError(f"{spec}: {exc}") from exc


def _measure_maze_umwelt(world, passes):
    table = maze_mod.TransitionTable()
    maze_mod.run_training_pass(world, table, passes)
    return maze_mod.evaluate(world, table), maze_mod.max_oracle(world)


def cmd_measure_maze(config: RunConfig) -> ResultRecord:
    """Train by full exploration passes, then score each maze and the
    combined set, agent against the best-possible statistical predictor."""
    if not config.mazes:
        raise ValidationError("measure-maze needs at least one maze (--mazes)")
    started = time.perf_counter()
    compressor = get_compressor(config.compressor)
    worlds = [_load_world(spec) for spec in config.mazes]

    if config.parallel and len(worlds) > 1:
        with ThreadPoolExecutor(max_workers=len(worlds)) as pool:
            evaluated = list(pool.map(lambda w: _measure_maze_umwelt(w, config.passes), worlds))
    else:
        evaluated = [_measure_maze_umwelt(w, config.passes) for w in worlds]

    reports = []
    agent_records, agent_pms, max_pms = [], [], []
    for world, (agent_rec, oracle_rec) in sorted(
        zip(worlds, evaluated), key=lambda pair: pair[0].name
    ):
        pm = weighted_pm(agent_rec, compressor, alpha=config.alpha)
        max_pm = weighted_pm(oracle_rec, compressor, alpha=config.alpha)
        reports.append(
            UmweltReport(
                umwelt_id=world.name,
                events=len(agent_rec.events),
                k_ratio=k_ratio(agent_rec.serialization, compressor),
                pm=pm,
                intelligence=intelligence(pm),
                max_pm=max_pm,
                max_intelligence=intelligence(max_pm),
            )
        )
        agent_records.append(agent_rec)
        agent_pms.append(pm)
        max_pms.append(max_pm)

    joint_factor, pm_total = combine_umwelts(agent_records, agent_pms, compressor)
    _, max_pm_total = combine_umwelts(agent_records, max_pms, compressor)
    return ResultRecord(
        command="measure-maze",
        config=config,
        compressor_id=compressor.algorithm_id,
        compressor_version=compressor.version,
        umwelts=reports,
        joint_factor=joint_factor,
        pm_total=pm_total,
        intelligence=intelligence(pm_total),
        max_pm_total=max_pm_total,
        max_intelligence=intelligence(max_pm_total),
        wall_clock_s=time.perf_counter() - started,
    )


def _resolve_dataset(spec: str, config: RunConfig) -> ts.SeriesDataset:
    if spec in ts.GENERATORS:
        if spec == "sine-trend":
            return ts.gen_sine_trend_noise(seed=config.seed)
        return ts.GENERATORS[spec]()
    path, _, column = spec.partition(":")
    try:
        return ts.load_csv(path, column or None, name=Path(path).stem)
    except ValidationError as exc:
        raise DataError(str(exc)) from exc


def _measure_series_umwelt(dataset, config: RunConfig):
    reg = ts.RegressorConfig(
        window=config.window,
        n_models=config.n_models,
        hidden_units=config.hidden_units,
        epochs=config.epochs,
        batch_size=config.batch_size,
        alpha=config.alpha,
        learning_rate=config.learning_rate,
    )
    seeds = tuple(config.seed + i for i in range(reg.n_models))
    models = ts.train_ensemble(dataset, reg, seeds)
    return ts.evaluate_series(dataset, models, reg)


def cmd_measure_series(config: RunConfig) -> ResultRecord:
    """Train an ensemble per dataset and score every window of each set,
    plus the combined all-datasets row."""
    if not config.datasets:
        raise ValidationError("measure-series needs at least one dataset (--data)")
    started = time.perf_counter()
    compressor = get_compressor(config.compressor)
    datasets = [_resolve_dataset(spec, config) for spec in config.datasets]
    names = [d.name for d in datasets]
    if len(set(names)) != len(names):
        raise ValidationError(f"duplicate dataset names: {names}")

    if config.parallel and len(datasets) > 1:
        with ThreadPoolExecutor(max_workers=len(datasets)) as pool:
            records = list(pool.map(lambda d: _measure_series_umwelt(d, config), datasets))
    else:
        records = [_measure_series_umwelt(d, config) for d in datasets]

    records.sort(key=lambda r: r.umwelt_id)
    reports, pms, max_pms = [], [], []
    for record in records:
        pm = weighted_pm(record, compressor, alpha=config.alpha)
        ratio = k_ratio(record.serialization, compressor)
        max_pm = ratio * len(record.events)  # perfect match per window
        reports.append(
            UmweltReport(
                umwelt_id=record.umwelt_id,
                events=len(record.events),
                k_ratio=ratio,
                pm=pm,
                intelligence=intelligence(pm),
                max_pm=max_pm,
                max_intelligence=intelligence(max_pm),
            )
        )
        pms.append(pm)
        max_pms.append(max_pm)

    joint_factor, pm_total = combine_umwelts(records, pms, compressor)
    _, max_pm_total = combine_umwelts(records, max_pms, compressor)
    return ResultRecord(
        command="measure-series",
        config=config,
        compressor_id=compressor.algorithm_id,
        compressor_version=compressor.version,
        umwelts=reports,
        joint_factor=joint_factor,
        pm_total=pm_total,
        intelligence=intelligence(pm_total),
        max_pm_total=max_pm_total,
        max_intelligence=intelligence(max_pm_total),
        wall_clock_s=time.perf_counter() - started,
    )


def cmd_gen_data(kind: str, n: int, seed: int, out: str, figure: bool = True):
    if kind not in ts.GENERATORS:
        raise ValidationError(f"unknown generator {kind!r}; choose from {sorted(ts.GENERATORS)}")
    if kind == "sine-trend":
        dataset = ts.gen_sine_trend_noise(n, seed)
    else:
        dataset = ts.GENERATORS[kind](n)
    return write_series_csv(dataset.values, out, render_figure=figure)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="predintel",
        description="Measure the predictive intelligence of the bundled maze "
        "and time-series agents.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure-maze", help="train and measure the maze agent")
    p.add_argument("--mazes", nargs="+", required=True,
                   help="built-in maze names and/or maze text files")
    p.add_argument("--passes", type=int, default=1,
                   help="full exploration training passes (0 = untrained)")
    p.add_argument("--compressor", default=None)
    p.add_argument("--out", default="results/maze")
    p.add_argument("--config", default=None, help="flat key=value config file")
    p.add_argument("--parallel", action="store_true")

    p = sub.add_parser("measure-series", help="train and measure the time-series agent")
    p.add_argument("--data", nargs="+", required=True,
                   help="dataset specs: line | sine | sine-trend | <file.csv>[:column]")
    p.add_argument("--config", default=None, help="flat key=value config file")
    p.add_argument("--compressor", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="results/series")
    p.add_argument("--parallel", action="store_true")

    p = sub.add_parser("bench", help="time the measurement pipeline")
    p.add_argument("--points", type=int, default=8)
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--base", type=int, default=250)
    p.add_argument("--out", default="results/bench")

    p = sub.add_parser("gen-data", help="write a generated dataset as CSV")
    p.add_argument("--kind", required=True, choices=sorted(ts.GENERATORS))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("serve", help="run the interactive steering service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--maze", default="t-maze", help="default maze for new sessions")
    return parser


def _config_from_args(args, command: str) -> RunConfig:
    base = RunConfig(command=command)
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read config file {args.config}: {exc}") from exc
        base = parse_config_text(text, command)
    overrides = {}
    if command == "measure-maze":
        overrides["mazes"] = tuple(args.mazes)
        overrides["passes"] = args.passes
    if command == "measure-series":
        overrides["datasets"] = tuple(args.data)
        if args.seed is not None:
            overrides["seed"] = args.seed
    if getattr(args, "compressor", None):
        overrides["compressor"] = args.compressor
    if getattr(args, "out", None):
        overrides["out"] = args.out
    if getattr(args, "parallel", False):
        overrides["parallel"] = True
    from dataclasses import replace

    return replace(base, **overrides)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "measure-maze":
            config = _config_from_args(args, "measure-maze")
            record = cmd_measure_maze(config)
            paths = write_result(record, config.out)
            _print_record(record, paths)
        elif args.command == "measure-series":
            config = _config_from_args(args, "measure-series")
            record = cmd_measure_series(config)
            paths = write_result(record, config.out)
            _print_record(record, paths)
        elif args.command == "bench":
            result = run_bench(points=args.points, runs=args.runs, base=args.base)
            paths = write_bench(result, args.out)
            per_second = 1.0 / result.slope_s_per_event
            print(f"linear fit R^2 = {result.r_squared:.4f}")
            print(f"throughput ~ {per_second:,.0f} predictions/s "
                  f"(a billion in ~{result.seconds_per_billion() / 3600:.2f} h)")
            print(f"wrote {paths['csv']} and {paths['png']}")
        elif args.command == "gen-data":
            kind = args.kind
            n = args.n if args.n is not None else (1000 if kind == "line" else 500)
            out = args.out or f"data/{kind}"
            paths = cmd_gen_data(kind, n, args.seed, out)
            print(f"wrote {paths['csv']}" + (f" and {paths['png']}" if "png" in paths else ""))
        elif args.command == "serve":
            from .service import serve

            default = args.maze
            if default not in maze_mod.BUILTIN_MAZES:
                default = _load_world(default)
            serve(host=args.host, port=args.port, default_maze=default)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # invariant violations and bugs
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def _print_record(record: ResultRecord, paths):
    width = max(len(u.umwelt_id) for u in record.umwelts) + 2
    print(f"{'umwelt':<{width}} {'events':>7} {'k_ratio':>8} {'PM':>10} {'I':>7} {'max I':>7}")
    for u in record.umwelts:
        print(
            f"{u.umwelt_id:<{width}} {u.events:>7} {u.k_ratio:>8.4f} "
            f"{u.pm:>10.3f} {u.intelligence:>7.3f} {u.max_intelligence:>7.3f}"
        )
    print(
        f"{'ALL':<{width}} {sum(u.events for u in record.umwelts):>7} "
        f"{record.joint_factor:>8.4f} {record.pm_total:>10.3f} "
        f"{record.intelligence:>7.3f} {record.max_intelligence:>7.3f}"
    )
    print(f"wrote {paths['json']}, {paths['csv']}, {paths['png']}")


if __name__ == "__main__":
    sys.exit(main())
