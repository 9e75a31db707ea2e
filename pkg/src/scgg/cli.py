"""Command-line front end: ``scgg {gen-data,train,complete,evaluate,sweep}``.

Logging verbosity comes from ``SCGG_LOG`` (quiet, info or debug).
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import baselines
from .checkpoint import load_checkpoint, save_checkpoint
from .evaluation import evaluate_completer, split_dataset, write_sweep_csv
from .graph import generate_grid, graph_stats, load_edge_list, save_edge_list
from .inference import complete, complete_greedy, make_completer
from .training import TrainConfig, train

logger = logging.getLogger("scgg")

_LOG_LEVELS = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


class UsageError(Exception):
    pass


def _setup_logging():
    level = os.environ.get("SCGG_LOG", "info").lower()
    if level not in _LOG_LEVELS:
        raise UsageError(f"SCGG_LOG must be one of {sorted(_LOG_LEVELS)}, got {level!r}")
    logging.basicConfig(level=_LOG_LEVELS[level], format="%(levelname)s %(name)s: %(message)s", force=True)


# -- config file ------------------------------------------------------------

def _coerce(name: str, raw: str):
    types = {f.name: f.type for f in dataclasses.fields(TrainConfig)}
    if name not in types:
        raise UsageError(f"unknown config key {name!r}")
    t = str(types[name])
    if "bool" in t:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"bad boolean for {name}: {raw!r}")
    if raw.lower() == "none":
        return None
    if "float" in t:
        return float(raw)
    return int(raw)


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment. Keys are TrainConfig fields."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key] = _coerce(key, val)
    return out


def parse_m_list(text: str) -> list[int]:
    """``1,2,5``, ``1-10`` or ``10:90:10`` (start:stop:step, inclusive)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            a, b, *c = (int(x) for x in part.split(":"))
            out.extend(range(a, b + 1, c[0] if c else 1))
        elif "-" in part:
            a, b = (int(x) for x in part.split("-"))
            out.extend(range(a, b + 1))
        else:
            out.append(int(part))
    if not out:
        raise UsageError("empty m-list")
    return out


# -- commands ---------------------------------------------------------------

def cmd_gen_data(args):
    (r_lo, r_hi), (c_lo, c_hi) = args.rows, args.cols
    if r_lo > r_hi or c_lo > c_hi or min(r_lo, c_lo) < 1:
        raise UsageError("empty or non-positive dimension range")
    if args.count < 0:
        raise UsageError("count must be non-negative")
    rng = np.random.default_rng(args.seed)
    graphs = [generate_grid(int(rng.integers(r_lo, r_hi + 1)), int(rng.integers(c_lo, c_hi + 1)))
              for _ in range(args.count)]
    save_edge_list(graphs, args.out)
    st = graph_stats(graphs)
    print(f"min_nodes={st['min_nodes']} max_nodes={st['max_nodes']} avg_nodes={st['avg_nodes']:.2f} "
          f"std_nodes={st['std_nodes']:.2f} avg_sparsity={st['avg_sparsity']:.2f} num_graphs={st['num_graphs']}")


def cmd_train(args):
    values = read_config(args.config) if args.config else {}
    overrides = {"m": args.m, "epochs": args.epochs, "batch_size": args.batch_size,
                 "learning_rate": args.lr, "m_max": args.m_max}
    values.update({k: v for k, v in overrides.items() if v is not None})
    values["seed"] = args.seed
    if "m" not in values:
        raise UsageError("m must be given in the config file or with --m")
    try:
        cfg = TrainConfig(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    graphs = load_edge_list(args.data)
    ckpt = train(graphs, cfg)
    save_checkpoint(ckpt, args.out)
    print(f"final_loss={ckpt.loss_history[-1]:.6f} epochs={ckpt.epoch} checkpoint={args.out}")


def cmd_complete(args):
    ckpt = load_checkpoint(args.checkpoint)
    rng = np.random.default_rng(args.seed)
    outputs = []
    for k, g0 in enumerate(load_edge_list(args.g0)):
        if args.greedy:
            outputs.append(complete_greedy(g0, args.m, ckpt))
        else:
            g, trace = complete(g0, args.m, ckpt, rng)
            outputs.append(g)
            if args.trace:
                trace.to_csv(Path(args.trace).with_suffix(f".{k}.csv"))
    save_edge_list(outputs, args.out)
    print(f"completed {len(outputs)} graph(s) -> {args.out}")


def _completer_for(args):
    if (args.checkpoint is None) == (args.baseline is None):
        raise UsageError("give exactly one of --checkpoint or --baseline")
    if args.baseline:
        return args.baseline, baselines.BASELINES[args.baseline]
    return "scgg", make_completer(load_checkpoint(args.checkpoint), greedy=args.greedy)


def _test_split(args):
    graphs = load_edge_list(args.data)
    if args.no_split:
        return graphs
    _, test = split_dataset(graphs, train_frac=args.train_frac, seed=args.seed)
    return test


def cmd_evaluate(args):
    name, completer = _completer_for(args)
    test = _test_split(args)
    report = evaluate_completer(completer, test, args.m, repetitions=args.repetitions, seed=args.seed)
    report.to_csv(args.out)
    print(f"method={name} m={args.m} mean_ged={report.aggregate_mean:.6f} std_ged={report.aggregate_std:.6f}")


def _checkpoint_for_m(ckpts, m):
    exact = [c for c in ckpts if c.config.m == m]
    if exact:
        return exact[0]
    fit = [c for c in ckpts if c.m_max >= m]
    return fit[0] if fit else None


def cmd_sweep(args):
    m_list = parse_m_list(args.m_list)
    ckpts = [load_checkpoint(p) for p in (args.checkpoint or [])]
    methods = list(args.baseline or [])
    if not ckpts and not methods:
        raise UsageError("sweep needs at least one --checkpoint or --baseline")
    test = _test_split(args)
    dataset = args.dataset or Path(args.data).stem
    ids = list(range(len(test)))
    rows = []
    for m in m_list:
        sized = [(i, g) for i, g in zip(ids, test) if g.num_nodes > m]
        if len(sized) < len(test):
            logger.warning("m=%d: skipping %d graph(s) with <= m nodes", m, len(test) - len(sized))
        if not sized:
            continue
        gids, graphs = [i for i, _ in sized], [g for _, g in sized]
        runs = []
        if ckpts:
            ck = _checkpoint_for_m(ckpts, m)
            if ck is None:
                logger.warning("m=%d exceeds every checkpoint's capacity; skipping scgg", m)
            else:
                runs.append(("scgg", make_completer(ck, greedy=args.greedy)))
        runs.extend((b, baselines.BASELINES[b]) for b in methods)
        for method, completer in runs:
            rep = evaluate_completer(completer, graphs, m, repetitions=args.repetitions,
                                     seed=args.seed, graph_ids=gids)
            rows.append({"dataset": dataset, "m": m, "method": method,
                         "mean_ged": rep.aggregate_mean, "std_ged": rep.aggregate_std})
            logger.info("m=%d %s mean=%.4f std=%.4f", m, method, rep.aggregate_mean, rep.aggregate_std)
    write_sweep_csv(rows, args.out)
    if not args.no_plot and rows:
        from .plotting import save_sweep_plot
        png = save_sweep_plot(rows, Path(args.out).with_suffix(".png"), title=dataset)
        print(f"plot -> {png}")
    print(f"wrote {len(rows)} row(s) -> {args.out}")


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scgg", description="Structure-conditioned graph completion.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="write a synthetic grid dataset")
    g.add_argument("--kind", choices=["grid"], default="grid")
    g.add_argument("--rows", type=int, nargs=2, metavar=("LO", "HI"), default=(5, 19))
    g.add_argument("--cols", type=int, nargs=2, metavar=("LO", "HI"), default=(5, 19))
    g.add_argument("--count", type=int, default=225)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_data)

    t = sub.add_parser("train", help="train a model on an edge-list dataset")
    t.add_argument("--data", required=True)
    t.add_argument("--config")
    t.add_argument("--out", required=True)
    t.add_argument("--seed", type=int, required=True)
    t.add_argument("--m", type=int)
    t.add_argument("--m-max", type=int)
    t.add_argument("--epochs", type=int)
    t.add_argument("--batch-size", type=int)
    t.add_argument("--lr", type=float)
    t.set_defaults(func=cmd_train)

    c = sub.add_parser("complete", help="complete every graph in an edge-list file")
    c.add_argument("--checkpoint", required=True)
    c.add_argument("--g0", required=True)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--greedy", action="store_true")
    c.add_argument("--trace", help="write per-step CSV traces using this path as a stem")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_complete)

    for name, func, hlp in (("evaluate", cmd_evaluate, "score one method on the test split"),
                            ("sweep", cmd_sweep, "score methods over a list of m values")):
        e = sub.add_parser(name, help=hlp)
        e.add_argument("--data", required=True)
        e.add_argument("--seed", type=int, required=True)
        e.add_argument("--repetitions", type=int, default=10)
        e.add_argument("--greedy", action="store_true")
        e.add_argument("--train-frac", type=float, default=0.8)
        e.add_argument("--no-split", action="store_true", help="score every graph in --data")
        e.add_argument("--out", required=True)
        if name == "evaluate":
            e.add_argument("--checkpoint")
            e.add_argument("--baseline", choices=sorted(baselines.BASELINES))
            e.add_argument("--m", type=int, required=True)
        else:
            e.add_argument("--checkpoint", action="append")
            e.add_argument("--baseline", action="append", choices=sorted(baselines.BASELINES))
            e.add_argument("--m-list", required=True)
            e.add_argument("--dataset")
            e.add_argument("--no-plot", action="store_true")
        e.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _setup_logging()
        args.func(args)
    except UsageError as exc:
        print(f"scgg: usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        logger.debug("failure", exc_info=True)
        print(f"scgg: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
