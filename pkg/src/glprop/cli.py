"""Command-line interface.

Subcommands: synth, affinity, propagate, evaluate, distances, oracle.
All failures exit nonzero with a one-line JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .affinity import category_affinity, group_distance_report, similarity_matrix
from .dataio import (
    Dataset,
    load_affinity,
    load_dataset,
    save_affinity,
    save_dataset,
    _atomic_write,
    _rows_to_csv,
)
from .errors import GlpropError, InvalidConfig
from .model import CategorySet, IncidenceRecord
from .pipeline import (
    MODE_INITIAL,
    MODES,
    PipelineConfig,
    resolve_affinity,
    run_pipeline,
)
from .propagation import (
    MODE_GLP,
    MODE_LP,
    PropagationConfig,
    closed_form_partial_sum,
    compute_lambda,
    propagate,
    propagate_step,
)
from .synth import SynthConfig, synth_generate


def _write_json(path, payload) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        _atomic_write(path, text)


def _add_propagation_flags(parser):
    parser.add_argument("--mode", choices=MODES, default=MODE_GLP)
    parser.add_argument("--max-iter", type=int, default=100, help="iteration cap (default 100)")
    parser.add_argument("--tol", type=float, default=1e-9, help="convergence tolerance (default 1e-9)")
    parser.add_argument("--g-file", help="precomputed category affinity JSON (overrides incidence)")


def _load_g(args, dataset):
    if args.g_file:
        g, _ = load_affinity(args.g_file, dataset.categories)
        return g
    return None


def cmd_synth(args) -> int:
    config = SynthConfig(
        seed=args.seed,
        num_categories=args.categories,
        num_users=args.users,
        boards_per_user=(args.boards[0], args.boards[1]),
        pins_per_board=(args.pins[0], args.pins[1]),
        feature_dim=args.dim,
        cluster_spread=args.cluster_spread,
        board_spread=args.board_spread,
        prediction_noise=args.noise,
        category_correlation=args.correlation,
        incidence_users=args.incidence_users,
    )
    dataset = synth_generate(config)
    save_dataset(dataset, args.out)
    print(
        f"wrote {dataset.features.n} images / {len(dataset.users)} users / "
        f"{dataset.categories.k} categories to {args.out}"
    )
    return 0


def cmd_affinity(args) -> int:
    if args.data:
        dataset = load_dataset(args.data)
        records = dataset.incidence or dataset.incidence_from_users()
        categories = dataset.categories
        if not records:
            raise InvalidConfig(f"{args.data} has neither incidence records nor labeled boards")
    else:
        raise InvalidConfig("affinity needs --data")
    g = category_affinity(records, categories.k)
    save_affinity(g, categories, args.out)
    print(f"wrote {categories.k}x{categories.k} affinity from {len(records)} users to {args.out}")
    return 0


def cmd_propagate(args) -> int:
    dataset = load_dataset(args.data)
    users = dataset.users
    if args.user:
        users = [u for u in users if u.user_id == args.user]
        if not users:
            raise InvalidConfig(f"no user {args.user!r} in {args.data}")
    g = _load_g(args, dataset)
    if args.mode == MODE_GLP and g is None:
        g = resolve_affinity(dataset, PipelineConfig(mode=MODE_GLP))
    prop_config = PropagationConfig(
        max_iterations=args.max_iter,
        tolerance=args.tol,
        mode=MODE_LP if args.mode == MODE_LP else MODE_GLP,
    )

    header = ["image_id"] + [f"p{i}" for i in range(dataset.categories.k)]
    rows = []
    for user in users:
        idx = dataset.user_rows(user)
        y0 = dataset.initial_labels[idx]
        if args.mode == MODE_INITIAL:
            y = y0 / y0.sum(axis=1, keepdims=True)
        else:
            w = similarity_matrix(dataset.features.values[idx])
            result = propagate(y0, w, g, prop_config)
            y = result.y_final
            print(
                f"{user.user_id}: {result.iterations_run} iterations, "
                f"converged={result.converged}, final_delta={result.final_delta:.3e}"
            )
        for img, row in zip(user.image_ids, y):
            rows.append([img] + [repr(v) for v in row])
    _atomic_write(args.out, _rows_to_csv(header, rows))
    print(f"wrote {len(rows)} propagated label rows to {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    dataset = load_dataset(args.data)
    g = _load_g(args, dataset)
    modes = MODES if args.mode == "all" else (args.mode,)
    payload = {}
    for mode in modes:
        config = PipelineConfig(
            mode=mode,
            max_iterations=args.max_iter,
            tolerance=args.tol,
            prior=args.prior,
            affinity=g,
        )
        report = run_pipeline(dataset, config)
        payload[mode] = report.to_dict(dataset.categories)
        mean = "n/a" if report.ndcg_mean is None else f"{report.ndcg_mean:.4f}"
        std = "n/a" if report.ndcg_std is None else f"{report.ndcg_std:.4f}"
        acc = "n/a" if report.accuracy is None else f"{report.accuracy:.4f}"
        print(f"{mode:8s} ndcg mean {mean} std {std}  image accuracy {acc}")
    _write_json(args.out, payload if args.mode == "all" else payload[modes[0]])
    return 0


def cmd_distances(args) -> int:
    dataset = load_dataset(args.data)
    report = group_distance_report(dataset.features, dataset.users)
    payload = {
        dataset.categories.names[cat]: stats for cat, stats in report.items()
    }
    _write_json(args.out, payload)
    closer = sum(
        1
        for s in report.values()
        if s["within_board"] is not None
        and s["within_category"] is not None
        and s["within_board"] < s["within_category"]
    )
    comparable = sum(
        1
        for s in report.values()
        if s["within_board"] is not None and s["within_category"] is not None
    )
    print(f"within-board closer than within-category for {closer}/{comparable} categories")
    return 0


def cmd_oracle(args) -> int:
    """Check iterated updates against the closed-form series, either on
    random instances or on every user of a dataset."""
    checks = []
    if args.data:
        dataset = load_dataset(args.data)
        g = _load_g(args, dataset)
        if g is None:
            g = resolve_affinity(dataset, PipelineConfig(mode=MODE_GLP))
        for user in dataset.users:
            idx = dataset.user_rows(user)
            y0 = dataset.initial_labels[idx]
            w = similarity_matrix(dataset.features.values[idx])
            checks.append((user.user_id, y0, w, g))
    else:
        rng = np.random.default_rng(args.seed)
        for i in range(args.instances):
            n = int(rng.integers(2, 7))
            k = int(rng.integers(2, 5))
            w = rng.random((n, n)) + 1e-3
            w /= w.sum(axis=1, keepdims=True)
            g = rng.random((k, k)) + 1e-3
            g /= g.sum(axis=0, keepdims=True)
            y0 = rng.random((n, k)) + 1e-3
            checks.append((f"random-{i}", y0, w, g))

    worst = 0.0
    steps = sorted(set(args.steps))
    for name, y0, w, g in checks:
        lam = compute_lambda(y0)
        y = y0.copy()
        t = 0
        for target in steps:
            while t < target:
                y = propagate_step(y, y0, w, g, lam)
                t += 1
            reference = closed_form_partial_sum(y0, w, g, lam, target - 1)
            dev = float(np.abs(y - reference).max())
            worst = max(worst, dev)
    ok = worst <= args.tol
    payload = {
        "instances": len(checks),
        "steps": steps,
        "max_deviation": worst,
        "tolerance": args.tol,
        "ok": ok,
    }
    _write_json(args.out, payload)
    print(f"oracle max deviation {worst:.3e} over {len(checks)} instances (tol {args.tol:g})")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glprop",
        description="Group-constrained label propagation for user interest profiling",
    )
    parser.add_argument("--version", action="version", version=f"glprop {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a seeded synthetic dataset directory")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--categories", type=int, default=8)
    p.add_argument("--users", type=int, default=30)
    p.add_argument("--boards", type=int, nargs=2, default=(3, 6), metavar=("LO", "HI"))
    p.add_argument("--pins", type=int, nargs=2, default=(10, 30), metavar=("LO", "HI"))
    p.add_argument("--dim", type=int, default=12)
    p.add_argument("--cluster-spread", type=float, default=0.15)
    p.add_argument("--board-spread", type=float, default=0.05)
    p.add_argument("--noise", type=float, default=0.9)
    p.add_argument("--correlation", type=float, default=0.5)
    p.add_argument("--incidence-users", type=int, default=200)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("affinity", help="build the category affinity G from incidence records")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--out", required=True, help="output JSON path")
    p.set_defaults(func=cmd_affinity)

    p = sub.add_parser("propagate", help="propagate labels for one user or all users")
    p.add_argument("--data", required=True)
    p.add_argument("--user", help="restrict to a single user id")
    p.add_argument("--out", required=True, help="output CSV of propagated distributions")
    _add_propagation_flags(p)
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("evaluate", help="run the pipeline and report NDCG/recall/accuracy")
    p.add_argument("--data", required=True)
    p.add_argument("--out", default="-", help="report JSON path (default stdout)")
    p.add_argument("--prior", choices=("labels", "uniform"), default="labels")
    _add_propagation_flags(p)
    p.add_argument("--all-modes", dest="mode", action="store_const", const="all",
                   help="evaluate initial, lp and glp in one run")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("distances", help="within-board vs within-category distance report")
    p.add_argument("--data", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("oracle", help="verify the iteration against its closed-form series")
    p.add_argument("--data", help="check every user of a dataset instead of random instances")
    p.add_argument("--g-file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--steps", type=int, nargs="+", default=(1, 5, 20))
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GlpropError as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 2
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "OSError", "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
