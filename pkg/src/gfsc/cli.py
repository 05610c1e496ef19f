"""Command-line entry point ``gfsc``."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness
from .eig import decompose
from .embed import DEFAULT_BISECT_ITERS
from .graph import DEFAULT_DENSE_LIMIT, laplacian, read_edgelist, write_edgelist
from .polyfilter import design
from .rng import GRAPH
from .sbm import SimplifiedSbm, sample_adjacency


def parse_seeds(text: str):
    """``a..b`` (inclusive) or a comma-separated list."""
    if ".." in text:
        a, b = text.split("..")
        a, b = int(a), int(b)
        if b < a:
            raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
        return list(range(a, b + 1))
    return [int(t) for t in text.split(",") if t]


def parse_ints(text: str):
    """Comma list or ``a..b`` range of integers."""
    return parse_seeds(text)


def _model_args(p):
    g = p.add_argument_group("graph")
    g.add_argument("--k", type=int)
    g.add_argument("--s", type=int, help="vertices per block")
    g.add_argument("--q", type=float, default=0.3)
    g.add_argument("--r", type=float, default=0.1)
    g.add_argument("--edges", help="edge-list file instead of a sampled model")
    g.add_argument("--labels", help="true block labels for --edges, one per line")
    g.add_argument("--dense-limit", type=int, default=DEFAULT_DENSE_LIMIT)


def _trial_args(p):
    t = p.add_argument_group("trial")
    t.add_argument("--seeds", type=parse_seeds)
    t.add_argument("--trials", type=int, help="shorthand for --seeds 0..t-1")
    t.add_argument("--poly-order", type=int, default=125)
    t.add_argument("--lambda-cut", type=float, help="skip estimation and use this cut")
    t.add_argument("--epsilon1", type=float)
    t.add_argument("--beta", type=float, default=1.0)
    t.add_argument("--epsilon2", type=float, default=0.5)
    t.add_argument("--embed-dim", type=int)
    t.add_argument("--bisect-iters", type=int, default=DEFAULT_BISECT_ITERS)
    t.add_argument("--kmeans-restarts", type=int, default=10)
    t.add_argument("--kmeans-max-iter", type=int, default=300)
    t.add_argument("--with-oracle-metrics", action="store_true")
    t.add_argument("--timing", action="store_true", help="fill the wall_time_ms column")
    t.add_argument("--jobs", type=int, default=1)
    t.add_argument("--backend", choices=("compiled", "python"))
    t.add_argument("--out", help="CSV path (stdout when omitted)")


def build_parser():
    ap = argparse.ArgumentParser(prog="gfsc", description=(
        "Spectral clustering of block-model graphs through polynomial graph filtering."))
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a simplified block model to an edge list")
    _model_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--labels-out")

    for name, helptext in (("cluster-exact", "eigenvector baseline"),
                           ("cluster-compressive", "filtered random signals")):
        p = sub.add_parser(name, help=helptext)
        _model_args(p)
        _trial_args(p)
        p.add_argument("--dump-coeffs", help="write the filter coefficients of the first trial")

    p = sub.add_parser("sweep-n", help="rate against n for several filter orders")
    _model_args(p)
    _trial_args(p)
    p.add_argument("--n-list", type=parse_ints, default=[256, 512, 1024, 2048])
    p.add_argument("--p-list", type=parse_ints, default=[5, 25, 125])

    p = sub.add_parser("sweep-poly", help="rate against filter error at fixed n")
    _model_args(p)
    _trial_args(p)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--p-range", type=parse_ints, default=list(range(5, 26)))
    p.add_argument("--trials-out", help="also write the per-trial CSV here")

    p = sub.add_parser("spectrum", help="dense eigenvalues of a sampled or loaded graph")
    _model_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump-spectrum", required=True, help="one eigenvalue per line")
    return ap


def _model(args, n=None):
    if args.edges:
        return None
    if args.k is None:
        raise SystemExit("--k is required")
    if n is not None:
        if n % args.k:
            raise SystemExit(f"n={n} is not a multiple of k={args.k}")
        return SimplifiedSbm(args.k, n // args.k, args.q, args.r)
    if args.s is None:
        raise SystemExit("--s is required without --edges")
    return SimplifiedSbm(args.k, args.s, args.q, args.r)


def _config(args, algorithm, model):
    return harness.TrialConfig(
        model=model, edges=args.edges, labels=args.labels,
        k=args.k if args.edges else None, algorithm=algorithm,
        p=args.poly_order, lambda_cut=args.lambda_cut, embed_dim=args.embed_dim,
        epsilon1=args.epsilon1, beta=args.beta, epsilon2=args.epsilon2,
        bisect_iters=args.bisect_iters, kmeans_restarts=args.kmeans_restarts,
        kmeans_max_iter=args.kmeans_max_iter,
        with_oracle_metrics=args.with_oracle_metrics, dense_limit=args.dense_limit,
        timing=args.timing, backend=args.backend)


def _seeds(args):
    if args.seeds is not None and args.trials is not None:
        raise SystemExit("give --seeds or --trials, not both")
    if args.trials is not None:
        return list(range(args.trials))
    return args.seeds if args.seeds is not None else [0]


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _graph(args, model, seed):
    if args.edges:
        return read_edgelist(args.edges)
    return sample_adjacency(model.population(), (seed, model.n, GRAPH, 0))


def cmd_generate(args):
    model = _model(args)
    graph = _graph(args, model, args.seed)
    write_edgelist(graph, args.out, k=model.k)
    if args.labels_out:
        np.savetxt(args.labels_out, model.membership().labels, fmt="%d")


def cmd_cluster(args, algorithm):
    config = _config(args, algorithm, _model(args))
    seeds = _seeds(args)
    records = harness.run_trials([(config, s) for s in seeds], args.jobs, cache={})
    _emit(harness.records_csv(records), args.out)
    if args.out:
        harness.write_meta(args.out + ".meta.json", config, {"seeds": seeds})
    if args.dump_coeffs and algorithm == "compressive":
        design(records[0].lambda_hat, config.p).to_csv(args.dump_coeffs)


def cmd_sweep_n(args):
    base = _config(args, "compressive", _model(args, args.n_list[0]))
    seeds = _seeds(args)
    records = harness.sweep_n(base, args.n_list, args.p_list, seeds, args.jobs)
    _emit(harness.records_csv(records), args.out)
    if args.out:
        harness.write_meta(args.out + ".meta.json", base,
                           {"seeds": seeds, "n_list": args.n_list, "p_list": args.p_list})


def cmd_sweep_poly(args):
    base = _config(args, "compressive", _model(args, args.n))
    seeds = _seeds(args)
    records, summary = harness.sweep_poly(base, args.p_range, seeds, args.jobs)
    _emit(harness.summary_csv(summary), args.out)
    if args.trials_out:
        _emit(harness.records_csv(records), args.trials_out)
    if args.out:
        harness.write_meta(args.out + ".meta.json", base,
                           {"seeds": seeds, "p_range": args.p_range})


def cmd_spectrum(args):
    model = _model(args)
    lap = laplacian(_graph(args, model, args.seed), args.dense_limit)
    eig = decompose(lap, dense_limit=args.dense_limit)
    with open(args.dump_spectrum, "w") as fh:
        for lam in eig.eigenvalues:
            fh.write(f"{float(lam)!r}\n")


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "generate":
        cmd_generate(args)
    elif args.command == "cluster-exact":
        cmd_cluster(args, "exact")
    elif args.command == "cluster-compressive":
        cmd_cluster(args, "compressive")
    elif args.command == "sweep-n":
        cmd_sweep_n(args)
    elif args.command == "sweep-poly":
        cmd_sweep_poly(args)
    elif args.command == "spectrum":
        cmd_spectrum(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
