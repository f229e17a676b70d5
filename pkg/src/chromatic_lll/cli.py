"""Command-line interface: one binary, subcommand per operation, JSON out.

The data document goes to stdout as compact JSON with sorted keys, so a
fixed configuration (seed included) reproduces it byte for byte; timings
and warnings go to stderr as diagnostics.  Exit codes: 0 success, 1
algorithmic failure (budget, infeasibility, resample limit), 2 usage
error (bad flags, unreadable or malformed instance file).

The environment variable CHROMATIC_LLL_NODE_BUDGET overrides the coupling
tree node cap for the subcommands that build trees.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from typing import Any

import numpy as np

from . import __version__
from .counter import count as run_count
from .coupling import DEFAULT_NODE_BUDGET, build_tree, run_coupling
from .errors import ChromaticError, ParseError
from .graphtools import enumerate_23trees, line_graph
from .instance import Instance, parse_instance
from .lll import DEFAULT_MAX_RESAMPLES, good_base_colouring, moser_tardos
from .lp import CachingMarginalEstimator, estimate_marginal
from .oracle import (
    DEFAULT_ENUM_BUDGET,
    ConditionalCounter,
    exact_count,
    exact_marginal,
    exact_sample,
)
from .params import (
    AlgoParams,
    default_params,
    regime_check,
    t_star_default,
)
from .sampler import sample as run_sample

ENV_NODE_BUDGET = "CHROMATIC_LLL_NODE_BUDGET"


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


def _emit(args: argparse.Namespace, payload: dict[str, Any], started: float) -> None:
    config = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func",) and not k.startswith("_")
    }
    doc = {"tool_version": __version__, "config_echo": config, **payload}
    sys.stdout.write(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")
    wall_ms = int((time.monotonic() - started) * 1000)
    _diag(json.dumps({"wall_ms": wall_ms}))


def _load(path: str) -> Instance:
    try:
        with open(path, "rb") as fh:
            return parse_instance(fh.read())
    except OSError as exc:
        raise SystemExit(f"cannot read instance file: {exc}")
    except ParseError as exc:
        raise SystemExit(f"malformed instance file: {exc}")


def _node_budget(args: argparse.Namespace) -> int:
    env = os.environ.get(ENV_NODE_BUDGET)
    if env is not None:
        return int(env)
    return getattr(args, "node_budget", None) or DEFAULT_NODE_BUDGET


def _rng(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng([seed, *path])


def _params_for(
    inst: Instance, args: argparse.Namespace, mode: str, eps: float
) -> AlgoParams:
    k = inst.k_max if inst.edges else 3
    delta = max(inst.delta, 1)
    base = default_params(k, delta, mode, eps=min(eps, 0.99))
    k1 = args.k1 if getattr(args, "k1", None) is not None else base.k1
    k2 = args.k2 if getattr(args, "k2", None) is not None else base.k2
    beta = Fraction(args.beta) if getattr(args, "beta", None) else base.beta
    t_star = args.tstar if getattr(args, "tstar", None) is not None else base.t_star
    depth = args.depth if getattr(args, "depth", None) is not None else base.L
    if inst.edges and k < 28:
        _diag(
            f"warning: k={k} is below the guaranteed regime (k >= 28); "
            "parameters are desk-scale"
        )
    formula = t_star_default(k, delta, beta)
    if t_star < formula * (1 - 1e-9):
        _diag(
            f"warning: t_star={t_star:g} below the settled value {formula:g}; "
            "the decay constraints lose their guarantee"
        )
    return AlgoParams(k1=k1, k2=k2, beta=beta, t_star=t_star, L=depth, mode=mode)


def _cmd_oracle_count(args: argparse.Namespace, started: float) -> None:
    inst = _load(args.instance)
    _emit(args, {"count": exact_count(inst, args.budget)}, started)


def _cmd_oracle_marginal(args: argparse.Namespace, started: float) -> None:
    inst = _load(args.instance)
    m = exact_marginal(inst, args.vertex, args.colour, args.budget)
    _emit(
        args,
        {
            "marginal": {"num": m.numerator, "den": m.denominator},
            "value": float(m),
        },
        started,
    )


def _cmd_oracle_sample(args: argparse.Namespace, started: float) -> None:
    inst = _load(args.instance)
    samples = [
        list(exact_sample(inst, _rng(args.seed, i), args.budget))
        for i in range(args.samples)
    ]
    _emit(args, {"samples": samples}, started)


def _cmd_find_colouring(args: argparse.Namespace, started: float) -> None:
    inst = _load(args.instance)
    sigma = moser_tardos(inst, _rng(args.seed), args.max_resamples)
    _emit(args, {"colouring": list(sigma)}, started)


def _cmd_base_colouring(args: argparse.Namespace, started: float) -> None:
    inst = _load(args.instance)
    sigma = good_base_colouring(inst, args.k1c, _rng(args.seed), args.max_resamples)
    prefix = (inst.k_max - args.k1c) if inst.edges else 0
    _emit(args, {"colouring": list(sigma), "prefix_length": prefix}, started)


def _cmd_check_regime(args: argparse.Namespace, started: float) -> None:
    report = regime_check(args.k, args.delta, args.q, args.mode)
    payload = {
        "in_regime": report.in_regime,
        "checks": [
            {"name": c.name, "passed": c.passed, "lhs": c.lhs, "rhs": c.rhs}
            for c in report.checks
        ],
    }
    if args.format == "table":
        width = max(len(c.name) for c in report.checks)
        for c in report.checks:
            mark = "pass" if c.passed else "FAIL"
            sys.stdout.write(f"{c.name:<{width}}  {mark}  lhs={c.lhs:g} rhs={c.rhs:g}\n")
        sys.stdout.write(f"in_regime: {report.in_regime}\n")
        _diag(json.dumps({"wall_ms": int((time.monotonic() - started) * 1000)}))
    else:
        _emit(args, payload, started)


def _cmd_couple_sim(args: argparse.Namespace, started: float) -> None:
    inst = _load(args.instance)
    counter = ConditionalCounter(inst, args.budget)
    depth_hist: dict[str, int] = {}
    failed_sizes = 0
    for i in range(args.runs):
        state = run_coupling(
            inst,
            args.vertex,
            args.c1,
            args.c2,
            args.k1,
            args.k2,
            _rng(args.seed, i),
            counter,
        )
        d = state.depth()
        depth_hist[str(d)] = depth_hist.get(str(d), 0) + 1
        failed_sizes += len(state.v1)
    _emit(
        args,
        {
            "runs": args.runs,
            "halt_depths": depth_hist,
            "mean_failed_set": failed_sizes / args.runs,
        },
        started,
    )


def _cmd_tree_dump(args: argparse.Namespace, started: float) -> None:
    inst = _load(args.instance)
    tree = build_tree(
        inst,
        args.vertex,
        args.c1,
        args.c2,
        args.k1,
        args.k2,
        args.depth,
        node_budget=_node_budget(args),
    )
    _emit(
        args,
        {
            "nodes": tree.n_nodes,
            "internal": tree.n_internal,
            "halted_leaves": tree.n_halted,
            "truncated_leaves": tree.n_truncated,
            "halted_below_depth": tree.n_halted_below,
            "depth_cap": tree.depth_cap,
        },
        started,
    )


def _cmd_tree_stats(args: argparse.Namespace, started: float) -> None:
    inst = _load(args.instance)
    lin = line_graph(inst)
    if not 0 <= args.root_edge < len(inst.edges):
        raise SystemExit(f"edge ordinal {args.root_edge} out of range")
    counts = {}
    for size in range(1, args.max_size + 1):
        counts[str(size)] = len(
            enumerate_23trees(lin, args.root_edge, size, args.budget)
        )
    _emit(args, {"root_edge": args.root_edge, "tree_counts": counts}, started)


def _cmd_marginal(args: argparse.Namespace, started: float) -> None:
    inst = _load(args.instance)
    params = _params_for(inst, args, "counting", args.eps)
    bracket = tuple(args.bracket) if args.bracket else None
    t0 = time.monotonic()
    est = estimate_marginal(
        inst,
        args.vertex,
        args.colour,
        args.eps,
        params,
        bracket=bracket,
        node_budget=_node_budget(args),
    )
    solve_ms = int((time.monotonic() - t0) * 1000)
    _diag(json.dumps({"lp_solve_ms": solve_ms}))
    _emit(
        args,
        {
            "p_hat": est.p_hat,
            "bracket_lo": est.bracket_lo,
            "bracket_hi": est.bracket_hi,
            "gamma": est.gamma,
            "tree_nodes": est.tree_nodes,
            "lp_constraints": est.lp_constraints,
            "per_colour": [
                {"colour": c, "lo": lo, "hi": hi} for c, lo, hi in est.per_colour
            ],
        },
        started,
    )


def _cmd_count(args: argparse.Namespace, started: float) -> None:
    inst = _load(args.instance)
    params = _params_for(inst, args, "counting", args.eps / max(inst.n, 1))
    est = run_count(
        inst,
        args.eps,
        params,
        _rng(args.seed),
        oracle_marginals=args.oracle_marginals,
        node_budget=_node_budget(args),
    )
    payload = {
        "log_estimate": est.log_estimate,
        "estimate": est.estimate,
        "eps": est.eps,
        "steps": [
            {"vertex": v, "colour": c, "p_hat": p} for v, c, p in est.per_step
        ],
        "free_vertices": est.free_vertices,
    }
    if est.exact_estimate is not None:
        payload["exact_estimate"] = {
            "num": est.exact_estimate.numerator,
            "den": est.exact_estimate.denominator,
        }
    _emit(args, payload, started)


def _cmd_sample(args: argparse.Namespace, started: float) -> None:
    inst = _load(args.instance)
    params = _params_for(inst, args, "sampling", args.eps)
    estimator = CachingMarginalEstimator(params, node_budget=_node_budget(args))
    outcomes = []
    for i in range(args.samples):
        outcomes.append(
            run_sample(
                inst,
                args.eps,
                params,
                _rng(args.seed, i),
                marginal_fn=estimator,
            )
        )
    failed = sum(1 for o in outcomes if o.failed)
    if args.histogram:
        hist: dict[str, int] = {}
        for o in outcomes:
            key = ",".join(map(str, o.colouring))
            hist[key] = hist.get(key, 0) + 1
        payload: dict[str, Any] = {
            "samples": args.samples,
            "failed": failed,
            "histogram": dict(sorted(hist.items())),
        }
    else:
        payload = {
            "samples": [
                {
                    "colouring": list(o.colouring),
                    "failed": o.failed,
                    "residual_sizes": list(o.residual_components),
                }
                for o in outcomes
            ],
            "failed": failed,
        }
    _emit(args, payload, started)


def _add_instance(p: argparse.ArgumentParser) -> None:
    p.add_argument("instance", help="instance file (see README for the format)")


def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, required=True, help="RNG seed (required)")


def _add_param_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k1", type=int, default=None, help="override settled k1")
    p.add_argument("--k2", type=int, default=None, help="override settled k2")
    p.add_argument("--beta", type=str, default=None, help="override beta (fraction)")
    p.add_argument("--tstar", type=float, default=None, help="override t*")
    p.add_argument("--depth", type=int, default=None, help="override tree depth L")
    p.add_argument("--node-budget", type=int, default=None, help="tree node cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chromatic-lll",
        description="Counting and sampling proper colourings of k-uniform "
        "hypergraphs in the local-lemma regime.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oracle-count", help="exact number of proper colourings")
    _add_instance(p)
    p.add_argument("--budget", type=int, default=DEFAULT_ENUM_BUDGET)
    p.set_defaults(func=_cmd_oracle_count)

    p = sub.add_parser("oracle-marginal", help="exact marginal probability")
    _add_instance(p)
    p.add_argument("--vertex", type=int, required=True)
    p.add_argument("--colour", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_ENUM_BUDGET)
    p.set_defaults(func=_cmd_oracle_marginal)

    p = sub.add_parser("oracle-sample", help="exact uniform samples")
    _add_instance(p)
    _add_seed(p)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--budget", type=int, default=DEFAULT_ENUM_BUDGET)
    p.set_defaults(func=_cmd_oracle_sample)

    p = sub.add_parser("find-colouring", help="resampling search for a proper colouring")
    _add_instance(p)
    _add_seed(p)
    p.add_argument("--max-resamples", type=int, default=DEFAULT_MAX_RESAMPLES)
    p.set_defaults(func=_cmd_find_colouring)

    p = sub.add_parser(
        "base-colouring", help="proper colouring with non-monochromatic edge prefixes"
    )
    _add_instance(p)
    _add_seed(p)
    p.add_argument("--k1c", type=int, required=True)
    p.add_argument("--max-resamples", type=int, default=DEFAULT_MAX_RESAMPLES)
    p.set_defaults(func=_cmd_base_colouring)

    p = sub.add_parser("check-regime", help="evaluate the admission inequalities")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--mode", choices=("counting", "sampling"), required=True)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=_cmd_check_regime)

    p = sub.add_parser("couple-sim", help="randomized coupling runs, trace statistics")
    _add_instance(p)
    _add_seed(p)
    p.add_argument("--vertex", type=int, required=True)
    p.add_argument("--c1", type=int, required=True)
    p.add_argument("--c2", type=int, required=True)
    p.add_argument("--k1", type=int, required=True)
    p.add_argument("--k2", type=int, required=True)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--budget", type=int, default=DEFAULT_ENUM_BUDGET)
    p.set_defaults(func=_cmd_couple_sim)

    p = sub.add_parser("tree-dump", help="coupling tree node counts by status")
    _add_instance(p)
    p.add_argument("--vertex", type=int, required=True)
    p.add_argument("--c1", type=int, required=True)
    p.add_argument("--c2", type=int, required=True)
    p.add_argument("--k1", type=int, required=True)
    p.add_argument("--k2", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--node-budget", type=int, default=None)
    p.set_defaults(func=_cmd_tree_dump)

    p = sub.add_parser("tree-stats", help="{2,3}-tree counts per size on the line graph")
    _add_instance(p)
    p.add_argument("--root-edge", type=int, default=0)
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--budget", type=int, default=1_000_000)
    p.set_defaults(func=_cmd_tree_stats)

    p = sub.add_parser("marginal", help="certified marginal estimate")
    _add_instance(p)
    p.add_argument("--vertex", type=int, required=True)
    p.add_argument("--colour", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--bracket", type=float, nargs=2, default=None)
    _add_param_overrides(p)
    p.set_defaults(func=_cmd_marginal)

    p = sub.add_parser("count", help="approximate the number of proper colourings")
    _add_instance(p)
    _add_seed(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--oracle-marginals", action="store_true")
    _add_param_overrides(p)
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("sample", help="almost-uniform proper colourings")
    _add_instance(p)
    _add_seed(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--histogram", action="store_true")
    _add_param_overrides(p)
    p.set_defaults(func=_cmd_sample)

    return parser


def main(argv: list[str] | None = None) -> int:
    started = time.monotonic()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        args.func(args, started)
    except SystemExit as exc:
        _diag(str(exc))
        return 2
    except ChromaticError as exc:
        _diag(f"error: {exc}")
        return 1
    except ValueError as exc:
        _diag(f"usage error: {exc}")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
