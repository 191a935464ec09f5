"""``smcchain`` command line: statistical checks, exact answers, generators."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .chain import MarkovChain, ValidationError, actual_pmin, parse_family
from .exact import (bscc_inventory, bsccs, exact_ltl, exact_mp, exact_reachability,
                    sim_termination_estimate)
from .hoa import parse_hoa
from .io import ParseError, load_chain, write_chain
from .ltl import verify_ltl
from .meanpayoff import estimate_mp
from .monitor import DEFAULT_CHECK_BOUND
from .reach import GoalUnknownLabel, verify_reach
from .sampling import DEFAULT_MAX_STEPS, SCHEMA_VERSION, DivergedError, as_int_seed
from .stats import HypothesisSpec, sim_bound

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DIVERGED = 2


class InputError(Exception):
    pass


def _model_args(p: argparse.ArgumentParser, rewards: bool = False) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--gen", metavar="FAMILY", help="fig1:m | fig3:n | fig4:N,M | random:n,d,seed")
    g.add_argument("--tra", type=Path)
    g.add_argument("--lab", type=Path)
    g.add_argument("--init", type=Path)
    if rewards:
        g.add_argument("--rew", type=Path)


def _sampling_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pmin", type=float, help="lower bound on transition probabilities "
                   "(default: the loaded chain's minimum)")
    p.add_argument("--seed", type=int)
    p.add_argument("--check-bound", type=int, default=DEFAULT_CHECK_BOUND)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--threads", type=int, default=1)


def _test_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--delta", type=float, help="per-path error (default epsilon/2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smcchain", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-reach", help="test P[reach goal] against a threshold")
    _model_args(p)
    p.add_argument("--goal", default="goal", help="label of the goal states")
    _test_args(p)
    _sampling_args(p)

    p = sub.add_parser("check-ltl", help="test P[automaton accepts] against a threshold")
    _model_args(p)
    p.add_argument("--hoa", type=Path, required=True)
    _test_args(p)
    _sampling_args(p)

    p = sub.add_parser("estimate-mp", help="confidence interval for the mean payoff")
    _model_args(p, rewards=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--mperr", type=float, default=0.08)
    p.add_argument("--delta", type=float, default=0.011)
    p.add_argument("--n-samples", type=int, default=1000)
    _sampling_args(p)

    p = sub.add_parser("exact", help="numerical answers for a white-box chain")
    esub = p.add_subparsers(dest="what", required=True)
    for name in ("reach", "mp", "ltl", "bsccs"):
        q = esub.add_parser(name)
        _model_args(q, rewards=name == "mp")
        if name == "reach":
            q.add_argument("--goal", default="goal")
        if name == "ltl":
            q.add_argument("--hoa", type=Path, required=True)

    p = sub.add_parser("gen", help="write a generated chain to <out>.tra/.lab/.rew/.init")
    p.add_argument("family")
    p.add_argument("--out", type=Path, required=True, help="output stem")

    p = sub.add_parser("baseline", help="reach estimate by per-step path termination")
    _model_args(p)
    p.add_argument("--goal", default="goal")
    p.add_argument("--p-term", type=float, required=True)
    p.add_argument("--n-samples", type=int, default=1000)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    return parser


def load_model(args) -> MarkovChain:
    if args.gen:
        if args.tra:
            raise InputError("give either --gen or --tra, not both")
        try:
            chain = parse_family(args.gen)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        rew = getattr(args, "rew", None)
        if rew is not None or args.lab is not None or args.init is not None:
            raise InputError("--lab/--init/--rew only apply to --tra models")
        return chain
    if not args.tra:
        raise InputError("a model is required: --gen FAMILY or --tra FILE")
    return load_chain(args.tra, args.lab, getattr(args, "rew", None), args.init)


def _spec(args) -> HypothesisSpec:
    return HypothesisSpec(args.p, args.epsilon, args.alpha, args.beta, args.delta)


def cmd_check_reach(args) -> dict:
    chain = load_model(args)
    spec = _spec(args)
    report = verify_reach(chain, args.goal, spec, as_int_seed(args.seed), args.pmin,
                          args.check_bound, args.max_steps, args.threads)
    out = report.to_json()
    out["parameters"]["sim_bound"] = sim_bound(spec)
    return out


def cmd_check_ltl(args) -> dict:
    chain = load_model(args)
    dra = parse_hoa(args.hoa.read_text())
    report = verify_ltl(chain, dra, _spec(args), as_int_seed(args.seed), args.pmin,
                        args.check_bound, args.max_steps, args.threads)
    return report.to_json()


def cmd_estimate_mp(args) -> dict:
    chain = load_model(args)
    report = estimate_mp(chain, None, args.alpha, args.mperr, args.delta, args.n_samples,
                         as_int_seed(args.seed), args.pmin, args.check_bound, args.max_steps,
                         args.threads)
    return report.to_json()


def cmd_exact(args) -> dict:
    chain = load_model(args)
    out = {"schema_version": SCHEMA_VERSION, "kind": f"exact-{args.what}"}
    if args.what == "reach":
        out["probability"] = exact_reachability(chain, args.goal)
    elif args.what == "mp":
        out["mean_payoff"] = exact_mp(chain)
    elif args.what == "ltl":
        out["probability"] = exact_ltl(chain, parse_hoa(args.hoa.read_text()))
    else:
        count, size = bscc_inventory(chain)
        out.update(bscc_count=count, bscc_max_size=size,
                   bsccs=[sorted(c) for c in bsccs(chain)])
    out.update(n_states=chain.n_states, n_transitions=chain.n_transitions,
               pmin=actual_pmin(chain))
    return out


def cmd_gen(args) -> dict:
    try:
        chain = parse_family(args.family)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    paths = write_chain(chain, args.out)
    return {"schema_version": SCHEMA_VERSION, "kind": "gen", "family": args.family,
            "n_states": chain.n_states, "n_transitions": chain.n_transitions,
            "files": {k: str(v) for k, v in paths.items()}}


def cmd_baseline(args) -> dict:
    chain = load_model(args)
    seed = as_int_seed(args.seed)
    est = sim_termination_estimate(chain, args.goal, args.p_term, args.n_samples, seed,
                                   args.max_steps)
    return {"schema_version": SCHEMA_VERSION, "kind": "sim-termination", "seed": seed,
            "n_samples": args.n_samples, "estimate": est,
            "parameters": {"goal": args.goal, "p_term": args.p_term}}


COMMANDS = {"check-reach": cmd_check_reach, "check-ltl": cmd_check_ltl,
            "estimate-mp": cmd_estimate_mp, "exact": cmd_exact, "gen": cmd_gen,
            "baseline": cmd_baseline}


def _summary(out: dict) -> str:
    if "decision" in out:
        return f"{out['kind']}: accept {out['decision']} after {out['n_samples']} samples"
    if "interval" in out:
        lo, hi = out["interval"]
        return f"{out['kind']}: [{lo:.4f}, {hi:.4f}] from {out['n_samples']} samples"
    if "bscc_count" in out:
        return f"BSCC no., max. size: {out['bscc_count']}, {out['bscc_max_size']}"
    for key in ("probability", "mean_payoff", "estimate"):
        if key in out:
            return f"{out['kind']}: {key} = {out[key]:.10g}"
    return out["kind"]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = COMMANDS[args.command](args)
    except DivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ParseError, ValidationError, InputError, GoalUnknownLabel, KeyError,
            OSError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    print(_summary(out), file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
