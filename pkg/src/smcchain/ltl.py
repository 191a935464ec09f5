"""ω-regular properties via a lazily explored product with a Rabin automaton."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .chain import EMPTY, MarkovChain, ValidationError, draw_index
from .hoa import RabinAutomaton
from .kernels import paths as _k
from .monitor import DEFAULT_CHECK_BOUND, CandidateTracker
from .reach import _stream, check_pmin, run_sprt
from .sampling import DEFAULT_MAX_STEPS, DivergedError, TrackerPool, VerificationReport
from .stats import HypothesisSpec, SprtSession


@dataclass(frozen=True)
class ProductState:
    s: int
    q: int


@dataclass(frozen=True)
class LtlSample:
    outcome: bool
    path_length: int


class Product:
    """Arrays describing ``chain x dra`` for the sampling kernel."""

    def __init__(self, chain: MarkovChain, dra: RabinAutomaton):
        self.chain = chain
        self.dra = dra
        self.next = dra.next_table(chain)
        self.acc_e, self.acc_f = dra.pair_masks()
        self.nq = dra.n_states

    def pack(self, ps: ProductState) -> int:
        return ps.s * self.nq + ps.q

    def unpack(self, g: int) -> ProductState:
        return ProductState(g // self.nq, g % self.nq)

    def tracker_pool(self) -> TrackerPool:
        return TrackerPool(self.chain.n_states * self.nq, self.chain.n_transitions * self.nq)


def product_step(chain: MarkovChain, dra: RabinAutomaton, ps: ProductState | None,
                 stream: np.random.Generator, _next=None) -> ProductState:
    """Draw the chain successor and move the automaton on its label."""
    table = dra.next_table(chain) if _next is None else _next
    u = stream.random()
    if ps is None or ps == EMPTY:
        s = int(chain.init_states[draw_index(chain.init_cum, 0, len(chain.init_cum), u)])
        return ProductState(s, int(table[dra.start, s]))
    lo, hi = chain.indptr[ps.s], chain.indptr[ps.s + 1]
    s = int(chain.targets[draw_index(chain.cum, lo, hi, u)])
    return ProductState(s, int(table[ps.q, s]))


def is_accepting_set(members: Iterable, dra: RabinAutomaton) -> bool:
    """Some pair ``(E, F)``: no member's automaton state in E, some in F."""
    qs = {m.q if isinstance(m, ProductState) else int(m[1]) for m in members}
    if not qs:
        raise ValueError("empty set")
    return dra.accepts_inf_set(qs)


def single_path_ltl(chain: MarkovChain, dra: RabinAutomaton, pmin: float, delta: float, stream,
                    check_bound: int = DEFAULT_CHECK_BOUND, max_steps: int = DEFAULT_MAX_STEPS,
                    tracker: CandidateTracker | None = None, _product=None, _tr=None) -> LtlSample:
    """Sample the product until its candidate is judged a BSCC; the outcome
    is whether that candidate is accepting."""
    if not 0.0 < delta <= 1.0:
        raise ValidationError("delta must lie in (0, 1]")
    prod = Product(chain, dra) if _product is None else _product
    if tracker is not None:
        tracker.check_bound = int(check_bound)
        tracker.reserve(chain.n_states * prod.nq, chain.n_transitions * prod.nq)
        tr = tracker._state
    else:
        tr = _tr if _tr is not None else prod.tracker_pool().get()
    status, length = _k.ltl_path(
        _stream(stream), chain.indptr, chain.targets, chain.cum, chain.init_states,
        chain.init_cum, prod.next, dra.start, prod.acc_e, prod.acc_f, tr,
        float(pmin), float(delta), int(check_bound), int(max_steps))
    if status == _k.DIVERGED:
        raise DivergedError(-1 if not isinstance(stream, tuple) else stream[1], max_steps)
    return LtlSample(status == _k.YES, int(length))


def ltl_sampler(chain: MarkovChain, dra: RabinAutomaton, pmin: float, delta: float, seed: int,
                check_bound: int = DEFAULT_CHECK_BOUND, max_steps: int = DEFAULT_MAX_STEPS):
    prod = Product(chain, dra)
    pool = prod.tracker_pool()

    def task(i: int) -> LtlSample:
        try:
            return single_path_ltl(chain, dra, pmin, delta, (seed, i), check_bound, max_steps,
                                   _product=prod, _tr=pool.get())
        except DivergedError:
            raise DivergedError(i, max_steps) from None
    return task


def verify_ltl(chain: MarkovChain, dra: RabinAutomaton, spec: HypothesisSpec, master_seed: int,
               pmin: float | None = None, check_bound: int = DEFAULT_CHECK_BOUND,
               max_steps: int = DEFAULT_MAX_STEPS, threads: int = 1) -> VerificationReport:
    pmin = check_pmin(chain, pmin)
    session = SprtSession.for_spec(spec, "ltl")
    task = ltl_sampler(chain, dra, pmin, spec.delta, master_seed, check_bound, max_steps)
    lengths = run_sprt(task, session, threads)
    return VerificationReport(
        kind="ltl", seed=int(master_seed), n_samples=session.n_samples,
        mean_path_length=lengths.mean, max_path_length=lengths.maximum,
        decision=session.decision.value, n_positive=session.n_positive,
        parameters={"p": spec.p, "epsilon": spec.epsilon, "alpha": spec.alpha,
                    "beta": spec.beta, "delta": spec.delta, "pmin": pmin,
                    "check_bound": check_bound, "max_steps": max_steps,
                    "p0": session.p0, "p1": session.p1, "automaton_states": dra.n_states},
    )
