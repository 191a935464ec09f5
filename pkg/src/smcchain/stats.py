"""Sequential testing and interval estimates for Bernoulli/bounded samples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .chain import ValidationError


class Decision(str, Enum):
    UNDECIDED = "undecided"
    ACCEPT_H0 = "H0"
    ACCEPT_H1 = "H1"


@dataclass(frozen=True)
class HypothesisSpec:
    """``H0: p' >= p + eps`` against ``H1: p' <= p - eps`` with error strengths
    ``alpha`` (wrongly accepting H1) and ``beta`` (wrongly accepting H0).

    ``delta`` is the per-path error budget and defaults to ``epsilon / 2``.
    """

    p: float
    epsilon: float
    alpha: float
    beta: float
    delta: float | None = None

    def __post_init__(self):
        if self.delta is None:
            object.__setattr__(self, "delta", self.epsilon / 2.0)
        if not self.epsilon > 0.0:
            raise ValidationError("epsilon must be positive")
        if not (0.0 < self.p - self.epsilon and self.p + self.epsilon < 1.0):
            raise ValidationError("need 0 < p - epsilon and p + epsilon < 1")
        if not 0.0 < self.delta < self.epsilon:
            raise ValidationError("need 0 < delta < epsilon")
        for name in ("alpha", "beta"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValidationError(f"{name} must lie in (0, 1)")


def reach_hypotheses(spec: HypothesisSpec) -> tuple[float, float]:
    """``(p0, p1)`` for a sampler biased downwards by at most delta."""
    return spec.p + (spec.epsilon - spec.delta), spec.p - spec.epsilon


def ltl_hypotheses(spec: HypothesisSpec) -> tuple[float, float]:
    """``(p0, p1)`` for a sampler biased by at most delta either way."""
    return spec.p + (spec.epsilon - spec.delta), spec.p - (spec.epsilon - spec.delta)


@dataclass
class SprtSession:
    """Wald test of ``p = p0`` (H0) against ``p = p1`` (H1), ``p1 < p0``.

    ``llr`` is the log of the H1 likelihood over the H0 likelihood.
    """

    p0: float
    p1: float
    alpha: float
    beta: float
    llr: float = 0.0
    n_samples: int = 0
    n_positive: int = 0
    decision: Decision = Decision.UNDECIDED

    def __post_init__(self):
        if not 0.0 < self.p1 < self.p0 < 1.0:
            raise ValidationError("need 0 < p1 < p0 < 1")
        if not (0.0 < self.alpha < 1.0 and 0.0 < self.beta < 1.0):
            raise ValidationError("alpha and beta must lie in (0, 1)")
        self._inc1 = math.log(self.p1) - math.log(self.p0)
        self._inc0 = math.log1p(-self.p1) - math.log1p(-self.p0)
        self.upper = math.log((1.0 - self.beta) / self.alpha)
        self.lower = math.log(self.beta / (1.0 - self.alpha))

    @classmethod
    def for_spec(cls, spec: HypothesisSpec, kind: str = "reach") -> "SprtSession":
        p0, p1 = (reach_hypotheses if kind == "reach" else ltl_hypotheses)(spec)
        return cls(p0, p1, spec.alpha, spec.beta)

    def feed(self, x: int) -> Decision:
        if self.decision is not Decision.UNDECIDED:
            raise RuntimeError("session already decided")
        if x:
            self.llr += self._inc1
            self.n_positive += 1
        else:
            self.llr += self._inc0
        self.n_samples += 1
        if self.llr >= self.upper:
            self.decision = Decision.ACCEPT_H1
        elif self.llr <= self.lower:
            self.decision = Decision.ACCEPT_H0
        return self.decision


def sprt_feed(session: SprtSession, x: int) -> SprtSession:
    session.feed(x)
    return session


def sprt_decision(session: SprtSession) -> Decision:
    return session.decision


def sim_bound(spec: HypothesisSpec) -> float:
    """A-priori bound on the expected SPRT sample count.

    Both factors of numerator and denominator are taken in absolute value so
    the bound is positive.
    """
    p, e, d, a, b = spec.p, spec.epsilon, spec.delta, spec.alpha, spec.beta
    num = abs(math.log(b / (1.0 - a))) * abs(math.log((1.0 - b) / a))
    den = abs(math.log((p - e + d) / (p + e - d))) * abs(math.log((1.0 - p - e + d) / (1.0 - p + e - d)))
    return num / den


def hoeffding_halfwidth(n: int, alpha: float) -> float:
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def hoeffding_ci(samples: Sequence[float], alpha: float) -> tuple[float, float]:
    """Two-sided ``1 - alpha`` interval for the mean of ``[0, 1]`` samples."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("need at least one sample")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    mean = float(x.mean())
    h = hoeffding_halfwidth(x.size, alpha)
    return max(0.0, mean - h), min(1.0, mean + h)
