"""Ordered, optionally threaded, path sampling.

Samples are produced in batches; within a batch the per-path work may run on
several threads (the kernels release the GIL), but results are always
consumed in ascending path index. A consumer that stops at index ``i`` sees
exactly the same prefix of results whatever the thread count.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterator

import numpy as np

from .kernels import tracker as _t

DEFAULT_MAX_STEPS = 10**8
SCHEMA_VERSION = 1


class DivergedError(RuntimeError):
    """A sampled path hit the safety cap on its length."""

    def __init__(self, path_index: int, max_steps: int):
        self.path_index = path_index
        self.max_steps = max_steps
        super().__init__(f"path {path_index} exceeded the safety cap of {max_steps} steps")


@dataclass
class PathLengthStats:
    count: int = 0
    total: int = 0
    maximum: int = 0

    def add(self, length: int) -> None:
        self.count += 1
        self.total += length
        self.maximum = max(self.maximum, length)

    @property
    def mean(self) -> float:
        return self.total / self.count if self.count else 0.0


@dataclass
class VerificationReport:
    """Outcome of a statistical run; ``to_json`` gives the CLI record."""

    kind: str
    seed: int
    n_samples: int
    mean_path_length: float
    max_path_length: int
    decision: str | None = None
    interval: tuple[float, float] | None = None
    n_positive: int | None = None
    parameters: dict[str, Any] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        out = {"schema_version": SCHEMA_VERSION}
        out.update({k: v for k, v in asdict(self).items() if v is not None and v != {}})
        if self.interval is not None:
            out["interval"] = list(self.interval)
        return out


class TrackerPool:
    """One kernel tracker per thread, sized for a given state space."""

    def __init__(self, n_global: int, cap_e: int):
        self.n_global = max(int(n_global), 1)
        self.cap_e = max(int(cap_e), 1)
        self._local = threading.local()

    def get(self) -> _t.TrackerState:
        tr = getattr(self._local, "tr", None)
        if tr is None:
            tr = _t.new_tracker(self.n_global, self.n_global, self.cap_e)
            self._local.tr = tr
        return tr


def ordered_results(task: Callable[[int], Any], threads: int = 1, batch: int | None = None,
                    start: int = 0) -> Iterator[Any]:
    """Yield ``task(i)`` for ``i = start, start+1, ...`` in order, forever."""
    threads = max(int(threads), 1)
    if threads == 1:
        i = start
        while True:
            yield task(i)
            i += 1
    batch = batch or 8 * threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        i = start
        while True:
            yield from pool.map(task, range(i, i + batch))
            i += batch


def collect(task: Callable[[int], Any], n: int, threads: int = 1) -> list[Any]:
    it = ordered_results(task, threads, batch=None if threads == 1 else min(n, 64 * threads))
    return [next(it) for _ in range(n)]


def as_int_seed(seed) -> int:
    if seed is None:
        return int(np.random.SeedSequence().entropy % (2**63))
    return int(seed)
