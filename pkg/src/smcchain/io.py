"""Explicit-state chain files: ``.tra``, ``.lab``, ``.rew``, ``.init``.

``.tra``   first line ``<n_states> <n_transitions>``, then ``src dst prob``
``.lab``   header of ``id="name"`` pairs, then ``<state>: <id> <id> ...``
``.rew``   ``<state> <reward>``
``.init``  ``<state> <prob>``

Blank lines are skipped. Errors carry 1-based line numbers.
"""

from __future__ import annotations

import re
from pathlib import Path

from .chain import MarkovChain, ValidationError


class ParseError(ValueError):
    def __init__(self, line: int, reason: str, source: str = "<input>"):
        self.line = line
        self.reason = reason
        self.source = source
        super().__init__(f"{source}:{line}: {reason}")


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line:
            yield no, line


def _int(tok: str, no: int, what: str, source: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(no, f"{what}: expected an integer, got {tok!r}", source) from None


def _float(tok: str, no: int, what: str, source: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(no, f"{what}: expected a number, got {tok!r}", source) from None


def _parse_tra(text: str, source: str = "tra"):
    it = _lines(text)
    try:
        no, header = next(it)
    except StopIteration:
        raise ParseError(1, "missing header '<n_states> <n_transitions>'", source) from None
    toks = header.split()
    if len(toks) != 2:
        raise ParseError(no, "header must be '<n_states> <n_transitions>'", source)
    n = _int(toks[0], no, "n_states", source)
    m = _int(toks[1], no, "n_transitions", source)
    if n < 1:
        raise ParseError(no, "n_states must be >= 1", source)
    rows: list[dict[int, float]] = [dict() for _ in range(n)]
    count = 0
    for no, line in it:
        toks = line.split()
        if len(toks) != 3:
            raise ParseError(no, "expected 'src dst prob'", source)
        s = _int(toks[0], no, "src", source)
        t = _int(toks[1], no, "dst", source)
        p = _float(toks[2], no, "prob", source)
        if not (0 <= s < n and 0 <= t < n):
            raise ParseError(no, f"state index out of range 0..{n - 1}", source)
        if not p > 0.0:
            raise ParseError(no, f"probability must be positive, got {toks[2]}", source)
        if t in rows[s]:
            raise ParseError(no, f"duplicate transition {s} -> {t}", source)
        rows[s][t] = p
        count += 1
    if count != m:
        raise ParseError(1, f"header declares {m} transitions, found {count}", source)
    return [sorted(r.items()) for r in rows]


_LAB_HEADER = re.compile(r'(\d+)="([^"]*)"')


def _parse_lab(text: str, n: int, source: str = "lab") -> dict[str, list[int]]:
    it = _lines(text)
    try:
        no, header = next(it)
    except StopIteration:
        return {}
    names: dict[int, str] = {}
    pos = 0
    for m in _LAB_HEADER.finditer(header):
        if header[pos:m.start()].strip():
            raise ParseError(no, f"malformed label header near {header[pos:m.start()].strip()!r}", source)
        lid = int(m.group(1))
        if lid in names:
            raise ParseError(no, f"label id {lid} declared twice", source)
        if m.group(2) in names.values():
            raise ParseError(no, f"label name {m.group(2)!r} declared twice", source)
        names[lid] = m.group(2)
        pos = m.end()
    if header[pos:].strip():
        raise ParseError(no, f"malformed label header near {header[pos:].strip()!r}", source)
    labels: dict[str, list[int]] = {names[i]: [] for i in sorted(names)}
    seen_states = set()
    for no, line in it:
        head, colon, rest = line.partition(":")
        if not colon:
            raise ParseError(no, "expected '<state>: <id> ...'", source)
        s = _int(head.strip(), no, "state", source)
        if not 0 <= s < n:
            raise ParseError(no, f"state index out of range 0..{n - 1}", source)
        if s in seen_states:
            raise ParseError(no, f"state {s} labelled twice", source)
        seen_states.add(s)
        for tok in rest.split():
            lid = _int(tok, no, "label id", source)
            if lid not in names:
                raise ParseError(no, f"undeclared label id {lid}", source)
            labels[names[lid]].append(s)
    return labels


def _parse_pairs(text: str, n: int, what: str, source: str) -> dict[int, float]:
    out: dict[int, float] = {}
    for no, line in _lines(text):
        toks = line.split()
        if len(toks) != 2:
            raise ParseError(no, f"expected '<state> <{what}>'", source)
        s = _int(toks[0], no, "state", source)
        v = _float(toks[1], no, what, source)
        if not 0 <= s < n:
            raise ParseError(no, f"state index out of range 0..{n - 1}", source)
        if s in out:
            raise ParseError(no, f"state {s} listed twice", source)
        if what == "reward" and not 0.0 <= v <= 1.0:
            raise ParseError(no, f"reward {toks[1]} outside [0, 1]", source)
        out[s] = v
    return out


def parse_chain(
    tra_text: str,
    lab_text: str | None = None,
    rew_text: str | None = None,
    init_text: str | None = None,
    declared_pmin: float | None = None,
) -> MarkovChain:
    """Parse the chain files into a validated :class:`MarkovChain`.

    Raises :class:`ParseError` for malformed text and
    :class:`~smcchain.chain.ValidationError` for invariant violations such as
    row sums away from one.
    """
    rows = _parse_tra(tra_text)
    n = len(rows)
    labels = _parse_lab(lab_text, n) if lab_text is not None else {}
    rewards = _parse_pairs(rew_text, n, "reward", "rew") if rew_text is not None else None
    initial = _parse_pairs(init_text, n, "prob", "init") if init_text is not None else None
    return MarkovChain.from_rows(rows, initial=initial, labels=labels, rewards=rewards,
                                 declared_pmin=declared_pmin)


def serialize_chain(chain: MarkovChain) -> dict[str, str]:
    """Texts for ``tra``, ``lab``, ``rew`` and ``init``; floats use ``repr`` so
    they parse back bit-exactly."""
    tra = [f"{chain.n_states} {chain.n_transitions}"]
    for s in range(chain.n_states):
        for t, p in chain.row(s):
            tra.append(f"{s} {t} {p!r}")
    lab = [" ".join(f'{i}="{name}"' for i, name in enumerate(chain.label_names))]
    for s in range(chain.n_states):
        if chain.labels[s]:
            lab.append(f"{s}: " + " ".join(str(i) for i in sorted(chain.labels[s])))
    rew = [f"{s} {float(r)!r}" for s, r in enumerate(chain.rewards) if r != 0.0]
    init = [f"{int(s)} {float(p)!r}" for s, p in zip(chain.init_states, chain.init_probs)]
    return {k: "\n".join(v) + "\n" for k, v in
            {"tra": tra, "lab": lab, "rew": rew, "init": init}.items()}


def load_chain(tra: str | Path, lab: str | Path | None = None, rew: str | Path | None = None,
               init: str | Path | None = None, declared_pmin: float | None = None) -> MarkovChain:
    def read(p):
        return None if p is None else Path(p).read_text()

    texts = [read(tra), read(lab), read(rew), read(init)]
    try:
        return parse_chain(*texts, declared_pmin=declared_pmin)
    except ParseError as exc:
        paths = {"tra": tra, "lab": lab, "rew": rew, "init": init}
        if exc.source in paths and paths[exc.source] is not None:
            raise ParseError(exc.line, exc.reason, str(paths[exc.source])) from None
        raise


def write_chain(chain: MarkovChain, stem: str | Path) -> dict[str, Path]:
    """Write ``<stem>.tra/.lab/.rew/.init``; returns the paths."""
    stem = Path(stem)
    out = {}
    for ext, text in serialize_chain(chain).items():
        path = stem.with_name(stem.name + "." + ext)
        path.write_text(text)
        out[ext] = path
    return out


__all__ = ["ParseError", "ValidationError", "parse_chain", "serialize_chain",
           "load_chain", "write_chain"]
