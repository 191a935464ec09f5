"""Deterministic Rabin automata in a small subset of the HOA format.

Supported: ``HOA: v1``, ``States:``, a single ``Start:``, ``AP:``,
``acc-name: Rabin k`` (optional), ``Acceptance: 2k`` with the pairs
``Fin(2i) & Inf(2i+1)`` joined by ``|``, state-based acceptance marks and
explicitly labelled transitions. Other lowercase headers are ignored.
Pair ``i`` is ``(E, F)`` with ``E`` = states in set ``2i`` and ``F`` = states
in set ``2i+1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .chain import MarkovChain, ValidationError
from .io import ParseError

MAX_AP = 16


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class AP:
    index: int


@dataclass(frozen=True)
class Not:
    arg: "LabelExpr"


@dataclass(frozen=True)
class And:
    left: "LabelExpr"
    right: "LabelExpr"


@dataclass(frozen=True)
class Or:
    left: "LabelExpr"
    right: "LabelExpr"


LabelExpr = Union[Const, AP, Not, And, Or]
TRUE = Const(True)
FALSE = Const(False)


def eval_label_expr(e: LabelExpr, letter) -> bool:
    """Evaluate ``e`` on a letter given as a set of AP indices."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, AP):
        return e.index in letter
    if isinstance(e, Not):
        return not eval_label_expr(e.arg, letter)
    if isinstance(e, And):
        return eval_label_expr(e.left, letter) and eval_label_expr(e.right, letter)
    if isinstance(e, Or):
        return eval_label_expr(e.left, letter) or eval_label_expr(e.right, letter)
    raise TypeError(f"not a label expression: {e!r}")


def label_table(e: LabelExpr, n_ap: int) -> np.ndarray:
    """Truth value of ``e`` on every letter ``0 .. 2**n_ap - 1`` (bit i = AP i)."""
    letters = np.arange(1 << n_ap, dtype=np.int64)
    if isinstance(e, Const):
        return np.full(len(letters), e.value, dtype=bool)
    if isinstance(e, AP):
        return ((letters >> e.index) & 1).astype(bool)
    if isinstance(e, Not):
        return ~label_table(e.arg, n_ap)
    if isinstance(e, And):
        return label_table(e.left, n_ap) & label_table(e.right, n_ap)
    if isinstance(e, Or):
        return label_table(e.left, n_ap) | label_table(e.right, n_ap)
    raise TypeError(f"not a label expression: {e!r}")


_EXPR_TOKEN = re.compile(r"\s*(?:(\d+)|([tf])\b|([!&|()]))")


def parse_label_expr(text: str, n_ap: int | None = None, line: int = 0) -> LabelExpr:
    """``t | f | INT | !e | e&e | e|e | (e)`` with ``!`` > ``&`` > ``|``."""
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _EXPR_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(line, f"bad label expression near {text[pos:]!r}", "hoa")
        tokens.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else None

    def take():
        nonlocal i
        tok = peek()
        if tok is None:
            raise ParseError(line, "unexpected end of label expression", "hoa")
        i += 1
        return tok

    def disj():
        e = conj()
        while peek() == "|":
            take()
            e = Or(e, conj())
        return e

    def conj():
        e = unary()
        while peek() == "&":
            take()
            e = And(e, unary())
        return e

    def unary():
        tok = take()
        if tok == "!":
            return Not(unary())
        if tok == "(":
            e = disj()
            if take() != ")":
                raise ParseError(line, "expected ')'", "hoa")
            return e
        if tok == "t":
            return TRUE
        if tok == "f":
            return FALSE
        if tok.isdigit():
            idx = int(tok)
            if n_ap is not None and idx >= n_ap:
                raise ParseError(line, f"AP index {idx} out of range (AP count {n_ap})", "hoa")
            return AP(idx)
        raise ParseError(line, f"unexpected {tok!r} in label expression", "hoa")

    e = disj()
    if peek() is not None:
        raise ParseError(line, f"trailing {peek()!r} in label expression", "hoa")
    return e


@dataclass(frozen=True, eq=False)
class RabinAutomaton:
    """Complete deterministic Rabin automaton over letters ``2**AP``.

    ``table[q, letter]`` is the successor of ``q``; ``letter`` has bit ``i``
    set iff AP ``i`` holds.
    """

    n_states: int
    start: int
    ap_names: tuple[str, ...]
    transitions: tuple[tuple[tuple[LabelExpr, int], ...], ...]
    pairs: tuple[tuple[frozenset[int], frozenset[int]], ...]
    table: np.ndarray

    @classmethod
    def build(cls, n_states, start, ap_names, transitions, pairs) -> "RabinAutomaton":
        """Validate determinism and completeness by letter enumeration."""
        ap_names = tuple(ap_names)
        n_ap = len(ap_names)
        if n_ap > MAX_AP:
            raise ValidationError(f"at most {MAX_AP} atomic propositions supported")
        if not 0 <= start < n_states:
            raise ValidationError("start state out of range")
        if not pairs:
            raise ValidationError("at least one Rabin pair required")
        for e_set, f_set in pairs:
            if any(not 0 <= q < n_states for q in e_set | f_set):
                raise ValidationError("acceptance set mentions an unknown state")
        table = np.full((n_states, 1 << n_ap), -1, dtype=np.int64)
        for q in range(n_states):
            for expr, dst in transitions[q]:
                if not 0 <= dst < n_states:
                    raise ValidationError(f"state {q}: transition to unknown state {dst}")
                hit = label_table(expr, n_ap)
                clash = hit & (table[q] >= 0)
                if clash.any():
                    raise ValidationError(
                        f"state {q} is nondeterministic on letter {_letter_str(int(np.argmax(clash)), ap_names)}"
                    )
                table[q, hit] = dst
            missing = table[q] < 0
            if missing.any():
                raise ValidationError(
                    f"state {q} has no transition on letter {_letter_str(int(np.argmax(missing)), ap_names)}"
                )
        table.setflags(write=False)
        return cls(n_states, start, ap_names,
                   tuple(tuple(t) for t in transitions),
                   tuple((frozenset(e), frozenset(f)) for e, f in pairs), table)

    def step(self, q: int, letter) -> int:
        """Successor on a letter given as a set of AP indices."""
        mask = 0
        for i in letter:
            mask |= 1 << i
        return int(self.table[q, mask])

    def accepts_inf_set(self, inf: set[int]) -> bool:
        return any(not (inf & e) and (inf & f) for e, f in self.pairs)

    def pair_masks(self) -> tuple[np.ndarray, np.ndarray]:
        e = np.zeros((len(self.pairs), self.n_states), dtype=np.bool_)
        f = np.zeros_like(e)
        for i, (es, fs) in enumerate(self.pairs):
            e[i, list(es)] = True
            f[i, list(fs)] = True
        return e, f

    def chain_letters(self, chain: MarkovChain) -> np.ndarray:
        """Letter of every chain state, matching APs to chain labels by name."""
        bits = []
        for name in self.ap_names:
            if name not in chain.label_names:
                raise KeyError(f"automaton AP {name!r} is not a label of the chain")
            bits.append(chain.label_names.index(name))
        letters = np.zeros(chain.n_states, dtype=np.int64)
        for s in range(chain.n_states):
            for i, lid in enumerate(bits):
                if lid in chain.labels[s]:
                    letters[s] |= 1 << i
        return letters

    def next_table(self, chain: MarkovChain) -> np.ndarray:
        """``out[q, s]`` = successor of ``q`` on the label of chain state ``s``."""
        return np.ascontiguousarray(self.table[:, self.chain_letters(chain)])


def _letter_str(mask: int, ap_names) -> str:
    return "{" + ", ".join(n for i, n in enumerate(ap_names) if mask >> i & 1) + "}"


_ACC_PAIR = re.compile(r"\(?\s*Fin\((\d+)\)\s*&\s*Inf\((\d+)\)\s*\)?$")
_STATE_LINE = re.compile(r'State:\s*(\d+)\s*(?:"[^"]*")?\s*(?:\{([\d\s]*)\})?\s*$')
_TRANS_LINE = re.compile(r"\[(.*)\]\s*(\d+)\s*(\{.*\})?\s*$")


def parse_hoa(text: str) -> RabinAutomaton:
    """Parse the HOA subset; see the module docstring."""
    lines = [(no, raw.strip()) for no, raw in enumerate(text.splitlines(), start=1)]
    lines = [(no, ln) for no, ln in lines if ln]
    if not lines or not re.fullmatch(r"HOA:\s*v1", lines[0][1]):
        raise ParseError(lines[0][0] if lines else 1, "expected 'HOA: v1'", "hoa")
    n_states = start = n_pairs = None
    ap_names: list[str] | None = None
    k = 1
    while k < len(lines) and lines[k][1] != "--BODY--":
        no, ln = lines[k]
        key, colon, rest = ln.partition(":")
        rest = rest.strip()
        if not colon:
            raise ParseError(no, f"expected a header line, got {ln!r}", "hoa")
        if key == "States":
            if not rest.isdigit() or int(rest) < 1:
                raise ParseError(no, "States: expects a positive integer", "hoa")
            n_states = int(rest)
        elif key == "Start":
            if start is not None:
                raise ParseError(no, "only a single Start: state is supported", "hoa")
            if not rest.isdigit():
                raise ParseError(no, "Start: expects one state index (no conjunctions)", "hoa")
            start = int(rest)
        elif key == "AP":
            m = re.fullmatch(r'(\d+)((?:\s+"[^"]*")*)', rest)
            if not m:
                raise ParseError(no, 'AP: expects a count followed by quoted names', "hoa")
            ap_names = re.findall(r'"([^"]*)"', m.group(2))
            if len(ap_names) != int(m.group(1)):
                raise ParseError(no, f"AP: declares {m.group(1)} names but lists {len(ap_names)}", "hoa")
            if len(ap_names) > MAX_AP:
                raise ParseError(no, f"at most {MAX_AP} atomic propositions supported", "hoa")
        elif key == "Acceptance":
            count, _, cond = rest.partition(" ")
            if not count.isdigit() or int(count) % 2 or int(count) == 0:
                raise ParseError(no, "Acceptance: set count must be a positive even number 2k", "hoa")
            n_pairs = int(count) // 2
            parts = [p.strip() for p in cond.split("|")]
            for i, part in enumerate(parts):
                m = _ACC_PAIR.match(part)
                if not m or (int(m.group(1)), int(m.group(2))) != (2 * i, 2 * i + 1):
                    raise ParseError(no, f"pair {i} must read Fin({2 * i})&Inf({2 * i + 1})", "hoa")
            if len(parts) != n_pairs:
                raise ParseError(no, f"Acceptance: declares {n_pairs} pairs, lists {len(parts)}", "hoa")
        elif key == "acc-name":
            toks = rest.split()
            if toks[:1] != ["Rabin"]:
                raise ParseError(no, "only 'acc-name: Rabin k' is supported", "hoa")
        elif key[:1].isupper():
            raise ParseError(no, f"unsupported header {key!r}", "hoa")
        k += 1
    if k == len(lines):
        raise ParseError(lines[-1][0], "missing --BODY--", "hoa")
    for what, val in (("States:", n_states), ("Start:", start), ("AP:", ap_names),
                      ("Acceptance:", n_pairs)):
        if val is None:
            raise ParseError(lines[k][0], f"missing {what} header", "hoa")

    transitions: list[list[tuple[LabelExpr, int]]] = [[] for _ in range(n_states)]
    marks: list[set[int]] = [set() for _ in range(n_states)]
    declared: set[int] = set()
    current = None
    k += 1
    ended = False
    while k < len(lines):
        no, ln = lines[k]
        k += 1
        if ln == "--END--":
            ended = True
            break
        if ln.startswith("State:"):
            m = _STATE_LINE.match(ln)
            if not m:
                raise ParseError(no, "expected 'State: <id> [{sets}]'", "hoa")
            current = int(m.group(1))
            if current >= n_states:
                raise ParseError(no, f"state {current} out of range", "hoa")
            if current in declared:
                raise ParseError(no, f"state {current} declared twice", "hoa")
            declared.add(current)
            if m.group(2):
                for tok in m.group(2).split():
                    if int(tok) >= 2 * n_pairs:
                        raise ParseError(no, f"acceptance set {tok} not declared", "hoa")
                    marks[current].add(int(tok))
            continue
        if current is None:
            raise ParseError(no, "transition before any State:", "hoa")
        m = _TRANS_LINE.match(ln)
        if not m:
            raise ParseError(no, "expected '[<expr>] <dst>'", "hoa")
        if m.group(3):
            raise ParseError(no, "transition-based acceptance is not supported", "hoa")
        dst = int(m.group(2))
        if dst >= n_states:
            raise ParseError(no, f"target state {dst} out of range", "hoa")
        transitions[current].append((parse_label_expr(m.group(1), len(ap_names), no), dst))
    if not ended:
        raise ParseError(lines[-1][0], "missing --END--", "hoa")
    if start >= n_states:
        raise ParseError(1, "Start: state out of range", "hoa")
    pairs = [
        (frozenset(q for q in range(n_states) if 2 * i in marks[q]),
         frozenset(q for q in range(n_states) if 2 * i + 1 in marks[q]))
        for i in range(n_pairs)
    ]
    return RabinAutomaton.build(n_states, start, ap_names, transitions, pairs)


def expr_to_str(e: LabelExpr) -> str:
    if isinstance(e, Const):
        return "t" if e.value else "f"
    if isinstance(e, AP):
        return str(e.index)
    if isinstance(e, Not):
        return "!" + _atom(e.arg)
    if isinstance(e, And):
        return f"{_atom(e.left)}&{_atom(e.right)}"
    return f"{expr_to_str(e.left)}|{expr_to_str(e.right)}"


def _atom(e: LabelExpr) -> str:
    s = expr_to_str(e)
    return s if isinstance(e, (Const, AP, Not)) else f"({s})"


def serialize_hoa(dra: RabinAutomaton) -> str:
    n_pairs = len(dra.pairs)
    out = [
        "HOA: v1",
        f"States: {dra.n_states}",
        f"Start: {dra.start}",
        "AP: " + " ".join([str(len(dra.ap_names))] + [f'"{a}"' for a in dra.ap_names]),
        f"acc-name: Rabin {n_pairs}",
        f"Acceptance: {2 * n_pairs} " + " | ".join(
            f"(Fin({2 * i})&Inf({2 * i + 1}))" for i in range(n_pairs)),
        "--BODY--",
    ]
    for q in range(dra.n_states):
        sets = [2 * i for i, (e, _) in enumerate(dra.pairs) if q in e]
        sets += [2 * i + 1 for i, (_, f) in enumerate(dra.pairs) if q in f]
        out.append(f"State: {q}" + (" {" + " ".join(map(str, sorted(sets))) + "}" if sets else ""))
        for expr, dst in dra.transitions[q]:
            out.append(f"[{expr_to_str(expr)}] {dst}")
    out.append("--END--")
    return "\n".join(out) + "\n"
