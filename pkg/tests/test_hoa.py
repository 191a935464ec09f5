import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smcchain.chain import ValidationError
from smcchain.hoa import (AP, FALSE, TRUE, And, Not, Or, eval_label_expr, label_table,
                          parse_hoa, parse_label_expr, serialize_hoa)
from smcchain.io import ParseError

from automata import always_eventually, empty, eventually, eventually_always, universal


def test_eval_examples():
    assert eval_label_expr(And(AP(0), Not(AP(1))), {0})
    assert eval_label_expr(TRUE, {3, 4})
    assert not eval_label_expr(Or(AP(0), AP(1)), set())
    assert not eval_label_expr(FALSE, {0})


def test_precedence():
    e = parse_label_expr("!0 & 1 | 2")
    assert e == Or(And(Not(AP(0)), AP(1)), AP(2))
    assert parse_label_expr("!(0|1)") == Not(Or(AP(0), AP(1)))
    assert parse_label_expr("t") == TRUE and parse_label_expr(" f ") == FALSE


@pytest.mark.parametrize("text", ["", "0 &", "(0", "0 1", "#", "!"])
def test_bad_expressions(text):
    with pytest.raises(ParseError):
        parse_label_expr(text)


def test_ap_index_range():
    with pytest.raises(ParseError):
        parse_label_expr("2", n_ap=2)


exprs = st.recursive(
    st.sampled_from([TRUE, FALSE, AP(0), AP(1), AP(2)]),
    lambda sub: st.one_of(st.builds(Not, sub), st.builds(And, sub, sub), st.builds(Or, sub, sub)),
    max_leaves=10,
)


@given(exprs)
def test_table_matches_eval_and_printer_round_trips(e):
    from smcchain.hoa import expr_to_str
    table = label_table(e, 3)
    for mask in range(8):
        letter = {i for i in range(3) if mask >> i & 1}
        assert table[mask] == eval_label_expr(e, letter)
    assert np.array_equal(label_table(parse_label_expr(expr_to_str(e), 3), 3), table)


def test_universal_automaton():
    dra = universal("a")
    assert dra.n_states == 1 and dra.pairs == ((frozenset(), frozenset({0})),)
    assert dra.accepts_inf_set({0})


def test_eventually_trace():
    dra = eventually("goal")
    q = dra.start
    run = [q]
    for letter in (set(), {0}):
        q = dra.step(q, letter)
        run.append(q)
    assert run == [0, 0, 1]
    assert dra.accepts_inf_set({1}) and not dra.accepts_inf_set({0})


def test_empty_automaton_rejects():
    assert not empty().accepts_inf_set({0})


def test_rabin_semantics_of_last_letter_automata():
    assert always_eventually().accepts_inf_set({0, 1})
    assert not eventually_always().accepts_inf_set({0, 1})
    assert eventually_always().accepts_inf_set({1})


HEAD = 'HOA: v1\nStates: 3\nStart: 0\nAP: 1 "a"\nAcceptance: 2 Fin(0)&Inf(1)\n--BODY--\n'


def test_nondeterminism_rejected():
    text = HEAD + "State: 0\n[0] 1\n[t] 2\nState: 1\n[t] 1\nState: 2\n[t] 2\n--END--\n"
    with pytest.raises(ValidationError, match=r"\{a\}"):
        parse_hoa(text)


def test_incompleteness_rejected():
    text = HEAD + "State: 0\n[0] 1\nState: 1\n[t] 1\nState: 2\n[t] 2\n--END--\n"
    with pytest.raises(ValidationError, match="no transition"):
        parse_hoa(text)


@pytest.mark.parametrize("text, line", [
    ("HOA: v2\n", 1),
    ('HOA: v1\nStates: 1\nStart: 0 & 1\n', 3),
    ('HOA: v1\nStates: 1\nStart: 0\nAP: 2 "a"\n', 4),
    ('HOA: v1\nStates: 1\nStart: 0\nAP: 1 "a"\nAcceptance: 2 Fin(1)&Inf(0)\n', 5),
    ('HOA: v1\nStates: 1\nStart: 0\nAP: 1 "a"\nAcceptance: 2 Fin(0)&Inf(1)\n--BODY--\n'
     'State: 0\n[0] 0 {1}\n--END--\n', 8),
    ('HOA: v1\nStates: 1\nStart: 0\nAP: 1 "a"\nAcceptance: 2 Fin(0)&Inf(1)\n--BODY--\n'
     'State: 0\n[t] 4\n--END--\n', 8),
    ('HOA: v1\nStates: 1\nStart: 0\nAP: 1 "a"\nAcceptance: 2 Fin(0)&Inf(1)\n--BODY--\n'
     'State: 0\n[t] 0\n', 8),
])
def test_positioned_hoa_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_hoa(text)
    assert info.value.line == line


def test_ap_cap():
    names = " ".join(f'"p{i}"' for i in range(17))
    with pytest.raises(ParseError):
        parse_hoa(f"HOA: v1\nStates: 1\nStart: 0\nAP: 17 {names}\n")


@pytest.mark.parametrize("make", [universal, empty, eventually, always_eventually, eventually_always])
def test_serialize_round_trip(make):
    dra = make()
    back = parse_hoa(serialize_hoa(dra))
    assert np.array_equal(back.table, dra.table)
    assert back.pairs == dra.pairs and back.start == dra.start


def test_determinism_by_letter_enumeration():
    text = ('HOA: v1\nStates: 1\nStart: 0\nAP: 3 "a" "b" "c"\nAcceptance: 2 Fin(0)&Inf(1)\n'
            "--BODY--\nState: 0 {1}\n[0&1] 0\n[!0&1] 0\n[!1&2] 0\n[!1&!2] 0\n--END--\n")
    dra = parse_hoa(text)
    for bits in itertools.product([0, 1], repeat=3):
        assert dra.step(0, {i for i, b in enumerate(bits) if b}) == 0
