import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etfs.errors import DomainError, IllegalSymbolError, ParseError, ReservedSymbolError
from etfs.model import (
    Weights,
    compute_F,
    compute_window_floor,
    derive_view,
    format_instance,
    make_instance,
    normalize_sensitive_set,
    parse_instance,
    verify_feasible,
)

from conftest import EX1_WORD, build


def test_parse_rejects_k_not_below_n():
    with pytest.raises(DomainError):
        parse_instance("W=ab\nK=2\n")


def test_parse_example1_document():
    inst, raw = parse_instance("; example one\nW=ecabaaaaabbbadf\nK=3\nS=2,4\n")
    assert (inst.n, inst.k) == (15, 3)
    assert raw == [(2, 4)]


def test_parse_long_pattern_document():
    inst, raw = parse_instance("W=abaabbaababb\nK=4\nS=2,7\nS=3,10\nS=5,11\n")
    assert (inst.n, inst.k, len(raw)) == (12, 4, 3)


@pytest.mark.parametrize("text", ["K=3\n", "W=abcd\n", "W=abcd\nK=x\n", "W=abcd\nK=2\nS=1\n"])
def test_parse_errors(text):
    with pytest.raises((ParseError, DomainError)):
        parse_instance(text)


def test_reserved_symbol():
    with pytest.raises(ReservedSymbolError):
        make_instance("ab#c", 2)


def test_format_round_trip(example1):
    inst, S = example1
    again, raw = parse_instance(format_instance(inst, S.intervals))
    assert again.word == inst.word and normalize_sensitive_set(raw, again).intervals == S.intervals


def test_closure_and_minimality():
    inst = make_instance(EX1_WORD, 3)
    S = normalize_sensitive_set([(2, 4)], inst)
    assert S.intervals == ((2, 4),) and (S.L, S.ell) == (0, 3)
    S = normalize_sensitive_set([(4, 5)], inst)
    assert S.intervals == ((4, 5), (5, 6), (6, 7), (7, 8)) and S.ell == 2
    S = normalize_sensitive_set([(2, 4), (2, 7)], inst)
    assert (2, 7) not in S.intervals


def test_derived_view_examples(example1, example2):
    view = derive_view(*example1)
    assert list(view.I) == [0, 1, 8, 9, 11, 12]
    assert list(view.M) == [0, 1, 1, 1, 0, 1]
    view2 = derive_view(*example2)
    assert list(view2.I) == [0, 1, 8, 9, 10, 11, 12]
    assert view2.F[9] == 7 and view2.F[0] == 0


def test_empty_set_view():
    inst, S = build("abcab", 2, [])
    view = derive_view(inst, S)
    assert list(view.I) == [0, 1, 2, 3]
    assert all(view.M[1:])
    assert list(view.F) == [max(j - 2, 0) for j in range(6)]


def test_verify_examples(example1):
    inst, S = example1
    assert verify_feasible("ecab#abb#bbb#badf", inst, S).feasible
    assert verify_feasible("ecab#aa#abbb#badf", inst, S).feasible
    v = verify_feasible(EX1_WORD, inst, S)
    assert not v.feasible and not v.c1_ok


def test_verify_rejects_foreign_letters(example1):
    with pytest.raises(IllegalSymbolError):
        verify_feasible("ecab#xyz", *example1)


def test_weights_parse():
    w = Weights.parse("2,3,5")
    assert (w.w_sub, w.w_ins, w.w_del) == (2, 3, 5)
    c = Weights.parse("0.5,1.5,1").integer_costs()
    assert (c.sub, c.ins, c.dele) == (1, 3, 2) and c.scale == 2
    with pytest.raises(DomainError):
        Weights.parse("0,1,1")


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="ab", min_size=4, max_size=14), st.integers(2, 3),
       st.lists(st.tuples(st.integers(0, 13), st.integers(0, 4)), max_size=4))
def test_F_bounds(word, k, spans):
    inst = make_instance(word, k)
    n = inst.n
    raw = [(i, min(i + d, n - 1)) for i, d in spans if i < n]
    S = normalize_sensitive_set(raw, inst)
    F = compute_F(inst, S)
    floor = compute_window_floor(inst, S)
    assert np.all(np.diff(F) >= 0)
    assert np.array_equal(F, np.maximum(floor, 0))
    for j in range(n + 1):
        assert max(0, j - k) <= F[j] <= max(j - 1, 0)
