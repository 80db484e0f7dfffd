import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etfs.errors import LongPatternError
from etfs.etfs_dp import (
    STEP,
    Row,
    combine_rows,
    compute_gadget_row_fast,
    replay,
    solve_baseline,
    step_mergeable_cell,
    step_ordinary_cell,
)
from etfs.generate import GenConfig, random_instance, random_weights
from etfs.model import UNIT, Weights, derive_view, verify_feasible
from etfs.oracle import enumerate_optimal, naive_gadget_row

from conftest import build

UNIT_C = UNIT.integer_costs()


def test_ordinary_cell_examples():
    assert step_ordinary_cell(5, 5, 3, 0, 0, UNIT_C) == (3, "diag")
    assert step_ordinary_cell(2, 2, 2, 0, 1, UNIT_C) == (3, "diag")
    c = Weights(2, 3, 5).integer_costs()
    assert step_ordinary_cell(0, 0, 0, 0, 1, c) == (2, "diag")


def test_mergeable_cell():
    assert step_mergeable_cell(4, 4, 4, 0, 0, False, 0, 1, UNIT_C) == step_ordinary_cell(4, 4, 4, 0, 1, UNIT_C)
    assert step_mergeable_cell(4, 4, 4, 9, 0, True, 0, 0, UNIT_C) == (0, "merge-diag")


def test_combine_rows_tags():
    a = Row(STEP, np.array([0, 5, 3]))
    b = Row(STEP, np.array([1, 2, 9]))
    out = combine_rows([a, b])
    assert list(out.values) == [0, 2, 3]
    assert list(out.provenance) == [0, 1, 0]
    same = combine_rows([a, a, a])
    assert list(same.provenance) == [0, 0, 0]


def test_gadget_row_simple_cases():
    floor = np.array([-1, -1, -1, 0, 1, 2])
    assert list(compute_gadget_row_fast(np.zeros(6, np.int64), floor, UNIT_C)) == [1] * 6
    r = np.arange(6)
    assert np.array_equal(compute_gadget_row_fast(r, floor, UNIT_C), naive_gadget_row(r, floor, UNIT_C))


@st.composite
def gadget_cases(draw):
    n = draw(st.integers(1, 40))
    k = draw(st.integers(1, 6))
    r = draw(st.lists(st.integers(0, 50), min_size=n + 1, max_size=n + 1))
    floor = [-1]
    for j in range(1, n + 1):
        lo = max(floor[-1], j - k if j - k >= 0 else -1)
        floor.append(draw(st.integers(lo, max(lo, j - 1))))
    costs = draw(st.tuples(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5)))
    leading = draw(st.booleans())
    return (None if leading else np.array(r)), np.array(floor), Weights(*costs).integer_costs()


@settings(max_examples=200, deadline=None)
@given(gadget_cases())
def test_gadget_row_matches_naive(case):
    r, floor, c = case
    assert np.array_equal(compute_gadget_row_fast(r, floor, c), naive_gadget_row(r, floor, c))


def test_example1_distance(example1):
    sol = solve_baseline(*example1)
    assert sol.distance == 4
    assert verify_feasible(sol.output, *example1).feasible
    out, cost = replay(sol.script, example1[0].W, example1[0].costs)
    assert list(out) == list(sol.output) and cost == 4


def test_empty_set_returns_word():
    inst, S = build("abcabd", 3, [])
    sol = solve_baseline(inst, S)
    assert sol.distance == 0 and sol.output_str == "abcabd"


def test_all_windows_sensitive():
    inst, S = build("aba", 2, ["ab", "ba"])
    assert derive_view(inst, S).size == 0
    sol = solve_baseline(inst, S)
    assert sol.distance == enumerate_optimal(inst, S)[0]
    assert verify_feasible(sol.output, inst, S).feasible


def test_long_pattern_rejected(example2):
    with pytest.raises(LongPatternError):
        solve_baseline(*example2)


def test_first_column_and_table(example1):
    inst, S = example1
    sol = solve_baseline(inst, S)
    assert sol.stats["cells"] > 0


def test_json_schema(example1):
    js = solve_baseline(*example1).to_json()
    assert set(js) == {"distance", "output", "script", "algo", "millis"}
    assert all(set(op) == {"op", "wpos", "sym"} for op in js["script"])


def test_random_against_oracle():
    rng = np.random.default_rng(7)
    checked = 0
    for it in range(80):
        n = int(rng.integers(4, 10))
        k = int(rng.integers(2, min(4, n - 1) + 1))
        w = random_weights(rng) if it % 3 == 0 else UNIT
        cfg = GenConfig(n=n, k=k, sigma=int(rng.integers(2, 4)), patterns=int(rng.integers(0, 4)),
                        mode=("short", "exact")[it % 2], weights=w)
        inst, S = random_instance(cfg, rng)
        sol = solve_baseline(inst, S)
        assert sol.distance == enumerate_optimal(inst, S)[0]
        assert verify_feasible(sol.output, inst, S).feasible
        checked += 1
    assert checked == 80
