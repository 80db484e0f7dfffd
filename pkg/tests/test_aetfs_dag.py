import numpy as np
import pytest

from etfs.aetfs_dag import (
    HASH_NODE,
    M_NODE,
    build_decision_dag,
    combine_parent_rows,
    forbidden_spans,
    solve_dag,
)
from etfs.errors import DomainError
from etfs.etfs_dp import STEP, Row, solve_baseline
from etfs.generate import GenConfig, random_instance
from etfs.model import derive_view, make_instance, normalize_sensitive_set, verify_feasible
from etfs.oracle import enumerate_optimal, valid_merge_vectors

from conftest import build


def long_overlap_instance():
    inst = make_instance("abaabbaababb", 4)
    return inst, normalize_sensitive_set([(2, 7), (3, 10), (5, 11)], inst)


def _check_shape(dag):
    nodes = dag.nodes
    assert dag.counts().get(HASH_NODE, 0) == max(dag.size - 1, 0)
    for v in nodes:
        assert len(v.children) <= 2
        if v.kind == M_NODE:
            assert sum(nodes[c].kind == M_NODE for c in v.children) <= 1
            assert sum(nodes[p].kind == M_NODE for p in v.parents) <= 1
        assert all(nodes[c].depth > v.depth for c in v.children)


def test_long_overlap_dag_language():
    inst, S = long_overlap_instance()
    view = derive_view(inst, S)
    dag = build_decision_dag(view, S)
    _check_shape(dag)
    assert dag.merge_vectors() == valid_merge_vectors(inst, S)
    assert forbidden_spans(view, S)


def test_exact_length_patterns_linear(example1):
    inst, S = example1
    dag = build_decision_dag(derive_view(inst, S), S)
    for d in range(1, dag.size):
        assert sum(v.kind == M_NODE for v in dag.at_depth(d)) <= 1


def test_no_overlaps_gives_hash_chain():
    inst, S = build("abcdef", 2, ["bc", "de"])
    view = derive_view(inst, S)
    assert not any(view.M)
    dag = build_decision_dag(view, S)
    assert dag.counts().get(M_NODE, 0) == 0


def test_combine_parent_rows():
    a = Row(STEP, np.array([0, 5, 3]))
    b = Row(STEP, np.array([1, 2, 9]))
    assert list(combine_parent_rows([a]).values) == [0, 5, 3]
    assert list(combine_parent_rows([a, b]).provenance) == [0, 1, 0]
    with pytest.raises(DomainError):
        combine_parent_rows([])
    with pytest.raises(DomainError):
        combine_parent_rows([a, Row(STEP, np.array([1, 2]))])


def test_example2(example2):
    inst, S = example2
    sol = solve_dag(inst, S)
    assert sol.distance == 4 == enumerate_optimal(inst, S)[0]
    assert verify_feasible(sol.output, inst, S).feasible
    assert verify_feasible("ecab#abb#bbbadf", inst, S).feasible


def test_empty_set():
    inst, S = build("abcab", 2, [])
    sol = solve_dag(inst, S)
    assert sol.distance == 0 and sol.output_str == "abcab"


def test_random_against_oracle_and_language():
    rng = np.random.default_rng(11)
    for it in range(60):
        n = int(rng.integers(4, 11))
        k = int(rng.integers(2, min(4, n - 1) + 1))
        cfg = GenConfig(n=n, k=k, sigma=int(rng.integers(2, 4)), patterns=int(rng.integers(0, 4)),
                        mode=("long", "mixed")[it % 2])
        inst, S = random_instance(cfg, rng)
        view = derive_view(inst, S)
        dag = build_decision_dag(view, S)
        _check_shape(dag)
        assert dag.merge_vectors() == valid_merge_vectors(inst, S)
        sol = solve_dag(inst, S)
        assert sol.distance == enumerate_optimal(inst, S)[0]
        assert verify_feasible(sol.output, inst, S).feasible
        if S.ell <= k:
            assert solve_baseline(inst, S).distance == sol.distance
