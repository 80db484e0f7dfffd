"""Decision DAG over merge choices, and the DAG-of-rows solver.

Depth ``d`` of the DAG decides how pattern ``N_d`` is placed: after a
gadget (a #-node) or merged onto the previous pattern (an m-node).  A run
of merges ``N_s .. N_t`` spells ``N_s`` followed by the last letters of
``N_{s+1} .. N_t``; the run is invalid when that spelling is a sensitive
string longer than k (shorter ones cannot occur, every window of the run is
a non-sensitive pattern).  Such a run is a *forbidden span* ``(s, t)``.

Instead of unfolding the decision tree, m-nodes carry a key summarising
where their run starts.  Only the starts of forbidden spans that are still
open matter, so the key at depth ``d`` is the smallest such start that is
at least the run start, or ``d`` itself when none is.  Two m-nodes with the
same depth and key have identical futures, which is what lets the m-child
of a #-node share an existing m-node.
"""

from __future__ import annotations

import bisect
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .etfs_dp import (
    STEP,
    BandRef,
    PatternBand,
    Row,
    Solution,
    band_last,
    combine_rows,
    extract_answer,
    finish_solution,
    gadget_row,
    step_row,
)
from .model import DerivedView, SanitizationInstance, SensitiveSet, derive_view

SOURCE, HASH_NODE, M_NODE, SINK = "source", "hash", "m", "sink"


@dataclass
class DagNode:
    id: int
    kind: str
    depth: int
    key: int = -1
    parents: list = field(default_factory=list)
    children: list = field(default_factory=list)


@dataclass
class DecisionDag:
    view: DerivedView
    nodes: list
    forbidden: list

    @property
    def size(self) -> int:
        return self.view.size

    def at_depth(self, d: int) -> list:
        return [v for v in self.nodes if v.depth == d and v.kind != SINK]

    @property
    def sink(self) -> DagNode | None:
        return next((v for v in self.nodes if v.kind == SINK), None)

    def counts(self) -> dict:
        out = {}
        for v in self.nodes:
            out[v.kind] = out.get(v.kind, 0) + 1
        return out

    def merge_vectors(self) -> set:
        """All source-to-sink paths, each spelled as '#'/'m' choices for depths 1..|I|-1."""
        if self.size == 0:
            return {""}
        memo = {}

        def suffixes(v: DagNode):
            if v.id in memo:
                return memo[v.id]
            if v.kind == SINK:
                res = {""}
            else:
                res = set()
                for cid in v.children:
                    child = self.nodes[cid]
                    tag = "" if child.kind == SINK else ("#" if child.kind == HASH_NODE else "m")
                    res |= {tag + s for s in suffixes(child)}
            memo[v.id] = res
            return res

        return suffixes(self.nodes[0])

    def to_text(self) -> str:
        lines = []
        for v in self.nodes:
            key = f" key={v.key}" if v.kind == M_NODE else ""
            lines.append(f"node {v.id} {v.kind} depth={v.depth}{key}")
        for v in self.nodes:
            for c in v.children:
                lines.append(f"edge {v.id} -> {c}")
        return "\n".join(lines) + "\n"


def forbidden_spans(view: DerivedView, S: SensitiveSet) -> list[tuple[int, int]]:
    """Pairs ``(s, t)`` such that merging ``N_s .. N_t`` spells a long sensitive string.

    For each start only the shortest such span is kept; longer ones contain it.
    """
    inst = view.instance
    k = inst.k
    text = inst.text
    by_len: dict[int, set] = {}
    for i, j in S.intervals:
        if j - i + 1 > k:
            by_len.setdefault(j - i + 1, set()).add(text[i:j + 1])
    if not by_len:
        return []
    longest = max(by_len)
    I = view.I
    spans = []
    for s in range(view.size):
        spelled = text[I[s]:I[s] + k]
        t = s + 1
        while t < view.size and view.M[t] and len(spelled) < longest:
            spelled += text[I[t] + k - 1]
            if spelled in by_len.get(len(spelled), ()):
                spans.append((s, t))
                break
            t += 1
    return spans


class _SpanIndex:
    def __init__(self, spans, size):
        self.max_start = [-1] * (size + 1)
        self.open_at = [[] for _ in range(size + 1)]
        for s, t in spans:
            self.max_start[t] = max(self.max_start[t], s)
            for d in range(s + 1, t):
                self.open_at[d].append(s)
        for lst in self.open_at:
            lst.sort()

    def step(self, key: int, d: int):
        """Key after merging ``N_d`` onto a run with key ``key``; None if forbidden."""
        if self.max_start[d] >= key:
            return None
        opened = self.open_at[d]
        pos = bisect.bisect_left(opened, key)
        return opened[pos] if pos < len(opened) else d


def build_decision_dag(view: DerivedView, S: SensitiveSet) -> DecisionDag:
    """Build the DAG depth by depth without unfolding the decision tree."""
    spans = forbidden_spans(view, S)
    index = _SpanIndex(spans, view.size)
    nodes: list[DagNode] = []

    def add(kind, depth, key=-1, parents=()):
        v = DagNode(len(nodes), kind, depth, key, list(parents))
        nodes.append(v)
        for p in parents:
            nodes[p].children.append(v.id)
        return v

    if view.size == 0:
        return DecisionDag(view, [add(SOURCE, 0, 0)], spans)

    layer = [add(SOURCE, 0, 0)]
    for d in range(1, view.size):
        new_layer = [add(HASH_NODE, d, d, [v.id for v in layer])]
        if view.M[d]:
            by_key = {}
            for v in layer:
                if v.kind != M_NODE:
                    continue
                key = index.step(v.key, d)
                if key is not None:
                    child = add(M_NODE, d, key, [v.id])
                    new_layer.append(child)
                    by_key.setdefault(key, child)
            # the run that starts at the #-node (or source) of the previous depth
            starter = next(v for v in layer if v.kind != M_NODE)
            key = index.step(starter.key, d)
            if key is not None:
                if key in by_key:
                    child = by_key[key]
                    child.parents.append(starter.id)
                    starter.children.append(child.id)
                else:
                    new_layer.append(add(M_NODE, d, key, [starter.id]))
        layer = new_layer
    add(SINK, view.size, parents=[v.id for v in layer])
    return DecisionDag(view, nodes, spans)


def combine_parent_rows(rows: list[Row], label="") -> Row:
    """Pointwise minimum; ties go to the first row (callers pass them by node id)."""
    if not rows:
        raise DomainError("need at least one parent row")
    width = rows[0].values.size
    if any(r.values.size != width for r in rows):
        raise DomainError("parent rows differ in width")
    return combine_rows(rows, label)


def extract_answer_aetfs(last_rows: Row | None, sink: Row, F):
    """Best of the combined last rows' rightmost cell and the sink-row window ``(F[n], n]``."""
    return extract_answer(last_rows, sink, F)


def fill_dag(dag: DecisionDag, c, keep_table: bool = True):
    """Compute every node's rows; returns ``(last rows by node id, sink row, combined final row)``."""
    view = dag.view
    W = view.instance.W
    floor = view.floor
    last: dict[int, Row] = {}
    for v in dag.nodes:
        if v.kind == SINK:
            break
        if v.kind == M_NODE:
            parents = [last[p] for p in sorted(v.parents)]
            above = combine_parent_rows(parents, label=f"c{v.id}")
            letter = int(view.last_letters()[v.depth])
            last[v.id] = Row(STEP, step_row(above.values, letter, W, c), letter=letter,
                             above=above, label=f"m{v.id}")
            continue
        if v.kind == SOURCE:
            top = gadget_row(None, floor, c, label="g0")
        else:
            above = combine_parent_rows([last[p] for p in sorted(v.parents)], label=f"c{v.id}")
            top = gadget_row(above, floor, c, label=f"g{v.id}")
        pat = view.pattern(v.depth)
        band = PatternBand(top, pat[:-1], W, c, transient=not keep_table)
        pre = band_last(top.values, pat[:-1], W, c)
        last[v.id] = Row(STEP, step_row(pre, int(pat[-1]), W, c), letter=int(pat[-1]),
                         above=BandRef(band, pat.size - 2), label=f"h{v.id}")
    sink = dag.sink
    final = combine_parent_rows([last[p] for p in sorted(sink.parents)], label="final")
    return last, gadget_row(final, floor, c, label="sink"), final


def solve_dag(instance: SanitizationInstance, S: SensitiveSet, keep_table: bool = True) -> Solution:
    """Exact solver for sensitive patterns of any length."""
    started = time.perf_counter()
    c = instance.costs
    view = derive_view(instance, S)
    dag = build_decision_dag(view, S)
    if view.size == 0:
        row0 = gadget_row(None, view.floor, c, label="g0")
        cost, terminal = extract_answer(None, row0, view.F)
    else:
        _, sink, final = fill_dag(dag, c, keep_table)
        cost, terminal = extract_answer_aetfs(final, sink, view.F)
    stats = {"nodes": dag.counts(), "forbidden_spans": len(dag.forbidden)}
    return finish_solution(instance, cost, terminal, view.floor, c, "dag", started, stats)
