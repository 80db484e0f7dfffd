"""Dyadic block acceleration for both solvers.

Rows of a pattern band are W-letters ``W[p .. p+k-1]``; the interval is cut
into aligned power-of-two pieces.  A piece of length ``b`` is pushed through
the table as a strip of ``b x b`` blocks whose columns are the aligned
``b``-tiles of W, so every block is a pair of aligned tiles and its distance
table can be shared by content.  Strips cost O(n) each through SMAWK
instead of O(n b) for the plain rows.

The DAG solver additionally contracts runs of m-nodes.  A run covering an
aligned dyadic depth interval becomes a j-node, propagated the same way
with the pattern last letters as its row string.  Rows at the interior
depths are only needed as inputs of the following #-nodes; every run with
the same depth interval shares one c-node (the minimum of their inputs)
and one copy path producing those rows.
"""

from __future__ import annotations

import math
import time
from collections import OrderedDict
from dataclasses import dataclass, field

import numba
import numpy as np

from .aetfs_dag import HASH_NODE, M_NODE, SINK, SOURCE, DecisionDag, build_decision_dag
from .block_engine import BIG, DistTable, _build_dist, _smawk_ws, block_grid, smawk_workspace, trace_inputs
from .errors import DomainError, LongPatternError
from .etfs_dp import (
    BAND,
    MERGECOMBO,
    STEP,
    EditOp,
    Row,
    combine_rows,
    extract_answer,
    finish_solution,
    gadget_row,
    solve_baseline,
    step_row,
)
from .model import IntCosts, SanitizationInstance, SensitiveSet, derive_view

DEFAULT_CUTOFF = 8
DEFAULT_MAX_LEVEL = 5
# blocks this narrow are scanned directly; SMAWK bookkeeping costs more
SCAN_BELOW = 4

# --- dyadic intervals --------------------------------------------------------


def dyadic_decompose(m: int, cap: int) -> list[list[tuple[int, int]]]:
    """Aligned tilings of ``[0, m-1]``, one per level ``0..cap`` (last tile may be short)."""
    if m < 1:
        raise DomainError("length must be positive")
    return [[(s, min(s + (1 << i), m) - 1) for s in range(0, m, 1 << i)] for i in range(cap + 1)]


def decompose_interval(lo: int, hi: int, cap: int) -> list[tuple[int, int]]:
    """Greedy largest-first cover of ``[lo, hi]`` by aligned pieces; ``(start, level)`` pairs."""
    pieces = []
    p = lo
    while p <= hi:
        level = min(cap, (p & -p).bit_length() - 1) if p else cap
        while p + (1 << level) - 1 > hi:
            level -= 1
        pieces.append((p, level))
        p += 1 << level
    return pieces


# --- lookup bank -------------------------------------------------------------


class LookupBank:
    """Distance tables keyed by (row string, W tile content), built on first use.

    For each level the aligned full tiles of W get content ids.  A row string
    maps to one slot per distinct tile content; row strings are kept in LRU
    order and evicted beyond ``capacity`` per level to bound memory.
    """

    def __init__(self, W, costs: IntCosts, max_level: int, span: int | None = None):
        self.W = np.ascontiguousarray(W, dtype=np.int64)
        self.costs = costs
        self.max_level = max_level
        n = self.W.size
        span = span or n
        self.tile_ids = []
        self.reps = []
        self.pools = []
        self.free = []
        self.rows = []
        self.capacity = []
        self.builds = 0
        for i in range(max_level + 1):
            b = 1 << i
            T = n // b
            tiles = self.W[: T * b].reshape(T, b) if T else np.empty((0, b), np.int64)
            uniq, first, inverse = np.unique(tiles, axis=0, return_index=True, return_inverse=True)
            self.tile_ids.append(np.ascontiguousarray(inverse.reshape(-1), dtype=np.int64))
            self.reps.append(first * b)
            self.pools.append(np.empty((0, 2 * b + 1, 2 * b + 1), dtype=np.int64))
            self.free.append([])
            self.rows.append(OrderedDict())
            self.capacity.append(2 * -(-span // b) + 8)

    def _alloc(self, level: int, count: int) -> np.ndarray:
        free = self.free[level]
        while len(free) < count:
            pool = self.pools[level]
            grow = max(count - len(free), pool.shape[0], 8)
            extra = np.empty((grow,) + pool.shape[1:], dtype=np.int64)
            self.free[level].extend(range(pool.shape[0] + grow - 1, pool.shape[0] - 1, -1))
            self.pools[level] = np.concatenate([pool, extra])
        return np.array([free.pop() for _ in range(count)], dtype=np.int64)

    def entry(self, level: int, rows) -> np.ndarray:
        """Slot per distinct tile content for this row string (built if missing)."""
        rows = np.ascontiguousarray(rows, dtype=np.int64)
        key = rows.tobytes()
        table = self.rows[level]
        slots = table.get(key)
        if slots is not None:
            table.move_to_end(key)
            return slots
        b = 1 << level
        reps = self.reps[level]
        slots = self._alloc(level, len(reps))
        c = self.costs
        _build_many(rows, self.W, reps, b, self.pools[level], slots, c.ins, c.dele, c.sub, BIG)
        self.builds += len(reps)
        table[key] = slots
        if len(table) > self.capacity[level]:
            _, old = table.popitem(last=False)
            self.free[level].extend(old.tolist())
        return slots

    def tile_slots(self, level: int, rows) -> np.ndarray:
        return self.entry(level, rows)[self.tile_ids[level]]

    def table(self, level: int, rows, tile: int) -> DistTable:
        """The stored table for ``rows`` against full tile number ``tile``."""
        b = 1 << level
        slot = self.entry(level, rows)[self.tile_ids[level][tile]]
        return DistTable(np.asarray(rows, np.int64), self.W[tile * b:(tile + 1) * b], self.costs,
                         self.pools[level][slot].copy())

    def __len__(self):
        return sum(len(t) * len(r) for t, r in zip(self.rows, self.reps))


@numba.njit(cache=True)
def _build_many(rows, W, reps, b, pool, slots, ins, dele, sub, big):
    for cid in range(reps.size):
        start = reps[cid]
        pool[slots[cid]] = _build_dist(rows, W[start:start + b], ins, dele, sub, big)


def build_bank(W, view, S: SensitiveSet, costs: IntCosts, max_level: int = DEFAULT_MAX_LEVEL) -> LookupBank:
    """Empty bank sized for the instance; entries fill in on first use."""
    k = view.instance.k
    span = max(k, S.ell)
    cap = min(max_level, int(math.log2(span)))
    return LookupBank(W, costs, cap, span)


# --- strips and bands --------------------------------------------------------


@numba.njit(cache=True)
def _strip(top, rows, W, b, pool, tile_slots, ins, dele, sub, left_rec, record):
    """Push ``top`` through one strip of ``b x b`` blocks plus a partial tail block."""
    n1 = top.size
    n = n1 - 1
    R = rows.size
    T = tile_slots.size
    left = np.empty(R + 1, dtype=np.int64)
    for u in range(R + 1):
        left[u] = top[0] + (R - u) * ins
    bottom = np.empty(n1, dtype=np.int64)
    bottom[0] = left[0]
    m = R + b + 1
    inp = np.empty(m, dtype=np.int64)
    arg = np.empty(m, dtype=np.int64)
    buf, meta = smawk_workspace(m, m)
    for t in range(T):
        if record:
            left_rec[t, :] = left
        col0 = t * b
        for u in range(R + 1):
            inp[u] = left[u]
        for q in range(1, b + 1):
            inp[R + q] = top[col0 + q]
        D = pool[tile_slots[t]]
        if b <= SCAN_BELOW:
            for v in range(m):
                best = 0
                bv = inp[0] + D[v, 0]
                for u in range(1, m):
                    x = inp[u] + D[v, u]
                    if x < bv:
                        bv = x
                        best = u
                arg[v] = best
        else:
            _smawk_ws(inp, D, arg, buf, meta)
        for v in range(m):
            val = inp[arg[v]] + D[v, arg[v]]
            if v <= b:
                bottom[col0 + v] = val
            if v >= b:
                left[v - b] = val
    col0 = T * b
    if col0 < n:
        if record:
            left_rec[T, :] = left
        C = n - col0
        tin = np.empty(R + C + 1, dtype=np.int64)
        for u in range(R + 1):
            tin[u] = left[u]
        for q in range(1, C + 1):
            tin[R + q] = top[col0 + q]
        E = block_grid(rows, W[col0:n], tin, ins, dele, sub)
        for v in range(C + 1):
            bottom[col0 + v] = E[R, v]
    return bottom


class DyadicBand:
    """Rows below ``top`` for ``letters``, covered by aligned pieces ``(offset, level)``."""

    def __init__(self, top: Row, letters, pieces, bank: LookupBank):
        self.top = top
        self.letters = np.ascontiguousarray(letters, dtype=np.int64)
        self.pieces = pieces
        self.bank = bank

    def _run(self, record: bool):
        bank = self.bank
        W = bank.W
        c = bank.costs
        cur = self.top.values
        tops, lefts = [], []
        for off, level in self.pieces:
            b = 1 << level
            rows = self.letters[off:off + b]
            slots = bank.tile_slots(level, rows)
            rec = np.empty((slots.size + 1, b + 1) if record else (1, 1), dtype=np.int64)
            tops.append(cur)
            lefts.append(rec)
            cur = _strip(cur, rows, W, b, bank.pools[level], slots, c.ins, c.dele, c.sub, rec, record)
        return cur, tops, lefts

    def compute(self) -> np.ndarray:
        return self._run(False)[0]

    def trace(self, j: int):
        """Path from bottom cell ``j`` to the top row; ops right to left, and the top column."""
        _, tops, lefts = self._run(True)
        W = self.bank.W
        c = self.bank.costs
        n = W.size
        ops = []
        for (off, level), top, rec in zip(reversed(self.pieces), reversed(tops), reversed(lefts)):
            b = 1 << level
            rows = self.letters[off:off + b]
            R = b
            T = n // b
            a = R  # current row inside the strip, on column ``j``
            if j > 0:
                t = min((j - 1) // b, T)
                col0 = t * b
                v = j - col0
                while True:
                    C = min(b, n - col0)
                    inputs = np.concatenate([rec[t], top[col0 + 1:col0 + C + 1]])
                    u, block_ops = trace_inputs(rows, W[col0:col0 + C], inputs, v, c, col0)
                    ops.extend(EditOp(*op) for op in block_ops)
                    if u >= R:
                        j, a = col0 + (u - R), 0
                        break
                    if t == 0:
                        j, a = 0, R - u
                        break
                    t -= 1
                    col0 = t * b
                    v = b + u
            for q in range(a, 0, -1):
                ops.append(EditOp("insert", 0, int(rows[q - 1])))
        return ops, j


def pattern_band(top: Row, start: int, k: int, bank: LookupBank) -> DyadicBand:
    """Band of the pattern ``W[start .. start+k-1]`` below ``top``."""
    pieces = [(p - start, lv) for p, lv in decompose_interval(start, start + k - 1, bank.max_level)]
    return DyadicBand(top, bank.W[start:start + k], pieces, bank)


def band_row(band: DyadicBand, label="") -> Row:
    return Row(BAND, band.compute(), band=band, label=label)


# --- dyadic ETFS -------------------------------------------------------------


def _check_range(instance, view, c: IntCosts):
    bound = (instance.n + (instance.k + 1) * view.size + 2) * c.max
    if bound * 4 >= BIG:
        raise DomainError("cost range too large for the block sentinels; use the baseline solver")


def solve_etfs_dyadic(instance: SanitizationInstance, S: SensitiveSet, cutoff: int = DEFAULT_CUTOFF,
                      max_level: int = DEFAULT_MAX_LEVEL):
    """Block-accelerated version of the baseline table (no long sensitive patterns)."""
    if S.ell > instance.k:
        raise LongPatternError(
            f"sensitive pattern of length {S.ell} > k={instance.k}; use the decision-DAG solver"
        )
    if instance.k <= cutoff:
        sol = solve_baseline(instance, S, keep_table=False)
        sol.algo = "dyadic"
        sol.stats["delegated"] = "baseline"
        return sol
    started = time.perf_counter()
    c = instance.costs
    view = derive_view(instance, S)
    _check_range(instance, view, c)
    bank = build_bank(instance.W, view, S, c, max_level)
    W = instance.W
    k = instance.k
    prev = gadget_row(None, view.floor, c, label="g0")
    last_merge = None
    for h in range(view.size):
        top = prev if h == 0 else gadget_row(prev, view.floor, c, label=f"g{h}")
        brow = band_row(pattern_band(top, int(view.I[h]), k, bank), label=f"b{h}")
        vals = brow.values
        merge_from = last_merge if (h and view.M[h]) else None
        letter = int(view.pattern(h)[-1])
        if merge_from is not None:
            vals = np.minimum(vals, step_row(merge_from.values, letter, W, c))
        last_merge = Row(MERGECOMBO, vals, letter=letter, prev=merge_from, band=brow, label=f"m{h}")
        prev = last_merge
    if view.size:
        sink = gadget_row(prev, view.floor, c, label="close")
        cost, terminal = extract_answer(last_merge, sink, view.F)
    else:
        cost, terminal = extract_answer(None, prev, view.F)
    stats = {"bank_builds": bank.builds, "levels": bank.max_level}
    return finish_solution(instance, cost, terminal, view.floor, c, "dyadic", started, stats)


# --- reduced DAG -------------------------------------------------------------

J_NODE, C_NODE, COPY = "j", "c", "copy"


@dataclass
class RNode:
    id: int
    kind: str
    depth: int  # last depth this node's row stands for
    span: int = 1  # depths covered (j-nodes)
    parents: list = field(default_factory=list)
    children: list = field(default_factory=list)
    origin: tuple = ()  # original m-node ids contracted here

    @property
    def tag(self) -> str:
        if self.kind == HASH_NODE:
            return "#"
        if self.kind in (M_NODE, COPY):
            return "m"
        if self.kind == J_NODE:
            return "m" * self.span
        return ""


@dataclass
class ReducedDag:
    dag: DecisionDag
    nodes: list
    cap: int

    def counts(self) -> dict:
        out = {}
        for v in self.nodes:
            out[v.kind] = out.get(v.kind, 0) + 1
        return out

    def merge_vectors(self) -> set:
        memo = {}

        def suffixes(v: RNode):
            if v.id not in memo:
                if not v.children:
                    memo[v.id] = {""}
                else:
                    res = set()
                    for cid in v.children:
                        child = self.nodes[cid]
                        res |= {child.tag + s for s in suffixes(child)}
                    memo[v.id] = res
            return memo[v.id]

        if self.dag.size == 0:
            return {""}
        return suffixes(self.nodes[0])


def _segments(dag: DecisionDag):
    """Maximal m-runs, split where an m-node also has a non-m parent."""
    nodes = dag.nodes
    segs = []
    for v in nodes:
        if v.kind != M_NODE:
            continue
        m_parents = [p for p in v.parents if nodes[p].kind == M_NODE]
        if m_parents and len(v.parents) == 1:
            continue  # continues its parent's segment
        seg = [v.id]
        while True:
            nxt = [cid for cid in nodes[seg[-1]].children
                   if nodes[cid].kind == M_NODE and len(nodes[cid].parents) == 1]
            if not nxt:
                break
            seg.append(nxt[0])
        segs.append(seg)
    return segs


def reduce_dag(dag: DecisionDag, cap: int) -> ReducedDag:
    """Contract m-runs into j-nodes over aligned depth pieces of length at most ``2**cap``."""
    nodes = dag.nodes
    size = dag.size
    out: list[RNode] = []

    def add(kind, depth, parents, span=1, origin=()):
        v = RNode(len(out), kind, depth, span, sorted(set(parents)), [], tuple(origin))
        out.append(v)
        for p in v.parents:
            out[p].children.append(v.id)
        return v

    if size == 0:
        add(SOURCE, 0, [])
        return ReducedDag(dag, out, cap)

    # pieces starting at each depth: (original ids, position in segment)
    starts: dict[int, list] = {}
    for seg in _segments(dag):
        d0 = nodes[seg[0]].depth
        first = True
        for p, level in decompose_interval(d0, d0 + len(seg) - 1, cap):
            ids = seg[p - d0:p - d0 + (1 << level)]
            starts.setdefault(p, []).append((ids, first))
            first = False

    mapped: dict[int, int] = {}  # original node -> reduced node holding its row
    exits: dict[int, list] = {d: [] for d in range(size)}
    hashes: dict[int, int] = {}
    prev_out: dict[int, int] = {}  # original last id of a piece -> reduced output node
    for d in range(size):
        if d == 0:
            src = next(v for v in nodes if v.kind == SOURCE)
            hashes[0] = mapped[src.id] = add(SOURCE, 0, []).id
        else:
            hv = next(v for v in dag.at_depth(d) if v.kind == HASH_NODE)
            hashes[d] = mapped[hv.id] = add(HASH_NODE, d, [hashes[d - 1]] + exits[d - 1]).id
        groups: dict[int, RNode] = {}
        for ids, first in sorted(starts.get(d, []), key=lambda e: e[0][0]):
            if first:
                inputs = [mapped[p] for p in nodes[ids[0]].parents]
            else:
                inputs = [prev_out[ids[0]]]
            L = len(ids)
            if L == 1:
                v = add(M_NODE, d, inputs, origin=ids)
                exits[d].append(v.id)
            else:
                if L not in groups:
                    cnode = add(C_NODE, d - 1, inputs)
                    groups[L] = cnode
                    row = cnode
                    for q in range(L - 1):
                        row = add(COPY, d + q, [row.id])
                        exits[d + q].append(row.id)
                else:
                    cnode = groups[L]
                    for p in inputs:
                        if p not in cnode.parents:
                            cnode.parents.append(p)
                            out[p].children.append(cnode.id)
                    cnode.parents.sort()
                v = add(J_NODE, d + L - 1, inputs, span=L, origin=ids)
                exits[d + L - 1].append(v.id)
            mapped[ids[-1]] = v.id
            # the next piece of the same segment starts from this node's row
            nxt = [cid for cid in nodes[ids[-1]].children
                   if nodes[cid].kind == M_NODE and len(nodes[cid].parents) == 1]
            if nxt:
                prev_out[nxt[0]] = v.id
    add(SINK, size, [hashes[size - 1]] + exits[size - 1])
    return ReducedDag(dag, out, cap)


def solve_aetfs_dyadic(instance: SanitizationInstance, S: SensitiveSet, cutoff: int = DEFAULT_CUTOFF,
                       max_level: int = DEFAULT_MAX_LEVEL):
    """Block-accelerated DAG solver over the reduced DAG."""
    if instance.k <= cutoff:
        from .aetfs_dag import solve_dag

        sol = solve_dag(instance, S, keep_table=False)
        sol.algo = "aetfs-dyadic"
        sol.stats["delegated"] = "dag"
        return sol
    started = time.perf_counter()
    c = instance.costs
    view = derive_view(instance, S)
    _check_range(instance, view, c)
    W = instance.W
    k = instance.k
    bank = build_bank(W, view, S, c, max_level)
    dag = build_decision_dag(view, S)
    if view.size == 0:
        row0 = gadget_row(None, view.floor, c, label="g0")
        cost, terminal = extract_answer(None, row0, view.F)
        return finish_solution(instance, cost, terminal, view.floor, c, "aetfs-dyadic", started)
    red = reduce_dag(dag, bank.max_level)
    lastl = view.last_letters()
    rows: dict[int, Row] = {}

    def combined(v: RNode, label):
        return combine_rows([rows[p] for p in v.parents], label=label)

    for v in red.nodes:
        if v.kind == SINK:
            final = combined(v, "final")
            sink = gadget_row(final, view.floor, c, label="sink")
            cost, terminal = extract_answer(final, sink, view.F)
            break
        if v.kind in (SOURCE, HASH_NODE):
            top = (gadget_row(None, view.floor, c, label="g0") if v.kind == SOURCE
                   else gadget_row(combined(v, f"c{v.id}"), view.floor, c, label=f"g{v.id}"))
            rows[v.id] = band_row(pattern_band(top, int(view.I[v.depth]), k, bank), label=f"h{v.id}")
        elif v.kind == C_NODE:
            rows[v.id] = combined(v, f"c{v.id}")
        elif v.kind in (M_NODE, COPY):
            above = combined(v, f"c{v.id}")
            letter = int(lastl[v.depth])
            rows[v.id] = Row(STEP, step_row(above.values, letter, W, c), letter=letter,
                             above=above, label=f"{v.kind}{v.id}")
        elif v.kind == J_NODE:
            lo = v.depth - v.span + 1
            band = DyadicBand(combined(v, f"c{v.id}"), lastl[lo:v.depth + 1],
                              [(p - lo, lv) for p, lv in decompose_interval(lo, v.depth, bank.max_level)],
                              bank)
            rows[v.id] = band_row(band, label=f"j{v.id}")
    stats = {"nodes": red.counts(), "bank_builds": bank.builds, "levels": bank.max_level}
    return finish_solution(instance, cost, terminal, view.floor, c, "aetfs-dyadic", started, stats)
