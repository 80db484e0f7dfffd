"""Baseline dynamic program over the template ⊖N_0⊕N_1⊕...⊕N_{|I|-1}⊗.

Rows of the table are linked :class:`Row` objects rather than a dense
matrix.  Every row knows which rows it was computed from, so the traceback
re-derives each predecessor by recomputing the candidate costs instead of
storing a backpointer plane.  Costs are scaled integers (see
``Weights.integer_costs``), which keeps those equality tests exact.

Gadget rows use the window-floor form of the recurrence.  Under the
normal form for optimal alignments (gadget '#'s substituted for W letters,
gadget letters matched, nothing inserted inside a gadget) a gadget that
ends at column ``j`` can extend back only to ``floor[j-1] + 1``; no
separate code path is needed for short sensitive patterns.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numba
import numpy as np

from .errors import LongPatternError
from .model import (
    HASH,
    DerivedView,
    IntCosts,
    SanitizationInstance,
    SensitiveSet,
    derive_view,
)

# --- row kernels -------------------------------------------------------------


def relax_deletions(row: np.ndarray, dele: int) -> np.ndarray:
    """Close a row under ``E[j] = min(E[j], E[j-1] + dele)``."""
    ramp = np.arange(row.size, dtype=np.int64) * dele
    return np.minimum.accumulate(row - ramp) + ramp


def step_candidates(above: np.ndarray, letter: int, W: np.ndarray, c: IntCosts) -> np.ndarray:
    """Insert and match/substitute options from the row above, before deletions."""
    cand = above + c.ins
    diag = above[:-1] + np.where(W == letter, 0, c.sub)
    np.minimum(cand[1:], diag, out=cand[1:])
    return cand


def step_row(above: np.ndarray, letter: int, W: np.ndarray, c: IntCosts) -> np.ndarray:
    return relax_deletions(step_candidates(above, letter, W, c), c.dele)


def step_ordinary_cell(up, left, diag, t_letter, w_letter, c: IntCosts):
    """One ordinary-row cell; returns ``(cost, tag)`` with tie order diag > up > left."""
    options = [
        (diag + (0 if t_letter == w_letter else c.sub), "diag"),
        (up + c.ins, "up"),
        (left + c.dele, "left"),
    ]
    best = min(cost for cost, _ in options)
    return best, next(tag for cost, tag in options if cost == best)


def step_mergeable_cell(up, left, diag, merge_up, merge_diag, mergeable, t_letter, w_letter, c: IntCosts):
    """One possibly-mergeable cell; merge options only count when ``mergeable``."""
    sub = 0 if t_letter == w_letter else c.sub
    options = [(diag + sub, "diag")]
    if mergeable:
        options.append((merge_diag + sub, "merge-diag"))
    options.append((up + c.ins, "up"))
    if mergeable:
        options.append((merge_up + c.ins, "merge-up"))
    options.append((left + c.dele, "left"))
    best = min(cost for cost, _ in options)
    return best, next(tag for cost, tag in options if cost == best)


@numba.njit(cache=True)
def _gadget_row_kernel(r, has_parent, floor, ins, dele, sub):
    n1 = floor.size
    G = np.empty(n1, dtype=np.int64)
    G[0] = r[0] + ins if has_parent else 0
    # two monotone deques of column indices (window minima of G)
    dq_s = np.empty(n1, dtype=np.int64)
    dq_i = np.empty(n1, dtype=np.int64)
    hs = ts = hi = ti = 0
    for j in range(1, n1):
        p = j - 1
        gp = G[p]
        while ts > hs and G[dq_s[ts - 1]] >= gp:
            ts -= 1
        dq_s[ts] = p
        ts += 1
        while ti > hi and G[dq_i[ti - 1]] >= gp:
            ti -= 1
        dq_i[ti] = p
        ti += 1

        best = gp + dele
        if has_parent:
            v = r[j] + ins
            if v < best:
                best = v
            v = r[j - 1] + sub
            if v < best:
                best = v
        lo = floor[j - 1] + 1
        while hs < ts and dq_s[hs] < lo:
            hs += 1
        if hs < ts:
            v = G[dq_s[hs]] + sub
            if v < best:
                best = v
        lo = floor[j] + 1
        while hi < ti and dq_i[hi] < lo:
            hi += 1
        if hi < ti:
            v = G[dq_i[hi]] + ins
            if v < best:
                best = v
        G[j] = best
    return G


def compute_gadget_row_fast(r, floor, c: IntCosts) -> np.ndarray:
    """Gadget row from the combined parent row ``r`` (``None`` for the leading ⊖ row).

    ``floor`` is the window-floor array (``compute_window_floor``); a clipped
    F array works too but loses the distinction between "blocked at 0" and
    "unconstrained".  Window minima are kept in monotone deques whose fronts
    are the rolling argmins, so each cell costs O(1) amortized.
    """
    floor = np.asarray(floor, dtype=np.int64)
    has_parent = r is not None
    rr = np.asarray(r, dtype=np.int64) if has_parent else np.zeros(floor.size, np.int64)
    return _gadget_row_kernel(rr, has_parent, floor, c.ins, c.dele, c.sub)


# --- row graph ---------------------------------------------------------------

GADGET, STEP, MERGEABLE, COMBINED, BAND, MERGECOMBO = (
    "gadget", "step", "mergeable", "combined", "band", "mergecombo",
)


@numba.njit(cache=True)
def _band_rows(top, letters, W, ins, dele, sub, keep_all):
    """Ordinary rows for ``letters`` below ``top``; all of them or just the last."""
    n1 = top.size
    L = letters.size
    out = np.empty((L if keep_all else 1, n1), dtype=np.int64)
    prev = top.copy()
    cur = np.empty(n1, dtype=np.int64)
    for i in range(L):
        t = letters[i]
        cur[0] = prev[0] + ins
        for j in range(1, n1):
            best = prev[j - 1] + (0 if W[j - 1] == t else sub)
            v = prev[j] + ins
            if v < best:
                best = v
            v = cur[j - 1] + dele
            if v < best:
                best = v
            cur[j] = best
        if keep_all:
            out[i, :] = cur
        prev, cur = cur, prev
    if not keep_all:
        out[0, :] = prev
    return out


def band_last(top: np.ndarray, letters, W, c: IntCosts) -> np.ndarray:
    """Row reached from ``top`` after one ordinary row per letter."""
    letters = np.ascontiguousarray(letters, dtype=np.int64)
    if letters.size == 0:
        return top
    return _band_rows(top, letters, W, c.ins, c.dele, c.sub, False)[0]


class BandRef(NamedTuple):
    band: "PatternBand"
    index: int


class Row:
    """One DP row plus the rows it was derived from.

    ``above``   row used by insert/match steps (combined row for gadget rows);
                may be a ``BandRef`` into rows that are rebuilt on demand
    ``prev``    previous mergeable row feeding merge steps, if merging is allowed
    ``parents`` / ``provenance``  for combined rows
    ``band``    block-propagated band (dyadic solvers) producing this row
    ``lazy``    the ``PatternBand`` this row belongs to, if any
    """

    __slots__ = ("kind", "values", "letter", "_above", "prev", "parents", "provenance", "band", "lazy", "label")

    def __init__(self, kind, values=None, letter=None, above=None, prev=None, parents=None,
                 provenance=None, band=None, label=""):
        self.kind = kind
        self.values = values
        self.letter = letter
        self._above = above
        self.prev = prev
        self.parents = parents
        self.provenance = provenance
        self.band = band
        self.lazy = None
        self.label = label

    @property
    def above(self):
        ref = self._above
        if isinstance(ref, BandRef):
            return ref.band.row(ref.index)
        return ref

    def __repr__(self):
        return f"Row({self.kind}, {self.label})"


class PatternBand:
    """Ordinary rows of one pattern below its gadget row, rebuilt when needed."""

    def __init__(self, top: Row, letters, W, costs: IntCosts, transient: bool = False):
        self.top = top
        self.letters = np.ascontiguousarray(letters, dtype=np.int64)
        self.W = W
        self.costs = costs
        self.transient = transient
        self._rows = None

    def materialize(self) -> list:
        if self._rows is None:
            c = self.costs
            mat = _band_rows(self.top.values, self.letters, self.W, c.ins, c.dele, c.sub, True)
            rows = []
            above = self.top
            for i, letter in enumerate(self.letters.tolist()):
                above = Row(STEP, mat[i], letter=letter, above=above)
                above.lazy = self
                rows.append(above)
            self._rows = rows
        return self._rows

    def row(self, i: int) -> Row:
        return self.materialize()[i]

    def release(self):
        self._rows = None


def combine_rows(parents: list[Row], label="") -> Row:
    """Pointwise minimum of parent rows; ties go to the earliest parent."""
    if len(parents) == 1:
        only = parents[0]
        return Row(COMBINED, only.values, parents=[only],
                   provenance=np.zeros(only.values.size, np.int64), label=label)
    stacked = np.vstack([p.values for p in parents])
    prov = np.argmin(stacked, axis=0)
    vals = stacked[prov, np.arange(stacked.shape[1])]
    return Row(COMBINED, vals, parents=list(parents), provenance=prov, label=label)


def gadget_row(parent: Row | None, floor, c: IntCosts, label="") -> Row:
    r = parent.values if parent is not None else None
    return Row(GADGET, compute_gadget_row_fast(r, floor, c), above=parent, label=label)


def merge_step_row(parent: Row, letter: int, W, c: IntCosts, label="") -> Row:
    """m-node row: the merge recurrence fed only by the previous mergeable row."""
    return Row(STEP, step_row(parent.values, letter, W, c), letter=letter, above=parent, label=label)


# --- edit scripts ------------------------------------------------------------


class EditOp(NamedTuple):
    kind: str  # match | substitute | insert | delete
    wpos: int
    sym: int  # output symbol id (HASH for '#'); W letter for delete


@dataclass(frozen=True)
class EditScript:
    ops: tuple

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)

    def cost(self, c: IntCosts) -> int:
        total = 0
        for op in self.ops:
            if op.kind == "substitute":
                total += c.sub
            elif op.kind == "insert":
                total += c.ins
            elif op.kind == "delete":
                total += c.dele
        return total


def replay(script: EditScript, W, c: IntCosts):
    """Apply a script to W; returns ``(output ids, scaled cost)``.

    Raises ``ValueError`` when the script is inconsistent with W.
    """
    W = list(W)
    out = []
    pos = 0
    total = 0
    for op in script:
        if op.kind == "insert":
            if op.wpos != pos:
                raise ValueError(f"insert at {op.wpos} while at {pos}")
            out.append(op.sym)
            total += c.ins
            continue
        if op.wpos != pos:
            raise ValueError(f"{op.kind} at {op.wpos} while at {pos}")
        if op.kind == "match":
            if W[pos] != op.sym:
                raise ValueError(f"match of {op.sym} against W[{pos}]={W[pos]}")
            out.append(op.sym)
        elif op.kind == "substitute":
            if W[pos] == op.sym:
                raise ValueError(f"substitution by the same letter at {pos}")
            out.append(op.sym)
            total += c.sub
        elif op.kind == "delete":
            total += c.dele
        else:
            raise ValueError(f"unknown op {op.kind}")
        pos += 1
    if pos != len(W):
        raise ValueError(f"script consumed {pos} of {len(W)} letters")
    return out, total


@dataclass
class Solution:
    distance: float
    cost: int
    output: list
    script: EditScript
    algo: str
    instance: SanitizationInstance = field(repr=False)
    stats: dict = field(default_factory=dict)

    @property
    def output_str(self) -> str:
        return self.instance.decode(self.output)

    def to_json(self) -> dict:
        inst = self.instance
        return {
            "distance": self.distance,
            "output": self.output_str,
            "script": [
                {"op": op.kind, "wpos": op.wpos,
                 "sym": "" if op.kind == "delete" else inst.decode([op.sym])}
                for op in self.script
            ],
            "algo": self.algo,
            "millis": self.stats.get("millis", 0.0),
        }


# --- traceback ---------------------------------------------------------------


def _diag_op(letter, j, W):
    w = int(W[j - 1])
    return EditOp("match", j - 1, w) if w == letter else EditOp("substitute", j - 1, int(letter))


def trace_step(row: Row, j: int, W, floor, c: IntCosts):
    """One traceback step from cell ``(row, j)``.

    Returns ``(tag, next_row, next_j, ops)`` where ``ops`` are emitted right
    to left, or ``None`` at the origin.  Tie order: diag > merge-diag > up >
    merge-up > left > gadget window (narrowest first).
    """
    vals = row.values
    e = vals[j]
    kind = row.kind
    if kind == COMBINED:
        parent = row.parents[int(row.provenance[j])]
        return "parent", parent, j, []

    if kind == GADGET:
        R = row.above
        if R is None and j == 0:
            return None
        if R is not None:
            rv = R.values
            if j >= 1 and rv[j - 1] + c.sub == e:
                return "r-diag", R, j - 1, [EditOp("substitute", j - 1, HASH)]
            if rv[j] + c.ins == e:
                return "r-up", R, j, [EditOp("insert", j, HASH)]
        if j >= 1 and vals[j - 1] + c.dele == e:
            return "left", row, j - 1, [EditOp("delete", j - 1, int(W[j - 1]))]
        for jp in range(j - 1, int(floor[j - 1]), -1):
            if vals[jp] + c.sub == e:
                ops = [EditOp("substitute", j - 1, HASH)]
                ops += [EditOp("match", q, int(W[q])) for q in range(j - 2, jp - 1, -1)]
                return f"gadget-window({j - jp})", row, jp, ops
        for jp in range(j - 1, int(floor[j]), -1):
            if vals[jp] + c.ins == e:
                ops = [EditOp("insert", j, HASH)]
                ops += [EditOp("match", q, int(W[q])) for q in range(j - 1, jp - 1, -1)]
                return f"gadget-window-ins({j - jp})", row, jp, ops
        raise AssertionError(f"no predecessor for gadget cell {j}")

    if kind == BAND:
        ops, top_j = row.band.trace(j)
        return "band", row.band.top, top_j, ops

    if kind == MERGECOMBO:
        if row.band.values[j] == e:
            return "band", row.band, j, []
        P = row.prev
        t = row.letter
        if P is not None:
            pv = P.values
            if j >= 1 and pv[j - 1] + (0 if W[j - 1] == t else c.sub) == e:
                return "merge-diag", P, j - 1, [_diag_op(t, j, W)]
            if pv[j] + c.ins == e:
                return "merge-up", P, j, [EditOp("insert", j, int(t))]
        if j >= 1 and vals[j - 1] + c.dele == e:
            return "left", row, j - 1, [EditOp("delete", j - 1, int(W[j - 1]))]
        raise AssertionError(f"no predecessor for merge cell {j}")

    # STEP / MERGEABLE
    t = row.letter
    A = row.above
    av = A.values
    P = row.prev if kind == MERGEABLE else None
    pv = P.values if P is not None else None
    if j >= 1:
        sub = 0 if W[j - 1] == t else c.sub
        if av[j - 1] + sub == e:
            return "diag", A, j - 1, [_diag_op(t, j, W)]
        if pv is not None and pv[j - 1] + sub == e:
            return "merge-diag", P, j - 1, [_diag_op(t, j, W)]
    if av[j] + c.ins == e:
        return "up", A, j, [EditOp("insert", j, int(t))]
    if pv is not None and pv[j] + c.ins == e:
        return "merge-up", P, j, [EditOp("insert", j, int(t))]
    if j >= 1 and vals[j - 1] + c.dele == e:
        return "left", row, j - 1, [EditOp("delete", j - 1, int(W[j - 1]))]
    raise AssertionError(f"no predecessor for {kind} cell {j}")


def trace_back(row: Row, j: int, W, floor, c: IntCosts, trailing_from: int | None = None) -> EditScript:
    """Follow predecessors from ``(row, j)`` to the origin and return the script."""
    rev = []
    if trailing_from is not None:
        rev += [EditOp("match", q, int(W[q])) for q in range(len(W) - 1, trailing_from - 1, -1)]
    live = None  # band whose rows are currently materialized
    while True:
        peeked = row._above.band if isinstance(row._above, BandRef) else None
        step = trace_step(row, j, W, floor, c)
        if step is None:
            break
        _, row, j, ops = step
        rev.extend(ops)
        if peeked is not None and peeked.transient and peeked is not row.lazy:
            peeked.release()
        if row.lazy is not live:
            if live is not None and live.transient:
                live.release()
            live = row.lazy
    rev.reverse()
    return EditScript(tuple(rev))


# --- answer extraction -------------------------------------------------------


def extract_answer(last_mergeable: Row | None, last_gadget: Row, F) -> tuple[int, tuple]:
    """Best of the last mergeable row's rightmost cell and the final gadget-row window.

    Returns ``(cost, (row, column))``.  A terminal in the gadget row at column
    ``j < n`` means the output ends with ``W[j..n-1]`` matched after a '#'.
    """
    n = last_gadget.values.size - 1
    best = None
    if last_mergeable is not None:
        best = (int(last_mergeable.values[n]), (last_mergeable, n))
    g = last_gadget.values
    for j in range(n, int(F[n]), -1):
        if best is None or g[j] < best[0]:
            best = (int(g[j]), (last_gadget, j))
    return best


# --- baseline table ----------------------------------------------------------


def init_first_column(view: DerivedView, c: IntCosts) -> np.ndarray:
    """Column 0 of the full table, straight from the column recurrence."""
    k = view.instance.k
    rows = (k + 1) * view.size + 1
    col = np.zeros(rows, dtype=np.int64)
    for i in range(1, rows):
        col[i] = col[i - 1] + c.ins
        if i % (k + 1) == k:
            h = i // (k + 1)
            if view.M[h]:
                col[i] = min(col[i], col[i - k - 1] + c.ins)
    return col


class DpTable:
    """Rows of the baseline table indexed by template position.

    Interior rows of each pattern are stored as ``BandRef`` entries and
    rebuilt on access.
    """

    def __init__(self, view: DerivedView, entries: list, costs: IntCosts):
        self.view = view
        self.entries = entries
        self.costs = costs

    @property
    def shape(self):
        return len(self.entries), self.view.instance.n + 1

    def row(self, i: int) -> Row:
        e = self.entries[i]
        return e.band.row(e.index) if isinstance(e, BandRef) else e

    def E(self, i: int) -> np.ndarray:
        return self.row(i).values

    def dense(self) -> np.ndarray:
        return np.vstack([self.E(i) for i in range(len(self.entries))])

    def row_class(self, i: int) -> str:
        k1 = self.view.instance.k + 1
        if i % k1 == 0:
            return "gadget"
        return "mergeable" if i % k1 == k1 - 1 else "ordinary"

    def backptr(self, i: int, j: int) -> str | None:
        step = trace_step(self.row(i), j, self.view.instance.W, self.view.floor, self.costs)
        return None if step is None else step[0]

    @property
    def last_mergeable(self) -> Row | None:
        return self.entries[-2] if len(self.entries) > 1 else None

    @property
    def last_gadget(self) -> Row:
        return self.entries[-1]


def fill_table(view: DerivedView, c: IntCosts, keep_table: bool = True) -> DpTable:
    inst = view.instance
    W = inst.W
    entries = [gadget_row(None, view.floor, c, label="g0")]
    prev_merge = None
    for h in range(view.size):
        top = entries[-1] if h == 0 else gadget_row(entries[-1], view.floor, c, label=f"g{h}")
        if h:
            entries.append(top)
        pat = view.pattern(h)
        band = PatternBand(top, pat[:-1], W, c, transient=not keep_table)
        entries.extend(BandRef(band, i) for i in range(pat.size - 1))
        last = int(pat[-1])
        cand = step_candidates(band_last(top.values, pat[:-1], W, c), last, W, c)
        merge_from = prev_merge if (h and view.M[h]) else None
        if merge_from is not None:
            np.minimum(cand, step_candidates(merge_from.values, last, W, c), out=cand)
        mrow = Row(MERGEABLE, relax_deletions(cand, c.dele), letter=last,
                   above=BandRef(band, pat.size - 2), prev=merge_from, label=f"m{h}")
        entries.append(mrow)
        prev_merge = mrow
    if view.size:
        entries.append(gadget_row(prev_merge, view.floor, c, label="close"))
    return DpTable(view, entries, c)


def extract_answer_etfs(table: DpTable, view: DerivedView):
    return extract_answer(table.last_mergeable, table.last_gadget, view.F)


def finish_solution(instance, cost, terminal, floor, c: IntCosts, algo, started, stats=None) -> Solution:
    row, j = terminal
    n = instance.n
    trailing = j if (row.kind == GADGET and j < n) else None
    script = trace_back(row, j, instance.W, floor, c, trailing_from=trailing)
    output, replay_cost = replay(script, instance.W.tolist(), c)
    if replay_cost != cost:
        raise AssertionError(f"traceback cost {replay_cost} != table cost {cost}")
    stats = dict(stats or {})
    stats["millis"] = (time.perf_counter() - started) * 1000.0
    return Solution(cost / c.scale, cost, output, script, algo, instance, stats)


def solve_baseline(instance: SanitizationInstance, S: SensitiveSet, keep_table: bool = True) -> Solution:
    """Baseline table DP; handles short and length-k sensitive patterns."""
    if S.ell > instance.k:
        raise LongPatternError(
            f"sensitive pattern of length {S.ell} > k={instance.k}; use the decision-DAG solver"
        )
    started = time.perf_counter()
    c = instance.costs
    view = derive_view(instance, S)
    table = fill_table(view, c, keep_table=keep_table)
    if view.size == 0:
        # single ⊖ row: output is gadget-only
        cost, terminal = extract_answer(None, table.entries[0], view.F)
    else:
        cost, terminal = extract_answer_etfs(table, view)
    cells = len(table.entries) * (instance.n + 1)
    return finish_solution(instance, cost, terminal, view.floor, c, "baseline", started, {"cells": cells})
