"""Boundary-to-boundary distance tables for rectangular blocks of the DP.

A block has ``R`` rows (template letters) and ``C`` columns (letters of W).
Its grid has ``(R+1) x (C+1)`` cells; the top row and the left column are
inputs, the bottom row and the right column are outputs::

      u = R ---- R+1 ... R+C        (top row, left to right)
      |                    |
      u = R-1              v = C+R-1
      ...                  ...
      u = 0 ---- v=1 ... v = C      (bottom row; v = 0 is the corner)

Inputs ``u = 0..R`` walk up the left column from the bottom-left corner,
then ``u = R+1..R+C`` walk right along the top row.  Outputs ``v = 0..C``
walk the bottom row left to right, then ``v = C+1..C+R`` climb the right
column.  Paths move down (insert), right (delete) or diagonally, and only
the source may lie on the input boundary, so ``propagate`` reproduces a
plain DP whose boundary cells are fixed to the input values.

Unreachable entries hold ``BIG * (distance to the reachable range)``.
That term is convex in ``u - hi(v)`` and ``lo(v) - u`` with nondecreasing
``lo`` and ``hi``, so the table stays Monge and SMAWK applies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .model import IntCosts

BIG = np.int64(1) << np.int64(42)
_INF = np.int64(1) << np.int64(61)


@numba.njit(cache=True)
def _reach(v, R, C):
    """Inclusive input range that can reach output ``v``."""
    if v == 0:
        return 0, 0
    if v <= C:
        return 0, R + v
    if v < C + R:
        return v - C, R + C
    return R + C, R + C


@numba.njit(cache=True)
def block_grid(rows, cols, inputs, ins, dele, sub):
    """Full block DP with the boundary fixed to ``inputs``."""
    R = rows.size
    C = cols.size
    E = np.empty((R + 1, C + 1), dtype=np.int64)
    for u in range(R + 1):
        E[R - u, 0] = inputs[u]
    for b in range(1, C + 1):
        E[0, b] = inputs[R + b]
    for a in range(1, R + 1):
        t = rows[a - 1]
        for b in range(1, C + 1):
            best = E[a - 1, b - 1] + (0 if t == cols[b - 1] else sub)
            v = E[a - 1, b] + ins
            if v < best:
                best = v
            v = E[a, b - 1] + dele
            if v < best:
                best = v
            E[a, b] = best
    return E


@numba.njit(cache=True)
def grid_outputs(E):
    R = E.shape[0] - 1
    C = E.shape[1] - 1
    out = np.empty(C + R + 1, dtype=np.int64)
    for b in range(C + 1):
        out[b] = E[R, b]
    for t in range(1, R + 1):
        out[C + t] = E[R - t, C]
    return out


@numba.njit(cache=True)
def _build_dist(rows, cols, ins, dele, sub, big):
    R = rows.size
    C = cols.size
    nin = R + C + 1
    D = np.empty((nin, nin), dtype=np.int64)
    seed = np.empty(nin, dtype=np.int64)
    for u in range(nin):
        seed[:] = _INF
        seed[u] = 0
        E = block_grid(rows, cols, seed, ins, dele, sub)
        out = grid_outputs(E)
        for v in range(nin):
            D[v, u] = out[v]
    for v in range(nin):
        lo, hi = _reach(v, R, C)
        for u in range(nin):
            if u < lo:
                D[v, u] = big * (lo - u)
            elif u > hi:
                D[v, u] = big * (u - hi)
    return D


@dataclass(frozen=True, eq=False)
class DistTable:
    """Distances from every input cell (columns) to every output cell (rows)."""

    rows: np.ndarray
    cols: np.ndarray
    costs: IntCosts
    D: np.ndarray

    @property
    def R(self) -> int:
        return int(self.rows.size)

    @property
    def C(self) -> int:
        return int(self.cols.size)

    def reachable(self, v: int, u: int) -> bool:
        lo, hi = _reach(v, self.R, self.C)
        return lo <= u <= hi


def build_dist(rows, cols, costs: IntCosts) -> DistTable:
    """Per-source DP over the block; O(R * C * (R + C)) time."""
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    cols = np.ascontiguousarray(cols, dtype=np.int64)
    D = _build_dist(rows, cols, costs.ins, costs.dele, costs.sub, BIG)
    return DistTable(rows, cols, costs, D)


# --- SMAWK -------------------------------------------------------------------


@numba.njit(cache=True)
def smawk_workspace(m, N):
    return np.empty(N + 2 * m + 2, dtype=np.int64), np.empty((2, 64), dtype=np.int64)


@numba.njit(cache=True)
def _smawk(inp, D, argmin):
    """Leftmost row minima of ``A[v, u] = inp[u] + D[v, u]`` (A totally monotone)."""
    buf, meta = smawk_workspace(D.shape[0], D.shape[1])
    return _smawk_ws(inp, D, argmin, buf, meta)


@numba.njit(cache=True)
def _smawk_ws(inp, D, argmin, buf, meta):
    m = D.shape[0]
    N = D.shape[1]
    # reduced column lists per level, stored back to back in ``buf``
    starts = meta[0]
    sizes = meta[1]
    prev_start = -1
    prev_size = N
    level = 0
    pos = 0
    while True:
        stride = 1 << level
        mr = m // stride  # rows at this level are q*stride - 1, q = 1..mr
        if mr == 0:
            break
        start = pos
        top = 0
        for idx in range(prev_size):
            c = idx if prev_start < 0 else buf[prev_start + idx]
            while top > 0:
                r = (top) * stride - 1
                s = buf[start + top - 1]
                if inp[s] + D[r, s] > inp[c] + D[r, c]:
                    top -= 1
                else:
                    break
            if top < mr:
                buf[start + top] = c
                top += 1
        starts[level] = start
        sizes[level] = top
        pos = start + top
        prev_start = start
        prev_size = top
        level += 1
    for lv in range(level - 1, -1, -1):
        stride = 1 << lv
        mr = m // stride
        start = starts[lv]
        size = sizes[lv]
        k = 0
        for p in range(0, mr, 2):
            r = (p + 1) * stride - 1
            stop = argmin[(p + 2) * stride - 1] if p + 1 < mr else buf[start + size - 1]
            best_c = -1
            best_v = _INF
            while True:
                c = buf[start + k]
                val = inp[c] + D[r, c]
                if best_c < 0 or val < best_v:
                    best_v = val
                    best_c = c
                if c == stop or k == size - 1:
                    break
                k += 1
            argmin[r] = best_c
    return argmin


def row_minima_smawk(matrix) -> np.ndarray:
    """Leftmost argmin of every row of a totally monotone matrix."""
    M = np.ascontiguousarray(matrix, dtype=np.int64)
    out = np.empty(M.shape[0], dtype=np.int64)
    return _smawk(np.zeros(M.shape[1], dtype=np.int64), M, out)


@numba.njit(cache=True)
def _propagate(inp, D):
    m = D.shape[0]
    arg = np.empty(m, dtype=np.int64)
    _smawk(inp, D, arg)
    out = np.empty(m, dtype=np.int64)
    for v in range(m):
        out[v] = inp[arg[v]] + D[v, arg[v]]
    return out, arg


def propagate(dist: DistTable, inputs):
    """Output boundary values and, for each output, the input its best path starts from."""
    inp = np.ascontiguousarray(inputs, dtype=np.int64)
    if inp.size != dist.D.shape[1]:
        raise ValueError(f"expected {dist.D.shape[1]} inputs, got {inp.size}")
    return _propagate(inp, dist.D)


# --- in-block traceback ------------------------------------------------------


def _walk(E, rows, cols, v, costs: IntCosts, col0: int):
    """Walk back from output ``v`` to the input boundary; ops come out right to left."""
    R, C = rows.size, cols.size
    a, b = (R, v) if v <= C else (R - (v - C), C)
    ops = []
    while a > 0 and b > 0:
        e = E[a, b]
        t = int(rows[a - 1])
        w = int(cols[b - 1])
        if E[a - 1, b - 1] + (0 if t == w else costs.sub) == e:
            ops.append(("match" if t == w else "substitute", col0 + b - 1, t))
            a, b = a - 1, b - 1
        elif E[a - 1, b] + costs.ins == e:
            ops.append(("insert", col0 + b, t))
            a -= 1
        elif E[a, b - 1] + costs.dele == e:
            ops.append(("delete", col0 + b - 1, w))
            b -= 1
        else:
            raise AssertionError("inconsistent block grid")
    u = R - a if b == 0 else R + b
    return u, ops


def trace_inputs(rows, cols, inputs, v: int, costs: IntCosts, col0: int = 0):
    """Best path into output ``v`` given all input values; returns ``(u, ops)``."""
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    cols = np.ascontiguousarray(cols, dtype=np.int64)
    E = block_grid(rows, cols, np.ascontiguousarray(inputs, dtype=np.int64),
                   costs.ins, costs.dele, costs.sub)
    return _walk(E, rows, cols, v, costs, col0)


def trace_block(dist: DistTable, u: int, v: int, col0: int = 0):
    """A cheapest path from input ``u`` to output ``v``; returns ``(ops, cost)``.

    ``ops`` run left to right as ``(kind, W position, symbol)`` tuples with
    positions offset by ``col0``.
    """
    if not dist.reachable(v, u):
        raise ValueError(f"output {v} is not reachable from input {u}")
    seed = np.full(dist.R + dist.C + 1, _INF, dtype=np.int64)
    seed[u] = 0
    start, ops = trace_inputs(dist.rows, dist.cols, seed, v, dist.costs, col0)
    if start != u:
        raise AssertionError("traceback left the source")
    ops.reverse()
    return ops, int(dist.D[v, u])
