"""Slow reference implementations for tests.

Nothing here imports the production kernels.  The optimal-sanitization
oracle searches the product of the edit graph of W with a small automaton
that tracks the current letter run and how many non-sensitive patterns have
been emitted so far.
"""

from __future__ import annotations

import heapq
import itertools

import numpy as np

from .errors import StateBudgetError
from .model import HASH, SanitizationInstance, SensitiveSet, Weights

# --- feasibility, independently of model.verify_feasible ---------------------


def _targets(instance: SanitizationInstance, S: SensitiveSet):
    """Chain of non-sensitive length-k windows and the sensitive strings, as tuples."""
    W = instance.W.tolist()
    k = instance.k
    bad = [(i, j) for i, j in S.intervals]
    chain = []
    for p in range(instance.n - k + 1):
        if not any(p <= i and j <= p + k - 1 for i, j in bad):
            chain.append(tuple(W[p:p + k]))
    sensitive = {tuple(W[i:j + 1]) for i, j in bad}
    return chain, sensitive


def is_feasible(candidate, instance: SanitizationInstance, S: SensitiveSet) -> bool:
    """Brute-force feasibility; ``candidate`` is a string or a list of symbol ids."""
    chain, sensitive = _targets(instance, S)
    X = list(instance.encode(candidate)) if isinstance(candidate, str) else list(candidate)
    k = instance.k
    for a in range(len(X)):
        for b in range(a + 1, len(X) + 1):
            if tuple(X[a:b]) in sensitive:
                return False
    windows = [tuple(X[p:p + k]) for p in range(len(X) - k + 1) if HASH not in X[p:p + k]]
    return windows == chain


def edit_distance(X, Y, ins: int, dele: int, sub: int) -> int:
    """Cost of turning Y into X (inserting into Y costs ``ins``)."""
    prev = [b * ins for b in range(len(X) + 1)]
    for a in range(1, len(Y) + 1):
        cur = [a * dele] + [0] * len(X)
        for b in range(1, len(X) + 1):
            cur[b] = min(prev[b] + dele, cur[b - 1] + ins,
                         prev[b - 1] + (0 if Y[a - 1] == X[b - 1] else sub))
        prev = cur
    return prev[-1]


# --- optimal sanitization ----------------------------------------------------


def _search(instance, S, budget):
    chain, sensitive = _targets(instance, S)
    W = instance.W.tolist()
    n, k = instance.n, instance.k
    c = instance.costs
    keep = max(k, S.ell) - 1
    letters = list(range(instance.sigma))

    def emit(tail, p, x):
        """Append symbol x to the automaton state; None when infeasible."""
        if x == HASH:
            return (), p
        run = tail + (x,)
        for s in range(1, len(run) + 1):
            if run[-s:] in sensitive:
                return None
        if len(run) >= k:
            if p >= len(chain) or run[-k:] != chain[p]:
                return None
            p += 1
        return run[-keep:] if keep else (), p

    start = (0, (), 0)
    dist = {start: 0}
    back = {start: None}
    heap = [(0, 0, start)]
    tick = itertools.count(1)
    while heap:
        d, _, state = heapq.heappop(heap)
        if dist.get(state, None) != d:
            continue
        j, tail, p = state
        if j == n and p == len(chain):
            out = []
            while back[state] is not None:
                state, x = back[state]
                if x is not None:
                    out.append(x)
            return d, out[::-1]
        moves = []
        for x in letters + [HASH]:
            nxt = emit(tail, p, x)
            if nxt is None:
                continue
            moves.append(((j, *nxt), c.ins, x))
            if j < n:
                moves.append(((j + 1, *nxt), 0 if W[j] == x else c.sub, x))
        if j < n:
            moves.append(((j + 1, tail, p), c.dele, None))
        for nstate, w, x in moves:
            nd = d + w
            if nd < dist.get(nstate, nd + 1):
                dist[nstate] = nd
                back[nstate] = (state, x)
                heapq.heappush(heap, (nd, next(tick), nstate))
        if len(dist) > budget:
            raise StateBudgetError(f"oracle explored more than {budget} states")
    return None, None


def _exhaustive(instance, S, bound):
    """Enumerate every feasible string up to ``bound`` symbols and keep the closest."""
    chain, sensitive = _targets(instance, S)
    k = instance.k
    c = instance.costs
    W = instance.W.tolist()
    symbols = list(range(instance.sigma)) + [HASH]
    best = (None, None)

    def prefix_ok(X):
        # pruning only needs the newest suffix; the full check runs at the end
        for s in range(1, len(X) + 1):
            if tuple(X[-s:]) in sensitive:
                return False
        windows = [tuple(X[p:p + k]) for p in range(len(X) - k + 1) if HASH not in X[p:p + k]]
        return windows == chain[:len(windows)]

    # branch and bound: ``row[a]`` is the cost of turning W[:a] into X, and
    # its minimum never decreases as X grows
    n = len(W)
    stack = [([], [a * c.dele for a in range(n + 1)])]
    while stack:
        X, row = stack.pop()
        if best[0] is not None and min(row) >= best[0]:
            continue
        if row[n] < (best[0] if best[0] is not None else row[n] + 1) and is_feasible(X, instance, S):
            best = (row[n], X)
        if len(X) < bound:
            for x in symbols:
                Y = X + [x]
                if not prefix_ok(Y):
                    continue
                nxt = [row[0] + c.ins]
                for a in range(1, n + 1):
                    nxt.append(min(row[a] + c.ins, nxt[a - 1] + c.dele,
                                   row[a - 1] + (0 if W[a - 1] == x else c.sub)))
                stack.append((Y, nxt))
    return best


def enumerate_optimal(instance: SanitizationInstance, S: SensitiveSet, bound: int | None = None,
                      method: str = "search", budget: int = 2_000_000):
    """Minimum-cost feasible sanitization by brute force.

    Returns ``(distance, witness string)``; ``(None, None)`` when no feasible
    string exists.  ``method="exhaustive"`` enumerates all strings of length
    at most ``bound`` symbols and is only sensible for
    n of about 8 or less.
    """
    if method == "search":
        cost, out = _search(instance, S, budget)
    elif method == "exhaustive":
        if bound is None:
            # a feasible string may need one '#' between every pair of chain windows
            chain, _ = _targets(instance, S)
            bound = max(instance.n + S.ell + instance.k + 2, (instance.k + 1) * len(chain) + 1)
        cost, out = _exhaustive(instance, S, bound)
    else:
        raise ValueError(f"unknown method {method!r}")
    if cost is None:
        return None, None
    return cost / instance.costs.scale, instance.decode(out)


# --- kernel references -------------------------------------------------------


def naive_gadget_row(r, floor, weights) -> np.ndarray:
    """Gadget row by direct window scans.

    ``weights`` is an ``IntCosts``-like object with ``ins``, ``dele`` and
    ``sub``, or a ``Weights`` instance.
    """
    if isinstance(weights, Weights):
        weights = weights.integer_costs()
    ins, dele, sub = weights.ins, weights.dele, weights.sub
    floor = [int(x) for x in floor]
    G = [0] * len(floor)
    G[0] = 0 if r is None else int(r[0]) + ins
    for j in range(1, len(floor)):
        opts = [G[j - 1] + dele]
        if r is not None:
            opts += [int(r[j]) + ins, int(r[j - 1]) + sub]
        opts += [G[q] + sub for q in range(floor[j - 1] + 1, j)]
        opts += [G[q] + ins for q in range(floor[j] + 1, j)]
        G[j] = min(opts)
    return np.array(G, dtype=np.int64)


def naive_block_propagate(rows, cols, inputs, costs):
    """Full DP over one block seeded with boundary values.

    ``inputs`` lists ``len(rows) + len(cols) + 1`` values: the left column
    bottom-up, then the top row left to right (the top-left corner is shared,
    at index ``len(rows)``).  Outputs list the bottom row left to right, then
    the right column bottom-up excluding the corner.
    """
    R, C = len(rows), len(cols)
    E = [[None] * (C + 1) for _ in range(R + 1)]
    for u, val in enumerate(inputs):
        if u <= R:
            E[R - u][0] = val
        else:
            E[0][u - R] = val
    for a in range(1, R + 1):
        for b in range(1, C + 1):
            E[a][b] = min(E[a - 1][b] + costs.ins, E[a][b - 1] + costs.dele,
                          E[a - 1][b - 1] + (0 if rows[a - 1] == cols[b - 1] else costs.sub))
    out = [E[R][b] for b in range(C + 1)] + [E[R - t][C] for t in range(1, R + 1)]
    return np.array(out, dtype=np.int64)


def naive_row_minima(matrix) -> np.ndarray:
    """Leftmost argmin of every row."""
    m = np.asarray(matrix)
    return np.array([int(np.argmin(row)) for row in m], dtype=np.int64)


def valid_merge_vectors(instance: SanitizationInstance, S: SensitiveSet) -> set:
    """Every admissible merge vector, by spelling each run and searching it.

    A vector lists '#' or 'm' for patterns 1..|I|-1; 'm' needs the previous
    pattern's suffix to equal this pattern's prefix, and no merged run may
    contain a sensitive string.
    """
    chain, sensitive = _targets(instance, S)
    if not chain:
        return {""}
    out = set()
    for choice in itertools.product("#m", repeat=len(chain) - 1):
        ok = True
        runs = [list(chain[0])]
        for d, ch in enumerate(choice, start=1):
            if ch == "m":
                if chain[d - 1][1:] != chain[d][:-1]:
                    ok = False
                    break
                runs[-1].append(chain[d][-1])
            else:
                runs.append(list(chain[d]))
        if ok:
            for run in runs:
                if any(tuple(run[a:b]) in sensitive
                       for a in range(len(run)) for b in range(a + 1, len(run) + 1)):
                    ok = False
                    break
        if ok:
            out.add("".join(choice))
    return out
