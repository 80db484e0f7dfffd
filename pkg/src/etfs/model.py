"""Problem input, sensitive-set normalization, derived views and the feasibility check.

Letters of W are remapped to dense ids ``0..sigma-1`` in first-occurrence
order.  Internally the gadget symbol ``#`` is the integer ``HASH``; the
template markers for the three gadget regular expressions never leave this
package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DomainError,
    IllegalSymbolError,
    IntervalError,
    ParseError,
    ReservedSymbolError,
    StrictModeError,
)

HASH = -1
RESERVED = "#"
COMMENT = ";"

# template markers: (Σ^{<k}#)*, #(Σ^{<k}#)*, (#Σ^{<k})*
OPEN, SEP, CLOSE = -2, -3, -4
MARKER_NAMES = {OPEN: "⊖", SEP: "⊕", CLOSE: "⊗"}


class IntCosts(NamedTuple):
    """Edit weights scaled to a common integer denominator."""

    ins: int
    dele: int
    sub: int
    scale: int

    @property
    def max(self):
        return max(self.ins, self.dele, self.sub)


@dataclass(frozen=True)
class Weights:
    w_sub: float = 1.0
    w_ins: float = 1.0
    w_del: float = 1.0

    def __post_init__(self):
        for name in ("w_sub", "w_ins", "w_del"):
            value = getattr(self, name)
            if not (value > 0) or math.isinf(value):
                raise DomainError(f"{name} must be a positive finite cost, got {value!r}")

    @classmethod
    def parse(cls, text: str) -> "Weights":
        """Parse ``"sub,ins,del"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise DomainError(f"expected three comma-separated weights, got {text!r}")
        try:
            sub, ins, dele = (float(p) for p in parts)
        except ValueError as exc:
            raise DomainError(f"non-numeric weight in {text!r}") from exc
        return cls(sub, ins, dele)

    def integer_costs(self) -> IntCosts:
        fracs = [Fraction(str(w)).limit_denominator(10**6) for w in (self.w_ins, self.w_del, self.w_sub)]
        scale = math.lcm(*(f.denominator for f in fracs))
        ins, dele, sub = (int(f * scale) for f in fracs)
        return IntCosts(ins, dele, sub, scale)

    @property
    def is_unit(self):
        return self.w_sub == self.w_ins == self.w_del == 1


UNIT = Weights()


def _code(ids: Iterable[int]) -> str:
    # letters -> chr(id+1), '#' -> chr(0); lets str.find do substring search
    return "".join(chr(i + 1) for i in ids)


@dataclass(frozen=True, eq=False)
class SanitizationInstance:
    W: np.ndarray
    k: int
    alphabet: tuple
    weights: Weights = UNIT
    text: str = field(init=False, repr=False)

    def __post_init__(self):
        w = np.asarray(self.W, dtype=np.int64)
        w.setflags(write=False)
        object.__setattr__(self, "W", w)
        object.__setattr__(self, "text", _code(w.tolist()))
        if RESERVED in self.alphabet:
            raise ReservedSymbolError("'#' is reserved and cannot be a letter of W")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise DomainError("alphabet symbols must be distinct")
        if w.size and (w.min() < 0 or w.max() >= len(self.alphabet)):
            raise DomainError("W uses a letter id outside the alphabet")
        if not 1 < self.k < self.n:
            raise DomainError(f"need 1 < k < n, got k={self.k}, n={self.n}")

    @property
    def n(self) -> int:
        return int(self.W.size)

    @property
    def sigma(self) -> int:
        return len(self.alphabet)

    @property
    def costs(self) -> IntCosts:
        return self.weights.integer_costs()

    def symbol_id(self, symbol: str) -> int:
        if symbol == RESERVED:
            return HASH
        try:
            return self.alphabet.index(symbol)
        except ValueError:
            raise IllegalSymbolError(f"symbol {symbol!r} is not in the alphabet") from None

    def encode(self, symbols: Iterable[str]) -> list[int]:
        return [self.symbol_id(s) for s in symbols]

    def decode(self, ids: Iterable[int]) -> str:
        return "".join(RESERVED if i == HASH else self.alphabet[i] for i in ids)

    @property
    def word(self) -> str:
        return self.decode(self.W.tolist())

    def with_weights(self, weights: Weights) -> "SanitizationInstance":
        return SanitizationInstance(self.W, self.k, self.alphabet, weights)


def make_instance(word: Sequence[str], k: int, weights: Weights = UNIT) -> SanitizationInstance:
    """Build an instance from a sequence of external symbols."""
    alphabet: dict[str, int] = {}
    ids = []
    for ch in word:
        if ch == RESERVED:
            raise ReservedSymbolError("'#' is reserved and cannot appear in W")
        ids.append(alphabet.setdefault(ch, len(alphabet)))
    return SanitizationInstance(np.array(ids, dtype=np.int64), int(k), tuple(alphabet), weights)


def parse_instance(text: str, weights: Weights = UNIT):
    """Parse an instance document; returns ``(instance, raw_intervals)``."""
    word = None
    k = None
    raw: list[tuple[int, int]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith(COMMENT):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"expected KEY=VALUE, got {line!r}", lineno)
        key = key.strip()
        value = value.strip()
        if key == "W":
            if word is not None:
                raise ParseError("duplicate W line", lineno)
            if not value:
                raise ParseError("empty W", lineno)
            if RESERVED in value:
                raise ReservedSymbolError("'#' is reserved and cannot appear in W", lineno)
            if any(ch.isspace() or ch == COMMENT for ch in value):
                raise ParseError("W contains whitespace or ';'", lineno)
            word = value
        elif key == "K":
            if k is not None:
                raise ParseError("duplicate K line", lineno)
            try:
                k = int(value)
            except ValueError:
                raise ParseError(f"K must be an integer, got {value!r}", lineno) from None
        elif key == "S":
            parts = value.split(",")
            try:
                i, j = (int(p) for p in parts)
            except ValueError:
                raise ParseError(f"S must be '<i>,<j>', got {value!r}", lineno) from None
            raw.append((i, j))
        else:
            raise ParseError(f"unknown key {key!r}", lineno)
    if word is None:
        raise ParseError("missing W line")
    if k is None:
        raise ParseError("missing K line")
    return make_instance(word, k, weights), raw


def load_instance(path, weights: Weights = UNIT):
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read(), weights)


def format_instance(instance: SanitizationInstance, intervals: Iterable[tuple[int, int]]) -> str:
    lines = [f"W={instance.word}", f"K={instance.k}"]
    lines += [f"S={i},{j}" for i, j in intervals]
    return "\n".join(lines) + "\n"


# --- sensitive set -----------------------------------------------------------


@dataclass(frozen=True)
class SensitiveSet:
    intervals: tuple
    L: int
    ell: int

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)


def _occurrences(text: str, pattern: str) -> list[int]:
    out = []
    pos = text.find(pattern)
    while pos != -1:
        out.append(pos)
        pos = text.find(pattern, pos + 1)
    return out


def intervals_from_patterns(instance: SanitizationInstance, patterns: Iterable[Sequence[str]]):
    """Expand pattern strings to every occurrence interval in W."""
    out = set()
    for pat in patterns:
        ids = [instance.alphabet.index(s) if s in instance.alphabet else None for s in pat]
        if not ids or None in ids:
            continue  # a pattern using a foreign letter never occurs in W
        code = _code(ids)
        out.update((p, p + len(ids) - 1) for p in _occurrences(instance.text, code))
    return sorted(out)


def _minimal(intervals: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Drop every interval that properly contains another one."""
    if not intervals:
        return []
    ivs = sorted(set(intervals))
    # suffix minimum of end over intervals sorted by start
    suffix_min = [0] * (len(ivs) + 1)
    suffix_min[-1] = math.inf
    for idx in range(len(ivs) - 1, -1, -1):
        suffix_min[idx] = min(suffix_min[idx + 1], ivs[idx][1])
    keep = []
    for idx, (a, c) in enumerate(ivs):
        # same start, smaller end sorts before; any later start with end <= c
        same_start_smaller = idx > 0 and ivs[idx - 1][0] == a
        if same_start_smaller or suffix_min[idx + 1] <= c:
            continue
        keep.append((a, c))
    return keep


def normalize_sensitive_set(raw, instance: SanitizationInstance, strict: bool = False) -> SensitiveSet:
    """Enforce closure and minimality on a raw interval list.

    In strict mode any interval that would be added or dropped raises
    ``StrictModeError`` instead.
    """
    n = instance.n
    given = set()
    for iv in raw:
        i, j = int(iv[0]), int(iv[1])
        if not (0 <= i <= j <= n - 1):
            raise IntervalError(f"interval [{i},{j}] outside [0,{n - 1}] or reversed")
        given.add((i, j))

    closed = set(given)
    text = instance.text
    for content in {text[i : j + 1] for i, j in given}:
        size = len(content)
        closed.update((p, p + size - 1) for p in _occurrences(text, content))
    if strict:
        missing = sorted(closed - given)
        if missing:
            raise StrictModeError("closure violated, missing occurrence", missing[0])

    minimal = _minimal(sorted(closed))
    if strict:
        dropped = sorted(closed - set(minimal))
        if dropped:
            raise StrictModeError("minimality violated, interval contains another", dropped[0])

    lengths = [j - i + 1 for i, j in minimal]
    L = sum(x for x in lengths if x > instance.k)
    ell = max(lengths, default=0)
    return SensitiveSet(tuple(minimal), L, ell)


def sensitive_strings(instance: SanitizationInstance, S: SensitiveSet) -> list[tuple[int, ...]]:
    """Distinct sensitive contents as letter-id tuples, sorted."""
    W = instance.W.tolist()
    return sorted({tuple(W[i : j + 1]) for i, j in S.intervals})


# --- derived view ------------------------------------------------------------


def compute_window_floor(instance: SanitizationInstance, S: SensitiveSet) -> np.ndarray:
    """Signed variant of F: -1 where nothing constrains the gadget window.

    ``floor[j] = max({i < j : W[i..j-1] contains a sensitive interval} U {j-k} U {-1})``.
    A gadget letter run ending at W[j-1] may start no earlier than ``floor[j] + 1``.
    """
    n, k = instance.n, instance.k
    # latest start among intervals ending at position c
    best_start = np.full(n, -1, dtype=np.int64)
    for a, c in S.intervals:
        if a > best_start[c]:
            best_start[c] = a
    floor = np.empty(n + 1, dtype=np.int64)
    floor[0] = -1
    running = -1
    for j in range(1, n + 1):
        running = max(running, int(best_start[j - 1]))
        floor[j] = max(running, j - k, -1)
    return floor


def compute_F(instance: SanitizationInstance, S: SensitiveSet) -> np.ndarray:
    """``F[j] = max({i < j : W[i..j-1] contains a sensitive pattern} U {j-k} U {0})``."""
    return np.maximum(compute_window_floor(instance, S), 0)


@dataclass(frozen=True, eq=False)
class DerivedView:
    instance: SanitizationInstance
    I: np.ndarray
    M: np.ndarray
    F: np.ndarray
    floor: np.ndarray

    @property
    def size(self) -> int:
        return int(self.I.size)

    def pattern(self, h: int) -> np.ndarray:
        p = int(self.I[h])
        return self.instance.W[p : p + self.instance.k]

    def patterns(self) -> list[tuple[int, ...]]:
        W = self.instance.W.tolist()
        k = self.instance.k
        return [tuple(W[p : p + k]) for p in self.I.tolist()]

    @property
    def T(self) -> tuple:
        """Template ⊖N_0⊕N_1⊕...⊕N_{|I|-1}⊗ as a tuple (markers are negative ints)."""
        if self.size == 0:
            return (OPEN,)
        out = [OPEN]
        for h, pat in enumerate(self.patterns()):
            if h:
                out.append(SEP)
            out.extend(pat)
        out.append(CLOSE)
        return tuple(out)

    def last_letters(self) -> np.ndarray:
        """Final letter of each non-sensitive pattern (the m-path row letters)."""
        return self.instance.W[self.I + self.instance.k - 1] if self.size else np.zeros(0, np.int64)


def non_sensitive_positions(instance: SanitizationInstance, S: SensitiveSet) -> np.ndarray:
    n, k = instance.n, instance.k
    blocked = np.zeros(n - k + 2, dtype=np.int64)
    for a, c in S.intervals:
        if c - a + 1 > k:
            continue
        lo, hi = max(c - k + 1, 0), min(a, n - k)
        if lo <= hi:
            blocked[lo] += 1
            blocked[hi + 1] -= 1
    covered = np.cumsum(blocked)[: n - k + 1]
    return np.flatnonzero(covered == 0).astype(np.int64)


def derive_view(instance: SanitizationInstance, S: SensitiveSet) -> DerivedView:
    I = non_sensitive_positions(instance, S)
    W = instance.W
    k = instance.k
    M = np.zeros(I.size, dtype=np.int8)
    for h in range(1, I.size):
        a, b = int(I[h - 1]), int(I[h])
        if b == a + 1 or np.array_equal(W[a + 1 : a + k], W[b : b + k - 1]):
            M[h] = 1
    floor = compute_window_floor(instance, S)
    for arr in (I, M, floor):
        arr.setflags(write=False)
    F = np.maximum(floor, 0)
    F.setflags(write=False)
    return DerivedView(instance, I, M, F, floor)


# --- feasibility -------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    c1_ok: bool
    p1_ok: bool
    witness: int | None = None
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return self.c1_ok and self.p1_ok


def _candidate_ids(candidate, instance: SanitizationInstance) -> list[int]:
    if isinstance(candidate, str):
        return instance.encode(candidate)
    ids = [int(c) for c in candidate]
    for c in ids:
        if c != HASH and not 0 <= c < instance.sigma:
            raise IllegalSymbolError(f"symbol id {c} is not in the alphabet")
    return ids


def verify_feasible(candidate, instance: SanitizationInstance, S: SensitiveSet) -> Verdict:
    """Check C1 (no sensitive pattern) and P1 (same ordered chain of length-k windows)."""
    ids = _candidate_ids(candidate, instance)
    code = _code(ids)

    first_hit = None
    for content in {instance.text[i : j + 1] for i, j in S.intervals}:
        pos = code.find(content)
        if pos != -1 and (first_hit is None or pos < first_hit):
            first_hit = pos
    c1_ok = first_hit is None

    k = instance.k
    expected = [instance.text[p : p + k] for p in non_sensitive_positions(instance, S).tolist()]
    hash_code = chr(0)
    got = []
    got_pos = []
    for p in range(len(code) - k + 1):
        window = code[p : p + k]
        if hash_code not in window:
            got.append(window)
            got_pos.append(p)
    p1_ok = got == expected
    p1_witness = None
    if not p1_ok:
        for idx, (a, b) in enumerate(zip(got, expected)):
            if a != b:
                p1_witness = got_pos[idx]
                break
        else:
            p1_witness = got_pos[len(expected)] if len(got) > len(expected) else len(ids)

    if not c1_ok:
        return Verdict(False, p1_ok, first_hit, "contains a sensitive pattern")
    if not p1_ok:
        return Verdict(True, False, p1_witness, "length-k window chain differs from W")
    return Verdict(True, True)
