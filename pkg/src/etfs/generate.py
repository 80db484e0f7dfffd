"""Seeded random instances for tests, benchmarks and the ``gen`` command."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    UNIT,
    SanitizationInstance,
    SensitiveSet,
    Weights,
    intervals_from_patterns,
    make_instance,
    normalize_sensitive_set,
)

LETTERS = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class GenConfig:
    n: int = 100
    k: int = 4
    sigma: int = 2
    patterns: int = 3
    mode: str = "mixed"  # short | exact | long | mixed
    max_long: int | None = None
    min_len: int | None = None  # explicit length range overrides ``mode``
    max_len: int | None = None
    seed: int = 0
    weights: Weights = UNIT


def _pattern_length(rng, cfg: GenConfig, n: int) -> int:
    if cfg.min_len is not None or cfg.max_len is not None:
        lo = max(1, cfg.min_len or 1)
        hi = min(n, cfg.max_len or n)
        return int(rng.integers(lo, max(lo, hi) + 1))
    mode = cfg.mode
    if mode == "mixed":
        mode = ("short", "exact", "long")[rng.integers(3)]
    if mode == "short":
        return int(rng.integers(1, cfg.k)) if cfg.k > 1 else 1
    if mode == "exact":
        return cfg.k
    top = cfg.max_long or 2 * cfg.k
    top = min(top, n)
    if top <= cfg.k:
        return cfg.k
    return int(rng.integers(cfg.k + 1, top + 1))


def random_instance(cfg: GenConfig, rng=None) -> tuple[SanitizationInstance, SensitiveSet]:
    """Random word over the first ``sigma`` letters with sensitive substrings of W.

    Sensitive patterns are substrings of W itself so each has at least one
    occurrence.
    """
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    letters = LETTERS[: cfg.sigma]
    word = "".join(letters[i] for i in rng.integers(cfg.sigma, size=cfg.n))
    inst = make_instance(word, cfg.k, cfg.weights)
    pats = []
    for _ in range(cfg.patterns):
        length = _pattern_length(rng, cfg, cfg.n)
        start = int(rng.integers(cfg.n - length + 1))
        pats.append(word[start:start + length])
    S = normalize_sensitive_set(intervals_from_patterns(inst, pats), inst)
    return inst, S


def random_weights(rng, low: float = 0.5, high: float = 3.0, sub_le_del: bool = True) -> Weights:
    """Random positive weights on a 0.5 grid; optionally with ``sub <= del``."""
    grid = np.arange(low, high + 0.25, 0.5)
    sub, ins, dele = (float(x) for x in rng.choice(grid, size=3))
    if sub_le_del and sub > dele:
        sub, dele = dele, sub
    return Weights(sub, ins, dele)
