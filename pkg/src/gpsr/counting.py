"""Counting admissible expression-tree shapes and labeled structures.

Two exact counters coexist because one bounds the other: ``count_shapes``
counts planted plane trees (rooted, ordered, unbounded arity) of exactly
n nodes and edge-depth at most D through the generating-function
recurrence f_h(x) = x / (1 - f_{h-1}(x)), f_0(x) = x, with truncated
big-integer polynomial arithmetic; ``count_structures`` counts labeled
arity-<=2 structures under a vocabulary by dynamic programming. The
asymptotic growth base of bounded-depth counts is
rho_D = 4 cos^2(pi / (D + 2)) < 4.

All exact counts are Python big integers; the asymptotic and bound
formulas are evaluated in log space to avoid overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from .errors import InvalidBaseError, TooLargeError
from .trees import ExprTree, Vocabulary, fixed_const, learnable, op, variable

__all__ = [
    "CountTable", "count_shapes", "count_structures", "enumerate_structures",
    "rho", "bkr_asymptotic", "log_structure_bound", "calibrate_c_D",
    "shape_count_table", "structure_count_table", "ENUMERATION_GUARD",
]

ENUMERATION_GUARD = 10 ** 6


@dataclass
class CountTable:
    """Exact counts indexed by (n, h): n nodes (exactly), edge-depth <= h."""

    kind: str  # "shapes" or "structures"
    entries: dict[tuple[int, int], int] = field(default_factory=dict)

    def __getitem__(self, key: tuple[int, int]) -> int:
        return self.entries[key]


@lru_cache(maxsize=64)
def _shape_series(n_max: int, depth: int) -> tuple[int, ...]:
    """Coefficients [x^0 .. x^n_max] of f_depth."""
    f = [0] * (n_max + 1)
    if n_max >= 1:
        f[1] = 1
    for _ in range(depth):
        # f <- x / (1 - f): series inversion of (1 - f), then shift by one
        inv = [0] * (n_max + 1)
        inv[0] = 1
        for n in range(1, n_max + 1):
            acc = 0
            for k in range(1, n + 1):
                if f[k]:
                    acc += f[k] * inv[n - k]
            inv[n] = acc
        f = [0] + inv[:n_max]
    return tuple(f)


def count_shapes(n: int, D: int) -> int:
    """Planted plane trees with exactly n nodes and edge-depth <= D."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if D < 0:
        raise ValueError("D must be >= 0")
    # depth saturates at n - 1 (a path); round the truncation order up in
    # blocks so sweeps over n share one cached series
    depth = min(D, n - 1)
    n_max = ((n + 127) // 128) * 128
    return _shape_series(n_max, depth)[n]


@lru_cache(maxsize=64)
def _structure_table(m1: int, m2: int, n0: int, s: int, D: int) -> tuple[tuple[int, ...], ...]:
    """C[n][h]: labeled structures with exactly n nodes and depth <= h."""
    C = [[0] * (D + 1) for _ in range(s + 1)]
    if s >= 1:
        for h in range(D + 1):
            C[1][h] = n0 + 1
    for n in range(2, s + 1):
        for h in range(1, D + 1):
            total = m1 * C[n - 1][h - 1]
            if m2:
                acc = 0
                for i in range(1, n - 1):
                    acc += C[i][h - 1] * C[n - 1 - i][h - 1]
                total += m2 * acc
            C[n][h] = total
    return tuple(tuple(row) for row in C)


def count_structures(s: int, D: int, vocab: Vocabulary) -> int:
    """Exact number of admissible structures: size <= s, depth <= D."""
    if s < 1 or D < 1:
        raise ValueError("s and D must be >= 1")
    C = _structure_table(vocab.m1, vocab.m2, vocab.n0, s, D)
    return sum(C[n][D] for n in range(1, s + 1))


def enumerate_structures(s: int, D: int, vocab: Vocabulary) -> Iterator[ExprTree]:
    """Every admissible structure exactly once, in a fixed deterministic order.

    Order: by size; within a size, unary-rooted before binary-rooted with
    smaller left subtrees first and operator/terminal labels in sorted
    order. Guarded: raises TooLargeError when the exact count exceeds
    ``ENUMERATION_GUARD``.
    """
    total = count_structures(s, D, vocab)
    if total > ENUMERATION_GUARD:
        raise TooLargeError(
            f"|T_(s,D)| = {total} exceeds the enumeration guard {ENUMERATION_GUARD}")

    leaves = []
    for i in range(1, vocab.variables + 1):
        leaves.append(variable(i))
    for name, value in vocab.fixed_constants:
        leaves.append(fixed_const(name, value))
    leaves.append(learnable())
    leaves.sort(key=lambda t: t.symbol)
    unary = sorted(vocab.unary_ops)
    binary = sorted(vocab.binary_ops)

    def gen(n: int, h: int) -> Iterator[ExprTree]:
        if n == 1:
            yield from leaves
            return
        if h == 0:
            return
        for sym in unary:
            for child in gen(n - 1, h - 1):
                yield op(sym, child)
        for left_size in range(1, n - 1):
            right_size = n - 1 - left_size
            for sym in binary:
                for left in gen(left_size, h - 1):
                    for right in gen(right_size, h - 1):
                        yield op(sym, left, right)

    for n in range(1, s + 1):
        yield from gen(n, D)


def rho(D: int) -> float:
    """Exponential growth base of depth-<=D tree counts; increasing, < 4."""
    if D < 1:
        raise ValueError("D must be >= 1")
    c = math.cos(math.pi / (D + 2))
    return 4.0 * c * c


def bkr_asymptotic(s: int, D: int) -> float:
    """Log of the classical asymptotic count of bounded-depth plane trees.

    log[ (4^s / (D+2)) tan^2(pi/(D+2)) cos^(2s)(pi/(D+2)) ], with depth
    measured in edges (root at 0), i.e. already converted from the
    node-height convention of the classical statement (h = D + 1).
    """
    if s < 1 or D < 1:
        raise ValueError("s and D must be >= 1")
    angle = math.pi / (D + 2)
    return (s * math.log(rho(D))
            + 2.0 * math.log(math.tan(angle))
            - math.log(D + 2))


def log_structure_bound(s: int, D: int, vocab: Vocabulary, c_D: float) -> float:
    """Log of the closed-form overcount c_D (s+1) (rho_D (M1+M2) (N0+1))^s."""
    if c_D <= 0:
        raise ValueError("c_D must be positive")
    base = rho(D) * (vocab.m1 + vocab.m2) * (vocab.n0 + 1)
    if base < 1.0:
        raise InvalidBaseError(f"per-node base {base} < 1")
    return math.log(c_D) + math.log(s + 1) + s * math.log(base)


def calibrate_c_D(D: int, s_max: int = 500) -> float:
    """Smallest constant making count_shapes(s, D) <= c_D rho_D^s on s <= s_max."""
    if D < 1:
        raise ValueError("D must be >= 1")
    log_rho = math.log(rho(D))
    series = _shape_series(s_max, min(D, s_max - 1))
    best = 0.0
    for s in range(1, s_max + 1):
        cnt = series[s]
        if cnt:
            best = max(best, math.exp(math.log(cnt) - s * log_rho))
    return best


def shape_count_table(max_n: int, max_depth: int) -> CountTable:
    table = CountTable("shapes")
    for h in range(max_depth + 1):
        series = _shape_series(max_n, h)
        for n in range(1, max_n + 1):
            table.entries[(n, h)] = series[n]
    return table


def structure_count_table(max_s: int, max_depth: int, vocab: Vocabulary) -> CountTable:
    table = CountTable("structures")
    C = _structure_table(vocab.m1, vocab.m2, vocab.n0, max_s, max_depth)
    for n in range(1, max_s + 1):
        for h in range(1, max_depth + 1):
            table.entries[(n, h)] = C[n][h]
    return table
