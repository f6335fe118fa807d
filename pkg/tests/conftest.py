"""Shared test helpers: random trees and an independent scalar evaluator.

The naive evaluator below re-implements the documented protected operator
semantics with plain Python floats. It is deliberately separate from the
library's vectorized evaluation so it can serve as an oracle, and it also
reports the smallest "protection margin" encountered (distance to the
nearest protected branch), which the gradient tests use to filter out
non-smooth sample points before comparing against finite differences.
"""

import math

import numpy as np

from gpsr.trees import (
    DIV_EPS,
    EXP_CLAMP,
    ExprTree,
    Vocabulary,
    fixed_const,
    learnable,
    measure,
    op,
    variable,
)


def random_tree(rng, vocab: Vocabulary, max_depth: int, p_leaf: float = 0.35) -> ExprTree:
    """Grow-style random tree: leaves appear early with probability p_leaf."""
    if max_depth == 0 or rng.random() < p_leaf:
        return _random_leaf(rng, vocab)
    ops = list(vocab.unary_ops) + list(vocab.binary_ops)
    sym = ops[rng.integers(len(ops))]
    if sym in vocab.unary_ops:
        return op(sym, random_tree(rng, vocab, max_depth - 1, p_leaf))
    return op(sym, random_tree(rng, vocab, max_depth - 1, p_leaf),
              random_tree(rng, vocab, max_depth - 1, p_leaf))


def _random_leaf(rng, vocab):
    choices = []
    for i in range(1, vocab.variables + 1):
        choices.append(variable(i))
    for name, value in vocab.fixed_constants:
        choices.append(fixed_const(name, value))
    choices.append(learnable())
    return choices[rng.integers(len(choices))]


def naive_eval(tree: ExprTree, theta, x) -> tuple[float, float]:
    """Protected-mode scalar evaluation plus the minimum protection margin.

    The margin is the smallest distance from any operator input to the
    point where its protected branch switches (div: |b|, log/sqrt: |a|,
    exp: clamp - a); +inf when no protected operator is touched.
    """
    theta = list(theta)
    x = list(x)
    slot = [0]

    def walk(node):
        if node.kind == "var":
            return x[int(node.value)], math.inf
        if node.kind == "const":
            return float(node.value), math.inf
        if node.kind == "learnable":
            v = theta[slot[0]]
            slot[0] += 1
            return v, math.inf
        if node.kind == "unary":
            a, ma = walk(node.children[0])
            s = node.symbol
            if s == "sin":
                return math.sin(a), ma
            if s == "cos":
                return math.cos(a), ma
            if s == "neg":
                return -a, ma
            if s == "exp":
                return math.exp(min(a, EXP_CLAMP)), min(ma, EXP_CLAMP - a)
            if s == "log":
                return (0.0 if a == 0 else math.log(abs(a))), min(ma, abs(a))
            if s == "sqrt":
                return math.sqrt(abs(a)), min(ma, abs(a))
            raise AssertionError(s)
        a, ma = walk(node.children[0])
        b, mb = walk(node.children[1])
        m = min(ma, mb)
        s = node.symbol
        if s == "add":
            return a + b, m
        if s == "sub":
            return a - b, m
        if s == "mul":
            return a * b, m
        if s == "div":
            if abs(b) < DIV_EPS:
                return 1.0, 0.0
            return a / b, min(m, abs(b))
        raise AssertionError(s)

    val, margin = walk(tree)
    assert slot[0] == measure(tree).num_constants
    return val, margin


def smooth_triples(seed, n, vocab, max_depth=4, margin=1e-2, value_cap=1e6,
                   min_params=0):
    """Yield n random (tree, theta, x) triples that stay clear of protections."""
    rng = np.random.default_rng(seed)
    produced = 0
    while produced < n:
        tree = random_tree(rng, vocab, max_depth)
        p = measure(tree).num_constants
        if p < min_params:
            continue
        theta = rng.uniform(-2.0, 2.0, size=p)
        x = rng.uniform(-2.0, 2.0, size=vocab.variables)
        val, marg = naive_eval(tree, theta, x)
        if marg < margin or not math.isfinite(val) or abs(val) > value_cap:
            continue
        produced += 1
        yield tree, theta, x
