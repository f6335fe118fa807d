import math

import numpy as np
import pytest

from gpsr.errors import DomainError
from gpsr.intervals import (
    Box,
    Rejected,
    box_for_tree,
    certify_B,
    certify_G,
    interval,
    interval_eval,
    is_rejected,
    make_box,
)
from gpsr.trees import Budget, Vocabulary, evaluate, eval_with_gradient, measure, parse

from conftest import random_tree

VOCAB = Vocabulary()


def sample_in_box(rng, box, n):
    """n random (x, theta) pairs drawn uniformly from the box."""
    xs = np.column_stack([rng.uniform(iv.lo, iv.hi, size=n) for iv in box.inputs]) \
        if box.inputs else np.zeros((n, 0))
    ths = np.column_stack([rng.uniform(iv.lo, iv.hi, size=n) for iv in box.params]) \
        if box.params else np.zeros((n, 0))
    return xs, ths


def test_square_rule_example():
    t = parse("(mul x1 x1)", VOCAB)
    iv = interval_eval(t, make_box([(-1.0, 2.0)]))
    assert iv.defined
    assert iv.lo == pytest.approx(0.0, abs=1e-9)
    assert iv.hi == pytest.approx(4.0, rel=1e-9)
    grid = np.linspace(-1, 2, 2001)
    vals = grid * grid
    assert iv.lo <= vals.min() and vals.max() <= iv.hi


def test_division_through_zero_is_undefined():
    t = parse("(div one x1)", VOCAB)
    iv = interval_eval(t, make_box([(-1.0, 1.0)]))
    assert not iv.defined


def test_interval_addition_example():
    t = parse("(add c x1)", VOCAB)
    iv = interval_eval(t, make_box([(0.0, 1.0)], [(-2.0, 2.0)]))
    assert iv.lo == pytest.approx(-2.0, rel=1e-9)
    assert iv.hi == pytest.approx(3.0, rel=1e-9)


def test_sin_cos_range_analysis():
    assert interval_eval(parse("(sin x1)", VOCAB), make_box([(0.0, 0.5)])).hi < 0.5
    iv = interval_eval(parse("(sin x1)", VOCAB), make_box([(1.0, 2.5)]))
    assert iv.hi == pytest.approx(1.0, rel=1e-9)  # pi/2 inside
    iv = interval_eval(parse("(cos x1)", VOCAB), make_box([(3.0, 3.5)]))
    assert iv.lo == pytest.approx(-1.0, rel=1e-9)  # pi inside
    iv = interval_eval(parse("(cos x1)", VOCAB), make_box([(-0.5, 0.5)]))
    assert iv.hi == pytest.approx(1.0, rel=1e-9)
    iv = interval_eval(parse("(sin x1)", VOCAB), make_box([(0.0, 100.0)]))
    assert iv.lo == pytest.approx(-1.0, rel=1e-9)
    assert iv.hi == pytest.approx(1.0, rel=1e-9)


def random_box(rng, d, p, radius=None):
    def rand_iv():
        lo = rng.uniform(-3, 3)
        return (lo, lo + rng.uniform(0.01, 3.0))
    inputs = [rand_iv() for _ in range(d)]
    if radius is None:
        params = [rand_iv() for _ in range(p)]
    else:
        params = [(-radius, radius)] * p
    return make_box(inputs, params)


def test_soundness_random_points():
    rng = np.random.default_rng(1234)
    points_checked = 0
    trees_checked = 0
    while trees_checked < 50:
        t = random_tree(rng, VOCAB, 4)
        p = measure(t).num_constants
        box = random_box(rng, 1, p)
        iv = interval_eval(t, box)
        if not iv.defined:
            continue
        trees_checked += 1
        xs, ths = sample_in_box(rng, box, 200)
        for i in range(200):
            try:
                v = evaluate(t, ths[i], xs[i], protected=False)
            except DomainError:
                continue  # exp overflow guard; real semantics still defined
            points_checked += 1
            assert iv.contains(v, slack=1e-9), (t, v, iv)
    assert points_checked >= 9000


def test_monotonicity_under_box_shrinking():
    rng = np.random.default_rng(99)
    done = 0
    while done < 40:
        t = random_tree(rng, VOCAB, 4)
        p = measure(t).num_constants
        outer = random_box(rng, 1, p)
        iv_outer = interval_eval(t, outer)

        def shrink(iv):
            w = iv.hi - iv.lo
            lo = iv.lo + 0.25 * w
            return interval(lo, lo + 0.5 * w)

        inner = Box(tuple(shrink(v) for v in outer.inputs),
                    tuple(shrink(v) for v in outer.params))
        iv_inner = interval_eval(t, inner)
        if not iv_outer.defined:
            continue
        done += 1
        assert iv_inner.defined
        assert iv_outer.encloses(iv_inner, slack=1e-9)


BUDGET = Budget(max_size=20, max_depth=5, radius=2.0)


def test_certify_B_sine():
    b = certify_B(parse("(sin x1)", VOCAB), BUDGET, [(-5.0, 5.0)])
    assert not is_rejected(b)
    grid = np.sin(np.linspace(-5, 5, 4001))
    assert np.abs(grid).max() <= b <= 1.0 + 1e-9


def test_certify_B_rejects_zero_crossing_division():
    assert is_rejected(certify_B(parse("(div one x1)", VOCAB), BUDGET, [(-1.0, 1.0)]))


def test_certify_B_linear_in_radius():
    t = parse("(mul c x1)", VOCAB)
    b = certify_B(t, BUDGET, [(-1.0, 1.0)])
    assert b == pytest.approx(2.0, rel=1e-9)
    rng = np.random.default_rng(5)
    box = box_for_tree(t, [(-1.0, 1.0)], BUDGET.radius)
    xs, ths = sample_in_box(rng, box, 500)
    sup = max(abs(evaluate(t, ths[i], xs[i])) for i in range(500))
    assert sup <= b + 1e-12


def test_certify_B_unbounded_is_rejected():
    # exp(exp(x)) on a huge box overflows the enclosure
    t = parse("(exp (exp x1))", VOCAB)
    assert is_rejected(certify_B(t, BUDGET, [(0.0, 1000.0)]))


def test_certify_G_linear_tree():
    t = parse("(add (mul c x1) c)", VOCAB)
    g = certify_G(t, BUDGET, [(-1.0, 1.0)])
    assert g == pytest.approx(math.sqrt(2.0), rel=1e-9)


def test_certify_G_no_parameters():
    assert certify_G(parse("(sin x1)", VOCAB), BUDGET, [(-1.0, 1.0)]) == 0.0


def test_certify_G_exponential_growth():
    t = parse("(exp (mul c x1))", VOCAB)
    budget = Budget(max_size=20, max_depth=5, radius=10.0)
    g = certify_G(t, budget, [(0.0, 1.0)])
    assert not is_rejected(g)
    assert math.isfinite(g)
    assert g == pytest.approx(math.exp(10.0), rel=1e-6)
    rng = np.random.default_rng(17)
    box = box_for_tree(t, [(0.0, 1.0)], 10.0)
    xs, ths = sample_in_box(rng, box, 300)
    for i in range(300):
        _, grad = eval_with_gradient(t, ths[i], xs[i])
        assert np.linalg.norm(grad) <= g * (1 + 1e-9)


def test_certify_G_rejects_sqrt_near_zero():
    t = parse("(sqrt c)", VOCAB)
    assert is_rejected(certify_G(t, BUDGET, [(-1.0, 1.0)]))


def test_gradient_soundness_random_trees():
    rng = np.random.default_rng(2024)
    done = 0
    while done < 30:
        t = random_tree(rng, VOCAB, 4)
        p = measure(t).num_constants
        if p == 0:
            continue
        g = certify_G(t, BUDGET, [(-1.0, 1.0)])
        if is_rejected(g) or not math.isfinite(g):
            continue
        done += 1
        box = box_for_tree(t, [(-1.0, 1.0)], BUDGET.radius)
        xs, ths = sample_in_box(rng, box, 100)
        for i in range(100):
            try:
                _, grad = eval_with_gradient(t, ths[i], xs[i], protected=False)
            except DomainError:
                continue
            assert np.linalg.norm(grad) <= g * (1 + 1e-9) + 1e-12


def test_box_requires_defined_components():
    from gpsr.intervals import UNDEFINED
    with pytest.raises(ValueError):
        Box((interval(0, 1),), (UNDEFINED,))
