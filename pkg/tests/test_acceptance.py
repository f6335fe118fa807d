"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Tolerances are pinned here exactly as stated; statistical criteria
use the seeds recorded in this file.
"""

import itertools
import math
import time

import numpy as np
import pytest

from gpsr import counting
from gpsr.cli import main as cli_main
from gpsr.complexity import (
    covering_bound,
    dudley_fixed_structure_bound,
    finite_union_bound,
    greedy_cover_size,
    pseudometric_dS,
    rademacher_exact,
    rademacher_mc_fixed,
)
from gpsr.datasets import Dataset, empirical_risks, synthesize
from gpsr.evolution import GpConfig, evolve, linear_scale, optimize_constants, \
    init_population, Individual
from gpsr.intervals import certify_G, is_rejected
from gpsr.sampling import rng_for, sample_ball
from gpsr.trees import Budget, Vocabulary, evaluate, eval_with_gradient, measure, parse

from conftest import random_tree, smooth_triples
from test_counting import brute_count_shapes

VOCAB = Vocabulary()


def report(num, message):
    print(f"\n[criterion {num:02d}] PASS - {message}")


def small_vocabularies():
    unary_pool = ("sin", "cos")
    binary_pool = ("add", "mul")
    for m1 in range(0, 3):
        for m2 in range(0, 3):
            if m1 + m2 == 0:
                continue
            for n0 in (1, 2):
                fixed = (("one", 1.0),) if n0 == 2 else ()
                yield Vocabulary(unary_ops=unary_pool[:m1],
                                 binary_ops=binary_pool[:m2],
                                 variables=1, fixed_constants=fixed)


def test_c01_exact_counting_oracle_equivalence():
    t0 = time.time()
    checked = 0
    for vocab in small_vocabularies():
        for s in range(1, 6):
            for d in range(1, 4):
                want = counting.count_structures(s, d, vocab)
                got = sum(1 for _ in counting.enumerate_structures(s, d, vocab))
                assert got == want, (vocab, s, d)
                checked += 1
    elapsed = time.time() - t0
    assert elapsed < 10.0
    report(1, f"count_structures == enumeration on {checked} instances "
              f"({elapsed:.1f}s)")


def test_c02_catalan_saturation():
    t0 = time.time()
    catalan = [1, 1, 2, 5, 14, 42]
    for n in range(1, 7):
        for d in range(n - 1, n + 2):
            assert counting.count_shapes(n, d) == catalan[n - 1]
        assert brute_count_shapes(n, n - 1) == catalan[n - 1]
    elapsed = time.time() - t0
    assert elapsed < 1.0
    report(2, f"count_shapes saturates to Catalan numbers ({elapsed:.2f}s)")


def test_c03_bkr_asymptotic_ratio():
    t0 = time.time()
    r200 = counting.count_shapes(200, 4) / math.exp(counting.bkr_asymptotic(200, 4))
    assert 0.9 <= r200 <= 1.1
    devs = [abs(counting.count_shapes(s, 4)
                / math.exp(counting.bkr_asymptotic(s, 4)) - 1.0)
            for s in range(50, 401)]
    # the ratio hits float noise by s = 50, so monotone movement toward 1
    # is asserted with an absolute 1e-12 slack
    assert all(b <= a + 1e-12 for a, b in zip(devs, devs[1:]))
    elapsed = time.time() - t0
    assert elapsed < 30.0
    report(3, f"exact/asymptotic ratio at s=200 is {r200:.12f}; "
              f"deviations shrink monotonically ({elapsed:.1f}s)")


def test_c04_growth_rate_limit():
    worst = 0.0
    for d in (2, 3, 4):
        diff = abs(math.log(counting.count_shapes(400, d))
                   - math.log(counting.count_shapes(399, d))
                   - math.log(counting.rho(d)))
        worst = max(worst, diff)
        assert diff < 0.01
    report(4, f"per-node log growth matches log rho_D, worst |diff| = {worst:.2e}")


def test_c05_structure_bound_dominance():
    for d in range(1, 5):
        c_d = counting.calibrate_c_D(d)
        for s in range(1, 13):
            exact = math.log(counting.count_structures(s, d, VOCAB))
            bound = counting.log_structure_bound(s, d, VOCAB, c_d)
            assert exact <= bound, (s, d)
    report(5, "log count_structures <= theorem bound for all s <= 12, D <= 4")


def test_c06_finite_union_dominance():
    t0 = time.time()
    rng = rng_for(606)
    m = 8
    for _ in range(100):
        n_classes = int(rng.integers(1, 17))
        b = float(rng.uniform(0.5, 3.0))
        classes = [rng.uniform(-b, b, size=(int(rng.integers(1, 5)), m))
                   for _ in range(n_classes)]
        exact = rademacher_exact(np.vstack(classes))
        max_member = max(rademacher_exact(c) for c in classes)
        assert exact <= finite_union_bound(max_member, b, math.log(n_classes), m) + 1e-12
    elapsed = time.time() - t0
    assert elapsed < 5.0
    report(6, f"union Rademacher dominated on 100 random instances ({elapsed:.1f}s)")


def _certified_corpus(n_trees, seed, budget, domain, max_p=4):
    rng = rng_for(seed)
    corpus = []
    while len(corpus) < n_trees:
        tree = random_tree(rng, VOCAB, 4)
        p = measure(tree).num_constants
        if not (1 <= p <= max_p):
            continue
        g = certify_G(tree, budget, domain)
        if is_rejected(g) or not math.isfinite(g) or g == 0.0:
            continue
        corpus.append((tree, g))
    return corpus


CORPUS_BUDGET = Budget(max_size=30, max_depth=5, radius=1.0)
CORPUS_DOMAIN = [(-1.0, 1.0)]


def _corpus_sample(m, seed):
    rng = rng_for(seed)
    x = rng.uniform(-1.0, 1.0, size=(m, 1))
    y = rng.uniform(-1.0, 1.0, size=m)
    half = m // 2
    return Dataset(x, y, np.arange(half), np.arange(half, m), {})


def test_c07_fixed_structure_dominance():
    t0 = time.time()
    sample = _corpus_sample(64, seed=700)
    corpus = _certified_corpus(20, seed=707, budget=CORPUS_BUDGET,
                               domain=CORPUS_DOMAIN)
    for tree, g_cert in corpus:
        p = measure(tree).num_constants
        mean, stderr = rademacher_mc_fixed(tree, CORPUS_BUDGET.radius, sample,
                                           n_sigma=12, n_restarts=4, seed=711,
                                           n_steps=100)
        bound = dudley_fixed_structure_bound(p, CORPUS_BUDGET.radius, g_cert, 64)
        assert mean - 3 * stderr <= bound, tree
    elapsed = time.time() - t0
    assert elapsed < 120.0
    report(7, f"MC Rademacher below the fixed-structure bound on "
              f"{len(corpus)} trees ({elapsed:.0f}s)")


def test_c08_pseudometric_domination():
    sample = _corpus_sample(64, seed=800)
    corpus = _certified_corpus(20, seed=707, budget=CORPUS_BUDGET,
                               domain=CORPUS_DOMAIN)
    rng = rng_for(808)
    for tree, g_cert in corpus:
        p = measure(tree).num_constants
        for _ in range(1000):
            a = sample_ball(rng, p, CORPUS_BUDGET.radius)
            b = sample_ball(rng, p, CORPUS_BUDGET.radius)
            d = pseudometric_dS(tree, sample.x, a, b)
            assert d <= g_cert * np.linalg.norm(a - b) * (1 + 1e-9) + 1e-12
    report(8, "d_S(theta, theta') <= G_certified * ||theta - theta'|| "
              "on 1000 pairs x 20 trees")


def test_c09_covering_bound():
    sample = _corpus_sample(32, seed=900)
    trees = {
        1: parse("(mul c x1)", VOCAB),
        2: parse("(add (mul c x1) c)", VOCAB),
        3: parse("(add (mul c x1) (add c (mul c (mul x1 x1))))", VOCAB),
    }
    for p, tree in trees.items():
        assert measure(tree).num_constants == p
        g = certify_G(tree, CORPUS_BUDGET, CORPUS_DOMAIN)
        assert not is_rejected(g)
        for eps in (0.05, 0.1, 0.2, 0.5, 1.0, 2.0):
            size = greedy_cover_size(tree, 1.0, sample, eps, n_candidates=500,
                                     seed=909)
            cap = math.ceil(math.exp(covering_bound(p, 1.0, g, eps)))
            assert size <= cap, (p, eps, size, cap)
    report(9, "greedy covers stay below (1 + 2RG/eps)^p for p in {1, 2, 3}")


def test_c10_gradient_correctness():
    n_checked = 0
    for tree, theta, x in smooth_triples(seed=1010, n=500, vocab=VOCAB):
        val, grad = eval_with_gradient(tree, theta, x)
        if len(theta) == 0:
            continue
        h = 1e-5
        for j in range(len(theta)):
            up, dn = theta.copy(), theta.copy()
            up[j] += h
            dn[j] -= h
            fd = (evaluate(tree, up, x) - evaluate(tree, dn, x)) / (2 * h)
            assert grad[j] == pytest.approx(fd, rel=1e-4, abs=1e-7)
            n_checked += 1
    assert n_checked >= 500
    report(10, f"forward gradients match central differences on "
               f"{n_checked} components over 500 smooth triples")


def test_c11_end_to_end_bound_dominance():
    budget = Budget(max_size=25, max_depth=6, radius=5.0)
    worst_slack = math.inf
    runs = 0
    for target in ("poly3", "keijzer_sine"):
        for m in (64, 256, 1024):
            data = synthesize(target, m, noise_sigma=0.05, seed=1100 + m)
            cfg = GpConfig(population_size=64, generations=12, seed=11,
                           interval_screening=True)
            result = evolve(VOCAB, budget, data, cfg)
            rep = result.report
            assert rep.B_provenance == "certified"
            for ind in result.population:
                tr, te, gap = empirical_risks(ind, data, cfg.tau)
                assert te <= tr + rep.total, (target, m)
            slack = rep.total / max(rep.observed_gap, 1e-12)
            worst_slack = min(worst_slack, slack)
            runs += 1
    report(11, f"test loss <= train loss + bound for every final individual "
               f"in {runs} runs; smallest slack ratio {worst_slack:.1f}x "
               f"(bound conservative as expected)")


def test_c12a_bloat_mechanism():
    vocab = VOCAB
    budget = Budget(max_size=60, max_depth=10, radius=5.0)
    wins = 0
    finals = []
    for seed in range(10):
        data = synthesize("poly3", 64, noise_sigma=0.0, seed=1200 + seed)
        base = dict(population_size=60, generations=200, seed=seed,
                    interval_screening=False, constant_opt="off")
        free = evolve(vocab, budget, data, GpConfig(parsimony="none", **base))
        pen = evolve(vocab, budget, data,
                     GpConfig(parsimony="size_penalty", parsimony_alpha=0.01,
                              **base))
        sz_free = free.history[-1].mean_size
        sz_pen = pen.history[-1].mean_size
        finals.append((sz_free, sz_pen))
        wins += sz_free > sz_pen
    assert wins >= 8, finals
    report(12, f"bloat: mean size at generation 200 larger without parsimony "
               f"in {wins}/10 matched seeds")


def test_c12b_linear_scale_never_increases_mse():
    data = synthesize("poly3", 50, noise_sigma=0.1, seed=12)
    cfg = GpConfig(population_size=120, generations=0, seed=21,
                   interval_screening=False).validated()
    pop = init_population(VOCAB, Budget(20, 5, 3.0), cfg)
    calls = 0
    for ind in pop:
        preds = evaluate(ind.tree, ind.theta, data.x_train)
        if not np.isfinite(preds).all():
            continue
        raw = float(np.mean((preds - data.y_train) ** 2))
        out = linear_scale(ind, data)
        assert out.train_mse <= raw
        calls += 1
    assert calls >= 100
    report(12, f"linear_scale never increased training MSE over {calls} calls")


def test_c12c_optimize_constants_never_increases_mse():
    data = synthesize("keijzer_sine", 40, noise_sigma=0.05, seed=13)
    budget = Budget(20, 5, 3.0)
    cfg = GpConfig(population_size=150, generations=0, seed=31,
                   interval_screening=False).validated()
    pop = init_population(VOCAB, budget, cfg)
    calls = 0
    for ind in pop:
        if measure(ind.tree).num_constants == 0:
            continue
        preds = evaluate(ind.tree, ind.theta, data.x_train)
        if not np.isfinite(preds).all():
            continue
        raw = float(np.mean((preds - data.y_train) ** 2))
        out = optimize_constants(ind, data, iters=10, radius=budget.radius)
        after_preds = evaluate(out.tree, out.theta, data.x_train)
        after = float(np.mean((after_preds - data.y_train) ** 2))
        assert after <= raw
        assert np.linalg.norm(out.theta) <= budget.radius * (1 + 1e-9)
        calls += 1
    assert calls >= 50
    report(12, f"optimize_constants never increased training MSE over {calls} calls")


def test_c13_cmd_evolve_determinism(tmp_path, capsys):
    cfg_lines = [
        "vocab.variables = 1",
        "budget.size = 15",
        "budget.depth = 4",
        "budget.radius = 3.0",
        "gp.population_size = 24",
        "gp.generations = 5",
        "gp.seed = 13",
        "data.target = keijzer_sine",
        "data.m = 48",
        "data.noise_sigma = 0.05",
        "data.seed = 5",
    ]
    cfg = tmp_path / "det.cfg"
    cfg.write_text("\n".join(cfg_lines) + "\n")
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert cli_main(["--config", str(cfg), "--out", str(out_a), "evolve"]) == 0
    assert cli_main(["--config", str(cfg), "--out", str(out_b), "evolve"]) == 0
    capsys.readouterr()
    ha = (out_a / "history.csv").read_bytes()
    hb = (out_b / "history.csv").read_bytes()
    assert ha == hb
    report(13, "cmd_evolve reruns produce byte-identical history output")
