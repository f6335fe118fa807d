"""Synthetic regression targets, CSV ingestion, losses, and risk measurement.

The clipped absolute loss min(1, |a - y| / tau) is 1/tau-Lipschitz with
range [0, 1]; it is the loss the generalization bound is stated for.
Training fitness inside the GP engine uses raw MSE instead (see
:mod:`gpsr.evolution`); the clipped loss is reserved for bound checks.

A held-out test split stands in for the population risk: the generators
are synthetic, so a fresh large sample from the same generator can make
that proxy as tight as desired.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ParseError, SchemaError
from .trees import evaluate

__all__ = [
    "Dataset", "TARGETS", "synthesize", "clipped_loss", "empirical_risks",
    "saturation_fraction", "load_csv", "save_csv",
]


@dataclass
class Dataset:
    """Sample of (x, y) pairs with a train/test index split."""

    x: np.ndarray          # (m, d)
    y: np.ndarray          # (m,)
    train_idx: np.ndarray  # disjoint from test_idx, together exhaustive
    test_idx: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim != 2 or self.y.ndim != 1 or len(self.x) != len(self.y):
            raise ValueError("x must be (m, d) and y (m,) with matching m")
        if not (np.isfinite(self.x).all() and np.isfinite(self.y).all()):
            raise ValueError("dataset contains non-finite values")
        self.train_idx = np.asarray(self.train_idx, dtype=int)
        self.test_idx = np.asarray(self.test_idx, dtype=int)
        both = np.concatenate([self.train_idx, self.test_idx])
        if len(np.unique(both)) != len(both) or len(both) != len(self.y):
            raise ValueError("train/test split must be disjoint and exhaustive")

    @property
    def m(self) -> int:
        return len(self.y)

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @property
    def x_train(self) -> np.ndarray:
        return self.x[self.train_idx]

    @property
    def y_train(self) -> np.ndarray:
        return self.y[self.train_idx]

    @property
    def x_test(self) -> np.ndarray:
        return self.x[self.test_idx]

    @property
    def y_test(self) -> np.ndarray:
        return self.y[self.test_idx]


def _poly3(x):
    t = x[:, 0]
    return t ** 3 + t ** 2 + t


def _keijzer_sine(x):
    t = x[:, 0]
    return 0.3 * t * np.sin(2.0 * math.pi * t)


def _rational(x):
    t = x[:, 0]
    return 1.0 / (1.0 + t * t)


def _bivariate(x):
    return x[:, 0] * x[:, 1] + np.sin(x[:, 0])


TARGETS: dict[str, tuple[Callable, int]] = {
    "poly3": (_poly3, 1),
    "keijzer_sine": (_keijzer_sine, 1),
    "rational": (_rational, 1),
    "bivariate": (_bivariate, 2),
}


def synthesize(target: str, m: int, domain=None, noise_sigma: float = 0.0,
               seed: int = 0) -> Dataset:
    """Uniform inputs over the domain box, targets plus Gaussian noise.

    The split is a deterministic 50/50 partition by seeded shuffle.
    """
    if target not in TARGETS:
        raise KeyError(f"unknown target {target!r}; choose from {sorted(TARGETS)}")
    fn, d = TARGETS[target]
    if domain is None:
        domain = [(-1.0, 1.0)] * d
    if len(domain) != d:
        raise ValueError(f"target {target!r} needs {d} domain interval(s)")
    xs_rng, noise_rng, split_rng = [
        np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3)]
    x = np.column_stack([xs_rng.uniform(lo, hi, size=m) for lo, hi in domain])
    y = fn(x) + (noise_sigma * noise_rng.standard_normal(m) if noise_sigma else 0.0)
    order = split_rng.permutation(m)
    half = m // 2
    meta = {"name": target, "domain": [list(map(float, iv)) for iv in domain],
            "noise_sigma": float(noise_sigma), "seed": int(seed), "d": d, "m": int(m)}
    return Dataset(x, y, order[:half], order[half:], meta)


def clipped_loss(a, y, tau: float = 1.0):
    """min(1, |a - y| / tau); range [0, 1], (1/tau)-Lipschitz in a."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    return np.minimum(1.0, np.abs(np.asarray(a, dtype=float) - y) / tau)


def _predictions(ind, X):
    preds = evaluate(ind.tree, ind.theta, X)
    a, b = getattr(ind, "scale", (1.0, 0.0))
    if (a, b) != (1.0, 0.0):
        preds = a * preds + b
    return preds


def empirical_risks(ind, data: Dataset, tau: float = 1.0):
    """Mean clipped loss on each split and their gap (test - train)."""
    if len(data.train_idx) == 0 or len(data.test_idx) == 0:
        raise ValueError("both splits must be nonempty")
    train = float(np.mean(clipped_loss(_predictions(ind, data.x_train), data.y_train, tau)))
    test = float(np.mean(clipped_loss(_predictions(ind, data.x_test), data.y_test, tau)))
    return train, test, test - train


def saturation_fraction(ind, data: Dataset, tau: float = 1.0):
    """Fraction of points on each split where the clipped loss saturates at 1."""
    sat_train = float(np.mean(
        clipped_loss(_predictions(ind, data.x_train), data.y_train, tau) >= 1.0))
    sat_test = float(np.mean(
        clipped_loss(_predictions(ind, data.x_test), data.y_test, tau) >= 1.0))
    return sat_train, sat_test


# --- CSV ingestion; shortest-repr decimal formatting round-trips exactly ---

def save_csv(data: Dataset, path: str) -> None:
    d = data.d
    header = ",".join([f"x{i}" for i in range(1, d + 1)] + ["y"])
    lines = [header]
    for i in range(data.m):
        cells = [repr(float(v)) for v in data.x[i]] + [repr(float(data.y[i]))]
        lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    meta = dict(data.meta)
    meta["split_train"] = [int(i) for i in data.train_idx]
    with open(path + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def load_csv(path: str, split_seed: int = 0) -> Dataset:
    """Read a ``x1,...,xd,y`` CSV; the sidecar split is reused when present.

    Without a sidecar the split is a deterministic 50/50 partition from
    ``split_seed``.
    """
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = [h.strip() for h in lines[0].split(",")]
    d = len(header) - 1
    if d < 1 or header[-1] != "y" or header[:-1] != [f"x{i}" for i in range(1, d + 1)]:
        raise SchemaError(f"{path}: header must be x1,...,xd,y; got {lines[0]!r}")
    rows = []
    for r, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != d + 1:
            raise ParseError(f"{path}: row {r} has {len(cells)} cells, expected {d + 1}")
        parsed = []
        for c, cell in enumerate(cells, start=1):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise ParseError(
                    f"{path}: row {r}, column {c}: not a number: {cell!r}") from None
        rows.append(parsed)
    arr = np.asarray(rows, dtype=float)
    x, y = arr[:, :d], arr[:, d]
    m = len(y)
    meta = {"name": os.path.basename(path), "d": d, "m": m}
    sidecar = path + ".meta.json"
    if os.path.exists(sidecar):
        with open(sidecar) as fh:
            meta = json.load(fh)
        train = np.asarray(meta.pop("split_train"), dtype=int)
        test = np.setdiff1d(np.arange(m), train)
    else:
        order = np.random.default_rng(split_seed).permutation(m)
        train, test = order[: m // 2], order[m // 2:]
        meta["split_seed"] = split_seed
    return Dataset(x, y, train, test, meta)
