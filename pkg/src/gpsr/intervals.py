"""Interval evaluation of expression trees over input and parameter boxes.

Used for three things: screening expressions whose (unprotected) domain is
violated somewhere on the box, certifying a uniform output bound B, and
certifying a uniform bound G on the gradient norm with respect to the
learnable constants.

Endpoints are ordinary doubles widened by a relative slack per operation
rather than outward-rounded; the results back screening and bound
estimation, not formal proof. Undefinedness is data (``defined=False``),
never an exception. The parameter ball of radius R is enclosed by the box
``[-R, R]^p``, which only loosens B and G upward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .trees import Budget, ExprTree, measure

__all__ = [
    "Interval", "Box", "Rejected", "is_rejected",
    "interval", "make_box", "box_for_tree",
    "interval_eval", "certify_B", "certify_G",
    "WIDEN_SLACK",
]

WIDEN_SLACK = 1e-12  # relative endpoint widening applied after every operation

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; ``defined=False`` marks a domain violation."""

    lo: float
    hi: float
    defined: bool = True

    def __post_init__(self):
        if self.defined and self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def contains(self, x: float, slack: float = 0.0) -> bool:
        pad = slack * max(1.0, abs(self.lo), abs(self.hi))
        return self.defined and self.lo - pad <= x <= self.hi + pad

    def encloses(self, other: "Interval", slack: float = 0.0) -> bool:
        pad = slack * max(1.0, abs(self.lo), abs(self.hi))
        return (self.defined and other.defined
                and self.lo - pad <= other.lo and other.hi <= self.hi + pad)

    @property
    def magnitude(self) -> float:
        """sup of |x| over the interval."""
        return max(abs(self.lo), abs(self.hi))


UNDEFINED = Interval(math.nan, math.nan, defined=False)
_ZERO = Interval(0.0, 0.0)


def interval(lo: float, hi: float) -> Interval:
    return Interval(float(lo), float(hi))


@dataclass(frozen=True)
class Box:
    """Product box: one interval per input dimension and per parameter slot."""

    inputs: tuple[Interval, ...]
    params: tuple[Interval, ...] = ()

    def __post_init__(self):
        if not all(iv.defined for iv in self.inputs + self.params):
            raise ValueError("box components must be defined intervals")


IntervalLike = Union[Interval, Sequence[float]]


def _as_interval(v: IntervalLike) -> Interval:
    if isinstance(v, Interval):
        return v
    lo, hi = v
    return interval(lo, hi)


def make_box(inputs: Sequence[IntervalLike],
             params: Sequence[IntervalLike] = ()) -> Box:
    return Box(tuple(_as_interval(v) for v in inputs),
               tuple(_as_interval(v) for v in params))


def box_for_tree(tree: ExprTree, domain, radius: float) -> Box:
    """Input box from ``domain`` plus ``[-R, R]`` per learnable slot."""
    if isinstance(domain, Box):
        inputs = domain.inputs
    else:
        inputs = tuple(_as_interval(v) for v in domain)
    p = measure(tree).num_constants
    return Box(inputs, tuple(interval(-radius, radius) for _ in range(p)))


# --- interval arithmetic ---

def _widen(lo: float, hi: float) -> Interval:
    if math.isnan(lo) or math.isnan(hi):
        return UNDEFINED
    wlo = lo - abs(lo) * WIDEN_SLACK if math.isfinite(lo) else lo
    whi = hi + abs(hi) * WIDEN_SLACK if math.isfinite(hi) else hi
    return Interval(wlo, whi)


def _add(a: Interval, b: Interval) -> Interval:
    if not (a.defined and b.defined):
        return UNDEFINED
    return _widen(a.lo + b.lo, a.hi + b.hi)


def _sub(a: Interval, b: Interval) -> Interval:
    if not (a.defined and b.defined):
        return UNDEFINED
    return _widen(a.lo - b.hi, a.hi - b.lo)


def _neg(a: Interval) -> Interval:
    if not a.defined:
        return UNDEFINED
    return Interval(-a.hi, -a.lo)


def _mul(a: Interval, b: Interval) -> Interval:
    if not (a.defined and b.defined):
        return UNDEFINED
    cands = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
    cands = tuple(0.0 if math.isnan(c) else c for c in cands)  # 0 * inf
    return _widen(min(cands), max(cands))


def _square(a: Interval) -> Interval:
    if not a.defined:
        return UNDEFINED
    lo2, hi2 = a.lo * a.lo, a.hi * a.hi
    if a.lo <= 0.0 <= a.hi:
        return _widen(0.0, max(lo2, hi2))
    return _widen(min(lo2, hi2), max(lo2, hi2))


def _div(a: Interval, b: Interval) -> Interval:
    if not (a.defined and b.defined) or b.lo <= 0.0 <= b.hi:
        return UNDEFINED
    cands = (a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi)
    cands = tuple(0.0 if math.isnan(c) else c for c in cands)  # inf / inf
    return _widen(min(cands), max(cands))


def _exp(a: Interval) -> Interval:
    if not a.defined:
        return UNDEFINED

    def e(x):
        if x == math.inf:
            return math.inf
        try:
            return math.exp(x)
        except OverflowError:
            return math.inf
    return _widen(e(a.lo), e(a.hi))


def _log(a: Interval) -> Interval:
    if not a.defined or a.lo <= 0.0:
        return UNDEFINED
    return _widen(math.log(a.lo), math.log(a.hi))


def _sqrt(a: Interval) -> Interval:
    if not a.defined or a.lo < 0.0:
        return UNDEFINED
    return _widen(math.sqrt(a.lo), math.sqrt(a.hi))


def _crosses(a: Interval, c: float) -> bool:
    """Does the interval contain a point congruent to c modulo 2*pi?"""
    k = math.ceil((a.lo - c) / _TWO_PI)
    return c + k * _TWO_PI <= a.hi


def _sin(a: Interval) -> Interval:
    if not a.defined:
        return UNDEFINED
    if not (math.isfinite(a.lo) and math.isfinite(a.hi)):
        return _widen(-1.0, 1.0)
    if a.hi - a.lo >= _TWO_PI:
        return _widen(-1.0, 1.0)
    lo = min(math.sin(a.lo), math.sin(a.hi))
    hi = max(math.sin(a.lo), math.sin(a.hi))
    if _crosses(a, math.pi / 2.0):
        hi = 1.0
    if _crosses(a, -math.pi / 2.0):
        lo = -1.0
    return _widen(lo, hi)


def _cos(a: Interval) -> Interval:
    if not a.defined:
        return UNDEFINED
    if not (math.isfinite(a.lo) and math.isfinite(a.hi)):
        return _widen(-1.0, 1.0)
    if a.hi - a.lo >= _TWO_PI:
        return _widen(-1.0, 1.0)
    lo = min(math.cos(a.lo), math.cos(a.hi))
    hi = max(math.cos(a.lo), math.cos(a.hi))
    if _crosses(a, 0.0):
        hi = 1.0
    if _crosses(a, math.pi):
        lo = -1.0
    return _widen(lo, hi)


def interval_eval(tree: ExprTree, box: Box) -> Interval:
    """Enclosure of the tree's range over the box, unprotected semantics.

    ``defined=False`` when any subexpression's domain is violated by some
    point of the box. Syntactically identical children of ``mul`` are
    evaluated with the square rule to avoid the dependency blow-up of
    ``x * x``.
    """
    p = measure(tree).num_constants
    if p > len(box.params):
        raise ValueError(f"tree has {p} slots, box provides {len(box.params)}")
    slot = [0]
    return _ieval(tree, box, slot)


def _ieval(node: ExprTree, box: Box, slot) -> Interval:
    kind = node.kind
    if kind == "var":
        idx = int(node.value)
        if idx >= len(box.inputs):
            raise ValueError(f"box has {len(box.inputs)} inputs, tree uses {node.symbol}")
        return box.inputs[idx]
    if kind == "const":
        v = float(node.value)
        return Interval(v, v)
    if kind == "learnable":
        j = slot[0]
        slot[0] += 1
        return box.params[j]
    if kind == "unary":
        a = _ieval(node.children[0], box, slot)
        if not a.defined:
            return UNDEFINED
        return {"sin": _sin, "cos": _cos, "exp": _exp, "log": _log,
                "sqrt": _sqrt, "neg": _neg}[node.symbol](a)
    if kind == "binary":
        if (node.symbol == "mul" and node.children[0] == node.children[1]
                and measure(node.children[0]).num_constants == 0):
            # slot-free identical children compute the same value pointwise,
            # so the square rule applies; with slots they are distinct
            # functions (independent parameters) and it would be unsound
            return _square(_ieval(node.children[0], box, slot))
        a = _ieval(node.children[0], box, slot)
        b = _ieval(node.children[1], box, slot)
        if not (a.defined and b.defined):
            return UNDEFINED
        return {"add": _add, "sub": _sub, "mul": _mul, "div": _div}[node.symbol](a, b)
    raise ValueError(f"unknown node kind {kind!r}")


# --- certification ---

@dataclass(frozen=True)
class Rejected:
    """Certification failure: domain violated or bound unbounded on the box."""

    reason: str = ""


def is_rejected(result) -> bool:
    return isinstance(result, Rejected)


def certify_B(tree: ExprTree, budget: Budget, domain) -> float | Rejected:
    """Certified output bound: sup |f| over the input box and [-R, R]^p.

    Returns ``Rejected`` when the expression's domain is violated somewhere
    on the box or the enclosure is unbounded.
    """
    box = box_for_tree(tree, domain, budget.radius)
    iv = interval_eval(tree, box)
    if not iv.defined:
        return Rejected("domain violated on the box")
    if not (math.isfinite(iv.lo) and math.isfinite(iv.hi)):
        return Rejected("unbounded output enclosure")
    return iv.magnitude


def certify_G(tree: ExprTree, budget: Budget, domain) -> float | Rejected:
    """Certified sensitivity: upper bound on sup ||grad_theta f||_2.

    Forward-mode interval differentiation; each partial's enclosure is an
    interval, and G is the Euclidean norm of their magnitudes. ``Rejected``
    when the value or any partial is undefined on the box; ``inf`` when
    defined but unbounded.
    """
    box = box_for_tree(tree, domain, budget.radius)
    p = measure(tree).num_constants
    if p == 0:
        iv = interval_eval(tree, box)
        if not iv.defined:
            return Rejected("domain violated on the box")
        return 0.0
    slot = [0]
    val, grads = _ieval_grad(tree, box, p, slot)
    if not val.defined or any(not g.defined for g in grads):
        return Rejected("domain violated on the box")
    sq = 0.0
    for g in grads:
        mag = g.magnitude
        sq += mag * mag  # float multiply overflows to inf, ** would raise
    return math.sqrt(sq)


def _grad_zero(p):
    return [_ZERO] * p


def _ieval_grad(node: ExprTree, box: Box, p: int, slot):
    kind = node.kind
    if kind == "var":
        return box.inputs[int(node.value)], _grad_zero(p)
    if kind == "const":
        v = float(node.value)
        return Interval(v, v), _grad_zero(p)
    if kind == "learnable":
        j = slot[0]
        slot[0] += 1
        g = _grad_zero(p)
        g[j] = Interval(1.0, 1.0)
        return box.params[j], g
    if kind == "unary":
        a, ga = _ieval_grad(node.children[0], box, p, slot)
        if not a.defined:
            return UNDEFINED, _grad_zero(p)
        sym = node.symbol
        if sym == "neg":
            return _neg(a), [_neg(g) for g in ga]
        if sym == "sin":
            d = _cos(a)
            return _sin(a), [_mul(d, g) for g in ga]
        if sym == "cos":
            d = _neg(_sin(a))
            return _cos(a), [_mul(d, g) for g in ga]
        if sym == "exp":
            v = _exp(a)
            return v, [_mul(v, g) for g in ga]
        if sym == "log":
            v = _log(a)
            if not v.defined:
                return UNDEFINED, _grad_zero(p)
            return v, [_div(g, a) for g in ga]
        if sym == "sqrt":
            v = _sqrt(a)
            # derivative 1/(2 sqrt a) is unbounded as a -> 0+
            if not v.defined or a.lo <= 0.0:
                return UNDEFINED, [UNDEFINED] * p
            d = _div(Interval(1.0, 1.0), _mul(Interval(2.0, 2.0), v))
            return v, [_mul(d, g) for g in ga]
        raise ValueError(f"unknown operator {sym!r}")
    if kind == "binary":
        a, ga = _ieval_grad(node.children[0], box, p, slot)
        b, gb = _ieval_grad(node.children[1], box, p, slot)
        if not (a.defined and b.defined):
            return UNDEFINED, _grad_zero(p)
        sym = node.symbol
        if sym == "add":
            return _add(a, b), [_add(x, y) for x, y in zip(ga, gb)]
        if sym == "sub":
            return _sub(a, b), [_sub(x, y) for x, y in zip(ga, gb)]
        if sym == "mul":
            grads = [_add(_mul(a, y), _mul(b, x)) for x, y in zip(ga, gb)]
            return _mul(a, b), grads
        if sym == "div":
            v = _div(a, b)
            if not v.defined:
                return UNDEFINED, [UNDEFINED] * p
            denom = _square(b)
            grads = [_div(_sub(_mul(x, b), _mul(a, y)), denom)
                     for x, y in zip(ga, gb)]
            return v, grads
        raise ValueError(f"unknown operator {sym!r}")
    raise ValueError(f"unknown node kind {kind!r}")
