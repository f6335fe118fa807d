"""Expression trees with learnable constants.

Trees are rooted, ordered, and immutable. Internal nodes carry unary or
binary operator symbols; leaves are input variables (``x1``..``xd``),
named fixed constants (``pi``, ``one``), or learnable-constant slots
(``c``). Slots are numbered 0..p-1 in pre-order, so a parameter vector
theta of length p fully determines the function the tree computes.

Evaluation supports two operator semantics:

* protected (default): every operator is total. Division returns 1 when
  the denominator is within ``DIV_EPS`` of zero, ``log`` acts on the
  absolute value with ``log(0) = 0``, ``sqrt`` acts on the absolute
  value, and the ``exp`` argument is clamped at ``EXP_CLAMP``.
* strict: invalid inputs raise :class:`~gpsr.errors.DomainError`.

Protected variants have defined derivatives everywhere (derivative 0 on
the protected branch), so forward-mode differentiation is total as well.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence, Union

import numpy as np

from .errors import DomainError, ParseError, UnknownSymbolError

__all__ = [
    "Vocabulary", "ExprTree", "ParamVector", "Budget", "TreeMeasure",
    "Violation", "variable", "fixed_const", "learnable", "op",
    "measure", "evaluate", "eval_with_gradient", "serialize", "parse",
    "validate", "iter_nodes", "subtree_at", "replace_at",
    "DEFAULT_UNARY", "DEFAULT_BINARY", "OP_ARITY", "DIV_EPS", "EXP_CLAMP",
]

DEFAULT_UNARY = ("sin", "cos", "exp", "log", "sqrt", "neg")
DEFAULT_BINARY = ("add", "sub", "mul", "div")
OP_ARITY = {name: 1 for name in DEFAULT_UNARY}
OP_ARITY.update({name: 2 for name in DEFAULT_BINARY})

DIV_EPS = 1e-12     # |denominator| below this: protected division yields 1
EXP_CLAMP = 700.0   # exp argument clamp; exp(700) ~ 1e304 stays finite

LEARNABLE_SYMBOL = "c"
_VAR_RE = re.compile(r"^x([1-9][0-9]*)$")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Vocabulary:
    """Operator and terminal alphabet.

    ``unary_ops`` and ``binary_ops`` select from the fixed operator
    semantics defined in this module; ``variables`` is the input
    dimension d; ``fixed_constants`` is an ordered tuple of
    ``(name, value)`` pairs. The terminal count N0 = d + #fixed.
    """

    unary_ops: tuple[str, ...] = DEFAULT_UNARY
    binary_ops: tuple[str, ...] = DEFAULT_BINARY
    variables: int = 1
    fixed_constants: tuple[tuple[str, float], ...] = (("one", 1.0), ("pi", math.pi))

    def __post_init__(self):
        ops = tuple(self.unary_ops) + tuple(self.binary_ops)
        if len(set(ops)) != len(ops):
            raise ValueError("operator identifiers must be unique across arities")
        if len(ops) == 0:
            raise ValueError("need at least one operator")
        for name in self.unary_ops:
            if OP_ARITY.get(name) != 1:
                raise ValueError(f"unknown unary operator {name!r}")
        for name in self.binary_ops:
            if OP_ARITY.get(name) != 2:
                raise ValueError(f"unknown binary operator {name!r}")
        if self.variables < 0:
            raise ValueError("variable count must be nonnegative")
        names = [n for n, _ in self.fixed_constants]
        if len(set(names)) != len(names):
            raise ValueError("fixed-constant names must be unique")
        for name in names:
            if name == LEARNABLE_SYMBOL or _VAR_RE.match(name) or name in OP_ARITY:
                raise ValueError(f"fixed-constant name {name!r} collides with a reserved symbol")
        if self.n0 < 1:
            raise ValueError("need at least one terminal symbol (N0 >= 1)")
        object.__setattr__(self, "unary_ops", tuple(self.unary_ops))
        object.__setattr__(self, "binary_ops", tuple(self.binary_ops))
        object.__setattr__(self, "fixed_constants",
                           tuple((n, float(v)) for n, v in self.fixed_constants))

    @property
    def m1(self) -> int:
        return len(self.unary_ops)

    @property
    def m2(self) -> int:
        return len(self.binary_ops)

    @property
    def d(self) -> int:
        return self.variables

    @property
    def n0(self) -> int:
        return self.variables + len(self.fixed_constants)

    def fixed_value(self, name: str) -> float:
        for n, v in self.fixed_constants:
            if n == name:
                return v
        raise KeyError(name)

    def terminal_symbols(self) -> tuple[str, ...]:
        """All leaf symbols: variables, fixed constants, and the slot symbol."""
        vs = tuple(f"x{i}" for i in range(1, self.variables + 1))
        return vs + tuple(n for n, _ in self.fixed_constants) + (LEARNABLE_SYMBOL,)


@dataclass(frozen=True)
class ExprTree:
    """A node of an expression tree (the root stands for the whole tree).

    ``kind`` is one of ``unary``, ``binary``, ``var``, ``const``,
    ``learnable``. For ``var`` leaves ``value`` holds the 0-based input
    index; for ``const`` leaves it holds the numeric value. Size, depth,
    and slot count are accumulated at construction so measurement is O(1).
    """

    kind: str
    symbol: str
    children: tuple["ExprTree", ...] = ()
    value: float | int | None = None
    _size: int = field(init=False, repr=False, compare=False, default=1)
    _depth: int = field(init=False, repr=False, compare=False, default=0)
    _slots: int = field(init=False, repr=False, compare=False, default=0)
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self):
        size = 1
        depth = 0
        slots = 1 if self.kind == "learnable" else 0
        for ch in self.children:
            size += ch._size
            depth = max(depth, ch._depth + 1)
            slots += ch._slots
        object.__setattr__(self, "_size", size)
        object.__setattr__(self, "_depth", depth)
        object.__setattr__(self, "_slots", slots)
        object.__setattr__(self, "_hash", hash(
            (self.kind, self.symbol, self.value,
             tuple(ch._hash for ch in self.children))))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"ExprTree({serialize(self)!r})"


def variable(i: int) -> ExprTree:
    """Leaf for input variable ``x<i>`` (1-indexed)."""
    if i < 1:
        raise ValueError("variables are 1-indexed")
    return ExprTree("var", f"x{i}", (), i - 1)


def fixed_const(name: str, value: float) -> ExprTree:
    return ExprTree("const", name, (), float(value))


def learnable() -> ExprTree:
    return ExprTree("learnable", LEARNABLE_SYMBOL)


def op(symbol: str, *children: ExprTree) -> ExprTree:
    arity = OP_ARITY.get(symbol)
    if arity is None:
        raise ValueError(f"unknown operator {symbol!r}")
    if len(children) != arity:
        raise ValueError(f"{symbol!r} takes {arity} children, got {len(children)}")
    return ExprTree("unary" if arity == 1 else "binary", symbol, tuple(children))


class TreeMeasure(NamedTuple):
    size: int
    depth: int
    num_constants: int


def measure(tree: ExprTree) -> TreeMeasure:
    """Node count, edge-depth (root at 0), and learnable-slot count."""
    return TreeMeasure(tree._size, tree._depth, tree._slots)


def iter_nodes(tree: ExprTree) -> Iterator[ExprTree]:
    """Pre-order node iteration."""
    stack = [tree]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def subtree_at(tree: ExprTree, index: int) -> ExprTree:
    """Node at pre-order position ``index`` (root is 0)."""
    for k, node in enumerate(iter_nodes(tree)):
        if k == index:
            return node
    raise IndexError(index)


def replace_at(tree: ExprTree, index: int, new: ExprTree) -> ExprTree:
    """Tree with the subtree at pre-order position ``index`` replaced."""

    def rebuild(node: ExprTree, pos: int) -> tuple[ExprTree, int]:
        if pos == index:
            return new, pos + _size(node)
        if not node.children:
            return node, pos + 1
        cur = pos + 1
        kids = []
        changed = False
        for ch in node.children:
            built, cur = rebuild(ch, cur)
            changed = changed or built is not ch
            kids.append(built)
        if not changed:
            return node, cur
        return ExprTree(node.kind, node.symbol, tuple(kids), node.value), cur

    if index < 0 or index >= _size(tree):
        raise IndexError(index)
    out, _ = rebuild(tree, 0)
    return out


def _size(tree: ExprTree) -> int:
    return tree._size


@dataclass(frozen=True, eq=False)
class ParamVector:
    """Learnable-constant vector theta with its ball radius R.

    Enforces ``||theta||_2 <= R`` (with a small numerical tolerance).
    """

    values: np.ndarray
    radius: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        if vals.ndim != 1:
            raise ValueError("theta must be one-dimensional")
        norm = float(np.linalg.norm(vals))
        if norm > self.radius * (1 + 1e-9) + 1e-12:
            raise ValueError(f"||theta||_2 = {norm} exceeds radius {self.radius}")

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class Budget:
    """Size, depth, and parameter-radius budget defining the hypothesis class."""

    max_size: int
    max_depth: int
    radius: float

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("size budget must be >= 1")
        if self.max_depth < 1:
            raise ValueError("depth budget must be >= 1")
        if not self.radius > 0:
            raise ValueError("radius must be positive")


ThetaLike = Union[ParamVector, Sequence[float], np.ndarray]


def _theta_values(theta: ThetaLike) -> np.ndarray:
    if isinstance(theta, ParamVector):
        return theta.values
    return np.asarray(theta, dtype=float)


def _as_batch(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        return arr[None, :], True
    if arr.ndim == 2:
        return arr, False
    raise ValueError("x must have shape (d,) or (m, d)")


# --- protected / strict scalar semantics (vectorized over the sample) ---

def _div(a, b, protected):
    if protected:
        small = np.abs(b) < DIV_EPS
        return np.where(small, 1.0, a / np.where(small, 1.0, b))
    if np.any(b == 0.0):
        raise DomainError("division by zero")
    return a / b


def _log(a, protected):
    if protected:
        zero = a == 0.0
        return np.where(zero, 0.0, np.log(np.abs(np.where(zero, 1.0, a))))
    if np.any(a <= 0.0):
        raise DomainError("log of a nonpositive value")
    return np.log(a)


def _sqrt(a, protected):
    if protected:
        return np.sqrt(np.abs(a))
    if np.any(a < 0.0):
        raise DomainError("sqrt of a negative value")
    return np.sqrt(a)


def _exp(a, protected):
    if protected:
        return np.exp(np.minimum(a, EXP_CLAMP))
    if np.any(a > EXP_CLAMP):
        raise DomainError("exp overflow")
    return np.exp(a)


def evaluate(tree: ExprTree, theta: ThetaLike, x, protected: bool = True):
    """Evaluate the tree at input(s) ``x`` with constants ``theta``.

    ``x`` may be a single point of shape (d,) or a batch of shape (m, d);
    the result is a float or an (m,) array accordingly. In strict mode
    (``protected=False``) invalid operator inputs raise DomainError.
    """
    th = _theta_values(theta)
    X, single = _as_batch(x)
    p = measure(tree).num_constants
    if len(th) != p:
        raise ValueError(f"theta has length {len(th)}, tree has {p} slots")
    slot = [0]
    with np.errstate(all="ignore"):  # overflow to inf is data, not a warning
        vals = _eval(tree, th, X, protected, slot)
    return float(vals[0]) if single else vals


def _eval(node, th, X, protected, slot):
    kind = node.kind
    if kind == "var":
        idx = int(node.value)
        if idx >= X.shape[1]:
            raise ValueError(f"input has {X.shape[1]} dims, tree uses {node.symbol}")
        return X[:, idx].copy()
    if kind == "const":
        return np.full(X.shape[0], float(node.value))
    if kind == "learnable":
        j = slot[0]
        slot[0] += 1
        return np.full(X.shape[0], th[j])
    if kind == "unary":
        a = _eval(node.children[0], th, X, protected, slot)
        sym = node.symbol
        if sym == "sin":
            return np.sin(a)
        if sym == "cos":
            return np.cos(a)
        if sym == "exp":
            return _exp(a, protected)
        if sym == "log":
            return _log(a, protected)
        if sym == "sqrt":
            return _sqrt(a, protected)
        if sym == "neg":
            return -a
        raise ValueError(f"unknown operator {sym!r}")
    if kind == "binary":
        a = _eval(node.children[0], th, X, protected, slot)
        b = _eval(node.children[1], th, X, protected, slot)
        sym = node.symbol
        if sym == "add":
            return a + b
        if sym == "sub":
            return a - b
        if sym == "mul":
            return a * b
        if sym == "div":
            return _div(a, b, protected)
        raise ValueError(f"unknown operator {sym!r}")
    raise ValueError(f"unknown node kind {kind!r}")


def eval_with_gradient(tree: ExprTree, theta: ThetaLike, x, protected: bool = True):
    """Value and gradient with respect to the learnable constants.

    Forward accumulation through the tree. Returns ``(value, grad)``
    where for a single input grad has shape (p,) and for a batch of m
    inputs the value is (m,) and grad is (m, p). On protected branches
    (clamped exp, zeroed log/sqrt, guarded division) the derivative is 0.
    """
    th = _theta_values(theta)
    X, single = _as_batch(x)
    p = measure(tree).num_constants
    if len(th) != p:
        raise ValueError(f"theta has length {len(th)}, tree has {p} slots")
    slot = [0]
    with np.errstate(all="ignore"):
        vals, grads = _eval_grad(tree, th, X, p, protected, slot)
    if single:
        return float(vals[0]), grads[0]
    return vals, grads


def _eval_grad(node, th, X, p, protected, slot):
    m = X.shape[0]
    kind = node.kind
    if kind == "var":
        return X[:, int(node.value)].copy(), np.zeros((m, p))
    if kind == "const":
        return np.full(m, float(node.value)), np.zeros((m, p))
    if kind == "learnable":
        j = slot[0]
        slot[0] += 1
        g = np.zeros((m, p))
        g[:, j] = 1.0
        return np.full(m, th[j]), g
    if kind == "unary":
        a, ga = _eval_grad(node.children[0], th, X, p, protected, slot)
        sym = node.symbol
        if sym == "sin":
            return np.sin(a), np.cos(a)[:, None] * ga
        if sym == "cos":
            return np.cos(a), -np.sin(a)[:, None] * ga
        if sym == "neg":
            return -a, -ga
        if sym == "exp":
            v = _exp(a, protected)
            if protected:
                deriv = np.where(a > EXP_CLAMP, 0.0, v)
            else:
                deriv = v
            return v, deriv[:, None] * ga
        if sym == "log":
            v = _log(a, protected)
            if protected:
                zero = a == 0.0
                deriv = np.where(zero, 0.0, 1.0 / np.where(zero, 1.0, a))
            else:
                deriv = 1.0 / a
            return v, deriv[:, None] * ga
        if sym == "sqrt":
            v = _sqrt(a, protected)
            if protected:
                zero = a == 0.0
                deriv = np.where(zero, 0.0, np.sign(a) / (2.0 * np.where(zero, 1.0, v)))
            else:
                deriv = 1.0 / (2.0 * v)
            return v, deriv[:, None] * ga
        raise ValueError(f"unknown operator {sym!r}")
    if kind == "binary":
        a, ga = _eval_grad(node.children[0], th, X, p, protected, slot)
        b, gb = _eval_grad(node.children[1], th, X, p, protected, slot)
        sym = node.symbol
        if sym == "add":
            return a + b, ga + gb
        if sym == "sub":
            return a - b, ga - gb
        if sym == "mul":
            return a * b, a[:, None] * gb + b[:, None] * ga
        if sym == "div":
            if protected:
                small = np.abs(b) < DIV_EPS
                bs = np.where(small, 1.0, b)
                v = np.where(small, 1.0, a / bs)
                g = (ga * bs[:, None] - a[:, None] * gb) / (bs * bs)[:, None]
                return v, np.where(small[:, None], 0.0, g)
            if np.any(b == 0.0):
                raise DomainError("division by zero")
            return a / b, (ga * b[:, None] - a[:, None] * gb) / (b * b)[:, None]
        raise ValueError(f"unknown operator {sym!r}")
    raise ValueError(f"unknown node kind {kind!r}")


# --- serialization ---

def serialize(tree: ExprTree) -> str:
    """Parenthesized prefix notation: ``(op child ...)``, bare leaf symbols."""
    if not tree.children:
        return tree.symbol
    inner = " ".join(serialize(ch) for ch in tree.children)
    return f"({tree.symbol} {inner})"


def _tokenize(text: str):
    tokens = []  # (token, position)
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "()":
            tokens.append((ch, i))
            i += 1
            continue
        m = _IDENT_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {ch!r}", i)
        tokens.append((m.group(0), i))
        i = m.end()
    return tokens


def parse(text: str, vocab: Vocabulary) -> ExprTree:
    """Parse prefix notation against a vocabulary.

    Raises ParseError (with position) for malformed input and
    UnknownSymbolError for identifiers outside the vocabulary.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty input", 0)
    tree, nxt = _parse_expr(tokens, 0, vocab, len(text))
    if nxt != len(tokens):
        raise ParseError("trailing input", tokens[nxt][1])
    return tree


def _parse_expr(tokens, i, vocab, end):
    if i >= len(tokens):
        raise ParseError("unexpected end of input", end)
    tok, pos = tokens[i]
    if tok == ")":
        raise ParseError("unexpected ')'", pos)
    if tok == "(":
        if i + 1 >= len(tokens):
            raise ParseError("unexpected end of input", end)
        sym, spos = tokens[i + 1]
        if sym in ("(", ")"):
            raise ParseError("expected operator symbol", spos)
        if sym in vocab.unary_ops:
            arity = 1
        elif sym in vocab.binary_ops:
            arity = 2
        else:
            raise UnknownSymbolError(f"unknown operator {sym!r}", spos)
        children = []
        j = i + 2
        for _ in range(arity):
            child, j = _parse_expr(tokens, j, vocab, end)
            children.append(child)
        if j >= len(tokens):
            raise ParseError("unexpected end of input", end)
        close, cpos = tokens[j]
        if close != ")":
            raise ParseError(f"expected ')' after {arity} argument(s) of {sym!r}", cpos)
        return op(sym, *children), j + 1
    return _parse_leaf(tok, pos, vocab), i + 1


def _parse_leaf(tok, pos, vocab):
    if tok == LEARNABLE_SYMBOL:
        return learnable()
    m = _VAR_RE.match(tok)
    if m:
        idx = int(m.group(1))
        if idx > vocab.variables:
            raise UnknownSymbolError(
                f"variable {tok!r} out of range (d = {vocab.variables})", pos)
        return variable(idx)
    for name, value in vocab.fixed_constants:
        if name == tok:
            return fixed_const(name, value)
    raise UnknownSymbolError(f"unknown symbol {tok!r}", pos)


# --- validation ---

@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def validate(tree: ExprTree, vocab: Vocabulary, budget: Budget) -> list[Violation]:
    """Budget and vocabulary conformance; an empty list means admissible."""
    out = []
    for node in iter_nodes(tree):
        expected = None
        if node.kind == "unary":
            if node.symbol not in vocab.unary_ops:
                out.append(Violation("UnknownSymbol", f"operator {node.symbol!r} not in vocabulary"))
            expected = 1
        elif node.kind == "binary":
            if node.symbol not in vocab.binary_ops:
                out.append(Violation("UnknownSymbol", f"operator {node.symbol!r} not in vocabulary"))
            expected = 2
        elif node.kind == "var":
            if int(node.value) >= vocab.variables:
                out.append(Violation("UnknownSymbol", f"variable {node.symbol!r} out of range"))
            expected = 0
        elif node.kind == "const":
            if node.symbol not in [n for n, _ in vocab.fixed_constants]:
                out.append(Violation("UnknownSymbol", f"constant {node.symbol!r} not in vocabulary"))
            expected = 0
        elif node.kind == "learnable":
            expected = 0
        else:
            out.append(Violation("UnknownSymbol", f"unknown node kind {node.kind!r}"))
        if expected is not None and len(node.children) != expected:
            out.append(Violation(
                "ArityMismatch",
                f"{node.symbol!r} has {len(node.children)} children, expected {expected}"))
    size, depth, _ = measure(tree)
    if size > budget.max_size:
        out.append(Violation("SizeExceeded", f"size {size} > budget {budget.max_size}"))
    if depth > budget.max_depth:
        out.append(Violation("DepthExceeded", f"depth {depth} > budget {budget.max_depth}"))
    return out
