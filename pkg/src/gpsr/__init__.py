"""Genetic-programming symbolic regression with certified capacity bounds.

The package splits into:

* :mod:`gpsr.trees` - expression trees, evaluation, forward-mode gradients
* :mod:`gpsr.intervals` - interval evaluation, output/sensitivity certification
* :mod:`gpsr.counting` - exact and asymptotic counting of admissible trees
* :mod:`gpsr.complexity` - Rademacher/covering machinery and the assembled bound
* :mod:`gpsr.evolution` - the GP engine and its regularization mechanisms
* :mod:`gpsr.datasets` - synthetic targets, losses, train/test protocol
* :mod:`gpsr.cli` - batch command-line front end
"""

from .trees import (
    Budget,
    ExprTree,
    ParamVector,
    Vocabulary,
    eval_with_gradient,
    evaluate,
    measure,
    parse,
    serialize,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "Budget", "ExprTree", "ParamVector", "Vocabulary",
    "evaluate", "eval_with_gradient", "measure",
    "parse", "serialize", "validate",
    "__version__",
]
