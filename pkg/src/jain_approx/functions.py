"""Test functions with their weighted-space metadata."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import UnknownFunction
from .expr import eval_expr, parse_expr

Fn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TestFunction:
    """A function on [0, inf) together with what the bounds need to know.

    ``p_class`` is the smallest p with f in C_p and doubles as the growth
    exponent for series truncation.  ``omega1``/``omega2`` are analytic
    moduli h -> omega_k(f, C_p, h) in the weight of ``p_class``.
    """

    __test__ = False  # not a pytest class

    name: str
    evaluator: Fn
    p_class: int
    d1: Optional[Fn] = None
    d2: Optional[Fn] = None
    omega1: Optional[Callable[[float], float]] = None
    omega2: Optional[Callable[[float], float]] = None
    text: Optional[str] = None

    def __call__(self, t):
        return self.evaluator(t)

    @property
    def has_derivatives(self) -> bool:
        return self.d1 is not None and self.d2 is not None

    @property
    def moduli(self):
        return self.omega1, self.omega2


def _const(c):
    return lambda t: np.full(np.shape(t), float(c)) if np.ndim(t) else float(c)


def _sine_w1(h):
    return 2.0 * np.sin(min(h, np.pi) / 2.0)


def _sine_w2(h):
    return 4.0 * np.sin(min(h, np.pi) / 2.0) ** 2


_REGISTRY = {
    "const1": TestFunction("const1", _const(1.0), 0, _const(0.0), _const(0.0),
                           _const(0.0), _const(0.0), "1"),
    "linear": TestFunction("linear", lambda t: 1.0 * t, 1, _const(1.0), _const(0.0), text="x"),
    "square": TestFunction("square", lambda t: t**2, 2, lambda t: 2.0 * t, _const(2.0), text="x^2"),
    "cube": TestFunction("cube", lambda t: t**3, 3, lambda t: 3.0 * t**2, lambda t: 6.0 * t, text="x^3"),
    "quartic": TestFunction("quartic", lambda t: t**4, 4, lambda t: 4.0 * t**3,
                            lambda t: 12.0 * t**2, text="x^4"),
    "exp_decay": TestFunction(
        "exp_decay", lambda t: np.exp(-t), 0, lambda t: -np.exp(-t), lambda t: np.exp(-t),
        lambda h: 1.0 - np.exp(-h), lambda h: (1.0 - np.exp(-h)) ** 2, "exp(-x)",
    ),
    "sine": TestFunction("sine", np.sin, 0, np.cos, lambda t: -np.sin(t), _sine_w1, _sine_w2, "sin(x)"),
    "abs_kink": TestFunction("abs_kink", lambda t: np.abs(t - 1.0), 1, lambda t: np.sign(t - 1.0),
                             omega1=lambda h: float(h), text="abs(x - 1)"),
    "runge": TestFunction(
        "runge", lambda t: 1.0 / (1.0 + t**2), 0,
        lambda t: -2.0 * t / (1.0 + t**2) ** 2,
        lambda t: (6.0 * t**2 - 2.0) / (1.0 + t**2) ** 3,
        text="1 / (1 + x^2)",
    ),
}


def builtin(name: str) -> TestFunction:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownFunction(f"no built-in function {name!r}; known: {', '.join(_REGISTRY)}") from None


def builtin_names() -> list[str]:
    return list(_REGISTRY)


def from_expr(text: str, name: str | None = None) -> TestFunction:
    """Wrap a parsed expression. Its class is taken as p = 0 and it carries
    no derivatives, so derivative-based bounds are skipped for it."""
    tree = parse_expr(text)
    return TestFunction(name or text, lambda t: eval_expr(tree, t), 0, text=text)
