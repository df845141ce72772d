"""Order-2 jets: value, gradient and Hessian of a scalar field at a point."""

from __future__ import annotations

import math

import numpy as np

from .expr import Binary, Const, Coord, Expr, Func, Neg, PoleError, Pow, evaluate


class Jet2:
    """Second-order Taylor data.  ``hess`` is symmetric bit-for-bit."""

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value: float, grad: np.ndarray, hess: np.ndarray):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    @property
    def dim(self) -> int:
        return self.grad.shape[0]

    @classmethod
    def constant(cls, value: float, dim: int) -> "Jet2":
        return cls(value, np.zeros(dim), np.zeros((dim, dim)))

    @classmethod
    def coordinate(cls, point, k: int) -> "Jet2":
        d = len(point)
        g = np.zeros(d)
        g[k] = 1.0
        return cls(point[k], g, np.zeros((d, d)))

    def __add__(self, other):
        other = _lift(other, self.dim)
        return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other, self.dim)
        return Jet2(self.value - other.value, self.grad - other.grad, self.hess - other.hess)

    def __rsub__(self, other):
        return _lift(other, self.dim) - self

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            c = float(other)
            return Jet2(self.value * c, self.grad * c, self.hess * c)
        a, b = self, other
        cross = np.outer(a.grad, b.grad)
        hess = a.hess * b.value + b.hess * a.value + (cross + cross.T)
        return Jet2(a.value * b.value, a.grad * b.value + b.grad * a.value, hess)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            return self * (1.0 / float(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * float(other)

    def reciprocal(self) -> "Jet2":
        v = self.value
        return self.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))

    def compose(self, f0: float, f1: float, f2: float) -> "Jet2":
        """Chain rule for a scalar function with derivatives f0, f1, f2 at ``value``."""
        return Jet2(f0, self.grad * f1, self.hess * f1 + np.outer(self.grad, self.grad) * f2)

    def __repr__(self):
        return f"Jet2(value={self.value!r}, grad={self.grad.tolist()!r}, hess={self.hess.tolist()!r})"


def _lift(x, dim):
    return x if isinstance(x, Jet2) else Jet2.constant(float(x), dim)


def _unary(name: str, a: float):
    """Value, first and second derivative of the named function at ``a``."""
    if name == "exp":
        v = math.exp(a)
        return v, v, v
    if name == "log":
        return math.log(a), 1.0 / a, -1.0 / (a * a)
    if name == "sin":
        s, c = math.sin(a), math.cos(a)
        return s, c, -s
    if name == "cos":
        s, c = math.sin(a), math.cos(a)
        return c, -s, -c
    if name == "sinh":
        s, c = math.sinh(a), math.cosh(a)
        return s, c, s
    if name == "cosh":
        s, c = math.sinh(a), math.cosh(a)
        return c, s, c
    if name == "tanh":
        t = math.tanh(a)
        sech2 = 1.0 - t * t
        return t, sech2, -2.0 * t * sech2
    if name == "sqrt":
        r = math.sqrt(a)
        return r, 0.5 / r, -0.25 / (r * a)
    raise ValueError(f"unknown function {name!r}")


def jet_eval(e: Expr, point) -> Jet2:
    """Exact order-2 jet of ``e`` at ``point`` (64-bit floats)."""
    p = np.asarray(point, dtype=float)
    d = p.shape[0]
    bad = [k for k in e.coordinates if k >= d]
    if bad:
        raise IndexError(f"expression reads coordinate index {max(bad)} in a {d}-dimensional chart")
    return _jet(e, p, d)


def _jet(e: Expr, p: np.ndarray, d: int) -> Jet2:
    if e.is_constant:
        return Jet2.constant(evaluate(e, p), d)
    if isinstance(e, Coord):
        return Jet2.coordinate(p, e.index)
    if isinstance(e, Neg):
        return -_jet(e.arg, p, d)
    if isinstance(e, Binary):
        a = _jet(e.left, p, d)
        if e.op == "/":
            # constant denominators are common (scale factors); skip the reciprocal jet
            if e.right.is_constant:
                c = evaluate(e.right, p)
                if c == 0:
                    raise PoleError(e, p, "division by zero")
                return a * (1.0 / c)
            b = _jet(e.right, p, d)
            if b.value == 0:
                raise PoleError(e, p, "division by zero")
            return a * b.reciprocal()
        b = _jet(e.right, p, d)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        return a * b
    if isinstance(e, Pow):
        a = _jet(e.base, p, d)
        n = e.exponent
        v = a.value
        if n == 0:
            return Jet2.constant(1.0, d)
        if n < 0 and v == 0:
            raise PoleError(e, p, "negative power of zero")
        f0 = v**n
        f1 = n * v ** (n - 1) if n != 1 else 1.0
        f2 = n * (n - 1) * v ** (n - 2) if n not in (1, 2) else (2.0 if n == 2 else 0.0)
        return a.compose(f0, f1, f2)
    if isinstance(e, Func):
        a = _jet(e.arg, p, d)
        v = a.value
        if e.name == "log" and v <= 0:
            raise PoleError(e, p, "log of non-positive value")
        # the derivative of sqrt blows up at 0, so 0 is a pole for jets
        if e.name == "sqrt" and v <= 0:
            raise PoleError(e, p, "sqrt of non-positive value")
        try:
            return a.compose(*_unary(e.name, v))
        except OverflowError as exc:
            raise PoleError(e, p, f"overflow in {e.name}") from exc
    raise TypeError(f"not an expression node: {e!r}")
