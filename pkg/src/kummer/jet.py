"""First-order forward-mode jets over the plane (u1, u2).

A :class:`Jet` carries a value together with its two partial derivatives.
Values may be Python floats (single points) or numpy arrays (batches of
points); the arithmetic is identical in both cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

Number = Union[float, np.ndarray]


class EvalError(ArithmeticError):
    """Raised when an expression leaves its domain (sqrt of a non-positive
    argument, division by zero, normalizing a zero vector)."""


def _is_array(v) -> bool:
    return isinstance(v, np.ndarray)


def _any(mask) -> bool:
    return bool(np.any(mask)) if _is_array(mask) else bool(mask)


@dataclass(frozen=True)
class Jet:
    value: Number
    d1: Number = 0.0
    d2: Number = 0.0

    @staticmethod
    def const(c: Number) -> "Jet":
        return Jet(c, 0.0 * c, 0.0 * c) if _is_array(c) else Jet(float(c), 0.0, 0.0)

    @staticmethod
    def variables(u1: Number, u2: Number) -> tuple["Jet", "Jet"]:
        if _is_array(u1):
            one, zero = np.ones_like(u1), np.zeros_like(u1)
            return Jet(u1, one, zero), Jet(u2, zero, one)
        return Jet(float(u1), 1.0, 0.0), Jet(float(u2), 0.0, 1.0)

    @property
    def grad(self) -> tuple[Number, Number]:
        return self.d1, self.d2

    def __neg__(self) -> "Jet":
        return Jet(-self.value, -self.d1, -self.d2)

    def __add__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return Jet(self.value + other.value, self.d1 + other.d1, self.d2 + other.d2)
        return Jet(self.value + other, self.d1, self.d2)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return Jet(self.value - other.value, self.d1 - other.d1, self.d2 - other.d2)
        return Jet(self.value - other, self.d1, self.d2)

    def __rsub__(self, other) -> "Jet":
        return Jet(other - self.value, -self.d1, -self.d2)

    def __mul__(self, other) -> "Jet":
        if isinstance(other, Jet):
            a, b = self.value, other.value
            return Jet(a * b, self.d1 * b + a * other.d1, self.d2 * b + a * other.d2)
        return Jet(self.value * other, self.d1 * other, self.d2 * other)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            other = Jet.const(other)
        b = other.value
        if _any(b == 0):
            raise EvalError("division by zero")
        q = self.value / b
        return Jet(q, (self.d1 - q * other.d1) / b, (self.d2 - q * other.d2) / b)

    def __rtruediv__(self, other) -> "Jet":
        return Jet.const(other) / self

    def __pow__(self, n: int) -> "Jet":
        if not isinstance(n, int):
            raise TypeError("jets only support integer powers")
        if n == 0:
            return Jet.const(1.0 + 0.0 * self.value)
        if n < 0:
            return 1.0 / (self ** (-n))
        a = self.value
        lower = a ** (n - 1)
        scale = n * lower
        return Jet(lower * a, scale * self.d1, scale * self.d2)


def sqrt(x: Jet) -> Jet:
    if _any(x.value <= 0):
        raise EvalError("sqrt of a non-positive value")
    r = np.sqrt(x.value) if _is_array(x.value) else math.sqrt(x.value)
    return Jet(r, x.d1 / (2.0 * r), x.d2 / (2.0 * r))


def sin(x: Jet) -> Jet:
    if _is_array(x.value):
        s, c = np.sin(x.value), np.cos(x.value)
    else:
        s, c = math.sin(x.value), math.cos(x.value)
    return Jet(s, c * x.d1, c * x.d2)


def cos(x: Jet) -> Jet:
    if _is_array(x.value):
        s, c = np.sin(x.value), np.cos(x.value)
    else:
        s, c = math.sin(x.value), math.cos(x.value)
    return Jet(c, -s * x.d1, -s * x.d2)


Vec3 = tuple[Jet, Jet, Jet]


def dot(a: Vec3, b: Vec3) -> Jet:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def normalize(a: Vec3) -> Vec3:
    sq = dot(a, a)
    if _any(sq.value == 0):
        raise EvalError("cannot normalize a zero vector")
    r = sqrt(sq)
    return (a[0] / r, a[1] / r, a[2] / r)


def _shape(v: Vec3, shape) -> tuple:
    if shape is not None:
        return tuple(shape)
    return np.broadcast_shapes(*(np.shape(p) for c in v for p in (c.value, c.d1, c.d2)))


def stack_value(v: Vec3, shape=None) -> np.ndarray:
    """Values of a vector jet as an array of shape (..., 3)."""
    out = np.empty(_shape(v, shape) + (3,))
    for i, c in enumerate(v):
        out[..., i] = c.value
    return out


def stack_jacobian(v: Vec3, shape=None) -> np.ndarray:
    """Jacobian of a vector jet as an array of shape (..., 3, 2)."""
    out = np.empty(_shape(v, shape) + (3, 2))
    for i, c in enumerate(v):
        out[..., i, 0] = c.d1
        out[..., i, 1] = c.d2
    return out
