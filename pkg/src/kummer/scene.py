"""Congruence scenes: the pair {x, xi}, an optional moving basis and a domain."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .expr import Normalize, VecLit, VectorExpr, normal_of, to_text, vector_derivative


@dataclass(frozen=True)
class DomainRect:
    u1_min: float
    u1_max: float
    u2_min: float
    u2_max: float

    def __post_init__(self):
        if not (self.u1_min < self.u1_max and self.u2_min < self.u2_max):
            raise ValueError("domain bounds must satisfy min < max")

    def contains(self, q, closed: bool = False) -> bool | np.ndarray:
        q = np.asarray(q, dtype=float)
        u1, u2 = q[..., 0], q[..., 1]
        if closed:
            ok = (self.u1_min <= u1) & (u1 <= self.u1_max) & (self.u2_min <= u2) & (u2 <= self.u2_max)
        else:
            ok = (self.u1_min < u1) & (u1 < self.u1_max) & (self.u2_min < u2) & (u2 < self.u2_max)
        return bool(ok) if np.ndim(ok) == 0 else ok

    def axes(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Cell-centred sample coordinates along each axis (never on the boundary)."""
        s = (np.arange(n) + 0.5) / n
        return (self.u1_min + s * (self.u1_max - self.u1_min),
                self.u2_min + s * (self.u2_max - self.u2_min))

    def grid(self, n: int) -> np.ndarray:
        """Points of an n x n grid, shape (n, n, 2), indexed [i2, i1]."""
        a1, a2 = self.axes(n)
        g1, g2 = np.meshgrid(a1, a2)
        return np.stack([g1, g2], axis=-1)

    def random_points(self, rng: np.random.Generator, n: int, margin: float = 0.02) -> np.ndarray:
        w1 = self.u1_max - self.u1_min
        w2 = self.u2_max - self.u2_min
        u1 = rng.uniform(self.u1_min + margin * w1, self.u1_max - margin * w1, n)
        u2 = rng.uniform(self.u2_min + margin * w2, self.u2_max - margin * w2, n)
        return np.stack([u1, u2], axis=-1)


@dataclass(frozen=True)
class CongruenceScene:
    """Line congruence {x, xi} on a rectangle.

    ``xi_raw`` is the direction field as written; :attr:`xi` is the field
    actually used, wrapped in ``normalize`` when ``unitize_xi`` is set.
    ``omega`` is a tangent moving basis of xi (columns w1, w2) if given.
    """

    name: str
    domain: DomainRect
    x: VectorExpr
    xi_raw: VectorExpr
    omega: tuple[VectorExpr, VectorExpr] | None = None
    unitize_xi: bool = True
    xi_is_normal: bool = False

    @cached_property
    def xi(self) -> VectorExpr:
        if self.unitize_xi and not isinstance(self.xi_raw, Normalize):
            return Normalize(self.xi_raw)
        return self.xi_raw

    @property
    def has_omega(self) -> bool:
        return self.omega is not None

    @cached_property
    def basis(self) -> tuple[VectorExpr, VectorExpr]:
        """The supplied moving basis, or the fallback (x_u1, x_u2)."""
        if self.omega is not None:
            return self.omega
        if not isinstance(self.x, VecLit):
            raise ValueError("no moving basis given and x is not a component vector")
        return vector_derivative(self.x, "u1"), vector_derivative(self.x, "u2")

    @cached_property
    def normal(self) -> VectorExpr:
        """Unit normal induced by the moving basis."""
        return normal_of(*self.basis)

    def to_text(self) -> str:
        d = self.domain
        lines = [
            f'name = "{self.name}"',
            f"domain = u1 in ({d.u1_min!r}, {d.u1_max!r}), u2 in ({d.u2_min!r}, {d.u2_max!r})",
            f"x = {to_text(self.x)}",
        ]
        if self.omega is not None:
            lines.append(f"omega = ({to_text(self.omega[0])}, {to_text(self.omega[1])})")
        if self.xi_is_normal:
            lines.append("xi = normal(omega)")
        else:
            lines.append(f"xi = {to_text(self.xi_raw)}")
        lines.append(f"unitize_xi = {'true' if self.unitize_xi else 'false'}")
        return "\n".join(lines) + "\n"
