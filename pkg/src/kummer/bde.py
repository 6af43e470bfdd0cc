"""Binary differential equations A du1^2 + B du1 du2 + C du2^2 = 0.

This module holds the coefficient container and the pointwise solver; the
curve tracer lives in :mod:`kummer.tracing`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

ZERO_TOL = 1e-12
DOUBLE_ROOT_TOL = 1e-14

KINDS = ("principal", "developable", "curvature_line")


@dataclass(frozen=True)
class BDECoeffs:
    A: float | np.ndarray
    B: float | np.ndarray
    C: float | np.ndarray
    kind: str = "principal"
    coords: str = "u"  # "u" for (u1', u2'), "b" for moving-basis coordinates
    pulled_back: Optional["BDECoeffs"] = field(default=None, compare=False)

    @property
    def discriminant(self):
        return self.B * self.B - 4.0 * self.A * self.C

    @property
    def vector(self) -> np.ndarray:
        return np.stack(np.broadcast_arrays(self.A, self.B, self.C), axis=-1).astype(float)

    @property
    def scale(self):
        return np.maximum(np.maximum(np.abs(self.A), np.abs(self.B)), np.abs(self.C))

    def residual(self, d) -> float:
        d1, d2 = d
        return self.A * d1 * d1 + self.B * d1 * d2 + self.C * d2 * d2

    def at(self, idx) -> "BDECoeffs":
        pb = self.pulled_back.at(idx) if self.pulled_back is not None else None
        A, B, C = np.broadcast_arrays(self.A, self.B, self.C)
        return BDECoeffs(float(A[idx]), float(B[idx]), float(C[idx]), self.kind, self.coords, pb)


@dataclass(frozen=True)
class DirectionPair:
    """Real solutions of a BDE at one point.

    ``status`` is one of ``two_distinct``, ``double_root``,
    ``identically_zero`` or ``none_real``.  Directions are unit vectors with
    their first nonzero component positive, sorted by angle in (-pi/2, pi/2].
    """

    directions: tuple[np.ndarray, ...]
    status: str

    @property
    def angles(self) -> list[float]:
        return [math.atan2(d[1], d[0]) for d in self.directions]


def canonical(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    d = d / math.hypot(d[0], d[1])
    if d[0] < 0 or (d[0] == 0 and d[1] < 0):
        d = -d
    return d + 0.0  # drop negative zeros


def solve_directions(c: BDECoeffs, zero_tol: float = ZERO_TOL, scale: float = 1.0) -> DirectionPair:
    A, B, C = float(c.A), float(c.B), float(c.C)
    m = max(abs(A), abs(B), abs(C))
    if m <= zero_tol * scale:
        return DirectionPair((), "identically_zero")
    A, B, C = A / m, B / m, C / m
    disc = B * B - 4.0 * A * C
    if disc < -DOUBLE_ROOT_TOL:
        return DirectionPair((), "none_real")

    if disc <= DOUBLE_ROOT_TOL:
        # double root: null vector of [[A, B/2], [B/2, C]] from its larger diagonal entry
        d = (-B, 2.0 * A) if abs(A) >= abs(C) else (2.0 * C, -B)
        return DirectionPair((canonical(d),), "double_root")
    # roots t = du1/du2 of A t^2 + B t + C written homogeneously, so nothing overflows
    s = math.sqrt(disc)
    qq = -0.5 * (B + math.copysign(s, B))
    dirs = [canonical((qq, A)), canonical((C, qq))]

    dirs.sort(key=lambda d: math.atan2(d[1], d[0]))
    if abs(dirs[0] @ dirs[1]) >= 1.0:
        return DirectionPair((dirs[0],), "double_root")
    return DirectionPair(tuple(dirs), "two_distinct")


def proportionality_gap(a, b, atol: float = 0.0) -> np.ndarray:
    """Sine of the angle between coefficient vectors (0 when proportional).

    Vectors are compared along the last axis through their wedge product,
    which stays accurate for nearly parallel vectors.  A pair where either
    vector has norm <= ``atol`` counts as proportional.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    wedge = np.zeros(np.broadcast_shapes(na.shape, nb.shape))
    k = a.shape[-1]
    for i in range(k):
        for j in range(i + 1, k):
            wedge = wedge + (a[..., i] * b[..., j] - a[..., j] * b[..., i]) ** 2
    live = (na > atol) & (nb > atol)
    return np.where(live, np.sqrt(wedge) / np.where(live, na * nb, 1.0), 0.0)
