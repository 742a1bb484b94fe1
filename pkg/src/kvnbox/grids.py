"""Grids, units, and representation tags for phase-space wavefunctions.

All fields live on a rectangular (q, dual) grid.  The q axis includes both
endpoints, so walls can be read off as grid rows:

    q_i = q_min + i * dq,   dq = (q_max - q_min) / (n_q - 1).

The dual axis is an FFT-style grid: uniform, symmetric about zero, with 0 on
the grid and the upper endpoint excluded:

    d_k = dual_min + k * d_dual,   d_dual = (dual_max - dual_min) / n_dual,
    dual_min = -dual_max.

The dual axis carries momentum p in the position-momentum representation and
the conjugate coordinate Q in the position-dual representation.  A grid and
its transform partner are linked by the conjugacy relation

    n_dual * dp * dQ = 2 pi hbar,

which makes the half Fourier transform between the two representations an
exact unitary on the grid.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

__all__ = ["UnitSystem", "Representation", "GridSpec"]

_SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True)
class UnitSystem:
    """Scale constants. Defaults are natural units hbar = mass = 1."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self) -> None:
        if not (self.hbar > 0.0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar}")
        if not (self.mass > 0.0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be positive and finite, got {self.mass}")


class Representation(enum.Enum):
    """Which pair of coordinates the amplitude field is indexed by."""

    POSITION_MOMENTUM = "position-momentum"  # psi(q, p)
    POSITION_DUAL = "position-dual"          # psi(q, Q)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid descriptor plus unit system.

    ``q_min``/``q_max`` are both grid rows (wall-aligned).  ``dual_max`` is
    excluded from the grid; a symmetric dual axis has ``dual_min == -dual_max``
    and contains 0 at index ``n_dual // 2``.
    """

    q_min: float
    q_max: float
    n_q: int
    dual_min: float
    dual_max: float
    n_dual: int
    units: UnitSystem = field(default_factory=UnitSystem)

    def __post_init__(self) -> None:
        if not self.q_max > self.q_min:
            raise ValueError(f"q_max ({self.q_max}) must exceed q_min ({self.q_min})")
        if not self.dual_max > self.dual_min:
            raise ValueError(
                f"dual_max ({self.dual_max}) must exceed dual_min ({self.dual_min})"
            )
        for name, n in (("n_q", self.n_q), ("n_dual", self.n_dual)):
            if n < 8 or n % 2 != 0:
                raise ValueError(f"{name} must be even and at least 8, got {n}")

    # -- spacings ---------------------------------------------------------

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / (self.n_q - 1)

    @property
    def d_dual(self) -> float:
        return (self.dual_max - self.dual_min) / self.n_dual

    # -- axes -------------------------------------------------------------

    @cached_property
    def q(self) -> np.ndarray:
        ax = np.linspace(self.q_min, self.q_max, self.n_q)
        ax.flags.writeable = False
        return ax

    @cached_property
    def dual(self) -> np.ndarray:
        ax = self.dual_min + self.d_dual * np.arange(self.n_dual)
        ax.flags.writeable = False
        return ax

    @cached_property
    def q_weights(self) -> np.ndarray:
        """Trapezoid weights along q: wall rows carry half a cell."""
        w = np.ones(self.n_q)
        w[0] = w[-1] = 0.5
        w.flags.writeable = False
        return w

    @property
    def cell_measure(self) -> float:
        return self.dq * self.d_dual

    # -- symmetry and conjugacy --------------------------------------------

    def dual_is_symmetric(self) -> bool:
        span = self.dual_max - self.dual_min
        return abs(self.dual_min + self.dual_max) <= _SYMMETRY_RTOL * span

    def require_symmetric_dual(self) -> None:
        if not self.dual_is_symmetric():
            raise ValueError(
                "dual grid must be symmetric about 0 "
                f"(dual_min={self.dual_min}, dual_max={self.dual_max})"
            )

    def conjugate_dual(self) -> "GridSpec":
        """Grid of the transform partner: same q axis, dual axis with
        spacing 2 pi hbar / (n_dual * d_dual), still symmetric about 0."""
        self.require_symmetric_dual()
        d_new = 2.0 * math.pi * self.units.hbar / (self.n_dual * self.d_dual)
        half = (self.n_dual // 2) * d_new
        return replace(self, dual_min=-half, dual_max=half)

    def is_conjugate_of(self, other: "GridSpec") -> bool:
        prod = self.n_dual * self.d_dual * other.d_dual
        target = 2.0 * math.pi * self.units.hbar
        return (
            self.n_dual == other.n_dual
            and self.close_q(other)
            and abs(prod - target) <= 1e-12 * target
        )

    # -- tolerant comparisons (grids reconstructed from floats) ------------

    def close_q(self, other: "GridSpec") -> bool:
        return (
            self.n_q == other.n_q
            and math.isclose(self.q_min, other.q_min, rel_tol=1e-12, abs_tol=1e-14)
            and math.isclose(self.q_max, other.q_max, rel_tol=1e-12, abs_tol=1e-14)
        )

    def close_to(self, other: "GridSpec") -> bool:
        return (
            self.close_q(other)
            and self.n_dual == other.n_dual
            and math.isclose(self.dual_min, other.dual_min, rel_tol=1e-12, abs_tol=1e-14)
            and math.isclose(self.dual_max, other.dual_max, rel_tol=1e-12, abs_tol=1e-14)
            and self.units == other.units
        )
