"""Phase-space wavefunctions and their basic operations.

A ``KvnState`` is a complex amplitude field psi on a (q, dual) grid, tagged
with its representation.  In the position-momentum representation |psi(q,p)|^2
is the classical phase-space density; in the position-dual representation the
field is the half Fourier transform of psi(q,p) over p,

    psi(q, Q) = (2 pi hbar)^(-1/2) Integral dp e^{i Q p / hbar} psi(q, p).

Inner products use the grid quadrature with trapezoid weights along q (wall
rows carry half a cell) and plain cells along the dual axis, which makes the
transform and the elastic-wall transport exactly unitary on the grid.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .fourier import (
    half_fourier_forward,
    half_fourier_inverse,
    spectral_derivative,
)
from .grids import GridSpec, Representation

__all__ = [
    "KvnState",
    "MadelungFields",
    "make_gaussian_state",
    "norm",
    "inner",
    "to_dual",
    "to_momentum",
    "expectation_position",
    "expectation_momentum",
    "expectation_hamiltonian",
    "madelung_split",
]

MADELUNG_MASK_EPS = 1e-12
NORM_WARN_TOL = 1e-6


@dataclass(frozen=True)
class KvnState:
    """Immutable amplitude field on a grid, tagged with representation and time."""

    grid: GridSpec
    rep: Representation
    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.grid.n_q, self.grid.n_dual):
            raise ValueError(
                f"amplitude shape {amps.shape} does not match grid "
                f"({self.grid.n_q}, {self.grid.n_dual})"
            )
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("amplitudes contain NaN or Inf")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def with_amplitudes(self, amps: np.ndarray, time: float | None = None) -> "KvnState":
        return replace(self, amplitudes=amps, time=self.time if time is None else time)

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class MadelungFields:
    """Density |psi|^2 and the unit-modulus phase factor psi/|psi|.

    The phase factor is only defined where the density is above a relative
    floor; ``defined`` marks those points and the factor is NaN elsewhere.
    """

    density: np.ndarray
    phase_factor: np.ndarray
    defined: np.ndarray


def _quadrature_weights(grid: GridSpec) -> np.ndarray:
    return grid.q_weights[:, None] * grid.cell_measure


def make_gaussian_state(
    grid: GridSpec,
    rep: Representation,
    center_q: float,
    center_dual: float,
    width_q: float,
    width_dual: float,
    normalize: bool = True,
) -> KvnState:
    """Product Gaussian amplitude exp(-(q-q0)^2/(4 sq^2)) exp(-(d-d0)^2/(4 sd^2)).

    Widths are amplitude sigmas: the density has variance width^2 along each
    axis.  Centers must lie strictly inside the grid and widths must span at
    least three grid spacings so the field is resolvable.
    """
    if not (width_q > 0 and width_dual > 0):
        raise ValueError("widths must be positive")
    if not (grid.q_min < center_q < grid.q_max):
        raise ValueError(f"center_q {center_q} outside grid ({grid.q_min}, {grid.q_max})")
    if not (grid.dual_min < center_dual < grid.dual_max):
        raise ValueError(
            f"center_dual {center_dual} outside grid ({grid.dual_min}, {grid.dual_max})"
        )
    if width_q < 3 * grid.dq:
        raise ValueError(f"width_q {width_q} under-resolved: below 3 dq = {3 * grid.dq:.3g}")
    if width_dual < 3 * grid.d_dual:
        raise ValueError(
            f"width_dual {width_dual} under-resolved: below 3 d_dual = {3 * grid.d_dual:.3g}"
        )

    qq = grid.q[:, None]
    dd = grid.dual[None, :]
    amp = (2.0 * np.pi * width_q**2) ** -0.25 * (2.0 * np.pi * width_dual**2) ** -0.25
    field = amp * np.exp(
        -((qq - center_q) ** 2) / (4.0 * width_q**2)
        - ((dd - center_dual) ** 2) / (4.0 * width_dual**2)
    )
    state = KvnState(grid, rep, field.astype(np.complex128))
    if normalize:
        n = norm(state)
        state = state.with_amplitudes(state.amplitudes / n)
    return state


def norm(state: KvnState) -> float:
    """sqrt of the grid quadrature of |psi|^2."""
    dens = state.density()
    return float(np.sqrt(np.sum(dens * _quadrature_weights(state.grid))))


def inner(a: KvnState, b: KvnState) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    if a.rep is not b.rep:
        raise ValueError(f"representation mismatch: {a.rep} vs {b.rep}")
    if not a.grid.close_to(b.grid):
        raise ValueError("grid mismatch between states")
    w = _quadrature_weights(a.grid)
    return complex(np.sum(np.conj(a.amplitudes) * b.amplitudes * w))


def to_dual(state: KvnState) -> KvnState:
    """Half Fourier transform psi(q,p) -> psi(q,Q) onto the conjugate grid."""
    if state.rep is not Representation.POSITION_MOMENTUM:
        raise ValueError("to_dual expects a position-momentum state")
    state.grid.require_symmetric_dual()
    hbar = state.grid.units.hbar
    out = half_fourier_forward(state.amplitudes, state.grid.d_dual, hbar, axis=1)
    return KvnState(state.grid.conjugate_dual(), Representation.POSITION_DUAL, out, state.time)


def to_momentum(state: KvnState) -> KvnState:
    """Inverse half Fourier transform psi(q,Q) -> psi(q,p)."""
    if state.rep is not Representation.POSITION_DUAL:
        raise ValueError("to_momentum expects a position-dual state")
    state.grid.require_symmetric_dual()
    hbar = state.grid.units.hbar
    out = half_fourier_inverse(state.amplitudes, state.grid.d_dual, hbar, axis=1)
    return KvnState(state.grid.conjugate_dual(), Representation.POSITION_MOMENTUM, out, state.time)


def _check_normalized(state: KvnState, label: str) -> None:
    n = norm(state)
    if abs(n - 1.0) > NORM_WARN_TOL:
        warnings.warn(
            f"{label}: state norm deviates from 1 (norm = {n!r}); "
            "returning the raw quadrature value",
            stacklevel=3,
        )


def expectation_position(state: KvnState) -> float:
    """<q> = Integral q |psi|^2 (both representations are diagonal in q)."""
    _check_normalized(state, "expectation_position")
    dens = state.density()
    return float(np.sum(state.grid.q[:, None] * dens * _quadrature_weights(state.grid)))


def expectation_momentum(state: KvnState) -> float:
    """<p>: multiplicative in (q,p); the spectral derivative -i hbar d/dQ in (q,Q)."""
    _check_normalized(state, "expectation_momentum")
    grid = state.grid
    w = _quadrature_weights(grid)
    if state.rep is Representation.POSITION_MOMENTUM:
        return float(np.sum(grid.dual[None, :] * state.density() * w))
    hbar = grid.units.hbar
    dpsi = spectral_derivative(state.amplitudes, grid.d_dual, axis=1)
    val = np.sum(np.conj(state.amplitudes) * (-1j * hbar) * dpsi * w)
    return float(val.real)


def expectation_hamiltonian(
    state: KvnState, potential: Callable[[np.ndarray], np.ndarray] | None = None
) -> float:
    """<p^2/2m + V(q)>, the classical energy observable.

    This is an average over the ensemble, not an eigenvalue of the evolution
    generator; the two are unrelated here.
    """
    _check_normalized(state, "expectation_hamiltonian")
    grid = state.grid
    m = grid.units.mass
    w = _quadrature_weights(grid)
    dens = state.density()
    if state.rep is Representation.POSITION_MOMENTUM:
        kinetic = np.sum(grid.dual[None, :] ** 2 * dens * w) / (2.0 * m)
    else:
        hbar = grid.units.hbar
        dpsi = spectral_derivative(state.amplitudes, grid.d_dual, axis=1)
        kinetic = hbar**2 * np.sum(np.abs(dpsi) ** 2 * w) / (2.0 * m)
    v_term = 0.0
    if potential is not None:
        v_q = np.asarray(potential(grid.q), dtype=float)
        v_term = np.sum(v_q[:, None] * dens * w)
    return float(kinetic + v_term)


def madelung_split(state: KvnState) -> MadelungFields:
    """Split psi into density and unit-modulus phase factor.

    The phase factor is masked out (NaN) where |psi|^2 falls below
    ``MADELUNG_MASK_EPS`` times its maximum; comparing phase factors rather
    than unwrapped phases avoids branch cuts.
    """
    if state.rep is not Representation.POSITION_MOMENTUM:
        raise ValueError("madelung_split expects a position-momentum state")
    dens = state.density()
    peak = dens.max()
    defined = dens > MADELUNG_MASK_EPS * peak if peak > 0 else np.zeros_like(dens, bool)
    phase = np.full_like(state.amplitudes, np.nan + 0j)
    mod = np.sqrt(dens, where=defined, out=np.ones_like(dens))
    np.divide(state.amplitudes, mod, where=defined, out=phase)
    return MadelungFields(density=dens, phase_factor=phase, defined=defined)
