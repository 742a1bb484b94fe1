"""Brute-force classical transport: the ground truth for every wave backend.

Ensembles of weighted phase-space samples move under Hamilton's equations,

    dq/dt = p / m,    dp/dt = -V'(q),

with closed-form updates for free flight, uniform gravity, and the elastic
box (the same triangle-wave fold the wave transport uses), and a fixed-step
leapfrog for generic smooth potentials.  Histogram densities built from the
ensembles are compared against |psi|^2 fields, with a Monte Carlo error
budget computed from the occupied cell count.

For comparisons that must not carry sampling noise,
``liouville_density_characteristics`` evaluates the transported density
deterministically by pulling grid nodes back along the reversed flow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Union

import numpy as np
import scipy.ndimage

from .evolution import PotentialSpec, fold_triangle
from .grids import GridSpec

__all__ = [
    "ClassicalEnsemble",
    "FreeScenario",
    "BoxScenario",
    "GravityScenario",
    "PotentialScenario",
    "ScenarioKind",
    "sample_ensemble",
    "integrate_hamilton",
    "DensityEstimate",
    "density_estimate",
    "DensityComparison",
    "compare_densities",
    "monte_carlo_l1_budget",
    "liouville_density_characteristics",
]


@dataclass(frozen=True)
class ClassicalEnsemble:
    """Weighted phase-space samples at a common time."""

    q: np.ndarray
    p: np.ndarray
    weights: np.ndarray
    time: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        q = np.asarray(self.q, float)
        p = np.asarray(self.p, float)
        w = np.asarray(self.weights, float)
        if not (q.shape == p.shape == w.shape and q.ndim == 1):
            raise ValueError("q, p, weights must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValueError("ensemble contains non-finite coordinates")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
        for name, arr in (("q", q), ("p", p), ("weights", w)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.q.size


@dataclass(frozen=True)
class FreeScenario:
    pass


@dataclass(frozen=True)
class BoxScenario:
    length: float

    def __post_init__(self) -> None:
        if self.length <= 0:
            raise ValueError("box length must be positive")


@dataclass(frozen=True)
class GravityScenario:
    """Uniform field V = m g q; positive g accelerates toward smaller q."""

    g: float


@dataclass(frozen=True)
class PotentialScenario:
    potential: PotentialSpec


ScenarioKind = Union[FreeScenario, BoxScenario, GravityScenario, PotentialScenario]


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def _cell_edges(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Node-centered cells; the wall rows own half cells inside the domain."""
    q, dq = grid.q, grid.dq
    q_edges = np.concatenate([[q[0]], q[:-1] + 0.5 * dq])
    q_edges = np.append(q_edges, q[-1])
    d, dd = grid.dual, grid.d_dual
    d_edges = np.concatenate([d - 0.5 * dd, [d[-1] + 0.5 * dd]])
    return q_edges, d_edges


def _cell_areas(grid: GridSpec) -> np.ndarray:
    return (grid.q_weights * grid.dq)[:, None] * grid.d_dual


def sample_ensemble(
    density: np.ndarray, grid: GridSpec, n_samples: int, seed: int
) -> ClassicalEnsemble:
    """Importance-sample a nonnegative density field into equal-weight points.

    Cells are chosen by inverse CDF over the cell masses and each point is
    jittered uniformly inside its cell, so the ensemble reproduces the
    piecewise-constant field the histogram estimator sees.  The counter-based
    Philox generator makes the draw a pure function of the seed.
    """
    density = np.asarray(density, float)
    if density.shape != (grid.n_q, grid.n_dual):
        raise ValueError("density shape does not match grid")
    if np.any(density < 0):
        raise ValueError("density must be nonnegative")
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    masses = (density * _cell_areas(grid)).ravel()
    total = masses.sum()
    if total <= 0:
        raise ValueError("density is identically zero")
    rng = np.random.Generator(np.random.Philox(key=seed))
    flat = rng.choice(masses.size, size=n_samples, p=masses / total)
    iq, idual = np.unravel_index(flat, density.shape)

    q_lo = grid.q - 0.5 * grid.dq
    q_hi = grid.q + 0.5 * grid.dq
    q_lo[0], q_hi[-1] = grid.q[0], grid.q[-1]
    u = rng.random(n_samples)
    qs = q_lo[iq] + u * (q_hi[iq] - q_lo[iq])
    v = rng.random(n_samples)
    ps = grid.dual[idual] + (v - 0.5) * grid.d_dual
    w = np.full(n_samples, 1.0 / n_samples)
    return ClassicalEnsemble(qs, ps, w, time=0.0, seed=seed)


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------

def _advance(
    q: np.ndarray,
    p: np.ndarray,
    t: float,
    scenario: ScenarioKind,
    mass: float,
    dt: float | None,
) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(scenario, FreeScenario):
        return q + p * (t / mass), p.copy()
    if isinstance(scenario, GravityScenario):
        g = scenario.g
        return q + p * (t / mass) - 0.5 * g * t**2, p - mass * g * t
    if isinstance(scenario, BoxScenario):
        folded, sign = fold_triangle(q + p * (t / mass), scenario.length)
        return folded, sign * p
    if isinstance(scenario, PotentialScenario):
        if dt is None or dt <= 0:
            raise ValueError("potential transport needs a positive dt")
        if t == 0.0:
            return q.copy(), p.copy()
        n = max(1, round(abs(t) / dt))
        h = t / n
        vp = scenario.potential.v_prime
        q = q.copy()
        p = p - 0.5 * h * np.asarray(vp(q))
        for step in range(n):
            q += p * (h / mass)
            kick = h if step < n - 1 else 0.5 * h
            p -= kick * np.asarray(vp(q))
        return q, p
    raise TypeError(f"unknown scenario {scenario!r}")


def integrate_hamilton(
    ensemble: ClassicalEnsemble,
    t: float,
    scenario: ScenarioKind,
    dt: float | None = None,
    mass: float = 1.0,
) -> ClassicalEnsemble:
    """Advance every sample by t under the scenario's Hamiltonian flow.

    Free, gravity, and box use exact closed forms (the box via the shared
    triangle-wave fold, so reflections are exact for arbitrary t); generic
    potentials use symplectic leapfrog with fixed step dt.
    """
    if isinstance(scenario, BoxScenario):
        L = scenario.length
        if np.any(ensemble.q < -1e-12 * L) or np.any(ensemble.q > L * (1 + 1e-12)):
            raise ValueError("box transport requires samples inside [0, L]")
    q, p = _advance(ensemble.q, ensemble.p, t, scenario, mass, dt)
    return replace(ensemble, q=q, p=p, time=ensemble.time + t)


# ---------------------------------------------------------------------------
# Density estimation and comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityEstimate:
    values: np.ndarray
    out_of_range_fraction: float
    smoothing_sigma: float = 0.0
    occupied_cells: int = 0


def density_estimate(
    ensemble: ClassicalEnsemble, grid: GridSpec, smoothing_sigma: float = 0.0
) -> DensityEstimate:
    """Cell-integrated histogram density on the grid's node-centered cells.

    Normalized by the full sample count, so the field integrates to one minus
    the reported out-of-range fraction.  Optional Gaussian smoothing (in cell
    units) is recorded in the estimate.
    """
    q_edges, d_edges = _cell_edges(grid)
    counts, _, _ = np.histogram2d(ensemble.q, ensemble.p, bins=[q_edges, d_edges])
    n_total = len(ensemble)
    in_range = counts.sum()
    occupied = int(np.count_nonzero(counts))
    if smoothing_sigma > 0:
        counts = scipy.ndimage.gaussian_filter(counts, smoothing_sigma, mode="constant")
    density = counts / (n_total * _cell_areas(grid))
    return DensityEstimate(
        values=density,
        out_of_range_fraction=float(1.0 - in_range / n_total),
        smoothing_sigma=smoothing_sigma,
        occupied_cells=occupied,
    )


@dataclass(frozen=True)
class DensityComparison:
    l1: float
    linf: float
    linf_is_absolute: bool = False


def compare_densities(a: np.ndarray, b: np.ndarray, grid: GridSpec) -> DensityComparison:
    """L1 (cell-measure weighted) and peak-relative Linf distance of two fields."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if a.shape != b.shape or a.shape != (grid.n_q, grid.n_dual):
        raise ValueError("density fields must share the comparison grid")
    diff = np.abs(a - b)
    l1 = float(np.sum(diff * _cell_areas(grid)))
    peak = np.abs(b).max()
    if peak == 0.0:
        return DensityComparison(l1=l1, linf=float(diff.max()), linf_is_absolute=True)
    return DensityComparison(l1=l1, linf=float(diff.max() / peak))


def monte_carlo_l1_budget(n_samples: int, occupied_cells: int) -> float:
    """Aggregate L1 noise allowance 5 / sqrt(samples per occupied cell)."""
    if occupied_cells < 1:
        return 0.0
    return 5.0 / math.sqrt(n_samples / occupied_cells)


# ---------------------------------------------------------------------------
# Deterministic characteristic transport
# ---------------------------------------------------------------------------

def liouville_density_characteristics(
    density_fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    q_values: np.ndarray,
    p_values: np.ndarray,
    t: float,
    scenario: ScenarioKind,
    mass: float = 1.0,
    dt: float | None = None,
) -> np.ndarray:
    """Transported density f(z, t) = f0(flow^{-t}(z)) on a (q, p) node grid.

    Pulls every node back along the reversed Hamiltonian flow (closed form
    where available, leapfrog otherwise) and evaluates the initial density
    there.  No sampling noise: the only errors are the integrator's.
    """
    qm, pm = np.meshgrid(np.asarray(q_values, float), np.asarray(p_values, float), indexing="ij")
    q0, p0 = _advance(qm.ravel(), pm.ravel(), -t, scenario, mass, dt)
    vals = np.asarray(density_fn(q0, p0), float)
    return vals.reshape(qm.shape)
