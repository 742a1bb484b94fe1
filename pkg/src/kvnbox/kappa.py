"""The commutativity dial between quantum and classical phase-space dynamics.

A wavefunction evolving under the Schrodinger equation with effective Planck
constant kappa * hbar,

    i (kappa hbar) dt Psi = [ -(kappa hbar)^2 / 2m  dq^2 + V(q) ] Psi,

has a phase-space portrait through the kappa-Wigner transform

    W(q, p) = (2 pi kappa hbar)^(-1)
              Integral dy e^{i p y / kappa hbar} Psi*(q + y/2) Psi(q - y/2),

normalized here so the phase-space integral of W is one for a unit-norm
wavefunction (the bare transform with only the (2 pi kappa hbar)^(-1/2)
prefactor integrates to sqrt(2 pi kappa hbar) instead, so the extra root is
divided out; both conventions agree up to that constant).

As kappa shrinks the Wigner flow loses its quantum corrections and collapses
onto classical Liouville transport; ``contraction_experiment`` measures this
against the deterministic classical oracle.  ``two_slit_compare`` runs the
complementary discriminant: phase-space-disjoint slits produce an exactly
additive position marginal in the classical wave mechanics, while the
kappa = 1 branch shows fringes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .evolution import PotentialSpec
from .fourier import spectral_derivative
from .grids import GridSpec, Representation, UnitSystem
from .oracle import PotentialScenario, liouville_density_characteristics
from .states import KvnState, make_gaussian_state, norm as kvn_norm
from .evolution import evolve_free_spectral

__all__ = [
    "Grid1D",
    "WaveFunction1D",
    "WignerField",
    "PhaseSpaceGaussian",
    "matched_gaussian_packet",
    "evolve_schrodinger_kappa",
    "wigner_kappa",
    "wigner_momentum_grid",
    "two_point_residual",
    "ContractionResult",
    "contraction_experiment",
    "TwoSlitReport",
    "two_slit_compare",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic-convention 1-D grid (upper endpoint excluded)."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self) -> None:
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        if self.n < 8:
            raise ValueError("need at least 8 points")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @cached_property
    def x(self) -> np.ndarray:
        ax = self.x_min + self.dx * np.arange(self.n)
        ax.flags.writeable = False
        return ax


@dataclass(frozen=True)
class WaveFunction1D:
    grid: Grid1D
    amplitudes: np.ndarray
    effective_hbar: float

    def __post_init__(self) -> None:
        if self.effective_hbar <= 0:
            raise ValueError("effective_hbar must be positive")
        amps = np.asarray(self.amplitudes, np.complex128)
        if amps.shape != (self.grid.n,):
            raise ValueError("amplitude length does not match grid")
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("amplitudes contain NaN or Inf")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dx))

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class WignerField:
    """Real phase-space portrait on the (x, p) node grid."""

    values: np.ndarray
    kappa: float
    x: np.ndarray
    p: np.ndarray

    def __post_init__(self) -> None:
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")


@dataclass(frozen=True)
class PhaseSpaceGaussian:
    """Target first moments and marginal spreads of an initial blob."""

    q0: float
    p0: float
    sigma_q: float
    sigma_p: float

    def __post_init__(self) -> None:
        if self.sigma_q <= 0 or self.sigma_p <= 0:
            raise ValueError("spreads must be positive")

    def correlation(self, eff_hbar: float) -> float:
        """q-p covariance of the pure-state realization (purity fixes it)."""
        floor = 0.5 * eff_hbar
        prod = self.sigma_q * self.sigma_p
        if prod < floor * (1 - 1e-12):
            raise ValueError(
                f"sigma_q * sigma_p = {prod:.4g} below the minimum spread "
                f"{floor:.4g} at effective hbar {eff_hbar:.4g}"
            )
        return math.sqrt(max(prod**2 - floor**2, 0.0))

    def density_fn(self, eff_hbar: float):
        """Initial Gaussian phase-space density with the purity covariance."""
        c = self.correlation(eff_hbar)
        cov = np.array([[self.sigma_q**2, c], [c, self.sigma_p**2]])
        inv = np.linalg.inv(cov)
        det = np.linalg.det(cov)
        pref = 1.0 / (2.0 * np.pi * math.sqrt(det))

        def fn(q, p):
            dq = q - self.q0
            dp = p - self.p0
            arg = inv[0, 0] * dq**2 + 2 * inv[0, 1] * dq * dp + inv[1, 1] * dp**2
            return pref * np.exp(-0.5 * arg)

        return fn


def matched_gaussian_packet(
    grid: Grid1D, moments: PhaseSpaceGaussian, eff_hbar: float
) -> WaveFunction1D:
    """Pure Gaussian whose Wigner moments match the requested spreads.

    With sigma_q * sigma_p above the minimum-spread floor, matching both
    marginal widths forces a quadratic chirp; the resulting Wigner function is
    the correlated Gaussian returned by ``moments.density_fn``.
    """
    a = 1.0 / (2.0 * moments.sigma_q**2)
    b_sq = 2.0 * a * moments.sigma_p**2 / eff_hbar**2 - a**2
    if b_sq < -1e-12 * a**2:
        moments.correlation(eff_hbar)  # raises with the informative message
    b = math.sqrt(max(b_sq, 0.0))
    x = grid.x
    alpha = a - 1j * b
    psi = np.exp(-0.5 * alpha * (x - moments.q0) ** 2 + 1j * moments.p0 * (x - moments.q0) / eff_hbar)
    wf = WaveFunction1D(grid, psi, eff_hbar)
    return WaveFunction1D(grid, wf.amplitudes / wf.norm(), eff_hbar)


# ---------------------------------------------------------------------------
# Split-step Schrodinger evolution at effective hbar
# ---------------------------------------------------------------------------

def _occupied_k_max(psi: WaveFunction1D) -> float:
    spec = np.abs(np.fft.fft(psi.amplitudes))
    k = np.abs(2.0 * np.pi * np.fft.fftfreq(psi.grid.n, psi.grid.dx))
    occupied = spec > 1e-6 * spec.max()
    return float(k[occupied].max()) if occupied.any() else 0.0


def evolve_schrodinger_kappa(
    psi: WaveFunction1D,
    potential: PotentialSpec,
    dt: float,
    n_steps: int,
    mass: float = 1.0,
) -> WaveFunction1D:
    """Strang split-step at effective Planck constant psi.effective_hbar.

    Per-step phases must stay resolvable: the potential phase anywhere on the
    grid and the kinetic phase over the state's occupied bandwidth are both
    required to stay below pi/2 per step, and the final spectrum is checked
    for power piled at the grid's Nyquist edge.
    """
    if dt == 0.0 or n_steps == 0:
        return psi
    he = psi.effective_hbar
    grid = psi.grid
    v = np.asarray(potential.v(grid.x), float)
    if np.abs(v).max() * abs(dt) / he > 0.5 * np.pi:
        raise ValueError(
            "potential phase per step exceeds pi/2 "
            f"(max |V| dt / eff_hbar = {np.abs(v).max() * abs(dt) / he:.3g}); reduce dt"
        )
    k_occ = _occupied_k_max(psi)
    if he * k_occ**2 * abs(dt) / (2 * mass) > 0.5 * np.pi:
        raise ValueError(
            "kinetic phase per step exceeds pi/2 over the occupied bandwidth; reduce dt"
        )
    k = 2.0 * np.pi * np.fft.fftfreq(grid.n, grid.dx)
    half_v = np.exp(-0.5j * v * dt / he)
    kinetic = np.exp(-0.5j * he * k**2 * dt / mass)
    field = psi.amplitudes.copy()
    for _ in range(n_steps):
        field = half_v * field
        field = np.fft.ifft(kinetic * np.fft.fft(field))
        field = half_v * field
    spec = np.abs(np.fft.fft(field)) ** 2
    edge = np.abs(np.fft.fftfreq(grid.n)) > 0.45
    if spec.sum() > 0 and spec[edge].sum() / spec.sum() > 1e-6:
        raise ValueError("evolution pushed significant power to the Nyquist edge")
    return WaveFunction1D(grid, field, he)


# ---------------------------------------------------------------------------
# kappa-Wigner transform
# ---------------------------------------------------------------------------

def wigner_momentum_grid(grid: Grid1D, eff_hbar: float) -> np.ndarray:
    """Conjugate momentum nodes p_j = (j - n/2) pi eff_hbar / (n dx)."""
    n = grid.n
    dp = np.pi * eff_hbar / (n * grid.dx)
    return (np.arange(n) - n // 2) * dp


def wigner_kappa(
    psi: WaveFunction1D, p_values: np.ndarray | None = None, hbar: float = 1.0
) -> WignerField:
    """Discrete kappa-Wigner transform on the conjugate (x, p) grid.

    The correlation Psi*(x + y/2) Psi(x - y/2) is sampled at y = 2 k dx so
    both arguments stay on the grid; the p axis is then the half-step
    conjugate grid of wigner_momentum_grid.  With this normalization the
    discrete p-marginal identity sum_j W dp = |Psi|^2 holds exactly, so W
    integrates to exactly the squared norm.
    """
    n = psi.grid.n
    dx = psi.grid.dx
    he = psi.effective_hbar
    expected_p = wigner_momentum_grid(psi.grid, he)
    if p_values is not None and not np.allclose(p_values, expected_p, rtol=1e-9, atol=0):
        raise ValueError("p grid is not conjugate to the position grid at this kappa")

    padded = np.zeros(2 * n, complex)
    padded[n // 2: n // 2 + n] = psi.amplitudes
    i = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    k = np.where(m < n // 2, m, m - n)          # FFT-ordered y/2 offsets
    corr = np.conj(padded[i + k + n // 2]) * padded[i - k + n // 2]
    corr[:, n // 2] = 0.0                        # unpaired offset, keep W exactly real
    w = n * np.fft.ifft(corr, axis=1)
    w = np.fft.fftshift(w, axes=1)
    values = (2.0 * dx / (2.0 * np.pi * he)) * w
    residual_imag = np.abs(values.imag).max()
    scale = max(np.abs(values.real).max(), 1e-300)
    if residual_imag > 1e-10 * scale:
        raise ValueError("Wigner transform produced a non-real field")
    return WignerField(values=values.real, kappa=he / hbar, x=psi.grid.x.copy(), p=expected_p)


# ---------------------------------------------------------------------------
# Two-point evolution identity
# ---------------------------------------------------------------------------

def two_point_residual(
    psi: WaveFunction1D,
    potential: PotentialSpec,
    dt_probe: float,
    mass: float = 1.0,
) -> float:
    """Residual of i (kappa hbar) dt rho = (H_u - H_v) rho for rho = Psi(u) Psi*(v).

    The time derivative is a central difference of one probe step either way;
    H_u and H_v act spectrally on the two axes of the two-point field.  The
    result is normalized by the larger of the two operator terms.
    """
    he = psi.effective_hbar
    if np.abs(psi.amplitudes).max() == 0.0:
        return 0.0
    fwd = evolve_schrodinger_kappa(psi, potential, dt_probe, 1, mass)
    bwd = evolve_schrodinger_kappa(psi, potential, -dt_probe, 1, mass)

    def rho_of(w: WaveFunction1D) -> np.ndarray:
        return w.amplitudes[:, None] * np.conj(w.amplitudes)[None, :]

    drho = (rho_of(fwd) - rho_of(bwd)) / (2.0 * dt_probe)
    rho = rho_of(psi)
    dx = psi.grid.dx
    v = np.asarray(potential.v(psi.grid.x), float)
    d2_u = spectral_derivative(rho, dx, axis=0, order=2)
    d2_v = spectral_derivative(rho, dx, axis=1, order=2)
    h_u = -(he**2) / (2 * mass) * d2_u + v[:, None] * rho
    h_v = -(he**2) / (2 * mass) * d2_v + v[None, :] * rho
    lhs = 1j * he * drho
    rhs = h_u - h_v
    scale = max(np.abs(h_u).max(), np.abs(h_v).max())
    if scale == 0.0:
        return 0.0
    return float(np.abs(lhs - rhs).max() / scale)


# ---------------------------------------------------------------------------
# Classical-limit contraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContractionResult:
    rows: list[tuple[float, float]]          # (kappa, L1 distance to the classical flow)
    strictly_decreasing: bool


def contraction_experiment(
    potential: PotentialSpec,
    kappa_values,
    t_final: float,
    initial: PhaseSpaceGaussian,
    grid: Grid1D,
    hbar: float = 1.0,
    mass: float = 1.0,
    dt: float | None = None,
    classical_dt: float = 2e-3,
) -> ContractionResult:
    """L1 distance between the kappa-Wigner flow and classical transport.

    The requested moments anchor the *largest* kappa in the list; smaller
    kappas use the self-similar semiclassical family with both spreads scaled
    by sqrt(kappa / kappa_max).  This keeps the spread product a fixed
    multiple of its floor kappa hbar / 2, which is the scaling under which
    phase-space densities of pure states converge to classical transport in
    L1.  (Holding the spreads fixed instead forces ever stronger squeezing,
    and anharmonic bending then grows interference fringes whose L1 weight
    *increases* as kappa drops.)

    At every kappa the classical reference starts from the exact initial
    Wigner density of that kappa's quantum state, transported
    deterministically along characteristics, so any residual distance is
    pure dynamics.
    """
    kappas = [float(k) for k in kappa_values]
    if not kappas:
        raise ValueError("kappa_values must be nonempty")
    kappa_ref = max(kappas)
    rows: list[tuple[float, float]] = []
    for kap in kappas:
        he = kap * hbar
        scale = math.sqrt(kap / kappa_ref)
        moments = PhaseSpaceGaussian(
            initial.q0, initial.p0, initial.sigma_q * scale, initial.sigma_p * scale
        )
        psi0 = matched_gaussian_packet(grid, moments, he)
        if dt is None:
            v_max = float(np.abs(np.asarray(potential.v(grid.x))).max())
            step = 0.25 * np.pi * he / max(v_max, 1e-12)
        else:
            step = dt
        n_steps = max(1, math.ceil(t_final / step))
        psi_t = evolve_schrodinger_kappa(psi0, potential, t_final / n_steps, n_steps, mass)
        wig = wigner_kappa(psi_t, hbar=hbar)
        classical = liouville_density_characteristics(
            moments.density_fn(he),
            wig.x,
            wig.p,
            t_final,
            PotentialScenario(potential),
            mass=mass,
            dt=classical_dt,
        )
        dp = wig.p[1] - wig.p[0]
        l1 = float(np.sum(np.abs(wig.values - classical)) * grid.dx * dp)
        rows.append((kap, l1))
    decreasing = all(rows[i + 1][1] < rows[i][1] for i in range(len(rows) - 1))
    return ContractionResult(rows=rows, strictly_decreasing=decreasing)


# ---------------------------------------------------------------------------
# Two-slit discriminant
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoSlitReport:
    kvn_cross_term_max: float
    quantum_fringe_visibility: float
    probe_times: tuple[float, ...]


def _fringe_visibility(density: np.ndarray, x: np.ndarray, window: float) -> float:
    """(max - min) / (max + min) using interior local minima inside |x| <= window.

    A unimodal (fringeless) pattern has no interior local minimum in the
    window and reports zero visibility.
    """
    sel = np.abs(x) <= window
    rho = density[sel]
    if rho.size < 5:
        return 0.0
    interior = rho[1:-1]
    is_min = (interior < rho[:-2]) & (interior <= rho[2:])
    if not is_min.any():
        return 0.0
    rho_min = float(interior[is_min].min())
    rho_max = float(rho.max())
    if rho_max + rho_min == 0.0:
        return 0.0
    return (rho_max - rho_min) / (rho_max + rho_min)


def two_slit_compare(
    slit_separation: float,
    slit_width: float,
    momentum_spread: float,
    t_final: float,
    n_q: int = 512,
    n_p: int = 256,
    n_x: int = 1024,
    hbar: float = 1.0,
    mass: float = 1.0,
    n_probe: int = 5,
) -> TwoSlitReport:
    """Additivity of classical-wave slit densities versus quantum fringes.

    Classical branch: two phase-space Gaussian slits evolve freely in (q, p);
    the position-marginal cross term rho_12 - rho_1 - rho_2 is tracked over
    probe times.  Quantum branch: the same geometry at kappa = 1 evolves as a
    1-D wavepacket and the central fringe visibility is measured at t_final.
    Slits must be disjoint: separation at least 12 sigma (or exactly zero for
    the single-slit control).
    """
    if slit_separation != 0.0 and slit_separation < 12.0 * slit_width:
        raise ValueError(
            "slits overlap: separation must be at least 12 slit widths "
            f"(got {slit_separation} vs {12 * slit_width})"
        )
    probe_times = tuple(t_final * i / (n_probe - 1) for i in range(n_probe)) if n_probe > 1 else (t_final,)

    # classical wave branch in (q, p)
    reach = abs(slit_separation) / 2 + 10 * slit_width + 8 * momentum_spread * t_final / mass + 1.0
    p_half_cells = n_p // 2
    dp = max(momentum_spread / 4.0, 8 * momentum_spread / p_half_cells)
    p_half = p_half_cells * dp
    grid = GridSpec(-reach, reach, n_q, -p_half, p_half, n_p, UnitSystem(hbar, mass))
    cross_max = 0.0
    if slit_separation == 0.0:
        centers = [0.0]
    else:
        centers = [-slit_separation / 2, slit_separation / 2]
    slits = [
        make_gaussian_state(grid, Representation.POSITION_MOMENTUM, c, 0.0, slit_width, momentum_spread)
        for c in centers
    ]
    if len(slits) == 2:
        combined = slits[0].with_amplitudes(slits[0].amplitudes + slits[1].amplitudes)
        for t in probe_times:
            parts = [evolve_free_spectral(s, t) for s in slits]
            total = evolve_free_spectral(combined, t)
            marg = lambda st: st.density().sum(axis=1) * grid.d_dual
            cross = marg(total) - marg(parts[0]) - marg(parts[1])
            cross_max = max(cross_max, float(np.abs(cross).max()))

    # quantum branch at kappa = 1
    span = abs(slit_separation) / 2 + 10 * slit_width + 6 * (hbar * t_final / (2 * mass * slit_width)) + 1.0
    grid1d = Grid1D(-span, span, n_x)
    x = grid1d.x
    def packet(center: float) -> np.ndarray:
        return np.exp(-((x - center) ** 2) / (4.0 * slit_width**2)).astype(complex)
    field = sum(packet(c) for c in centers)
    psi = WaveFunction1D(grid1d, field, hbar)
    psi = WaveFunction1D(grid1d, psi.amplitudes / psi.norm(), hbar)
    free = PotentialSpec(v=lambda q: np.zeros_like(q), v_prime=lambda q: np.zeros_like(q), name="free")
    n_steps = 128
    psi_t = evolve_schrodinger_kappa(psi, free, t_final / n_steps, n_steps, mass)
    window = max(slit_separation, 4 * slit_width)
    visibility = _fringe_visibility(psi_t.density(), x, window)
    return TwoSlitReport(
        kvn_cross_term_max=cross_max,
        quantum_fringe_visibility=float(visibility),
        probe_times=probe_times,
    )
