"""Spectral primitives shared by the state and evolution machinery.

Everything here operates on plain complex arrays; the physics modules wrap
these in grid-aware operations.  Three building blocks matter:

* a centered half Fourier transform between the momentum and dual axes,
  normalized so the continuum convention

      psi(q, Q) = (2 pi hbar)^(-1/2) * Integral dp e^{i Q p / hbar} Psi(q, p)

  is reproduced exactly on conjugate grids (n * dp * dQ = 2 pi hbar);

* exact spectral translations and derivatives on uniform axes, with the
  unpaired Nyquist mode zeroed in odd-order symbols so discrete derivative
  operators stay exactly anti-Hermitian;

* the reflection double cover of the wall-aligned q axis.  A field on
  [q_min, q_max] is extended to x in [q_min, q_min + 2W) by

      cover(x, d) = field(2 q_max - x, -d),    W = q_max - q_min,

  which turns elastic-wall transport into free periodic transport and makes
  q-derivatives of wall-compliant fields spectrally exact.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "dual_reverse",
    "wavenumbers",
    "derivative_symbol",
    "spectral_derivative",
    "spectral_shift",
    "half_fourier_forward",
    "half_fourier_inverse",
    "reflection_cover",
    "restrict_cover",
    "cover_spectral_shift",
    "cover_derivative_q",
    "cover_mixed_derivative",
]


def dual_reverse(field: np.ndarray, axis: int = 1) -> np.ndarray:
    """Index reversal k -> (-k) mod n along ``axis``.

    On a symmetric FFT-style axis this realizes d -> -d; the row at the
    unpaired lower endpoint maps to itself, as does d = 0.
    """
    idx = [slice(None)] * field.ndim
    idx[axis] = (-np.arange(field.shape[axis])) % field.shape[axis]
    return field[tuple(idx)]


def wavenumbers(n: int, d: float) -> np.ndarray:
    """Angular FFT wavenumbers for n samples at spacing d."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d)


def derivative_symbol(n: int, d: float, order: int = 1) -> np.ndarray:
    """Spectral symbol (i k)^order with the Nyquist mode zeroed for odd order."""
    k = wavenumbers(n, d)
    sym = (1j * k) ** order
    if order % 2 == 1 and n % 2 == 0:
        sym[n // 2] = 0.0
    return sym


def _axis_shape(field: np.ndarray, axis: int) -> tuple[int, ...]:
    shape = [1] * field.ndim
    shape[axis] = field.shape[axis]
    return tuple(shape)


def spectral_derivative(field: np.ndarray, d: float, axis: int, order: int = 1) -> np.ndarray:
    sym = derivative_symbol(field.shape[axis], d, order).reshape(_axis_shape(field, axis))
    return np.fft.ifft(sym * np.fft.fft(field, axis=axis), axis=axis)


def spectral_shift(field: np.ndarray, shift, d: float, axis: int) -> np.ndarray:
    """Exact translation field(x) -> field(x - shift) of the trig interpolant.

    ``shift`` may be a scalar or an array broadcastable against the field with
    the shifted axis removed (per-row shifts).
    """
    n = field.shape[axis]
    k = wavenumbers(n, d).reshape(_axis_shape(field, axis))
    shift_arr = np.asarray(shift, dtype=float)
    if shift_arr.ndim > 0:
        shift_arr = np.expand_dims(shift_arr, axis)
    phase = np.exp(-1j * k * shift_arr)
    return np.fft.ifft(phase * np.fft.fft(field, axis=axis), axis=axis)


# ---------------------------------------------------------------------------
# Centered half Fourier transform
# ---------------------------------------------------------------------------

def _alternating(n: int) -> np.ndarray:
    s = np.ones(n)
    s[1::2] = -1.0
    return s


def half_fourier_forward(field: np.ndarray, d_in: float, hbar: float, axis: int = 1) -> np.ndarray:
    """Centered transform out_k = c * sum_j e^{+i d_out_k d_in_j / hbar} in_j d_in.

    Both axes run over centered values v_j = (j - n/2) * spacing, and the
    spacings satisfy n * d_in * d_out = 2 pi hbar.  With k' = k - n/2,
    j' = j - n/2 the kernel is exp(2 pi i k' j' / n), which reduces to an
    inverse DFT after (-1)^j pre- and (-1)^k post-modulation, up to the
    global factor i^n (real for even n).
    """
    n = field.shape[axis]
    shp = _axis_shape(field, axis)
    signs = _alternating(n).reshape(shp)
    core = n * np.fft.ifft(signs * field, axis=axis)
    global_phase = 1j ** (n % 4)
    c = d_in / np.sqrt(2.0 * np.pi * hbar)
    return (c * global_phase) * (signs * core)


def half_fourier_inverse(field: np.ndarray, d_in: float, hbar: float, axis: int = 1) -> np.ndarray:
    """Centered transform with kernel e^{-i v_out v_in / hbar}; see forward."""
    n = field.shape[axis]
    shp = _axis_shape(field, axis)
    signs = _alternating(n).reshape(shp)
    core = np.fft.fft(signs * field, axis=axis)
    global_phase = (-1j) ** (n % 4)
    c = d_in / np.sqrt(2.0 * np.pi * hbar)
    return (c * global_phase) * (signs * core)


# ---------------------------------------------------------------------------
# Reflection double cover of the wall-aligned q axis
# ---------------------------------------------------------------------------

def reflection_cover(field: np.ndarray) -> np.ndarray:
    """Extend (n_q, n_dual) data to the (2 n_q - 2, n_dual) reflection cover.

    Rows n_q .. 2 n_q - 3 hold the mirror image: row i sources row
    2 (n_q - 1) - i with the dual axis reversed.  For wall-compliant fields
    the cover is smooth and periodic, so plain FFTs on it are spectrally
    accurate.
    """
    n_q = field.shape[0]
    mirror = dual_reverse(field[n_q - 2:0:-1, :], axis=1)
    return np.concatenate([field, mirror], axis=0)


def restrict_cover(cover: np.ndarray, n_q: int) -> np.ndarray:
    return cover[:n_q, :]


def cover_spectral_shift(field: np.ndarray, shifts, dq: float) -> np.ndarray:
    """Per-dual-row translation along q through the reflection cover.

    Realizes transport with elastic folding at both walls: the cover is
    genuinely periodic (period 2W), so arbitrary shifts never wrap
    unphysically.
    """
    cover = reflection_cover(field)
    moved = spectral_shift(cover, shifts, dq, axis=0)
    return restrict_cover(moved, field.shape[0])


def cover_derivative_q(field: np.ndarray, dq: float, order: int = 1) -> np.ndarray:
    cover = reflection_cover(field)
    der = spectral_derivative(cover, dq, axis=0, order=order)
    return restrict_cover(der, field.shape[0])


def cover_mixed_derivative(field: np.ndarray, dq: float, d_dual: float) -> np.ndarray:
    """d^2 / (dq d_dual) through the cover (q axis) and plain FFT (dual axis)."""
    cover = reflection_cover(field)
    m = cover.shape[0]
    sym_q = derivative_symbol(m, dq).reshape(m, 1)
    sym_d = derivative_symbol(cover.shape[1], d_dual).reshape(1, -1)
    spec = np.fft.fft2(cover)
    out = np.fft.ifft2(sym_q * sym_d * spec)
    return restrict_cover(out, field.shape[0])
