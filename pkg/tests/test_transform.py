import numpy as np
import pytest

from kvnbox import (
    GridSpec,
    KvnState,
    Representation,
    inner,
    make_gaussian_state,
    norm,
    to_dual,
    to_momentum,
)
from kvnbox.fourier import dual_reverse

PM = Representation.POSITION_MOMENTUM
PD = Representation.POSITION_DUAL


def quadrature_to_dual(state):
    """Independent O(N^2) realization of the defining integral."""
    grid = state.grid
    hbar = grid.units.hbar
    p = grid.dual
    Q = grid.conjugate_dual().dual
    kernel = np.exp(1j * np.outer(Q, p) / hbar)
    return state.amplitudes @ kernel.T * grid.d_dual / np.sqrt(2 * np.pi * hbar)


@pytest.fixture(scope="module")
def grid():
    return GridSpec(-1.0, 1.0, 32, -6.4, 6.4, 128)


def random_state(grid, seed=0):
    rng = np.random.default_rng(seed)
    envelope = np.exp(-grid.dual[None, :] ** 2 / 4.0)
    field = (rng.normal(size=(grid.n_q, grid.n_dual))
             + 1j * rng.normal(size=(grid.n_q, grid.n_dual))) * envelope
    return KvnState(grid, PM, field)


class TestAgainstQuadrature:
    def test_gaussian(self, grid):
        st = make_gaussian_state(grid, PM, 0.2, 0.5, 0.2, 0.4)
        out = to_dual(st)
        assert np.abs(out.amplitudes - quadrature_to_dual(st)).max() <= 1e-10

    def test_random_field(self, grid):
        st = random_state(grid, seed=3)
        out = to_dual(st)
        assert np.abs(out.amplitudes - quadrature_to_dual(st)).max() <= 1e-10

    def test_reciprocal_width_law(self, grid):
        # p-Gaussian of width sigma maps to a Q-Gaussian of width hbar/sigma
        sigma = 0.5
        g_q = np.exp(-grid.q**2)
        field = g_q[:, None] * (np.pi * sigma**2) ** -0.25 * np.exp(
            -grid.dual[None, :] ** 2 / (2 * sigma**2)
        )
        out = to_dual(KvnState(grid, PM, field))
        Q = out.grid.dual
        expected = (
            g_q[:, None]
            * (np.pi * sigma**2) ** -0.25
            * sigma
            * np.sqrt(2 * np.pi)
            / np.sqrt(2 * np.pi)
            * np.exp(-sigma**2 * Q[None, :] ** 2 / 2.0)
        )
        assert np.abs(out.amplitudes - expected).max() <= 1e-10


class TestUnitarity:
    def test_zero_state(self, grid):
        st = KvnState(grid, PM, np.zeros((grid.n_q, grid.n_dual)))
        assert np.abs(to_dual(st).amplitudes).max() == 0.0

    def test_norm_preserved(self, grid):
        for seed in range(4):
            st = random_state(grid, seed)
            assert abs(norm(to_dual(st)) - norm(st)) <= 1e-10

    def test_round_trip(self, grid):
        st = random_state(grid, seed=7)
        back = to_momentum(to_dual(st))
        assert np.abs(back.amplitudes - st.amplitudes).max() <= 1e-10

    def test_inner_products_preserved(self, grid):
        a, b = random_state(grid, 1), random_state(grid, 2)
        assert inner(to_dual(a), to_dual(b)) == pytest.approx(inner(a, b), rel=1e-12)


class TestParityCorrespondence:
    def test_even_to_even_and_odd_to_odd(self, grid):
        st = random_state(grid, seed=11)
        even = st.with_amplitudes(0.5 * (st.amplitudes + dual_reverse(st.amplitudes)))
        odd = st.with_amplitudes(0.5 * (st.amplitudes - dual_reverse(st.amplitudes)))
        for part, sign in ((even, 1.0), (odd, -1.0)):
            out = to_dual(part).amplitudes
            asym = np.abs(out - sign * dual_reverse(out)).max()
            assert asym <= 1e-12 * max(np.abs(out).max(), 1e-300)

    def test_reverse_direction(self, grid):
        rng = np.random.default_rng(5)
        dual_grid = grid.conjugate_dual()
        envelope = np.exp(-(dual_grid.dual[None, :] / dual_grid.dual_max * 3) ** 2)
        field = (rng.normal(size=(grid.n_q, grid.n_dual))
                 + 1j * rng.normal(size=(grid.n_q, grid.n_dual))) * envelope
        even = 0.5 * (field + dual_reverse(field))
        st = KvnState(dual_grid, PD, even)
        out = to_momentum(st).amplitudes
        assert np.abs(out - dual_reverse(out)).max() <= 1e-12 * np.abs(out).max()

    def test_cosine_survival_at_wall(self, grid):
        # a real row, even in p, transforms to a real even row in Q
        st = random_state(grid, seed=13)
        sym = 0.5 * (st.amplitudes + dual_reverse(st.amplitudes))
        sym = sym.real.astype(complex)
        out = to_dual(st.with_amplitudes(sym)).amplitudes
        assert np.abs(out.imag).max() <= 1e-12 * np.abs(out).max()
        assert np.abs(out - dual_reverse(out)).max() <= 1e-12 * np.abs(out).max()


class TestPreconditions:
    def test_wrong_representation(self, grid):
        st = random_state(grid)
        with pytest.raises(ValueError):
            to_momentum(st)
        with pytest.raises(ValueError):
            to_dual(to_dual(st))

    def test_asymmetric_dual_grid(self):
        g = GridSpec(-1.0, 1.0, 32, -1.0, 2.0, 128)
        st = KvnState(g, PM, np.zeros((32, 128)))
        with pytest.raises(ValueError):
            to_dual(st)
