import numpy as np
import pytest

from kvnbox import (
    GridSpec,
    KvnState,
    Representation,
    evolve_free_spectral,
    expectation_hamiltonian,
    expectation_momentum,
    expectation_position,
    inner,
    madelung_split,
    make_gaussian_state,
    norm,
    to_dual,
)
from kvnbox.fourier import cover_derivative_q, spectral_derivative

PM = Representation.POSITION_MOMENTUM


@pytest.fixture(scope="module")
def small_grid():
    return GridSpec(-2.0, 2.0, 256, -2.0, 2.0, 256)


class TestGaussian:
    def test_normalized(self, small_grid):
        st = make_gaussian_state(small_grid, PM, 0.0, 0.0, 0.1, 0.1)
        assert abs(norm(st) - 1.0) <= 1e-12

    def test_disjoint_supports_product(self, small_grid):
        a = make_gaussian_state(small_grid, PM, -0.55, 0.0, 0.05, 0.1)
        b = make_gaussian_state(small_grid, PM, 0.55, 0.0, 0.05, 0.1)
        assert np.abs(a.amplitudes * b.amplitudes).max() <= 1e-12

    def test_center_outside_rejected(self, small_grid):
        with pytest.raises(ValueError):
            make_gaussian_state(small_grid, PM, 3.0, 0.0, 0.1, 0.1)
        with pytest.raises(ValueError):
            make_gaussian_state(small_grid, PM, 0.0, -2.5, 0.1, 0.1)

    def test_underresolved_width_rejected(self, small_grid):
        with pytest.raises(ValueError):
            make_gaussian_state(small_grid, PM, 0.0, 0.0, 0.01, 0.1)


class TestNormInner:
    def test_zero_field(self, small_grid):
        st = KvnState(small_grid, PM, np.zeros((256, 256)))
        assert norm(st) == 0.0

    def test_scaling_homogeneity(self, small_grid):
        st = make_gaussian_state(small_grid, PM, 0.0, 0.0, 0.1, 0.1)
        doubled = st.with_amplitudes(2.0 * st.amplitudes)
        assert norm(doubled) == pytest.approx(2.0 * norm(st), rel=1e-14)

    def test_nan_rejected_at_construction(self, small_grid):
        bad = np.zeros((256, 256), complex)
        bad[3, 4] = np.nan
        with pytest.raises(ValueError):
            KvnState(small_grid, PM, bad)

    def test_inner_definition(self, small_grid):
        st = make_gaussian_state(small_grid, PM, 0.1, -0.2, 0.1, 0.1)
        assert inner(st, st) == pytest.approx(norm(st) ** 2, rel=1e-13)

    def test_inner_hermitian(self, small_grid):
        rng = np.random.default_rng(0)
        a = KvnState(small_grid, PM, rng.normal(size=(256, 256)) + 1j * rng.normal(size=(256, 256)))
        b = KvnState(small_grid, PM, rng.normal(size=(256, 256)) + 1j * rng.normal(size=(256, 256)))
        assert inner(a, b) == pytest.approx(np.conj(inner(b, a)), rel=1e-13)

    def test_inner_disjoint_tails(self, small_grid):
        a = make_gaussian_state(small_grid, PM, -0.55, 0.0, 0.05, 0.1)
        b = make_gaussian_state(small_grid, PM, 0.55, 0.0, 0.05, 0.1)
        assert abs(inner(a, b)) <= 1e-12

    def test_inner_mismatch_rejected(self, small_grid):
        st = make_gaussian_state(small_grid, PM, 0.0, 0.0, 0.1, 0.1)
        other = make_gaussian_state(
            GridSpec(-2.0, 2.0, 256, -4.0, 4.0, 256), PM, 0.0, 0.0, 0.1, 0.1
        )
        with pytest.raises(ValueError):
            inner(st, other)
        with pytest.raises(ValueError):
            inner(st, to_dual(st))


class TestExpectations:
    def test_centered_gaussian(self, small_grid):
        st = make_gaussian_state(small_grid, PM, 0.5, 1.0, 0.1, 0.1)
        assert abs(expectation_position(st) - 0.5) <= small_grid.dq
        assert abs(expectation_momentum(st) - 1.0) <= small_grid.d_dual

    def test_momentum_cross_representation(self, small_grid):
        st = make_gaussian_state(small_grid, PM, 0.3, 0.7, 0.1, 0.1)
        p_direct = expectation_momentum(st)
        p_dual = expectation_momentum(to_dual(st))
        assert abs(p_direct - p_dual) <= 1e-8

    def test_free_gaussian_energy(self):
        # <H> = (p0^2 + sigma_p^2) / 2 for V = 0, a Gaussian moment identity
        grid = GridSpec(-2.0, 2.0, 256, -4.0, 4.0, 512)
        st = make_gaussian_state(grid, PM, 0.0, 1.0, 0.1, 0.1)
        assert expectation_hamiltonian(st) == pytest.approx(0.505, abs=1e-3)

    def test_energy_with_potential(self, small_grid):
        st = make_gaussian_state(small_grid, PM, 0.5, 0.0, 0.1, 0.1)
        h = expectation_hamiltonian(st, potential=lambda q: 0.5 * q**2)
        # kinetic sigma_p^2/2 plus potential (q0^2 + sigma_q^2)/2
        assert h == pytest.approx(0.5 * (0.1**2) + 0.5 * (0.5**2 + 0.1**2), abs=1e-3)

    def test_unnormalized_flagged(self, small_grid):
        st = make_gaussian_state(small_grid, PM, 0.0, 0.0, 0.1, 0.1, normalize=False)
        scaled = st.with_amplitudes(3.0 * st.amplitudes)
        with pytest.warns(UserWarning, match="norm deviates"):
            expectation_position(scaled)

    def test_rephasing_invariance(self, small_grid):
        st = make_gaussian_state(small_grid, PM, 0.3, -0.4, 0.12, 0.15)
        qq = small_grid.q[:, None]
        pp = small_grid.dual[None, :]
        chi = 0.8 * qq - 1.3 * pp + 0.5 * qq * pp
        rot = st.with_amplitudes(np.exp(1j * chi) * st.amplitudes)
        assert expectation_position(rot) == pytest.approx(expectation_position(st), rel=1e-12, abs=1e-12)
        assert expectation_momentum(rot) == pytest.approx(expectation_momentum(st), rel=1e-12, abs=1e-12)
        assert expectation_hamiltonian(rot, lambda q: q**4) == pytest.approx(
            expectation_hamiltonian(st, lambda q: q**4), rel=1e-12
        )


class TestCommutators:
    def test_q_with_hidden_momentum(self):
        # [q, -i hbar d/dq] = i hbar on smooth bulk states, spectral accuracy
        grid = GridSpec(-2.0, 2.0, 256, -2.0, 2.0, 256)
        st = make_gaussian_state(grid, Representation.POSITION_DUAL, 0.2, -0.1, 0.15, 0.15)
        psi = st.amplitudes
        q = grid.q[:, None]
        p_hat = lambda f: -1j * cover_derivative_q(f, grid.dq)
        comm = q * p_hat(psi) - p_hat(q * psi)
        assert np.abs(comm - 1j * psi).max() <= 1e-8

    def test_q_commutes_with_p(self):
        grid = GridSpec(-2.0, 2.0, 128, -2.0, 2.0, 128)
        st = make_gaussian_state(grid, Representation.POSITION_DUAL, 0.2, -0.1, 0.15, 0.15)
        psi = st.amplitudes
        q = grid.q[:, None]
        p_hat = lambda f: -1j * spectral_derivative(f, grid.d_dual, axis=1)
        comm = q * p_hat(psi) - p_hat(q * psi)
        assert np.abs(comm).max() <= 1e-12


class TestMadelung:
    def test_real_positive_phase(self, small_grid):
        st = make_gaussian_state(small_grid, PM, 0.0, 0.0, 0.1, 0.1)
        fields = madelung_split(st)
        assert np.all(fields.density >= 0)
        assert np.abs(fields.phase_factor[fields.defined] - 1.0).max() <= 1e-12

    def test_constant_rephasing(self, small_grid):
        st = make_gaussian_state(small_grid, PM, 0.0, 0.0, 0.1, 0.1)
        rot = st.with_amplitudes(np.exp(1j * np.pi / 3) * st.amplitudes)
        f0, f1 = madelung_split(st), madelung_split(rot)
        assert np.abs(f1.density - f0.density).max() <= 1e-14
        assert np.abs(
            f1.phase_factor[f1.defined] - np.exp(1j * np.pi / 3) * f0.phase_factor[f0.defined]
        ).max() <= 1e-12

    def test_transported_density_and_phase(self):
        # free flow carries density and phase factor along characteristics
        grid = GridSpec(-6.0, 6.0, 256, -6.4, 6.4, 256)
        q0, p0, sq, sp, t = -1.0, 1.0, 0.2, 0.2, 0.8
        base = make_gaussian_state(grid, PM, q0, p0, sq, sp)
        qq = grid.q[:, None]
        pp = grid.dual[None, :]
        chi = 0.7 * qq + 0.3 * pp
        st = base.with_amplitudes(base.amplitudes * np.exp(1j * chi))
        out = madelung_split(evolve_free_spectral(st, t))

        q_src = qq - pp * t
        dens_oracle = (
            1.0 / (2 * np.pi * sq * sp)
            * np.exp(-((q_src - q0) ** 2) / (2 * sq**2) - ((pp - p0) ** 2) / (2 * sp**2))
        )
        assert np.abs(out.density - dens_oracle).max() <= 1e-6

        phase_oracle = np.exp(1j * (0.7 * q_src + 0.3 * pp))
        sel = out.defined
        assert np.abs(out.phase_factor[sel] - phase_oracle[sel]).max() <= 1e-6
