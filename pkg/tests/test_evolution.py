import numpy as np
import pytest

from kvnbox import (
    GridSpec,
    ImageSumPolicy,
    KvnState,
    PotentialSpec,
    Representation,
    evolve_box,
    evolve_free_spectral,
    evolve_gravity,
    evolve_splitstep,
    fold_triangle,
    harmonic_potential,
    kernel_box,
    kernel_free,
    make_gaussian_state,
    norm,
    to_dual,
    to_momentum,
)
from kvnbox.fourier import spectral_shift

from conftest import gaussian_density

PM = Representation.POSITION_MOMENTUM
PD = Representation.POSITION_DUAL


def peak_location(state):
    i, j = np.unravel_index(np.argmax(state.density()), state.density().shape)
    return state.grid.q[i], state.grid.dual[j]


class TestFoldTriangle:
    def test_inside(self):
        q, s = fold_triangle(np.array([0.3]), 1.0)
        assert q[0] == pytest.approx(0.3) and s[0] == 1.0

    def test_one_reflection(self):
        q, s = fold_triangle(np.array([1.25]), 1.0)
        assert q[0] == pytest.approx(0.75) and s[0] == -1.0

    def test_periodicity(self):
        x = np.linspace(-7, 7, 101)
        q1, s1 = fold_triangle(x, 1.0)
        q2, s2 = fold_triangle(x + 2.0, 1.0)
        assert np.allclose(q1, q2, atol=1e-12) and np.array_equal(s1, s2)


class TestFreeSpectral:
    def test_identity_at_zero(self, free_state):
        out = evolve_free_spectral(free_state, 0.0)
        assert np.array_equal(out.amplitudes, free_state.amplitudes)

    def test_ballistic_peak(self, free_grid):
        st = make_gaussian_state(free_grid, PM, 0.2, 1.0, 0.15, 0.2)
        q_pk, p_pk = peak_location(evolve_free_spectral(st, 0.3))
        assert abs(q_pk - 0.5) <= free_grid.dq and p_pk == pytest.approx(1.0, abs=1e-12)

    def test_shear_resampling_oracle(self, free_grid, free_state):
        t = 0.7
        out = evolve_free_spectral(free_state, t)
        qq, pp = np.meshgrid(free_grid.q, free_grid.dual, indexing="ij")
        oracle = gaussian_density(qq - pp * t, pp, -2.0, 1.0, 0.15, 0.2)
        assert np.abs(out.density() - oracle).max() <= 1e-6

    def test_norm_and_time(self, free_state):
        out = evolve_free_spectral(free_state, 1.3)
        assert abs(norm(out) - 1.0) <= 1e-10
        assert out.time == pytest.approx(1.3)

    def test_composition(self, free_state):
        a = evolve_free_spectral(evolve_free_spectral(free_state, 0.4), 0.6)
        b = evolve_free_spectral(free_state, 1.0)
        assert np.abs(a.amplitudes - b.amplitudes).max() <= 1e-9

    def test_dual_route_matches(self, free_state):
        t = 0.5
        direct = to_dual(evolve_free_spectral(free_state, t))
        via_dual = evolve_free_spectral(to_dual(free_state), t)
        assert np.abs(direct.amplitudes - via_dual.amplitudes).max() <= 1e-10

    def test_wraparound_rejected(self, free_state):
        with pytest.raises(ValueError, match="seam"):
            evolve_free_spectral(free_state, 10.0)


class TestKernelFree:
    def test_zero_exponent(self):
        assert kernel_free(2.0, 1.0, 0.3, 1.0, 0.9) == pytest.approx(1 / (4 * np.pi))
        assert kernel_free(2.0, 1.3, 0.4, 0.7, 0.4) == pytest.approx(1 / (4 * np.pi))

    def test_pi_phase(self):
        # (q - q')(Q - Q') = pi at hbar = m = t = 1 gives -1/(2 pi)
        val = kernel_free(1.0, np.pi, 1.0, 0.0, 0.0)
        assert val == pytest.approx(-1 / (2 * np.pi), rel=1e-12)

    def test_zero_time_rejected(self):
        with pytest.raises(ValueError):
            kernel_free(0.0, 0.1, 0.1, 0.0, 0.0)

    def test_quadrature_matches_spectral(self):
        grid = GridSpec(-4.0, 4.0, 128, -6.4, 6.4, 256)
        st = make_gaussian_state(grid, PM, -0.5, 0.5, 0.3, 0.3)
        dual = to_dual(st)
        t = 1.0
        ref = evolve_free_spectral(dual, t)
        g = dual.grid
        w = (g.q_weights * g.dq)[:, None] * g.d_dual
        rng = np.random.default_rng(0)
        targets = list(zip(rng.integers(20, 108, 40), rng.integers(40, 216, 40)))
        src_amp = dual.amplitudes * w
        for i, j in targets:
            val = np.sum(
                kernel_free(t, g.q[i], g.dual[j], g.q[:, None], g.dual[None, :]) * src_amp
            )
            assert abs(val - ref.amplitudes[i, j]) <= 1e-6


class TestKernelBox:
    def test_even_in_dual_at_wall(self):
        Q = np.linspace(-5, 5, 41)
        plus = kernel_box(0.7, 0.0, Q, 0.3, 0.8, 1.0)
        minus = kernel_box(0.7, 0.0, -Q, 0.3, 0.8, 1.0)
        assert np.abs(plus - minus).max() <= 1e-12 * np.abs(plus).max()

    def test_zero_time_rejected(self):
        with pytest.raises(ValueError):
            kernel_box(0.0, 0.1, 0.1, 0.2, 0.0, 1.0)

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            ImageSumPolicy(n_images=0)
        with pytest.raises(ValueError):
            ImageSumPolicy(tail_tol=-1.0)

    def test_single_image_matches_free(self):
        # far from walls at small t the n = 0 wall mirror only adds fast
        # oscillation that integrates away against the packet
        grid = GridSpec(0.0, 1.0, 128, -12.8, 12.8, 512)
        st = make_gaussian_state(grid, PM, 0.5, 0.5, 0.04, 0.2)
        dual = to_dual(st)
        g = dual.grid
        w = (g.q_weights * g.dq)[:, None] * g.d_dual
        src = dual.amplitudes * w
        t = 0.1
        rng = np.random.default_rng(1)
        targets = list(zip(rng.integers(40, 88, 25), rng.integers(120, 392, 25)))
        scale = np.abs(dual.amplitudes).max()
        for i, j in targets:
            qs, Qs = g.q[:, None], g.dual[None, :]
            free_val = np.sum(kernel_free(t, g.q[i], g.dual[j], qs, Qs) * src)
            one = np.sum(kernel_box(t, g.q[i], g.dual[j], qs, Qs, 1.0, ImageSumPolicy(1)) * src)
            assert abs(one - free_val) <= 1e-10 * scale

    def test_high_image_reference_matches_free_flow(self):
        # anti-aliased quadrature at generous n_images against the exact
        # spectral free flow, before any wall contact
        grid = GridSpec(0.0, 1.0, 128, -12.8, 12.8, 512)
        st = make_gaussian_state(grid, PM, 0.5, 0.5, 0.04, 0.2)
        t = 0.1
        ref = evolve_free_spectral(st, t)
        via_kernel = evolve_box(st, t, 1.0, "image-kernel", ImageSumPolicy(12))
        scale = np.abs(ref.amplitudes).max()
        assert np.abs(via_kernel.amplitudes - ref.amplitudes).max() <= 1e-10 * scale


class TestEvolveBox:
    def test_no_wall_contact(self, box_state, box_grid):
        q_pk, p_pk = peak_location(evolve_box(box_state, 0.25, 1.0))
        assert abs(q_pk - 0.75) <= box_grid.dq and p_pk == pytest.approx(1.0)

    def test_one_bounce(self, box_state, box_grid):
        q_pk, p_pk = peak_location(evolve_box(box_state, 0.75, 1.0))
        assert abs(q_pk - 0.75) <= box_grid.dq and p_pk == pytest.approx(-1.0)

    def test_billiard_period_single_speed(self, box_grid):
        # at fixed |p| the flow has period 2L/|p|; use a single momentum row
        j = np.argmin(np.abs(box_grid.dual - 1.0))
        assert box_grid.dual[j] == pytest.approx(1.0)
        field = np.zeros((box_grid.n_q, box_grid.n_dual), complex)
        field[:, j] = np.exp(-((box_grid.q - 0.5) ** 2) / (4 * 0.05**2))
        st = KvnState(box_grid, PM, field)
        out = evolve_box(st, 2.0, 1.0)
        assert np.abs(out.amplitudes - st.amplitudes).max() <= 1e-12

    def test_norm_preserved_through_bounce(self, box_state):
        for t in (0.25, 0.6, 0.75, 2.0):
            assert abs(norm(evolve_box(box_state, t, 1.0)) - 1.0) <= 1e-10

    def test_wall_touching_support_rejected(self, box_grid):
        st = make_gaussian_state(box_grid, PM, 0.15, 1.0, 0.05, 0.32)
        with pytest.raises(ValueError, match="elastic-wall"):
            evolve_box(st, 0.1, 1.0)

    def test_wrong_domain_rejected(self, free_state):
        with pytest.raises(ValueError, match="spanning"):
            evolve_box(free_state, 0.1, 1.0)

    def test_backends_agree(self):
        grid = GridSpec(0.0, 1.0, 256, -12.8, 12.8, 512)
        st = make_gaussian_state(grid, PM, 0.5, 1.0, 0.05, 0.25)
        ch = evolve_box(st, 0.6, 1.0, "characteristics")
        ik = evolve_box(st, 0.6, 1.0, "image-kernel")
        assert np.abs(ch.amplitudes - ik.amplitudes).max() <= 1e-5
        assert abs(norm(ik) - 1.0) <= 1e-8

    def test_insufficient_images_rejected(self):
        grid = GridSpec(0.0, 1.0, 256, -12.8, 12.8, 512)
        st = make_gaussian_state(grid, PM, 0.5, 2.0, 0.05, 0.25)
        with pytest.raises(ValueError, match="image sum truncated"):
            evolve_box(st, 2.0, 1.0, "image-kernel", ImageSumPolicy(n_images=1))


class TestGravity:
    def test_zero_field_is_free(self, free_state):
        a = evolve_gravity(free_state, 0.7, 0.0)
        b = evolve_free_spectral(free_state, 0.7)
        assert np.array_equal(a.amplitudes, b.amplitudes)

    def test_fall_kinematics(self):
        from kvnbox import expectation_momentum, expectation_position

        grid = GridSpec(-4.0, 3.0, 256, -6.4, 6.4, 256)
        st = make_gaussian_state(grid, PM, 0.5, 0.0, 0.15, 0.2)
        out = evolve_gravity(st, 0.4, -1.0)
        assert expectation_position(out) == pytest.approx(0.42, abs=1e-3)
        assert expectation_momentum(out) == pytest.approx(-0.4, abs=1e-3)

    def test_zero_dual_slice_is_shifted_free(self):
        # the momentum-kick phase is exactly 1 on the Q = 0 row
        grid = GridSpec(-4.0, 3.0, 128, -6.4, 6.4, 128)
        st = to_dual(make_gaussian_state(grid, PM, 0.5, 0.0, 0.15, 0.2))
        g, t = -1.0, 0.4
        grav = evolve_gravity(st, t, g)
        free = evolve_free_spectral(st, t)
        shifted = spectral_shift(free.amplitudes, 0.5 * g * t**2, grid.dq, axis=0)
        row = st.grid.n_dual // 2
        assert st.grid.dual[row] == 0.0
        assert np.abs(grav.amplitudes[:, row] - shifted[:, row]).max() <= 1e-12

    def test_two_route_agreement(self):
        grid = GridSpec(-4.0, 3.0, 256, -6.4, 6.4, 256)
        st = make_gaussian_state(grid, PM, 0.5, 0.0, 0.15, 0.2)
        via_pm = to_dual(evolve_gravity(st, 0.4, -1.0))
        via_dual = evolve_gravity(to_dual(st), 0.4, -1.0)
        assert np.abs(via_pm.amplitudes - via_dual.amplitudes).max() <= 1e-8

    def test_norm_preserved(self, ):
        grid = GridSpec(-4.0, 3.0, 256, -6.4, 6.4, 256)
        st = make_gaussian_state(grid, PM, 0.5, 0.0, 0.15, 0.2)
        assert abs(norm(evolve_gravity(st, 1.5, -1.0)) - 1.0) <= 1e-10


@pytest.fixture(scope="module")
def splitstep_state():
    grid = GridSpec(-4.0, 4.0, 128, -4.0, 4.0, 128)
    st = make_gaussian_state(grid, PM, 1.0, 0.0, 0.3, 0.3)
    return to_dual(st)


class TestSplitStep:
    def test_free_potential_exact(self, splitstep_state):
        freepot = PotentialSpec(v=lambda q: np.zeros_like(q), v_prime=lambda q: np.zeros_like(q))
        a = evolve_splitstep(splitstep_state, freepot, 0.01, 30)
        b = evolve_free_spectral(splitstep_state, 0.3)
        assert np.abs(a.amplitudes - b.amplitudes).max() <= 1e-12

    def test_harmonic_quarter_period_rotation(self, splitstep_state):
        t = np.pi / 2
        n = int(t / 1e-3)
        out = evolve_splitstep(splitstep_state, harmonic_potential(), t / n, n)
        back = to_momentum(out)
        g = back.grid
        qq, pp = np.meshgrid(g.q, g.dual, indexing="ij")
        oracle = gaussian_density(-pp, qq, 1.0, 0.0, 0.3, 0.3)
        assert np.abs(back.density() - oracle).max() <= 1e-4

    def test_second_order_convergence(self, splitstep_state):
        t = 0.5
        pot = harmonic_potential()
        g = to_momentum(splitstep_state).grid
        qq, pp = np.meshgrid(g.q, g.dual, indexing="ij")
        oracle = gaussian_density(
            qq * np.cos(t) - pp * np.sin(t), qq * np.sin(t) + pp * np.cos(t), 1.0, 0.0, 0.3, 0.3
        )

        def density_error(dt):
            n = int(round(t / dt))
            out = to_momentum(evolve_splitstep(splitstep_state, pot, t / n, n))
            return np.abs(out.density() - oracle).max()

        ratio = density_error(4e-3) / density_error(2e-3)
        assert 3.2 <= ratio <= 4.8

    def test_norm_per_step(self, splitstep_state):
        out = evolve_splitstep(splitstep_state, harmonic_potential(), 1e-3, 200)
        assert abs(norm(out) - norm(splitstep_state)) <= 200 * 1e-10

    def test_nyquist_guard(self, splitstep_state):
        with pytest.raises(ValueError, match="pi/2"):
            evolve_splitstep(splitstep_state, harmonic_potential(), 0.5, 2)

    def test_derivative_validation(self, splitstep_state):
        bad = PotentialSpec(v=lambda q: q**2, v_prime=lambda q: q)  # off by 2x
        with pytest.raises(ValueError, match="central differences"):
            evolve_splitstep(splitstep_state, bad, 1e-3, 1)

    def test_requires_dual_representation(self, free_state):
        with pytest.raises(ValueError):
            evolve_splitstep(free_state, harmonic_potential(), 1e-3, 1)
