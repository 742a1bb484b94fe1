import math

import numpy as np
import pytest

from kvnbox import GridSpec, UnitSystem


def test_natural_units_default():
    u = UnitSystem()
    assert u.hbar == 1.0 and u.mass == 1.0


@pytest.mark.parametrize("hbar,mass", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (np.inf, 1.0)])
def test_unit_validation(hbar, mass):
    with pytest.raises(ValueError):
        UnitSystem(hbar=hbar, mass=mass)


def test_grid_axes_and_spacings():
    g = GridSpec(0.0, 1.0, 256, -6.4, 6.4, 128)
    assert g.dq == pytest.approx(1.0 / 255)
    assert g.d_dual == pytest.approx(0.1)
    assert g.q[0] == 0.0 and g.q[-1] == 1.0          # walls are grid rows
    assert g.dual[0] == -6.4 and 0.0 in g.dual       # symmetric FFT-style axis
    assert g.dual[-1] == pytest.approx(6.4 - 0.1)
    assert g.q_weights[0] == 0.5 and g.q_weights[1] == 1.0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(q_min=1.0, q_max=0.0, n_q=16, dual_min=-1, dual_max=1, n_dual=16),
        dict(q_min=0.0, q_max=1.0, n_q=6, dual_min=-1, dual_max=1, n_dual=16),
        dict(q_min=0.0, q_max=1.0, n_q=17, dual_min=-1, dual_max=1, n_dual=16),
        dict(q_min=0.0, q_max=1.0, n_q=16, dual_min=1, dual_max=-1, n_dual=16),
    ],
)
def test_grid_validation(kwargs):
    with pytest.raises(ValueError):
        GridSpec(**kwargs)


def test_conjugate_grid_relation():
    g = GridSpec(0.0, 1.0, 64, -12.8, 12.8, 256)
    c = g.conjugate_dual()
    # n * dp * dQ = 2 pi hbar
    assert c.d_dual * g.d_dual * g.n_dual == pytest.approx(2 * math.pi, rel=1e-14)
    assert c.dual_is_symmetric()
    back = c.conjugate_dual()
    assert back.d_dual == pytest.approx(g.d_dual, rel=1e-14)
    assert g.is_conjugate_of(c) and c.is_conjugate_of(g)


def test_asymmetric_dual_rejected_for_conjugation():
    g = GridSpec(0.0, 1.0, 64, -1.0, 2.0, 64)
    with pytest.raises(ValueError):
        g.conjugate_dual()
