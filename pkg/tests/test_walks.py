import math

import numpy as np
import pytest

from relwalk.errors import LightConeOverflow
from relwalk.numerics import bessel_j
from relwalk.walks import (
    ScalarLattice,
    SpinorLattice,
    ctqw_evolve,
    dirac_evolve,
    dtqw_evolve,
    dtqw_step,
    dtqw_step_inverse,
    trotter_convergence,
)

from conftest import GAMMA, THETA


def _random_spinor(rng, n_min=-20, n_max=20, spacing=1.0):
    width = n_max - n_min + 1
    up = rng.normal(size=width) + 1j * rng.normal(size=width)
    down = rng.normal(size=width) + 1j * rng.normal(size=width)
    return SpinorLattice(n_min, n_max, up, down, spacing).normalized()


def _momentum_step(state, theta):
    """One step computed as inverse FFT of the 2x2 momentum-space operator applied mode by mode."""
    k = 2 * np.pi * np.arange(state.width) / state.width
    c, s = math.cos(theta), math.sin(theta)
    u_hat, d_hat = np.fft.fft(state.up), np.fft.fft(state.down)
    em, ep = np.exp(-1j * k), np.exp(1j * k)
    new_u = em * c * u_hat - 1j * em * s * d_hat
    new_d = -1j * ep * s * u_hat + ep * c * d_hat
    return np.fft.ifft(new_u), np.fft.ifft(new_d)


class TestLattices:
    def test_length_check(self):
        with pytest.raises(ValueError):
            SpinorLattice(0, 3, np.zeros(3), np.zeros(4))
        with pytest.raises(ValueError):
            ScalarLattice(0, 3, np.zeros(5))

    def test_normalized(self, rng):
        s = _random_spinor(rng, spacing=0.1)
        assert s.norm_squared() == pytest.approx(1.0, abs=1e-14)

    def test_inputs_not_mutated(self, rng):
        s = _random_spinor(rng)
        before = s.up.copy(), s.down.copy()
        dtqw_evolve(s, THETA, 3, check=False)
        assert np.array_equal(s.up, before[0]) and np.array_equal(s.down, before[1])


class TestDTQWStep:
    def test_no_coin_pure_right_mover(self):
        out = dtqw_step(SpinorLattice.localized(-5, 5, (1, 0)), 0.0)
        expected = np.zeros(11)
        expected[6] = 1
        assert np.allclose(out.up, expected) and np.allclose(out.down, 0)

    def test_full_flip(self):
        out = dtqw_step(SpinorLattice.localized(-5, 5, (1, 0)), math.pi / 2)
        expected = np.zeros(11, complex)
        expected[4] = -1j
        assert np.allclose(out.up, 0, atol=1e-16) and np.allclose(out.down, expected)

    def test_matches_momentum_space_single(self):
        s = SpinorLattice.localized(-16, 15, (1 / math.sqrt(2), 1 / math.sqrt(2)))
        out = dtqw_step(s, THETA)
        up, down = _momentum_step(s, THETA)
        assert np.max(np.abs(out.up - up)) < 1e-12 and np.max(np.abs(out.down - down)) < 1e-12

    @pytest.mark.parametrize("width", [8, 31, 64])
    def test_matches_momentum_space_random(self, rng, width):
        s = _random_spinor(rng, 0, width - 1)
        theta = rng.uniform(0.05, 1.5)
        out = dtqw_step(s, theta)
        up, down = _momentum_step(s, theta)
        assert np.max(np.abs(out.up - up)) < 1e-12 and np.max(np.abs(out.down - down)) < 1e-12

    def test_reversible(self, rng):
        s = _random_spinor(rng)
        back = dtqw_step_inverse(dtqw_step(s, THETA), THETA)
        assert np.max(np.abs(back.up - s.up)) < 1e-12 and np.max(np.abs(back.down - s.down)) < 1e-12


class TestDTQWEvolve:
    def test_zero_steps_identity(self, rng):
        s = _random_spinor(rng, -60, 60)
        out = dtqw_evolve(s, THETA, 0, check=False)
        assert np.array_equal(out.up, s.up)

    def test_unitarity_1000_steps(self, rng):
        s = _random_spinor(rng, -10, 10)
        out = dtqw_evolve(s, THETA, 1000, check=False)
        assert abs(out.norm_squared() - s.norm_squared()) < 1e-12

    def test_linearity(self, rng):
        s1, s2 = _random_spinor(rng, -8, 8), _random_spinor(rng, -8, 8)
        a, b = 0.3 - 0.2j, -1.1 + 0.5j
        lhs = dtqw_evolve(a * s1 + b * s2, THETA, 17, check=False)
        rhs = a * dtqw_evolve(s1, THETA, 17, check=False) + b * dtqw_evolve(s2, THETA, 17, check=False)
        assert np.max(np.abs(lhs.up - rhs.up)) < 1e-12 and np.max(np.abs(lhs.down - rhs.down)) < 1e-12

    def test_hadamard_like_peaks(self):
        tau = 100
        s = SpinorLattice.localized(-120, 120, (1 / math.sqrt(2), 1 / math.sqrt(2)))
        out = dtqw_evolve(s, math.pi / 4, tau)
        rho = np.abs(out.up) ** 2 + np.abs(out.down) ** 2
        n = out.sites
        right = n[n > 0][np.argmax(rho[n > 0])]
        left = n[n < 0][np.argmax(rho[n < 0])]
        assert abs(right - tau / math.sqrt(2)) <= 3
        assert abs(left + tau / math.sqrt(2)) <= 3

    def test_light_cone_overflow(self):
        s = SpinorLattice.localized(-30, 30, (1, 0))
        with pytest.raises(LightConeOverflow):
            dtqw_evolve(s, 0.3, 40)
        # same run fits once the ring is wide enough
        dtqw_evolve(SpinorLattice.localized(-60, 60, (1, 0)), 0.3, 40)

    def test_negative_steps(self):
        with pytest.raises(ValueError):
            dtqw_evolve(SpinorLattice.localized(-5, 5), THETA, -1)


class TestCTQW:
    def test_zero_time_identity(self):
        s = ScalarLattice.localized(-20, 20)
        assert np.allclose(ctqw_evolve(s, GAMMA, 0.0).amp, s.amp, atol=1e-15)

    def test_localized_start_is_bessel(self):
        t = 40.0
        s = ScalarLattice.localized(-40, 40)
        out = ctqw_evolve(s, GAMMA, t)
        n = out.sites
        expected = np.exp(-2j * GAMMA * t) * (1j**n) * bessel_j(n, 2 * GAMMA * t)
        assert np.max(np.abs(out.amp - expected)) < 1e-10

    def test_localized_start_scipy_crosscheck(self):
        special = pytest.importorskip("scipy.special")
        t = 40.0
        out = ctqw_evolve(ScalarLattice.localized(-40, 40), GAMMA, t)
        n = out.sites
        expected = np.exp(-2j * GAMMA * t) * (1j**n) * special.jv(n, 2 * GAMMA * t)
        assert np.max(np.abs(out.amp - expected)) < 1e-10

    def test_unitarity_and_linearity(self, rng):
        a = rng.normal(size=41) + 1j * rng.normal(size=41)
        b = rng.normal(size=41) + 1j * rng.normal(size=41)
        s1, s2 = ScalarLattice(-20, 20, a), ScalarLattice(-20, 20, b)
        out = ctqw_evolve(s1, 0.4, 1000.0, check=False)
        assert abs(out.norm_squared() - s1.norm_squared()) < 1e-12 * s1.norm_squared()
        lhs = ctqw_evolve(2 * s1 + 1j * s2, 0.4, 3.0, check=False)
        rhs = 2 * ctqw_evolve(s1, 0.4, 3.0, check=False) + 1j * ctqw_evolve(s2, 0.4, 3.0, check=False)
        assert np.max(np.abs(lhs.amp - rhs.amp)) < 1e-12

    def test_light_cone_overflow(self):
        with pytest.raises(LightConeOverflow):
            ctqw_evolve(ScalarLattice.localized(-20, 20), 0.5, 30.0)


class TestDirac:
    def _gaussian(self, spinor, eps=0.05, half=30.0, width=1.0):
        n_half = int(half / eps)
        x = np.arange(-n_half, n_half + 1) * eps
        g = np.exp(-0.5 * (x / width) ** 2)
        return SpinorLattice(-n_half, n_half, spinor[0] * g, spinor[1] * g, eps).normalized()

    def test_massless_right_mover_translates(self):
        s = self._gaussian((1, 0))
        shift = 200
        out = dirac_evolve(s, 0.0, shift * s.spacing)
        assert np.max(np.abs(out.up - np.roll(s.up, shift))) < 1e-10
        assert np.max(np.abs(out.down)) < 1e-12

    def test_zero_time(self):
        s = self._gaussian((1, 1j))
        out = dirac_evolve(s, 1.0, 0.0)
        assert np.max(np.abs(out.up - s.up)) < 1e-14

    def test_unitarity_and_linearity(self, rng):
        s1 = _random_spinor(rng, -64, 63, spacing=0.1)
        s2 = _random_spinor(rng, -64, 63, spacing=0.1)
        out = dirac_evolve(s1, 1.0, 100.0, check=False)
        assert abs(out.norm_squared() - 1.0) < 1e-12
        lhs = dirac_evolve(0.5 * s1 + 2j * s2, 1.0, 2.0, check=False)
        rhs = 0.5 * dirac_evolve(s1, 1.0, 2.0, check=False) + 2j * dirac_evolve(s2, 1.0, 2.0, check=False)
        assert np.max(np.abs(lhs.up - rhs.up)) < 1e-12

    def test_group_composition(self):
        s = self._gaussian((1, 0.3))
        once = dirac_evolve(s, 1.0, 5.0)
        twice = dirac_evolve(dirac_evolve(s, 1.0, 2.0), 1.0, 3.0)
        assert np.max(np.abs(once.up - twice.up)) < 1e-12

    def test_light_cone_overflow(self):
        with pytest.raises(LightConeOverflow):
            dirac_evolve(self._gaussian((1, 0), half=10.0), 1.0, 10.0)


class TestTrotter:
    def test_first_order_decay(self):
        errors = trotter_convergence(1.0, 6.0, 1.0, [0.1, 0.05, 0.025])
        assert errors[0] > errors[1] > errors[2]
        for big, small in zip(errors, errors[1:]):
            assert 1.7 <= big / small <= 2.3

    def test_massless_exact(self):
        assert max(trotter_convergence(0.0, 6.0, 1.0, [0.1, 0.05, 0.025])) < 1e-13

    def test_zero_time(self):
        assert max(trotter_convergence(1.0, 6.0, 0.0, [0.1, 0.05])) < 1e-14

    def test_rejects_large_theta(self):
        with pytest.raises(ValueError):
            trotter_convergence(20.0, 6.0, 1.0, [0.1])
