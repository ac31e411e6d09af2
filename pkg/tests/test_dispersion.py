import math

import numpy as np
import pytest

from relwalk.dispersion import (
    CTQW,
    DTQW,
    Dirac,
    Hadamard,
    compton_wavelength,
    effective_mass,
    group_velocity,
    localization_correspondence,
    max_speed,
    omega,
)
from relwalk.errors import Unsupported

from conftest import THETA

MODELS = [DTQW(THETA), DTQW(math.pi / 4), DTQW(0.1), Dirac(1.0), Dirac(2.5), CTQW(0.3), Hadamard()]


def _domain(model, n):
    if isinstance(model, Dirac):
        return np.linspace(-200, 200, n)
    return np.linspace(-np.pi, np.pi, n)


class TestOmega:
    def test_dtqw_band_bottom(self):
        assert omega(DTQW(THETA), 0.0) == pytest.approx(THETA, abs=1e-15)

    @pytest.mark.parametrize("theta", [0.2, THETA, 1.5])
    def test_dtqw_quarter(self, theta):
        assert omega(DTQW(theta), math.pi / 2) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_dirac_rest_energy(self):
        assert omega(Dirac(1.0), 0.0) == 1.0

    def test_dtqw_range(self):
        w = omega(DTQW(THETA), _domain(DTQW(THETA), 1001))
        assert np.all((w > 0) & (w < math.pi))

    def test_hadamard_branch(self):
        w = omega(Hadamard(), _domain(Hadamard(), 1001))
        assert np.all(np.abs(w) <= math.pi / 4 + 1e-15)
        assert np.allclose(np.sin(w), np.sin(_domain(Hadamard(), 1001)) / math.sqrt(2))


class TestGroupVelocity:
    def test_dirac_approaches_light_speed(self):
        v = group_velocity(Dirac(1.0), np.array([1e1, 1e2, 1e3]))
        assert np.all(v < 1) and np.all(np.diff(v) > 0)
        assert 1 - v[-1] < 1e-6

    def test_dtqw_max_at_quarter(self):
        assert group_velocity(DTQW(THETA), math.pi / 2) == pytest.approx(math.cos(THETA), abs=1e-15)
        assert math.cos(THETA) == pytest.approx(0.2225, abs=5e-4)

    def test_ctqw_quarter(self):
        assert group_velocity(CTQW(0.3), math.pi / 2) == pytest.approx(0.6)

    @pytest.mark.parametrize("model", MODELS, ids=repr)
    def test_bounded_by_max_speed(self, model):
        v = group_velocity(model, _domain(model, 10_000))
        assert np.max(np.abs(v)) <= max_speed(model) * (1 + 1e-12)

    @pytest.mark.parametrize("model", MODELS, ids=repr)
    def test_matches_finite_differences(self, model, rng):
        lo, hi = (-50, 50) if isinstance(model, Dirac) else (-np.pi + 0.01, np.pi - 0.01)
        k = rng.uniform(lo, hi, 100)
        h = 1e-5
        fd = (omega(model, k + h) - omega(model, k - h)) / (2 * h)
        assert np.max(np.abs(fd - group_velocity(model, k))) < 1e-6

    @pytest.mark.parametrize("model", [m for m in MODELS if not isinstance(m, Hadamard)], ids=repr)
    def test_omega_even(self, model):
        k = _domain(model, 501)
        assert np.allclose(omega(model, k), omega(model, -k), atol=1e-14, rtol=0)

    def test_hadamard_not_even(self):
        k = np.array([0.3, 1.0])
        assert not np.allclose(omega(Hadamard(), k), omega(Hadamard(), -k))


class TestConstants:
    def test_max_speeds(self):
        assert max_speed(DTQW(math.pi / 4)) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        assert max_speed(CTQW(math.cos(THETA) / 2)) == pytest.approx(0.2225, abs=5e-4)
        assert max_speed(Dirac(3.0)) == 1.0
        assert max_speed(Hadamard()) == pytest.approx(1 / math.sqrt(2))

    def test_effective_mass(self):
        assert effective_mass(DTQW(THETA)) == pytest.approx(4.38, abs=5e-3)
        assert effective_mass(DTQW(math.pi / 4)) == pytest.approx(1.0, abs=1e-12)
        assert effective_mass(Dirac(2.0)) == 2.0

    def test_effective_mass_is_inverse_curvature(self):
        model = DTQW(THETA)
        h = 1e-4
        curv = (omega(model, h) - 2 * omega(model, 0.0) + omega(model, -h)) / h**2
        assert 1 / curv == pytest.approx(effective_mass(model), rel=1e-6)

    @pytest.mark.parametrize("model", [CTQW(0.2), Hadamard()], ids=repr)
    def test_unsupported(self, model):
        with pytest.raises(Unsupported):
            effective_mass(model)
        with pytest.raises(Unsupported):
            compton_wavelength(model)

    def test_compton(self):
        assert compton_wavelength(DTQW(math.pi / 4)) == pytest.approx(math.sqrt(2), abs=1e-12)
        lam = compton_wavelength(DTQW(THETA))
        assert lam == pytest.approx(1 / math.sin(THETA), abs=1e-12)
        assert lam == pytest.approx(1 / (math.tan(THETA) * math.cos(THETA)), abs=1e-12)
        assert lam == pytest.approx(1.0257, abs=1e-4)
        assert compton_wavelength(Dirac(1.0)) == 1.0

    @pytest.mark.parametrize(
        "theta, alpha, expected, tol",
        [(THETA, 2.2, 0.502, 1e-3), (THETA, 22, 5.02, 1e-2), (math.pi / 4, 1, 1.0, 1e-12)],
    )
    def test_localization_correspondence(self, theta, alpha, expected, tol):
        assert localization_correspondence(theta, alpha) == pytest.approx(expected, abs=tol)

    @pytest.mark.parametrize("bad", [lambda: DTQW(0.0), lambda: DTQW(math.pi / 2), lambda: Dirac(0), lambda: CTQW(-1)])
    def test_invalid_parameters(self, bad):
        with pytest.raises(ValueError):
            bad()


class TestExpansions:
    def test_quadratic_small_k(self):
        model = DTQW(THETA)
        m = effective_mass(model)
        ks = np.array([0.1, 0.05, 0.025, 0.0125])
        remainder = omega(model, ks) - THETA - ks**2 / (2 * m)
        ratios = np.abs(remainder) / ks**4
        assert np.all(ratios < 2 * ratios[0])
        assert ratios.max() / ratios.min() < 1.1

    def test_small_cos_theta_form(self):
        theta = 0.49 * math.pi
        k = np.linspace(-np.pi, np.pi, 2001)
        approx = math.pi / 2 - math.cos(theta) * np.cos(k)
        assert np.max(np.abs(omega(DTQW(theta), k) - approx)) < math.cos(theta) ** 2

    def test_hadamard_cubic(self):
        k = 1e-2
        expected = k / math.sqrt(2) - k**3 / (12 * math.sqrt(2))
        assert omega(Hadamard(), k) == pytest.approx(expected, abs=1e-9)
