"""
Direct simulators for the discrete-time, continuous-time and Dirac walks.

All lattices are rings: site ``n_max + 1`` wraps onto ``n_min``. That keeps
every propagator exactly unitary; comparisons against infinite-lattice
solutions stay valid as long as nothing reaches the wrap point, which the
evolve functions check before doing any work.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import LightConeOverflow

__all__ = [
    "SpinorLattice",
    "ScalarLattice",
    "LIGHT_CONE_MARGIN",
    "check_light_cone",
    "dtqw_step",
    "dtqw_step_inverse",
    "dtqw_evolve",
    "ctqw_evolve",
    "dirac_evolve",
    "trotter_convergence",
]

LIGHT_CONE_MARGIN = 8
SUPPORT_TOL = 1e-20


@dataclass(frozen=True)
class SpinorLattice:
    """Two-component amplitudes on sites ``n_min..n_max``; position is ``n * spacing``."""

    n_min: int
    n_max: int
    up: np.ndarray
    down: np.ndarray
    spacing: float = 1.0

    def __post_init__(self):
        width = self.n_max - self.n_min + 1
        up = np.asarray(self.up, dtype=complex)
        down = np.asarray(self.down, dtype=complex)
        if up.shape != (width,) or down.shape != (width,):
            raise ValueError(
                f"component arrays must have length {width}, got {up.shape} and {down.shape}"
            )
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        object.__setattr__(self, "up", up)
        object.__setattr__(self, "down", down)

    @classmethod
    def zeros(cls, n_min: int, n_max: int, spacing: float = 1.0) -> "SpinorLattice":
        width = n_max - n_min + 1
        return cls(n_min, n_max, np.zeros(width, complex), np.zeros(width, complex), spacing)

    @classmethod
    def localized(cls, n_min: int, n_max: int, spinor=(1.0, 0.0), site: int = 0) -> "SpinorLattice":
        """Walker sitting on one site with the given (unnormalized) coin state."""
        state = cls.zeros(n_min, n_max)
        state.up[site - n_min] = spinor[0]
        state.down[site - n_min] = spinor[1]
        return state

    @property
    def width(self) -> int:
        return self.n_max - self.n_min + 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def positions(self) -> np.ndarray:
        return self.sites * self.spacing

    def with_amplitudes(self, up, down) -> "SpinorLattice":
        return dataclasses.replace(self, up=up, down=down)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.up) ** 2 + np.abs(self.down) ** 2) * self.spacing)

    def normalized(self) -> "SpinorLattice":
        scale = 1.0 / math.sqrt(self.norm_squared())
        return self.with_amplitudes(self.up * scale, self.down * scale)

    def __add__(self, other: "SpinorLattice") -> "SpinorLattice":
        return self.with_amplitudes(self.up + other.up, self.down + other.down)

    def __rmul__(self, factor) -> "SpinorLattice":
        return self.with_amplitudes(factor * self.up, factor * self.down)


@dataclass(frozen=True)
class ScalarLattice:
    """One-component amplitudes on sites ``n_min..n_max``."""

    n_min: int
    n_max: int
    amp: np.ndarray

    spacing = 1.0

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=complex)
        if amp.shape != (self.n_max - self.n_min + 1,):
            raise ValueError(f"amplitude array has shape {amp.shape}, expected ({self.width},)")
        object.__setattr__(self, "amp", amp)

    @classmethod
    def localized(cls, n_min: int, n_max: int, site: int = 0) -> "ScalarLattice":
        amp = np.zeros(n_max - n_min + 1, complex)
        amp[site - n_min] = 1.0
        return cls(n_min, n_max, amp)

    @property
    def width(self) -> int:
        return self.n_max - self.n_min + 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def positions(self) -> np.ndarray:
        return self.sites.astype(float)

    def with_amplitudes(self, amp) -> "ScalarLattice":
        return dataclasses.replace(self, amp=amp)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amp) ** 2))

    def normalized(self) -> "ScalarLattice":
        return self.with_amplitudes(self.amp / math.sqrt(self.norm_squared()))

    def __add__(self, other: "ScalarLattice") -> "ScalarLattice":
        return self.with_amplitudes(self.amp + other.amp)

    def __rmul__(self, factor) -> "ScalarLattice":
        return self.with_amplitudes(factor * self.amp)


def _site_density(state) -> np.ndarray:
    if isinstance(state, SpinorLattice):
        return np.abs(state.up) ** 2 + np.abs(state.down) ** 2
    return np.abs(state.amp) ** 2


def check_light_cone(state, travel_sites: float, margin: int = LIGHT_CONE_MARGIN) -> None:
    """Raise ``LightConeOverflow`` if the support plus ``travel_sites`` gets within
    ``margin`` sites of the ring's wrap point.

    Support is the smallest site interval holding every site whose density
    exceeds ``1e-20`` of the total.
    """
    rho = _site_density(state)
    total = rho.sum()
    if total == 0:
        return
    occupied = np.flatnonzero(rho > SUPPORT_TOL * total)
    reach = math.ceil(travel_sites)
    lo = occupied[0] - reach
    hi = occupied[-1] + reach
    if lo < margin or hi > len(rho) - 1 - margin:
        raise LightConeOverflow(
            f"support [{state.n_min + occupied[0]}, {state.n_min + occupied[-1]}] spreading "
            f"{reach} sites reaches within {margin} sites of the ring edge "
            f"[{state.n_min}, {state.n_max}]"
        )


def dtqw_step(state: SpinorLattice, theta: float) -> SpinorLattice:
    """One walk step: coin ``exp(-i theta sigma_x)`` then up moves right, down moves left."""
    c, s = math.cos(theta), math.sin(theta)
    up = c * state.up - 1j * s * state.down
    down = -1j * s * state.up + c * state.down
    return state.with_amplitudes(np.roll(up, 1), np.roll(down, -1))


def dtqw_step_inverse(state: SpinorLattice, theta: float) -> SpinorLattice:
    """Exact inverse of :func:`dtqw_step`."""
    up = np.roll(state.up, -1)
    down = np.roll(state.down, 1)
    c, s = math.cos(theta), math.sin(theta)
    return state.with_amplitudes(c * up + 1j * s * down, 1j * s * up + c * down)


def dtqw_evolve(state: SpinorLattice, theta: float, steps: int, check: bool = True) -> SpinorLattice:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if check:
        check_light_cone(state, math.cos(theta) * steps)
    for _ in range(steps):
        state = dtqw_step(state, theta)
    return state


def ctqw_evolve(state: ScalarLattice, gamma: float, t: float, check: bool = True) -> ScalarLattice:
    """Exact propagation under the lattice Laplacian by diagonalizing in Fourier space."""
    if check:
        check_light_cone(state, 2.0 * gamma * abs(t))
    k = 2.0 * np.pi * np.fft.fftfreq(state.width)
    phase = np.exp(-1j * 2.0 * gamma * (1.0 - np.cos(k)) * t)
    return state.with_amplitudes(np.fft.ifft(phase * np.fft.fft(state.amp)))


def dirac_evolve(state: SpinorLattice, mass: float, t: float, check: bool = True) -> SpinorLattice:
    """Spectral propagation with ``H = sigma_z p + sigma_x m`` on a periodic grid.

    Each Fourier mode is advanced by the closed-form 2x2 exponential
    ``cos(w t) - i sin(w t) (sigma_z p + sigma_x m) / w``.
    """
    eps = state.spacing
    if check:
        check_light_cone(state, abs(t) / eps)
    p = 2.0 * np.pi * np.fft.fftfreq(state.width, d=eps)
    w = np.hypot(p, mass)
    cos_wt = np.cos(w * t)
    # sin(wt)/w with the w -> 0 limit t (massless zero mode)
    sinc_wt = t * np.sinc(w * t / np.pi)
    u = np.fft.fft(state.up)
    d = np.fft.fft(state.down)
    u_new = (cos_wt - 1j * sinc_wt * p) * u - 1j * sinc_wt * mass * d
    d_new = -1j * sinc_wt * mass * u + (cos_wt + 1j * sinc_wt * p) * d
    return state.with_amplitudes(np.fft.ifft(u_new), np.fft.ifft(d_new))


def _band_limited_state(eps: float, half_length: float, cutoff: float, width: float) -> SpinorLattice:
    """Gaussian-weighted sum of the box modes ``|p| <= cutoff`` sampled at spacing ``eps``.

    The modes are fixed by the box length alone, so every ``eps`` samples
    the same function exactly.
    """
    n_half = round(half_length / eps)
    n = np.arange(-n_half, n_half)
    x = n * eps
    j_max = int(cutoff * half_length / np.pi)
    p = np.pi * np.arange(-j_max, j_max + 1) / half_length
    weights = np.exp(-0.5 * (p * width) ** 2)
    field = np.exp(1j * np.outer(x, p)) @ weights
    spinor = np.array([1.0, 0.5j]) / math.sqrt(1.25)
    state = SpinorLattice(int(n[0]), int(n[-1]), spinor[0] * field, spinor[1] * field, eps)
    return state.normalized()


def trotter_convergence(
    mass: float,
    momentum_cutoff: float,
    t: float,
    epsilons: Sequence[float],
    half_length: float = 16.0,
    width: float = 1.0,
) -> list[float]:
    """L2 distance between the walk with ``theta = mass * eps`` and exact Dirac evolution.

    ``t / eps`` is rounded to a whole number of steps and the Dirac side is
    evaluated at ``steps * eps`` so both sides describe the same instant.
    """
    errors = []
    for eps in epsilons:
        theta = mass * eps
        if not theta < math.pi / 2:
            raise ValueError(f"mass * eps = {theta} must stay below pi/2")
        if momentum_cutoff >= math.pi / eps:
            raise ValueError("momentum cutoff must lie below the grid Nyquist momentum")
        state = _band_limited_state(eps, half_length, momentum_cutoff, width)
        steps = round(t / eps)
        walked = dtqw_evolve(state, theta, steps, check=False)
        exact = dirac_evolve(state, mass, steps * eps, check=False)
        diff = np.abs(walked.up - exact.up) ** 2 + np.abs(walked.down - exact.down) ** 2
        errors.append(float(np.sqrt(np.sum(diff) * eps)))
    return errors
