"""
Densities, moments, spreading fits, light-cone leakage and spinor entanglement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .dispersion import DTQW, Dirac, DispersionModel
from .errors import DegenerateFit, NonHermitian
from .numerics import DEFAULT_SPEC, QuadratureSpec
from .walks import ScalarLattice, SpinorLattice

__all__ = [
    "DensityProfile",
    "MomentSummary",
    "SpreadingFit",
    "density",
    "moments",
    "velocity_variance",
    "spreading_fit",
    "lightcone_leakage",
    "reduced_spinor_matrix",
    "spinor_entropy",
    "entropy_vs_localization",
    "dirac_entropy_grid",
]

Lattice = Union[SpinorLattice, ScalarLattice]


@dataclass(frozen=True)
class DensityProfile:
    positions: np.ndarray
    rho: np.ndarray
    weight: float = 1.0

    @property
    def norm(self) -> float:
        return float(np.sum(self.rho) * self.weight)


@dataclass(frozen=True)
class MomentSummary:
    norm: float
    mean: float
    variance: float


@dataclass(frozen=True)
class SpreadingFit:
    intercept: float
    slope: float
    r_squared: float


def density(state: Lattice) -> DensityProfile:
    if isinstance(state, SpinorLattice):
        rho = np.abs(state.up) ** 2 + np.abs(state.down) ** 2
    else:
        rho = np.abs(state.amp) ** 2
    return DensityProfile(state.positions.astype(float), rho, float(state.spacing))


def moments(profile: DensityProfile) -> MomentSummary:
    norm = profile.norm
    if not norm > 0:
        raise ValueError("profile has no probability mass")
    w = profile.rho * profile.weight / norm
    mean = float(np.sum(w * profile.positions))
    variance = float(np.sum(w * (profile.positions - mean) ** 2))
    return MomentSummary(norm, mean, max(variance, 0.0))


def velocity_variance(state: Lattice, model: DispersionModel) -> float:
    """Variance of the group velocity under the state's momentum distribution.

    Only meaningful for single-band packets, where each momentum carries one
    group velocity.
    """
    if isinstance(state, SpinorLattice):
        weight = np.abs(np.fft.fft(state.up)) ** 2 + np.abs(np.fft.fft(state.down)) ** 2
    else:
        weight = np.abs(np.fft.fft(state.amp)) ** 2
    k = 2.0 * np.pi * np.fft.fftfreq(state.width, d=state.spacing)
    v = model.group_velocity(k)
    weight = weight / weight.sum()
    mean = np.sum(weight * v)
    return float(np.sum(weight * (v - mean) ** 2))


def spreading_fit(times, variances) -> SpreadingFit:
    """Least-squares line through ``variance`` versus ``t^2``.

    The intercept estimates the initial position variance and the slope the
    group-velocity variance.
    """
    t2 = np.asarray(times, float) ** 2
    var = np.asarray(variances, float)
    if t2.size < 3 or t2.size != var.size:
        raise ValueError("need at least three (time, variance) pairs of equal length")
    if np.ptp(t2) == 0:
        raise DegenerateFit("all sample times have the same square")
    slope, intercept = np.polyfit(t2, var, 1)
    resid = var - (intercept + slope * t2)
    ss_tot = float(np.sum((var - var.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return SpreadingFit(float(intercept), float(slope), r2)


def lightcone_leakage(profile: DensityProfile, speed: float, t: float, buffer: float) -> float:
    """Probability found beyond ``|x| > speed * t + buffer``."""
    if buffer < 0:
        raise ValueError("buffer must be non-negative")
    outside = np.abs(profile.positions) > speed * t + buffer
    return float(np.sum(profile.rho[outside]) * profile.weight)


def reduced_spinor_matrix(state: SpinorLattice) -> np.ndarray:
    """Partial trace over position: ``sum_n psi(n) psi(n)^dagger * spacing``."""
    psi = np.stack([state.up, state.down])
    return psi @ psi.conj().T * state.spacing


def spinor_entropy(state: SpinorLattice, hermitian_tol: float = 1e-10) -> float:
    """Von Neumann entropy of the reduced coin state, in ebits."""
    rho = reduced_spinor_matrix(state)
    if np.max(np.abs(rho - rho.conj().T)) > hermitian_tol:
        raise NonHermitian(f"reduced spinor matrix is not Hermitian:\n{rho}")
    rho = rho / np.trace(rho).real
    a, d = rho[0, 0].real, rho[1, 1].real
    gap = math.hypot(0.5 * (a - d), abs(rho[0, 1]))
    evals = np.array([0.5 * (a + d) + gap, 0.5 * (a + d) - gap])
    if evals.min() < -1e-12:
        raise NonHermitian(f"reduced spinor matrix has negative eigenvalue {evals.min():.3e}")
    evals = np.clip(evals, 0.0, 1.0)
    nz = evals[evals > 0]
    return float(max(0.0, -np.sum(nz * np.log2(nz))))


def dirac_entropy_grid(mass: float, a: float, t: float = 0.0) -> tuple[float, float]:
    """Grid spacing and half-length for sampling a Dirac packet.

    The spacing resolves the branch points at ``x = +/- i a`` (trapezoid error
    ``~exp(-2 pi a / h)``) and the light-cone structure; the half-length puts
    the exponential tail mass below ``1e-10``.
    """
    spacing = min(2.0 * math.pi * a / 40.0, 0.25 / mass)
    if t:
        # local wavenumbers near the fronts reach the spectral cutoff ~ 32 / a
        spacing = min(spacing, math.pi * a / 40.0)
    tail = 13.0 / mass
    half = math.sqrt((a + tail) ** 2 - a**2) + abs(t)
    return spacing, half


def entropy_vs_localization(
    model: Union[Dirac, DTQW],
    a_values,
    spec: QuadratureSpec = DEFAULT_SPEC,
    half_width: int = 256,
) -> np.ndarray:
    """Spinor entropy of the initial packet for each localization ``a``.

    Walk packets use ``alpha = a * tan(theta)``. Returns an ``(len(a), 2)``
    array of ``(a, entropy)`` rows.
    """
    from .wavepackets import DiracPacketParams, DTQWPacketParams, dirac_profile, dtqw_profile

    a_values = np.asarray(a_values, float)
    if np.any(a_values <= 0) or np.any(np.diff(a_values) <= 0):
        raise ValueError("a values must be positive and strictly ascending")
    rows = []
    for a in a_values:
        if isinstance(model, Dirac):
            spacing, half = dirac_entropy_grid(model.mass, a)
            state = dirac_profile(0.0, DiracPacketParams(model.mass, a), spacing, half, spec)
        elif isinstance(model, DTQW):
            params = DTQWPacketParams(model.theta, a * math.tan(model.theta))
            state = dtqw_profile(0, params, half_width, spec=spec)
        else:
            raise TypeError(f"entropy scan supports Dirac and DTQW models, got {model!r}")
        rows.append((a, spinor_entropy(state)))
    return np.array(rows)
