"""
Closed-form positive-frequency wave packets and their quadrature oracles.

Three families:

* Dirac packets, built from ``K_0`` and ``K_1`` of complex argument;
* discrete-time walk packets, built from the lattice integrals ``I_n(z)``
  (exact) or from their Bessel approximation ``e^{i pi (n - z)/2} J_n(z cos theta)``;
* continuous-time walk packets, built from ``J_n`` of complex argument.

Every closed form has an independent oracle that integrates the defining
Fourier representation directly, including its own normalization integral.

Scaling
-------
The localization exponentials ``exp(-alpha w)`` make raw amplitudes and
normalization constants span dozens of orders of magnitude, which would
defeat the absolute quadrature tolerance. Lattice integrals are therefore
computed in the rescaled form ``exp(i phi z) I_n(z)`` with ``phi`` the bottom
of the band, and the Dirac Bessel functions as ``exp(z) K_nu(z)``. The
exponential factors cancel analytically between amplitude and normalization.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .dispersion import CTQW, DTQW, Dirac
from .errors import DomainError, NormalizationError
from .numerics import (
    DEFAULT_SPEC,
    QuadratureSpec,
    bessel_j,
    bessel_k,
    interval_quadrature,
    oscillation_points,
    periodic_quadrature,
)
from .walks import ScalarLattice, SpinorLattice

__all__ = [
    "DiracPacketParams",
    "DTQWPacketParams",
    "CTQWPacketParams",
    "dirac_normalization",
    "dirac_packet",
    "dirac_packet_oracle",
    "dirac_profile",
    "In_function",
    "dtqw_normalization",
    "dtqw_normalization_bracket",
    "dtqw_packet",
    "dtqw_packet_bessel",
    "dtqw_packet_oracle",
    "dtqw_profile",
    "ctqw_normalization",
    "ctqw_packet",
    "ctqw_packet_oracle",
    "ctqw_profile",
]

_SQRT2 = math.sqrt(2.0)
_I_POWERS = np.array([1.0, 1j, -1.0, -1j])
# spectral tails below this fraction of the peak are dropped by the oracles
_TAIL = 1e-14


@dataclass(frozen=True)
class DiracPacketParams:
    mass: float
    a: float

    def __post_init__(self):
        if not (self.mass > 0 and self.a > 0):
            raise ValueError(f"need mass > 0 and a > 0, got mass={self.mass}, a={self.a}")

    @property
    def model(self) -> Dirac:
        return Dirac(self.mass)


@dataclass(frozen=True)
class DTQWPacketParams:
    """Walk packet with coin angle ``theta`` and lattice localization ``alpha``.

    Construction evaluates the normalization bracket once and fails with
    ``NormalizationError`` if it is not a positive real number.
    """

    theta: float
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.theta < math.pi / 2:
            raise ValueError(f"need 0 < theta < pi/2, got {self.theta}")
        if not self.alpha > 0:
            raise ValueError(f"need alpha > 0, got {self.alpha}")
        _dtqw_bracket_scaled(self, "exact", DEFAULT_SPEC)

    @property
    def model(self) -> DTQW:
        return DTQW(self.theta)


@dataclass(frozen=True)
class CTQWPacketParams:
    gamma: float
    alpha: float

    def __post_init__(self):
        if not (self.gamma > 0 and self.alpha > 0):
            raise ValueError(f"need gamma > 0 and alpha > 0, got {self.gamma}, {self.alpha}")
        j0 = bessel_j(0, -4j * self.gamma * self.alpha)
        if not (j0.real > 0 and abs(j0.imag) <= 1e-10 * j0.real):
            raise NormalizationError(f"J_0(-4i gamma alpha) = {j0} is not real positive")

    @property
    def model(self) -> CTQW:
        return CTQW(self.gamma)


# ---------------------------------------------------------------------------
# Dirac packets


def _dirac_norm_scaled(p: DiracPacketParams, spec: QuadratureSpec) -> float:
    # normalization times exp(-m a)
    z = 2.0 * p.mass * p.a
    bracket = bessel_k(1, z, spec, scaled=True) + bessel_k(0, z, spec, scaled=True)
    return math.sqrt(math.pi / (2.0 * p.mass)) / math.sqrt(bracket.real)


def dirac_normalization(p: DiracPacketParams, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Prefactor making the Dirac packet integrate to unit probability."""
    return _dirac_norm_scaled(p, spec) * math.exp(p.mass * p.a)


def dirac_packet(x, t, p: DiracPacketParams, spec: QuadratureSpec = DEFAULT_SPEC):
    """Closed-form Dirac spinor ``(up, down)`` at positions ``x`` and times ``t``.

    ``s`` is the principal root of ``x^2 + (a + i t)^2``; its real part is at
    least ``a``, so the ``K_nu(m s)`` arguments stay in the right half-plane.
    """
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    m, a = p.mass, p.a
    s = np.sqrt(x**2 + (a + 1j * t) ** 2)
    if not np.all(s.real > 0):
        raise DomainError("Dirac packet argument left the right half-plane")
    z = m * s
    k0 = bessel_k(0, z, spec, scaled=True)
    k1 = bessel_k(1, z, spec, scaled=True)
    # exp(m (a - s)) restores K_nu from the scaled values and the exp(m a) in the norm
    pre = m * _dirac_norm_scaled(p, spec) / (math.pi * _SQRT2) * np.exp(m * (a - s))
    up = pre * (k1 / s * (a + 1j * (t + x)) + k0)
    down = pre * (k1 / s * (a + 1j * (t - x)) + k0)
    return up, down


def _dirac_spectral_norm(p: DiracPacketParams, spec: QuadratureSpec) -> float:
    m, a = p.mass, p.a
    w_cut = m - math.log(_TAIL) / a
    p_cut = math.sqrt(w_cut**2 - m**2)

    def weight(q):
        w = np.hypot(q, m)
        # |P+ (1,1)/sqrt2|^2 = 2 (1 + m/w)
        return 2.0 * (1.0 + m / w) * np.exp(-2.0 * a * (w - m))

    total = interval_quadrature(weight, -p_cut, p_cut, spec)
    return 1.0 / math.sqrt(total / (2.0 * math.pi))


def dirac_packet_oracle(x, t, p: DiracPacketParams, spec: QuadratureSpec = DEFAULT_SPEC):
    """Momentum-space quadrature of the positive-energy Dirac packet.

    Applies ``I + (sigma_z p + sigma_x m) / w(p)`` to ``(1, 1)/sqrt(2)`` and
    integrates against ``exp(i p x - (a + i t) w(p))``. The normalization is
    computed from its own Parseval integral, not from the Bessel formula.
    """
    x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
    m, a = p.mass, p.a
    w_cut = m - math.log(_TAIL) / a
    p_cut = math.sqrt(w_cut**2 - m**2)
    xs = x[..., None]
    ts = t[..., None]

    def integrand(q):
        w = np.hypot(q, m)
        phase = np.exp(1j * q * xs - a * (w - m) - 1j * ts * w)
        up = (1.0 + (q + m) / w) * phase
        down = (1.0 + (m - q) / w) * phase
        return np.stack([up, down])

    reach = float(np.max(np.abs(x), initial=0.0) + np.max(np.abs(t), initial=0.0))
    points = int(2.0 * p_cut * (reach + 1.0) / math.pi)
    up, down = interval_quadrature(integrand, -p_cut, p_cut, spec, min_points=points)
    scale = _dirac_spectral_norm(p, spec) / (2.0 * math.pi * _SQRT2)
    return scale * up, scale * down


def dirac_profile(
    t: float,
    p: DiracPacketParams,
    spacing: float,
    half_length: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> SpinorLattice:
    """Closed-form packet sampled on the grid ``n * spacing``, ``|n * spacing| <= half_length``."""
    n_half = int(math.ceil(half_length / spacing))
    n = np.arange(-n_half, n_half + 1)
    up, down = dirac_packet(n * spacing, t, p, spec)
    return SpinorLattice(-n_half, n_half, up, down, spacing)


# ---------------------------------------------------------------------------
# Discrete-time walk packets


def _scaled_I(n, z, theta: float, spec: QuadratureSpec):
    """``exp(i theta z) I_n(z)``: band bottom removed so magnitudes stay <= 1 for im(z) <= 0."""
    n = np.asarray(n)
    z = np.asarray(z, dtype=complex)
    n, z = np.broadcast_arrays(n, z)
    order = n[..., None]
    arg = z[..., None]
    cos_theta = math.cos(theta)

    def integrand(k):
        shifted = np.arccos(cos_theta * np.cos(k)) - theta
        return np.exp(1j * order * k - 1j * shifted * arg)

    return periodic_quadrature(integrand, spec, oscillation_points(spec, n, z))


def _scaled_I_bessel(n, z, theta: float, spec: QuadratureSpec):
    """``exp(i pi z / 2)`` times the Bessel approximation of ``I_n(z)``."""
    n = np.asarray(n)
    return _I_POWERS[n % 4] * bessel_j(n, np.asarray(z, complex) * math.cos(theta), spec)


_VARIANTS = {
    # variant -> (scaled lattice integral, band phase used for scaling)
    "exact": (_scaled_I, None),
    "bessel": (_scaled_I_bessel, math.pi / 2),
}


def _variant(name: str, theta: float):
    try:
        func, phase = _VARIANTS[name]
    except KeyError:
        raise ValueError(f"unknown packet variant {name!r}; use 'exact' or 'bessel'") from None
    return func, theta if phase is None else phase


def In_function(n, z, theta: float, spec: QuadratureSpec = DEFAULT_SPEC, scaled: bool = False):
    """Lattice integral ``I_n(z) = (2 pi)^-1 int exp(i k n - i w(k) z) dk`` for the walk dispersion.

    With ``scaled=True`` returns ``exp(i theta z) I_n(z)`` instead.
    """
    value = _scaled_I(n, z, theta, spec)
    if scaled:
        return value
    return value * np.exp(-1j * theta * np.asarray(z, complex))


def _dtqw_bracket_scaled(p: DTQWPacketParams, variant: str, spec: QuadratureSpec) -> float:
    func, phi = _variant(variant, p.theta)
    alpha, theta = p.alpha, p.theta
    vals = func(np.array([0, 1, 1]), np.array([-2j * alpha, -1 - 2j * alpha, 1 - 2j * alpha]), theta, spec)
    turn = cmath.exp(1j * (theta + phi))
    bracket = 2.0 * vals[0] - turn * vals[1] - vals[2] / turn
    if bracket.real <= 0:
        raise NormalizationError(f"normalization bracket {bracket} is not positive")
    if abs(bracket.imag) > 1e-10 * abs(bracket.real):
        raise NormalizationError(f"normalization bracket {bracket} is not real")
    return bracket.real


def dtqw_normalization_bracket(
    p: DTQWPacketParams, variant: str = "exact", spec: QuadratureSpec = DEFAULT_SPEC
) -> complex:
    """The unscaled bracket ``2 I_0(-2i alpha) - e^{i theta} I_1(-1-2i alpha) - e^{-i theta} I_1(1-2i alpha)``.

    Returned as a complex number without the realness check so callers can
    inspect the imaginary residue.
    """
    func, phi = _variant(variant, p.theta)
    alpha, theta = p.alpha, p.theta
    z = np.array([-2j * alpha, -1 - 2j * alpha, 1 - 2j * alpha])
    vals = func(np.array([0, 1, 1]), z, theta, spec) * np.exp(-1j * phi * z)
    return complex(2.0 * vals[0] - cmath.exp(1j * theta) * vals[1] - cmath.exp(-1j * theta) * vals[2])


def dtqw_normalization(p: DTQWPacketParams, variant: str = "exact", spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    _, phi = _variant(variant, p.theta)
    return math.exp(p.alpha * phi) / math.sqrt(_dtqw_bracket_scaled(p, variant, spec))


def _check_tau(tau) -> int:
    if int(tau) != tau or tau < 0:
        raise ValueError(f"walk time must be a non-negative integer, got {tau}")
    return int(tau)


def _dtqw_closed_form(n, tau, p: DTQWPacketParams, variant: str, spec: QuadratureSpec):
    tau = _check_tau(tau)
    func, phi = _variant(variant, p.theta)
    theta, alpha = p.theta, p.alpha
    n = np.asarray(n, dtype=np.int64)
    norm = 1.0 / math.sqrt(_dtqw_bracket_scaled(p, variant, spec))
    orders = np.concatenate([n.ravel(), n.ravel() - 1, n.ravel() + 1])
    args = np.concatenate(
        [np.full(n.size, tau - 1 - 1j * alpha), np.full(2 * n.size, tau - 1j * alpha)]
    )
    same, left, right = np.split(np.asarray(func(orders, args, theta, spec)), 3)
    pre = norm / _SQRT2 * cmath.exp(-1j * phi * tau)
    lead = cmath.exp(1j * phi) * same
    coin = cmath.exp(-1j * theta)
    up = pre * (lead - coin * left)
    down = pre * (lead - coin * right)
    return up.reshape(n.shape), down.reshape(n.shape)


def dtqw_packet(n, tau: int, p: DTQWPacketParams, spec: QuadratureSpec = DEFAULT_SPEC):
    """Exact walk packet ``(up, down)`` at sites ``n`` after ``tau`` steps, one quadrature per ``I_n``."""
    return _dtqw_closed_form(n, tau, p, "exact", spec)


def dtqw_packet_bessel(n, tau: int, p: DTQWPacketParams, spec: QuadratureSpec = DEFAULT_SPEC):
    """Walk packet with every ``I_n`` (normalization included) replaced by its Bessel approximation."""
    return _dtqw_closed_form(n, tau, p, "bessel", spec)


def _coin_matrix(k, theta: float):
    """Momentum-space walk operator, shape ``(2, 2, len(k))``."""
    c, s = math.cos(theta), math.sin(theta)
    em, ep = np.exp(-1j * k), np.exp(1j * k)
    return np.array([[em * c, -1j * em * s], [-1j * ep * s, ep * c]])


def _projected_spinor(k, theta: float):
    """``(e^{i w} - U(k)) (1, 1)/sqrt(2)`` as an array of shape ``(2, len(k))``."""
    w = np.arccos(math.cos(theta) * np.cos(k))
    u = _coin_matrix(k, theta)
    v = np.full((2, k.size), 1.0 / _SQRT2)
    return np.exp(1j * w) * v - np.einsum("ijk,jk->ik", u, v)


def dtqw_packet_oracle(n, tau: int, p: DTQWPacketParams, spec: QuadratureSpec = DEFAULT_SPEC):
    """Direct quadrature of the projected walk packet with the explicit 2x2 ``U(k)``.

    The normalization comes from the Parseval integral of the projected
    spinor, independent of the closed-form bracket.
    """
    tau = _check_tau(tau)
    theta, alpha = p.theta, p.alpha
    n = np.asarray(n, dtype=np.int64)
    sites = n.ravel()[:, None]

    def norm_integrand(k):
        w = np.arccos(math.cos(theta) * np.cos(k))
        chi = _projected_spinor(k, theta)
        return np.sum(np.abs(chi) ** 2, axis=0) * np.exp(-2.0 * alpha * (w - theta))

    norm = 1.0 / math.sqrt(periodic_quadrature(norm_integrand, spec).real)

    def integrand(k):
        w = np.arccos(math.cos(theta) * np.cos(k))
        chi = _projected_spinor(k, theta)
        phase = np.exp(1j * sites * k - alpha * (w - theta) - 1j * tau * w)
        return chi[:, None, :] * phase[None, :, :]

    points = oscillation_points(spec, n, tau + 1j * alpha)
    up, down = periodic_quadrature(integrand, spec, points) * norm
    return up.reshape(n.shape), down.reshape(n.shape)


def _fft_size(width: int, oversample: int) -> int:
    return 1 << max(0, (oversample * width - 1).bit_length())


def dtqw_profile(
    tau: int,
    p: DTQWPacketParams,
    half_width: int,
    variant: str = "exact",
    oversample: int = 4,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> SpinorLattice:
    """Walk packet on sites ``-half_width..half_width`` from a single inverse FFT.

    The spectrum is sampled on ``M >= oversample * width`` points; ``M`` is a
    power of two. ``variant='bessel'`` uses the cosine band
    ``pi/2 - cos(theta) cos k`` behind the Bessel approximation.
    """
    tau = _check_tau(tau)
    _, phi = _variant(variant, p.theta)
    theta, alpha = p.theta, p.alpha
    width = 2 * half_width + 1
    size = _fft_size(width, oversample)
    k = 2.0 * np.pi * np.arange(size) / size
    if variant == "exact":
        w = np.arccos(math.cos(theta) * np.cos(k))
    else:
        w = math.pi / 2 - math.cos(theta) * np.cos(k)
    u = _coin_matrix(k, theta)
    v = np.full((2, size), 1.0 / _SQRT2)
    chi = np.exp(1j * w) * v - np.einsum("ijk,jk->ik", u, v)
    spectrum = chi * np.exp(-alpha * (w - phi) - 1j * tau * w)
    amps = np.fft.ifft(spectrum, axis=-1) / math.sqrt(_dtqw_bracket_scaled(p, variant, spec))
    idx = np.arange(-half_width, half_width + 1) % size
    return SpinorLattice(-half_width, half_width, amps[0, idx], amps[1, idx])


# ---------------------------------------------------------------------------
# Continuous-time walk packets


def ctqw_normalization(p: CTQWPacketParams, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    j0 = bessel_j(0, -4j * p.gamma * p.alpha, spec)
    return math.exp(2.0 * p.gamma * p.alpha) / math.sqrt(j0.real)


def ctqw_packet(n, t: float, p: CTQWPacketParams, spec: QuadratureSpec = DEFAULT_SPEC):
    """Closed form ``N exp(-2 gamma (alpha + i t)) i^n J_n(2 gamma (t - i alpha))``."""
    n = np.asarray(n, dtype=np.int64)
    g, alpha = p.gamma, p.alpha
    j0 = bessel_j(0, -4j * g * alpha, spec)
    # N exp(-2 gamma alpha) with the two exponentials cancelled
    pre = cmath.exp(-2j * g * t) / math.sqrt(j0.real)
    return pre * _I_POWERS[n % 4] * bessel_j(n, 2.0 * g * (t - 1j * alpha), spec)


def ctqw_packet_oracle(n, t: float, p: CTQWPacketParams, spec: QuadratureSpec = DEFAULT_SPEC):
    """Fourier-integral form of the continuous-time packet with its own Parseval normalization."""
    n = np.asarray(n, dtype=np.int64)
    g, alpha = p.gamma, p.alpha
    sites = n.ravel()[:, None]
    norm = periodic_quadrature(lambda k: np.exp(-4.0 * g * alpha * (1.0 - np.cos(k))), spec)
    points = oscillation_points(spec, n, 2.0 * g * (abs(t) + alpha))

    def integrand(k):
        w = 2.0 * g * (1.0 - np.cos(k))
        return np.exp(1j * sites * k - (alpha + 1j * t) * w)

    value = periodic_quadrature(integrand, spec, points) / math.sqrt(norm.real)
    return value.reshape(n.shape)


def ctqw_profile(
    t: float, p: CTQWPacketParams, half_width: int, oversample: int = 4
) -> ScalarLattice:
    """Continuous-time packet on ``-half_width..half_width`` from one inverse FFT."""
    width = 2 * half_width + 1
    size = _fft_size(width, oversample)
    k = 2.0 * np.pi * np.arange(size) / size
    w = 2.0 * p.gamma * (1.0 - np.cos(k))
    spectrum = np.exp(-(p.alpha + 1j * t) * w)
    amps = np.fft.ifft(spectrum)
    amps = amps / math.sqrt(np.mean(np.exp(-2.0 * p.alpha * w)))
    idx = np.arange(-half_width, half_width + 1) % size
    return ScalarLattice(-half_width, half_width, amps[idx])
