"""
Quadrature and Bessel-function evaluators.

Everything here is built on the uniform trapezoid rule with point doubling.
For smooth periodic integrands (and for smooth integrands whose tails are
negligible at the ends of the interval) the trapezoid rule converges
geometrically, so a simple "stop when two refinements agree" test is
reliable and the node placement is fully deterministic.

All evaluators broadcast over their array arguments; scalar inputs give
scalar outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceFailure, DomainError

__all__ = [
    "QuadratureSpec",
    "DEFAULT_SPEC",
    "periodic_quadrature",
    "interval_quadrature",
    "oscillation_points",
    "bessel_j",
    "bessel_k",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and refinement budget for the doubling trapezoid rules."""

    abs_tol: float = 1e-10
    max_doublings: int = 20
    initial_points: int = 64

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        n = self.initial_points
        if n < 8 or n & (n - 1):
            raise ValueError(f"initial_points must be a power of two >= 8, got {n}")
        if self.max_doublings < 1:
            raise ValueError("max_doublings must be at least 1")


DEFAULT_SPEC = QuadratureSpec()


def oscillation_points(spec: QuadratureSpec, order, argument) -> int:
    """Starting node count for an integrand with phase ``n k - w(k) z``.

    The phase winds O(|n| + |z|) times over one period, so refinement starts
    near the Nyquist requirement instead of wasting doublings below it.
    """
    n_max = float(np.max(np.abs(order))) if np.size(order) else 0.0
    z_max = float(np.max(np.abs(argument))) if np.size(argument) else 0.0
    return spec.initial_points * math.ceil((n_max + z_max + 16.0) / 16.0)


def _finish(value):
    return value[()] if isinstance(value, np.ndarray) and value.ndim == 0 else value


# node-batch elements evaluated per call; bounds memory for large batches
_CHUNK_ELEMENTS = 1 << 22
# refinements whose change is within this many ulps of the integrand scale are roundoff
_ROUNDOFF_ULPS = 1e3


def _sums(f, nodes):
    """``sum f(nodes)`` and ``sum |f(nodes)|`` along the last axis, evaluated in chunks."""
    first = f(nodes[:1])
    batch = max(1, first.size)
    step = max(1, _CHUNK_ELEMENTS // batch)
    total = np.zeros(first.shape[:-1], dtype=first.dtype)
    size = np.zeros(first.shape[:-1])
    for start in range(0, nodes.size, step):
        vals = f(nodes[start : start + step])
        total = total + np.sum(vals, axis=-1)
        size = size + np.sum(np.abs(vals), axis=-1)
    return total, size


def _at_roundoff_floor(change, magnitude) -> bool:
    """True once every unconverged batch member changes only at roundoff level."""
    return bool(np.all(change <= _ROUNDOFF_ULPS * np.finfo(float).eps * magnitude))


def periodic_quadrature(
    f: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec = DEFAULT_SPEC,
    min_points: int | None = None,
):
    """Mean value ``(2 pi)^-1 * integral of f over [-pi, pi]``.

    ``f`` receives a 1-D array of nodes and returns values whose last axis
    runs over those nodes; any leading axes are treated as a batch and the
    tolerance must hold for every batch member. Refinement stops early with
    ``ConvergenceFailure`` once the estimate only moves by roundoff, since no
    amount of doubling can meet the tolerance from there.
    """
    n = spec.initial_points if min_points is None else max(spec.initial_points, int(min_points))
    total, size = _sums(f, -np.pi + 2.0 * np.pi * np.arange(n) / n)
    estimate = total / n
    for _ in range(spec.max_doublings):
        more, more_size = _sums(f, -np.pi + 2.0 * np.pi * (np.arange(n) + 0.5) / n)
        total, size = total + more, size + more_size
        n *= 2
        refined = total / n
        change = np.abs(refined - estimate)
        if np.all(change < spec.abs_tol):
            return _finish(refined)
        if _at_roundoff_floor(change, size / n):
            break
        estimate = refined
    err = float(np.max(np.abs(refined - estimate)))
    raise ConvergenceFailure(f"periodic trapezoid stalled at {n} points (last change {err:.3e})")


def interval_quadrature(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    min_points: int | None = None,
):
    """Trapezoid integral of ``f`` over ``[lo, hi]`` with point doubling.

    Intended for integrands that are negligible (or even-symmetric) at the
    endpoints, where the plain trapezoid rule is spectrally accurate.
    """
    n = spec.initial_points if min_points is None else max(spec.initial_points, int(min_points))
    width = hi - lo
    ends = f(np.array([lo, hi]))
    total, size = _sums(f, lo + width * np.arange(1, n) / n)
    total = total + 0.5 * (ends[..., 0] + ends[..., 1])
    size = size + 0.5 * (np.abs(ends[..., 0]) + np.abs(ends[..., 1]))
    estimate = total * width / n
    for _ in range(spec.max_doublings):
        more, more_size = _sums(f, lo + width * (np.arange(n) + 0.5) / n)
        total, size = total + more, size + more_size
        n *= 2
        refined = total * width / n
        change = np.abs(refined - estimate)
        if np.all(change < spec.abs_tol):
            return _finish(refined)
        if _at_roundoff_floor(change, size * abs(width) / n):
            break
        estimate = refined
    err = float(np.max(np.abs(refined - estimate)))
    raise ConvergenceFailure(f"interval trapezoid stalled at {n} points (last change {err:.3e})")


def bessel_j(n, z, spec: QuadratureSpec = DEFAULT_SPEC):
    """Bessel function of the first kind ``J_n(z)`` for integer order and complex argument.

    Evaluated from the integral representation
    ``J_n(z) = (2 pi)^-1 * int exp(i (n k - z sin k)) dk``.
    Negative orders use ``J_-n = (-1)^n J_n``.
    """
    n = np.asarray(n)
    if not np.issubdtype(n.dtype, np.integer):
        if not np.all(np.equal(np.mod(n, 1), 0)):
            raise DomainError("bessel_j only supports integer orders")
        n = n.astype(np.int64)
    z = np.asarray(z, dtype=complex)
    n, z = np.broadcast_arrays(n, z)
    order = np.abs(n)[..., None]
    arg = z[..., None]

    def integrand(k):
        return np.exp(1j * (order * k - arg * np.sin(k)))

    value = periodic_quadrature(integrand, spec, oscillation_points(spec, n, z))
    sign = np.where((n < 0) & (n % 2 == 1), -1.0, 1.0)
    return _finish(np.asarray(sign * value))


def bessel_k(nu: int, z, spec: QuadratureSpec = DEFAULT_SPEC, scaled: bool = False):
    """Modified Bessel function ``K_nu(z)`` for ``nu`` in {0, 1} and ``re(z) > 0``.

    Uses ``K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt``. The upper limit
    is placed where ``exp(-re(z) (cosh t - 1))`` falls below ``abs_tol * 1e-3``,
    which also bounds the unscaled tail by the same amount.

    With ``scaled=True`` returns ``exp(z) K_nu(z)``, which stays O(1) for
    large arguments where ``K_nu`` itself would fall below the absolute
    tolerance.
    """
    if nu not in (0, 1):
        raise DomainError(f"bessel_k supports nu in {{0, 1}}, got {nu}")
    z = np.asarray(z, dtype=complex)
    if not np.all(z.real > 0):
        raise DomainError("bessel_k requires re(z) > 0")
    decay = -math.log(spec.abs_tol * 1e-3)
    t_max = float(np.max(np.arccosh(1.0 + decay / z.real)))
    arg = z[..., None]

    def integrand(t):
        # 2 sinh^2(t/2) is cosh(t) - 1 without cancellation near t = 0
        return np.exp(-2.0 * arg * np.sinh(0.5 * t) ** 2) * np.cosh(nu * t)

    value = interval_quadrature(integrand, 0.0, t_max, spec)
    if not scaled:
        value = value * np.exp(-z)
    return _finish(np.asarray(value))
