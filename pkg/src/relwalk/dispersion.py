"""
Dispersion relations of the four walk models.

Each model is a small frozen dataclass exposing ``omega(k)`` (the positive
frequency branch) and ``group_velocity(k)``; the module-level functions are
thin dispatchers kept for a functional call style.

    DTQW(theta)  cos w = cos(theta) cos k          c = cos(theta), m = tan(theta)
    Dirac(mass)  w = sqrt(p^2 + m^2)               c = 1
    CTQW(gamma)  w = 2 gamma (1 - cos k)           c = 2 gamma
    Hadamard     sin w = sin(k) / sqrt(2)          c = 1/sqrt(2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import Unsupported

__all__ = [
    "DTQW",
    "Dirac",
    "CTQW",
    "Hadamard",
    "DispersionModel",
    "omega",
    "group_velocity",
    "max_speed",
    "effective_mass",
    "compton_wavelength",
    "localization_correspondence",
]


@dataclass(frozen=True)
class DTQW:
    """Discrete-time walk with the coin ``exp(-i theta sigma_x)``."""

    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta < math.pi / 2:
            raise ValueError(f"DTQW needs 0 < theta < pi/2, got {self.theta}")

    def omega(self, k):
        return np.arccos(math.cos(self.theta) * np.cos(k))

    def group_velocity(self, k):
        c = math.cos(self.theta)
        # sin w = sqrt(1 - c^2 cos^2 k) >= sin(theta) > 0, so no zero division
        return c * np.sin(k) / np.sqrt(1.0 - (c * np.cos(k)) ** 2)

    def max_speed(self) -> float:
        return math.cos(self.theta)

    def effective_mass(self) -> float:
        return math.tan(self.theta)


@dataclass(frozen=True)
class Dirac:
    """Free 1D Dirac particle in units with hbar = c = 1."""

    mass: float

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"Dirac needs mass > 0, got {self.mass}")

    def omega(self, p):
        return np.hypot(p, self.mass)

    def group_velocity(self, p):
        return p / np.hypot(p, self.mass)

    def max_speed(self) -> float:
        return 1.0

    def effective_mass(self) -> float:
        return self.mass


@dataclass(frozen=True)
class CTQW:
    """Continuous-time walk on the line with hopping rate ``gamma``."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"CTQW needs gamma > 0, got {self.gamma}")

    def omega(self, k):
        return 2.0 * self.gamma * (1.0 - np.cos(k))

    def group_velocity(self, k):
        return 2.0 * self.gamma * np.sin(k)

    def max_speed(self) -> float:
        return 2.0 * self.gamma

    def effective_mass(self) -> float:
        raise Unsupported("effective mass is only defined for the DTQW and Dirac models")


@dataclass(frozen=True)
class Hadamard:
    """Hadamard-coin walk; dispersion only, no simulator path."""

    def omega(self, k):
        return np.arcsin(np.sin(k) / math.sqrt(2.0))

    def group_velocity(self, k):
        return np.cos(k) / np.sqrt(2.0 - np.sin(k) ** 2)

    def max_speed(self) -> float:
        return 1.0 / math.sqrt(2.0)

    def effective_mass(self) -> float:
        # cubic small-k expansion, no quadratic term to read a mass from
        raise Unsupported("the Hadamard walk has no nonrelativistic effective mass")


DispersionModel = Union[DTQW, Dirac, CTQW, Hadamard]


def omega(model: DispersionModel, k):
    return model.omega(k)


def group_velocity(model: DispersionModel, k):
    return model.group_velocity(k)


def max_speed(model: DispersionModel) -> float:
    return model.max_speed()


def effective_mass(model: DispersionModel) -> float:
    """Inverse curvature of the dispersion at ``k = 0``."""
    return model.effective_mass()


def compton_wavelength(model: DispersionModel) -> float:
    """``1 / (m c)``; equals ``1 / sin(theta)`` for the DTQW."""
    return 1.0 / (model.effective_mass() * model.max_speed())


def localization_correspondence(theta: float, alpha: float) -> float:
    """Continuum localization ``a`` matching a lattice packet with parameter ``alpha``."""
    if not 0.0 < theta < math.pi / 2:
        raise ValueError(f"need 0 < theta < pi/2, got {theta}")
    return alpha / math.tan(theta)
