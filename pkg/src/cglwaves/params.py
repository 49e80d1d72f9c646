"""Global physical parameters: the phase angles theta and gamma.

The evolution equation is  phi_t = e^{i theta} Lap phi + e^{i gamma} |phi|^alpha phi.
Both angles must lie strictly inside (-pi/2, pi/2), which makes cos(theta)
and cos(gamma) positive; every module relies on that.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

_HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class Params:
    theta: float
    gamma: float

    def __post_init__(self):
        for name, value in (("theta", self.theta), ("gamma", self.gamma)):
            if not (-_HALF_PI < value < _HALF_PI):
                raise ValueError(
                    f"{name} = {value!r} is outside the open interval (-pi/2, pi/2)"
                )
        assert math.cos(self.theta) > 0.0 and math.cos(self.gamma) > 0.0

    @property
    def phase_theta(self) -> complex:
        """e^{i theta}, the diffusion phase."""
        return cmath.exp(1j * self.theta)

    @property
    def phase_gamma(self) -> complex:
        """e^{i gamma}, the nonlinearity phase."""
        return cmath.exp(1j * self.gamma)

    @property
    def phase_delta(self) -> complex:
        """e^{i (gamma - theta)}, the relative phase in the rotated equation."""
        return cmath.exp(1j * (self.gamma - self.theta))

    @property
    def stationary(self) -> bool:
        """True when gamma == theta, the case with frequency zero."""
        return self.gamma == self.theta
