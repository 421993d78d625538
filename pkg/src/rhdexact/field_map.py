"""Map a scalar-field gradient to perfect-fluid variables.

Metric signature is (+, -, -, -) with c = 1.  Spatial coordinates are either
planar (x) or spherical (r, theta) with axial symmetry; the azimuthal
derivative is always zero.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .eos import Eos, energy_from_S, lagrangian_F


class FlowClass(str, enum.Enum):
    PHYSICAL = "Physical"
    TACHYONIC = "Tachyonic"
    INVALID = "Invalid"


@dataclass(frozen=True)
class FieldGradient:
    d_t: float
    d_r: float
    d_theta: float = 0.0
    t: float = 0.0
    r: float = 1.0
    theta: float = math.pi / 2

    def __post_init__(self):
        if np.any(np.asarray(self.d_theta) != 0) and not np.all(np.asarray(self.r) > 0):
            raise ValueError("angular gradient needs r > 0")


@dataclass(frozen=True)
class FluidState:
    eps: float
    p: float
    v_r: float
    v_theta: float
    cls: FlowClass
    S: float = float("nan")

    @property
    def physical(self) -> bool:
        return self.cls is FlowClass.PHYSICAL


def kinetic_scalar(g: FieldGradient):
    """S = (1/2) phi_{,a} phi^{,a}."""
    S = g.d_t**2 - g.d_r**2
    if np.any(np.asarray(g.d_theta) != 0):
        S = S - (g.d_theta / g.r) ** 2
    return 0.5 * S


def classify(S: float, eps: float) -> FlowClass:
    if eps > 0 and S > 0:
        return FlowClass.PHYSICAL
    if eps > 0 and S < 0:
        return FlowClass.TACHYONIC
    return FlowClass.INVALID


def map_to_fluid(g: FieldGradient, eos: Eos) -> FluidState:
    """Fluid state generated by the field gradient ``g`` for the given EOS.

    A spacelike gradient (S < 0) is read as the formal rescaled solution
    phi -> i phi: the EOS is evaluated at |S| and the velocity components are
    kept as plain gradient ratios, so |v| > 1 there.
    """
    S = float(kinetic_scalar(g))
    nan = float("nan")
    if S == 0:
        return FluidState(nan, nan, nan, nan, FlowClass.INVALID, S)
    s_abs = abs(S)
    p = float(lagrangian_F(eos, s_abs))
    eps = float(energy_from_S(eos, s_abs))
    if g.d_t == 0:
        return FluidState(eps, p, nan, nan, FlowClass.INVALID, S)
    v_r = -g.d_r / g.d_t
    v_theta = -g.d_theta / (g.r**2 * g.d_t) if g.d_theta != 0 else 0.0
    return FluidState(eps, p, v_r, v_theta, classify(S, eps), S)


def four_velocity(g: FieldGradient) -> tuple[float, float, float]:
    """Contravariant (u^t, u^r, u^theta) from u_a = sign(phi_t) phi_a / sqrt(2S).

    The sign is chosen so the flow is future directed.
    """
    S = kinetic_scalar(g)
    if not S > 0:
        raise ValueError("four-velocity needs a timelike gradient (S > 0)")
    k = math.copysign(1.0, g.d_t) / math.sqrt(2.0 * S)
    u_t = k * g.d_t
    u_r = -k * g.d_r
    u_theta = -k * g.d_theta / g.r**2 if g.d_theta != 0 else 0.0
    return u_t, u_r, u_theta


def norm_sq(u: tuple[float, float, float], r: float) -> float:
    """u^a u_a in the flat spherical (or planar, u_theta = 0) metric."""
    u_t, u_r, u_theta = u
    return u_t**2 - u_r**2 - (r * u_theta) ** 2
