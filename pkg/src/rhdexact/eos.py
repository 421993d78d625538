"""Barotropic equations of state and their scalar-field Lagrangians.

A one-parametric EOS p(eps) is generated by a Lagrangian F(S) of the kinetic
scalar S = (1/2) d_a phi d^a phi through

    p = F(S),    eps = 2 S F'(S) - F(S).

Four families are supported: stiff (p = eps), linear (p = kappa eps),
logarithmic and iterated-logarithmic.  All functions accept floats or numpy
arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

MAX_ITERLOG_ORDER = 20


class EosDomainError(ValueError):
    """Raised when an EOS is evaluated outside its parameter domain."""


@dataclass(frozen=True)
class Stiff:
    family = "stiff"


@dataclass(frozen=True)
class Linear:
    kappa: float
    family = "linear"

    def __post_init__(self):
        if not 0.0 < self.kappa < 1.0:
            raise ValueError(f"linear EOS needs 0 < kappa < 1, got {self.kappa}")

    @property
    def alpha(self) -> float:
        return (1.0 + self.kappa) / (2.0 * self.kappa)


@dataclass(frozen=True)
class LogEos:
    eps0: float = 1.0
    B: float = 0.0
    family = "log"

    def __post_init__(self):
        if not self.eps0 > 0:
            raise ValueError("eps0 must be positive")


@dataclass(frozen=True)
class IteratedLog:
    eps0: float = 1.0
    N: int = 1
    family = "iterlog"

    def __post_init__(self):
        if not self.eps0 > 0:
            raise ValueError("eps0 must be positive")
        if int(self.N) != self.N or not 1 <= self.N <= MAX_ITERLOG_ORDER:
            raise ValueError(f"N must be an integer in [1, {MAX_ITERLOG_ORDER}]")


Eos = Union[Stiff, Linear, LogEos, IteratedLog]


@dataclass(frozen=True)
class EosPoint:
    eps: float
    p: float
    cs2: float
    param_R: float = float("nan")


def _require_positive(S, what="S"):
    if np.any(np.asarray(S) <= 0):
        raise EosDomainError(f"{what} must be positive for this EOS")


def _poly_coeffs(N: int) -> list[int]:
    # coefficient of y**k in sum_m (-1)^m N!/(N-m)! y^(N-m), highest power first
    return [(-1) ** m * math.perm(N, m) for m in range(N + 1)]


def _horner(coeffs, y):
    acc = np.zeros_like(np.asarray(y, dtype=float)) + coeffs[0]
    for c in coeffs[1:]:
        acc = acc * y + c
    return acc


def iterlog_series(N: int, y):
    """P_N(y) = sum_{m=0}^N (-1)^m N!/(N-m)! y^(N-m), with P_N + P_N' = y^N."""
    return _horner(_poly_coeffs(N), y)


def lagrangian_F(eos: Eos, S):
    """Pressure as a function of the kinetic scalar, p = F(S)."""
    if isinstance(eos, Stiff):
        return S * 1.0
    _require_positive(S)
    if isinstance(eos, Linear):
        return np.power(S, eos.alpha)
    x = np.sqrt(2.0 * S)
    if isinstance(eos, LogEos):
        return eos.eps0 * x * (np.log(x) + eos.B)
    if isinstance(eos, IteratedLog):
        return eos.eps0 * x * iterlog_series(eos.N, np.log(x))
    raise TypeError(f"unknown EOS {eos!r}")


def lagrangian_dF(eos: Eos, S):
    """Analytic derivative F'(S)."""
    if isinstance(eos, Stiff):
        return np.ones_like(np.asarray(S, dtype=float)) if np.ndim(S) else 1.0
    _require_positive(S)
    if isinstance(eos, Linear):
        return eos.alpha * np.power(S, eos.alpha - 1.0)
    x = np.sqrt(2.0 * S)
    if isinstance(eos, LogEos):
        return eos.eps0 * (np.log(x) + eos.B + 1.0) / x
    if isinstance(eos, IteratedLog):
        return eos.eps0 * np.log(x) ** eos.N / x
    raise TypeError(f"unknown EOS {eos!r}")


def energy_from_S(eos: Eos, S):
    """Proper energy density eps = 2 S F'(S) - F(S), in closed form per family."""
    if isinstance(eos, Stiff):
        return S * 1.0
    _require_positive(S)
    if isinstance(eos, Linear):
        return np.power(S, eos.alpha) / eos.kappa
    x = np.sqrt(2.0 * S)
    if isinstance(eos, LogEos):
        return eos.eps0 * x
    if isinstance(eos, IteratedLog):
        y = np.log(x)
        return eos.eps0 * x * (y**eos.N - iterlog_series(eos.N, y))
    raise TypeError(f"unknown EOS {eos!r}")


def iterated_log_point(eps0: float, N: int, R) -> EosPoint:
    """Parametric point of the iterated-log EOS at R (R = sqrt(2 S))."""
    eos = IteratedLog(eps0, N)
    if np.any(np.asarray(R) <= 0):
        raise EosDomainError("R must be positive")
    y = np.log(R)
    p = eps0 * R * iterlog_series(N, y)
    # eps = -eps0 R sum_{m>=1}: drop the leading y^N term of the full series
    eps = eps0 * R * (y**eos.N - iterlog_series(N, y))
    return EosPoint(eps=eps, p=p, cs2=y / N, param_R=R)


def eos_point(eos: Eos, S) -> EosPoint:
    """EOS point reached at kinetic scalar S."""
    if isinstance(eos, IteratedLog):
        _require_positive(S)
        return iterated_log_point(eos.eps0, eos.N, np.sqrt(2.0 * S))
    eps = energy_from_S(eos, S)
    p = lagrangian_F(eos, S)
    pt = EosPoint(eps=eps, p=p, cs2=float("nan"))
    return EosPoint(eps=eps, p=p, cs2=sound_speed_sq(eos, pt))


def sound_speed_sq(eos: Eos, at: EosPoint):
    """c_s^2 = dp/deps at a point of the EOS curve."""
    if isinstance(eos, Stiff):
        return 1.0
    if isinstance(eos, Linear):
        return eos.kappa
    if isinstance(eos, LogEos):
        _require_positive(at.eps, "eps")
        return np.log(at.eps / eos.eps0) + eos.B + 1.0
    if isinstance(eos, IteratedLog):
        _require_positive(at.param_R, "R")
        return np.log(at.param_R) / eos.N
    raise TypeError(f"unknown EOS {eos!r}")


def physical_sound_speed(eos: Eos, at: EosPoint) -> bool:
    cs2 = sound_speed_sq(eos, at)
    return bool(0.0 <= cs2 <= 1.0)


def eos_to_dict(eos: Eos) -> dict:
    if isinstance(eos, Stiff):
        return {"family": "stiff"}
    if isinstance(eos, Linear):
        return {"family": "linear", "kappa": eos.kappa}
    if isinstance(eos, LogEos):
        return {"family": "log", "eps0": eos.eps0, "B": eos.B}
    return {"family": "iterlog", "eps0": eos.eps0, "N": eos.N}


def eos_from_dict(d: dict) -> Eos:
    family = d.get("family")
    if family == "stiff":
        return Stiff()
    if family == "linear":
        return Linear(float(d["kappa"]))
    if family == "log":
        return LogEos(float(d.get("eps0", 1.0)), float(d.get("B", 0.0)))
    if family == "iterlog":
        return IteratedLog(float(d.get("eps0", 1.0)), int(d["N"]))
    raise ValueError(f"unknown EOS family {family!r}")
