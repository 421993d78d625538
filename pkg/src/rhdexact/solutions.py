"""Catalog of closed-form potential flows of a relativistic perfect fluid.

Every entry is generated by a scalar field phi.  An entry evaluates phi, its
analytic gradient, the fluid state in closed form, and the predicate that
decides where the closed form is an admissible flow.  Coordinates are
``(t, x, theta)`` where ``x`` is the planar coordinate for planar entries and
the radius otherwise; ``theta`` only matters for axisymmetric entries.
"""
from __future__ import annotations

import enum
import math
from typing import Callable

import numpy as np
from scipy import integrate

from .eos import Eos, IteratedLog, Linear, LogEos, Stiff, iterated_log_point
from .field_map import FieldGradient, FlowClass, FluidState, classify, kinetic_scalar, map_to_fluid

HALF_PI = math.pi / 2
DEFAULT_BUFFER = 1e-8


class Symmetry(enum.Enum):
    PLANAR = 0
    CYLINDRICAL = 1
    SPHERICAL = 2
    AXISYMMETRIC = 3

    @property
    def n(self) -> int:
        return 2 if self is Symmetry.AXISYMMETRIC else self.value


_SYMMETRY_BY_N = {0: Symmetry.PLANAR, 1: Symmetry.CYLINDRICAL, 2: Symmetry.SPHERICAL}


def _symmetry(n) -> Symmetry:
    if n not in _SYMMETRY_BY_N:
        raise ValueError(f"symmetry index n must be 0, 1 or 2, got {n}")
    return _SYMMETRY_BY_N[n]


def _quad(f, a, b):
    val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


class ExactSolution:
    """Base class for catalog entries.

    Subclasses implement ``_phi``, ``_grad`` (returning ``(d_t, d_x, d_theta)``),
    ``_fluid`` (returning ``(eps, p, v_r, v_theta)``) and ``_domain``.
    """

    id = "exact"
    declared = FlowClass.PHYSICAL
    # singular sets: "cone" (t = |x|), "origin" (x = 0), "t0" (t = 0)
    singular: tuple[str, ...] = ("cone",)
    t_range = (1.0, 3.0)
    vacuum_t1: float | None = None

    def __init__(self, eos: Eos, symmetry: Symmetry, params: dict):
        self.eos = eos
        self.symmetry = symmetry
        self.params = dict(params)

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"<{self.id} {args}>"

    @property
    def n(self) -> int:
        return self.symmetry.n

    @property
    def axisymmetric(self) -> bool:
        return self.symmetry is Symmetry.AXISYMMETRIC

    # -- evaluation ----------------------------------------------------------
    def eval_field(self, t, x, theta=HALF_PI):
        return self._phi(t, x, theta)

    def eval_gradient(self, t, x, theta=HALF_PI) -> FieldGradient:
        d_t, d_x, d_th = self._grad(t, x, theta)
        return FieldGradient(d_t, d_x, d_th, t, x, theta)

    def eval_fluid(self, t, x, theta=HALF_PI) -> FluidState:
        eps, p, v_r, v_th = self._fluid(t, x, theta)
        S = float(kinetic_scalar(self.eval_gradient(t, x, theta)))
        return FluidState(float(eps), float(p), float(v_r), float(v_th), classify(S, eps), S)

    def in_domain(self, t, x, theta=HALF_PI, buffer=DEFAULT_BUFFER) -> bool:
        if self.distance_to_singular(t, x, theta) <= buffer * max(abs(t), abs(x), 1e-300):
            return False
        with np.errstate(all="ignore"):
            return bool(self._domain(t, x, theta))

    def guaranteed_domain(self, t, x, theta=HALF_PI) -> bool:
        """Sub-domain where admissibility is proven in closed form."""
        return self.in_domain(t, x, theta)

    # -- geometry helpers ----------------------------------------------------
    def distance_to_singular(self, t, x, theta=HALF_PI) -> float:
        d = math.inf
        if "cone" in self.singular:
            d = min(d, abs(t - abs(x)))
        if "origin" in self.singular:
            d = min(d, abs(x))
        if "t0" in self.singular:
            d = min(d, abs(t))
        if self.axisymmetric:
            d = min(d, abs(x) * min(abs(math.sin(theta)), 1.0))
        return d

    def length_scale(self, t, x, theta=HALF_PI) -> float:
        mag = max(abs(t), abs(x))
        return min(self.distance_to_singular(t, x, theta), mag if mag > 0 else 1.0)

    def x_range(self, t) -> tuple[float, float]:
        lo = -t if self.symmetry is Symmetry.PLANAR else 0.0
        return lo, t

    # -- subclass hooks --------------------------------------------------------
    def _phi(self, t, x, theta):
        raise NotImplementedError

    def _grad(self, t, x, theta):
        raise NotImplementedError

    def _fluid(self, t, x, theta):
        st = map_to_fluid(self.eval_gradient(t, x, theta), self.eos)
        return st.eps, st.p, st.v_r, st.v_theta

    def _domain(self, t, x, theta):
        return self.eval_fluid(t, x, theta).cls is self.declared


# ---------------------------------------------------------------------------
# Stiff EOS, plane symmetry
# ---------------------------------------------------------------------------


class PlaneGeneral(ExactSolution):
    """phi = psi(t - x) + chi(t + x) for the stiff EOS.

    ``psi``/``chi`` default to quadrature of the supplied derivatives from
    ``ref``.  ``region`` optionally restricts the domain to a coordinate
    region on top of the pointwise condition psi' chi' > 0.
    """

    id = "plane-general"
    singular = ()

    def __init__(self, psi_prime, chi_prime, psi=None, chi=None, *, ref=0.0, params=None,
                 declared=FlowClass.PHYSICAL, singular=None, region=None,
                 t_range=None, x_range=None):
        super().__init__(Stiff(), Symmetry.PLANAR, params or {})
        self.psi_prime = psi_prime
        self.chi_prime = chi_prime
        self.psi = psi or (lambda y: _quad(psi_prime, ref, y))
        self.chi = chi or (lambda y: _quad(chi_prime, ref, y))
        self.declared = declared
        self.region = region
        if singular is not None:
            self.singular = tuple(singular)
        if t_range is not None:
            self.t_range = t_range
        self._x_range = x_range

    def x_range(self, t):
        if self._x_range is not None:
            return self._x_range(t)
        return (-2.0 * abs(t), 2.0 * abs(t))

    def _phi(self, t, x, theta):
        return self.psi(t - x) + self.chi(t + x)

    def _grad(self, t, x, theta):
        a = self.psi_prime(t - x)
        b = self.chi_prime(t + x)
        return a + b, b - a, 0.0 * a

    def _fluid(self, t, x, theta):
        a = self.psi_prime(t - x)
        b = self.chi_prime(t + x)
        # |2 psi' chi'| is the formal energy density on tachyonic branches
        eps = abs(2.0 * a * b)
        return eps, eps, (a - b) / (a + b), 0.0

    def _domain(self, t, x, theta):
        if self.region is not None and not self.region(t, x):
            return False
        a = self.psi_prime(t - x)
        b = self.chi_prime(t + x)
        if a + b == 0:
            return False
        return (a * b > 0) if self.declared is FlowClass.PHYSICAL else (a * b < 0)


def plane_general(psi_prime: Callable, chi_prime: Callable, **kw) -> PlaneGeneral:
    return PlaneGeneral(psi_prime, chi_prime, **kw)


def _log_or_power(A, lam):
    if lam == -1:
        return lambda y: A * np.log(np.abs(y))
    return lambda y: A * y ** (lam + 1) / (lam + 1)


def plane_powerlaw(A=1.0, lam=-1.0, branch="inside") -> PlaneGeneral:
    """Plane power-law flows.

    ``inside``: psi' = chi' = A y^lam on |x| < t.
    ``outside``: chi'(y) = psi'(-y) = A y^lam on x > t > 0.
    ``tachyonic``: the inside choice continued to x > t > 0 (odd integer lam);
    the gradient is spacelike there and |v| > 1.
    """
    A, lam = float(A), float(lam)
    if A == 0 or lam == 0:
        raise ValueError("A and lam must be nonzero")
    params = {"A": A, "lam": lam, "branch": branch}
    if branch == "inside":
        pp = lambda y: A * y**lam
        prim = _log_or_power(A, lam)
        sol = PlaneGeneral(pp, pp, prim, prim, params=params, singular=("cone",),
                           region=lambda t, x: t > 0 and abs(x) < t,
                           x_range=lambda t: (-t, t))
        sol.id = "plane-powerlaw"
    elif branch == "outside":
        chi = _log_or_power(A, lam)
        sol = PlaneGeneral(lambda y: A * (-y) ** lam, lambda y: A * y**lam,
                           lambda y: -chi(-y), chi, params=params, singular=("cone", "t0"),
                           region=lambda t, x: x > t > 0, x_range=lambda t: (t, 3.0 * t))
        sol.id = "plane-outside"
    elif branch == "tachyonic":
        if not lam.is_integer() or int(lam) % 2 == 0:
            raise ValueError("tachyonic branch needs an odd integer lam")
        k = int(lam)
        pp = lambda y: A * y**k
        prim = _log_or_power(A, k)
        sol = PlaneGeneral(pp, pp, prim, prim, params=params, declared=FlowClass.TACHYONIC,
                           singular=("cone", "t0"), region=lambda t, x: x > t > 0,
                           x_range=lambda t: (t, 3.0 * t))
        sol.id = "plane-tachyonic"
    else:
        raise ValueError(f"unknown branch {branch!r}")
    return sol


def plane_scaling(A=1.0) -> PlaneGeneral:
    """Boost-invariant scaling flow v = x/t, eps = 2 A^2 / (t^2 - x^2)."""
    sol = plane_powerlaw(A, -1.0, "inside")
    sol.id = "plane-scaling"
    sol.params = {"A": float(A)}
    return sol


def plane_tachyonic(A=1.0) -> PlaneGeneral:
    sol = plane_powerlaw(A, -1.0, "tachyonic")
    sol.params = {"A": float(A)}
    return sol


def plane_exp(A=1.0, gamma=-0.5, m=2) -> PlaneGeneral:
    """chi'(y) = psi'(-y) = A exp(gamma y^m), regular for all t and x."""
    A, gamma, m = float(A), float(gamma), int(m)
    if A == 0 or m < 1:
        raise ValueError("need A != 0 and a positive integer m")
    sol = PlaneGeneral(lambda y: A * np.exp(gamma * (-y) ** m),
                       lambda y: A * np.exp(gamma * y**m),
                       params={"A": A, "gamma": gamma, "m": m},
                       t_range=(-1.5, 1.5), x_range=lambda t: (-2.0, 2.0))
    sol.id = "plane-exp"
    return sol


# ---------------------------------------------------------------------------
# Stiff EOS, spherical symmetry
# ---------------------------------------------------------------------------


class SphericalOutgoing(ExactSolution):
    """Outgoing wave phi = psi(t - r)/r with psi(a) = C1 a^-n - C2."""

    id = "spherical-outgoing"
    singular = ("cone", "origin")

    def __init__(self, C1=1.0, C2=0.1, n=1):
        C1, C2, n = float(C1), float(C2), int(n)
        if not (C1 > 0 and C2 > 0 and n >= 1):
            raise ValueError("need C1 > 0, C2 > 0 and integer n >= 1")
        super().__init__(Stiff(), Symmetry.SPHERICAL, {"C1": C1, "C2": C2, "n": n})
        self.C1, self.C2, self.k = C1, C2, n
        # psi(t1) = 0: light-like vacuum boundary t - r = t1
        self.vacuum_t1 = (C1 / C2) ** (1.0 / n)

    def psi(self, a):
        return self.C1 * a ** (-self.k) - self.C2

    def dpsi(self, a):
        return -self.k * self.C1 * a ** (-self.k - 1)

    def _phi(self, t, r, theta):
        return self.psi(t - r) / r

    def _grad(self, t, r, theta):
        a = t - r
        ps, dps = self.psi(a), self.dpsi(a)
        return dps / r, -dps / r - ps / r**2, 0.0 * r

    def _fluid(self, t, r, theta):
        a = t - r
        ps, dps = self.psi(a), self.dpsi(a)
        eps = -ps * (ps + 2.0 * r * dps) / (2.0 * r**4)
        return eps, eps, 1.0 + ps / (r * dps), 0.0

    def _domain(self, t, r, theta):
        if not t > r > 0:
            return False
        a = t - r
        ps = self.psi(a)
        return ps != 0 and 2.0 * self.dpsi(a) * r / ps < -1.0

    def guaranteed_domain(self, t, r, theta=HALF_PI):
        return t > r > t / (2 * self.k + 1) and self.psi(t - r) > 0


class SphericalStanding(ExactSolution):
    """Regular standing wave phi = [psi(t - r) - psi(t + r)]/r, psi(y) = -A y^-n."""

    singular = ("cone", "origin")

    def __init__(self, A=1.0, n=2):
        A, n = float(A), int(n)
        if not (A > 0 and n >= 1):
            raise ValueError("need A > 0 and integer n >= 1")
        super().__init__(Stiff(), Symmetry.SPHERICAL, {"A": A, "n": n})
        self.A, self.k = A, n
        self.id = f"standing-n{n}" if n <= 4 else "standing"

    def psi(self, y):
        return -self.A * y ** (-self.k)

    def dpsi(self, y):
        return self.k * self.A * y ** (-self.k - 1)

    def ddpsi(self, y):
        return -self.k * (self.k + 1) * self.A * y ** (-self.k - 2)

    def _phi(self, t, r, theta):
        if np.ndim(r) == 0 and r == 0:
            return -2.0 * self.dpsi(t)
        return (self.psi(t - r) - self.psi(t + r)) / r

    def _grad(self, t, r, theta):
        if np.ndim(r) == 0 and r == 0:
            # regular centre: phi is even in r
            return -2.0 * self.ddpsi(t), 0.0, 0.0
        a, b = t - r, t + r
        d_t = (self.dpsi(a) - self.dpsi(b)) / r
        d_r = -(self.dpsi(a) + self.dpsi(b)) / r - (self.psi(a) - self.psi(b)) / r**2
        return d_t, d_r, 0.0 * r

    def _fluid(self, t, r, theta):
        A, k = self.A, self.k
        tt, rr = t * t, r * r
        s = tt - rr
        if k == 1:
            eps, v = 8 * A**2 / s**3, r / t
        elif k == 2:
            eps, v = 8 * A**2 * (9 * tt - rr) / s**5, 4 * t * r / (3 * tt + rr)
        elif k == 3:
            eps = 32 * A**2 * (9 * tt**2 + 2 * tt * rr + rr**2) / s**7
            v = r * (5 * tt + rr) / (3 * t * (tt + rr))
        elif k == 4:
            num = 10 * tt**2 * (tt + rr) + 15 * tt * (tt**2 + tt * rr + rr**2) - rr**3
            eps = 32 * A**2 * num / s**9
            v = 2 * t * r * (3 * rr + 5 * tt) / (5 * tt**2 + 10 * tt * rr + rr**2)
        else:
            return super()._fluid(t, r, theta)
        return eps, eps, v, 0.0

    def _domain(self, t, r, theta):
        if not t > r > 0:
            return False
        return kinetic_scalar(self.eval_gradient(t, r, theta)) > 0

    def guaranteed_domain(self, t, r, theta=HALF_PI):
        return kappa_n(self.k) * t < r < t


def kappa_n(n: int) -> float:
    """Lower edge of the proven admissible strip kappa_n t < r < t for standing waves."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a = (2.0 * (n + 1)) ** (1.0 / n)
    return (a - 1.0) / (a + 1.0)


def spherical_outgoing(C1=1.0, C2=0.1, n=1) -> SphericalOutgoing:
    return SphericalOutgoing(C1, C2, n)


def spherical_standing(A=1.0, n=2) -> SphericalStanding:
    return SphericalStanding(A, n)


# ---------------------------------------------------------------------------
# Stiff EOS, axisymmetric multipoles
# ---------------------------------------------------------------------------


class MonopoleDipole(ExactSolution):
    """phi = A (t - b r cos(theta)) / (t^2 - r^2)^2."""

    id = "mondip"
    singular = ("cone", "origin")

    def __init__(self, A=1.0, b=0.5):
        A, b = float(A), float(b)
        if A == 0 or not abs(b) < 1:
            raise ValueError("need A != 0 and |b| < 1")
        super().__init__(Stiff(), Symmetry.AXISYMMETRIC, {"A": A, "b": b})
        self.A, self.b = A, b

    def _phi(self, t, r, theta):
        return self.A * (t - self.b * r * np.cos(theta)) / (t * t - r * r) ** 2

    def _grad(self, t, r, theta):
        A, b = self.A, self.b
        c, s = np.cos(theta), np.sin(theta)
        tau2 = t * t - r * r
        d_t = A * (4 * t * b * r * c - 3 * t * t - r * r) / tau2**3
        d_r = A * (4 * r * t - b * c * (t * t + 3 * r * r)) / tau2**3
        d_th = A * b * r * s / tau2**2
        return d_t, d_r, d_th

    def _fluid(self, t, r, theta):
        A, b = self.A, self.b
        c, s = np.cos(theta), np.sin(theta)
        tau2 = t * t - r * r
        eps = A**2 / (2 * tau2**5) * ((1 - b * b) * tau2 + 8 * (t - b * r * c) ** 2)
        den = 3 * t * t + r * r - 4 * t * r * b * c
        v_r = (4 * t * r - (3 * r * r + t * t) * b * c) / den
        v_th = tau2 * b * s / (r * den)
        return eps, eps, v_r, v_th

    def _domain(self, t, r, theta):
        return t > r > 0


class MonopoleQuadrupole(ExactSolution):
    """phi = A (3t^2 + r^2 + b r^2 P2(cos theta)) / (t^2 - r^2)^3."""

    id = "quadip"
    singular = ("cone", "origin")

    def __init__(self, A=1.0, b=0.5):
        A, b = float(A), float(b)
        if A == 0 or not abs(b) < 1:
            raise ValueError("need A != 0 and |b| < 1")
        super().__init__(Stiff(), Symmetry.AXISYMMETRIC, {"A": A, "b": b})
        self.A, self.b = A, b

    def _phi(self, t, r, theta):
        P2 = 1.5 * np.cos(theta) ** 2 - 0.5
        return self.A * (3 * t * t + r * r + self.b * r * r * P2) / (t * t - r * r) ** 3

    def _grad(self, t, r, theta):
        A, b = self.A, self.b
        c, s = np.cos(theta), np.sin(theta)
        P2 = 1.5 * c * c - 0.5
        tau2 = t * t - r * r
        num = 3 * t * t + r * r + b * r * r * P2
        d_t = 6 * A * t * (tau2 - num) / tau2**4
        d_r = A * (2 * r * (1 + b * P2) * tau2 + 6 * r * num) / tau2**4
        d_th = -3 * A * b * r * r * c * s / tau2**3
        return d_t, d_r, d_th

    def _fluid(self, t, r, theta):
        A, b = self.A, self.b
        c, s = np.cos(theta), np.sin(theta)
        P2 = 1.5 * c * c - 0.5
        tt, rr = t * t, r * r
        tau2 = tt - rr
        bracket = (144 * tt * tt + 16 * rr * (2 * tt + rr) * (1 + 2 * b * P2)
                   - 2 * rr * b * b * (P2 + 1) * tau2 + 12 * b * b * P2 * P2 * rr * rr)
        eps = A**2 / (2 * tau2**7) * bracket
        den = 2 * tt + 2 * rr + b * rr * P2
        v_r = r / (3 * t) * (10 * tt + 2 * rr + (tt + 2 * rr) * b * P2) / den
        v_th = -b / (2 * t) * tau2 * s * c / den
        return eps, eps, v_r, v_th

    def _domain(self, t, r, theta):
        return t > r > 0


def monopole_dipole(A=1.0, b=0.5) -> MonopoleDipole:
    return MonopoleDipole(A, b)


def monopole_quadrupole(A=1.0, b=0.5) -> MonopoleQuadrupole:
    return MonopoleQuadrupole(A, b)


# ---------------------------------------------------------------------------
# Flows depending on proper time tau = sqrt(t^2 - r^2) only (v = r/t)
# ---------------------------------------------------------------------------


class ProperTimeFlow(ExactSolution):
    """phi = phi(tau); subclasses give dphi/dtau and the closed-form fluid."""

    singular = ("cone",)

    def __init__(self, eos, n, params):
        super().__init__(eos, _symmetry(int(n)), params)
        if self.n >= 1:
            self.singular = ("cone", "origin")

    def dphi_dtau(self, tau):
        raise NotImplementedError

    def phi_of_tau(self, tau):
        return _quad(self.dphi_dtau, 1.0, tau)

    def _phi(self, t, x, theta):
        return self.phi_of_tau(math.sqrt(t * t - x * x))

    def _grad(self, t, x, theta):
        tau = np.sqrt(t * t - x * x)
        g = self.dphi_dtau(tau)
        return g * t / tau, -g * x / tau, 0.0 * tau

    def _inside(self, t, x):
        if self.n == 0:
            return t > abs(x)
        return t > x > 0


class LogEosFlow(ProperTimeFlow):
    """Scaling-velocity flow of the logarithmic EOS p = eps [ln(eps/eps0) + B]."""

    id = "log-flow"

    def __init__(self, eps0=1.0, B=0.0, C=1.0, n=2):
        eps0, B, C, n = float(eps0), float(B), float(C), int(n)
        if C < 0:
            raise ValueError("need C >= 0")
        super().__init__(LogEos(eps0, B), n, {"eps0": eps0, "B": B, "C": C, "n": n})
        self.C = C

    def dphi_dtau(self, tau):
        return np.exp(self.C / tau ** (1 + self.n) - self.eos.B - 1.0)

    def _fluid(self, t, x, theta):
        tau = np.sqrt(t * t - x * x)
        w = self.C / tau ** (1 + self.n)
        eps = self.eos.eps0 * np.exp(w - self.eos.B - 1.0)
        # p = eps [ln(eps/eps0) + B]
        return eps, eps * (w - 1.0), x / t, 0.0

    def _domain(self, t, x, theta):
        # c_s^2 = C / tau^(1+n) must lie in [0, 1]
        return self._inside(t, x) and (t * t - x * x) ** ((1 + self.n) / 2) >= self.C


class IteratedLogFlow(ProperTimeFlow):
    """Scaling-velocity flow of the iterated-logarithm EOS."""

    id = "iterlog-flow"

    def __init__(self, eps0=1.0, N=3, C=1.0, n=1):
        eps0, N, C, n = float(eps0), int(N), float(C), int(n)
        if C < 0:
            raise ValueError("need C >= 0")
        super().__init__(IteratedLog(eps0, N), n, {"eps0": eps0, "N": N, "C": C, "n": n})
        self.C = C

    def R_of_tau(self, tau):
        return np.exp(self.C * tau ** (-(1 + self.n) / self.eos.N))

    def dphi_dtau(self, tau):
        # R = sqrt(2S) = dphi/dtau
        return self.R_of_tau(tau)

    def _fluid(self, t, x, theta):
        pt = iterated_log_point(self.eos.eps0, self.eos.N, self.R_of_tau(np.sqrt(t * t - x * x)))
        return pt.eps, pt.p, x / t, 0.0

    def _domain(self, t, x, theta):
        if not self._inside(t, x):
            return False
        R = self.R_of_tau(math.sqrt(t * t - x * x))
        if not 1.0 <= R <= math.exp(self.eos.N):
            return False
        # even N: eps < 0 for ln R < 1, so the pointwise class is also required
        return self.eval_fluid(t, x, theta).cls is FlowClass.PHYSICAL


class LinearScaling(ProperTimeFlow):
    """eps = C / tau^((1 + kappa)(1 + n)), v = r/t for p = kappa eps."""

    id = "linear-scaling"

    def __init__(self, C=1.0, kappa=1 / 3, n=0):
        C, kappa, n = float(C), float(kappa), int(n)
        if not C > 0:
            raise ValueError("need C > 0")
        super().__init__(Linear(kappa), n, {"C": C, "kappa": kappa, "n": n})
        self.C = C
        self.expo = (1 + n) * kappa
        # dphi/dtau = K tau^-expo with (K^2/2)^alpha / kappa = C
        self.K = math.sqrt(2.0) * (kappa * C) ** (1.0 / (2.0 * self.eos.alpha))

    def dphi_dtau(self, tau):
        return self.K * tau ** (-self.expo)

    def phi_of_tau(self, tau):
        if abs(1.0 - self.expo) < 1e-14:
            return self.K * math.log(tau)
        return self.K * tau ** (1.0 - self.expo) / (1.0 - self.expo)

    def _fluid(self, t, x, theta):
        tau2 = t * t - x * x
        eps = self.C * tau2 ** (-0.5 * (1 + self.eos.kappa) * (1 + self.n))
        return eps, self.eos.kappa * eps, x / t, 0.0

    def _domain(self, t, x, theta):
        return self._inside(t, x)


def log_eos_flow(eps0=1.0, B=0.0, C=1.0, n=2) -> LogEosFlow:
    return LogEosFlow(eps0, B, C, n)


def iterated_log_flow(eps0=1.0, N=3, C=1.0, n=1) -> IteratedLogFlow:
    return IteratedLogFlow(eps0, N, C, n)


def linear_scaling(C=1.0, kappa=1 / 3, n=0) -> LinearScaling:
    return LinearScaling(C, kappa, n)


# ---------------------------------------------------------------------------
# Linear EOS, self-similar flow outside the light cone
# ---------------------------------------------------------------------------


class LinearSelfSimilar(ExactSolution):
    """phi = phi(xi), xi = r/t > 1, for p = kappa eps; v = t/r."""

    id = "selfsimilar"
    singular = ("cone", "t0", "origin")
    t_range = (0.5, 2.0)
    XI_REF = 2.0

    def __init__(self, C=1.0, kappa=0.6, n=2):
        C, kappa, n = float(C), float(kappa), int(n)
        if C == 0:
            raise ValueError("need C != 0")
        super().__init__(Linear(kappa), _symmetry(n), {"C": C, "kappa": kappa, "n": n})
        self.C = C
        if self.n == 0:
            self.singular = ("cone", "t0")
        nk = n * kappa
        # with n = 2 and kappa > 1/2 eps vanishes on the cone: vacuum boundary t - r = 0
        self.vacuum_t1 = 0.0 if nk > 1 else None

    def dphi_dxi(self, xi):
        nk = self.n * self.eos.kappa
        return self.C * xi ** (-nk) * (xi * xi - 1.0) ** (0.5 * nk - 1.0)

    def _phi(self, t, r, theta):
        return _quad(self.dphi_dxi, self.XI_REF, r / t)

    def _grad(self, t, r, theta):
        xi = r / t
        g = self.dphi_dxi(xi)
        return -xi * g / t, g / t, 0.0 * g

    def kinetic(self, t, r):
        nk = self.n * self.eos.kappa
        return self.C**2 / (2.0 * r ** (2 * nk) * (r * r - t * t) ** (1.0 - nk))

    def _fluid(self, t, r, theta):
        p = self.kinetic(t, r) ** self.eos.alpha
        return p / self.eos.kappa, p, t / r, 0.0

    def _domain(self, t, r, theta):
        return 0 < t < r

    def x_range(self, t):
        return (t, 3.0 * t)


def linear_selfsimilar(C=1.0, kappa=0.6, n=2) -> LinearSelfSimilar:
    return LinearSelfSimilar(C, kappa, n)


# ---------------------------------------------------------------------------
# Registry addressed by string id
# ---------------------------------------------------------------------------


class CatalogEntry:
    def __init__(self, id, factory, defaults, formula, eos, symmetry, kinds=None):
        self.id = id
        self.factory = factory
        self.defaults = defaults
        self.formula = formula
        self.eos = eos
        self.symmetry = symmetry
        self.kinds = kinds or {}

    def schema(self) -> dict:
        return {"id": self.id, "formula": self.formula, "eos": self.eos,
                "symmetry": self.symmetry, "params": dict(self.defaults)}

    def make(self, **overrides) -> ExactSolution:
        unknown = set(overrides) - set(self.defaults)
        if unknown:
            raise ValueError(f"{self.id}: unknown parameter(s) {sorted(unknown)}")
        kw = {**self.defaults, **overrides}
        return self.factory(**kw)


def _standing(n):
    return lambda A: SphericalStanding(A, n)


CATALOG: dict[str, CatalogEntry] = {}


def _register(*args, **kw):
    entry = CatalogEntry(*args, **kw)
    CATALOG[entry.id] = entry


_register("plane-scaling", plane_scaling, {"A": 1.0},
          "phi = A ln(t^2 - x^2); eps = 2A^2/(t^2 - x^2), v = x/t", "stiff", "planar")
_register("plane-powerlaw", lambda A, lam: plane_powerlaw(A, lam, "inside"), {"A": 1.0, "lam": -2.5},
          "psi' = chi' = A y^lam; eps = 2A^2 (t^2 - x^2)^lam, |x| < t", "stiff", "planar")
_register("plane-outside", lambda A, lam: plane_powerlaw(A, lam, "outside"), {"A": 1.0, "lam": -2.0},
          "chi'(y) = psi'(-y) = A y^lam; eps = 2A^2 (x^2 - t^2)^lam, x > t", "stiff", "planar")
_register("plane-tachyonic", plane_tachyonic, {"A": 1.0},
          "phi = A ln|t^2 - x^2| on x > t; eps = 2A^2/(x^2 - t^2), v = x/t > 1", "stiff", "planar")
_register("plane-exp", plane_exp, {"A": 1.0, "gamma": -0.5, "m": 2},
          "chi'(y) = psi'(-y) = A exp(gamma y^m)", "stiff", "planar")
_register("spherical-outgoing", spherical_outgoing, {"C1": 1.0, "C2": 0.1, "n": 1},
          "phi = (C1 (t-r)^-n - C2)/r; eps = -psi (psi + 2 r psi')/(2 r^4)", "stiff", "spherical")
_register("standing-n1", _standing(1), {"A": 1.0},
          "phi = -2A/(t^2 - r^2); eps = 8A^2/(t^2 - r^2)^3, v = r/t", "stiff", "spherical")
_register("standing-n2", _standing(2), {"A": 1.0},
          "phi = -4tA/(t^2 - r^2)^2; eps = 8A^2 (9t^2 - r^2)/(t^2 - r^2)^5", "stiff", "spherical")
_register("standing-n3", _standing(3), {"A": 1.0},
          "phi = -2A (3t^2 + r^2)/(t^2 - r^2)^3", "stiff", "spherical")
_register("standing-n4", _standing(4), {"A": 1.0},
          "phi = -8A t (t^2 + r^2)/(t^2 - r^2)^4", "stiff", "spherical")
_register("standing", spherical_standing, {"A": 1.0, "n": 5},
          "phi = [psi(t-r) - psi(t+r)]/r, psi(y) = -A y^-n", "stiff", "spherical")
_register("mondip", monopole_dipole, {"A": 1.0, "b": 0.5},
          "phi = A (t - b r cos(theta))/(t^2 - r^2)^2", "stiff", "axisymmetric")
_register("quadip", monopole_quadrupole, {"A": 1.0, "b": 0.5},
          "phi = A (3t^2 + r^2 + b r^2 P2)/(t^2 - r^2)^3", "stiff", "axisymmetric")
_register("log-flow", log_eos_flow, {"eps0": 1.0, "B": 0.0, "C": 1.0, "n": 2},
          "eps = eps0 exp(C/tau^(1+n) - B - 1), v = r/t", "log", "n")
_register("iterlog-flow", iterated_log_flow, {"eps0": 1.0, "N": 3, "C": 1.0, "n": 1},
          "R = exp(C (t^2 - r^2)^(-(1+n)/(2N))), v = r/t", "iterlog", "n")
_register("linear-scaling", linear_scaling, {"C": 1.0, "kappa": 1 / 3, "n": 0},
          "eps = C/tau^((1+kappa)(1+n)), v = r/t", "linear", "n")
_register("selfsimilar", linear_selfsimilar, {"C": 1.0, "kappa": 0.6, "n": 2},
          "p = S^alpha, S = C^2/(2 r^(2n kappa) (r^2 - t^2)^(1 - n kappa)), v = t/r", "linear", "n")

INTEGER_PARAMS = {"n", "N", "m"}


def make(solution_id: str, **params) -> ExactSolution:
    """Build a catalog entry by id, overriding defaults with ``params``."""
    if solution_id not in CATALOG:
        raise KeyError(f"unknown solution id {solution_id!r}")
    return CATALOG[solution_id].make(**params)
