"""First-order HLL finite-volume solver for 1D symmetric flows with p = kappa eps.

Evolves the energy density E = T^{00} and momentum density M = T^{0r} of

    d_t E + r^-n d_r(r^n M)               = 0
    d_t M + r^-n d_r(r^n (M v + p)) - n p/r = 0

for planar (n = 0), cylindrical (n = 1) and spherical (n = 2) symmetry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .solutions import ExactSolution
from .verify import _parallel_map

MIN_CELLS = 8


class UnrecoverableStateError(RuntimeError):
    """Conserved state with no subluminal primitive solution."""

    def __init__(self, msg, t=None, cells=None):
        super().__init__(msg)
        self.t = t
        self.cells = cells


@dataclass(frozen=True)
class ConservedState:
    E: np.ndarray
    M: np.ndarray


@dataclass(frozen=True)
class SolverConfig:
    kappa: float
    t_start: float
    t_end: float
    cfl: float = 0.5
    boundary: str = "exact"  # exact | outflow | periodic

    def __post_init__(self):
        if not 0 < self.cfl < 1:
            raise ValueError("cfl must lie in (0, 1)")
        if not 0 < self.kappa < 1:
            raise ValueError("kappa must lie in (0, 1)")
        if self.t_end < self.t_start:
            raise ValueError("t_end must not precede t_start")
        if self.boundary not in ("exact", "outflow", "periodic"):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")


@dataclass
class Grid1D:
    cells: int
    r_min: float
    r_max: float
    n: int = 0
    E: np.ndarray | None = None
    M: np.ndarray | None = None
    t: float = 0.0

    def __post_init__(self):
        if self.cells < MIN_CELLS:
            raise ValueError(f"grid needs at least {MIN_CELLS} cells")
        if self.n not in (0, 1, 2):
            raise ValueError("symmetry index must be 0, 1 or 2")
        if self.n >= 1 and not self.r_min > 0:
            raise ValueError("r_min must be positive for curvilinear grids")
        if not self.r_max > self.r_min:
            raise ValueError("need r_max > r_min")

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / self.cells

    @property
    def faces(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.cells + 1)

    @property
    def centers(self) -> np.ndarray:
        f = self.faces
        return 0.5 * (f[1:] + f[:-1])

    @property
    def volumes(self) -> np.ndarray:
        f = self.faces
        if self.n == 0:
            return np.diff(f)
        return np.diff(f ** (self.n + 1)) / (self.n + 1)

    @property
    def areas(self) -> np.ndarray:
        return self.faces**self.n


def _ext(x):
    return np.asarray(x, dtype=np.longdouble)


def _out(x):
    return x.astype(float) if np.ndim(x) else float(x)


def prim_to_cons(eps, v, kappa) -> ConservedState:
    """Conserved (E, M) from (eps, v), carried in extended precision.

    Near |v| = 1 the inverse map amplifies rounding of E and M by about W^2,
    so the conserved pair is stored as long double where the platform has one.
    """
    eps, v, k = _ext(eps), _ext(v), np.longdouble(kappa)
    if np.any(np.abs(v) >= 1):
        raise ValueError("|v| must be below 1")
    w = (1 + k) * eps / ((1 - v) * (1 + v))  # (eps + p) W^2
    return ConservedState(E=w - k * eps, M=w * v)


def cons_to_prim(cons: ConservedState, kappa):
    """Recover (eps, v) from kappa M v^2 - (1 + kappa) E v + M = 0."""
    E, M, k = _ext(cons.E), _ext(cons.M), np.longdouble(kappa)
    a = (1 + k) * E
    disc = a * a - 4 * k * M * M
    bad = ~(E > 0) | ~(disc >= 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        # root continuous with v = 0 at M = 0, rationalized
        v = 2 * M / (a + np.sqrt(np.where(bad, 0, disc)))
        eps = E * (1 - v) * (1 + v) / (1 + k * v * v)
    bad |= ~(np.abs(v) < 1) | ~(eps > 0)
    if np.any(bad):
        idx = np.flatnonzero(np.atleast_1d(bad))
        raise UnrecoverableStateError(f"no subluminal primitive state in {idx.size} cell(s)", cells=idx)
    return _out(eps), _out(v)


def wave_speeds(eps, v, kappa):
    cs = math.sqrt(kappa)
    return (v - cs) / (1.0 - v * cs), (v + cs) / (1.0 + v * cs)


def _flux(E, M, v, p):
    return M, M * v + p


def _hll(UL, UR, kappa):
    (EL, ML), (ER, MR) = UL, UR
    epsL, vL = cons_to_prim(ConservedState(EL, ML), kappa)
    epsR, vR = cons_to_prim(ConservedState(ER, MR), kappa)
    lmL, lpL = wave_speeds(epsL, vL, kappa)
    lmR, lpR = wave_speeds(epsR, vR, kappa)
    sl = np.minimum(np.minimum(lmL, lmR), 0.0)
    sr = np.maximum(np.maximum(lpL, lpR), 0.0)
    FL = _flux(EL, ML, vL, kappa * epsL)
    FR = _flux(ER, MR, vR, kappa * epsR)
    out = []
    for fl, fr, ul, ur in zip(FL, FR, (EL, ML), (ER, MR)):
        out.append((sr * fl - sl * fr + sl * sr * (ur - ul)) / (sr - sl))
    return out


def _exact_prims(sol: ExactSolution, t, r):
    eps, _, v, _ = sol._fluid(t, np.asarray(r, dtype=float), np.pi / 2)
    return np.asarray(eps, dtype=float) * np.ones_like(r), np.asarray(v, dtype=float) * np.ones_like(r)


def _ghosts(grid: Grid1D, cfg: SolverConfig, exact: ExactSolution | None):
    E, M = grid.E, grid.M
    if cfg.boundary == "periodic":
        return (E[-1], M[-1]), (E[0], M[0])
    if cfg.boundary == "outflow":
        return (E[0], M[0]), (E[-1], M[-1])
    if exact is None:
        raise ValueError("exact boundaries need a solution")
    dr = grid.dr
    r = np.array([grid.r_min - 0.5 * dr, grid.r_max + 0.5 * dr])
    eps, v = _exact_prims(exact, grid.t, r)
    c = prim_to_cons(eps, v, cfg.kappa)
    return (c.E[0], c.M[0]), (c.E[1], c.M[1])


def stable_dt(grid: Grid1D, cfg: SolverConfig) -> float:
    eps, v = cons_to_prim(ConservedState(grid.E, grid.M), cfg.kappa)
    lm, lp = wave_speeds(eps, v, cfg.kappa)
    smax = float(np.max(np.maximum(np.abs(lm), np.abs(lp))))
    return cfg.cfl * grid.dr / smax


def hll_step(grid: Grid1D, cfg: SolverConfig, dt: float | None = None,
             exact: ExactSolution | None = None) -> Grid1D:
    """One forward-Euler update with HLL interface fluxes and geometric sources.

    Raises UnrecoverableStateError carrying the last good time ``t`` when a
    cell leaves the subluminal state space.
    """
    try:
        return _step(grid, cfg, dt, exact)
    except UnrecoverableStateError as err:
        raise UnrecoverableStateError(f"step from t={grid.t:.6g}: {err}", t=grid.t, cells=err.cells) from None


def _step(grid, cfg, dt, exact):
    if dt is None:
        dt = stable_dt(grid, cfg)
    (gEL, gML), (gER, gMR) = _ghosts(grid, cfg, exact)
    E = np.concatenate([[gEL], grid.E, [gER]])
    M = np.concatenate([[gML], grid.M, [gMR]])
    FE, FM = _hll((E[:-1], M[:-1]), (E[1:], M[1:]), cfg.kappa)
    A = grid.areas
    V = grid.volumes
    E_new = grid.E - dt / V * (A[1:] * FE[1:] - A[:-1] * FE[:-1])
    M_new = grid.M - dt / V * (A[1:] * FM[1:] - A[:-1] * FM[:-1])
    if grid.n:
        eps, _ = cons_to_prim(ConservedState(grid.E, grid.M), cfg.kappa)
        # n p / r integrated over the cell: p dA / dV
        M_new = M_new + dt * cfg.kappa * eps * np.diff(A) / V
    cons_to_prim(ConservedState(E_new, M_new), cfg.kappa)
    return replace(grid, E=E_new, M=M_new, t=grid.t + dt)


def initialize(sol: ExactSolution, cells, r_min, r_max, t) -> Grid1D:
    grid = Grid1D(cells, r_min, r_max, sol.n, t=t)
    eps, v = _exact_prims(sol, t, grid.centers)
    c = prim_to_cons(eps, v, sol.eos.kappa)
    grid.E, grid.M = c.E, c.M
    return grid


def evolve(grid: Grid1D, cfg: SolverConfig, exact: ExactSolution | None = None) -> Grid1D:
    while grid.t < cfg.t_end - 1e-14 * max(1.0, abs(cfg.t_end)):
        dt = min(stable_dt(grid, cfg), cfg.t_end - grid.t)
        grid = hll_step(grid, cfg, dt, exact)
    return grid


@dataclass
class ErrorRow:
    resolution: int
    l1_eps: float
    linf_eps: float
    l1_v: float
    order_estimate: float = float("nan")


def run_comparison(sol: ExactSolution, resolutions, r_range, cfg: SolverConfig, jobs=1) -> list[ErrorRow]:
    """Evolve exact initial data and tabulate errors against the exact solution at t_end."""
    if sol.eos.family != "linear":
        raise ValueError("the solver supports the linear EOS only")
    if abs(sol.eos.kappa - cfg.kappa) > 1e-15:
        raise ValueError("solver kappa does not match the solution EOS")
    if sol.axisymmetric:
        raise ValueError("the solver handles symmetric flows only")
    ghost = 0.5 * (r_range[1] - r_range[0]) / min(resolutions)
    for t in (cfg.t_start, cfg.t_end):
        for r in (r_range[0] - ghost, r_range[1] + ghost):
            if not sol.in_domain(t, r):
                raise ValueError(f"grid with ghost cells leaves the domain of {sol.id} at t={t:g}, r={r:g}")

    def one(N):
        grid = evolve(initialize(sol, N, r_range[0], r_range[1], cfg.t_start), cfg, sol)
        eps, v = cons_to_prim(ConservedState(grid.E, grid.M), cfg.kappa)
        eps_ex, v_ex = _exact_prims(sol, grid.t, grid.centers)
        w = grid.volumes / grid.volumes.sum()
        return ErrorRow(N, float(np.sum(w * np.abs(eps - eps_ex))), float(np.max(np.abs(eps - eps_ex))),
                        float(np.sum(w * np.abs(v - v_ex))))

    rows = _parallel_map(one, list(resolutions), jobs)
    for prev, row in zip(rows, rows[1:]):
        row.order_estimate = math.log(prev.l1_eps / row.l1_eps) / math.log(row.resolution / prev.resolution)
    return rows
