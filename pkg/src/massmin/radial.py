"""Radial grids, quadrature, scaling maps and Schwarz rearrangement.

A radial function on R^N is stored by its samples u(r_i), r_i = i*h on
[0, R], with u(R) = 0.  For N = 1 the samples describe an even function on
the whole line, so the surface measure omega_1 = 2 doubles the half-line
integral.

Quadrature conventions used everywhere in the package:

* ``mass`` and potential-type integrals: trapezoid rule with weight
  omega_N r^(N-1).
* ``grad_norm_sq``: exact integral of |u_h'|^2 omega_N r^(N-1) for the
  piecewise-linear interpolant u_h, i.e. forward differences weighted by the
  exact cell measure omega_N (r_{i+1}^N - r_i^N)/N.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


def sphere_measure(N: int) -> float:
    """Surface measure of the unit sphere in R^N (omega_1 = 2)."""
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


@dataclass(frozen=True)
class RadialGrid:
    N: int
    R: float = 20.0
    M: int = 4000

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not self.R > 0:
            raise ValueError("R must be positive")
        if self.M < 16:
            raise ValueError("M must be >= 16")

    @property
    def h(self) -> float:
        return self.R / self.M

    @property
    def omega(self) -> float:
        return sphere_measure(self.N)

    @cached_property
    def r(self) -> np.ndarray:
        return np.linspace(0.0, self.R, self.M + 1)

    @cached_property
    def weights(self) -> np.ndarray:
        """Trapezoid weights including omega_N r^(N-1)."""
        w = self.omega * self.r ** (self.N - 1) * self.h
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    @cached_property
    def stiffness(self) -> np.ndarray:
        """Per-cell coefficients k_i with grad_norm_sq = sum k_i (u_{i+1} - u_i)^2."""
        r = self.r
        return self.omega * (r[1:] ** self.N - r[:-1] ** self.N) / (self.N * self.h**2)

    def scaled(self, t: float) -> "RadialGrid":
        """Grid with every node moved from r to t*r (same node count)."""
        return RadialGrid(self.N, self.R * t, self.M)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.M + 1,):
            raise ValueError(f"expected {self.grid.M + 1} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("profile contains non-finite values")
        v[-1] = 0.0
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: RadialGrid, fn) -> "RadialProfile":
        return cls(grid, fn(grid.r))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "RadialProfile":
        return cls(grid, np.zeros(grid.M + 1))

    @property
    def r(self) -> np.ndarray:
        return self.grid.r

    def with_values(self, values) -> "RadialProfile":
        return RadialProfile(self.grid, values)

    def __call__(self, r):
        """Linear interpolation, zero beyond R."""
        return np.interp(r, self.grid.r, self.values, right=0.0)

    def to_csv(self, path) -> None:
        write_profile_csv(path, self.grid.r, self.values)


def integrate(grid: RadialGrid, values) -> float:
    """Trapezoid integral of a radial density over R^N."""
    return float(np.dot(grid.weights, values))


def mass(u: RadialProfile) -> float:
    return integrate(u.grid, u.values**2)


def grad_norm_sq(u: RadialProfile) -> float:
    """int |grad u|^2 (not halved)."""
    du = np.diff(u.values)
    return float(np.dot(u.grid.stiffness, du * du))


def lp_norm(u: RadialProfile, p: float) -> float:
    return integrate(u.grid, np.abs(u.values) ** p) ** (1.0 / p)


def l2_distance(u: RadialProfile, v: RadialProfile) -> float:
    """L^2 distance, evaluated on the finer of the two grids (v resampled)."""
    grid = u.grid if u.grid.h <= v.grid.h else v.grid
    R = max(u.grid.R, v.grid.R)
    if R > grid.R:
        grid = RadialGrid(grid.N, R, int(math.ceil(R / grid.h)))
    diff = u(grid.r) - v(grid.r)
    return math.sqrt(max(integrate(grid, diff * diff), 0.0))


def l2_scaling(s: float, u: RadialProfile) -> RadialProfile:
    """s <> u = e^(Ns/2) u(e^s r), resampled on the same grid."""
    if s == 0:
        return u
    N = u.grid.N
    return u.with_values(math.exp(N * s / 2.0) * u(math.exp(s) * u.grid.r))


def dilate(t: float, u: RadialProfile) -> RadialProfile:
    """u(r/t), resampled on the same grid."""
    if not t > 0:
        raise ValueError("dilation factor must be positive")
    if t == 1:
        return u
    return u.with_values(u(u.grid.r / t))


def dilate_exact(t: float, u: RadialProfile) -> RadialProfile:
    """u(r/t) represented without resampling, on the grid scaled by t."""
    if not t > 0:
        raise ValueError("dilation factor must be positive")
    return RadialProfile(u.grid.scaled(t), u.values)


def is_nonincreasing(values) -> bool:
    return bool(np.all(np.diff(values) <= 0.0))


def schwarz_rearrange(u: RadialProfile) -> RadialProfile:
    """Discrete Schwarz rearrangement of a nonnegative profile.

    Nodes are treated as cells of measure ``grid.weights`` (the Dirichlet
    node is excluded).  The values are sorted into decreasing order in the
    measure coordinate and each output cell receives the root-mean-square
    of the sorted density over its own measure interval, so the discrete
    L^2 mass is preserved exactly and the result is nonincreasing.  A
    zero-measure cell (r = 0 when N >= 2) takes the maximum.
    """
    v = u.values
    if np.any(v < 0):
        raise ValueError("schwarz_rearrange needs a nonnegative profile (rearrange |u|)")
    if is_nonincreasing(v):
        return u
    w = u.grid.weights[:-1]
    x = v[:-1]
    order = np.argsort(-x, kind="stable")
    xs2 = x[order] ** 2
    ws = w[order]
    # cumulative integral of the sorted density as a function of measure
    cum_w = np.concatenate([[0.0], np.cumsum(ws)])
    cum_i = np.concatenate([[0.0], np.cumsum(xs2 * ws)])
    edges = np.concatenate([[0.0], np.cumsum(w)])
    edges[-1] = cum_w[-1]

    def primitive(tau):
        k = np.clip(np.searchsorted(cum_w, tau, side="right") - 1, 0, len(xs2) - 1)
        return cum_i[k] + (tau - cum_w[k]) * xs2[k]

    P = primitive(edges)
    P[-1] = cum_i[-1]
    out = np.empty_like(v)
    with np.errstate(invalid="ignore", divide="ignore"):
        dens = np.diff(P) / w
    zero = w == 0
    dens[zero] = xs2[0]
    out[:-1] = np.sqrt(np.maximum(dens, 0.0))
    out[-1] = 0.0
    # rounding can leave tiny upward steps; enforce monotonicity
    out[:-1] = np.minimum.accumulate(out[:-1])
    return u.with_values(out)


# -- CSV -------------------------------------------------------------------

def write_profile_csv(path, r, u) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["r", "u"])
        for ri, ui in zip(r, u):
            wr.writerow([repr(float(ri)), repr(float(ui))])


def read_profile_csv(path, N: int) -> RadialProfile:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    r, u = data[:, 0], data[:, 1]
    M = len(r) - 1
    grid = RadialGrid(N, float(r[-1]), M)
    if not np.allclose(r, grid.r, rtol=0, atol=1e-9 * grid.R):
        raise ValueError(f"{path}: nodes are not a uniform grid starting at r=0")
    return RadialProfile(grid, u)
