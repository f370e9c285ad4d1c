"""Two particles in all Landau levels: fixed-ell relative sectors.

With B = 2 the pair Hamiltonian h_1 + h_2 + v_a(|x_1 - x_2|) separates under
x_c = (x_1 + x_2)/sqrt(2), x_r = (x_1 - x_2)/sqrt(2) into h(x_c) + h(x_r) +
v_a(sqrt(2)|x_r|); both h's have the same form because the map is orthogonal
and preserves x -> x^perp.  The centre of mass sits in its ground state
(energy 0).  On e^{i ell theta} the relative operator is

    h_ell = -u'' - u'/r + ell^2/r^2 + r^2 - 2 ell - 2,

whose spectrum is {0, 4, 8, ...} with ground state r^ell exp(-r^2/2).
Writing u = r^ell exp(-r^2/2) g turns the quadratic form into

    E[g] = int w (g'^2 + V g^2) dr / int w g^2 dr,   w = r^{2 ell + 1} exp(-r^2),

with V(r) = v_a(sqrt(2) r).  This is discretised with linear finite elements
and a lumped mass, so a constant g has exactly zero kinetic energy and the
interaction enters only as a non-negative diagonal.  A hard core becomes a
Dirichlet wall at r = a R_0 / sqrt(2).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicHermiteSpline
from scipy.linalg import eigh_tridiagonal, solve_banded

from .lllspace.operators import d_normalization
from .potentials import RadialPotential, scaled
from .scattering import scattering_length

__all__ = [
    "TwoBodyGrid",
    "RelativeSectorOperator",
    "ConvergenceRow",
    "ConvergenceStudy",
    "EigensolveError",
    "GridResolutionError",
    "relative_sector_operator",
    "sector_ground_energy",
    "sector_levels",
    "limit_prediction",
    "trial_energy",
    "convergence_study",
]

MAGNETIC_LENGTH = 1 / math.sqrt(2.0)
_GL_X, _GL_W = leggauss(6)


class EigensolveError(RuntimeError):
    pass


class GridResolutionError(ValueError):
    pass


@dataclass(frozen=True)
class TwoBodyGrid:
    n_points: int = 2000  # elements outside the interaction region
    inner_fraction: float = 0.125  # share of elements inside the support
    r_max: float | None = None  # default: 8 magnetic lengths, more for large ell
    richardson: bool = True

    def doubled(self) -> "TwoBodyGrid":
        return TwoBodyGrid(2 * self.n_points, self.inner_fraction, self.r_max, self.richardson)

    def outer_radius(self, ell: int) -> float:
        if self.r_max is not None:
            return float(self.r_max)
        return max(8 * MAGNETIC_LENGTH, math.sqrt(2 * ell + 1) + 4.0)


@dataclass(frozen=True)
class RelativeSectorOperator:
    ell: int
    a: float
    grid: TwoBodyGrid
    r: np.ndarray  # all nodes, including a Dirichlet node if present
    matrix: sp.csr_matrix  # symmetric, M^{-1/2} (K + P) M^{-1/2} on the free nodes
    levels: np.ndarray  # lowest eigenvalues; levels[0] from inverse iteration
    ground_state: np.ndarray  # g at the nodes (zero at a wall), unit mass norm
    wall: float | None  # Dirichlet radius, None without a hard core


def _element_integral(lo: np.ndarray, hi: np.ndarray, fn) -> np.ndarray:
    half = 0.5 * (hi - lo)
    x = half[:, None] * _GL_X[None, :] + 0.5 * (lo + hi)[:, None]
    return half * (fn(x) @ _GL_W)


def _nodes(rel: RadialPotential, ell: int, grid: TwoBodyGrid) -> tuple[np.ndarray, float | None]:
    r_max = grid.outer_radius(ell)
    n = int(grid.n_points)
    if n < 64:
        raise GridResolutionError("need at least 64 elements")
    if rel.has_hard_core:
        wall = rel.core_radius / math.sqrt(2.0)
        if wall >= 0.5 * r_max:
            raise GridResolutionError("hard core reaches the outer boundary; increase r_max")
        return wall * np.exp(np.linspace(0.0, math.log(r_max / wall), n + 1)), wall
    if rel.is_zero:
        return np.linspace(0.0, r_max, n + 1), None
    s = rel.support_radius / math.sqrt(2.0)
    if s >= 0.5 * r_max:
        return np.linspace(0.0, r_max, n + 1), None
    n_in = max(int(n * grid.inner_fraction), 16)
    inner = np.linspace(0.0, s, n_in + 1)
    outer = s * np.exp(np.linspace(0.0, math.log(r_max / s), n + 1))
    return np.concatenate([inner, outer[1:]]), None


def _assemble(p: RadialPotential, a: float, ell: int, grid: TwoBodyGrid):
    """Element stiffness, lumped mass and lumped potential on the node set."""
    rel = scaled(p, a) if a != 1.0 else p
    r, wall = _nodes(rel, ell, grid)
    lo, hi = r[:-1], r[1:]
    weight = lambda x: x ** (2 * ell + 1) * np.exp(-x * x)
    W = _element_integral(lo, hi, weight)
    stiff = W / (hi - lo) ** 2
    mass = np.zeros(len(r))
    mass[:-1] += 0.5 * W
    mass[1:] += 0.5 * W
    pot = np.zeros(len(r))
    if not rel.is_zero and rel.coupling != 0.0:
        # finite part only: inside a hard core g vanishes anyway
        WV = _element_integral(lo, hi, lambda x: weight(x) * rel.finite_part(math.sqrt(2.0) * x))
        pot[:-1] += 0.5 * WV
        pot[1:] += 0.5 * WV
    return r, wall, stiff, mass, pot


def _rayleigh(g: np.ndarray, stiff: np.ndarray, mass: np.ndarray, pot: np.ndarray) -> float:
    """Difference form: every term is non-negative, so tiny energies stay accurate."""
    num = np.sum(stiff * np.diff(g) ** 2) + np.sum(pot * g * g)
    return float(num / np.sum(mass * g * g))


def _ground_state(stiff, mass, pot, first: int, shift: float = -1.0, max_iter: int = 500):
    """Inverse iteration for the lowest eigenpair of K + P relative to M."""
    n = len(mass)
    diag = np.zeros(n)
    diag[:-1] += stiff
    diag[1:] += stiff
    diag += pot - shift * mass
    free = slice(first, None)
    d, m = diag[free], mass[free]
    off = -stiff[first:]
    ab = np.zeros((3, len(d)))
    ab[0, 1:] = off
    ab[1] = d
    ab[2, :-1] = off
    g = np.ones(len(d))
    g /= math.sqrt(np.sum(m * g * g))
    full = np.zeros(n)
    energy = math.inf
    for _ in range(max_iter):
        g_new = solve_banded((1, 1), ab, m * g)
        g_new /= math.sqrt(np.sum(m * g_new * g_new))
        full[free] = g_new
        e_new = _rayleigh(full, stiff, mass, pot)
        done = abs(e_new - energy) <= 1e-15 * max(abs(e_new), 1e-300) or \
            np.max(np.abs(g_new - g)) <= 1e-14
        g, energy = g_new, e_new
        if done:
            return energy, full.copy()
    raise EigensolveError("inverse iteration did not converge")


def relative_sector_operator(p: RadialPotential, a: float, ell: int,
                             grid: TwoBodyGrid | None = None, n_levels: int = 1) -> RelativeSectorOperator:
    """Discretised relative-coordinate operator in angular-momentum sector ell."""
    if not 0 < a <= 1:
        raise ValueError(f"scale a must lie in (0, 1], got {a}")
    if ell < 0:
        raise ValueError("ell must be non-negative")
    if n_levels < 1:
        raise ValueError("need at least one level")
    grid = grid or TwoBodyGrid()
    r, wall, stiff, mass, pot = _assemble(p, a, ell, grid)
    first = 1 if wall is not None else 0
    e0, g0 = _ground_state(stiff, mass, pot, first)

    diag = np.zeros(len(r))
    diag[:-1] += stiff
    diag[1:] += stiff
    diag += pot
    scale = 1.0 / np.sqrt(mass[first:])
    d = diag[first:] * scale**2
    e = -stiff[first:] * scale[:-1] * scale[1:]
    matrix = sp.diags([e, d, e], [-1, 0, 1], format="csr")
    if n_levels > 1:
        levels = eigh_tridiagonal(d, e, select="i", select_range=(0, n_levels - 1),
                                  eigvals_only=True)
        levels[0] = e0
    else:
        levels = np.array([e0])
    return RelativeSectorOperator(ell, a, grid, r, matrix, levels, g0, wall)


def _richardson(coarse, fine, on: bool):
    return (4 * fine - coarse) / 3 if on else fine


def sector_levels(p: RadialPotential, a: float, ell: int, n_levels: int = 3,
                  grid: TwoBodyGrid | None = None) -> np.ndarray:
    """Lowest n_levels eigenvalues, Richardson-refined over n and 2n elements."""
    grid = grid or TwoBodyGrid()
    coarse = relative_sector_operator(p, a, ell, grid, n_levels).levels
    fine = relative_sector_operator(p, a, ell, grid.doubled(), n_levels).levels
    return _richardson(coarse, fine, grid.richardson)


def sector_ground_energy(p: RadialPotential, a: float, ell: int,
                         grid: TwoBodyGrid | None = None) -> float:
    """E_ell(a): lowest eigenvalue of the relative sector operator."""
    return float(sector_levels(p, a, ell, 1, grid)[0])


def limit_prediction(p: RadialPotential, ell: int) -> float:
    """a -> 0 limit of a^{-2 ell} E_ell(a) (ell >= 1) or ln(1/a^2) E_0(a) (ell = 0)."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    if p.is_zero:
        return 0.0
    if ell == 0:
        return 8 * math.pi * d_normalization(0)
    b = scattering_length(p, ell).b
    return 8 * math.pi * ell * b * d_normalization(ell)


def trial_energy(p: RadialPotential, a: float, ell: int, grid: TwoBodyGrid | None = None) -> float:
    """Energy of r^ell e^{-r^2/2} f_ell(sqrt(2) r / a) with f_ell the channel minimiser.

    An upper bound for E_ell(a) up to quadrature error.  Evaluated by
    Gauss-Legendre quadrature on the scattering grid and a geometric outer grid.
    """
    grid = grid or TwoBodyGrid()
    res = scattering_length(p, ell)
    prof = res.profile
    spline = CubicHermiteSpline(prof.r, prof.f, prof.df)
    dspline = spline.derivative()
    pexp = 2 * ell
    stretch = math.sqrt(2.0) / a
    rel = scaled(p, a) if a != 1.0 else p

    def f_and_df(rho):
        f = np.empty_like(rho)
        df = np.empty_like(rho)
        mid = rho <= prof.r[-1]
        f[mid], df[mid] = spline(rho[mid]), dspline(rho[mid])
        out = ~mid
        if prof.tail_b is not None and ell > 0:
            f[out] = 1.0 - prof.tail_b / rho[out] ** pexp
            df[out] = pexp * prof.tail_b / rho[out] ** (pexp + 1)
        else:
            f[out], df[out] = prof.f[-1], 0.0
        low = rho < prof.r[0]
        if prof.inner_radius > 0:
            f[low], df[low] = 0.0, 0.0
        else:
            f[low], df[low] = prof.f[0], 0.0
        return f, df

    r_in = prof.r / stretch
    r_max = grid.outer_radius(ell)
    outer = r_in[-1] * np.exp(np.linspace(0.0, math.log(r_max / r_in[-1]), 4 * grid.n_points + 1))
    nodes = np.concatenate([[0.0] if prof.inner_radius == 0 else [], r_in, outer[1:]])
    lo, hi = nodes[:-1], nodes[1:]
    weight = lambda x: x ** (2 * ell + 1) * np.exp(-x * x)

    def integrand_num(x):
        f, df = f_and_df(stretch * x)
        v = rel.finite_part(math.sqrt(2.0) * x)
        return weight(x) * ((stretch * df) ** 2 + v * f * f)

    def integrand_den(x):
        f, _ = f_and_df(stretch * x)
        return weight(x) * f * f

    num = _element_integral(lo, hi, integrand_num).sum()
    den = _element_integral(lo, hi, integrand_den).sum()
    return float(num / den)


@dataclass(frozen=True)
class ConvergenceRow:
    a: float
    energy: float
    scaled: float  # a^{-2 ell} E (ell >= 1) or ln(1/a^2) E (ell = 0)
    relative_gap: float  # (scaled - predicted) / predicted, nan if predicted is 0


@dataclass(frozen=True)
class ConvergenceStudy:
    ell: int
    potential: dict
    rows: tuple[ConvergenceRow, ...]
    predicted_limit: float
    extrapolated: float
    method: str  # "aitken" or "log-fit"
    fit: tuple[float, float] | None = None  # (c1, c2) of c1 + c2 / ln(1/a^2)
    complete: bool = True
    error: str | None = None

    @property
    def monotone(self) -> bool:
        s = [row.scaled for row in self.rows]
        return all(y >= x for x, y in zip(s, s[1:])) or all(y <= x for x, y in zip(s, s[1:]))


def _scale_factor(a: float, ell: int) -> float:
    return math.log(1 / a**2) if ell == 0 else a ** (-2 * ell)


def _aitken(s: list[float]) -> float:
    if len(s) < 3:
        return s[-1] if s else math.nan
    s1, s2, s3 = s[-3:]
    d1, d2 = s2 - s1, s3 - s2
    if d2 == d1 or d1 == 0.0:
        return s3
    return s3 - d2 * d2 / (d2 - d1)


def _log_fit(a_vals: list[float], s: list[float]) -> tuple[float, float]:
    x = 1.0 / np.log(1.0 / np.asarray(a_vals) ** 2)
    if len(s) < 2:
        return (s[0] if s else math.nan), math.nan
    design = np.column_stack([np.ones_like(x), x])
    (c1, c2), *_ = np.linalg.lstsq(design, np.asarray(s), rcond=None)
    return float(c1), float(c2)


def convergence_study(p: RadialPotential, ell: int, a_list, grid: TwoBodyGrid | None = None,
                      threads: int = 1) -> ConvergenceStudy:
    """Scaled sector energies along a decreasing sequence of scales."""
    a_list = [float(a) for a in a_list]
    if not a_list:
        raise ValueError("a_list is empty")
    if any(not 0 < a <= 0.25 for a in a_list):
        raise ValueError("every scale must lie in (0, 0.25]")
    if any(y >= x for x, y in zip(a_list, a_list[1:])):
        raise ValueError("a_list must be strictly decreasing")
    predicted = limit_prediction(p, ell)

    def solve(a):
        return sector_ground_energy(p, a, ell, grid)

    energies: list[float] = []
    error = None
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(solve, a) for a in a_list]
            for fut in futures:
                try:
                    energies.append(fut.result())
                except (EigensolveError, GridResolutionError) as exc:
                    error = str(exc)
                    break
    else:
        for a in a_list:
            try:
                energies.append(solve(a))
            except (EigensolveError, GridResolutionError) as exc:
                error = str(exc)
                break

    rows = []
    for a, E in zip(a_list, energies):
        s = _scale_factor(a, ell) * E
        gap = (s - predicted) / predicted if predicted else math.nan
        rows.append(ConvergenceRow(a, E, s, gap))
    scaled_vals = [row.scaled for row in rows]
    if ell == 0:
        c1, c2 = _log_fit([row.a for row in rows], scaled_vals)
        extrapolated, fit, method = c1, (c1, c2), "log-fit"
    else:
        extrapolated, fit, method = _aitken(scaled_vals), None, "aitken"
    return ConvergenceStudy(ell, p.describe(), tuple(rows), predicted, extrapolated, method,
                            fit, complete=error is None, error=error)
