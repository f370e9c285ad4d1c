"""Zero-energy scattering in angular-momentum channels (2D and 3D).

For channel ``ell`` the radial minimiser f of

    int |x|^{2 ell} (|grad f|^2 + v/2 |f|^2) dx,   f -> 1 at infinity,

solves  f'' + (c/r) f' = v f / 2  with c = 2 ell + 1 in 2D and c = 2 ell + 2
in 3D.  Outside the support f = 1 - b / r^p with p = c - 1; b is the
channel scattering parameter.  The 2D s-wave is special: the solution grows
like ln r and b_0 is read off from f = ln(r / b_0) / ln(R / b_0).

The ODE is integrated in t = ln r with the two-stage Gauss-Legendre
collocation scheme (implicit, order 4, A-stable), on a logarithmic grid with
nodes at every radius where v is not smooth.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.integrate import simpson

from .potentials import InfiniteMomentError, RadialPotential, radial_moment

__all__ = [
    "GridSpec",
    "RadialProfile",
    "ScatteringResult",
    "ScatteringError",
    "DegenerateScatteringWarning",
    "EffectiveCoupling",
    "solve_zero_energy",
    "solve_zero_energy_log",
    "scattering_length",
    "born_scattering_length",
    "variational_energy",
    "c_factor",
    "reduced_scattering_length",
    "effective_coupling",
]


class ScatteringError(RuntimeError):
    """The tail of the computed profile does not have the force-free form."""


class DegenerateScatteringWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GridSpec:
    n_points: int = 4096
    match_factor: float = 4.0  # R_match = match_factor * R0
    start_factor: float = 1e-3  # regular start at start_factor * R0
    tail_fraction: float = 0.2
    residual_tol: float = 1e-9
    max_refinements: int = 3

    def refined(self) -> "GridSpec":
        return GridSpec(2 * self.n_points, self.match_factor, self.start_factor,
                        self.tail_fraction, self.residual_tol, self.max_refinements)


@dataclass(frozen=True)
class RadialProfile:
    r: np.ndarray
    f: np.ndarray
    df: np.ndarray
    ell: int
    dim: int
    inner_radius: float = 0.0
    # index boundaries of smooth pieces (quadrature never straddles a kink)
    segments: tuple[int, ...] | None = None
    # f = 1 - tail_b / r^p beyond the last node, if set
    tail_b: float | None = None
    b: float | None = None
    fit_residual: float = 0.0
    log_radius: float | None = None

    def __call__(self, r):
        """Evaluate f at arbitrary radii (cubic Hermite inside, exact tail outside)."""
        from scipy.interpolate import CubicHermiteSpline

        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        spline = CubicHermiteSpline(self.r, self.f, self.df)
        inner = r < self.r[0]
        outer = r > self.r[-1]
        mid = ~(inner | outer)
        out[mid] = spline(r[mid])
        out[inner] = 0.0 if self.inner_radius > 0 else self.f[0]
        if self.tail_b is not None:
            out[outer] = 1.0 - self.tail_b / r[outer] ** _exponent(self.ell, self.dim)
        else:
            out[outer] = self.f[-1]
        return out


@dataclass(frozen=True)
class ScatteringResult:
    ell: int
    dim: int
    b: float
    variational_energy: float
    profile: RadialProfile
    matching_radius: float
    fit_residual: float
    degenerate: bool = False

    @property
    def energy_per_b(self) -> float:
        """variational_energy / b; equals 4 pi ell (2D) or 4 pi (2 ell + 1) (3D)."""
        return self.variational_energy / self.b if self.b else math.nan


class EffectiveCoupling(NamedTuple):
    coupling: float
    scale: float  # energy scale multiplying the coupling at finite a


def _weight_power(ell: int, dim: int) -> int:
    """c in f'' + (c/r) f' = v f / 2."""
    return 2 * ell + 1 if dim == 2 else 2 * ell + 2


def _exponent(ell: int, dim: int) -> int:
    return _weight_power(ell, dim) - 1


def _surface(dim: int) -> float:
    return 2 * math.pi if dim == 2 else 4 * math.pi


def _check_channel(ell: int, dim: int) -> None:
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    if ell < 0 or int(ell) != ell:
        raise ValueError("channel must be a non-negative integer")


# Gauss-Legendre, two stages
_S3 = math.sqrt(3.0)
_GL_C = (0.5 - _S3 / 6, 0.5 + _S3 / 6)
_GL_A = ((0.25, 0.25 - _S3 / 6), (0.25 + _S3 / 6, 0.25))


def _log_segments(p: RadialPotential, r_lo: float, r_hi: float, n: int) -> list[np.ndarray]:
    """Log-uniform nodes on [r_lo, r_hi] with a node at every breakpoint."""
    cuts = sorted({x for x in p.breakpoints() if r_lo * (1 + 1e-12) < x < r_hi * (1 - 1e-12)})
    edges = [r_lo, *cuts, r_hi]
    total = math.log(r_hi / r_lo)
    segs = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        m = max(8, int(math.ceil(n * math.log(hi / lo) / total)))
        m += m % 2  # even interval count for Simpson
        segs.append(np.exp(np.linspace(math.log(lo), math.log(hi), m + 1)))
    return segs


def _propagators(p: RadialPotential, t: np.ndarray, c: int) -> np.ndarray:
    """One-step GL4 transfer matrices for y = (f, df/dt) on consecutive t nodes."""
    h = np.diff(t)
    n = len(h)
    stage_q = []
    for ci in _GL_C:
        rs = np.exp(t[:-1] + ci * h)
        stage_q.append(0.5 * rs**2 * p.finite_part(rs))
    A = np.zeros((2, n, 2, 2))
    for i in range(2):
        A[i, :, 0, 1] = 1.0
        A[i, :, 1, 0] = stage_q[i]
        A[i, :, 1, 1] = -(c - 1)
    eye = np.eye(2)
    S = np.zeros((n, 4, 4))
    hh = h[:, None, None]
    S[:, :2, :2] = eye - hh * _GL_A[0][0] * A[0]
    S[:, :2, 2:] = -hh * _GL_A[0][1] * A[1]
    S[:, 2:, :2] = -hh * _GL_A[1][0] * A[0]
    S[:, 2:, 2:] = eye - hh * _GL_A[1][1] * A[1]
    rhs = np.broadcast_to(np.vstack([eye, eye]), (n, 4, 2))
    X = np.linalg.solve(S, rhs)
    return eye + hh * 0.5 * (A[0] @ X[:, :2] + A[1] @ X[:, 2:])


def _integrate(p: RadialPotential, segs: list[np.ndarray], c: int, y0) -> tuple[np.ndarray, np.ndarray]:
    """March y = (f, r f') outward; returns node radii and states (rescaled)."""
    r_all = [segs[0][:1]]
    states = [np.array([y0], dtype=float)]
    y = np.array(y0, dtype=float)
    log_scale = [0.0]
    scale = 0.0
    for seg in segs:
        T = _propagators(p, np.log(seg), c)
        out = np.empty((len(T), 2))
        sc = np.empty(len(T))
        for k in range(len(T)):
            y = T[k] @ y
            big = abs(y[0]) + abs(y[1])
            if big > 1e100:
                y = y / big
                scale += math.log(big)
            out[k] = y
            sc[k] = scale
        r_all.append(seg[1:])
        states.append(out)
        log_scale.extend(sc)
    r = np.concatenate(r_all)
    Y = np.vstack(states)
    rel = np.exp(np.asarray(log_scale) - scale)
    return r, Y * rel[:, None]


def _segment_bounds(segs: list[np.ndarray]) -> tuple[int, ...]:
    bounds = [0]
    for s in segs:
        bounds.append(bounds[-1] + len(s) - 1)
    return tuple(bounds)


def _raw_solution(p: RadialPotential, ell: int, dim: int, r_end: float, n: int):
    c = _weight_power(ell, dim)
    R0 = p.support_radius
    if p.has_hard_core:
        r_lo = p.core_radius
        y0 = (0.0, r_lo)  # f = 0, f' = 1
    else:
        r_lo = GridSpec.start_factor * R0
        # regular branch: f = 1 + alpha r^2 with alpha = v(0) / (4 (c + 1))
        alpha = float(p.finite_part(np.array([r_lo]))[0]) / (4 * (c + 1))
        y0 = (1.0 + alpha * r_lo**2, 2 * alpha * r_lo**2)
    segs = _log_segments(p, r_lo, r_end, n)
    r, Y = _integrate(p, segs, c, y0)
    return r, Y[:, 0], Y[:, 1] / r, _segment_bounds(segs), r_lo


def _tail_slice(r: np.ndarray, R0: float, fraction: float) -> slice:
    k = max(int(len(r) * (1 - fraction)), int(np.searchsorted(r, R0, side="right")))
    if len(r) - k < 4:
        raise ValueError("grid does not extend far enough beyond the potential support")
    return slice(k, None)


def _zero_profile(p: RadialPotential, ell: int, dim: int, r_end: float, n: int) -> RadialProfile:
    r = np.exp(np.linspace(math.log(1e-3 * r_end), math.log(r_end), n + 1))
    return RadialProfile(r, np.ones_like(r), np.zeros_like(r), ell, dim, 0.0,
                         (0, len(r) - 1), tail_b=0.0, b=0.0)


def solve_zero_energy(p: RadialPotential, ell: int, dim: int = 2,
                      grid: GridSpec | None = None) -> RadialProfile:
    """Channel-ell minimiser normalised to f -> 1 (2D ell >= 1, or 3D)."""
    _check_channel(ell, dim)
    if dim == 2 and ell == 0:
        raise ValueError("the 2D s-wave grows logarithmically; use solve_zero_energy_log")
    grid = grid or GridSpec()
    if grid.match_factor <= 1:
        raise ValueError("matching radius must lie beyond the potential support")
    R0 = p.support_radius
    r_match = grid.match_factor * R0
    pexp = _exponent(ell, dim)
    if p.is_zero:
        return _zero_profile(p, ell, dim, r_match, grid.n_points)

    for _ in range(grid.max_refinements + 1):
        r, f, df, segs, r_lo = _raw_solution(p, ell, dim, r_match, grid.n_points)
        tail = _tail_slice(r, R0, grid.tail_fraction)
        design = np.column_stack([np.ones(len(r[tail])), (R0 / r[tail]) ** pexp])
        coef, *_ = np.linalg.lstsq(design, f[tail], rcond=None)
        alpha, beta = coef
        residual = float(np.max(np.abs(design @ coef - f[tail])) / abs(alpha))
        if residual <= grid.residual_tol:
            break
        grid = grid.refined()
    else:
        raise ScatteringError(f"tail fit residual {residual:.3e} after refinement")

    b = float(-beta / alpha * R0**pexp)
    return RadialProfile(r, f / alpha, df / alpha, ell, dim,
                         r_lo if p.has_hard_core else 0.0, segs,
                         tail_b=b, b=b, fit_residual=residual)


def solve_zero_energy_log(p: RadialPotential, R: float | None = None,
                          grid: GridSpec | None = None) -> RadialProfile:
    """2D s-wave minimiser with f = 1 for r >= R."""
    grid = grid or GridSpec()
    R0 = p.support_radius
    R = 10.0 * R0 if R is None else float(R)
    if R <= R0:
        raise ValueError("normalisation radius R must exceed the support radius")
    if p.is_zero:
        warnings.warn("v = 0: the s-wave scattering length vanishes", DegenerateScatteringWarning)
        prof = _zero_profile(p, 0, 2, R, grid.n_points)
        return RadialProfile(prof.r, prof.f, prof.df, 0, 2, 0.0, prof.segments,
                             b=0.0, log_radius=R)

    for _ in range(grid.max_refinements + 1):
        r, f, df, segs, r_lo = _raw_solution(p, 0, 2, R, grid.n_points)
        tail = _tail_slice(r, R0, grid.tail_fraction)
        # two tail samples fix f = beta ln(r / b0); the rest measure the residual
        r1, r2 = r[tail][0], r[-1]
        f1, f2 = f[tail][0], f[-1]
        beta = (f2 - f1) / math.log(r2 / r1)
        log_b0 = math.log(r2) - f2 / beta
        model = beta * (np.log(r[tail]) - log_b0)
        residual = float(np.max(np.abs(model - f[tail])) / abs(f2))
        if residual <= grid.residual_tol:
            break
        grid = grid.refined()
    else:
        raise ScatteringError(f"log-tail residual {residual:.3e} after refinement")

    norm = beta * (math.log(R) - log_b0)
    return RadialProfile(r, f / norm, df / norm, 0, 2,
                         r_lo if p.has_hard_core else 0.0, segs,
                         b=math.exp(log_b0), fit_residual=residual, log_radius=R)


def variational_energy(profile: RadialProfile, p: RadialPotential,
                       ell: int | None = None, dim: int | None = None) -> float:
    """int |x|^{2 ell} (|grad f|^2 + v f^2 / 2) dx over R^dim for a radial profile."""
    ell = profile.ell if ell is None else ell
    dim = profile.dim if dim is None else dim
    _check_channel(ell, dim)
    c = 2 * ell + dim - 1
    r, f, df = profile.r, profile.f, profile.df
    bounds = list(profile.segments or (0, len(r) - 1))
    # make sure quadrature pieces never straddle a kink of v
    extra = [x for x in p.breakpoints() if r[0] < x < r[-1] and not np.any(np.isclose(r, x, rtol=1e-13))]
    if extra:
        from scipy.interpolate import CubicHermiteSpline

        spline = CubicHermiteSpline(r, f, df)
        dspline = spline.derivative()
        new_r = np.sort(np.concatenate([r, extra]))
        marks = set(r[b] for b in bounds) | set(extra)
        f, df, r = spline(new_r), dspline(new_r), new_r
        bounds = sorted(int(np.searchsorted(r, x)) for x in marks)
    total = 0.0
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        rr = r[lo:hi + 1]
        # one-sided potential values at the segment ends
        probe = rr.copy()
        probe[0] *= 1 + 1e-13
        probe[-1] *= 1 - 1e-13
        v = p.finite_part(probe)
        if p.has_hard_core:
            v = np.where(probe < p.core_radius, 0.0, v)  # f vanishes there
        integrand = rr ** (c + 1) * (df[lo:hi + 1] ** 2 + 0.5 * v * f[lo:hi + 1] ** 2)
        total += simpson(integrand, x=np.log(rr))
    if profile.inner_radius == 0.0 and r[0] > 0:
        # below the first node f is flat and v is close to v(0)
        total += 0.5 * float(p.finite_part(r[0])) * f[0] ** 2 * r[0] ** (c + 1) / (c + 1)
    if profile.tail_b:
        pexp = _exponent(ell, dim)
        total += profile.tail_b**2 * pexp * r[-1] ** (-pexp)
    return _surface(dim) * total


def scattering_length(p: RadialPotential, ell: int, dim: int = 2,
                      grid: GridSpec | None = None, R: float | None = None) -> ScatteringResult:
    """Channel scattering parameter b_ell (b_0 via the log form in 2D)."""
    _check_channel(ell, dim)
    grid = grid or GridSpec()
    if dim == 2 and ell == 0:
        prof = solve_zero_energy_log(p, R, grid)
        energy = variational_energy(prof, p)
        return ScatteringResult(0, 2, prof.b, energy, prof, prof.log_radius,
                                prof.fit_residual, degenerate=prof.b == 0.0)
    prof = solve_zero_energy(p, ell, dim, grid)
    energy = variational_energy(prof, p)
    return ScatteringResult(ell, dim, prof.b, energy, prof,
                            grid.match_factor * p.support_radius, prof.fit_residual,
                            degenerate=prof.b == 0.0)


def born_scattering_length(p: RadialPotential, ell: int, dim: int = 2) -> float:
    """Value of the defining functional at f = 1, divided like b_ell.

    Infinite for hard cores.  Undefined for the 2D s-wave.
    """
    _check_channel(ell, dim)
    if dim == 2 and ell == 0:
        raise ValueError("no Born scattering length for the 2D s-wave")
    try:
        moment = radial_moment(p, 2 * ell, dim)
    except InfiniteMomentError:
        return math.inf
    denom = 8 * math.pi * ell if dim == 2 else 8 * math.pi * (2 * ell + 1)
    return moment / denom


def c_factor(ell: int) -> Fraction:
    """prod_{j=1}^{ell} 2j / (2j + 1): average of |z|^{2 ell} / |x|^{2 ell} on the sphere."""
    if ell < 0:
        raise ValueError("channel must be non-negative")
    out = Fraction(1)
    for j in range(1, ell + 1):
        out *= Fraction(2 * j, 2 * j + 1)
    return out


def reduced_scattering_length(res: ScatteringResult) -> float:
    """3D parameter c_ell * b_ell that enters the projected coupling, with c_ell exact."""
    if res.dim != 3:
        raise ValueError("the reduced parameter is defined for 3D channels")
    c = c_factor(res.ell)
    return c.numerator * res.b / c.denominator


def effective_coupling(res: ScatteringResult, a: float, chi4: float | None = None) -> EffectiveCoupling:
    """Coupling in front of h_ell in the a -> 0 limit, with its energy scale."""
    if not 0 < a <= 1:
        raise ValueError("scale a must lie in (0, 1]")
    ell = res.ell
    if res.dim == 3:
        if chi4 is None:
            raise ValueError("3D couplings need the confinement factor int |chi|^4")
        coupling = 8 * math.pi * (2 * ell + 1) * reduced_scattering_length(res) * chi4
        return EffectiveCoupling(coupling, a ** (2 * ell + 1))
    if ell == 0:
        scale = 1.0 / math.log(1.0 / a**2) if a < 1 else math.inf
        return EffectiveCoupling(8 * math.pi, scale)
    return EffectiveCoupling(8 * math.pi * ell * res.b, a ** (2 * ell))
