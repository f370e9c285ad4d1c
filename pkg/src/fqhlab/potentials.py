"""Radial pair potentials, their short-range scaling and radial moments.

All potentials are non-negative, radial and compactly supported.  A hard
core is carried as a flag plus radius instead of a large finite value, so
solvers can impose a Dirichlet wall at the core radius.

Units follow the magnetic problem with B = 2 (magnetic length 1/sqrt(2)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

__all__ = [
    "RadialPotential",
    "HardCore",
    "SoftDisc",
    "Gaussian",
    "Tabulated",
    "ScaledPotential",
    "InfiniteMomentError",
    "evaluate",
    "scaled",
    "radial_moment",
    "potential_from_dict",
]

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-13


class InfiniteMomentError(ValueError):
    """Raised when a moment of a hard-core potential is requested."""


class RadialPotential:
    """Base class.  Subclasses define ``_profile`` on ``[0, support_radius]``."""

    coupling: float = 1.0

    @property
    def support_radius(self) -> float:
        raise NotImplementedError

    @property
    def core_radius(self) -> float:
        """Radius of the hard core, 0 if there is none."""
        return 0.0

    @property
    def has_hard_core(self) -> bool:
        return self.core_radius > 0.0

    @property
    def is_zero(self) -> bool:
        return not self.has_hard_core and self.coupling == 0.0

    def breakpoints(self) -> tuple[float, ...]:
        """Radii in (0, support] where v is not smooth."""
        return (self.support_radius,)

    def _profile(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def finite_part(self, r):
        """lambda * v(r) ignoring any hard core; zero beyond the support."""
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        inside = r <= self.support_radius
        if self.coupling != 0.0 and np.any(inside):
            out[inside] = self.coupling * self._profile(r[inside])
        return out

    def __call__(self, r):
        return evaluate(self, r)

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class HardCore(RadialPotential):
    core: float
    coupling: float = 1.0

    def __post_init__(self):
        if not self.core > 0:
            raise ValueError("hard core radius must be positive")

    @property
    def support_radius(self) -> float:
        return self.core

    @property
    def core_radius(self) -> float:
        return self.core

    def _profile(self, r):
        return np.zeros_like(r)

    def describe(self):
        return {"kind": "hardcore", "radius": self.core}


@dataclass(frozen=True)
class SoftDisc(RadialPotential):
    """Constant height inside ``radius`` (inclusive), zero outside."""

    height: float
    radius: float
    coupling: float = 1.0

    def __post_init__(self):
        if self.height < 0 or self.coupling < 0:
            raise ValueError("potential must be non-negative")
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def support_radius(self) -> float:
        return self.radius

    @property
    def is_zero(self) -> bool:
        return self.coupling == 0.0 or self.height == 0.0

    def _profile(self, r):
        return np.full_like(r, self.height)

    def describe(self):
        return {"kind": "softdisc", "height": self.height, "radius": self.radius,
                "coupling": self.coupling}


@dataclass(frozen=True)
class Gaussian(RadialPotential):
    """height * exp(-(r/width)^2), truncated at ``cutoff`` (default 3 widths)."""

    height: float
    width: float
    coupling: float = 1.0
    cutoff: float | None = None

    def __post_init__(self):
        if self.height < 0 or self.coupling < 0:
            raise ValueError("potential must be non-negative")
        if not self.width > 0:
            raise ValueError("width must be positive")
        if self.cutoff is None:
            object.__setattr__(self, "cutoff", 3.0 * self.width)

    @property
    def support_radius(self) -> float:
        return self.cutoff

    @property
    def is_zero(self) -> bool:
        return self.coupling == 0.0 or self.height == 0.0

    def _profile(self, r):
        return self.height * np.exp(-((r / self.width) ** 2))

    def describe(self):
        return {"kind": "gaussian", "height": self.height, "width": self.width,
                "cutoff": self.cutoff, "coupling": self.coupling}


@dataclass(frozen=True)
class Tabulated(RadialPotential):
    """Samples (r_i, v_i) joined by a monotone cubic, clamped at zero.

    v is held at v_0 below the first sample and vanishes beyond the last one.
    """

    radii: tuple[float, ...]
    values: tuple[float, ...]
    coupling: float = 1.0
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or len(r) < 2:
            raise ValueError("need at least two (r, v) samples")
        if np.any(np.diff(r) <= 0) or r[0] < 0:
            raise ValueError("sample radii must be non-negative and increasing")
        if np.any(v < 0) or self.coupling < 0:
            raise ValueError("potential must be non-negative")
        object.__setattr__(self, "radii", tuple(r.tolist()))
        object.__setattr__(self, "values", tuple(v.tolist()))
        object.__setattr__(self, "_interp", PchipInterpolator(r, v, extrapolate=False))

    @property
    def support_radius(self) -> float:
        return self.radii[-1]

    @property
    def is_zero(self) -> bool:
        return self.coupling == 0.0 or not any(self.values)

    def breakpoints(self):
        return tuple(x for x in self.radii if x > 0)

    def _profile(self, r):
        out = np.where(r < self.radii[0], self.values[0], self._interp(np.clip(r, self.radii[0], None)))
        return np.clip(np.nan_to_num(out, nan=0.0), 0.0, None)

    def describe(self):
        return {"kind": "tabulated", "radii": list(self.radii), "values": list(self.values),
                "coupling": self.coupling}


@dataclass(frozen=True)
class ScaledPotential(RadialPotential):
    """v_a(r) = a^-2 v(r / a)."""

    base: RadialPotential
    a: float

    def __post_init__(self):
        if not 0 < self.a <= 1:
            raise ValueError(f"scale a must lie in (0, 1], got {self.a}")

    @property
    def coupling(self) -> float:  # type: ignore[override]
        return self.base.coupling

    @property
    def support_radius(self) -> float:
        return self.a * self.base.support_radius

    @property
    def core_radius(self) -> float:
        return self.a * self.base.core_radius

    @property
    def is_zero(self) -> bool:
        return self.base.is_zero

    def breakpoints(self):
        return tuple(self.a * x for x in self.base.breakpoints())

    def finite_part(self, r):
        r = np.asarray(r, dtype=float)
        return self.base.finite_part(r / self.a) / self.a**2

    def describe(self):
        return {"kind": "scaled", "a": self.a, "base": self.base.describe()}


def evaluate(p: RadialPotential, r):
    """v(r) including the coupling; +inf inside a hard core."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    out = p.finite_part(r)
    if p.has_hard_core:
        out = np.where(r < p.core_radius, np.inf, out)
    return out if out.ndim else float(out)


def scaled(p: RadialPotential, a: float) -> ScaledPotential:
    if isinstance(p, ScaledPotential):
        return ScaledPotential(p.base, p.a * a)
    return ScaledPotential(p, a)


def _radial_integral(p: RadialPotential, weight) -> float:
    """int_0^R0 weight(r) lambda v(r) dr with breaks at the non-smooth radii."""
    upper = p.support_radius
    pts = sorted({x for x in p.breakpoints() if 0 < x < upper})
    edges = [0.0, *pts, upper]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(lambda r: weight(r) * float(p.finite_part(r)), lo, hi,
                                epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)
        total += val
    return total


def radial_moment(p: RadialPotential, k: int, dim: int = 2) -> float:
    """int_{R^dim} |x|^k v(|x|) dx."""
    if k < 0:
        raise ValueError("moment order must be non-negative")
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    if p.has_hard_core:
        raise InfiniteMomentError("moments of a hard-core potential are infinite")
    if p.is_zero:
        return 0.0
    if dim == 2:
        return 2 * math.pi * _radial_integral(p, lambda r: r ** (k + 1))
    return 4 * math.pi * _radial_integral(p, lambda r: r ** (k + 2))


def potential_from_dict(spec: dict) -> RadialPotential:
    """Build a potential from a config table (``kind`` plus parameters)."""
    spec = dict(spec)
    kind = str(spec.pop("kind", "")).lower()
    coupling = float(spec.pop("coupling", 1.0))
    a = spec.pop("scale", None)
    if kind == "hardcore":
        p = HardCore(float(spec.pop("radius")))
    elif kind == "softdisc":
        p = SoftDisc(float(spec.pop("height")), float(spec.pop("radius")), coupling)
    elif kind == "gaussian":
        cutoff = spec.pop("cutoff", None)
        p = Gaussian(float(spec.pop("height")), float(spec.pop("width")), coupling,
                     None if cutoff is None else float(cutoff))
    elif kind == "tabulated":
        p = Tabulated(tuple(spec.pop("radii")), tuple(spec.pop("values")), coupling)
    elif kind == "zero":
        p = SoftDisc(0.0, 1.0)
    else:
        raise ValueError(f"unknown potential kind {kind!r}")
    if spec:
        raise ValueError(f"unexpected potential parameters: {sorted(spec)}")
    return scaled(p, float(a)) if a is not None else p
