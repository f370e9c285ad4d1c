"""Two-body operators on fixed-L lowest-Landau-level blocks.

Every two-body operator is assembled in second quantisation,

    sum_{i<j} V_ij = 1/2 sum_{pqrs} <pq|V|rs> a+_p a+_q a_s a_r,

from distinguishable two-particle matrix elements <pq|V|rs> between
products phi_p(z_1) phi_q(z_2).

Pair projectors use the centre-of-mass map z_c = (z_1 + z_2)/sqrt(2),
z_r = (z_1 - z_2)/sqrt(2), which preserves the Gaussian with unit Jacobian:

    phi_p(z_1) phi_q(z_2) = sum_k C^{pq}_k phi_{p+q-k}(z_c) phi_k(z_r).

Potential matrix elements are computed independently of that map, by an
exact Gaussian integral over the pair midpoint followed by radial moments
of v in the separation z_1 - z_2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy import integrate

from ..potentials import InfiniteMomentError, RadialPotential
from .basis import LLLBasis

__all__ = [
    "OperatorMatrix",
    "pair_coefficient",
    "d_normalization",
    "pair_projector_matrix",
    "pseudo_hamiltonian",
    "angular_momentum_matrix",
    "trap_matrix",
    "haldane_coefficient",
    "two_body_element",
    "lll_interaction_matrix",
]


@dataclass(frozen=True)
class OperatorMatrix:
    basis: LLLBasis
    matrix: sp.csr_matrix

    @property
    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    @property
    def shape(self):
        return self.matrix.shape

    def __matmul__(self, vec):
        return self.matrix @ vec

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.basis, (self.matrix + other.matrix).tocsr())

    def __mul__(self, scalar: float) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, (scalar * self.matrix).tocsr())

    __rmul__ = __mul__


@lru_cache(maxsize=None)
def pair_coefficient(p: int, q: int, k: int) -> float:
    """C^{pq}_k: amplitude of relative angular momentum k in phi_p phi_q."""
    M = p + q
    if not 0 <= k <= M:
        return 0.0
    s = 0
    for i in range(max(0, k - q), min(p, k) + 1):
        j = k - i
        s += math.comb(p, i) * math.comb(q, j) * (-1) ** j
    if s == 0:
        return 0.0
    sq = Fraction(s * s * math.factorial(M - k) * math.factorial(k),
                  2**M * math.factorial(p) * math.factorial(q))
    return math.copysign(math.sqrt(sq), s)


def d_normalization(ell: int) -> float:
    """<D^(ell)> on the unit relative-ell pair: D^(ell) = P^(ell) / (2^{ell+1} pi ell!)."""
    return 1.0 / (2 ** (ell + 1) * math.pi * math.factorial(ell))


# -- second-quantised pair annihilation -------------------------------------------

def _annihilate(state: tuple[int, ...], orb: int, fermi: bool):
    """a_orb on a descending occupation tuple; returns (amplitude, new state)."""
    if orb not in state:
        return 0.0, None
    pos = state.index(orb)
    new = state[:pos] + state[pos + 1:]
    if fermi:
        return (-1.0) ** pos, new
    return math.sqrt(state.count(orb)), new


def _pair_maps(basis: LLLBasis):
    """{(r, s): sparse map a_s a_r from the basis to (N-2)-particle states}, plus factor."""
    if basis.statistics == "none":
        # particle 1 in r, particle 2 in s; the pair sum has a single term
        maps = {}
        for col, (r, s) in enumerate(basis.elements):
            maps[(r, s)] = ([0], [col], [1.0])
        return _finish(maps, 1, len(basis)), 1.0
    fermi = basis.statistics == "fermi"
    targets: dict[tuple[int, ...], int] = {}
    maps: dict[tuple[int, int], tuple[list, list, list]] = {}
    for col, mu in enumerate(basis.elements):
        for r in set(mu):
            amp_r, st = _annihilate(mu, r, fermi)
            for s in set(st):
                amp_s, st2 = _annihilate(st, s, fermi)
                row = targets.setdefault(st2, len(targets))
                rows, cols, vals = maps.setdefault((r, s), ([], [], []))
                rows.append(row)
                cols.append(col)
                vals.append(amp_r * amp_s)
    return _finish(maps, len(targets), len(basis)), 0.5


def _finish(maps, n_rows, n_cols):
    return {key: sp.csr_matrix((v, (r, c)), shape=(n_rows, n_cols)) for key, (r, c, v) in maps.items()}


@lru_cache(maxsize=256)
def _cached_pair_maps(basis: LLLBasis):
    return _pair_maps(basis)


def _empty(basis: LLLBasis) -> OperatorMatrix:
    return OperatorMatrix(basis, sp.csr_matrix((len(basis), len(basis))))


def pair_projector_matrix(basis: LLLBasis, ell: int) -> OperatorMatrix:
    """sum_{i<j} P^(ell)_ij, the projector onto relative angular momentum ell."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    if len(basis) == 0:
        return _empty(basis)
    maps, factor = _cached_pair_maps(basis)
    by_total: dict[int, sp.csr_matrix] = {}
    for (r, s), X in maps.items():
        c = pair_coefficient(r, s, ell)
        if c != 0.0:
            M = r + s
            by_total[M] = by_total[M] + c * X if M in by_total else c * X
    out = sp.csr_matrix((len(basis), len(basis)))
    for B in by_total.values():
        out = out + B.T @ B
    out = (factor * out).tocsr()
    out.eliminate_zeros()
    return OperatorMatrix(basis, out)


def pseudo_hamiltonian(basis: LLLBasis, ell: int) -> OperatorMatrix:
    """h_ell = sum_{i<j} D^(ell)_ij on the fixed-L block."""
    return pair_projector_matrix(basis, ell) * d_normalization(ell)


def angular_momentum_matrix(basis: LLLBasis) -> OperatorMatrix:
    return OperatorMatrix(basis, sp.identity(len(basis), format="csr") * float(basis.L))


def trap_matrix(basis: LLLBasis, lam: float = 1.0) -> OperatorMatrix:
    """Projected harmonic trap lam * sum |x_i|^2 = lam (N + L) on the block."""
    return OperatorMatrix(basis, sp.identity(len(basis), format="csr") * lam * (basis.N + basis.L))


# -- potentials --------------------------------------------------------------------

def _radial_quad(p: RadialPotential, fn, stretch: float = 1.0) -> float:
    """int_0^{R0/stretch} fn(rho) v(stretch * rho) drho, split at breakpoints."""
    if p.has_hard_core:
        raise InfiniteMomentError("hard-core potentials have no LLL projection")
    if p.is_zero:
        return 0.0
    upper = p.support_radius / stretch
    cuts = sorted({x / stretch for x in p.breakpoints() if 0 < x / stretch < upper})
    edges = [0.0, *cuts, upper]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(lambda x: fn(x) * float(p.finite_part(stretch * x)), lo, hi,
                                epsabs=1e-14, epsrel=1e-13, limit=200)
        total += val
    return total


def haldane_coefficient(p: RadialPotential, ell: int) -> float:
    """<phi_ell| v(sqrt(2)|z_r|) |phi_ell> in the relative coordinate."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    val = _radial_quad(p, lambda w: w ** (2 * ell + 1) * math.exp(-w * w), stretch=math.sqrt(2.0))
    return 2.0 * val / math.factorial(ell)


@lru_cache(maxsize=None)
def _midpoint_coefficients(r: int, s: int) -> tuple[Fraction, ...]:
    """Coefficients of u^a in (u + w/2)^r (u - w/2)^s, a = 0..r+s (w factors dropped)."""
    out = []
    for a in range(r + s + 1):
        tot = Fraction(0)
        for i in range(max(0, a - s), min(r, a) + 1):
            j = a - i
            tot += (math.comb(r, i) * math.comb(s, j)
                    * Fraction(1, 2) ** (r - i) * Fraction(-1, 2) ** (s - j))
        out.append(tot)
    return tuple(out)


def _separation_moments(p: RadialPotential, kmax: int) -> list[float]:
    """G_k = int d^2w |w|^{2k} exp(-|w|^2/2) v(|w|), k = 0..kmax."""
    return [2 * math.pi * _radial_quad(p, lambda x, k=k: x ** (2 * k + 1) * math.exp(-0.5 * x * x))
            for k in range(kmax + 1)]


def two_body_element(p_: int, q: int, r: int, s: int, moments) -> float:
    """<phi_p phi_q | v(|z_1 - z_2|) | phi_r phi_s> from separation moments."""
    M = r + s
    if p_ + q != M:
        return 0.0
    A = _midpoint_coefficients(r, s)
    B = _midpoint_coefficients(p_, q)
    tot = 0.0
    for a in range(M + 1):
        if A[a] and B[a]:
            gauss = math.factorial(a) / 2 ** (a + 1)  # int u^a conj(u)^a e^{-2|u|^2} / pi
            tot += float(A[a] * B[a]) * gauss * moments[M - a]
    norm = math.sqrt(math.factorial(p_) * math.factorial(q) * math.factorial(r) * math.factorial(s))
    return tot / (math.pi * norm)


def lll_interaction_matrix(basis: LLLBasis, p: RadialPotential) -> OperatorMatrix:
    """sum_{i<j} P_LLL v(|x_i - x_j|) P_LLL on the block."""
    if p.has_hard_core:
        raise InfiniteMomentError("hard-core potentials have no LLL projection")
    if len(basis) == 0 or p.is_zero:
        return _empty(basis)
    moments = _separation_moments(p, basis.L)
    maps, factor = _cached_pair_maps(basis)
    groups: dict[int, list[tuple[int, int]]] = {}
    for key in maps:
        groups.setdefault(sum(key), []).append(key)
    out = sp.csr_matrix((len(basis), len(basis)))
    for keys in groups.values():
        for pq in keys:
            for rs in keys:
                val = two_body_element(*pq, *rs, moments)
                if val != 0.0:
                    out = out + val * (maps[pq].T @ maps[rs])
    return OperatorMatrix(basis, (factor * out).tocsr())
