"""Exact polynomial constructions: Laughlin states and the spaces B_ell.

Polynomials in z_1..z_N are dicts {exponent tuple: int}.  Coefficients stay
integers until the map to the orthonormal basis, where the orbital norms
sqrt(pi m!) enter.
"""
from __future__ import annotations

import math
from itertools import permutations

import numpy as np

from .basis import LLLBasis, partitions

__all__ = ["jastrow", "poly_mul", "to_basis_vector", "laughlin_vector", "b_ell_subspace"]


def poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _times_difference(poly: dict, i: int, j: int) -> dict:
    """poly * (z_i - z_j)."""
    out: dict = {}
    for e, c in poly.items():
        ei = list(e)
        ei[i] += 1
        ti = tuple(ei)
        out[ti] = out.get(ti, 0) + c
        ej = list(e)
        ej[j] += 1
        tj = tuple(ej)
        out[tj] = out.get(tj, 0) - c
    return {e: c for e, c in out.items() if c}


def jastrow(N: int, m: int) -> dict:
    """prod_{i<j} (z_i - z_j)^m."""
    poly = {(0,) * N: 1}
    for i in range(N):
        for j in range(i + 1, N):
            for _ in range(m):
                poly = _times_difference(poly, i, j)
    return poly


def _monomial_symmetric(lam: tuple[int, ...], N: int) -> dict:
    padded = lam + (0,) * (N - len(lam))
    return {e: 1 for e in set(permutations(padded))}


def to_basis_vector(poly: dict, basis: LLLBasis) -> np.ndarray:
    """Coefficients of poly * Gaussian in the orthonormal basis (unnormalised)."""
    vec = np.zeros(len(basis))
    for k, mu in enumerate(basis.elements):
        c = poly.get(mu, 0)
        if not c:
            continue
        weight = math.prod(math.factorial(x) for x in mu)
        if basis.statistics == "bose":
            weight /= math.prod(math.factorial(mu.count(x)) for x in set(mu))
        vec[k] = c * math.sqrt(weight)
    return vec


def _parity_ok(m: int, statistics: str) -> bool:
    if statistics == "bose":
        return m % 2 == 0
    if statistics == "fermi":
        return m % 2 == 1
    return True


def laughlin_vector(N: int, m: int, basis: LLLBasis) -> np.ndarray:
    """Unit vector of prod_{i<j}(z_i - z_j)^m exp(-sum |z|^2/2) in ``basis``."""
    if basis.N != N:
        raise ValueError("particle number does not match the basis")
    if basis.L != m * N * (N - 1) // 2:
        raise ValueError(f"Laughlin state with m={m} lives at L={m * N * (N - 1) // 2}, basis has L={basis.L}")
    if not _parity_ok(m, basis.statistics):
        raise ValueError(f"m={m} is incompatible with {basis.statistics} statistics")
    vec = to_basis_vector(jastrow(N, m), basis)
    return vec / np.linalg.norm(vec)


def b_ell_subspace(basis: LLLBasis, ell: int) -> np.ndarray:
    """Orthonormal columns spanning B_ell within the block (dim x k)."""
    N, L, stat = basis.N, basis.L, basis.statistics
    if stat == "none":
        power = ell
        degree = L - ell
        gens = [{(i, degree - i): 1} for i in range(degree + 1)] if degree >= 0 else []
    else:
        power = ell if _parity_ok(ell, stat) else ell + 1
        degree = L - power * N * (N - 1) // 2
        gens = [_monomial_symmetric(lam, N) for lam in partitions(degree, N)] if degree >= 0 else []
    if not gens or len(basis) == 0:
        return np.zeros((len(basis), 0))
    base = jastrow(N, power)
    vecs = np.column_stack([to_basis_vector(poly_mul(base, g), basis) for g in gens])
    vecs /= np.linalg.norm(vecs, axis=0)
    u, s, _ = np.linalg.svd(vecs, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * s[0]))
    return u[:, :rank]
