"""Eigenpairs, kernels and Yrast curves of pseudo-potential Hamiltonians."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .basis import build_basis
from .operators import OperatorMatrix, pseudo_hamiltonian
from .polynomials import _parity_ok, b_ell_subspace, laughlin_vector

__all__ = [
    "DENSE_LIMIT",
    "spectrum",
    "kernel_dimension",
    "restricted_pseudo_hamiltonian",
    "laughlin_exponent",
    "YrastPoint",
    "YrastCurve",
    "yrast_scan",
    "measured_gap",
]

DENSE_LIMIT = 2000


def _as_array(matrix):
    if isinstance(matrix, OperatorMatrix):
        matrix = matrix.matrix
    return matrix


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        big = np.flatnonzero(np.abs(col) > 1e-12 * max(np.abs(col).max(), 1e-300))
        if len(big) and col[big[0]] < 0:
            vecs[:, k] = -col
    return vecs


def spectrum(matrix, count: int | None = None, seed: int | None = 0):
    """Lowest ``count`` eigenpairs in ascending order (count clamps to the dimension)."""
    A = _as_array(matrix)
    n = A.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    count = n if count is None else max(0, min(int(count), n))
    if count == 0:
        return np.zeros(0), np.zeros((n, 0))
    if n <= DENSE_LIMIT or count >= n - 1:
        dense = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
        vals, vecs = sla.eigh(dense, subset_by_index=(0, count - 1))
    else:
        v0 = np.random.default_rng(seed).standard_normal(n)
        vals, vecs = eigsh(sp.csr_matrix(A), k=count, which="SA", v0=v0, tol=1e-12)
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    return vals, _fix_signs(np.array(vecs))


def kernel_dimension(matrix, tol: float | None = None, rel_tol: float = 1e-10) -> int:
    """Number of eigenvalues below tol (default rel_tol times the largest)."""
    A = _as_array(matrix)
    n = A.shape[0]
    if n == 0:
        return 0
    dense = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
    vals = sla.eigvalsh(dense)
    if tol is None:
        top = float(np.max(np.abs(vals)))
        tol = rel_tol * (top if top > 0 else 1.0)
    return int(np.sum(vals < tol))


def restricted_pseudo_hamiltonian(basis, ell: int):
    """h_ell on B_ell: returns (dense matrix in B_ell coordinates, orthonormal columns Q)."""
    Q = b_ell_subspace(basis, ell)
    if Q.shape[1] == 0:
        return np.zeros((0, 0)), Q
    H = pseudo_hamiltonian(basis, ell).matrix
    Hq = Q.T @ (H @ Q)
    return 0.5 * (Hq + Hq.T), Q


def laughlin_exponent(ell: int, statistics: str) -> int:
    """Smallest admissible Jastrow power m >= ell + 1 (the zero mode of h_ell)."""
    m = ell + 1
    while not _parity_ok(m, statistics):
        m += 1
    return m


@dataclass(frozen=True)
class YrastPoint:
    L: int
    energy: float  # lowest eigenvalue of gamma h_ell + lam (N + L) on B_ell
    interaction: float  # lowest eigenvalue of h_ell alone
    overlap: float  # with the Laughlin state at this L, nan if none exists


@dataclass(frozen=True)
class YrastCurve:
    N: int
    ell: int
    statistics: str
    lam: float
    gamma: float
    points: tuple[YrastPoint, ...]
    ground_L: int
    overlap_with_laughlin: float
    laughlin_L: int
    lambda_lower: float  # below: ground state is the zero mode at laughlin_L
    lambda_upper: float  # above: ground state sits at the smallest admissible L


def _laughlin_at(N: int, L: int, statistics: str, basis):
    pairs = N * (N - 1) // 2
    if L % pairs:
        return None
    m = L // pairs
    if not _parity_ok(m, statistics):
        return None
    return laughlin_vector(N, m, basis)


def yrast_scan(N: int, ell: int, statistics: str, L_range, lam: float, gamma: float = 1.0) -> YrastCurve:
    """Lowest energy of gamma h_ell + lam (N + L) on B_ell for each L in range."""
    if lam <= 0 or gamma < 0:
        raise ValueError("need lam > 0 and gamma >= 0")
    Ls = sorted(set(int(L) for L in L_range))
    if not Ls:
        raise ValueError("empty angular momentum range")
    points = []
    best = None
    for L in Ls:
        basis = build_basis(N, L, statistics)
        H, Q = restricted_pseudo_hamiltonian(basis, ell)
        if Q.shape[1] == 0:
            continue
        vals, vecs = spectrum(H, 1)
        e_int = max(float(vals[0]), 0.0)
        energy = gamma * e_int + lam * (N + L)
        state = Q @ vecs[:, 0]
        target = _laughlin_at(N, L, statistics, basis)
        overlap = float(abs(target @ state)) if target is not None else math.nan
        points.append(YrastPoint(L, energy, e_int, overlap))
        if best is None or energy < best.energy - 1e-14 * max(1.0, abs(energy)):
            best = points[-1]
    if best is None:
        raise ValueError("B_ell is empty for every L in range")

    L_lau = laughlin_exponent(ell, statistics) * N * (N - 1) // 2
    below = [pt for pt in points if pt.L < L_lau]
    lower = min((gamma * pt.interaction / (L_lau - pt.L) for pt in below), default=math.inf)
    first = points[0]
    slopes = [gamma * (first.interaction - pt.interaction) / (pt.L - first.L) for pt in points[1:]]
    upper = max([0.0, *slopes])
    return YrastCurve(N, ell, statistics, lam, gamma, tuple(points), best.L, best.overlap,
                      L_lau, lower, upper)


def measured_gap(N: int, ell: int, statistics: str, L_max: int | None = None) -> tuple[float, int]:
    """Smallest nonzero eigenvalue of h_ell on B_ell over L up to L_max, and where it occurs.

    Whether this stays bounded away from zero as N grows is open; the value
    is only ever measured and reported.
    """
    L_lau = laughlin_exponent(ell, statistics) * N * (N - 1) // 2
    L_max = L_lau + N if L_max is None else L_max
    best, where = math.inf, -1
    for L in range(L_max + 1):
        H, Q = restricted_pseudo_hamiltonian(build_basis(N, L, statistics), ell)
        if Q.shape[1] == 0:
            continue
        vals = sla.eigvalsh(H)
        tol = 1e-10 * max(float(np.max(np.abs(vals))), 1.0)
        nonzero = vals[vals > tol]
        if len(nonzero) and nonzero[0] < best:
            best, where = float(nonzero[0]), L
    return best, where
