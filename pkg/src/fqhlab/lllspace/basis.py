"""N-body lowest-Landau-level bases at fixed total angular momentum.

A basis element is an exponent multi-index mu = (mu_1, ..., mu_N) with
sum(mu) = L.  It stands for the normalised symmetrised (bose) or
antisymmetrised (fermi) product of the orbitals

    phi_m(z) = (pi m!)^{-1/2} z^m exp(-|z|^2 / 2).

Fermion states are a^+_{mu_1} ... a^+_{mu_N} |0> with mu strictly
decreasing; that ordering fixes every sign in this package.  The "none"
statistics (distinguishable particles, ordered tuples) is only for N = 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

__all__ = ["LLLBasis", "build_basis", "partitions", "count_partitions", "dim_b_ell", "STATISTICS"]

STATISTICS = ("bose", "fermi", "none")


def partitions(n: int, max_parts: int, max_part: int | None = None):
    """Partitions of n into at most max_parts parts, reverse-lexicographic."""
    if n < 0:
        return
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(n, max_part), 0, -1):
        if first * max_parts < n:
            break
        for rest in partitions(n - first, max_parts - 1, first):
            yield (first, *rest)


@lru_cache(maxsize=None)
def count_partitions(n: int, max_parts: int) -> int:
    """Number of partitions of n into at most max_parts parts (recursion on the size)."""
    if n < 0:
        return 0
    if n == 0:
        return 1
    if max_parts == 0:
        return 0
    # either fewer than max_parts parts, or subtract 1 from each of max_parts parts
    return count_partitions(n, max_parts - 1) + count_partitions(n - max_parts, max_parts)


@dataclass(frozen=True)
class LLLBasis:
    N: int
    L: int
    statistics: str
    elements: tuple[tuple[int, ...], ...]
    index: dict = field(repr=False, compare=False, hash=False, default=None)

    def __post_init__(self):
        if self.index is None:
            object.__setattr__(self, "index", {mu: i for i, mu in enumerate(self.elements)})

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return len(self.elements)


def build_basis(N: int, L: int, statistics: str = "bose") -> LLLBasis:
    if N < 2:
        raise ValueError("need at least two particles")
    if L < 0:
        raise ValueError("total angular momentum must be non-negative")
    if statistics not in STATISTICS:
        raise ValueError(f"statistics must be one of {STATISTICS}")
    if statistics == "bose":
        elems = [lam + (0,) * (N - len(lam)) for lam in partitions(L, N)]
    elif statistics == "fermi":
        shift = N * (N - 1) // 2
        elems = [tuple(x + N - 1 - i for i, x in enumerate(lam + (0,) * (N - len(lam))))
                 for lam in partitions(L - shift, N)]
    else:
        if N != 2:
            raise ValueError("distinguishable-particle bases are only supported for N = 2")
        elems = [(m, L - m) for m in range(L, -1, -1)]
    return LLLBasis(N, L, statistics, tuple(elems))


def dim_b_ell(N: int, L: int, ell: int, statistics: str = "bose") -> int:
    """dim of {prod_{i<j}(z_i - z_j)^ell * phi} at total angular momentum L."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    pairs = N * (N - 1) // 2
    degree = L - ell * pairs
    if degree < 0:
        return 0
    if statistics == "none":
        if N != 2:
            raise ValueError("distinguishable-particle counting is only supported for N = 2")
        return degree + 1
    # phi must be symmetric when the Jastrow power has the parity of the statistics
    symmetric_phi = (ell % 2 == 0) == (statistics == "bose")
    if symmetric_phi:
        return count_partitions(degree, N)
    return count_partitions(degree - pairs, N)
