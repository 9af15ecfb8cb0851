"""Linear algebra over a prime field F_p on integer numpy arrays.

Subspaces are represented by their reduced row echelon basis, which is
unique and hence a hashable canonical key.

>>> rank_mod_p([[1, 1], [1, 1]], 2)
1
>>> len(subspaces(3, 2, 1)), len(subspaces(3, 2, 2))
(7, 7)
"""

from __future__ import annotations

import itertools

import numpy as np

from ._kernels import rref_mod_p


def check_prime(p: int) -> None:
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise ValueError(f"{p} is not prime; only prime fields are supported")


def rref(m, p: int) -> np.ndarray:
    return rref_mod_p(m, p)


def rank_mod_p(m, p: int) -> int:
    return len(rref_mod_p(m, p))


def span(rows, p: int, width: int) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, width)
    return rref_mod_p(rows, p) if len(rows) else np.zeros((0, width), dtype=np.int64)


def contains(big: np.ndarray, small: np.ndarray, p: int) -> bool:
    """Whether the row space of ``small`` lies in that of ``big`` (an RREF basis)."""
    if len(small) == 0:
        return True
    return rank_mod_p(np.vstack([big, small]), p) == len(big)


def nullspace(m, p: int) -> np.ndarray:
    """Basis (as rows) of ``{v : m v = 0}``."""
    m = np.asarray(m, dtype=np.int64)
    cols = m.shape[1]
    r = rref_mod_p(m, p) if len(m) else np.zeros((0, cols), dtype=np.int64)
    pivots = [int(np.nonzero(row)[0][0]) for row in r]
    free = [c for c in range(cols) if c not in pivots]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for row, pc in zip(r, pivots):
            out[k, pc] = (-row[f]) % p
    return out


def intersect(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """RREF basis of the intersection of two row spaces (Zassenhaus)."""
    width = a.shape[1] if a.ndim == 2 and a.size else b.shape[1]
    if len(a) == 0 or len(b) == 0:
        return np.zeros((0, width), dtype=np.int64)
    top = np.hstack([a, a])
    bot = np.hstack([b, np.zeros_like(b)])
    r = rref_mod_p(np.vstack([top, bot]), p)
    lead_right = [row for row in r if not row[:width].any()]
    if not lead_right:
        return np.zeros((0, width), dtype=np.int64)
    return rref_mod_p(np.array(lead_right)[:, width:], p)


def subspaces(n: int, p: int, k: int) -> list[np.ndarray]:
    """All ``k``-dimensional subspaces of F_p^n as RREF ``k × n`` arrays."""
    out = []
    for pivots in itertools.combinations(range(n), k):
        free = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
        for vals in itertools.product(range(p), repeat=len(free)):
            m = np.zeros((k, n), dtype=np.int64)
            for i, pc in enumerate(pivots):
                m[i, pc] = 1
            for (i, c), v in zip(free, vals):
                m[i, c] = v
            out.append(m)
    return out


def gaussian_binomial(n: int, k: int, q: int) -> int:
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den
