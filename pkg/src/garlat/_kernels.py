"""Hot numeric kernels: BFS distance rows, triangle/quadrangle scans, RREF mod p.

Every kernel exists twice: a numba ``@njit`` loop version and a vectorised
pure-numpy version.  The numba path is used when numba imports cleanly and
the environment variable ``GARLAT_PURE_NUMPY`` is unset (or "0").  Both
paths must return identical arrays; the test-suite checks this and
``benchmarks/bench_kernels.py`` times them against each other.

Graphs are passed in CSR form (``indptr``, ``indices``) with every
neighbour row sorted ascending.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba as nb

    HAVE_NUMBA = True
except Exception:  # pragma: no cover - numba is optional
    nb = None
    HAVE_NUMBA = False


def _env_pure_numpy() -> bool:
    return os.environ.get("GARLAT_PURE_NUMPY", "0").lower() not in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and not _env_pure_numpy()


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def _jit(fn):
    if HAVE_NUMBA:
        return nb.njit(cache=True)(fn)
    return fn


# ---------------------------------------------------------------------------
# numba loop kernels


@_jit
def _has_edge(indptr, indices, u, v):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        w = indices[mid]
        if w == v:
            return True
        if w < v:
            lo = mid + 1
        else:
            hi = mid
    return False


@_jit
def _bfs_rows_loop(indptr, indices, sources):
    n = indptr.shape[0] - 1
    out = np.full((sources.shape[0], n), -1, dtype=np.int32)
    queue = np.empty(n, dtype=np.int64)
    for r in range(sources.shape[0]):
        s = sources[r]
        row = out[r]
        row[s] = 0
        head = 0
        tail = 1
        queue[0] = s
        while head < tail:
            u = queue[head]
            head += 1
            du = row[u] + 1
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if row[v] < 0:
                    row[v] = du
                    queue[tail] = v
                    tail += 1
    return out


@_jit
def _tc_scan_loop(indptr, indices, dist, nmax):
    n = indptr.shape[0] - 1
    inst = np.zeros(nmax + 1, dtype=np.int64)
    fails = np.zeros(nmax + 1, dtype=np.int64)
    first = np.full((nmax + 1, 2), -1, dtype=np.int64)
    for u in range(n):
        lev = dist[u]
        if lev < 2 or lev > nmax:
            continue
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if v <= u or dist[v] != lev:
                continue
            inst[lev] += 1
            found = False
            for j in range(indptr[u], indptr[u + 1]):
                w = indices[j]
                if dist[w] == lev - 1 and _has_edge(indptr, indices, v, w):
                    found = True
                    break
            if not found:
                if fails[lev] == 0:
                    first[lev, 0] = u
                    first[lev, 1] = v
                fails[lev] += 1
    return inst, fails, first


@_jit
def _qc_scan_loop(indptr, indices, dist, nmax):
    n = indptr.shape[0] - 1
    inst = np.zeros(nmax + 1, dtype=np.int64)
    fails = np.zeros(nmax + 1, dtype=np.int64)
    first = np.full((nmax + 1, 2), -1, dtype=np.int64)
    stamp = np.full(n, -1, dtype=np.int64)
    for y in range(n):
        lev = dist[y]
        if lev < 2 or lev > nmax:
            continue
        for k in range(indptr[y], indptr[y + 1]):
            t = indices[k]
            if dist[t] != lev + 1:
                continue
            for j in range(indptr[t], indptr[t + 1]):
                z = indices[j]
                if z <= y or dist[z] != lev or stamp[z] == y:
                    continue
                stamp[z] = y
                if _has_edge(indptr, indices, y, z):
                    continue
                inst[lev] += 1
                found = False
                for i in range(indptr[y], indptr[y + 1]):
                    w = indices[i]
                    if dist[w] == lev - 1 and _has_edge(indptr, indices, z, w):
                        found = True
                        break
                if not found:
                    if fails[lev] == 0 or y < first[lev, 0] or (y == first[lev, 0] and z < first[lev, 1]):
                        first[lev, 0] = y
                        first[lev, 1] = z
                    fails[lev] += 1
    return inst, fails, first


@_jit
def _rref_loop(m, p, inv):
    a = m.copy()
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i, c] % p != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                tmp = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = tmp
        f = inv[a[r, c] % p]
        for j in range(cols):
            a[r, j] = (a[r, j] * f) % p
        for i in range(rows):
            if i != r:
                g = a[i, c] % p
                if g != 0:
                    for j in range(cols):
                        a[i, j] = (a[i, j] - g * a[r, j]) % p
        r += 1
    return a[:r].copy()


# ---------------------------------------------------------------------------
# numpy vectorised kernels


def _expand(indptr, rows):
    """Flatten the CSR rows ``rows``: returns (owner position, neighbour)."""
    starts = indptr[rows]
    counts = indptr[rows + 1] - starts
    total = int(counts.sum())
    owner = np.repeat(np.arange(len(rows)), counts)
    offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    return owner, starts[owner] + offs


def _edge_keys(indptr, indices):
    n = len(indptr) - 1
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    return src * n + indices.astype(np.int64)


def _adjacent(keys, n, u, v):
    q = u.astype(np.int64) * n + v.astype(np.int64)
    if len(keys) == 0:
        return np.zeros(len(q), dtype=bool)
    pos = np.minimum(np.searchsorted(keys, q), len(keys) - 1)
    return keys[pos] == q


def _bfs_rows_vec(indptr, indices, sources):
    n = len(indptr) - 1
    out = np.full((len(sources), n), -1, dtype=np.int32)
    for r, s in enumerate(sources):
        row = out[r]
        row[s] = 0
        frontier = np.array([s], dtype=np.int64)
        d = 0
        while len(frontier):
            d += 1
            _, nbrs = _expand(indptr, frontier)
            nbrs = np.unique(indices[nbrs])
            nbrs = nbrs[row[nbrs] < 0]
            row[nbrs] = d
            frontier = nbrs
    return out


def _witness_found(indptr, indices, keys, dist, a, b, lev):
    """For each pair (a[i], b[i]) test for a common neighbour at level lev[i]-1."""
    n = len(indptr) - 1
    ok = np.zeros(len(a), dtype=bool)
    if len(a) == 0:
        return ok
    owner, pos = _expand(indptr, a)
    w = indices[pos]
    keep = dist[w] == lev[owner] - 1
    owner, w = owner[keep], w[keep]
    hit = _adjacent(keys, n, b[owner], w)
    ok[owner[hit]] = True
    return ok


def _summarise(a, b, lev, ok, nmax):
    inst = np.bincount(lev, minlength=nmax + 1).astype(np.int64)[: nmax + 1]
    bad = ~ok
    fails = np.bincount(lev[bad], minlength=nmax + 1).astype(np.int64)[: nmax + 1]
    first = np.full((nmax + 1, 2), -1, dtype=np.int64)
    if bad.any():
        fa, fb, fl = a[bad], b[bad], lev[bad]
        order = np.lexsort((fb, fa, fl))
        fa, fb, fl = fa[order], fb[order], fl[order]
        levels, idx = np.unique(fl, return_index=True)
        first[levels, 0] = fa[idx]
        first[levels, 1] = fb[idx]
    return inst, fails, first


def _tc_scan_vec(indptr, indices, dist, nmax):
    n = len(indptr) - 1
    keys = _edge_keys(indptr, indices)
    src = keys // n
    dst = keys % n
    d = dist.astype(np.int64)
    mask = (src < dst) & (d[src] == d[dst]) & (d[src] >= 2) & (d[src] <= nmax)
    u, v = src[mask], dst[mask]
    lev = d[u]
    ok = _witness_found(indptr, indices, keys, d, u, v, lev)
    return _summarise(u, v, lev, ok, nmax)


def _qc_scan_vec(indptr, indices, dist, nmax):
    n = len(indptr) - 1
    keys = _edge_keys(indptr, indices)
    src = keys // n
    dst = keys % n
    d = dist.astype(np.int64)
    mask = (d[src] >= 2) & (d[src] <= nmax) & (d[dst] == d[src] + 1)
    y, t = src[mask], dst[mask]
    owner, pos = _expand(indptr, t)
    z = indices[pos].astype(np.int64)
    yy = y[owner]
    keep = (z > yy) & (d[z] == d[yy])
    yy, z = yy[keep], z[keep]
    pair = np.unique(yy * n + z)
    yy, z = pair // n, pair % n
    apart = ~_adjacent(keys, n, yy, z)
    yy, z = yy[apart], z[apart]
    lev = d[yy]
    ok = _witness_found(indptr, indices, keys, d, yy, z, lev)
    return _summarise(yy, z, lev, ok, nmax)


def _rref_vec(m, p, inv):
    a = m.copy() % p
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if len(nz) == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * inv[a[r, c]]) % p
        g = a[:, c].copy()
        g[r] = 0
        a = (a - np.outer(g, a[r])) % p
        r += 1
    return a[:r].copy()


# ---------------------------------------------------------------------------
# dispatch

_LOOP = {"bfs": _bfs_rows_loop, "tc": _tc_scan_loop, "qc": _qc_scan_loop, "rref": _rref_loop}
_VEC = {"bfs": _bfs_rows_vec, "tc": _tc_scan_vec, "qc": _qc_scan_vec, "rref": _rref_vec}


def _impl(name: str, use_numba: bool | None):
    if use_numba is None:
        use_numba = USE_NUMBA
    return (_LOOP if use_numba and HAVE_NUMBA else _VEC)[name]


def bfs_rows(indptr, indices, sources, use_numba=None) -> np.ndarray:
    """Distances from each source to every vertex (-1 when unreachable)."""
    sources = np.asarray(sources, dtype=np.int64)
    return _impl("bfs", use_numba)(indptr, indices, sources)


def tc_scan(indptr, indices, dist, nmax, use_numba=None):
    """Triangle-condition scan around the basepoint whose distance row is ``dist``.

    Returns ``(instances, failures, first)`` indexed by radius ``n``; ``first[n]``
    is the lexicographically smallest failing adjacent pair at that radius.
    """
    dist = np.asarray(dist, dtype=np.int32)
    return _impl("tc", use_numba)(indptr, indices, dist, int(nmax))


def qc_scan(indptr, indices, dist, nmax, use_numba=None):
    """Quadrangle-condition scan; same output layout as :func:`tc_scan`."""
    dist = np.asarray(dist, dtype=np.int32)
    return _impl("qc", use_numba)(indptr, indices, dist, int(nmax))


_INV_CACHE: dict[int, np.ndarray] = {}


def _inverses(p: int) -> np.ndarray:
    inv = _INV_CACHE.get(p)
    if inv is None:
        inv = np.zeros(p, dtype=np.int64)
        for a in range(1, p):
            inv[a] = pow(a, p - 2, p)
        _INV_CACHE[p] = inv
    return inv


def rref_mod_p(m, p: int, use_numba=None) -> np.ndarray:
    """Reduced row echelon form over F_p with zero rows dropped."""
    m = np.asarray(m, dtype=np.int64) % p
    if m.ndim != 2 or m.shape[0] == 0:
        return np.zeros((0, m.shape[-1] if m.ndim == 2 else 0), dtype=np.int64)
    return _impl("rref", use_numba)(m, p, _inverses(p))
