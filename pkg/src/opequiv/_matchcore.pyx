# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled matching kernels; contract-identical twin of _matchcore_py."""

from libc.stdlib cimport free, malloc

BACKEND = "compiled"


def verify_windows(a, b, int k0, int k1, int hi):
    """First (k, l) with sum(a[k..k+l-1]) > sum(b[k-1..k+l]), else None."""
    cdef int n = len(a)
    cdef long long *pa = <long long *> malloc((n + 1) * sizeof(long long))
    cdef long long *pb = <long long *> malloc((n + 1) * sizeof(long long))
    if pa == NULL or pb == NULL:
        free(pa)
        free(pb)
        raise MemoryError()
    cdef int i, k, l, alo, ahi, blo, bhi
    cdef long long left, right
    try:
        pa[0] = 0
        pb[0] = 0
        for i in range(n):
            pa[i + 1] = pa[i] + <long long> a[i]
            pb[i + 1] = pb[i] + <long long> b[i]
        for k in range(k0, k1 + 1):
            for l in range(1, hi - k + 2):
                ahi = k + l
                if ahi > n:
                    ahi = n
                alo = k
                if alo < 0:
                    alo = 0
                bhi = k + l + 1
                if bhi > n:
                    bhi = n
                blo = k - 1
                if blo < 0:
                    blo = 0
                left = pa[ahi] - pa[alo]
                right = pb[bhi] - pb[blo]
                if left > right:
                    return (k, l)
        return None
    finally:
        free(pa)
        free(pb)


cdef int _find(int *parent, int x):
    cdef int root = x
    cdef int nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def sdr_match(t_buckets, s_buckets, int width):
    """Greedy SDR over staircase candidate windows; -1 marks no free slot."""
    cdef int nt = len(t_buckets)
    cdef int ns = len(s_buckets)
    cdef int *sb = <int *> malloc((ns if ns else 1) * sizeof(int))
    cdef int *parent = <int *> malloc((ns + 1) * sizeof(int))
    if sb == NULL or parent == NULL:
        free(sb)
        free(parent)
        raise MemoryError()
    cdef int i, j, lo, hi, mid, slot
    out = []
    try:
        for i in range(ns):
            sb[i] = <int> s_buckets[i]
        for i in range(ns + 1):
            parent[i] = i
        for i in range(nt):
            j = <int> t_buckets[i]
            # bisect_left(sb, j - width)
            lo = 0
            hi = ns
            while lo < hi:
                mid = (lo + hi) // 2
                if sb[mid] < j - width:
                    lo = mid + 1
                else:
                    hi = mid
            slot = _find(parent, lo)
            # bisect_right(sb, j + width)
            lo = 0
            hi = ns
            while lo < hi:
                mid = (lo + hi) // 2
                if sb[mid] <= j + width:
                    lo = mid + 1
                else:
                    hi = mid
            if slot < lo:
                out.append(slot)
                parent[slot] = slot + 1
            else:
                out.append(-1)
        return out
    finally:
        free(sb)
        free(parent)
