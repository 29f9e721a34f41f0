"""Pure-Python matching kernels.

Twin of the compiled extension module ``_matchcore``; same contracts,
byte-identical outputs. Both operate on plain integer arrays so the caller
owns all bucket-index bookkeeping.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right

BACKEND = "python"


def verify_windows(a, b, k0: int, k1: int, hi: int):
    """First (k, l) with sum(a[k..k+l-1]) > sum(b[k-1..k+l]), else None.

    ``a`` and ``b`` are equal-length sequences of nonnegative ints indexed in
    array coordinates; windows are scanned for k in [k0, k1], l in
    [1, hi - k + 1]; out-of-range entries count as zero.
    """
    n = len(a)
    pa = [0] * (n + 1)
    pb = [0] * (n + 1)
    for i in range(n):
        pa[i + 1] = pa[i] + a[i]
        pb[i + 1] = pb[i] + b[i]
    for k in range(k0, k1 + 1):
        for l in range(1, hi - k + 2):
            left = pa[min(k + l, n)] - pa[max(k, 0)]
            right = pb[min(k + l + 1, n)] - pb[max(k - 1, 0)]
            if left > right:
                return (k, l)
    return None


def sdr_match(t_buckets, s_buckets, width: int):
    """Greedy system of distinct representatives for staircase windows.

    Each element of ``t_buckets`` (sorted ascending) claims the lowest unused
    slot of ``s_buckets`` (sorted ascending) whose bucket lies within
    ``width`` of its own. Returns one slot index per element, -1 when no slot
    is available. Least-slot greedy is optimal here because candidate ranges
    are nested staircase intervals.
    """
    ns = len(s_buckets)
    parent = list(range(ns + 1))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    out = []
    for j in t_buckets:
        lo = bisect_left(s_buckets, j - width)
        hi = bisect_right(s_buckets, j + width)
        slot = find(lo)
        if slot < hi:
            out.append(slot)
            parent[slot] = slot + 1
        else:
            out.append(-1)
    return out
