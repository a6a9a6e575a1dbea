"""Compiled enumeration kernels over bit-packed codewords.

Codewords are rows of uint64 words, coordinate j living in word j // 64 at
bit j % 64. All kernels release the GIL so callers can fan chunks out over
threads; every kernel is a pure function of its chunk bounds.
"""

from __future__ import annotations

import numpy as np
from llvmlite import ir
from numba import njit, types
from numba.core import cgutils
from numba.extending import intrinsic


@intrinsic
def popcount64(typingctx, x):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        ty = ir.IntType(64)
        fn = cgutils.get_or_insert_function(builder.module, ir.FunctionType(ty, [ty]), "llvm.ctpop.i64")
        return builder.call(fn, [args[0]])

    return sig, codegen


@njit(cache=True, nogil=True)
def _lowbit_index(s):
    j = 0
    while (s >> j) & 1 == 0:
        j += 1
    return j


@njit(cache=True, nogil=True)
def _weight(words, W):
    c = 0
    for w in range(W):
        c += popcount64(words[w])
    return c


@njit(cache=True, nogil=True)
def gray_table(rows):
    """All 2^h XOR combinations of ``rows`` indexed by message."""
    h, W = rows.shape
    T = np.zeros((1 << h, W), dtype=np.uint64)
    for s in range(1, 1 << h):
        lb = s & (-s)
        j = _lowbit_index(s)
        for w in range(W):
            T[s, w] = T[s ^ lb, w] ^ rows[j, w]
    return T


@njit(cache=True, nogil=True)
def scan_chunk(table, high_rows, lo, hi, nbins):
    """Weight histogram of codewords whose high message part has Gray index in [lo, hi).

    The high part steps through reflected Gray order, so consecutive bases
    differ by one row; each base is combined with every entry of ``table``.
    """
    m, W = table.shape
    hist = np.zeros(nbins, dtype=np.int64)
    base = np.zeros(W, dtype=np.uint64)
    g = lo ^ (lo >> 1)
    j = 0
    while g >> j:
        if (g >> j) & 1:
            for w in range(W):
                base[w] ^= high_rows[j, w]
        j += 1
    for s in range(lo, hi):
        if s > lo:
            j = _lowbit_index(s)
            for w in range(W):
                base[w] ^= high_rows[j, w]
        if W == 1:
            b0 = base[0]
            for t in range(m):
                hist[popcount64(b0 ^ table[t, 0])] += 1
        elif W == 2:
            b0 = base[0]
            b1 = base[1]
            for t in range(m):
                hist[popcount64(b0 ^ table[t, 0]) + popcount64(b1 ^ table[t, 1])] += 1
        else:
            for t in range(m):
                c = 0
                for w in range(W):
                    c += popcount64(base[w] ^ table[t, w])
                hist[c] += 1
    return hist


@njit(cache=True, nogil=True)
def _accept(cw, W, wmax, prev_masks, t):
    # found earlier iff its restriction to an earlier information set has weight <= t
    c = _weight(cw, W)
    if c > wmax:
        return -1
    for p in range(prev_masks.shape[0]):
        r = 0
        for w in range(W):
            r += popcount64(cw[w] & prev_masks[p, w])
        if r <= t:
            return -1
    return c


@njit(cache=True, nogil=True)
def census_chunk(rows, prev_masks, t, wmax, weight, first, collect_w, buf):
    """Count codewords from messages of Hamming weight ``weight`` whose lowest
    set position is ``first``.

    ``rows`` is systematic on the current information set. A codeword is
    counted only if no earlier information set (``prev_masks``) would also
    produce it, which makes the union over sets duplicate-free. Codewords of
    weight ``collect_w`` are written to ``buf`` up to its capacity; the
    returned count may exceed the capacity, in which case the caller retries.
    """
    k, W = rows.shape
    hist = np.zeros(wmax + 1, dtype=np.int64)
    ncol = 0
    cap = buf.shape[0]
    if weight == 1:
        c = _accept(rows[first], W, wmax, prev_masks, t)
        if c >= 0:
            hist[c] += 1
            if c == collect_w:
                if ncol < cap:
                    for w in range(W):
                        buf[ncol, w] = rows[first, w]
                ncol += 1
        return hist, ncol
    idx = np.zeros(weight, dtype=np.int64)
    partial = np.zeros((weight, W), dtype=np.uint64)
    idx[0] = first
    for w in range(W):
        partial[0, w] = rows[first, w]
    d = 1
    idx[1] = first
    while d >= 1:
        idx[d] += 1
        if idx[d] > k - (weight - d):
            d -= 1
            continue
        r = idx[d]
        for w in range(W):
            partial[d, w] = partial[d - 1, w] ^ rows[r, w]
        if d == weight - 1:
            c = _accept(partial[d], W, wmax, prev_masks, t)
            if c >= 0:
                hist[c] += 1
                if c == collect_w:
                    if ncol < cap:
                        for w in range(W):
                            buf[ncol, w] = partial[d, w]
                    ncol += 1
        else:
            d += 1
            idx[d] = idx[d - 1]
    return hist, ncol


@njit(cache=True, nogil=True)
def pair_distance_counts(words, lo, hi, nbins):
    """Histogram of d(words[a], words[b]) over a in [lo, hi), b > a."""
    m, W = words.shape
    hist = np.zeros(nbins, dtype=np.int64)
    for a in range(lo, hi):
        if W == 2:
            a0 = words[a, 0]
            a1 = words[a, 1]
            for b in range(a + 1, m):
                hist[popcount64(a0 ^ words[b, 0]) + popcount64(a1 ^ words[b, 1])] += 1
        else:
            for b in range(a + 1, m):
                c = 0
                for w in range(W):
                    c += popcount64(words[a, w] ^ words[b, w])
                hist[c] += 1
    return hist


@njit(cache=True, nogil=True)
def subset_cover_counts(words, n, t, binom):
    """For each t-subset of coordinates (colex rank), count words whose support contains it."""
    m, W = words.shape
    counts = np.zeros(binom[n, t], dtype=np.int64)
    supp = np.zeros(n, dtype=np.int64)
    idx = np.zeros(t, dtype=np.int64)
    for a in range(m):
        s = 0
        for j in range(n):
            if (words[a, j >> 6] >> np.uint64(j & 63)) & np.uint64(1):
                supp[s] = j
                s += 1
        if t > s:
            continue
        for i in range(t):
            idx[i] = i
        while True:
            rank = 0
            for i in range(t):
                rank += binom[supp[idx[i]], i + 1]
            counts[rank] += 1
            # next combination of t indices out of s
            i = t - 1
            while i >= 0 and idx[i] == s - t + i:
                i -= 1
            if i < 0:
                break
            idx[i] += 1
            for q in range(i + 1, t):
                idx[q] = idx[q - 1] + 1
    return counts
