"""Vectorized pair-statistics kernel for phi_4 with the (2,2) split.

The bucket engine enumerates all C(n,2) f-subsets once per E, which is
quadratic per E and quartic overall.  This kernel gets the same numbers in
roughly quadratic total time by never enumerating (E, F) pairs: for each E
it classifies every other arrow by its *gap signature* (which E-gap holds
its two endpoints; 15 classes) and arrow type (orientation x sign; 4
types), then counts F-pairs per placement map and pair type from those
statistics:

- pairs whose signatures share no gap have a forced interleaving, so their
  count is a product of two class counts;
- pairs sharing exactly one gap are resolved by ordered event-pair
  counters accumulated in a single left-to-right sweep per gap;
- pairs with identical span signatures need the joint order of both
  endpoint pairs, which the sweep cannot see; a per-class bitset over
  first-endpoint ranks counts those dominance pairs as the sweep passes
  their second endpoints.

The result is a dense integer tensor N[pE, lambda, pF] with 48 two-arrow
classes on each side and the 70 placement maps in the middle; the engine
maps nonzero cells through the superimposition key cache and divides by
C(4,2) as usual.  Everything is exact integer counting; the jit-compiled
and pure-Python paths run the same function body and agree bit for bit.

Set FTIK_NO_NUMBA=1 to force the pure-Python path even when numba is
installed; `fast_mode()` reports the effective state and is what the
engine's auto dispatch consults.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .gauss import Arrow, GaussDiagram, enumerate_placements, serialize

__all__ = ["HAS_NUMBA", "fast_mode", "phi4_pair_tensor", "CLASS_KEYS", "LAMS"]

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        if args and callable(args[0]):
            return args[0]
        return wrap


def fast_mode() -> bool:
    """True when the compiled kernel is available and not disabled."""
    return HAS_NUMBA and not os.environ.get("FTIK_NO_NUMBA")


# Pair patterns for two arrows x, y with m_x < m_y (m = smaller endpoint,
# M = larger): D puts x entirely before y, N nests y inside x, C crosses.
_D, _N, _C = 0, 1, 2

# Arrow type: bit 1 = head comes first (M is the tail side), bit 0 = sign<0.
# Pair class: pattern*16 + type(first)*4 + type(second), 48 classes total.


def _class_diagram(pat: int, t1: int, t2: int) -> GaussDiagram:
    if pat == _D:
        spans = ((0, 1), (2, 3))
    elif pat == _N:
        spans = ((0, 3), (1, 2))
    else:
        spans = ((0, 2), (1, 3))
    arrows = []
    for (mpos, Mpos), t in zip(spans, (t1, t2)):
        sign = -1 if t & 1 else 1
        if t >> 1:
            arrows.append(Arrow(Mpos, mpos, sign))
        else:
            arrows.append(Arrow(mpos, Mpos, sign))
    return GaussDiagram(tuple(arrows))


_CLASS_DIAGRAMS = [
    _class_diagram(pat, t1, t2)
    for pat in (_D, _N, _C)
    for t1 in range(4)
    for t2 in range(4)
]
CLASS_KEYS = [serialize(d) for d in _CLASS_DIAGRAMS]
LAMS = list(enumerate_placements(2, 2))
_LAMIDX = {lam: i for i, lam in enumerate(LAMS)}

_POP16 = np.array([bin(i).count("1") for i in range(1 << 16)], np.int64)


def _build_static_tables():
    """Decode tables mapping per-E statistics to tensor cells.

    Event classes within one gap sweep: kind (0 = smaller endpoint, 1 =
    larger) * 20 + type * 5 + gap of the arrow's other endpoint, 40 total.
    The sweep accumulates P2[later class][earlier class]; the entries
    built here say which cells feed which (lambda, pF) targets and with
    what sign.  Signatures sigma = (gap of m, gap of M) are indexed 0..14.
    """
    sig_id = np.full((5, 5), -1, np.int32)
    sigs = []
    for u in range(5):
        for v in range(u, 5):
            sig_id[u, v] = len(sigs)
            sigs.append((u, v))
    sig_u = np.array([s[0] for s in sigs], np.int32)
    sig_v = np.array([s[1] for s in sigs], np.int32)

    def lam_of(*gaps):
        return _LAMIDX[tuple(sorted(gaps))]

    def pf(pat, t1, t2):
        return pat * 16 + t1 * 4 + t2

    # Products: strata where the interleaving is already decided at the
    # signature level.  Fully separated signatures force the pattern; a
    # strictly-later second arrow sharing only x's M-gap defaults to C and
    # is corrected by sweep cells below.
    sep1, sep2, sepbase = [], [], []
    for i1, (u1, v1) in enumerate(sigs):
        for i2, (u2, v2) in enumerate(sigs):
            shared = {u1, v1} & {u2, v2}
            if not shared:
                if v1 < u2:
                    pat = _D
                elif u1 < u2 and v2 < v1:
                    pat = _N
                elif u1 < u2 and u2 < v1 and v1 < v2:
                    pat = _C
                else:
                    continue  # the transposed iteration counts these
                sep1.append(i1)
                sep2.append(i2)
                sepbase.append(lam_of(u1, v1, u2, v2) * 48 + pat * 16)
            elif u1 < u2 and (v1 == u2 or v1 == v2):
                sep1.append(i1)
                sep2.append(i2)
                sepbase.append(lam_of(u1, v1, u2, v2) * 48 + _C * 16)

    # Sweep decode entries, grouped by the gap being swept.
    per_gap = [[] for _ in range(5)]
    for g in range(5):
        for c1 in range(40):
            k1, t1, o1 = c1 // 20, (c1 % 20) // 5, c1 % 5
            if (k1 == 0 and o1 < g) or (k1 == 1 and o1 > g):
                continue  # geometrically impossible class in this gap
            s1 = (g, o1) if k1 == 0 else (o1, g)
            for c2 in range(40):
                k2, t2, o2 = c2 // 20, (c2 % 20) // 5, c2 % 5
                if (k2 == 0 and o2 < g) or (k2 == 1 and o2 > g):
                    continue
                s2 = (g, o2) if k2 == 0 else (o2, g)
                if s1 == s2:
                    continue  # same-signature pairs use bitsets + P2 reads
                targets = []
                if k1 == 0 and k2 == 0:
                    # both smaller endpoints in g; the earlier arrow is x
                    if o2 == g:  # x flat in g, y spans out: all x-first
                        targets.append(
                            (lam_of(g, g, g, o1) * 48 + pf(_C, t2, t1), 1)
                        )
                    elif o1 == g:  # y flat inside spanning x: nested
                        targets.append(
                            (lam_of(g, g, g, o2) * 48 + pf(_N, t2, t1), 1)
                        )
                    elif o2 < o1:
                        targets.append(
                            (lam_of(g, g, o1, o2) * 48 + pf(_C, t2, t1), 1)
                        )
                    else:
                        targets.append(
                            (lam_of(g, g, o1, o2) * 48 + pf(_N, t2, t1), 1)
                        )
                elif k1 == 0 and k2 == 1:
                    # x's larger endpoint precedes y's smaller one in g:
                    # the pair is disjoint, correcting the C default
                    base = lam_of(o2, g, g, o1) * 48
                    targets.append((base + pf(_D, t2, t1), 1))
                    targets.append((base + pf(_C, t2, t1), -1))
                elif k1 == 1 and k2 == 1 and o1 < o2:
                    # y's larger endpoint precedes x's: nested, not crossed
                    base = lam_of(o1, o2, g, g) * 48
                    targets.append((base + pf(_N, t1, t2), 1))
                    targets.append((base + pf(_C, t1, t2), -1))
                if targets:
                    per_gap[g].append((c1, c2, targets))

    dstart = np.zeros(6, np.int32)
    dc1, dc2, dnum = [], [], []
    dtgt, dsgn = [], []
    for g in range(5):
        dstart[g + 1] = dstart[g] + len(per_gap[g])
        for c1, c2, targets in per_gap[g]:
            dc1.append(c1)
            dc2.append(c2)
            dnum.append(len(targets))
            pads = targets + [(0, 0)] * (2 - len(targets))
            dtgt.append([pads[0][0], pads[1][0]])
            dsgn.append([pads[0][1], pads[1][1]])

    flat_base = np.array([lam_of(g, g, g, g) * 48 for g in range(5)], np.int64)
    span_n = np.zeros(15, np.int64)
    span_c = np.zeros(15, np.int64)
    for sid, (u, v) in enumerate(sigs):
        if u < v:
            base = lam_of(u, u, v, v) * 48
            span_n[sid] = base + _N * 16
            span_c[sid] = base + _C * 16

    return {
        "sig_id": sig_id,
        "sig_u": sig_u,
        "sig_v": sig_v,
        "sep1": np.array(sep1, np.int32),
        "sep2": np.array(sep2, np.int32),
        "sepbase": np.array(sepbase, np.int64),
        "dstart": dstart,
        "dc1": np.array(dc1, np.int32),
        "dc2": np.array(dc2, np.int32),
        "dnum": np.array(dnum, np.int32),
        "dtgt": np.array(dtgt, np.int64),
        "dsgn": np.array(dsgn, np.int64),
        "flat_base": flat_base,
        "span_n": span_n,
        "span_c": span_c,
    }


_T = _build_static_tables()


def _tensor_core(
    n,
    n2,
    am,
    aM,
    atau,
    pos_arrow,
    pos_is_m,
    sig_id,
    sig_u,
    sig_v,
    sep1,
    sep2,
    sepbase,
    dstart,
    dc1,
    dc2,
    dnum,
    dtgt,
    dsgn,
    flat_base,
    span_n,
    span_c,
    pop16,
):
    NT = np.zeros(48 * 3360, np.int64)
    P2 = np.zeros((40, 40), np.int32)
    seen = np.zeros(40, np.int32)
    touched = np.zeros(40, np.int32)
    row_used = np.zeros(40, np.uint8)
    cnt = np.zeros((4, 15), np.int64)
    pmm = np.zeros((15, 16), np.int64)
    ncacc = np.zeros((15, 16), np.int64)
    arr_rank = np.zeros(n if n else 1, np.int32)
    arr_mgap = np.zeros(n if n else 1, np.int32)
    grp_cnt = np.zeros(15, np.int32)
    W = (n + 63) // 64
    if W == 0:
        W = 1
    bits = np.zeros(15 * 4 * W, np.uint64)
    nsep = sep1.shape[0]
    one = np.uint64(1)

    for p in range(n - 1):
        mp = am[p]
        Mp = aM[p]
        for r in range(p + 1, n):
            mr = am[r]
            Mr = aM[r]
            if mp < mr:
                tx = atau[p]
                ty = atau[r]
                disj = Mp < mr
                nest = Mr < Mp
            else:
                tx = atau[r]
                ty = atau[p]
                disj = Mr < mp
                nest = Mp < Mr
            if disj:
                pat = _D
            elif nest:
                pat = _N
            else:
                pat = _C
            pEbase = (pat * 16 + tx * 4 + ty) * 3360

            # sort the four endpoint positions
            e0 = mp
            e1 = mr
            if e1 < e0:
                e0, e1 = e1, e0
            e2 = Mp
            e3 = Mr
            if e3 < e2:
                e2, e3 = e3, e2
            if e2 < e1:
                e1, e2 = e2, e1
                if e1 < e0:
                    e0, e1 = e1, e0
                if e3 < e2:
                    e2, e3 = e3, e2

            for a in range(4):
                for b in range(15):
                    cnt[a, b] = 0
            for a in range(15):
                grp_cnt[a] = 0
                for b in range(16):
                    pmm[a, b] = 0
                    ncacc[a, b] = 0
            for a in range(15 * 4 * W):
                bits[a] = 0

            for g in range(5):
                if g == 0:
                    lo = 0
                    hi = e0
                elif g == 1:
                    lo = e0 + 1
                    hi = e1
                elif g == 2:
                    lo = e1 + 1
                    hi = e2
                elif g == 3:
                    lo = e2 + 1
                    hi = e3
                else:
                    lo = e3 + 1
                    hi = n2
                ntouch = 0
                for pos in range(lo, hi):
                    i = pos_arrow[pos]
                    t = atau[i]
                    if pos_is_m[pos] == 1:
                        q = aM[i]
                        if q < e0:
                            og = 0
                        elif q < e1:
                            og = 1
                        elif q < e2:
                            og = 2
                        elif q < e3:
                            og = 3
                        else:
                            og = 4
                        arr_mgap[i] = g
                        sid = sig_id[g, og]
                        arr_rank[i] = grp_cnt[sid]
                        grp_cnt[sid] += 1
                        cnt[t, sid] += 1
                        c = t * 5 + og
                    else:
                        u = arr_mgap[i]
                        sid = sig_id[u, g]
                        rk = arr_rank[i]
                        full = rk >> 6
                        rem = rk & 63
                        base = sid * 4 * W
                        for t1 in range(4):
                            b0 = base + t1 * W
                            s = 0
                            for w in range(full):
                                x = bits[b0 + w]
                                s += (
                                    pop16[x & np.uint64(0xFFFF)]
                                    + pop16[(x >> np.uint64(16)) & np.uint64(0xFFFF)]
                                    + pop16[(x >> np.uint64(32)) & np.uint64(0xFFFF)]
                                    + pop16[x >> np.uint64(48)]
                                )
                            if rem:
                                x = bits[b0 + full] & (
                                    (one << np.uint64(rem)) - one
                                )
                                s += (
                                    pop16[x & np.uint64(0xFFFF)]
                                    + pop16[(x >> np.uint64(16)) & np.uint64(0xFFFF)]
                                    + pop16[(x >> np.uint64(32)) & np.uint64(0xFFFF)]
                                    + pop16[x >> np.uint64(48)]
                                )
                            ncacc[sid, t1 * 4 + t] += s
                        bits[base + t * W + full] |= one << np.uint64(rem)
                        c = 20 + t * 5 + u
                    if row_used[c] == 0:
                        row_used[c] = 1
                        touched[ntouch] = c
                        ntouch += 1
                    for j in range(40):
                        P2[c, j] += seen[j]
                    seen[c] += 1

                # decode this gap's single-coupling cells
                for idx in range(dstart[g], dstart[g + 1]):
                    v = P2[dc1[idx], dc2[idx]]
                    if v != 0:
                        NT[pEbase + dtgt[idx, 0]] += v * dsgn[idx, 0]
                        if dnum[idx] == 2:
                            NT[pEbase + dtgt[idx, 1]] += v * dsgn[idx, 1]

                # save ordered first-endpoint marginals for span groups
                # rooted in this gap; their flush happens after the walk
                for v_ in range(g + 1, 5):
                    sid = sig_id[g, v_]
                    if grp_cnt[sid] > 1:
                        for t2 in range(4):
                            cy = t2 * 5 + v_
                            for t1 in range(4):
                                pmm[sid, t1 * 4 + t2] += P2[cy, t1 * 5 + v_]

                # flat group: all four endpoints inside this gap
                sidf = sig_id[g, g]
                if grp_cnt[sidf] > 1:
                    fd = flat_base[g] + _D * 16
                    fn = flat_base[g] + _N * 16
                    fc = flat_base[g] + _C * 16
                    for t1 in range(4):
                        for t2 in range(4):
                            allp = P2[t2 * 5 + g, t1 * 5 + g]
                            dcnt = P2[t2 * 5 + g, 20 + t1 * 5 + g]
                            cval = ncacc[sidf, t1 * 4 + t2] - dcnt
                            nval = allp - dcnt - cval
                            o = t1 * 4 + t2
                            if dcnt != 0:
                                NT[pEbase + fd + o] += dcnt
                            if cval != 0:
                                NT[pEbase + fc + o] += cval
                            if nval != 0:
                                NT[pEbase + fn + o] += nval

                for j in range(ntouch):
                    row = touched[j]
                    row_used[row] = 0
                    for col in range(40):
                        P2[row, col] = 0
                for j in range(40):
                    seen[j] = 0

            # span groups: crossings were counted by the bitsets, nested
            # pairs are the remaining first-endpoint-ordered pairs
            for sid in range(15):
                if sig_u[sid] < sig_v[sid] and grp_cnt[sid] > 1:
                    bn = span_n[sid]
                    bc = span_c[sid]
                    for o in range(16):
                        cval = ncacc[sid, o]
                        nval = pmm[sid, o] - cval
                        if cval != 0:
                            NT[pEbase + bc + o] += cval
                        if nval != 0:
                            NT[pEbase + bn + o] += nval

            # separated strata: pure products of class counts
            for j in range(nsep):
                s1 = sep1[j]
                b = sepbase[j]
                for t1 in range(4):
                    c1 = cnt[t1, s1]
                    if c1 == 0:
                        continue
                    s2 = sep2[j]
                    bb = pEbase + b + t1 * 4
                    for t2 in range(4):
                        c2 = cnt[t2, s2]
                        if c2 != 0:
                            NT[bb + t2] += c1 * c2
    return NT


_core_py = _tensor_core
_core_jit = njit(cache=True)(_tensor_core) if HAS_NUMBA else _tensor_core


def _diagram_arrays(K: GaussDiagram):
    n = K.n
    am = np.empty(n, np.int64)
    aM = np.empty(n, np.int64)
    atau = np.empty(n, np.int64)
    pos_arrow = np.empty(2 * n, np.int64)
    pos_is_m = np.zeros(2 * n, np.int64)
    for i, a in enumerate(K.arrows):
        if a.tail < a.head:
            m, M, headfirst = a.tail, a.head, 0
        else:
            m, M, headfirst = a.head, a.tail, 1
        am[i] = m
        aM[i] = M
        atau[i] = 2 * headfirst + (1 if a.sign < 0 else 0)
        pos_arrow[m] = i
        pos_arrow[M] = i
        pos_is_m[m] = 1
    return am, aM, atau, pos_arrow, pos_is_m


def phi4_pair_tensor(K: GaussDiagram):
    """Count (E, F) pairs of disjoint 2-subsets by (class, placement,
    class).  Returns (pe_keys, lams, pf_keys, idx, cnt, stats) where idx
    rows index into the key/placement lists and cnt holds the counts."""
    n = K.n
    am, aM, atau, pos_arrow, pos_is_m = _diagram_arrays(K)
    core = _core_jit if fast_mode() else _core_py
    flat = core(
        n,
        2 * n,
        am,
        aM,
        atau,
        pos_arrow,
        pos_is_m,
        _T["sig_id"],
        _T["sig_u"],
        _T["sig_v"],
        _T["sep1"],
        _T["sep2"],
        _T["sepbase"],
        _T["dstart"],
        _T["dc1"],
        _T["dc2"],
        _T["dnum"],
        _T["dtgt"],
        _T["dsgn"],
        _T["flat_base"],
        _T["span_n"],
        _T["span_c"],
        _POP16,
    )
    nz = np.nonzero(flat)[0]
    cnt = flat[nz]
    idx = np.empty((nz.shape[0], 3), np.int32)
    idx[:, 0] = nz // 3360
    idx[:, 1] = (nz % 3360) // 48
    idx[:, 2] = nz % 48
    stats = {
        "engine": "kernel",
        "subdiagrams": 2 * math.comb(n, 2),
        "table_entries": int(nz.shape[0]),
        "table_queries": math.comb(n, 2),
    }
    return CLASS_KEYS, LAMS, CLASS_KEYS, idx, cnt, stats
