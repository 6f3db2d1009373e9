"""Jit-compiled stage-1 merge scheduler.

Mirrors agglomerate._merge_schedule_py exactly: same float expressions, same
lazy-invalidation heap with a (delta, min_leaf, min_leaf, id, id) total order,
same zero-cut fold. Keep the two in lockstep; the test suite asserts the
schedules are identical array-for-array.
"""

import numpy as np
from numba import njit, types
from numba.typed import Dict, List


@njit(cache=True)
def _less(hd, ht1, ht2, ha, hb, i, j):
    if hd[i] != hd[j]:
        return hd[i] < hd[j]
    if ht1[i] != ht1[j]:
        return ht1[i] < ht1[j]
    if ht2[i] != ht2[j]:
        return ht2[i] < ht2[j]
    if ha[i] != ha[j]:
        return ha[i] < ha[j]
    return hb[i] < hb[j]


@njit(cache=True)
def _swap(hd, ht1, ht2, ha, hb, i, j):
    hd[i], hd[j] = hd[j], hd[i]
    ht1[i], ht1[j] = ht1[j], ht1[i]
    ht2[i], ht2[j] = ht2[j], ht2[i]
    ha[i], ha[j] = ha[j], ha[i]
    hb[i], hb[j] = hb[j], hb[i]


@njit(cache=True)
def _push(hd, ht1, ht2, ha, hb, hn, d, t1, t2, a, b):
    cap = hd.shape[0]
    if hn >= cap:
        ncap = 2 * cap
        nhd = np.empty(ncap, np.float64)
        nht1 = np.empty(ncap, np.int64)
        nht2 = np.empty(ncap, np.int64)
        nha = np.empty(ncap, np.int64)
        nhb = np.empty(ncap, np.int64)
        nhd[:cap] = hd
        nht1[:cap] = ht1
        nht2[:cap] = ht2
        nha[:cap] = ha
        nhb[:cap] = hb
        hd, ht1, ht2, ha, hb = nhd, nht1, nht2, nha, nhb
    hd[hn] = d
    ht1[hn] = t1
    ht2[hn] = t2
    ha[hn] = a
    hb[hn] = b
    i = hn
    while i > 0:
        p = (i - 1) // 2
        if _less(hd, ht1, ht2, ha, hb, i, p):
            _swap(hd, ht1, ht2, ha, hb, i, p)
            i = p
        else:
            break
    return hd, ht1, ht2, ha, hb, hn + 1


@njit(cache=True)
def _pop(hd, ht1, ht2, ha, hb, hn):
    d = hd[0]
    t1 = ht1[0]
    t2 = ht2[0]
    a = ha[0]
    b = hb[0]
    hn -= 1
    if hn > 0:
        hd[0] = hd[hn]
        ht1[0] = ht1[hn]
        ht2[0] = ht2[hn]
        ha[0] = ha[hn]
        hb[0] = hb[hn]
        i = 0
        while True:
            l = 2 * i + 1
            if l >= hn:
                break
            s = l
            r = l + 1
            if r < hn and _less(hd, ht1, ht2, ha, hb, r, l):
                s = r
            if _less(hd, ht1, ht2, ha, hb, s, i):
                _swap(hd, ht1, ht2, ha, hb, s, i)
                i = s
            else:
                break
    return d, t1, t2, a, b, hn


@njit(cache=True)
def merge_schedule_kernel(n, deg, eu, ev):
    m = eu.shape[0]
    vol_g = 0.0
    for i in range(n):
        vol_g += deg[i]
    cap = 2 * n if n > 0 else 2
    vol = np.zeros(cap, np.int64)
    ml = np.zeros(cap, np.int64)
    alive = np.zeros(cap, np.uint8)
    for i in range(n):
        vol[i] = deg[i]
        ml[i] = i
        alive[i] = 1
    cuts = List()
    for _ in range(cap):
        cuts.append(Dict.empty(types.int64, types.int64))
    for i in range(m):
        u = eu[i]
        v = ev[i]
        cuts[u][v] = 1
        cuts[v][u] = 1

    hcap = 2 * m + 16
    hd = np.empty(hcap, np.float64)
    ht1 = np.empty(hcap, np.int64)
    ht2 = np.empty(hcap, np.int64)
    ha = np.empty(hcap, np.int64)
    hb = np.empty(hcap, np.int64)
    hn = 0
    for i in range(m):
        u = eu[i]
        v = ev[i]
        c = cuts[u][v]
        d = (2.0 * c / vol_g) * np.log2((vol[u] + vol[v]) / vol_g)
        hd, ht1, ht2, ha, hb, hn = _push(hd, ht1, ht2, ha, hb, hn, d, u, v, u, v)

    cap_out = n if n > 0 else 1
    out_l = np.empty(cap_out, np.int64)
    out_r = np.empty(cap_out, np.int64)
    out_c = np.empty(cap_out, np.int64)
    out_d = np.empty(cap_out, np.float64)
    nout = 0
    live = n
    nxt = n
    while live > 2:
        found = False
        a = np.int64(-1)
        b = np.int64(-1)
        dab = 0.0
        while hn > 0:
            d, t1, t2, x, y, hn = _pop(hd, ht1, ht2, ha, hb, hn)
            if alive[x] == 1 and alive[y] == 1:
                a = x
                b = y
                dab = d
                found = True
                break
        if not found:
            # No crossing edges remain among live nodes: fold the rest into a
            # left chain by ascending min-leaf, every step entropy-neutral.
            cnt = 0
            for i in range(nxt):
                if alive[i] == 1:
                    cnt += 1
            rml = np.empty(cnt, np.int64)
            rid = np.empty(cnt, np.int64)
            j = 0
            for i in range(nxt):
                if alive[i] == 1:
                    rid[j] = i
                    rml[j] = ml[i]
                    j += 1
            order = np.argsort(rml)
            acc = rid[order[0]]
            idx = 1
            while live > 2:
                z = rid[order[idx]]
                idx += 1
                w = nxt
                nxt += 1
                vol[w] = vol[acc] + vol[z]
                ml[w] = ml[acc] if ml[acc] < ml[z] else ml[z]
                alive[acc] = 0
                alive[z] = 0
                alive[w] = 1
                live -= 1
                out_l[nout] = acc if ml[acc] <= ml[z] else z
                out_r[nout] = z if ml[acc] <= ml[z] else acc
                out_c[nout] = 0
                out_d[nout] = 0.0
                nout += 1
                acc = w
            break

        cab = cuts[a][b]
        w = nxt
        nxt += 1
        vol[w] = vol[a] + vol[b]
        ml[w] = ml[a] if ml[a] < ml[b] else ml[b]
        alive[a] = 0
        alive[b] = 0
        alive[w] = 1
        live -= 1
        da = cuts[a]
        db = cuts[b]
        dw = cuts[w]
        for z in da:
            if alive[z] == 1:
                dw[z] = da[z]
        for z in db:
            if alive[z] == 1:
                dw[z] = dw.get(z, np.int64(0)) + db[z]
        for z in dw:
            c = dw[z]
            cuts[z][w] = c
            dz = (2.0 * c / vol_g) * np.log2((vol[w] + vol[z]) / vol_g)
            if ml[w] < ml[z]:
                hd, ht1, ht2, ha, hb, hn = _push(
                    hd, ht1, ht2, ha, hb, hn, dz, ml[w], ml[z], w, z
                )
            else:
                hd, ht1, ht2, ha, hb, hn = _push(
                    hd, ht1, ht2, ha, hb, hn, dz, ml[z], ml[w], z, w
                )
        out_l[nout] = a if ml[a] <= ml[b] else b
        out_r[nout] = b if ml[a] <= ml[b] else a
        out_c[nout] = cab
        out_d[nout] = dab
        nout += 1

    return out_l[:nout].copy(), out_r[:nout].copy(), out_c[:nout].copy(), out_d[:nout].copy()
