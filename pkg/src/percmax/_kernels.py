"""Numba kernels: hashed per-site randomness, union-find labeling, growing-box scans.

Everything here operates on flat row-major arrays (linear index over the box
[-n,n]^d, axis 0 slowest), so the minimal linear index of a cluster is its
lexicographic minimum.  Occupancy of a site is a pure function of
(master_seed, replica, absolute coordinates); boxes of any radius drawn from
the same (seed, replica) therefore agree on their overlap, and fields at
p1 <= p2 are coupled sitewise through shared uniforms.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# splitmix64-style mixing constants
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_P1 = np.uint64(0xD6E8FEB86659FD93)
_P2 = np.uint64(0xA5CB3D8F8F67F257)
_COORD_OFF = np.int64(1) << np.int64(61)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

# domain-separation salts for independent uses of the same (seed, replica)
SALT_FIELD = 1
SALT_HEAT = 2
SALT_DRAW = 3


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _stream_base(master, replica, salt):
    h = _mix64(np.uint64(master) + _GAMMA)
    h = _mix64(h ^ (np.uint64(replica) * _P1 + _GAMMA))
    h = _mix64(h ^ (np.uint64(salt) * _P2 + _GAMMA))
    return h


@njit(cache=True, inline="always")
def _fold_coord(h, c, axis):
    return _mix64(h ^ (np.uint64(c + _COORD_OFF) + np.uint64(axis + 1) * _P2))


@njit(cache=True, inline="always")
def _u01(h):
    return float(h >> np.uint64(11)) * _INV53


@njit(cache=True)
def site_uniform(master, replica, coords):
    """Uniform in [0,1) attached to one absolute lattice site."""
    h = _stream_base(master, replica, SALT_FIELD)
    for j in range(coords.size):
        h = _fold_coord(h, coords[j], j)
    return _u01(h)


@njit(cache=True)
def draw_uniform(master, replica, index):
    """index-addressable uniform stream (salted away from field occupancy)."""
    h = _stream_base(master, replica, SALT_DRAW)
    h = _mix64(h ^ (np.uint64(index) + _GAMMA))
    return _u01(h)


@njit(cache=True, inline="always")
def _box_volume(side, d):
    v = np.int64(1)
    for _ in range(d):
        v *= side
    return v


@njit(cache=True, nogil=True)
def fill_bernoulli(master, replica, d, n, p, out):
    """Occupancy of B_n = [-n,n]^d into flat row-major `out` (uint8)."""
    side = 2 * n + 1
    base = _stream_base(master, replica, SALT_FIELD)
    # strides: axis 0 slowest
    strides = np.empty(d, np.int64)
    s = np.int64(1)
    for j in range(d - 1, -1, -1):
        strides[j] = s
        s *= side
    v = s
    for idx in range(v):
        rem = idx
        h = base
        for j in range(d):
            q = rem // strides[j]
            rem -= q * strides[j]
            c = q - n  # absolute coordinate
            h = _fold_coord(h, c, j)
        out[idx] = 1 if _u01(h) < p else 0
    return v


@njit(cache=True, inline="always")
def _find(parent, i):
    r = i
    while parent[r] != r:
        r = parent[r]
    while parent[i] != r:
        nxt = parent[i]
        parent[i] = r
        i = nxt
    return r


@njit(cache=True, inline="always")
def _union(parent, sz, minidx, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return ra
    if sz[ra] < sz[rb]:
        ra, rb = rb, ra
    parent[rb] = ra
    sz[ra] += sz[rb]
    if minidx[rb] < minidx[ra]:
        minidx[ra] = minidx[rb]
    return ra


@njit(cache=True, nogil=True)
def label_box(occ, d, side, periodic, parent, sz, minidx):
    """Union-find labeling of occupied sites on a side^d box (flat row-major).

    parent/sz/minidx are work arrays of length side^d; on return parent holds
    the resolved root site index for occupied sites and -1 for vacant ones.
    Under periodic adjacency opposite faces are glued.
    """
    v = _box_volume(side, d)
    for i in range(v):
        parent[i] = -1
    # union each edge once, from its higher-index endpoint
    stride = np.empty(d, np.int64)
    s = np.int64(1)
    for j in range(d - 1, -1, -1):
        stride[j] = s
        s *= side
    for idx in range(v):
        if occ[idx] == 0:
            continue
        parent[idx] = idx
        sz[idx] = 1
        minidx[idx] = idx
        rem = idx
        for j in range(d):
            q = rem // stride[j]
            rem -= q * stride[j]
            if q > 0:
                nb = idx - stride[j]
                if occ[nb] != 0 and parent[nb] >= 0:
                    _union(parent, sz, minidx, idx, nb)
            if periodic != 0 and q == side - 1 and side > 1:
                nb = idx - stride[j] * (side - 1)
                if nb != idx and occ[nb] != 0 and parent[nb] >= 0:
                    _union(parent, sz, minidx, idx, nb)
    for idx in range(v):
        if parent[idx] >= 0:
            parent[idx] = _find(parent, idx)
    return v


@njit(cache=True, nogil=True)
def label_box_roots(occ, d, side, periodic):
    v = _box_volume(side, d)
    parent = np.empty(v, np.int64)
    sz = np.zeros(v, np.int64)
    minidx = np.zeros(v, np.int64)
    label_box(occ, d, side, periodic, parent, sz, minidx)
    return parent


@njit(cache=True, nogil=True)
def extremes_batch(master, rep0, rep1, d, n, margin, p, all_bc, ambient_rule):
    """Per-replica maxima of cluster size under the boundary-condition variants.

    Returns (m_zb, m_fb, m_pb, m_fin) int64 arrays of length rep1-rep0.
    Without all_bc only the zero-bc box B_n is sampled and m_fb/m_pb are -1.
    With all_bc an ambient box B_{n+margin} is sampled once per replica;
    m_fb is the largest ambient cluster meeting B_n, m_pb relabels the
    restriction with periodic adjacency.  m_fin excludes boundary-touching
    clusters (ambient_rule: exclusion by contact with the ambient boundary
    instead of the B_n boundary).
    """
    reps = rep1 - rep0
    m_zb = np.zeros(reps, np.int64)
    m_fb = np.full(reps, -1, np.int64)
    m_pb = np.full(reps, -1, np.int64)
    m_fin = np.zeros(reps, np.int64)

    side = 2 * n + 1
    v = _box_volume(side, d)
    occ = np.empty(v, np.uint8)
    parent = np.empty(v, np.int64)
    sz = np.zeros(v, np.int64)
    minidx = np.zeros(v, np.int64)
    ppar = np.empty(v, np.int64)
    psz = np.zeros(v, np.int64)
    pmin = np.zeros(v, np.int64)

    na = n + margin
    sidea = 2 * na + 1
    va = _box_volume(sidea, d) if all_bc else np.int64(1)
    occa = np.empty(va, np.uint8)
    parenta = np.empty(va, np.int64)
    sza = np.zeros(va, np.int64)
    minidxa = np.zeros(va, np.int64)
    ambtouch = np.zeros(va, np.uint8)

    stride = np.empty(d, np.int64)
    s = np.int64(1)
    for j in range(d - 1, -1, -1):
        stride[j] = s
        s *= side
    stridea = np.empty(d, np.int64)
    s = np.int64(1)
    for j in range(d - 1, -1, -1):
        stridea[j] = s
        s *= sidea

    for rr in range(reps):
        rep = rep0 + rr
        if all_bc != 0:
            fill_bernoulli(master, rep, d, na, p, occa)
            # restriction to B_n
            for idx in range(v):
                rem = idx
                aidx = np.int64(0)
                for j in range(d):
                    q = rem // stride[j]
                    rem -= q * stride[j]
                    aidx += (q + margin) * stridea[j]
                occ[idx] = occa[aidx]
        else:
            fill_bernoulli(master, rep, d, n, p, occ)

        # zero-bc labeling of B_n
        label_box(occ, d, side, 0, parent, sz, minidx)
        best = np.int64(0)
        bestf = np.int64(0)
        for idx in range(v):
            if parent[idx] == idx:
                if sz[idx] > best:
                    best = sz[idx]
        m_zb[rr] = best

        # boundary contact of zero-bc clusters (B_n boundary)
        if all_bc == 0 or ambient_rule == 0:
            for idx in range(v):
                if parent[idx] < 0:
                    continue
                rem = idx
                onb = False
                for j in range(d):
                    q = rem // stride[j]
                    rem -= q * stride[j]
                    if q == 0 or q == side - 1:
                        onb = True
                if onb:
                    r = parent[idx]
                    if sz[r] > 0:
                        sz[r] = -sz[r]  # mark excluded
            for idx in range(v):
                if parent[idx] == idx and sz[idx] > bestf:
                    bestf = sz[idx]
            for idx in range(v):  # unmark
                if parent[idx] == idx and sz[idx] < 0:
                    sz[idx] = -sz[idx]
            m_fin[rr] = bestf

        if all_bc != 0:
            label_box(occa, d, sidea, 0, parenta, sza, minidxa)
            # ambient-boundary contact flags per ambient root
            for idx in range(va):
                ambtouch[idx] = 0
            for idx in range(va):
                if parenta[idx] < 0:
                    continue
                rem = idx
                onb = False
                for j in range(d):
                    q = rem // stridea[j]
                    rem -= q * stridea[j]
                    if q == 0 or q == sidea - 1:
                        onb = True
                if onb:
                    ambtouch[parenta[idx]] = 1
            # free-bc maximum: ambient clusters meeting the core
            bfb = np.int64(0)
            for idx in range(v):
                if occ[idx] == 0:
                    continue
                rem = idx
                aidx = np.int64(0)
                for j in range(d):
                    q = rem // stride[j]
                    rem -= q * stride[j]
                    aidx += (q + margin) * stridea[j]
                ra = parenta[aidx]
                if sza[ra] > bfb:
                    bfb = sza[ra]
            m_fb[rr] = bfb
            if ambient_rule != 0:
                bestf = np.int64(0)
                for idx in range(v):
                    if parent[idx] != idx:
                        continue
                    # representative site minidx -> ambient root
                    rem = minidx[idx]
                    aidx = np.int64(0)
                    for j in range(d):
                        q = rem // stride[j]
                        rem -= q * stride[j]
                        aidx += (q + margin) * stridea[j]
                    if ambtouch[parenta[aidx]] == 0 and sz[idx] > bestf:
                        bestf = sz[idx]
                m_fin[rr] = bestf
            # periodic relabeling of the restriction
            label_box(occ, d, side, 1, ppar, psz, pmin)
            bpb = np.int64(0)
            for idx in range(v):
                if ppar[idx] == idx and psz[idx] > bpb:
                    bpb = psz[idx]
            m_pb[rr] = bpb
    return m_zb, m_fb, m_pb, m_fin


@njit(cache=True, nogil=True)
def origin_cluster_batch(master, rep0, rep1, d, p, cap_radius, cap_size):
    """Lazy BFS of the origin cluster, one per replica.

    Returns (size, censored, is_le).  A site is probed (and its uniform
    consumed) only when the BFS reaches it.  Censoring fires when the cluster
    exceeds cap_size sites or exits B_{cap_radius}; the reported size is then
    a lower bound and is_le reflects only the explored part.
    """
    reps = rep1 - rep0
    out_size = np.zeros(reps, np.int64)
    out_cens = np.zeros(reps, np.uint8)
    out_isle = np.zeros(reps, np.uint8)

    side = 2 * cap_radius + 1
    v = _box_volume(side, d)
    status = np.zeros(v, np.uint8)  # 0 unknown, 1 occupied, 2 vacant
    touched = np.empty(v, np.int64)
    queue = np.empty(min(v, cap_size + np.int64(1)), np.int64)
    coords = np.empty(d, np.int64)

    stride = np.empty(d, np.int64)
    s = np.int64(1)
    for j in range(d - 1, -1, -1):
        stride[j] = s
        s *= side
    origin = np.int64(0)
    for j in range(d):
        origin += cap_radius * stride[j]

    for rr in range(reps):
        rep = rep0 + rr
        base = _stream_base(master, rep, SALT_FIELD)
        nt = 0
        # probe origin
        h = base
        for j in range(d):
            h = _fold_coord(h, 0, j)
        occ0 = _u01(h) < p
        status[origin] = 1 if occ0 else 2
        touched[nt] = origin
        nt += 1
        if not occ0:
            out_size[rr] = 0
            status[origin] = 0
            continue
        qh = 0
        qt = 0
        queue[qt] = origin
        qt += 1
        size = np.int64(1)
        mini = origin
        cens = False
        while qh < qt:
            cur = queue[qh]
            qh += 1
            rem = cur
            for j in range(d):
                q = rem // stride[j]
                rem -= q * stride[j]
                coords[j] = q - cap_radius
            for j in range(d):
                for dlt in (-1, 1):
                    c = coords[j] + dlt
                    if c < -cap_radius or c > cap_radius:
                        cens = True  # cluster may continue outside the window
                        continue
                    nb = cur + dlt * stride[j]
                    st = status[nb]
                    if st == 0:
                        h = base
                        for jj in range(d):
                            cc = coords[jj] if jj != j else c
                            h = _fold_coord(h, cc, jj)
                        if _u01(h) < p:
                            st = 1
                        else:
                            st = 2
                        status[nb] = st
                        touched[nt] = nb
                        nt += 1
                        if st == 1:
                            size += 1
                            if nb < mini:
                                mini = nb
                            if size > cap_size:
                                cens = True
                            else:
                                queue[qt] = nb
                                qt += 1
            if cens and size > cap_size:
                break
        out_size[rr] = size
        out_cens[rr] = 1 if cens else 0
        out_isle[rr] = 1 if mini == origin else 0
        for t in range(nt):
            status[touched[t]] = 0
    return out_size, out_cens, out_isle


@njit(cache=True, nogil=True)
def growth_profile(master, rep, d, p, k_max):
    """M_k for k=0..k_max on one replica: max cluster of omega restricted to B_k.

    Shell-by-shell site insertion into one union-find state; total work is
    O(volume of B_{k_max}).
    """
    side = 2 * k_max + 1
    v = _box_volume(side, d)
    parent = np.full(v, -1, np.int64)
    sz = np.zeros(v, np.int64)
    minidx = np.zeros(v, np.int64)
    prof = np.zeros(k_max + 1, np.int64)
    stride = np.empty(d, np.int64)
    s = np.int64(1)
    for j in range(d - 1, -1, -1):
        stride[j] = s
        s *= side
    base = _stream_base(master, rep, SALT_FIELD)
    coords = np.empty(d, np.int64)
    best = np.int64(0)

    for k in range(k_max + 1):
        # enumerate the shell max-norm == k: first axis attaining +-k is `a`
        for a in range(d):
            for sgn in range(2):
                if k == 0 and (a > 0 or sgn > 0):
                    continue
                ck = k if sgn == 0 else -k
                # odometer over the other axes
                for j in range(d):
                    if j < a:
                        coords[j] = -(k - 1)
                    elif j == a:
                        coords[j] = ck
                    else:
                        coords[j] = -k
                while True:
                    # --- process site ---
                    h = base
                    idx = np.int64(0)
                    for j in range(d):
                        h = _fold_coord(h, coords[j], j)
                        idx += (coords[j] + k_max) * stride[j]
                    if _u01(h) < p:
                        parent[idx] = idx
                        sz[idx] = 1
                        minidx[idx] = idx
                        root = idx
                        for j in range(d):
                            for dlt in (-1, 1):
                                c = coords[j] + dlt
                                if c < -k_max or c > k_max:
                                    continue
                                nb = idx + dlt * stride[j]
                                if parent[nb] >= 0:
                                    root = _union(parent, sz, minidx, idx, nb)
                        if sz[root] > best:
                            best = sz[root]
                    # --- advance odometer ---
                    done = True
                    for j in range(d - 1, -1, -1):
                        if j == a:
                            continue
                        hi = (k - 1) if j < a else k
                        lo = -hi
                        if coords[j] < hi:
                            coords[j] += 1
                            done = False
                            break
                        coords[j] = lo
                    if done:
                        break
                if k == 0:
                    break
            if k == 0:
                break
        prof[k] = best
    return prof


@njit(cache=True, nogil=True)
def tau_scan_batch(master, rep0, rep1, d, p, m_lo, m_hi, finite_only, k_max):
    """First box radius at which a witnessing cluster appears, per replica.

    A hit at radius k means some cluster of omega restricted to B_k has size
    in [m_lo, m_hi) -- with finite_only, only clusters not touching the
    boundary of B_k qualify (such clusters coincide with their full-lattice
    clusters, so the finiteness proxy is exact).  Returns (k_hit, hit_le)
    with k_hit = -1 when censored at k_max; hit_le is the flat index of the
    witnessing cluster's lexicographic minimum in B_{k_max} coordinates.
    """
    reps = rep1 - rep0
    out_k = np.full(reps, -1, np.int64)
    out_le = np.full(reps, -1, np.int64)

    side = 2 * k_max + 1
    v = _box_volume(side, d)
    parent = np.full(v, -1, np.int64)
    sz = np.zeros(v, np.int64)
    minidx = np.zeros(v, np.int64)
    stamp = np.full(v, -1, np.int64)   # last shell that grew this root
    qstamp = np.full(v, -1, np.int64)  # dedup marker for per-shell lists
    touched = np.empty(v, np.int64)
    pend = np.empty(v, np.int64)
    active = np.empty(v, np.int64)
    coords = np.empty(d, np.int64)
    stride = np.empty(d, np.int64)
    s = np.int64(1)
    for j in range(d - 1, -1, -1):
        stride[j] = s
        s *= side

    for rr in range(reps):
        rep = rep0 + rr
        base = _stream_base(master, rep, SALT_FIELD)
        n_act = 0
        n_pend = 0
        hit_k = np.int64(-1)
        hit_le = np.int64(-1)
        for k in range(k_max + 1):
            n_touch = 0
            for a in range(d):
                for sgn in range(2):
                    if k == 0 and (a > 0 or sgn > 0):
                        continue
                    ck = k if sgn == 0 else -k
                    for j in range(d):
                        if j < a:
                            coords[j] = -(k - 1)
                        elif j == a:
                            coords[j] = ck
                        else:
                            coords[j] = -k
                    while True:
                        h = base
                        idx = np.int64(0)
                        for j in range(d):
                            h = _fold_coord(h, coords[j], j)
                            idx += (coords[j] + k_max) * stride[j]
                        if _u01(h) < p:
                            parent[idx] = idx
                            sz[idx] = 1
                            minidx[idx] = idx
                            active[n_act] = idx
                            n_act += 1
                            root = idx
                            for j in range(d):
                                for dlt in (-1, 1):
                                    c = coords[j] + dlt
                                    if c < -k_max or c > k_max:
                                        continue
                                    nb = idx + dlt * stride[j]
                                    if parent[nb] >= 0:
                                        root = _union(parent, sz, minidx, idx, nb)
                            stamp[root] = k
                            if qstamp[root] != k:
                                qstamp[root] = k
                                touched[n_touch] = root
                                n_touch += 1
                        done = True
                        for j in range(d - 1, -1, -1):
                            if j == a:
                                continue
                            hi = (k - 1) if j < a else k
                            lo = -hi
                            if coords[j] < hi:
                                coords[j] += 1
                                done = False
                                break
                            coords[j] = lo
                        if done:
                            break
                    if k == 0:
                        break
                if k == 0:
                    break
            if finite_only != 0:
                # clusters last grown at shell k-1 and untouched now are
                # interior to B_k and final
                for t in range(n_pend):
                    r = _find(parent, pend[t])
                    if stamp[r] == k:
                        continue
                    if sz[r] >= m_lo and sz[r] < m_hi:
                        if hit_k < 0:
                            hit_k = k
                            hit_le = minidx[r]
            else:
                for t in range(n_touch):
                    r = _find(parent, touched[t])
                    if qstamp[r] != k:
                        continue  # absorbed into another touched root
                    qstamp[r] = -2  # consume so duplicates are skipped
                    if sz[r] >= m_lo and sz[r] < m_hi:
                        if hit_k < 0:
                            hit_k = k
                            hit_le = minidx[r]
            if hit_k >= 0:
                break
            if finite_only != 0:
                n_pend = 0
                for t in range(n_touch):
                    r = _find(parent, touched[t])
                    if qstamp[r] == k:
                        qstamp[r] = -2
                        pend[n_pend] = r
                        n_pend += 1
        out_k[rr] = hit_k
        out_le[rr] = hit_le
        # reset union-find state
        for t in range(n_act):
            i = active[t]
            parent[i] = -1
            sz[i] = 0
            stamp[i] = -1
            qstamp[i] = -1
    return out_k, out_le


@njit(cache=True, nogil=True)
def heat_bath_batch(master, rep0, rep1, d, n, cond, sweeps, dominating_p):
    """Systematic-scan heat-bath sweeps from the all-vacant configuration.

    cond[j] is the occupation probability given j occupied neighbors
    (exterior sites count as vacant).  Returns (fields, coupled) where
    coupled is the Bernoulli(dominating_p) field built from the final
    sweep's uniforms -- the Holley coupling partner.
    """
    reps = rep1 - rep0
    side = 2 * n + 1
    v = _box_volume(side, d)
    fields = np.zeros((reps, v), np.uint8)
    coupled = np.zeros((reps, v), np.uint8)
    stride = np.empty(d, np.int64)
    s = np.int64(1)
    for j in range(d - 1, -1, -1):
        stride[j] = s
        s *= side

    for rr in range(reps):
        rep = rep0 + rr
        base = _stream_base(master, rep, SALT_HEAT)
        occ = fields[rr]
        for sw in range(sweeps):
            hsw = _mix64(base ^ (np.uint64(sw) * _P1 + _GAMMA))
            for idx in range(v):
                cnt = 0
                rem = idx
                for j in range(d):
                    q = rem // stride[j]
                    rem -= q * stride[j]
                    if q > 0 and occ[idx - stride[j]] != 0:
                        cnt += 1
                    if q < side - 1 and occ[idx + stride[j]] != 0:
                        cnt += 1
                u = _u01(_mix64(hsw ^ (np.uint64(idx) + _GAMMA)))
                occ[idx] = 1 if u < cond[cnt] else 0
                if sw == sweeps - 1:
                    coupled[rr, idx] = 1 if u < dominating_p else 0
    return fields, coupled


@njit(cache=True, nogil=True)
def longest_run_cdf_dp(n_sites, p, m):
    """Exact P(longest occupied run among n_sites iid Bernoulli(p) <= m)."""
    if m >= n_sites:
        return 1.0
    if m < 0:
        return 0.0 if n_sites > 0 else 1.0
    f = np.zeros(m + 1, np.float64)
    f[0] = 1.0
    for _ in range(n_sites):
        tot = 0.0
        for r in range(m + 1):
            tot += f[r]
        for r in range(m, 0, -1):
            f[r] = p * f[r - 1]
        f[0] = (1.0 - p) * tot
    out = 0.0
    for r in range(m + 1):
        out += f[r]
    return out


@njit(cache=True, nogil=True)
def second_moment_boxes(master, rep0, rep1, d, side, p, m, window, core_margin):
    """Per-replica tallies for the translate-pair sum of the event
    {m <= |C_le(y)| < infinity} over shifts 0 < |x|_inf <= window.

    Labels a side^d box, collects left endpoints of interior clusters of
    size >= m whose left endpoint lies in the core (core_margin sites away
    from the boundary), and counts ordered pairs at L-inf distance <= window.
    Returns (hits, pairs) int64 arrays: per-replica counts of core events and
    of ordered qualifying pairs (core anchor, any in-box partner).
    """
    reps = rep1 - rep0
    hits = np.zeros(reps, np.int64)
    pairs = np.zeros(reps, np.int64)
    v = _box_volume(side, d)
    occ = np.empty(v, np.uint8)
    parent = np.empty(v, np.int64)
    sz = np.zeros(v, np.int64)
    minidx = np.zeros(v, np.int64)
    le_list = np.empty(v, np.int64)
    core_flag = np.empty(v, np.uint8)
    stride = np.empty(d, np.int64)
    s = np.int64(1)
    for j in range(d - 1, -1, -1):
        stride[j] = s
        s *= side
    n = (side - 1) // 2

    for rr in range(reps):
        rep = rep0 + rr
        fill_bernoulli(master, rep, d, n, p, occ)
        label_box(occ, d, side, 0, parent, sz, minidx)
        # boundary-touching roots are censored (possibly truncated clusters)
        for idx in range(v):
            if parent[idx] < 0:
                continue
            rem = idx
            onb = False
            for j in range(d):
                q = rem // stride[j]
                rem -= q * stride[j]
                if q == 0 or q == side - 1:
                    onb = True
            if onb:
                sz[parent[idx]] = 0  # exclude
        nle = 0
        for idx in range(v):
            if parent[idx] == idx and sz[idx] >= m:
                le = minidx[idx]
                rem = le
                incore = True
                for j in range(d):
                    q = rem // stride[j]
                    rem -= q * stride[j]
                    if q < core_margin or q > side - 1 - core_margin:
                        incore = False
                le_list[nle] = le
                core_flag[nle] = 1 if incore else 0
                nle += 1
        h = np.int64(0)
        pr = np.int64(0)
        for i in range(nle):
            if core_flag[i] == 0:
                continue
            h += 1
            for j2 in range(nle):
                if j2 == i:
                    continue
                # L-inf distance between left endpoints
                ra = le_list[i]
                rb = le_list[j2]
                dist = np.int64(0)
                for j in range(d):
                    qa = ra // stride[j]
                    ra -= qa * stride[j]
                    qb = rb // stride[j]
                    rb -= qb * stride[j]
                    dd = qa - qb
                    if dd < 0:
                        dd = -dd
                    if dd > dist:
                        dist = dd
                if dist <= window:
                    pr += 1
        hits[rr] = h
        pairs[rr] = pr
    return hits, pairs
