"""Hot loops, each with a numba version and a numpy/Python fallback.

Every public function here dispatches on :func:`bpwmc._accel.use_numba` and
both branches return identical results (the chain kernel consumes the same
pre-drawn uniforms, so trajectories agree bit for bit).
"""

from __future__ import annotations

import numpy as np

from ._accel import njit, use_numba

# ---------------------------------------------------------------- independent sets


@njit
def _indep_masks_nb(adj, n):
    total = 0
    cap = 1024
    out = np.empty(cap, dtype=np.int64)
    # explicit DFS over (mask, next vertex) pairs
    stack_mask = np.empty(n + 1, dtype=np.int64)
    stack_next = np.empty(n + 1, dtype=np.int64)
    forb = np.empty(n + 1, dtype=np.int64)
    depth = 0
    stack_mask[0] = 0
    stack_next[0] = 0
    forb[0] = 0
    out[0] = 0
    total = 1
    while depth >= 0:
        v = stack_next[depth]
        if v >= n:
            depth -= 1
            continue
        stack_next[depth] = v + 1
        if (forb[depth] >> v) & 1:
            continue
        m = stack_mask[depth] | (np.int64(1) << v)
        if total == cap:
            cap *= 2
            bigger = np.empty(cap, dtype=np.int64)
            bigger[:total] = out[:total]
            out = bigger
        out[total] = m
        total += 1
        depth += 1
        stack_mask[depth] = m
        stack_next[depth] = v + 1
        forb[depth] = forb[depth - 1] | adj[v]
    return out[:total]


def _indep_masks_np(adj: np.ndarray, n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(masks.shape, dtype=bool)
    for v in range(n):
        has_v = (masks >> v) & 1 == 1
        ok &= ~(has_v & ((masks & adj[v]) != 0))
    return masks[ok]


def independent_masks(adj_rows, n: int) -> np.ndarray:
    """All independent-set masks (unsorted int64 array). Requires n <= 62."""
    adj = np.asarray(adj_rows, dtype=np.int64)
    if use_numba():
        return _indep_masks_nb(adj, n)
    return _indep_masks_np(adj, n)


# ---------------------------------------------------------------- vertex separation


@njit
def _vsep_nb(adj, n):
    size = 1 << n
    f = np.empty(size, dtype=np.int64)
    choice = np.full(size, -1, dtype=np.int64)
    f[0] = 0
    full = size - 1
    for s in range(1, size):
        # |boundary(s)|: members with a neighbour outside s
        b = 0
        rest = s
        while rest:
            low = rest & -rest
            v = 0
            t = low
            while t > 1:
                t >>= 1
                v += 1
            if adj[v] & (full ^ s):
                b += 1
            rest ^= low
        best = 1 << 30
        arg = -1
        for v in range(n):
            if (s >> v) & 1:
                c = f[s ^ (1 << v)]
                if c < best:
                    best = c
                    arg = v
        f[s] = best if best > b else b
        choice[s] = arg
    return f, choice


def _vsep_np(adj: np.ndarray, n: int):
    size = 1 << n
    full = size - 1
    masks = np.arange(size, dtype=np.int64)
    boundary = np.zeros(size, dtype=np.int64)
    for v in range(n):
        boundary += (((masks >> v) & 1) == 1) & ((adj[v] & (full ^ masks)) != 0)
    pop = np.zeros(size, dtype=np.int64)
    for v in range(n):
        pop += (masks >> v) & 1
    f = np.zeros(size, dtype=np.int64)
    choice = np.full(size, -1, dtype=np.int64)
    big = np.int64(1 << 30)
    for k in range(1, n + 1):
        layer = masks[pop == k]
        best = np.full(layer.shape, big)
        arg = np.full(layer.shape, -1, dtype=np.int64)
        for v in range(n):
            has = ((layer >> v) & 1) == 1
            cand = np.where(has, f[layer ^ (np.int64(1) << v)], big)
            better = cand < best
            best = np.where(better, cand, best)
            arg = np.where(better, v, arg)
        f[layer] = np.maximum(best, boundary[layer])
        choice[layer] = arg
    return f, choice


def vertex_separation(adj_rows, n: int) -> tuple[int, list[int]]:
    """Vertex separation number and an optimal layout (first vertex first).

    Ties pick the smallest vertex as the last element of each prefix, so the
    layout is deterministic.
    """
    if n == 0:
        return 0, []
    adj = np.asarray(adj_rows, dtype=np.int64)
    f, choice = _vsep_nb(adj, n) if use_numba() else _vsep_np(adj, n)
    order = []
    s = (1 << n) - 1
    while s:
        v = int(choice[s])
        order.append(v)
        s ^= 1 << v
    order.reverse()
    return int(f[(1 << n) - 1]), order


# ---------------------------------------------------------------- Glauber chain


@njit
def _chain_nb(adj, cum_w, weights, lam, start, u_pick, u_acc):
    steps = u_pick.shape[0]
    out = np.empty(steps, dtype=np.int64)
    z = start
    total = cum_w[-1]
    n = cum_w.shape[0]
    p_ins = lam / (1.0 + lam)
    for t in range(steps):
        target = u_pick[t] * total
        v = 0
        while v < n - 1 and cum_w[v] <= target:
            v += 1
        bit = np.int64(1) << v
        if z & bit:
            if u_acc[t] < 1.0 / ((1.0 + lam) * weights[v]):
                z ^= bit
        elif (adj[v] & z) == 0:
            if u_acc[t] < p_ins:
                z |= bit
        out[t] = z
    return out


def _chain_py(adj, cum_w, weights, lam, start, u_pick, u_acc):
    picks = np.searchsorted(cum_w, u_pick * cum_w[-1], side="right")
    np.minimum(picks, len(cum_w) - 1, out=picks)
    p_ins = lam / (1.0 + lam)
    del_thr = 1.0 / ((1.0 + lam) * np.asarray(weights, dtype=np.float64))
    adj_l = [int(a) for a in adj]
    out = np.empty(len(u_pick), dtype=object if len(adj_l) > 62 else np.int64)
    z = int(start)
    for t, v in enumerate(picks.tolist()):
        bit = 1 << v
        if z & bit:
            if u_acc[t] < del_thr[v]:
                z ^= bit
        elif not adj_l[v] & z:
            if u_acc[t] < p_ins:
                z |= bit
        out[t] = z
    return out


def run_chain(adj_rows, weights, lam: float, start: int, u_pick, u_acc) -> np.ndarray:
    """Trajectory of the (weighted) Glauber chain driven by given uniforms.

    Step t picks vertex v with probability w(v)/w_+ using ``u_pick[t]`` and
    accepts with ``u_acc[t]``. Returns the state after every step.
    """
    n = len(adj_rows)
    weights = np.asarray(weights, dtype=np.float64)
    cum_w = np.cumsum(weights)
    u_pick = np.asarray(u_pick, dtype=np.float64)
    u_acc = np.asarray(u_acc, dtype=np.float64)
    if use_numba() and n <= 62:
        adj = np.asarray(adj_rows, dtype=np.int64)
        return _chain_nb(adj, cum_w, weights, float(lam), np.int64(start), u_pick, u_acc)
    return _chain_py(adj_rows, cum_w, weights, float(lam), start, u_pick, u_acc)


# ---------------------------------------------------------------- conductance


@njit
def _cuts_nb(pi, flow):
    k = pi.shape[0]
    inside = np.zeros(k, dtype=np.bool_)
    mass = 0.0
    out_flow = 0.0
    best = np.inf
    best_code = 0
    code = 0
    for t in range(1, 1 << k):
        # Gray code: flip the lowest set bit position of t
        i = 0
        tt = t
        while (tt & 1) == 0:
            tt >>= 1
            i += 1
        if inside[i]:
            inside[i] = False
            mass -= pi[i]
            for j in range(k):
                if j != i:
                    if inside[j]:
                        out_flow += flow[j, i]
                    else:
                        out_flow -= flow[i, j]
        else:
            inside[i] = True
            mass += pi[i]
            for j in range(k):
                if j != i:
                    if inside[j]:
                        out_flow -= flow[j, i]
                    else:
                        out_flow += flow[i, j]
        code ^= 1 << i
        if mass <= 0.5 + 1e-12 and mass > 0.0:
            r = out_flow / mass
            if r < best - 1e-12 or (abs(r - best) <= 1e-12 and code < best_code):
                best = r
                best_code = code
    return best, best_code


def _cuts_np(pi, flow, chunk=1 << 14):
    k = len(pi)
    best, best_code = np.inf, 0
    idx = np.arange(k, dtype=np.int64)
    for start in range(1, 1 << k, chunk):
        codes = np.arange(start, min(start + chunk, 1 << k), dtype=np.int64)
        member = ((codes[:, None] >> idx[None, :]) & 1).astype(np.float64)
        mass = member @ pi
        out_flow = np.einsum("ci,ij,cj->c", member, flow, 1.0 - member)
        ok = (mass <= 0.5 + 1e-12) & (mass > 0)
        if not ok.any():
            continue
        ratio = np.where(ok, out_flow / np.where(ok, mass, 1.0), np.inf)
        j = int(np.argmin(ratio))
        r = ratio[j]
        # ties: smallest code within 1e-12
        near = np.flatnonzero(np.abs(ratio - r) <= 1e-12)
        c = int(codes[near].min())
        if r < best - 1e-12 or (abs(r - best) <= 1e-12 and c < best_code):
            best, best_code = float(r), c
    return best, best_code


def min_cut_ratio(pi, flow) -> tuple[float, int]:
    """Minimum of Q(S, S^c)/pi(S) over all state subsets with pi(S) <= 1/2.

    ``flow[i, j] = pi_i P_ij``. Returns the value and the subset as a bitmask
    over state indices (smallest code among near-ties).
    """
    pi = np.ascontiguousarray(pi, dtype=np.float64)
    flow = np.ascontiguousarray(flow, dtype=np.float64)
    if use_numba():
        best, code = _cuts_nb(pi, flow)
        return float(best), int(code)
    return _cuts_np(pi, flow)
