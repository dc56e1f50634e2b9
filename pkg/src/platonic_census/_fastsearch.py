"""Numba-compiled core for the census subgroup search.

Mirrors search._Engine exactly (same pinned Gamma_v columns, same deduction
walks, same first-in-class test, same depth-first order); it exists purely
to make the index-120 searches fast.  The pure-Python engine is the
reference: the two backends are tested against each other on the small
censuses.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

HAVE_NUMBA = njit is not None

if HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _first_in_class(pair, m, mu, nu):
        for beta in range(1, m):
            for a in range(m):
                t = pair[mu[beta, a]]
                if t == -1:
                    break
                o = pair[a]
                if o == -1:
                    break
                c = nu[beta, t]
                if c != o:
                    if c < o:
                        return False
                    break
        return True

    @njit(cache=True, inline="always")
    def _extras_ok(pair, gcols, m, extras_flat, extras_off):
        for w in range(extras_off.shape[0] - 1):
            lo, hi = extras_off[w], extras_off[w + 1]
            for start in range(m):
                u = start
                ok = True
                for k in range(lo, hi):
                    x = extras_flat[k]
                    u = pair[u] if x == 0 else gcols[x - 1, u]
                    if u == -1:
                        ok = False
                        break
                if ok and u == start:
                    return False
        return True

    @njit(cache=True)
    def _apply(pair, gcols, parity, undo, undo_len, M0, a, b, orientable,
               queue, extras_flat, extras_off, mu, nu, m):
        """Returns (ok, undo_len)."""
        pair[a] = b
        pair[b] = a
        undo[undo_len] = a
        undo_len += 1
        queue[0] = a
        qlen = 1
        while qlen > 0:
            qlen -= 1
            ua = queue[qlen]
            for j in range(1, 4):
                L = 2 * M0[j]
                u = ua
                on_pair = True
                cnt = 0
                closed = False
                while cnt < L:
                    v = pair[u] if on_pair else gcols[j - 1, u]
                    if v == -1:
                        break
                    u = v
                    on_pair = not on_pair
                    cnt += 1
                    if u == ua and on_pair:
                        closed = True
                        break
                if closed:
                    if cnt != L:
                        return False, undo_len
                    continue
                if cnt >= L:
                    return False, undo_len
                end_f = u
                u = ua
                on_pair = False
                cnt_b = 0
                while cnt_b < L:
                    v = pair[u] if on_pair else gcols[j - 1, u]
                    if v == -1:
                        break
                    u = v
                    on_pair = not on_pair
                    cnt_b += 1
                end_b = u
                total = cnt + cnt_b
                if total >= L:
                    return False, undo_len
                if total == L - 1:
                    if end_f == end_b:
                        return False, undo_len
                    if orientable and parity[end_f] == parity[end_b]:
                        return False, undo_len
                    if pair[end_f] != -1 or pair[end_b] != -1:
                        return False, undo_len
                    pair[end_f] = end_b
                    pair[end_b] = end_f
                    undo[undo_len] = end_f
                    undo_len += 1
                    queue[qlen] = end_f
                    qlen += 1
        if extras_off.shape[0] > 1:
            if not _extras_ok(pair, gcols, m, extras_flat, extras_off):
                return False, undo_len
        return _first_in_class(pair, m, mu, nu), undo_len

    @njit(cache=True)
    def _search(gcols, parity, mu, nu, M0, m, orientable, extras_flat,
                extras_off, replay, split_depth, max_nodes, out_tables, out_roots):
        """Depth-first pairing search; see search._Engine.run for semantics.

        Returns (ntables, nroots, nodes, status); status: 0 done, 1/2 output
        buffer overflow (tables/roots), 3 replay failure, 4 node budget hit.
        """
        pair = np.full(m, -1, dtype=np.int32)
        undo = np.empty(m + 4, dtype=np.int32)
        queue = np.empty(m + 4, dtype=np.int32)
        undo_len = 0
        nodes = 0
        ntables = 0
        nroots = 0

        for k in range(replay.shape[0]):
            ok, undo_len = _apply(pair, gcols, parity, undo, undo_len, M0,
                                  replay[k, 0], replay[k, 2], orientable,
                                  queue, extras_flat, extras_off, mu, nu, m)
            if not ok:
                return 0, 0, 0, 3

        dmax = m // 2 + 2
        st_a = np.empty(dmax, dtype=np.int32)
        st_cands = np.empty((dmax, m), dtype=np.int32)
        st_ncand = np.empty(dmax, dtype=np.int32)
        st_idx = np.empty(dmax, dtype=np.int32)
        st_mark = np.empty(dmax, dtype=np.int32)
        st_val = np.empty(dmax, dtype=np.int32)

        fa = -1
        for a in range(m):
            if pair[a] == -1:
                fa = a
                break
        if fa < 0:
            for a in range(m):
                out_tables[0, 4 * a] = pair[a]
                out_tables[0, 4 * a + 1] = gcols[0, a]
                out_tables[0, 4 * a + 2] = gcols[1, a]
                out_tables[0, 4 * a + 3] = gcols[2, a]
            return 1, 0, nodes, 0

        depth = 0
        st_a[0] = fa
        nc = 0
        for b in range(m):
            if pair[b] == -1 and b != fa and (not orientable or parity[b] != parity[fa]):
                st_cands[0, nc] = b
                nc += 1
        st_ncand[0] = nc
        st_idx[0] = 0
        st_mark[0] = undo_len

        while depth >= 0:
            mark = st_mark[depth]
            while undo_len > mark:
                undo_len -= 1
                ra = undo[undo_len]
                pair[pair[ra]] = -1
                pair[ra] = -1
            if st_idx[depth] >= st_ncand[depth]:
                depth -= 1
                continue
            if nodes >= max_nodes:
                return ntables, nroots, nodes, 4
            b = st_cands[depth, st_idx[depth]]
            st_val[depth] = b
            st_idx[depth] += 1
            nodes += 1
            a = st_a[depth]
            ok, undo_len = _apply(pair, gcols, parity, undo, undo_len, M0,
                                  a, b, orientable, queue,
                                  extras_flat, extras_off, mu, nu, m)
            if not ok:
                continue
            fa = -1
            for aa in range(a, m):
                if pair[aa] == -1:
                    fa = aa
                    break
            if fa < 0:
                if ntables >= out_tables.shape[0]:
                    return ntables, nroots, nodes, 1
                for aa in range(m):
                    out_tables[ntables, 4 * aa] = pair[aa]
                    out_tables[ntables, 4 * aa + 1] = gcols[0, aa]
                    out_tables[ntables, 4 * aa + 2] = gcols[1, aa]
                    out_tables[ntables, 4 * aa + 3] = gcols[2, aa]
                ntables += 1
                continue
            if split_depth > 0 and depth + 1 >= split_depth:
                if nroots >= out_roots.shape[0]:
                    return ntables, nroots, nodes, 2
                for d in range(depth + 1):
                    out_roots[nroots, 2 * d] = st_a[d]
                    out_roots[nroots, 2 * d + 1] = st_val[d]
                nroots += 1
                continue
            depth += 1
            st_a[depth] = fa
            nc = 0
            for bb in range(m):
                if pair[bb] == -1 and bb != fa and (not orientable or parity[bb] != parity[fa]):
                    st_cands[depth, nc] = bb
                    nc += 1
            st_ncand[depth] = nc
            st_idx[depth] = 0
            st_mark[depth] = undo_len

        return ntables, nroots, nodes, 0


def run_fast(frame, replay=(), split_depth: int = 0, max_nodes=None,
             table_cap: int = 1024, root_cap: int = 1 << 15):
    """Run the compiled search on a search.CensusFrame.

    Returns (tables, roots, nodes), where tables is a list of row-tuples and
    roots a list of decision lists.  Buffers grow and the search reruns on
    overflow (rare; the census accepts at most tens of tables).  Raises
    BudgetExceeded when max_nodes is hit.
    """
    from .errors import BudgetExceeded

    if not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable")
    m = frame.m
    gcols = np.array(frame.gcols, dtype=np.int32)
    parity = np.array(frame.parity, dtype=np.int8)
    mu = np.array(frame.mu, dtype=np.int32)
    nu = np.array(frame.nu, dtype=np.int32)
    M0 = np.array(frame.M[0], dtype=np.int32)
    flat: list[int] = []
    off = [0]
    for w in frame.extras:
        flat.extend(w)
        off.append(len(flat))
    extras_flat = np.array(flat, dtype=np.int32) if flat else np.zeros(1, dtype=np.int32)
    extras_off = np.array(off, dtype=np.int32)
    rep = np.array([[d[0], d[1], d[2]] for d in replay],
                   dtype=np.int32).reshape(len(replay), 3)
    budget = max_nodes if max_nodes is not None else 2**62
    while True:
        out_tables = np.empty((table_cap, m * 4), dtype=np.int32)
        out_roots = np.empty((root_cap, 2 * max(split_depth, 1)), dtype=np.int32)
        ntables, nroots, nodes, status = _search(
            gcols, parity, mu, nu, M0, m, frame.orientable,
            extras_flat, extras_off, rep, split_depth, budget,
            out_tables, out_roots)
        if status == 0:
            break
        if status == 1:
            table_cap *= 4
        elif status == 2:
            root_cap *= 4
        elif status == 4:
            raise BudgetExceeded(f"search exceeded {budget} nodes")
        else:
            raise AssertionError("replay of committed decisions failed")
    tables = []
    for k in range(ntables):
        rows = tuple(tuple(int(out_tables[k, 4 * a + i]) for i in range(4))
                     for a in range(m))
        tables.append(rows)
    roots = []
    for k in range(nroots):
        decisions = [(int(out_roots[k, 2 * d]), 0, int(out_roots[k, 2 * d + 1]))
                     for d in range(split_depth)]
        roots.append(decisions)
    return tables, roots, int(nodes)
