"""Pure-Python implementations of the hot kernels.

Mirrors ``_kernels.pyx`` operation for operation so both backends produce
bit-identical results; any change here must be made there as well.
"""
from __future__ import annotations

import numpy as np

from .geom import dist2_point_segment, dist2_segment_segment, min_dist2_linear_motions

NAME = "python"
_MASK = 0xFFFFFFFFFFFFFFFF


def _pip(x, y, xy, lo, hi):
    inside = False
    j = hi - 1
    for i in range(lo, hi):
        xi, yi = xy[i]
        xj, yj = xy[j]
        if (yi > y) != (yj > y):
            if x < (xj - xi) * (y - yi) / (yj - yi) + xi:
                inside = not inside
        j = i
    return inside


def _in_free_region(x, y, xy, offsets):
    if not _pip(x, y, xy, offsets[0], offsets[1]):
        return False
    for p in range(1, len(offsets) - 1):
        if _pip(x, y, xy, offsets[p], offsets[p + 1]):
            return False
    return True


def _point_clear(x, y, r2, edges):
    for ax, ay, bx, by in edges:
        if dist2_point_segment(x, y, ax, ay, bx, by) <= r2:
            return False
    return True


def _capsule_clear(sx, sy, ex, ey, r2, edges):
    for ax, ay, bx, by in edges:
        if dist2_segment_segment(sx, sy, ex, ey, ax, ay, bx, by) <= r2:
            return False
    return True


def disc_free_many(pts, r, edges, poly_xy, poly_offsets):
    edges_l = edges.tolist()
    xy = poly_xy.tolist()
    offs = poly_offsets.tolist()
    r2 = r * r
    out = np.zeros(len(pts), dtype=np.uint8)
    for i, (x, y) in enumerate(pts.tolist()):
        out[i] = _in_free_region(x, y, xy, offs) and _point_clear(x, y, r2, edges_l)
    return out


def capsule_free_many(segs, r, edges, poly_xy, poly_offsets):
    edges_l = edges.tolist()
    xy = poly_xy.tolist()
    offs = poly_offsets.tolist()
    r2 = r * r
    out = np.zeros(len(segs), dtype=np.uint8)
    for i, (sx, sy, ex, ey) in enumerate(segs.tolist()):
        out[i] = (_in_free_region(sx, sy, xy, offs)
                  and _capsule_clear(sx, sy, ex, ey, r2, edges_l))
    return out


def fill_pumped(cands, radii, margin, quotas, counts, kept_xy, kept_color,
                n_kept, cursor, edges, poly_xy, poly_offsets):
    """Rejection-sample candidates into the kept arrays, round-robin by color.

    Returns ``(consumed, n_kept, cursor)``; ``counts``, ``kept_xy`` and
    ``kept_color`` are updated in place.
    """
    edges_l = edges.tolist()
    xy = poly_xy.tolist()
    offs = poly_offsets.tolist()
    rad = radii.tolist()
    k = len(rad)
    consumed = 0
    for x, y in cands.tolist():
        col = -1
        for step in range(k):
            c = (cursor + step) % k
            if counts[c] < quotas[c]:
                col = c
                break
        if col < 0:
            break
        consumed += 1
        cursor = (col + 1) % k
        rc = rad[col] + margin
        if not _in_free_region(x, y, xy, offs) or not _point_clear(x, y, rc * rc, edges_l):
            continue
        ok = True
        for i in range(n_kept):
            dx = x - kept_xy[i, 0]
            dy = y - kept_xy[i, 1]
            t = rad[col] + rad[kept_color[i]] + margin
            if dx * dx + dy * dy <= t * t:
                ok = False
                break
        if ok:
            kept_xy[n_kept, 0] = x
            kept_xy[n_kept, 1] = y
            kept_color[n_kept] = col
            n_kept += 1
            counts[col] += 1
    return consumed, n_kept, cursor


def edge_plan_color(pts, r, others_xy, others_r, margin, edges, poly_xy, poly_offsets):
    """Edge-planner verdict for every unordered pair of one color's points."""
    n = len(pts)
    out = np.zeros((n, n), dtype=np.uint8)
    P = pts.tolist()
    O = others_xy.tolist()
    OR = others_r.tolist()
    edges_l = edges.tolist()
    xy = poly_xy.tolist()
    offs = poly_offsets.tolist()
    rm = r + margin
    rm2 = rm * rm
    same = 2.0 * r + margin
    same2 = same * same
    for i in range(n):
        sx, sy = P[i]
        for j in range(i + 1, n):
            ex, ey = P[j]
            if not _in_free_region(sx, sy, xy, offs):
                continue
            if not _capsule_clear(sx, sy, ex, ey, rm2, edges_l):
                continue
            ok = True
            for u in range(n):
                if u == i or u == j:
                    continue
                if dist2_point_segment(P[u][0], P[u][1], sx, sy, ex, ey) <= same2:
                    ok = False
                    break
            if not ok:
                continue
            for u in range(len(O)):
                t = r + OR[u] + margin
                if dist2_point_segment(O[u][0], O[u][1], sx, sy, ex, ey) <= t * t:
                    ok = False
                    break
            if ok:
                out[i, j] = 1
                out[j, i] = 1
    return out


def _conflict(a, b, M, rad, color, frm, to, margin):
    if color[a] == color[b] and (frm[a] == frm[b] or to[a] == to[b]):
        return True
    ma = M[a]
    mb = M[b]
    d2 = min_dist2_linear_motions(ma[0], ma[1], ma[2], ma[3], mb[0], mb[1], mb[2], mb[3])
    t = rad[a] + rad[b] + margin
    return d2 < t * t


def conflict_matrix(motions, rad, color, frm, to, margin):
    n = len(motions)
    M = motions.tolist()
    R = rad.tolist()
    C = color.tolist()
    F = frm.tolist()
    T = to.tolist()
    out = np.zeros((n, n), dtype=np.uint8)
    for a in range(n):
        for b in range(a + 1, n):
            if _conflict(a, b, M, R, C, F, T, margin):
                out[a, b] = 1
                out[b, a] = 1
    return out


def splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def greedy_sets(motions, rad, color, frm, to, quotas, margin, conflict,
                perm, rng, max_attempts, max_success):
    """Randomized greedy independent sets with per-color quotas.

    Each attempt scans the candidates in a fresh random order (an in-place
    Fisher-Yates pass over ``perm`` driven by a splitmix64 stream held in
    ``rng[0]``) and accepts a candidate iff its color is below quota and it
    conflicts with no accepted candidate. Scanning stops once every quota is
    met. Returns ``(sets, attempts_used)`` where ``sets`` holds one row of
    accepted candidate indices per successful attempt.
    """
    n = len(motions)
    M = motions.tolist()
    R = rad.tolist()
    C = color.tolist()
    F = frm.tolist()
    T = to.tolist()
    Q = [int(q) for q in quotas]
    k = len(Q)
    total = sum(Q)
    P = perm.tolist()
    use_matrix = conflict.shape[0] == n and n > 0
    state = int(rng[0])
    found = []
    used = 0
    while used < max_attempts and len(found) < max_success:
        used += 1
        counts = [0] * k
        filled = 0
        accepted = []
        for i in range(n):
            state, z = splitmix64(state)
            j = i + z % (n - i)
            P[i], P[j] = P[j], P[i]
            c = P[i]
            col = C[c]
            if counts[col] >= Q[col]:
                continue
            ok = True
            for a in accepted:
                if use_matrix:
                    hit = conflict[c, a]
                else:
                    hit = _conflict(c, a, M, R, C, F, T, margin)
                if hit:
                    ok = False
                    break
            if ok:
                accepted.append(c)
                counts[col] += 1
                if counts[col] == Q[col]:
                    filled += 1
                    if filled == k:
                        break
        if filled == k:
            found.append(accepted)
    perm[:] = P
    rng[0] = state
    sets = np.array(found, dtype=np.int32).reshape(len(found), total)
    return sets, used
