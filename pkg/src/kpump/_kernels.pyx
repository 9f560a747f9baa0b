# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Operation-for-operation twin of ``_pykernels.py``; both backends must give
bit-identical results (build with -ffp-contract=off).
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int32_t, int64_t, uint8_t

cnp.import_array()

NAME = "compiled"


cdef inline double _d2ps(double px, double py, double ax, double ay,
                         double bx, double by) noexcept nogil:
    cdef double dx = bx - ax
    cdef double dy = by - ay
    cdef double ll = dx * dx + dy * dy
    cdef double t, cx, cy
    if ll == 0.0:
        t = 0.0
    else:
        t = ((px - ax) * dx + (py - ay) * dy) / ll
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    cx = ax + t * dx - px
    cy = ay + t * dy - py
    return cx * cx + cy * cy


cdef inline double _orient(double ax, double ay, double bx, double by,
                           double cx, double cy) noexcept nogil:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


cdef inline bint _on_seg(double ax, double ay, double bx, double by,
                         double px, double py) noexcept nogil:
    return (min(ax, bx) <= px <= max(ax, bx)) and (min(ay, by) <= py <= max(ay, by))


cdef inline bint _seg_x(double a1x, double a1y, double b1x, double b1y,
                        double a2x, double a2y, double b2x, double b2y) noexcept nogil:
    cdef double d1 = _orient(a2x, a2y, b2x, b2y, a1x, a1y)
    cdef double d2 = _orient(a2x, a2y, b2x, b2y, b1x, b1y)
    cdef double d3 = _orient(a1x, a1y, b1x, b1y, a2x, a2y)
    cdef double d4 = _orient(a1x, a1y, b1x, b1y, b2x, b2y)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and \
            ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_seg(a2x, a2y, b2x, b2y, a1x, a1y):
        return True
    if d2 == 0 and _on_seg(a2x, a2y, b2x, b2y, b1x, b1y):
        return True
    if d3 == 0 and _on_seg(a1x, a1y, b1x, b1y, a2x, a2y):
        return True
    if d4 == 0 and _on_seg(a1x, a1y, b1x, b1y, b2x, b2y):
        return True
    return False


cdef inline double _d2ss(double a1x, double a1y, double b1x, double b1y,
                         double a2x, double a2y, double b2x, double b2y) noexcept nogil:
    if _seg_x(a1x, a1y, b1x, b1y, a2x, a2y, b2x, b2y):
        return 0.0
    cdef double m = _d2ps(a1x, a1y, a2x, a2y, b2x, b2y)
    cdef double v = _d2ps(b1x, b1y, a2x, a2y, b2x, b2y)
    if v < m:
        m = v
    v = _d2ps(a2x, a2y, a1x, a1y, b1x, b1y)
    if v < m:
        m = v
    v = _d2ps(b2x, b2y, a1x, a1y, b1x, b1y)
    if v < m:
        m = v
    return m


cdef inline double _d2lm(double a0x, double a0y, double a1x, double a1y,
                         double b0x, double b0y, double b1x, double b1y) noexcept nogil:
    cdef double d0x = a0x - b0x
    cdef double d0y = a0y - b0y
    cdef double dvx = (a1x - a0x) - (b1x - b0x)
    cdef double dvy = (a1y - a0y) - (b1y - b0y)
    cdef double vv = dvx * dvx + dvy * dvy
    cdef double t, px, py
    if vv == 0.0:
        t = 0.0
    else:
        t = -(d0x * dvx + d0y * dvy) / vv
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    px = d0x + t * dvx
    py = d0y + t * dvy
    return px * px + py * py


cdef inline bint _pip(double x, double y, const double[:, ::1] xy,
                      Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef bint inside = False
    cdef Py_ssize_t i, j = hi - 1
    cdef double xi, yi, xj, yj
    for i in range(lo, hi):
        xi = xy[i, 0]
        yi = xy[i, 1]
        xj = xy[j, 0]
        yj = xy[j, 1]
        if (yi > y) != (yj > y):
            if x < (xj - xi) * (y - yi) / (yj - yi) + xi:
                inside = not inside
        j = i
    return inside


cdef inline bint _in_free_region(double x, double y, const double[:, ::1] xy,
                                 const int64_t[::1] offs) noexcept nogil:
    cdef Py_ssize_t p
    if not _pip(x, y, xy, offs[0], offs[1]):
        return False
    for p in range(1, offs.shape[0] - 1):
        if _pip(x, y, xy, offs[p], offs[p + 1]):
            return False
    return True


cdef inline bint _point_clear(double x, double y, double r2,
                              const double[:, ::1] e) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(e.shape[0]):
        if _d2ps(x, y, e[i, 0], e[i, 1], e[i, 2], e[i, 3]) <= r2:
            return False
    return True


cdef inline bint _capsule_clear(double sx, double sy, double ex, double ey, double r2,
                                const double[:, ::1] e) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(e.shape[0]):
        if _d2ss(sx, sy, ex, ey, e[i, 0], e[i, 1], e[i, 2], e[i, 3]) <= r2:
            return False
    return True


def disc_free_many(const double[:, ::1] pts, double r, const double[:, ::1] edges,
                   const double[:, ::1] poly_xy, const int64_t[::1] poly_offsets):
    cdef Py_ssize_t i, n = pts.shape[0]
    cdef double r2 = r * r
    out = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = (_in_free_region(pts[i, 0], pts[i, 1], poly_xy, poly_offsets)
                    and _point_clear(pts[i, 0], pts[i, 1], r2, edges))
    return out


def capsule_free_many(const double[:, ::1] segs, double r, const double[:, ::1] edges,
                      const double[:, ::1] poly_xy, const int64_t[::1] poly_offsets):
    cdef Py_ssize_t i, n = segs.shape[0]
    cdef double r2 = r * r
    out = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = (_in_free_region(segs[i, 0], segs[i, 1], poly_xy, poly_offsets)
                    and _capsule_clear(segs[i, 0], segs[i, 1], segs[i, 2], segs[i, 3],
                                       r2, edges))
    return out


def fill_pumped(const double[:, ::1] cands, const double[::1] radii, double margin,
                const int64_t[::1] quotas, int64_t[::1] counts, double[:, ::1] kept_xy,
                int32_t[::1] kept_color, Py_ssize_t n_kept, Py_ssize_t cursor,
                const double[:, ::1] edges, const double[:, ::1] poly_xy,
                const int64_t[::1] poly_offsets):
    cdef Py_ssize_t k = radii.shape[0]
    cdef Py_ssize_t consumed = 0, b, step, c, col, i
    cdef double x, y, rc, dx, dy, t
    cdef bint ok
    with nogil:
        for b in range(cands.shape[0]):
            x = cands[b, 0]
            y = cands[b, 1]
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
            rc = radii[col] + margin
            if not _in_free_region(x, y, poly_xy, poly_offsets) or \
                    not _point_clear(x, y, rc * rc, edges):
                continue
            ok = True
            for i in range(n_kept):
                dx = x - kept_xy[i, 0]
                dy = y - kept_xy[i, 1]
                t = radii[col] + radii[kept_color[i]] + margin
                if dx * dx + dy * dy <= t * t:
                    ok = False
                    break
            if ok:
                kept_xy[n_kept, 0] = x
                kept_xy[n_kept, 1] = y
                kept_color[n_kept] = <int32_t>col
                n_kept += 1
                counts[col] += 1
    return consumed, n_kept, cursor


def edge_plan_color(const double[:, ::1] pts, double r, const double[:, ::1] others_xy,
                    const double[::1] others_r, double margin, const double[:, ::1] edges,
                    const double[:, ::1] poly_xy, const int64_t[::1] poly_offsets):
    cdef Py_ssize_t n = pts.shape[0], i, j, u
    out = np.zeros((n, n), dtype=np.uint8)
    cdef uint8_t[:, ::1] o = out
    cdef double rm = r + margin
    cdef double rm2 = rm * rm
    cdef double same = 2.0 * r + margin
    cdef double same2 = same * same
    cdef double sx, sy, ex, ey, t
    cdef bint ok
    with nogil:
        for i in range(n):
            sx = pts[i, 0]
            sy = pts[i, 1]
            for j in range(i + 1, n):
                ex = pts[j, 0]
                ey = pts[j, 1]
                if not _in_free_region(sx, sy, poly_xy, poly_offsets):
                    continue
                if not _capsule_clear(sx, sy, ex, ey, rm2, edges):
                    continue
                ok = True
                for u in range(n):
                    if u == i or u == j:
                        continue
                    if _d2ps(pts[u, 0], pts[u, 1], sx, sy, ex, ey) <= same2:
                        ok = False
                        break
                if not ok:
                    continue
                for u in range(others_xy.shape[0]):
                    t = r + others_r[u] + margin
                    if _d2ps(others_xy[u, 0], others_xy[u, 1], sx, sy, ex, ey) <= t * t:
                        ok = False
                        break
                if ok:
                    o[i, j] = 1
                    o[j, i] = 1
    return out


cdef inline bint _conflict(Py_ssize_t a, Py_ssize_t b, const double[:, ::1] M,
                           const double[::1] rad, const int32_t[::1] color,
                           const int32_t[::1] frm, const int32_t[::1] to,
                           double margin) noexcept nogil:
    if color[a] == color[b] and (frm[a] == frm[b] or to[a] == to[b]):
        return True
    cdef double d2 = _d2lm(M[a, 0], M[a, 1], M[a, 2], M[a, 3],
                           M[b, 0], M[b, 1], M[b, 2], M[b, 3])
    cdef double t = rad[a] + rad[b] + margin
    return d2 < t * t


def conflict_matrix(const double[:, ::1] motions, const double[::1] rad,
                    const int32_t[::1] color, const int32_t[::1] frm,
                    const int32_t[::1] to, double margin):
    cdef Py_ssize_t n = motions.shape[0], a, b
    out = np.zeros((n, n), dtype=np.uint8)
    cdef uint8_t[:, ::1] o = out
    with nogil:
        for a in range(n):
            for b in range(a + 1, n):
                if _conflict(a, b, motions, rad, color, frm, to, margin):
                    o[a, b] = 1
                    o[b, a] = 1
    return out


cdef inline uint64_t _splitmix(uint64_t* state) noexcept nogil:
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15ULL
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


def splitmix64(state):
    cdef uint64_t s = <uint64_t>state
    cdef uint64_t z = _splitmix(&s)
    return int(s), int(z)


def greedy_sets(const double[:, ::1] motions, const double[::1] rad,
                const int32_t[::1] color, const int32_t[::1] frm, const int32_t[::1] to,
                const int64_t[::1] quotas, double margin, const uint8_t[:, ::1] conflict,
                int32_t[::1] perm, uint64_t[::1] rng, Py_ssize_t max_attempts,
                Py_ssize_t max_success):
    cdef Py_ssize_t n = motions.shape[0]
    cdef Py_ssize_t k = quotas.shape[0]
    cdef Py_ssize_t total = 0, q
    for q in range(k):
        total += quotas[q]
    cdef bint use_matrix = conflict.shape[0] == n and n > 0
    cdef uint64_t state = rng[0]
    cdef Py_ssize_t used = 0, nfound = 0, i, j, c, col, filled, nacc, a
    cdef int32_t tmp
    cdef bint ok, hit
    cdef int64_t[::1] counts = np.zeros(k, dtype=np.int64)
    cdef int32_t[::1] accepted = np.zeros(max(total, 1), dtype=np.int32)
    cdef Py_ssize_t cap = 16
    buf = np.zeros((cap, max(total, 1)), dtype=np.int32)
    cdef int32_t[:, ::1] bv = buf
    while used < max_attempts and nfound < max_success:
        with nogil:
            while used < max_attempts and nfound < max_success and nfound < cap:
                used += 1
                for q in range(k):
                    counts[q] = 0
                filled = 0
                nacc = 0
                for i in range(n):
                    j = i + <Py_ssize_t>(_splitmix(&state) % <uint64_t>(n - i))
                    tmp = perm[i]
                    perm[i] = perm[j]
                    perm[j] = tmp
                    c = perm[i]
                    col = color[c]
                    if counts[col] >= quotas[col]:
                        continue
                    ok = True
                    for a in range(nacc):
                        if use_matrix:
                            hit = conflict[c, accepted[a]] != 0
                        else:
                            hit = _conflict(c, accepted[a], motions, rad, color, frm, to, margin)
                        if hit:
                            ok = False
                            break
                    if ok:
                        accepted[nacc] = <int32_t>c
                        nacc += 1
                        counts[col] += 1
                        if counts[col] == quotas[col]:
                            filled += 1
                            if filled == k:
                                break
                if filled == k:
                    for a in range(nacc):
                        bv[nfound, a] = accepted[a]
                    nfound += 1
        if nfound >= cap and used < max_attempts and nfound < max_success:
            cap *= 2
            grown = np.zeros((cap, max(total, 1)), dtype=np.int32)
            grown[: nfound] = buf[: nfound]
            buf = grown
            bv = buf
    rng[0] = state
    return np.ascontiguousarray(buf[:nfound, :total]), used
