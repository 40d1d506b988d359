# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops; same contracts as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def tuple_table(point_image, Py_ssize_t n_points, Py_ssize_t arity):
    cdef cnp.int64_t[:] img = np.ascontiguousarray(point_image, dtype=np.int64)
    cdef Py_ssize_t total = 1, k, code, rem, out_code, mult
    for k in range(arity):
        total *= n_points
    out = np.empty(total, dtype=np.int64)
    cdef cnp.int64_t[:] o = out
    for code in range(total):
        rem = code
        out_code = 0
        mult = 1
        for k in range(arity):
            out_code += img[rem % n_points] * mult
            rem //= n_points
            mult *= n_points
        o[code] = out_code
    return out


cdef inline Py_ssize_t _find(cnp.int64_t[:] parent, Py_ssize_t a) nogil:
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


def orbit_labels(tables, Py_ssize_t n_codes):
    cdef cnp.int64_t[:, :] t = np.ascontiguousarray(tables, dtype=np.int64).reshape(-1, n_codes)
    parent_arr = np.arange(n_codes, dtype=np.int64)
    cdef cnp.int64_t[:] parent = parent_arr
    cdef Py_ssize_t g, a, ra, rb, n_orb = 0
    for g in range(t.shape[0]):
        for a in range(n_codes):
            ra = _find(parent, a)
            rb = _find(parent, t[g, a])
            if ra < rb:
                parent[rb] = ra
            elif rb < ra:
                parent[ra] = rb
    labels_arr = np.empty(n_codes, dtype=np.int64)
    remap_arr = np.full(n_codes, -1, dtype=np.int64)
    cdef cnp.int64_t[:] labels = labels_arr
    cdef cnp.int64_t[:] remap = remap_arr
    for a in range(n_codes):
        ra = _find(parent, a)
        if remap[ra] < 0:
            remap[ra] = n_orb
            n_orb += 1
        labels[a] = remap[ra]
    return labels_arr, n_orb


def is_invariant(flat, tables):
    cdef cnp.uint8_t[:] f = np.ascontiguousarray(flat, dtype=np.uint8)
    cdef Py_ssize_t n = f.shape[0]
    cdef cnp.int64_t[:, :] t = np.ascontiguousarray(tables, dtype=np.int64).reshape(-1, n)
    cdef Py_ssize_t g, a
    for g in range(t.shape[0]):
        for a in range(n):
            if f[t[g, a]] != f[a]:
                return False
    return True


def expand_subsets(labels, Py_ssize_t n_orbits):
    cdef cnp.int64_t[:] lab = np.ascontiguousarray(labels, dtype=np.int64)
    cdef Py_ssize_t n = lab.shape[0], rows = (<Py_ssize_t> 1) << n_orbits, k, a
    out = np.empty((rows, n), dtype=np.bool_)
    cdef cnp.uint8_t[:, :] o = out.view(np.uint8)
    for k in range(rows):
        for a in range(n):
            o[k, a] = (k >> lab[a]) & 1
    return out
