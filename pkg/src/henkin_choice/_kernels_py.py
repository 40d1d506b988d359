"""Pure numpy versions of the hot loops (fallback when the extension is missing).

Tuples of arity n over D points are coded row-major: ``t -> sum t[i] * D**(n-1-i)``.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def tuple_table(point_image, n_points: int, arity: int) -> np.ndarray:
    """Image of every tuple code under the point map ``point_image``."""
    img = np.asarray(point_image, dtype=np.int64)
    codes = np.zeros((1,), dtype=np.int64)
    for _ in range(arity):
        codes = (codes[:, None] * n_points + img[None, :]).ravel()
    return codes


def orbit_labels(tables: np.ndarray, n_codes: int) -> tuple[np.ndarray, int]:
    """Orbit of every code under the generators whose tuple tables are the rows of ``tables``.

    Labels are numbered in order of the least code of each orbit.
    """
    parent = list(range(n_codes))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for row in np.asarray(tables, dtype=np.int64):
        for a, b in enumerate(row.tolist()):
            ra, rb = find(a), find(b)
            if ra != rb:
                if ra < rb:
                    parent[rb] = ra
                else:
                    parent[ra] = rb
    labels = np.empty(n_codes, dtype=np.int64)
    seen: dict[int, int] = {}
    for a in range(n_codes):
        r = find(a)
        if r not in seen:
            seen[r] = len(seen)
        labels[a] = seen[r]
    return labels, len(seen)


def is_invariant(flat, tables) -> bool:
    flat = np.asarray(flat, dtype=bool)
    for row in np.asarray(tables, dtype=np.int64):
        if not np.array_equal(flat[row], flat):
            return False
    return True


def expand_subsets(labels, n_orbits: int) -> np.ndarray:
    """Row k is the union of the orbits whose bits are set in k."""
    labels = np.asarray(labels, dtype=np.int64)
    ks = np.arange(1 << n_orbits, dtype=np.int64)
    return ((ks[:, None] >> labels[None, :]) & 1).astype(bool)
