import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from henkin_choice import _kernels_py as py
from henkin_choice.kernels import BACKEND

try:
    from henkin_choice import _kernels as cy
except ImportError:  # pragma: no cover
    cy = None

needs_cy = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


@st.composite
def tables(draw):
    n = draw(st.integers(1, 5))
    arity = draw(st.integers(1, 3))
    k = draw(st.integers(0, 3))
    perms = [np.array(draw(st.permutations(range(n)))) for _ in range(k)]
    return n, arity, perms


def _tab(mod, n, arity, perms):
    if not perms:
        return np.empty((0, n ** arity), dtype=np.int64)
    return np.stack([mod.tuple_table(p, n, arity) for p in perms])


def test_backend_name():
    assert BACKEND in ("cython", "python")


@needs_cy
@given(tables(), st.integers(0, 2**31))
@settings(deadline=None)
def test_backends_agree(tb, seed):
    n, arity, perms = tb
    t_py, t_cy = _tab(py, n, arity, perms), _tab(cy, n, arity, perms)
    assert np.array_equal(t_py, t_cy)
    (l1, k1), (l2, k2) = py.orbit_labels(t_py, n ** arity), cy.orbit_labels(t_cy, n ** arity)
    assert k1 == k2 and np.array_equal(l1, l2)
    flat = np.random.default_rng(seed).random(n ** arity) < 0.5
    assert py.is_invariant(flat, t_py) == cy.is_invariant(flat, t_cy)
    if k1 <= 8:
        assert np.array_equal(py.expand_subsets(l1, k1), cy.expand_subsets(l2, k2))


@given(tables())
@settings(deadline=None)
def test_orbit_unions_are_invariant(tb):
    n, arity, perms = tb
    t = _tab(py, n, arity, perms)
    labels, k = py.orbit_labels(t, n ** arity)
    if k > 8:
        return
    rows = py.expand_subsets(labels, k)
    assert len(rows) == 2 ** k
    assert all(py.is_invariant(r, t) for r in rows)


def test_tuple_table_encodes_images():
    p = np.array([1, 2, 0])
    t = py.tuple_table(p, 3, 2)
    # code of (x, y) is 3*x + y
    assert t[3 * 0 + 2] == 3 * 1 + 0


def test_pure_fallback_selected_by_env():
    env = dict(os.environ, HENKIN_CHOICE_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from henkin_choice import BACKEND; print(BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
