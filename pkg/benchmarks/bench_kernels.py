"""Time the compiled kernels against the pure-Python fallback on the workloads enumeration uses.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from henkin_choice import _kernels_py
from henkin_choice.group_action import GroupKind, GroupSpec

try:
    from henkin_choice import _kernels as _kernels_c
except ImportError:  # pragma: no cover - extension not built
    _kernels_c = None


def workloads():
    """(label, group, support, arity) cases of increasing size."""
    g2 = GroupSpec(GroupKind.PAIR_AUTO, 4)
    g3 = GroupSpec(GroupKind.FIX_PART1, 6, 6)
    g0 = GroupSpec(GroupKind.FULL_FINITARY, 8)
    return [
        ("sigma2 N=4 binary, support 1 pair", g2, g2.normalize_support([0]), 2),
        ("sigma2 N=4 ternary, support 0", g2, frozenset(), 3),
        ("sigma3 6+6 binary, support 2", g3, frozenset([0, 1]), 2),
        ("sigma0 N=8 ternary, support 1", g0, frozenset([0]), 3),
    ]


def bench(mod, g, support, arity, repeat):
    gens = g.stabilizer_generators(support)
    n = g.n_points
    codes = n ** arity
    tables = np.stack([mod.tuple_table(np.asarray(p.image), n, arity) for p in gens])
    labels, n_orb = mod.orbit_labels(tables, codes)
    flat = np.zeros(codes, dtype=bool)
    out = {
        "tuple_table": min(timeit.repeat(
            lambda: [mod.tuple_table(np.asarray(p.image), n, arity) for p in gens], number=1, repeat=repeat)),
        "orbit_labels": min(timeit.repeat(lambda: mod.orbit_labels(tables, codes), number=1, repeat=repeat)),
        "is_invariant": min(timeit.repeat(lambda: mod.is_invariant(flat, tables), number=1, repeat=repeat)),
        "expand_subsets": min(timeit.repeat(
            lambda: mod.expand_subsets(np.minimum(labels, 11), min(n_orb, 12)), number=1, repeat=repeat)),
    }
    return out, n_orb


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    mods = [("python", _kernels_py)] + ([("cython", _kernels_c)] if _kernels_c else [])
    if _kernels_c is None:
        print("compiled kernels not built; timing the fallback only")
    for label, g, support, arity in workloads():
        rows = {name: bench(mod, g, support, arity, args.repeat) for name, mod in mods}
        n_orb = rows["python"][1]
        print(f"\n{label}: {g.n_points ** arity} tuples, {n_orb} orbits")
        for kernel in ("tuple_table", "orbit_labels", "is_invariant", "expand_subsets"):
            t_py = rows["python"][0][kernel]
            line = f"  {kernel:15s} python {t_py * 1e3:9.3f} ms"
            if "cython" in rows:
                t_c = rows["cython"][0][kernel]
                line += f"   cython {t_c * 1e3:9.3f} ms   speedup {t_py / max(t_c, 1e-9):7.1f}x"
            print(line)


if __name__ == "__main__":
    main()
