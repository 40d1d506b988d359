"""Individuals, permutations and the automorphism groups of the truncated models.

Individuals are stored as integer *points* ``0..D-1`` numbered in the model's
lexicographic order, so ``min`` over points is ``min_lexico``:

* PAIR_AUTO (pair model): point ``2*index + part``; order on (index, part).
* FIX_PART1 (two-copy model): part-0 points first, then part-1 points.
* FULL_FINITARY / STANDARD: point ``index``, part 0.

Truncation fidelity: the orbit arguments need at least two free pairs (or two
free part-0 points) outside every support in play, hence N >= 2*s + 2.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence


class Individual(NamedTuple):
    part: int
    index: int

    def __str__(self) -> str:
        return f"({self.part},{self.index})"


class GroupKind(enum.Enum):
    FULL_FINITARY = "full_finitary"
    PAIR_AUTO = "pair_auto"
    FIX_PART1 = "fix_part1"
    STANDARD = "standard"  # trivial group: every predicate admissible


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class Permutation:
    """A permutation of the points ``0..D-1``, stored as its image tuple."""

    image: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.image) != list(range(len(self.image))):
            raise ValueError("not a bijection")

    @classmethod
    def identity(cls, size: int) -> "Permutation":
        return cls(tuple(range(size)))

    @classmethod
    def from_cycles(cls, size: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        img = list(range(size))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a] = b
        return cls(tuple(img))

    @classmethod
    def transposition(cls, size: int, a: int, b: int) -> "Permutation":
        return cls.from_cycles(size, [(a, b)])

    @property
    def size(self) -> int:
        return len(self.image)

    def __call__(self, x: int) -> int:
        if not 0 <= x < len(self.image):
            raise DomainError(f"point {x} outside the truncated domain")
        return self.image[x]

    def apply_tuple(self, t: Sequence[int]) -> tuple[int, ...]:
        return tuple(self(x) for x in t)

    def compose(self, other: "Permutation") -> "Permutation":
        """``self * other``: apply ``other`` first."""
        return Permutation(tuple(self.image[other.image[i]] for i in range(self.size)))

    __mul__ = compose

    @cached_property
    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for i, j in enumerate(self.image):
            inv[j] = i
        return Permutation(tuple(inv))

    def moved(self) -> list[int]:
        return [i for i, j in enumerate(self.image) if i != j]

    def is_identity(self) -> bool:
        return not self.moved()

    def cycles(self) -> list[list[int]]:
        seen, out = set(), []
        for i in range(self.size):
            if i in seen or self.image[i] == i:
                continue
            cyc, j = [], i
            while j not in seen:
                seen.add(j)
                cyc.append(j)
                j = self.image[j]
            out.append(cyc)
        return out


@dataclass(frozen=True)
class GroupSpec:
    kind: GroupKind
    size: int
    size1: int = 0  # part-1 size for FIX_PART1

    def __post_init__(self) -> None:
        if self.size < 0 or self.size1 < 0:
            raise ValueError("sizes must be nonnegative")
        if self.kind is not GroupKind.FIX_PART1 and self.size1:
            raise ValueError("size1 only applies to FIX_PART1")

    # -- domain ---------------------------------------------------------------
    @cached_property
    def domain(self) -> tuple[Individual, ...]:
        if self.kind is GroupKind.PAIR_AUTO:
            return tuple(Individual(p % 2, p // 2) for p in range(2 * self.size))
        if self.kind is GroupKind.FIX_PART1:
            return tuple(Individual(0, i) for i in range(self.size)) + tuple(
                Individual(1, i) for i in range(self.size1))
        return tuple(Individual(0, i) for i in range(self.size))

    @property
    def n_points(self) -> int:
        return len(self.domain)

    @cached_property
    def _index(self) -> dict[Individual, int]:
        return {ind: p for p, ind in enumerate(self.domain)}

    def point(self, part: int, index: int) -> int:
        try:
            return self._index[Individual(part, index)]
        except KeyError:
            raise DomainError(f"individual ({part},{index}) outside the truncated domain") from None

    def individual(self, p: int) -> Individual:
        if not 0 <= p < self.n_points:
            raise DomainError(f"point {p} outside the truncated domain")
        return self.domain[p]

    def pair_point(self, index: int, part: int) -> int:
        """Pair-model convenience: the individual written (index, part)."""
        return self.point(part, index)

    # -- supports -------------------------------------------------------------
    @cached_property
    def fixed_points(self) -> frozenset[int]:
        """Points fixed by every group element."""
        if self.kind is GroupKind.FIX_PART1:
            return frozenset(range(self.size, self.size + self.size1))
        if self.kind is GroupKind.STANDARD:
            return frozenset(range(self.n_points))
        return frozenset()

    def partner(self, p: int) -> int:
        return p ^ 1

    def normalize_support(self, pts: Iterable[int]) -> frozenset[int]:
        pts = frozenset(pts)
        for p in pts:
            self.individual(p)
        if self.kind is GroupKind.PAIR_AUTO:
            return frozenset(q for p in pts for q in (p, p ^ 1))
        return pts - self.fixed_points

    def support_units(self) -> list[tuple[int, ...]]:
        """The atoms a support budget counts: pairs, or single movable points."""
        if self.kind is GroupKind.PAIR_AUTO:
            return [(2 * i, 2 * i + 1) for i in range(self.size)]
        if self.kind is GroupKind.STANDARD:
            return []
        return [(p,) for p in range(self.n_points) if p not in self.fixed_points]

    def support_size(self, support: Iterable[int]) -> int:
        s = self.normalize_support(support)
        return len(s) // 2 if self.kind is GroupKind.PAIR_AUTO else len(s)

    def supports_up_to(self, budget: int) -> Iterator[frozenset[int]]:
        """All normalized supports of at most ``budget`` units, smallest first."""
        units = self.support_units()
        for k in range(0, min(budget, len(units)) + 1):
            for combo in itertools.combinations(units, k):
                yield frozenset(p for u in combo for p in u)

    def free_points(self, support: Iterable[int]) -> list[int]:
        s = self.normalize_support(support)
        return [p for p in range(self.n_points) if p not in s and p not in self.fixed_points]

    # -- group elements -------------------------------------------------------
    def stabilizer_generators(self, support: Iterable[int]) -> list[Permutation]:
        """Generators of the pointwise stabilizer of ``support`` within the truncated group."""
        s = self.normalize_support(support)
        n = self.n_points
        gens: list[Permutation] = []
        if self.kind is GroupKind.PAIR_AUTO:
            free = [i for i in range(self.size) if 2 * i not in s]
            for i in free:
                gens.append(Permutation.transposition(n, 2 * i, 2 * i + 1))
            for a, b in zip(free, free[1:]):
                gens.append(Permutation.from_cycles(n, [(2 * a, 2 * b), (2 * a + 1, 2 * b + 1)]))
        elif self.kind in (GroupKind.FULL_FINITARY, GroupKind.FIX_PART1):
            free = self.free_points(s)
            for a, b in zip(free, free[1:]):
                gens.append(Permutation.transposition(n, a, b))
        return gens

    def elements(self) -> Iterator[Permutation]:
        """Every element of the truncated group (brute force; small sizes only)."""
        n = self.n_points
        if self.kind is GroupKind.STANDARD:
            yield Permutation.identity(n)
            return
        if self.kind is GroupKind.PAIR_AUTO:
            for phi in itertools.permutations(range(self.size)):
                for flips in itertools.product((0, 1), repeat=self.size):
                    img = [0] * n
                    for i in range(self.size):
                        for mu in (0, 1):
                            img[2 * i + mu] = 2 * phi[i] + (mu ^ flips[i])
                    yield Permutation(tuple(img))
            return
        movable = [p for p in range(n) if p not in self.fixed_points]
        for perm in itertools.permutations(movable):
            img = list(range(n))
            for a, b in zip(movable, perm):
                img[a] = b
            yield Permutation(tuple(img))

    def contains(self, p: Permutation) -> bool:
        if p.size != self.n_points:
            return False
        if any(p(x) != x for x in self.fixed_points):
            return False
        if self.kind is GroupKind.PAIR_AUTO:
            return all(p(2 * i) ^ 1 == p(2 * i + 1) for i in range(self.size))
        return True

    def random_element(self, rng) -> Permutation:
        n = self.n_points
        if self.kind is GroupKind.PAIR_AUTO:
            phi = list(range(self.size))
            rng.shuffle(phi)
            img = [0] * n
            for i in range(self.size):
                flip = rng.randrange(2)
                for mu in (0, 1):
                    img[2 * i + mu] = 2 * phi[i] + (mu ^ flip)
            return Permutation(tuple(img))
        movable = sorted(set(range(n)) - self.fixed_points)
        shuffled = list(movable)
        rng.shuffle(shuffled)
        img = list(range(n))
        for a, b in zip(movable, shuffled):
            img[a] = b
        return Permutation(tuple(img))

    def edge_relation(self) -> set[tuple[int, int]]:
        """The pair edges {((n,0),(n,1)), ((n,1),(n,0))} of the pair model."""
        if self.kind is not GroupKind.PAIR_AUTO:
            return set()
        return {(2 * i + mu, 2 * i + 1 - mu) for i in range(self.size) for mu in (0, 1)}

    def permutation_to_json(self, p: Permutation) -> list[list[list[int]]]:
        return [[list(self.domain[x]) for x in cyc] for cyc in p.cycles()]

    def permutation_from_json(self, cycles) -> Permutation:
        return Permutation.from_cycles(self.n_points, [[self.point(*ind) for ind in cyc] for cyc in cycles])


def apply(p: Permutation, x: int) -> int:
    return p(x)


def apply_tuple(p: Permutation, t: Sequence[int]) -> tuple[int, ...]:
    return p.apply_tuple(t)


def orbit(t: Sequence[int], gens: Sequence[Permutation]) -> set[tuple[int, ...]]:
    """Least set containing ``t`` that is closed under every generator."""
    start = tuple(t)
    seen = {start}
    todo = [start]
    while todo:
        cur = todo.pop()
        for g in gens:
            nxt = g.apply_tuple(cur)
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


def generated_group(gens: Sequence[Permutation], size: int) -> set[Permutation]:
    ident = Permutation.identity(size)
    seen = {ident}
    todo = [ident]
    while todo:
        cur = todo.pop()
        for g in gens:
            nxt = g * cur
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


def pointwise_stabilizer(group: GroupSpec, pts: Iterable[int]) -> set[Permutation]:
    """Brute-force pointwise stabilizer (test oracle)."""
    pts = list(pts)
    return {p for p in group.elements() if all(p(x) == x for x in pts)}


def lexico_min(points: Iterable[int]) -> int:
    """Least point in the model's lexicographic order."""
    pts = list(points)
    if not pts:
        raise ValueError("min_lexico of an empty set")
    return min(pts)
