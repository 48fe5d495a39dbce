"""Matroids given by bases, their flats, and deletion machinery.

A matroid is stored as (ground set, set of bases) with everything derived
from the basis rank function: rank(S) = max |S ∩ B|.  Ground elements are
distinct positive ints; bases are equal-size nonempty subsets satisfying
the exchange axiom; loops (elements in no basis) are rejected, so rank >= 1
always.

Flats are represented as frozensets in set-level APIs and as sorted int
tuples ("labels", the polynomial VarId) in chain/fan-facing APIs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Mapping

from .poly import VarId

GroundElement = int
Flat = frozenset  # frozenset[int]
Chain = tuple  # tuple[VarId, ...], ascending by inclusion

# Flat enumeration walks closures of F + e level by level; the guard bounds
# the 2^|E| worst case of rank queries behind it.
ENUM_LIMIT = 12


class MatroidError(ValueError):
    pass


def flat_label(F: Iterable[int]) -> VarId:
    return tuple(sorted(F))


def _check_exchange(bases: list[Flat]) -> tuple[Flat, Flat, int] | None:
    """First exchange-axiom violation (A, B, a) or None."""
    family = set(bases)
    for A in bases:
        for B in bases:
            if A == B:
                continue
            for a in A - B:
                if not any((A - {a}) | {b} in family for b in B - A):
                    return (A, B, a)
    return None


@dataclass(frozen=True, eq=False)
class FlatLattice:
    """All flats of a matroid ordered by inclusion.

    flats are sorted by (cardinality, label); covers_of lists the covers
    (flats of rank one higher) of each flat in that same order.
    """

    flats: tuple[Flat, ...]
    ranks: dict[Flat, int] = field(repr=False)
    covers: dict[Flat, tuple[Flat, ...]] = field(repr=False)

    def rank_of_flat(self, F: Flat) -> int:
        return self.ranks[F]

    def covers_of(self, F: Flat) -> tuple[Flat, ...]:
        return self.covers[F]

    def nontrivial(self) -> tuple[Flat, ...]:
        full = self.flats[-1]
        return tuple(F for F in self.flats if F and F != full)


class Matroid:
    """Loopless matroid on positive-int ground elements, given by bases."""

    def __init__(self, elements: Iterable[int], bases: Iterable[Iterable[int]]):
        ground = frozenset(elements)
        if not ground or any(not isinstance(e, int) or e <= 0 for e in ground):
            raise MatroidError("ground set must be nonempty distinct positive ints")
        family = frozenset(frozenset(B) for B in bases)
        if not family:
            raise MatroidError("at least one basis required")
        sizes = {len(B) for B in family}
        if len(sizes) != 1:
            raise MatroidError(f"bases must share one size, got sizes {sorted(sizes)}")
        (r,) = sizes
        if r == 0:
            raise MatroidError("rank 0 not supported (every element would be a loop)")
        for B in family:
            if not B <= ground:
                raise MatroidError(f"basis {sorted(B)} not inside the ground set")
        violation = _check_exchange(sorted(family, key=flat_label))
        if violation is not None:
            A, B, a = violation
            raise MatroidError(
                f"exchange axiom fails for A={sorted(A)}, B={sorted(B)}, a={a}"
            )
        loops = ground - frozenset().union(*family)
        if loops:
            raise MatroidError(f"loops not supported: {sorted(loops)}")
        self.elements: frozenset[int] = ground
        self.bases: frozenset[Flat] = family
        self.rank: int = r
        self._rank_cache: dict[Flat, int] = {}

    @classmethod
    def from_bases(cls, elements: Iterable[int], bases: Iterable[Iterable[int]]) -> "Matroid":
        return cls(elements, bases)

    @classmethod
    def from_flats(cls, elements: Iterable[int], flats: Iterable[Iterable[int]]) -> "Matroid":
        """Reconstruct the matroid whose flat family is exactly the input.

        Validates the flat axioms (ground set and the closure of the empty
        set present, intersection-closed, covers of each flat partition the
        complement), rebuilds bases as the maximal independent sets, and
        re-derives the flats to confirm the round trip.
        """
        ground = frozenset(elements)
        fam = {frozenset(F) for F in flats}
        if not ground:
            raise MatroidError("ground set must be nonempty")
        if len(ground) > ENUM_LIMIT:
            raise MatroidError(f"flat reconstruction limited to {ENUM_LIMIT} elements")
        if ground not in fam:
            raise MatroidError("flat family must contain the ground set")
        if frozenset() not in fam:
            raise MatroidError("flat family must contain the empty set (loopless)")
        for F in fam:
            if not F <= ground:
                raise MatroidError(f"flat {sorted(F)} not inside the ground set")
        for F, G in combinations(fam, 2):
            if F & G not in fam:
                raise MatroidError(
                    f"flat family not intersection-closed: {sorted(F)} ∩ {sorted(G)}"
                )
        # Covers by minimality; the partition axiom then pins the family.
        for F in fam:
            above = [G for G in fam if F < G]
            covers = [G for G in above if not any(F < H < G for H in above)]
            seen: set[int] = set()
            for G in covers:
                step = G - F
                if step & seen:
                    raise MatroidError(
                        f"covers of flat {sorted(F)} overlap off the flat"
                    )
                seen |= step
            if seen != ground - F:
                raise MatroidError(
                    f"covers of flat {sorted(F)} do not partition the complement"
                )
        # Height = rank; the smallest flat containing S gives rank(S).
        by_size = sorted(fam, key=lambda F: len(F))
        height: dict[Flat, int] = {}
        for F in by_size:
            below = [height[G] for G in by_size if G < F and G in height]
            height[F] = max(below, default=-1) + 1
        r = height[ground]

        def small_rank(S: frozenset) -> int:
            best = min((F for F in fam if S <= F), key=len)
            return height[best]

        bases = [
            frozenset(S)
            for S in combinations(sorted(ground), r)
            if small_rank(frozenset(S)) == r
            and all(small_rank(frozenset(S) - {e}) == r - 1 for e in S)
        ]
        if not bases:
            raise MatroidError("no bases reconstructed from the flat family")
        M = cls(ground, bases)
        if set(M.lattice().flats) != fam:
            raise MatroidError("flat family is not the flat lattice of any matroid")
        return M

    # -- rank / closure ------------------------------------------------

    def rank_of(self, S: Iterable[int]) -> int:
        key = frozenset(S)
        if not key <= self.elements:
            raise MatroidError(f"subset {sorted(key)} not inside the ground set")
        cached = self._rank_cache.get(key)
        if cached is None:
            cached = max(len(key & B) for B in self.bases)
            self._rank_cache[key] = cached
        return cached

    def closure(self, S: Iterable[int]) -> Flat:
        key = frozenset(S)
        r = self.rank_of(key)
        return frozenset(
            e for e in self.elements if e in key or self.rank_of(key | {e}) == r
        )

    # -- flats ---------------------------------------------------------

    @cached_property
    def _lattice(self) -> FlatLattice:
        if len(self.elements) > ENUM_LIMIT:
            raise MatroidError(f"flat enumeration limited to {ENUM_LIMIT} elements")
        levels: list[list[Flat]] = [[self.closure(frozenset())]]
        seen = {levels[0][0]}
        for _ in range(self.rank):
            nxt: set[Flat] = set()
            for F in levels[-1]:
                for e in self.elements - F:
                    nxt.add(self.closure(F | {e}))
            level = sorted(nxt - seen, key=flat_label)
            seen |= nxt
            levels.append(level)
        flats = tuple(
            sorted(
                (F for level in levels for F in level),
                key=lambda F: (len(F), flat_label(F)),
            )
        )
        ranks = {F: self.rank_of(F) for F in flats}
        covers = {
            F: tuple(
                G
                for G in flats
                if F < G and ranks[G] == ranks[F] + 1
            )
            for F in flats
        }
        return FlatLattice(flats=flats, ranks=ranks, covers=covers)

    def lattice(self) -> FlatLattice:
        return self._lattice

    def nontrivial_flats(self) -> tuple[Flat, ...]:
        return self.lattice().nontrivial()

    def nontrivial_labels(self) -> tuple[VarId, ...]:
        return tuple(flat_label(F) for F in self.nontrivial_flats())

    def maximal_chains(self) -> tuple[Chain, ...]:
        """Maximal chains of nontrivial flats, lex-ordered by label sequence.

        A rank-1 matroid has exactly one (empty) chain.
        """
        lat = self.lattice()
        empty = lat.flats[0]
        full = self.elements
        out: list[Chain] = []

        def walk(F: Flat, acc: list[VarId]) -> None:
            for G in lat.covers_of(F):
                if G == full:
                    out.append(tuple(acc))
                else:
                    acc.append(flat_label(G))
                    walk(G, acc)
                    acc.pop()

        walk(empty, [])
        return tuple(sorted(out))

    # -- deletion ------------------------------------------------------

    def delete(self, i: int) -> "Matroid":
        if i not in self.elements:
            raise MatroidError(f"element {i} not in the ground set")
        rest = self.elements - {i}
        if not rest:
            raise MatroidError("cannot delete the last element")
        r2 = self.rank_of(rest)
        bases = [
            frozenset(S)
            for S in combinations(sorted(rest), r2)
            if self.rank_of(frozenset(S)) == r2
        ]
        return Matroid(rest, bases)

    def is_coloop(self, i: int) -> bool:
        if i not in self.elements:
            raise MatroidError(f"element {i} not in the ground set")
        return self.rank_of(self.elements - {i}) == self.rank - 1

    def s_set(self, i: int) -> tuple[Flat, ...]:
        """Flats F with both F and F ∪ {i} nontrivial flats (so i ∉ F),
        ordered by (cardinality, label)."""
        if i not in self.elements:
            raise MatroidError(f"element {i} not in the ground set")
        nt = set(self.nontrivial_flats())
        out = [F for F in nt if i not in F and F | {i} in nt]
        return tuple(sorted(out, key=lambda F: (len(F), flat_label(F))))

    def closure_map(self, i: int) -> dict[Flat, Flat]:
        """Nontrivial flats of self \\ i mapped to their closure in self."""
        sub = self.delete(i)
        return {G: self.closure(G) for G in sub.nontrivial_flats()}

    # -- relabeling ----------------------------------------------------

    def relabel(self, mapping: Mapping[int, int]) -> "Matroid":
        if set(mapping) != set(self.elements):
            raise MatroidError("relabel mapping must cover the ground set exactly")
        if len(set(mapping.values())) != len(mapping):
            raise MatroidError("relabel mapping must be injective")
        return Matroid(
            (mapping[e] for e in self.elements),
            ({mapping[e] for e in B} for B in self.bases),
        )

    # -- plumbing --------------------------------------------------------

    def bases_sorted(self) -> list[tuple[int, ...]]:
        return sorted(tuple(sorted(B)) for B in self.bases)

    def ground_sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.elements))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Matroid)
            and self.elements == other.elements
            and self.bases == other.bases
        )

    def __hash__(self) -> int:
        return hash((self.elements, self.bases))

    def __repr__(self) -> str:
        return f"Matroid(|E|={len(self.elements)}, rank={self.rank}, bases={len(self.bases)})"


def uniform_matroid(r: int, m: int) -> Matroid:
    """U_{r,m}: every r-subset of {1..m} is a basis."""
    if not 1 <= r <= m:
        raise MatroidError(f"uniform matroid needs 1 <= r <= m, got r={r}, m={m}")
    return Matroid(range(1, m + 1), combinations(range(1, m + 1), r))


def random_matroid(rng: random.Random, max_elements: int = 6) -> Matroid:
    """Random loopless matroid: seed a few equal-size sets, then repair
    exchange violations by adding the missing exchanged set until the
    family is closed (the repair only grows the family, so it stops)."""
    while True:
        m = rng.randint(1, max_elements)
        ground = list(range(1, m + 1))
        r = rng.randint(1, m)
        all_r = [frozenset(S) for S in combinations(ground, r)]
        family = set(rng.sample(all_r, k=rng.randint(1, min(4, len(all_r)))))
        while True:
            violation = _check_exchange(sorted(family, key=flat_label))
            if violation is None:
                break
            A, B, a = violation
            b = rng.choice(sorted(B - A))
            family.add((A - {a}) | {b})
        if frozenset().union(*family) == set(ground):
            return Matroid(ground, family)


def all_loopless_matroids(m: int) -> Iterator[Matroid]:
    """Every loopless matroid on ground set {1..m}, all ranks.

    Enumerates subsets of the r-subsets and keeps the basis families; only
    feasible for m <= 5 (at most 2^10 candidate families per rank).
    """
    if not 1 <= m <= 5:
        raise MatroidError("exhaustive enumeration supported for 1 <= m <= 5")
    ground = list(range(1, m + 1))
    for r in range(1, m + 1):
        all_r = [frozenset(S) for S in combinations(ground, r)]
        n = len(all_r)
        for mask in range(1, 2**n):
            family = [all_r[i] for i in range(n) if mask >> i & 1]
            if frozenset().union(*family) != set(ground):
                continue
            if _check_exchange(sorted(family, key=flat_label)) is not None:
                continue
            yield Matroid(ground, family)
