"""Simplicial fans, Bergman fans of matroids, and star subdivisions.

A fan is stored by its rays (label -> exact rational vector) and its
maximal cones (frozensets of ray labels); the full face-closed cone set is
materialized from the maximal cones.  All fans here are pure: every
maximal cone has the same number of rays, and that number is the fan
dimension.  Ray labels are flat labels (sorted int tuples), which keeps
fan cones, lattice chains and polynomial variables in one namespace.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Union

from .linalg import Vector, bareiss_rank, frac_vector, in_span, quotient_map
from .matroid import Matroid, flat_label
from .poly import VarId, var_key

Cone = frozenset  # frozenset[VarId]


def cone_key(c: Cone) -> tuple:
    return tuple(sorted((var_key(v) for v in c)))


@dataclass(frozen=True)
class Ray:
    label: VarId
    vector: Vector


class SimplicialFan:
    """Pure simplicial fan in Q^ambient_dim."""

    def __init__(
        self,
        ambient_dim: int,
        rays: Mapping[VarId, Sequence],
        maximal_cones: Iterable[Iterable[VarId]],
    ):
        self.ambient_dim = ambient_dim
        self._vec: dict[VarId, Vector] = {}
        for label, v in rays.items():
            vec = frac_vector(v)
            if len(vec) != ambient_dim:
                raise ValueError(f"ray {label}: vector length {len(vec)} != {ambient_dim}")
            if not any(vec):
                raise ValueError(f"ray {label}: zero vector")
            self._vec[label] = vec
        max_cones = {Cone(c) for c in maximal_cones}
        if not max_cones:
            raise ValueError("a fan needs at least one maximal cone")
        sizes = {len(c) for c in max_cones}
        if len(sizes) != 1:
            raise ValueError(f"fan not pure: cone sizes {sorted(sizes)}")
        (self.dim,) = sizes
        used: set[VarId] = set()
        for c in max_cones:
            if not c <= self._vec.keys():
                raise ValueError(f"cone {sorted(c, key=var_key)} uses unknown rays")
            used |= c
        if used != self._vec.keys():
            extra = sorted(self._vec.keys() - used, key=var_key)
            raise ValueError(f"rays not in any maximal cone: {extra}")
        for c in max_cones:
            if bareiss_rank([self._vec[l] for l in c]) != len(c):
                raise ValueError(f"cone {sorted(c, key=var_key)} is not simplicial")
        self.maximal_cones: tuple[Cone, ...] = tuple(sorted(max_cones, key=cone_key))
        closed: set[Cone] = set()
        for c in max_cones:
            for k in range(len(c) + 1):
                closed.update(Cone(f) for f in combinations(sorted(c, key=var_key), k))
        self._all_cones = frozenset(closed)

    # -- queries ---------------------------------------------------------

    @property
    def rays(self) -> tuple[Ray, ...]:
        return tuple(
            Ray(label, self._vec[label]) for label in sorted(self._vec, key=var_key)
        )

    def ray_labels(self) -> tuple[VarId, ...]:
        return tuple(sorted(self._vec, key=var_key))

    def vector(self, label: VarId) -> Vector:
        return self._vec[label]

    def vectors(self, cone: Iterable[VarId]) -> list[Vector]:
        return [self._vec[l] for l in sorted(cone, key=var_key)]

    def all_cones(self) -> frozenset:
        return self._all_cones

    def cones(self, j: int) -> tuple[Cone, ...]:
        if j < 0 or j > self.dim:
            return ()
        return tuple(sorted((c for c in self._all_cones if len(c) == j), key=cone_key))

    def has_cone(self, cone: Iterable[VarId]) -> bool:
        return Cone(cone) in self._all_cones

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SimplicialFan)
            and self.ambient_dim == other.ambient_dim
            and self._vec == other._vec
            and set(self.maximal_cones) == set(other.maximal_cones)
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, frozenset(self._vec.items()), frozenset(self.maximal_cones)))

    def __repr__(self) -> str:
        return (
            f"SimplicialFan(dim={self.dim}, ambient={self.ambient_dim}, "
            f"rays={len(self._vec)}, maximal={len(self.maximal_cones)})"
        )

    # -- local structure -------------------------------------------------

    def star(self, cone: Iterable[VarId]) -> "SimplicialFan":
        """Subfan of all cones containing the given cone (with their faces)."""
        tau = Cone(cone)
        if tau not in self._all_cones:
            raise ValueError("star of a cone not in the fan")
        maximal = [c for c in self.maximal_cones if tau <= c]
        labels = set().union(*maximal)
        return SimplicialFan(
            self.ambient_dim, {l: self._vec[l] for l in labels}, maximal
        )

    def link(self, cone: Iterable[VarId]) -> "SimplicialFan":
        """Cones disjoint from tau whose union with tau is a cone, with ray
        vectors taken in the exact quotient Q^n / span(tau)."""
        tau = Cone(cone)
        if tau not in self._all_cones:
            raise ValueError("link of a cone not in the fan")
        project = quotient_map(self.vectors(tau), self.ambient_dim)
        maximal = [c - tau for c in self.maximal_cones if tau <= c]
        labels = set().union(*maximal) if maximal else set()
        return SimplicialFan(
            self.ambient_dim - len(tau),
            {l: project(self._vec[l]) for l in labels},
            maximal,
        )

    def coface_adjacency(
        self, j: int
    ) -> tuple[tuple[Cone, tuple[tuple[Cone, VarId], ...]], ...]:
        """For each (j-1)-cone tau: the j-cones above it with the ray each
        one adds, both in deterministic order."""
        if not 1 <= j <= self.dim:
            raise ValueError(f"coface dimension {j} out of range")
        js = self.cones(j)
        out = []
        for tau in self.cones(j - 1):
            entries = []
            for sigma in js:
                if tau < sigma:
                    (opp,) = sigma - tau
                    entries.append((sigma, opp))
            out.append((tau, tuple(entries)))
        return tuple(out)

    def codim1_adjacency(self):
        return self.coface_adjacency(self.dim)

    # -- subdivision -------------------------------------------------------

    def star_subdivide(
        self,
        cone: Iterable[VarId],
        new_label: VarId,
        new_vector: Sequence | None = None,
    ) -> "SimplicialFan":
        """Star subdivision at the given cone; the new ray defaults to the
        sum of the cone's ray vectors."""
        tau = Cone(cone)
        if tau not in self._all_cones:
            raise ValueError("cannot subdivide at a cone not in the fan")
        if len(tau) < 2:
            raise ValueError("star subdivision needs a cone of dimension >= 2")
        if new_label in self._vec:
            raise ValueError(f"new ray label {new_label} already present")
        if new_vector is None:
            vecs = self.vectors(tau)
            new_vector = tuple(sum(col, Fraction(0)) for col in zip(*vecs))
        rays = dict(self._vec)
        rays[new_label] = frac_vector(new_vector)
        maximal: list[Cone] = []
        for sigma in self.maximal_cones:
            if tau <= sigma:
                for t in sorted(tau, key=var_key):
                    maximal.append((sigma - {t}) | {new_label})
            else:
                maximal.append(sigma)
        return SimplicialFan(self.ambient_dim, rays, maximal)


class MinkowskiWeight:
    """Rational weight on the maximal cones of a fan."""

    def __init__(self, fan: SimplicialFan, values: Union[Mapping, int, Fraction]):
        if isinstance(values, (int, Fraction)):
            table = {c: Fraction(values) for c in fan.maximal_cones}
        else:
            table = {Cone(c): Fraction(v) for c, v in values.items()}
            if set(table) != set(fan.maximal_cones):
                raise ValueError("weight must assign exactly the maximal cones")
        self.fan = fan
        self.values: dict[Cone, Fraction] = table

    def __getitem__(self, cone: Iterable[VarId]) -> Fraction:
        return self.values[Cone(cone)]

    def items(self) -> list[tuple[Cone, Fraction]]:
        return sorted(self.values.items(), key=lambda cv: cone_key(cv[0]))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MinkowskiWeight) and self.values == other.values

    def __repr__(self) -> str:
        return f"MinkowskiWeight({len(self.values)} cones)"


def constant_weight(fan: SimplicialFan, value: Union[int, Fraction] = 1) -> MinkowskiWeight:
    return MinkowskiWeight(fan, value)


def subdivision_pullback(
    weight: MinkowskiWeight, subdivided: SimplicialFan, cone: Iterable[VarId], new_label: VarId
) -> MinkowskiWeight:
    """Weight on a star subdivision: each piece of a split cone inherits
    the original cone's weight."""
    tau = Cone(cone)
    values = {}
    for sigma in subdivided.maximal_cones:
        source = sigma if new_label not in sigma else (sigma - {new_label}) | tau
        values[sigma] = weight[source]
    return MinkowskiWeight(subdivided, values)


@dataclass(frozen=True)
class BalancingReport:
    ok: bool
    violations: tuple[tuple[Cone, Vector], ...]


def check_balancing(fan: SimplicialFan, weight: MinkowskiWeight) -> BalancingReport:
    """Exact balancing at every codimension-1 cone: the weighted sum of the
    opposite rays must lie in the cone's span."""
    if set(weight.values) != set(fan.maximal_cones):
        raise ValueError("weight does not match the fan's maximal cones")
    if fan.dim == 0:
        return BalancingReport(ok=True, violations=())
    bad: list[tuple[Cone, Vector]] = []
    for tau, cofaces in fan.codim1_adjacency():
        total = [Fraction(0)] * fan.ambient_dim
        for sigma, opp in cofaces:
            w = weight[sigma]
            if w:
                for k, x in enumerate(fan.vector(opp)):
                    total[k] += w * x
        if not in_span(fan.vectors(tau), total):
            bad.append((tau, tuple(total)))
    return BalancingReport(ok=not bad, violations=tuple(bad))


# -- Bergman fans -----------------------------------------------------------


def _rep_table(M: Matroid) -> dict[int, Vector]:
    """e_i representatives in Q^(|E|-1): the quotient by the all-ones
    vector sends the last ground element to minus the sum of the others."""
    ground = M.ground_sorted()
    n = len(ground) - 1
    table: dict[int, Vector] = {}
    for t, e in enumerate(ground):
        if t < n:
            table[e] = tuple(Fraction(1 if k == t else 0) for k in range(n))
        else:
            table[e] = tuple(Fraction(-1) for _ in range(n))
    return table


def flat_vector(M: Matroid, F: Iterable[int]) -> Vector:
    table = _rep_table(M)
    n = len(M.elements) - 1
    total = [Fraction(0)] * n
    for e in F:
        for k, x in enumerate(table[e]):
            total[k] += x
    return tuple(total)


def bergman_fan(M: Matroid) -> SimplicialFan:
    """Rays are the nontrivial flats, cones the chains among them; lives in
    Q^(|E|-1).  A rank-1 matroid gives the zero fan (one empty cone)."""
    rays = {flat_label(F): flat_vector(M, F) for F in M.nontrivial_flats()}
    maximal = [Cone(chain) for chain in M.maximal_chains()]
    return SimplicialFan(len(M.elements) - 1, rays, maximal)


def deletion_tower(M: Matroid, i: int) -> list[SimplicialFan]:
    """Fans Delta_0 = Bergman fan of M through Delta_k, where Delta_j
    merges the ray pairs {F_l, F_l + i} for l <= j into the ray labeled
    F_l.  Each step is verified to be the exact star subdivision inverse:
    Delta_{j-1} == star_subdivide(Delta_j, {ρ_i, ρ_{F_j}}, F_j + i)."""
    if i not in M.elements:
        raise ValueError(f"element {i} not in the ground set")
    if len(M.elements) < 2:
        raise ValueError("deletion tower needs at least 2 elements")
    s = M.s_set(i)
    chains = M.maximal_chains()
    d = M.rank - 1
    fans = [bergman_fan(M)]
    for j in range(1, len(s) + 1):
        merged = {flat_label(F | {i}): flat_label(F) for F in s[:j]}
        images = {Cone(merged.get(lab, lab) for lab in chain) for chain in chains}
        maximal = {c for c in images if len(c) == d}
        for c in images:
            if not any(c <= top for top in maximal):
                raise AssertionError("merged chain image not inside a maximal cone")
        labels = set().union(*maximal) if maximal else set()
        rays = {lab: fans[0].vector(lab) for lab in labels}
        fans.append(SimplicialFan(len(M.elements) - 1, rays, maximal))
    for j in range(len(s), 0, -1):
        F = flat_label(s[j - 1])
        Fi = flat_label(s[j - 1] | {i})
        rebuilt = fans[j].star_subdivide({(i,), F}, Fi)
        if rebuilt != fans[j - 1]:
            raise AssertionError(f"tower step {j} is not a star subdivision at {F}")
    return fans
