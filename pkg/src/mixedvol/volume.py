"""Volume polynomials of matroid Chow rings, computed two independent ways.

First computation: for certified generic vectors v_e in Q^(d-1) summing to
zero over the ground set, every maximal chain of nontrivial flats
contributes (a_1 x_{F_1} + ... + a_d x_{F_d})^d / (d! a_1 ... a_d), where
a_t is the signed minor (-1)^(1+t) det(A drop column t) of the matrix A
with columns v_{F_t} = sum of v_e over e in F_t.  Genericity means every
a_t of every chain is nonzero; certification retries fresh seeds with a
doubled coordinate bound under a budget read from MIXEDVOL_RETRY_BUDGET.

Second computation: recursion on deletion of i = max(E).  The volume of
the deletion lifts to the merged fan (variable substitution for a
non-coloop, antiderivatives for a coloop), then one star-subdivision
operator application per flat in S_i rebuilds the volume of the Bergman
fan.  The operator for a 2-cone {p, q} with new ray r is

    V  |->  V - sum_{m=2..d} (z^m / m!) sum_{a+b=m, a,b>=1} d_p^a d_q^b V,
    z = x_r - x_p - x_q,

the unique solution of (d_p - d_r)(d_q - d_r) V = 0 matching V at x_r's
absence; the general j-cone version alternates the sign by (-1)^j.

The rest of the module is the verification calculus: evaluation of the
volume on arbitrary pure fans in Q^d, Minkowski weight decomposition into
boundary fans of simplices, derivative/annihilator checks, and Chow rank
checks against the Poincare pairing.
"""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from .fan import (
    Cone,
    MinkowskiWeight,
    SimplicialFan,
    bergman_fan,
    check_balancing,
    constant_weight,
)
from .linalg import (
    Vector,
    bareiss_det,
    bareiss_rank,
    frac_vector,
    mat_vec,
    nullspace,
    quotient_map,
)
from .matroid import Matroid, flat_label
from .poly import Monomial, RationalPoly, VarId, fresh_label, var_key

RETRY_ENV = "MIXEDVOL_RETRY_BUDGET"
DEFAULT_RETRY_BUDGET = 32
INITIAL_BOUND = 8


class GenericityError(RuntimeError):
    """Raised when no certified generic data is found within the budget."""


def retry_budget() -> int:
    raw = os.environ.get(RETRY_ENV)
    if raw is None:
        return DEFAULT_RETRY_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{RETRY_ENV} must be a positive int, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{RETRY_ENV} must be positive, got {value}")
    return value


def _map_ordered(fn: Callable, items: Iterable, jobs: int) -> list:
    """Apply fn preserving order; thread count never affects the result
    because all arithmetic is exact and the merge is ordered."""
    todo = list(items)
    if jobs <= 1 or len(todo) <= 1:
        return [fn(x) for x in todo]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, todo))


# -- generic vectors and the determinant formula ------------------------------


@dataclass(frozen=True)
class GenericVectors:
    """Vectors v_e in Q^(rank-2) per ground element, summing to zero,
    together with the provenance of their certification."""

    vectors: tuple[tuple[int, Vector], ...]
    seed: int | None = None
    bound: int | None = None
    certified_chains: int = 0

    def __post_init__(self):
        if self.vectors:
            dims = {len(v) for _, v in self.vectors}
            if len(dims) != 1:
                raise ValueError("generic vectors must share one dimension")
            total = [Fraction(0)] * dims.pop()
            for _, v in self.vectors:
                for k, x in enumerate(v):
                    total[k] += x
            if any(total):
                raise ValueError("generic vectors must sum to zero")

    @classmethod
    def from_mapping(
        cls,
        mapping: Mapping[int, Sequence],
        seed: int | None = None,
        bound: int | None = None,
        certified_chains: int = 0,
    ) -> "GenericVectors":
        items = tuple(sorted((e, frac_vector(v)) for e, v in mapping.items()))
        return cls(items, seed, bound, certified_chains)

    def vector(self, e: int) -> Vector:
        for elem, v in self.vectors:
            if elem == e:
                return v
        raise KeyError(e)

    def flat_vector(self, F: Iterable[int]) -> Vector:
        dim = len(self.vectors[0][1]) if self.vectors else 0
        total = [Fraction(0)] * dim
        for e in F:
            for k, x in enumerate(self.vector(e)):
                total[k] += x
        return tuple(total)


@dataclass(frozen=True)
class ChainMatrix:
    """One maximal chain with its column vectors v_{F_t}, the signed
    cofactor coefficients a_t, and the scale c = d! a_1 ... a_d."""

    chain: tuple[VarId, ...]
    columns: tuple[Vector, ...]
    coefficients: tuple[Fraction, ...]
    scale: Fraction


def chain_matrices(M: Matroid, gv: GenericVectors, jobs: int = 1) -> tuple[ChainMatrix, ...]:
    """ChainMatrix data for every maximal chain; raises GenericityError on
    the first zero coefficient (the vectors fail the certificate)."""
    d = M.rank - 1

    def build(chain) -> ChainMatrix:
        columns = tuple(gv.flat_vector(F) for F in chain)
        coeffs = []
        for t in range(d):
            rows = [
                [columns[s][r] for s in range(d) if s != t] for r in range(d - 1)
            ]
            a = bareiss_det(rows)
            if t % 2 == 1:
                a = -a
            if not a:
                raise GenericityError(
                    f"zero coefficient a_{t + 1} on chain {chain}"
                )
            coeffs.append(a)
        scale = Fraction(math.factorial(d))
        for a in coeffs:
            scale *= a
        return ChainMatrix(chain, columns, tuple(coeffs), scale)

    return tuple(_map_ordered(build, M.maximal_chains(), jobs))


def generic_vectors(M: Matroid, seed: int = 0) -> GenericVectors:
    """Sample integer vectors until the all-chains certificate passes,
    incrementing the sub-seed and doubling the bound each attempt."""
    ground = M.ground_sorted()
    dim = max(M.rank - 2, 0)
    budget = retry_budget()
    for attempt in range(budget):
        rng = random.Random(f"gv:{seed}:{attempt}")
        bound = INITIAL_BOUND << attempt
        mapping: dict[int, tuple] = {}
        total = [0] * dim
        for e in ground[:-1]:
            v = tuple(rng.randint(-bound, bound) for _ in range(dim))
            mapping[e] = v
            total = [t + x for t, x in zip(total, v)]
        mapping[ground[-1]] = tuple(-t for t in total)
        gv = GenericVectors.from_mapping(mapping, seed=seed, bound=bound)
        try:
            cms = chain_matrices(M, gv)
        except GenericityError:
            continue
        return GenericVectors(gv.vectors, seed, bound, certified_chains=len(cms))
    raise GenericityError(
        f"no generic vectors for seed {seed} within {budget} attempts"
    )


@dataclass(frozen=True)
class VolPolynomial:
    """A volume polynomial with its degree, variable universe and
    provenance; equality ignores provenance."""

    poly: RationalPoly
    degree: int
    universe: frozenset  # frozenset[VarId]
    method: str = field(default="?", compare=False)
    seed: int | None = field(default=None, compare=False)


def brion_volume(
    M: Matroid, gv: GenericVectors | None = None, *, seed: int = 0, jobs: int = 1
) -> VolPolynomial:
    """Sum of (sum_t a_t x_{F_t})^d / (d! prod_t a_t) over maximal chains.

    A GenericityError out of chain_matrices for caller-supplied vectors
    means a stale certificate; freshly sampled vectors are certified here.
    """
    if gv is None:
        gv = generic_vectors(M, seed=seed)
    cms = chain_matrices(M, gv, jobs=jobs)
    d = M.rank - 1

    def contribution(cm: ChainMatrix) -> RationalPoly:
        form = RationalPoly.linear_form(dict(zip(cm.chain, cm.coefficients)))
        return (form**d) / cm.scale

    total = RationalPoly.sum(_map_ordered(contribution, cms, jobs))
    if not total.is_homogeneous(d):
        raise AssertionError("volume polynomial is not homogeneous")
    return VolPolynomial(
        poly=total,
        degree=d,
        universe=frozenset(M.nontrivial_labels()),
        method="brion",
        seed=gv.seed,
    )


# -- projections and the evaluation formula -----------------------------------


def generic_projection(fan: SimplicialFan, seed: int = 0) -> SimplicialFan:
    """Image of the fan under a seeded integer linear map Q^n -> Q^d that
    keeps every maximal cone simplicial (certified; resampled on failure)."""
    d, n = fan.dim, fan.ambient_dim
    if d == n:
        return fan
    budget = retry_budget()
    for attempt in range(budget):
        rng = random.Random(f"proj:{seed}:{attempt}")
        bound = INITIAL_BOUND << attempt
        T = [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(d)]
        rays = {r.label: mat_vec(T, r.vector) for r in fan.rays}
        try:
            return SimplicialFan(d, rays, fan.maximal_cones)
        except ValueError:
            continue
    raise GenericityError(f"no simplicial projection within {budget} attempts")


def projection_from_generic_vectors(
    M: Matroid, gv: GenericVectors, seed: int = 0
) -> tuple[SimplicialFan, Vector]:
    """Project the Bergman fan to Q^d by e -> (v_e, t_e) with the certified
    v_e on top and a generic last row t.  Returns the fan and v0 = e_d, for
    which the evaluation formula reproduces the determinant formula term by
    term."""
    d = M.rank - 1
    if d == 0:
        return SimplicialFan(0, {}, [Cone()]), ()
    ground = M.ground_sorted()
    budget = retry_budget()
    for attempt in range(budget):
        rng = random.Random(f"projgv:{seed}:{attempt}")
        bound = INITIAL_BOUND << attempt
        t_row = [rng.randint(-bound, bound) for _ in ground[:-1]]
        t_row.append(-sum(t_row))
        columns = {
            e: tuple(gv.vector(e)) + (Fraction(t),) for e, t in zip(ground, t_row)
        }
        rays = {}
        for F in M.nontrivial_flats():
            total = [Fraction(0)] * d
            for e in F:
                for k, x in enumerate(columns[e]):
                    total[k] += x
            rays[flat_label(F)] = tuple(total)
        try:
            fan = SimplicialFan(d, rays, [Cone(c) for c in M.maximal_chains()])
        except ValueError:
            continue
        v0 = tuple(Fraction(1 if k == d - 1 else 0) for k in range(d))
        return fan, v0
    raise GenericityError(f"no generic last row within {budget} attempts")


def _cone_evaluation_data(
    fan: SimplicialFan, sigma: Cone, v0: Vector
) -> tuple[tuple[VarId, ...], tuple[Fraction, ...]]:
    """Labels of sigma in canonical order with X_i = (-1)^i det(A drop
    column i) for A = [v0 | v_1 | ... | v_d]; X_0 is dropped."""
    labels = tuple(sorted(sigma, key=var_key))
    cols = [v0] + [fan.vector(l) for l in labels]
    xs = []
    for i in range(1, len(cols)):
        keep = [cols[j] for j in range(len(cols)) if j != i]
        rows = [[c[r] for c in keep] for r in range(fan.ambient_dim)]
        det = bareiss_det(rows)
        xs.append(det if i % 2 == 0 else -det)
    return labels, tuple(xs)


def evaluation_volume_fan(
    fan: SimplicialFan,
    weight: MinkowskiWeight,
    v0: Sequence | None = None,
    *,
    seed: int = 0,
    jobs: int = 1,
) -> VolPolynomial:
    """Vol_w = sum over maximal cones of (w/d!) (sum X_i x_i)^d / prod X_i,
    for a generic v0 making every X_i nonzero.  The fan must be pure of
    full dimension in Q^d and the weight balanced."""
    if fan.ambient_dim != fan.dim:
        raise ValueError("evaluation needs a fan of full dimension in Q^d")
    report = check_balancing(fan, weight)
    if not report.ok:
        raise ValueError(
            f"weight is not balanced at {len(report.violations)} codim-1 cone(s)"
        )
    d = fan.dim
    universe = frozenset(fan.ray_labels())
    if d == 0:
        poly = RationalPoly.constant(weight[Cone()])
        return VolPolynomial(poly, 0, universe, method="evaluation", seed=seed)

    def all_data(v: Vector):
        out = _map_ordered(
            lambda sigma: _cone_evaluation_data(fan, sigma, v), fan.maximal_cones, jobs
        )
        if any(not x for _, xs in out for x in xs):
            return None
        return out

    if v0 is not None:
        v0 = frac_vector(v0)
        if len(v0) != d:
            raise ValueError(f"v0 must have length {d}")
        data = all_data(v0)
        if data is None:
            raise GenericityError("supplied v0 gives a zero cone coefficient")
    else:
        budget = retry_budget()
        data = None
        for attempt in range(budget):
            rng = random.Random(f"v0:{seed}:{attempt}")
            bound = INITIAL_BOUND << attempt
            candidate = frac_vector([rng.randint(-bound, bound) for _ in range(d)])
            data = all_data(candidate)
            if data is not None:
                break
        if data is None:
            raise GenericityError(f"no generic v0 within {budget} attempts")

    def contribution(pack):
        labels, xs, w = pack
        if not w:
            return RationalPoly.zero()
        form = RationalPoly.linear_form(dict(zip(labels, xs)))
        denom = Fraction(math.factorial(d))
        for x in xs:
            denom *= x
        return (form**d) * (w / denom)

    packs = [
        (labels, xs, weight[sigma])
        for sigma, (labels, xs) in zip(fan.maximal_cones, data)
    ]
    total = RationalPoly.sum(_map_ordered(contribution, packs, jobs))
    if not total.is_homogeneous(d):
        raise AssertionError("evaluated volume is not homogeneous")
    return VolPolynomial(total, d, universe, method="evaluation", seed=seed)


# -- star subdivision operator ------------------------------------------------


def _compositions(total: int, parts: int):
    """All tuples of `parts` positive ints summing to `total`."""
    for cuts in combinations(range(1, total), parts - 1):
        prev = 0
        out = []
        for c in cuts:
            out.append(c - prev)
            prev = c
        out.append(total - prev)
        yield tuple(out)


def subdivision_operator_general(
    vol: VolPolynomial, ps: Sequence[VarId], r: VarId
) -> VolPolynomial:
    """Volume on the star subdivision at the cone with rays ps, new ray r:

        V - (-1)^j sum_{m=j..d} (z^m/m!) sum_{alpha >= 1, |alpha| = m}
            d_{p_1}^{alpha_1} ... d_{p_j}^{alpha_j} V,   z = x_r - sum x_p.
    """
    ps = tuple(ps)
    j = len(ps)
    if j < 2 or len(set(ps)) != j:
        raise ValueError("subdivision needs at least two distinct cone rays")
    missing = [p for p in ps if p not in vol.universe]
    if missing:
        raise ValueError(f"cone rays not in the variable universe: {missing}")
    if r in vol.universe:
        raise ValueError(f"new ray {r} already in the variable universe")
    d = vol.degree
    z = RationalPoly.variable(r)
    for p in ps:
        z = z - RationalPoly.variable(p)
    sign = -1 if j % 2 else 1
    total = vol.poly
    zpow = z ** (j - 1)
    for m in range(j, d + 1):
        zpow = zpow * z
        w_m = RationalPoly.sum(
            vol.poly.derivative(dict(zip(ps, alpha)))
            for alpha in _compositions(m, j)
        )
        if w_m.is_zero:
            continue
        total = total - zpow * w_m * Fraction(sign, math.factorial(m))
    return VolPolynomial(
        total, d, vol.universe | {r}, method=vol.method, seed=vol.seed
    )


def subdivision_operator(
    vol: VolPolynomial, p: VarId, q: VarId, r: VarId
) -> VolPolynomial:
    """Star subdivision at the 2-cone {p, q} adding the ray r."""
    return subdivision_operator_general(vol, (p, q), r)


# -- deletion recursion --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BCoefficients:
    """Coefficients of the linear relation coming from the global linear
    function t_i - t_j with j = min(E - i):

        non-coloop:  d_i = sum b_G d_G,
        coloop:      d_i - d_{E-i} = sum b_G d_G,

    over closures G of the nontrivial flats of the deletion, with
    b_G = [j in G] - [i in G] in {-1, 0, 1}."""

    i: int
    j: int
    table: Mapping[VarId, int]

    def get(self, label: VarId) -> int:
        return self.table.get(label, 0)


def b_coefficients(M: Matroid, i: int) -> BCoefficients:
    if i not in M.elements:
        raise ValueError(f"element {i} not in the ground set")
    if len(M.elements) < 2:
        raise ValueError("b-coefficients need at least 2 elements")
    j = min(M.elements - {i})
    table: dict[VarId, int] = {}
    closure = M.closure_map(i)
    for G, Gbar in closure.items():
        table[flat_label(Gbar)] = int(j in Gbar) - int(i in Gbar)
    if len(table) != len(closure):
        raise AssertionError("closure map is not injective")
    return BCoefficients(i=i, j=j, table=table)


def _closure_labels(cmap: Mapping) -> dict[VarId, VarId]:
    return {flat_label(G): flat_label(Gbar) for G, Gbar in cmap.items()}


def _check_annihilated(
    poly: RationalPoly, plus: Sequence[VarId], minus: Mapping[VarId, Fraction]
) -> bool:
    """Whether (sum_p d_p - sum_G c_G d_G) poly == 0."""
    pieces = [poly.derivative(p) for p in plus]
    pieces += [poly.derivative(g) * -c for g, c in minus.items() if c]
    return RationalPoly.sum(pieces).is_zero


def lift_non_coloop(
    vol: VolPolynomial, cmap: Mapping, b: BCoefficients, i: int
) -> VolPolynomial:
    """Vol on the merged fan for a non-coloop i: substitute
    x_G -> x_{closure(G)} + b x_i; verified annihilated by
    d_i - sum b d_closure and equal to the renamed input at x_i = 0."""
    labels = _closure_labels(cmap)
    xi = (i,)
    mapping = {}
    for G, Gbar in labels.items():
        form = RationalPoly.variable(Gbar)
        coef = b.get(Gbar)
        if coef:
            form = form + RationalPoly.variable(xi) * coef
        mapping[G] = form
    lifted = vol.poly.substitute(mapping)
    universe = frozenset(labels.values()) | {xi}
    minus = {Gbar: Fraction(b.get(Gbar)) for Gbar in labels.values()}
    if not _check_annihilated(lifted, [xi], minus):
        raise AssertionError("non-coloop lift not annihilated by the relation")
    at_zero = lifted.substitute(
        {**{g: RationalPoly.variable(g) for g in universe - {xi}}, xi: 0}
    )
    if at_zero != vol.poly.rename(labels):
        raise AssertionError("non-coloop lift breaks the initial condition")
    return VolPolynomial(lifted, vol.degree, universe, vol.method, vol.seed)


def lift_coloop(
    vol: VolPolynomial, cmap: Mapping, b: BCoefficients, i: int, rest: VarId
) -> VolPolynomial:
    """Vol on the merged fan for a coloop i, with rest = label of E - i:

        int Vol(x_closure + b x_i) dx_i + int Vol(x_closure - b x_rest) dx_rest,

    verified annihilated by d_i - d_rest - sum b d_closure and by
    d_i d_rest, with linear part (x_i + x_rest) Vol(x_closure)."""
    labels = _closure_labels(cmap)
    xi = (i,)
    map_i, map_rest = {}, {}
    for G, Gbar in labels.items():
        coef = b.get(Gbar)
        form_i = RationalPoly.variable(Gbar)
        form_rest = RationalPoly.variable(Gbar)
        if coef:
            form_i = form_i + RationalPoly.variable(xi) * coef
            form_rest = form_rest - RationalPoly.variable(rest) * coef
        map_i[G] = form_i
        map_rest[G] = form_rest
    lifted = vol.poly.substitute(map_i).antiderivative(xi) + vol.poly.substitute(
        map_rest
    ).antiderivative(rest)
    universe = frozenset(labels.values()) | {xi, rest}
    minus = {Gbar: Fraction(b.get(Gbar)) for Gbar in labels.values()}
    minus[rest] = minus.get(rest, Fraction(0)) + 1
    if not _check_annihilated(lifted, [xi], minus):
        raise AssertionError("coloop lift not annihilated by the relation")
    if not lifted.derivative({xi: 1, rest: 1}).is_zero:
        raise AssertionError("coloop lift not annihilated by d_i d_rest")
    linear = RationalPoly(
        {
            m: c
            for m, c in lifted.terms()
            if m.exponent(xi) + m.exponent(rest) == 1
        }
    )
    expected = (
        RationalPoly.variable(xi) + RationalPoly.variable(rest)
    ) * vol.poly.rename(labels)
    if linear != expected:
        raise AssertionError("coloop lift has the wrong linear part")
    return VolPolynomial(lifted, vol.degree + 1, universe, vol.method, vol.seed)


def deletion_volume(M: Matroid) -> VolPolynomial:
    """Volume polynomial by recursion on deletion of i = max(E).

    If {i} is not a flat, i is parallel to an earlier element and the
    volume is the deletion's volume with variables renamed along the
    closure map.  Otherwise the deletion's volume is lifted to the fully
    merged fan and one subdivision operator per flat of S_i (largest
    first) rebuilds the Bergman fan's volume.
    """
    if len(M.elements) == 1:
        return VolPolynomial(
            RationalPoly.constant(1), 0, frozenset(), method="deletion"
        )
    i = max(M.elements)
    sub = deletion_volume(M.delete(i))
    cmap = M.closure_map(i)
    target = frozenset(M.nontrivial_labels())
    if M.closure({i}) != frozenset({i}):
        labels = _closure_labels(cmap)
        renamed = sub.poly.rename(labels)
        universe = frozenset(labels.values())
        if universe != target:
            raise AssertionError("parallel-element renaming misses flats")
        return VolPolynomial(renamed, sub.degree, universe, method="deletion")
    b = b_coefficients(M, i)
    if M.is_coloop(i):
        cur = lift_coloop(sub, cmap, b, i, flat_label(M.elements - {i}))
    else:
        cur = lift_non_coloop(sub, cmap, b, i)
    for F in reversed(M.s_set(i)):
        cur = subdivision_operator(
            cur, (i,), flat_label(F), flat_label(F | {i})
        )
    if cur.universe != target:
        raise AssertionError("deletion recursion ended with the wrong universe")
    return VolPolynomial(cur.poly, cur.degree, cur.universe, method="deletion")


# -- verification calculus -----------------------------------------------------


def degree_of(vol: VolPolynomial, D: Monomial | RationalPoly) -> Fraction:
    """The constant d^D(vol) for a derivative D homogeneous of the volume's
    degree: coefficient extraction times the factorials of the orders."""
    if isinstance(D, Monomial):
        if D.degree != vol.degree:
            raise ValueError(
                f"derivative degree {D.degree} != volume degree {vol.degree}"
            )
        value = vol.poly.coefficient(D)
        if value:
            for _, e in D.items():
                value *= math.factorial(e)
        return value
    if not D.is_homogeneous(vol.degree):
        raise ValueError("derivative polynomial must be homogeneous of the degree")
    total = Fraction(0)
    for m, c in D.terms():
        total += c * degree_of(vol, m)
    return total


@dataclass(frozen=True)
class AnnihilatorReport:
    """Failures of the three derivative identities of a volume polynomial:
    incomparable products, ground-pair linear relations, chain monomials of
    degree one; plus homogeneity and universe containment."""

    homogeneous: bool
    degree_matches: bool
    inside_universe: bool
    incomparable_failures: tuple  # ((F, G), monomial) pairs
    relation_failures: tuple  # (i, j) ground pairs
    chain_failures: tuple  # (chain, value) pairs

    @property
    def ok(self) -> bool:
        return (
            self.homogeneous
            and self.degree_matches
            and self.inside_universe
            and not self.incomparable_failures
            and not self.relation_failures
            and not self.chain_failures
        )


def annihilator_check(M: Matroid, vol: VolPolynomial) -> AnnihilatorReport:
    """(a) d_F d_G vol = 0 for incomparable flats: equivalent to every
    monomial's support being a chain, since differentiation cannot cancel
    across distinct monomials.  (b) sum over flats of ([i in F] - [j in F])
    d_F vol = 0 for all ground pairs.  (c) every maximal chain monomial has
    degree 1."""
    labels = M.nontrivial_labels()
    as_set = {lab: frozenset(lab) for lab in labels}
    inside = vol.poly.variables() <= set(labels)
    degree_matches = vol.degree == M.rank - 1
    incomparable = {}
    if inside:
        for m in vol.poly.monomials():
            support = m.variables()
            for u, v in combinations(support, 2):
                su, sv = as_set[u], as_set[v]
                if not (su <= sv or sv <= su):
                    incomparable.setdefault((u, v), m)
    partials = {lab: vol.poly.derivative(lab) for lab in labels} if inside else {}
    relation_failures = []
    if inside:
        ground = M.ground_sorted()
        for i, j in combinations(ground, 2):
            acc = RationalPoly.sum(
                partials[lab] * c
                for lab in labels
                if (c := int(i in as_set[lab]) - int(j in as_set[lab]))
            )
            if not acc.is_zero:
                relation_failures.append((i, j))
    chain_failures = []
    if inside and degree_matches:
        for chain in M.maximal_chains():
            value = degree_of(vol, Monomial.from_vars(chain))
            if value != 1:
                chain_failures.append((chain, value))
    return AnnihilatorReport(
        homogeneous=vol.poly.is_homogeneous(vol.degree),
        degree_matches=degree_matches,
        inside_universe=inside,
        incomparable_failures=tuple(sorted(incomparable.items())),
        relation_failures=tuple(relation_failures),
        chain_failures=tuple(chain_failures),
    )


# -- Minkowski weight decomposition ---------------------------------------------


def _local_weight(
    fan: SimplicialFan, sigma: Cone, v0_label: VarId, v0: Vector, w_sigma: Fraction
) -> tuple[SimplicialFan, MinkowskiWeight] | None:
    """Unique balanced weight on the boundary fan of the simplex over sigma
    and v0, scaled so sigma carries w_sigma; None when v0 is degenerate."""
    d = fan.dim
    rays = {l: fan.vector(l) for l in sigma}
    rays[v0_label] = v0
    maximal = [sigma] + [
        (sigma - {t}) | {v0_label} for t in sorted(sigma, key=var_key)
    ]
    try:
        local = SimplicialFan(d, rays, maximal)
    except ValueError:
        return None
    cones = list(local.maximal_cones)
    rows = []
    for tau, cofaces in local.codim1_adjacency():
        project = quotient_map(local.vectors(tau), d)
        images = {s: project(local.vector(opp)) for s, opp in cofaces}
        for k in range(d - len(tau)):
            rows.append(
                [images[s][k] if s in images else Fraction(0) for s in cones]
            )
    kernel = nullspace(rows, len(cones))
    if len(kernel) != 1 or any(not x for x in kernel[0]):
        return None
    k = kernel[0]
    at_sigma = k[cones.index(sigma)]
    values = {c: w_sigma * x / at_sigma for c, x in zip(cones, k)}
    weight = MinkowskiWeight(local, values)
    if not check_balancing(local, weight).ok:
        raise AssertionError("local decomposition weight is not balanced")
    return local, weight


def decompose_weight(
    fan: SimplicialFan,
    weight: MinkowskiWeight,
    v0: Sequence | None = None,
    *,
    seed: int = 0,
) -> list[tuple[SimplicialFan, MinkowskiWeight]]:
    """Split a balanced weight into the unique balanced weights on the
    boundary fans of the simplices over each maximal cone and a generic
    apex v0.  Asserts the two sum identities: the piece at sigma returns
    w_sigma, and the pieces at every new cone tau + v0 cancel."""
    if fan.ambient_dim != fan.dim:
        raise ValueError("decomposition needs a fan of full dimension in Q^d")
    report = check_balancing(fan, weight)
    if not report.ok:
        raise ValueError(
            f"weight is not balanced at {len(report.violations)} codim-1 cone(s)"
        )
    d = fan.dim
    if d == 0:
        return [(fan, weight)]
    v0_label = fresh_label(fan.ray_labels())

    def attempt_all(v: Vector):
        out = []
        for sigma in fan.maximal_cones:
            got = _local_weight(fan, sigma, v0_label, v, weight[sigma])
            if got is None:
                return None
            out.append(got)
        return out

    if v0 is not None:
        pieces = attempt_all(frac_vector(v0))
        if pieces is None:
            raise GenericityError("supplied v0 is degenerate for decomposition")
    else:
        budget = retry_budget()
        pieces = None
        for attempt in range(budget):
            rng = random.Random(f"decomp:{seed}:{attempt}")
            bound = INITIAL_BOUND << attempt
            candidate = frac_vector([rng.randint(-bound, bound) for _ in range(d)])
            pieces = attempt_all(candidate)
            if pieces is not None:
                break
        if pieces is None:
            raise GenericityError(f"no generic apex within {budget} attempts")

    by_sigma = dict(zip(fan.maximal_cones, pieces))
    for sigma, (local, u) in by_sigma.items():
        if u[sigma] != weight[sigma]:
            raise AssertionError("decomposition piece misses its own cone weight")
    for tau in fan.cones(d - 1):
        new_cone = tau | {v0_label}
        total = Fraction(0)
        for sigma in fan.maximal_cones:
            if tau < sigma:
                local, u = by_sigma[sigma]
                if new_cone in set(local.maximal_cones):
                    total += u[new_cone]
        if total:
            raise AssertionError(
                f"decomposition pieces do not cancel at {sorted(tau, key=var_key)}"
            )
    return pieces


# -- Chow rank checks ------------------------------------------------------------


@dataclass(frozen=True)
class ChowRankReport:
    p: int
    cone_count: int
    relation_rank: int
    chow_dim: int
    pairing_rank: int
    top_dim_ok: bool | None
    ok: bool


def chow_rank_checks(fan: SimplicialFan, vol: VolPolynomial, p: int) -> ChowRankReport:
    """dim CH^p as #(p-cones) minus the rank of the linear relations
    l d_tau = sum l(v) d_sigma from (p-1)-cones, compared against the rank
    of the Poincare pairing CH^p x CH^(d-p) -> Q computed from the volume
    polynomial; at p = d also checks dim CH^d = 1."""
    d = fan.dim
    if not 0 <= p <= d:
        raise ValueError(f"p must be between 0 and {d}")
    p_cones = list(fan.cones(p))
    index = {c: k for k, c in enumerate(p_cones)}
    rows = []
    if p >= 1:
        for tau, cofaces in fan.coface_adjacency(p):
            functionals = nullspace(fan.vectors(tau), fan.ambient_dim)
            for l in functionals:
                row = [Fraction(0)] * len(p_cones)
                for sigma, opp in cofaces:
                    row[index[sigma]] = sum(
                        (a * x for a, x in zip(l, fan.vector(opp))), Fraction(0)
                    )
                rows.append(row)
    relation_rank = bareiss_rank(rows)
    chow_dim = len(p_cones) - relation_rank
    q_cones = list(fan.cones(d - p))
    pairing = [
        [
            degree_of(vol, Monomial.from_vars(alpha) * Monomial.from_vars(beta))
            for beta in q_cones
        ]
        for alpha in p_cones
    ]
    pairing_rank = bareiss_rank(pairing)
    top_dim_ok = (chow_dim == 1) if p == d else None
    ok = pairing_rank == chow_dim and top_dim_ok is not False
    return ChowRankReport(
        p=p,
        cone_count=len(p_cones),
        relation_rank=relation_rank,
        chow_dim=chow_dim,
        pairing_rank=pairing_rank,
        top_dim_ok=top_dim_ok,
        ok=ok,
    )


# -- cross validation -------------------------------------------------------------


@dataclass(frozen=True)
class CrossValidationReport:
    ok: bool
    messages: tuple[str, ...]
    volume: VolPolynomial | None


def cross_validate(
    M: Matroid, seeds: Sequence[int] = (0, 1), *, jobs: int = 1
) -> CrossValidationReport:
    """Brion volumes over all seeds must equal the deletion volume exactly;
    the shared polynomial must pass the annihilator checks and the Bergman
    fan must be balanced with the constant weight."""
    from .poly import diff_terms

    messages: list[str] = []
    reference = deletion_volume(M)
    for s in seeds:
        brion = brion_volume(M, seed=s, jobs=jobs)
        if brion.poly != reference.poly:
            lines = diff_terms(brion.poly, reference.poly)
            messages.append(
                f"seed {s}: determinant and deletion volumes differ: "
                + "; ".join(lines[:4])
            )
    report = annihilator_check(M, reference)
    if not report.ok:
        messages.append(
            "annihilator checks failed: "
            f"homogeneous={report.homogeneous} degree={report.degree_matches} "
            f"inside={report.inside_universe} "
            f"incomparable={len(report.incomparable_failures)} "
            f"relations={len(report.relation_failures)} "
            f"chains={len(report.chain_failures)}"
        )
    balancing = check_balancing(bergman_fan(M), constant_weight(bergman_fan(M)))
    if not balancing.ok:
        messages.append(
            f"Bergman fan unbalanced at {len(balancing.violations)} cone(s)"
        )
    return CrossValidationReport(
        ok=not messages,
        messages=tuple(messages),
        volume=reference,
    )
