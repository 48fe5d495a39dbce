"""Volume polynomials: determinant formula, deletion recursion, evaluation
on fans, subdivision operators, and the verification calculus."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import mixedvol.volume as volume_mod
from mixedvol import (
    AnnihilatorReport,
    BCoefficients,
    GenericityError,
    GenericVectors,
    Matroid,
    MinkowskiWeight,
    Monomial,
    RationalPoly,
    SimplicialFan,
    VolPolynomial,
    annihilator_check,
    b_coefficients,
    bergman_fan,
    brion_volume,
    chain_matrices,
    check_balancing,
    chow_rank_checks,
    constant_weight,
    cross_validate,
    decompose_weight,
    degree_of,
    deletion_volume,
    evaluation_volume_fan,
    generic_projection,
    generic_vectors,
    lift_coloop,
    lift_non_coloop,
    projection_from_generic_vectors,
    retry_budget,
    subdivision_operator,
    subdivision_operator_general,
    subdivision_pullback,
    uniform_matroid,
)
from mixedvol.matroid import flat_label, random_matroid
from mixedvol.volume import RETRY_ENV


def x(*lab) -> RationalPoly:
    return RationalPoly.variable(tuple(lab))


def vp(poly: RationalPoly, degree: int, labels) -> VolPolynomial:
    return VolPolynomial(poly, degree, frozenset(labels))


EXPLICIT_GV = GenericVectors.from_mapping(
    {1: (-1,), 2: (-2,), 3: (-3,), 4: (6,)}
)
BAD_GV = GenericVectors.from_mapping({1: (-1,), 2: (1,), 3: (-1,), 4: (1,)})

LINE_FAN = SimplicialFan(1, {(1,): (1,), (2,): (-1,)}, [[(1,)], [(2,)]])

random_matroids = st.integers(min_value=0, max_value=300).map(
    lambda s: random_matroid(random.Random(s), max_elements=4)
)


# -- retry budget ----------------------------------------------------------


def test_retry_budget_default(monkeypatch):
    monkeypatch.delenv(RETRY_ENV, raising=False)
    assert retry_budget() == 32


def test_retry_budget_env(monkeypatch):
    monkeypatch.setenv(RETRY_ENV, "7")
    assert retry_budget() == 7


@pytest.mark.parametrize("raw", ["abc", "0", "-3", "1.5", ""])
def test_retry_budget_invalid(monkeypatch, raw):
    monkeypatch.setenv(RETRY_ENV, raw)
    with pytest.raises(ValueError):
        retry_budget()


def test_budget_exhaustion_counts_attempts(monkeypatch, ex_matroid):
    calls = []

    def always_fails(M, gv, jobs=1):
        calls.append(gv.bound)
        raise GenericityError("forced")

    monkeypatch.setenv(RETRY_ENV, "5")
    monkeypatch.setattr(volume_mod, "chain_matrices", always_fails)
    with pytest.raises(GenericityError, match="within 5 attempts"):
        generic_vectors(ex_matroid, seed=0)
    assert calls == [8, 16, 32, 64, 128]


# -- generic vectors and chain matrices --------------------------------------


def test_generic_vectors_validation():
    with pytest.raises(ValueError, match="sum to zero"):
        GenericVectors.from_mapping({1: (1,), 2: (2,)})
    with pytest.raises(ValueError, match="one dimension"):
        GenericVectors.from_mapping({1: (1,), 2: (1, -1)})


def test_generic_vectors_lookup():
    assert EXPLICIT_GV.vector(2) == (Fraction(-2),)
    assert EXPLICIT_GV.flat_vector([1, 4]) == (Fraction(5),)
    assert EXPLICIT_GV.flat_vector([]) == (Fraction(0),)
    with pytest.raises(KeyError):
        EXPLICIT_GV.vector(9)


def test_generic_vectors_certificate(ex_matroid):
    gv = generic_vectors(ex_matroid, seed=0)
    assert gv.seed == 0
    assert gv.certified_chains == 9
    assert gv.bound is not None
    assert sum(v[0] for _, v in gv.vectors) == 0


def test_chain_matrix_golden(ex_matroid):
    cms = {cm.chain: cm for cm in chain_matrices(ex_matroid, EXPLICIT_GV)}
    assert len(cms) == 9
    cm = cms[((4,), (1, 4))]
    assert cm.columns == ((Fraction(6),), (Fraction(5),))
    assert cm.coefficients == (Fraction(5), Fraction(-6))
    assert cm.scale == Fraction(-60)


def test_chain_matrices_reject_degenerate(ex_matroid):
    with pytest.raises(GenericityError, match="zero coefficient"):
        chain_matrices(ex_matroid, BAD_GV)


# -- determinant formula -------------------------------------------------------


def test_brion_golden(ex_matroid, ex_volume):
    vol = brion_volume(ex_matroid)
    assert vol.poly == ex_volume
    assert vol.degree == 2
    assert vol.method == "brion"
    assert vol.universe == frozenset(ex_matroid.nontrivial_labels())


def test_brion_seed_and_jobs_invariant(ex_matroid, ex_volume):
    for seed in (0, 1, 17):
        assert brion_volume(ex_matroid, seed=seed).poly == ex_volume
    assert brion_volume(ex_matroid, jobs=3).poly == ex_volume


def test_brion_explicit_vectors(ex_matroid, ex_volume):
    assert brion_volume(ex_matroid, EXPLICIT_GV).poly == ex_volume
    with pytest.raises(GenericityError):
        brion_volume(ex_matroid, BAD_GV)


def test_brion_rank_one():
    vol = brion_volume(uniform_matroid(1, 3))
    assert vol.poly == RationalPoly.constant(1)
    assert vol.degree == 0
    assert vol.universe == frozenset()


def test_brion_uniform_line():
    # U_{2,3} has three one-step chains, so the volume is x1 + x2 + x3.
    vol = brion_volume(uniform_matroid(2, 3))
    assert vol.poly == x(1) + x(2) + x(3)


# -- deletion recursion ----------------------------------------------------------


def test_deletion_golden(ex_matroid, ex_volume):
    vol = deletion_volume(ex_matroid)
    assert vol.poly == ex_volume
    assert vol.method == "deletion"
    assert vol.universe == frozenset(ex_matroid.nontrivial_labels())


def test_deletion_boolean(ex_matroid, boolean3_volume):
    assert deletion_volume(ex_matroid.delete(3)).poly == boolean3_volume


def test_deletion_rank_one():
    assert deletion_volume(uniform_matroid(1, 4)).poly == RationalPoly.constant(1)


def test_deletion_parallel_elements():
    M = Matroid([1, 2, 3, 4], [[1, 3], [1, 4], [2, 3], [2, 4]])
    assert deletion_volume(M).poly == x(1, 2) + x(3, 4)


def test_b_coefficients_goldens(ex_matroid):
    b3 = b_coefficients(ex_matroid, 3)
    assert b3.j == 1
    assert dict(b3.table) == {
        (1,): 1,
        (2,): 0,
        (4,): 0,
        (1, 2, 3): 0,
        (1, 4): 1,
        (2, 4): 0,
    }
    b4 = b_coefficients(ex_matroid, 4)
    assert b4.j == 1
    assert dict(b4.table) == {(1,): 1, (2,): 0, (3,): 0}
    assert b4.get((9, 9)) == 0
    with pytest.raises(ValueError):
        b_coefficients(ex_matroid, 9)
    with pytest.raises(ValueError):
        b_coefficients(uniform_matroid(1, 1), 1)


def test_lift_non_coloop_golden(ex_matroid, boolean3_volume):
    sub = vp(boolean3_volume, 2, [(1,), (2,), (4,), (1, 2), (1, 4), (2, 4)])
    lifted = lift_non_coloop(
        sub, ex_matroid.closure_map(3), b_coefficients(ex_matroid, 3), 3
    )
    renamed = boolean3_volume.rename(
        {
            (1,): (1,),
            (2,): (2,),
            (4,): (4,),
            (1, 2): (1, 2, 3),
            (1, 4): (1, 4),
            (2, 4): (2, 4),
        }
    )
    assert lifted.poly == renamed + x(3) * (x(1, 2, 3) + x(4))
    assert lifted.degree == 2
    assert (3,) in lifted.universe


def test_operator_reaches_example(ex_matroid, boolean3_volume, ex_volume):
    sub = vp(boolean3_volume, 2, [(1,), (2,), (4,), (1, 2), (1, 4), (2, 4)])
    delta1 = lift_non_coloop(
        sub, ex_matroid.closure_map(3), b_coefficients(ex_matroid, 3), 3
    )
    assert degree_of(
        vp(delta1.poly, 2, delta1.universe),
        Monomial.from_vars(((3,), (4,))),
    ) == 1
    final = subdivision_operator(delta1, (3,), (4,), (3, 4))
    assert final.poly == ex_volume
    # degree-2 case: only the m = 2 term, minus z^2/2 times the mixed partial
    z = x(3, 4) - x(3) - x(4)
    assert final.poly == delta1.poly - z * z * Fraction(1, 2)


def test_lift_coloop_golden(ex_matroid, delta3_volume, ex_volume):
    sub = vp(x(1) + x(2) + x(3), 1, [(1,), (2,), (3,)])
    lifted = lift_coloop(
        sub,
        ex_matroid.closure_map(4),
        b_coefficients(ex_matroid, 4),
        4,
        (1, 2, 3),
    )
    assert lifted.poly == delta3_volume
    assert lifted.degree == 2
    cur = lifted
    for i in (3, 2, 1):
        cur = subdivision_operator(cur, (4,), (i,), (i, 4))
    assert cur.poly == ex_volume
    total = delta3_volume
    for i in (1, 2, 3):
        z = x(i, 4) - x(i) - x(4)
        total = total - z * z * Fraction(1, 2)
    assert cur.poly == total


def test_volume_x4_squared_coefficient(ex_matroid, ex_volume):
    vol = vp(ex_volume, 2, ex_matroid.nontrivial_labels())
    assert ex_volume.coefficient(Monomial({(4,): 2})) == -1
    assert degree_of(vol, Monomial({(4,): 2})) == -2


# -- subdivision operator preconditions ----------------------------------------


def test_operator_validation(ex_matroid, ex_volume):
    vol = vp(ex_volume, 2, ex_matroid.nontrivial_labels())
    with pytest.raises(ValueError, match="two distinct"):
        subdivision_operator_general(vol, ((1,),), (9,))
    with pytest.raises(ValueError, match="two distinct"):
        subdivision_operator_general(vol, ((1,), (1,)), (9,))
    with pytest.raises(ValueError, match="not in the variable universe"):
        subdivision_operator(vol, (9,), (1,), (7,))
    with pytest.raises(ValueError, match="already in the variable universe"):
        subdivision_operator(vol, (1,), (2,), (4,))


# -- evaluation on fans -----------------------------------------------------------


def test_evaluation_line_fan():
    w = constant_weight(LINE_FAN, 2)
    vol = evaluation_volume_fan(LINE_FAN, w, v0=(7,))
    assert vol.poly == (x(1) + x(2)) * 2
    assert vol.method == "evaluation"
    assert evaluation_volume_fan(LINE_FAN, w).poly == vol.poly
    with pytest.raises(GenericityError, match="zero cone coefficient"):
        evaluation_volume_fan(LINE_FAN, w, v0=(0,))
    with pytest.raises(ValueError, match="length"):
        evaluation_volume_fan(LINE_FAN, w, v0=(1, 2))


def test_evaluation_requires_full_dimension(ex_matroid):
    fan = bergman_fan(ex_matroid)
    with pytest.raises(ValueError, match="full dimension"):
        evaluation_volume_fan(fan, constant_weight(fan))


def test_evaluation_requires_balanced():
    w = MinkowskiWeight(LINE_FAN, {frozenset({(1,)}): 1, frozenset({(2,)}): 2})
    with pytest.raises(ValueError, match="not balanced"):
        evaluation_volume_fan(LINE_FAN, w)


def test_evaluation_zero_fan():
    fan = SimplicialFan(0, {}, [[]])
    vol = evaluation_volume_fan(fan, constant_weight(fan, 5))
    assert vol.poly == RationalPoly.constant(5)
    assert vol.degree == 0


def test_evaluation_matches_determinant_termwise(ex_matroid):
    for M in (ex_matroid, uniform_matroid(2, 4), uniform_matroid(3, 5)):
        gv = generic_vectors(M, seed=0)
        fan, v0 = projection_from_generic_vectors(M, gv)
        vol = evaluation_volume_fan(fan, constant_weight(fan), v0)
        assert vol.poly == brion_volume(M, gv).poly


def test_evaluation_on_independent_projection(ex_matroid):
    for M, seed in ((ex_matroid, 3), (uniform_matroid(3, 5), 11)):
        fan = generic_projection(bergman_fan(M), seed=seed)
        assert fan.ambient_dim == fan.dim
        vol = evaluation_volume_fan(fan, constant_weight(fan), seed=seed)
        assert vol.poly == deletion_volume(M).poly


def test_generic_projection_identity_when_full():
    fan = bergman_fan(uniform_matroid(4, 4))
    assert generic_projection(fan) is fan


def test_projection_from_generic_vectors_rank_one():
    fan, v0 = projection_from_generic_vectors(
        uniform_matroid(1, 3), GenericVectors(())
    )
    assert fan.dim == 0
    assert v0 == ()


# -- operator against subdivided-fan evaluation -----------------------------------


def test_operator_matches_subdivided_fan():
    M = uniform_matroid(4, 4)
    fan = bergman_fan(M)
    vol = deletion_volume(M)
    weight = constant_weight(fan)
    for tau in ([(1,), (1, 2)], [(1,), (1, 2), (1, 2, 3)]):
        sub = fan.star_subdivide(tau, (9,))
        pulled = subdivision_pullback(weight, sub, tau, (9,))
        direct = evaluation_volume_fan(sub, pulled, seed=2)
        via_op = subdivision_operator_general(vol, tuple(tau), (9,))
        assert direct.poly == via_op.poly


# -- degree extraction --------------------------------------------------------------


def test_degree_of(ex_matroid, ex_volume):
    vol = vp(ex_volume, 2, ex_matroid.nontrivial_labels())
    m1 = Monomial.from_vars(((4,), (1, 4)))
    m2 = Monomial.from_vars(((1,), (1, 2, 3)))
    assert degree_of(vol, m1) == 1
    assert degree_of(vol, m2) == 1
    combo = RationalPoly({m1: Fraction(2), m2: Fraction(-3)})
    assert degree_of(vol, combo) == -1
    with pytest.raises(ValueError, match="degree"):
        degree_of(vol, Monomial.from_vars(((1,),)))
    with pytest.raises(ValueError, match="homogeneous"):
        degree_of(vol, x(1) + x(2) * x(3))


# -- annihilator checks ---------------------------------------------------------------


def test_annihilator_ok(ex_matroid, ex_volume):
    vol = vp(ex_volume, 2, ex_matroid.nontrivial_labels())
    report = annihilator_check(ex_matroid, vol)
    assert report.ok
    assert report.homogeneous
    assert report.degree_matches
    assert report.inside_universe


def test_annihilator_flags_incomparable(ex_matroid, ex_volume):
    bad = ex_volume + x(1) * x(2, 4)
    report = annihilator_check(ex_matroid, vp(bad, 2, ex_matroid.nontrivial_labels()))
    assert not report.ok
    assert report.incomparable_failures
    pair, _ = report.incomparable_failures[0]
    assert set(pair) == {(1,), (2, 4)}


def test_annihilator_flags_scaling(ex_matroid, ex_volume):
    report = annihilator_check(
        ex_matroid, vp(ex_volume * 2, 2, ex_matroid.nontrivial_labels())
    )
    assert not report.ok
    assert report.chain_failures
    assert not report.incomparable_failures
    assert not report.relation_failures


def test_annihilator_flags_relation(ex_matroid, ex_volume):
    bad = ex_volume + x(1) * x(1)
    report = annihilator_check(ex_matroid, vp(bad, 2, ex_matroid.nontrivial_labels()))
    assert not report.ok
    assert (1, 2) in report.relation_failures
    assert not report.chain_failures


def test_annihilator_flags_universe_and_degree(ex_matroid, ex_volume):
    outside = annihilator_check(
        ex_matroid, vp(ex_volume + x(9), 2, ex_matroid.nontrivial_labels())
    )
    assert not outside.ok
    assert not outside.inside_universe
    wrong_degree = annihilator_check(
        ex_matroid, vp(x(1) * x(2, 4) * x(4), 3, ex_matroid.nontrivial_labels())
    )
    assert not wrong_degree.ok
    assert not wrong_degree.degree_matches


# -- Minkowski weight decomposition ------------------------------------------------


def test_decompose_weight(ex_matroid):
    gv = generic_vectors(ex_matroid, seed=0)
    fan, _ = projection_from_generic_vectors(ex_matroid, gv)
    weight = constant_weight(fan)
    pieces = decompose_weight(fan, weight, seed=0)
    assert len(pieces) == 9
    apex = {l for local, _ in pieces for l in local.ray_labels()} - set(
        fan.ray_labels()
    )
    assert len(apex) == 1
    for sigma, (local, u) in zip(fan.maximal_cones, pieces):
        assert len(local.maximal_cones) == fan.dim + 1
        assert u[sigma] == 1
        assert check_balancing(local, u).ok


def test_decompose_weight_degenerate_apex(ex_matroid):
    gv = generic_vectors(ex_matroid, seed=0)
    fan, _ = projection_from_generic_vectors(ex_matroid, gv)
    ray = sorted(fan.maximal_cones[0])[0]
    with pytest.raises(GenericityError, match="degenerate"):
        decompose_weight(fan, constant_weight(fan), v0=fan.vector(ray))


def test_decompose_weight_validation(ex_matroid):
    fan = bergman_fan(ex_matroid)
    with pytest.raises(ValueError, match="full dimension"):
        decompose_weight(fan, constant_weight(fan))
    unbalanced = MinkowskiWeight(
        LINE_FAN, {frozenset({(1,)}): 1, frozenset({(2,)}): 2}
    )
    with pytest.raises(ValueError, match="not balanced"):
        decompose_weight(LINE_FAN, unbalanced)


def test_decompose_weight_zero_fan():
    fan = SimplicialFan(0, {}, [[]])
    weight = constant_weight(fan, 3)
    assert decompose_weight(fan, weight) == [(fan, weight)]


# -- Chow rank checks -----------------------------------------------------------------


def test_chow_rank_example(ex_matroid, ex_volume):
    fan = bergman_fan(ex_matroid)
    vol = vp(ex_volume, 2, ex_matroid.nontrivial_labels())
    r0 = chow_rank_checks(fan, vol, 0)
    assert (r0.cone_count, r0.chow_dim, r0.pairing_rank, r0.ok) == (1, 1, 1, True)
    r1 = chow_rank_checks(fan, vol, 1)
    assert (r1.cone_count, r1.chow_dim, r1.pairing_rank, r1.ok) == (8, 5, 5, True)
    assert r1.top_dim_ok is None
    r2 = chow_rank_checks(fan, vol, 2)
    assert (r2.cone_count, r2.chow_dim, r2.pairing_rank, r2.ok) == (9, 1, 1, True)
    assert r2.top_dim_ok is True
    with pytest.raises(ValueError):
        chow_rank_checks(fan, vol, 3)
    with pytest.raises(ValueError):
        chow_rank_checks(fan, vol, -1)


# -- cross validation -------------------------------------------------------------------


def test_cross_validate_ok(ex_matroid, ex_volume):
    report = cross_validate(ex_matroid)
    assert report.ok
    assert report.messages == ()
    assert report.volume.poly == ex_volume


def test_cross_validate_reports_divergence(monkeypatch, ex_matroid, ex_volume):
    fake = VolPolynomial(
        ex_volume + x(1) * x(1, 2, 3),
        2,
        frozenset(ex_matroid.nontrivial_labels()),
        method="deletion",
    )
    monkeypatch.setattr(volume_mod, "deletion_volume", lambda M: fake)
    report = cross_validate(ex_matroid)
    assert not report.ok
    assert any("differ" in m for m in report.messages)


def test_vol_polynomial_equality_ignores_provenance(ex_volume):
    a = VolPolynomial(ex_volume, 2, frozenset(), method="brion", seed=0)
    b = VolPolynomial(ex_volume, 2, frozenset(), method="deletion", seed=9)
    assert a == b


# -- property tests -----------------------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(random_matroids)
def test_methods_agree_on_random_matroids(M):
    reference = deletion_volume(M)
    assert brion_volume(M, seed=0).poly == reference.poly
    assert annihilator_check(M, reference).ok


@settings(max_examples=15, deadline=None)
@given(random_matroids, st.integers(min_value=0, max_value=50))
def test_brion_seed_independent_on_random_matroids(M, seed):
    assert brion_volume(M, seed=seed).poly == brion_volume(M, seed=seed + 1).poly
