from fractions import Fraction

import pytest

from algindex import algebroid as alg
from algindex.scalars import Chart

import oracles


# -- validation ----------------------------------------------------------------


def test_tangent_algebroid_is_valid(t2):
    assert t2.validate().ok


def test_su2_is_valid(su2):
    assert su2.validate().ok


def test_su2_betti_matches_raw_oracle(su2):
    # independent confirmation that these structure constants are the ones
    # whose cohomology the raw-matrix oracle computes as (1,0,0,1)
    structure = {
        (a, b): {c: int(v.constant_value()) for c, v in enumerate(coeffs) if not v.is_zero()}
        for (a, b), coeffs in su2.structure.items()
    }
    assert oracles.ce_betti_numbers(structure, 3) == [1, 0, 0, 1]


def test_cyclic_rescaling_still_satisfies_jacobi():
    # scaling one cyclic constant of the epsilon structure keeps Jacobi:
    # every double bracket [[e_a,e_b],e_c] is proportional to [e_c,e_c] = 0
    # (this is the Bianchi-IX family; direct Jacobiator expansion confirms)
    chart = Chart((), "poly")
    scaled = alg.AlgebroidPresentation(
        chart,
        3,
        [[], [], []],
        {(0, 1): [0, 0, 2], (1, 2): [1, 0, 0], (0, 2): [0, -1, 0]},
        "su2-rescaled",
    )
    assert scaled.validate().ok


def test_genuine_jacobi_violation_is_reported():
    chart = Chart((), "poly")
    broken = alg.AlgebroidPresentation(
        chart,
        3,
        [[], [], []],
        # [e2, e3] = e1 + e3 breaks the cyclic structure
        {(0, 1): [0, 0, 1], (1, 2): [1, 0, 1], (0, 2): [0, -1, 0]},
        "su2-broken",
    )
    report = broken.validate()
    assert not report.ok
    assert any(
        v.kind == "jacobi" and v.indices == (1, 2, 3) for v in report.violations
    )


def test_anchor_morphism_violation_is_reported():
    chart = Chart(("x",), "poly")
    x = chart.coord(0)
    # [e1, e2] = 0 but the anchors do not commute
    bad = alg.AlgebroidPresentation(
        chart, 2, [[1], [x]], {}, "bad-anchor"
    )
    report = bad.validate()
    assert not report.ok
    assert any(v.kind == "anchor-morphism" for v in report.violations)


def test_antisymmetry_is_structural(su2):
    assert su2.bracket(1, 0) == [-c for c in su2.bracket(0, 1)]
    with pytest.raises(alg.PresentationError):
        alg.AlgebroidPresentation(
            Chart((), "poly"), 2, [[], []], {(0, 0): [1, 0]}, "diag"
        )


# -- constructions ---------------------------------------------------------------


def test_tangent_construction_shape(t2):
    assert t2.rank == 2 and t2.base_dim == 2
    assert t2.anchor[0][0] == 1 and t2.anchor[0][1] == 0
    assert not t2.structure


def test_lie_algebra_over_a_point(aff1):
    assert aff1.base_dim == 0 and aff1.rank == 2
    assert aff1.bracket(0, 1)[1] == 1


def test_action_algebroid_so2():
    chart = Chart(("x", "y"))
    x, y = chart.coord(0), chart.coord(1)
    A = alg.action_algebroid({}, [[-y, x]], chart, "so2")
    assert A.validate().ok
    assert A.rank == 1 and A.base_dim == 2


def test_action_algebroid_so3(so3_action):
    assert so3_action.validate().ok
    assert so3_action.rank == 3 and so3_action.base_dim == 3


def test_abelian_bundle():
    A = alg.abelian_bundle(2, 3)
    assert A.validate().ok
    assert A.rank == 3 and not A.structure


def test_invalid_structure_constants_propagate():
    with pytest.raises(alg.PresentationError):
        alg.lie_algebra({(0, 1): [0, 1, 1], (1, 2): [1, 0, 0], (0, 2): [0, -1, 0]}, 3)


# -- products ---------------------------------------------------------------------


def test_product_tangent_tangent_is_tangent2():
    prod = alg.product(alg.tangent(1), alg.tangent(1))
    assert prod.validate().ok
    assert prod.rank == 2 and prod.base_dim == 2
    assert not prod.structure
    for a in range(2):
        for i in range(2):
            expected = 1 if a == i else 0
            assert prod.anchor[a][i] == expected


def test_product_su2_tangent(su2):
    prod = alg.product(su2, alg.tangent(1))
    assert prod.validate().ok
    assert prod.rank == 4 and prod.base_dim == 1


def test_product_abelian_abelian():
    prod = alg.product(alg.abelian_bundle(1, 1), alg.abelian_bundle(1, 2))
    assert prod.validate().ok
    assert not prod.structure


def test_product_mixed_brackets_vanish(su2, aff1):
    prod = alg.product(su2, aff1)
    for a in range(su2.rank):
        for b in range(su2.rank, prod.rank):
            assert all(c.is_zero() for c in prod.bracket(a, b))


def test_product_symmetry_up_to_relabeling(su2, aff1):
    left = alg.product(su2, aff1)
    right = alg.product(aff1, su2)
    r1 = su2.rank
    for a in range(su2.rank):
        for b in range(su2.rank):
            mirrored = right.bracket(a + aff1.rank, b + aff1.rank)
            for c in range(su2.rank):
                assert left.bracket(a, b)[c] == mirrored[c + aff1.rank]


# -- pull-backs -------------------------------------------------------------------


def test_pullback_tangent_is_bigger_tangent():
    pb = alg.pullback(alg.tangent(1), 1)
    assert pb.validate().ok
    assert pb.rank == 2 and pb.base_dim == 2
    assert not pb.structure


def test_pullback_su2_dual(pullback_su2, su2):
    assert pullback_su2.validate().ok
    assert pullback_su2.rank == 2 * su2.rank
    assert pullback_su2.base_dim == su2.rank
    data = pullback_su2.pullback_data
    assert data.parent is su2 and data.fiber_dim == su2.rank


def test_pullback_abelian():
    pb = alg.pullback(alg.abelian_bundle(1, 1), 1)
    assert pb.validate().ok
    assert pb.rank == 2 and not pb.structure


def test_pullback_structure_is_horizontal(pullback_su2, su2):
    data = pullback_su2.pullback_data
    for (a, b) in pullback_su2.structure:
        assert a in data.horizontal and b in data.horizontal
    for a in data.horizontal:
        for j in data.vertical:
            assert all(c.is_zero() for c in pullback_su2.bracket(a, j))


# -- morphisms --------------------------------------------------------------------


def test_identity_morphism_validates(t2):
    assert alg.identity_morphism(t2).validate().ok


def test_anchor_morphism_validates_for_valid_presentations(t2, so3_action):
    assert alg.anchor_morphism(t2).validate().ok
    assert alg.anchor_morphism(so3_action).validate().ok


def test_zero_bundle_map_with_moving_base_fails():
    t1 = alg.tangent(1)
    x = t1.chart.coord(0)
    bad = alg.AlgebroidMorphism(t1, t1, [x * x], [[t1.chart.zero()]], "zero-map")
    report = bad.validate()
    assert not report.ok
    assert any(v.kind == "anchor-compatibility" for v in report.violations)


def test_zero_section_inclusion_is_morphism(pullback_su2):
    assert alg.zero_section_morphism(pullback_su2).validate().ok


def test_fiber_inclusion_is_morphism(pullback_su2):
    morphism = alg.fiber_inclusion_morphism(pullback_su2, [])
    assert morphism.validate().ok


def test_fiber_inclusion_at_point_of_chart_base():
    pb = alg.pullback(alg.tangent(2), 2)
    morphism = alg.fiber_inclusion_morphism(pb, [Fraction(1, 3), Fraction(-2)])
    assert morphism.validate().ok


def test_constructions_validate_closure(su2, aff1, so3_action):
    # every constructed or combined presentation passes validate
    presentations = [
        alg.tangent(3),
        alg.abelian_bundle(2, 2),
        su2,
        aff1,
        so3_action,
        alg.product(su2, alg.tangent(1)),
        alg.product(aff1, aff1),
        alg.pullback(aff1, 2),
        alg.pullback(so3_action, 3),
    ]
    for A in presentations:
        assert A.validate().ok, A.name
