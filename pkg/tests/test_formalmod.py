"""Formal o-modules: multiplication, heights, torsion, level structures."""

from fractions import Fraction
import random

import pytest

from omod.errors import CapExceeded, StructureViolation
from omod.formalmod import (LevelStructure, TorsionModule,
                            bijective_level_structure, connected_height,
                            count_level_structures, kernel_rank,
                            lubin_tate_module, module_from_unit_coefficients,
                            multiply_by, omodule_structure_check, torsion_points,
                            verify_level_structure, zero_level_structure)
from omod.quotring import OModRing
from omod.series import base_field
from omod.tower import FieldTower, unramified_extension


def cm_module(q_p, q_f, n, precision=64):
    """Height-n model t*T + T^(q^n) over the degree-n unramified enlargement."""
    F = base_field(q_p, q_f, precision=precision)
    Fp = unramified_extension(F, n)
    return lubin_tate_module(Fp, n)


def test_multiply_by_identity_and_t():
    F = base_field(2, 1)
    X = lubin_tate_module(F, 1)  # tT + T^2
    R1 = OModRing(F.residue, 1)
    one = multiply_by(R1.one(), X)
    assert one.qdegree == 0
    x = F.from_int_poly({0: 1, 1: 1})
    assert one(x).agrees(x)
    t_mult = multiply_by(OModRing(F.residue, 2).t(), X)
    assert t_mult(x).agrees(X.t_action(x))


def test_multiply_by_t_squared_composition():
    # q=2, n=1: [t^2](T) = t^2 T + (t + t^2) T^2 + T^4
    F = base_field(2, 1)
    X = lubin_tate_module(F, 1)
    R3 = OModRing(F.residue, 3)
    t2 = R3.element([F.residue.zero(), F.residue.zero(), F.residue.one()])
    P = multiply_by(t2, X)
    dense = {1: P.coeffs[0], 2: P.coeffs[1], 4: P.coeffs[2]}
    assert P.coeffs[0].agrees(F.from_int_poly({2: 1}))          # t^2
    assert P.coeffs[1].agrees(F.from_int_poly({1: 1, 2: 1}))    # t + t^2
    assert P.coeffs[2].agrees(F.one())
    # additivity on 20 random pairs
    rng = random.Random(7)
    for _ in range(20):
        x = F.from_int_poly({k: rng.randrange(2) for k in range(1, 9)}, precision=32)
        y = F.from_int_poly({k: rng.randrange(2) for k in range(1, 9)}, precision=32)
        assert P(x + y).agrees(P(x) + P(y))


def test_ring_action_law_exhaustive_small():
    # [a][b] = [ab] (product computed without truncation) and [a]+[b] = [a+b]
    # for all a, b in o/t^2, q = 2, on general field elements
    F = base_field(2, 1)
    X = lubin_tate_module(F, 1)
    R = OModRing(F.residue, 2)
    R4 = OModRing(F.residue, 4)
    samples = [F.from_int_poly({1: 1, 3: 1}, precision=24),
               F.from_int_poly({2: 1}, precision=24)]
    for a in R.elements():
        for b in R.elements():
            Pa, Pb = multiply_by(a, X), multiply_by(b, X)
            Pab = multiply_by(a.lift_to(R4) * b.lift_to(R4), X)
            Psum = multiply_by(a + b, X)
            for x in samples:
                assert Pa(Pb(x)).agrees(Pab(x))
                assert (Pa(x) + Pb(x)).agrees(Psum(x))


def test_ring_action_truncated_law_on_torsion():
    # with the product truncated mod t^m, the law holds on t^m-torsion points
    X = cm_module(2, 1, 2)
    Tm = torsion_points(X, 2)
    R = Tm.ring
    pts = [Tm.points[k] for k in sorted(Tm.points)][:4]
    for a in R.elements():
        for b in R.elements():
            for pt in pts:
                left = Tm.act(a, Tm.act(b, pt))
                right = Tm.act(a * b, pt)
                assert left.agrees(right) or \
                    (left - right).order_lower_bound() >= 40


def test_connected_heights():
    # CM point: closed fibre fully connected (h = n); u1-unit: h = 1;
    # generic fibre: etale (h = 0)
    X_cm = cm_module(2, 1, 2)
    assert connected_height(X_cm, fibre="closed") == 2
    assert connected_height(X_cm, fibre="generic") == 0
    F = base_field(2, 1)
    X_mixed = module_from_unit_coefficients(F, [1], 2)  # tT + T^2 + T^4
    assert connected_height(X_mixed, fibre="closed") == 1
    assert connected_height(X_mixed, fibre="generic") == 0
    X_h1 = lubin_tate_module(base_field(3, 1), 1)
    assert connected_height(X_h1, fibre="closed") == 1


def test_torsion_level_zero():
    X = cm_module(2, 1, 2)
    T0 = torsion_points(X, 0)
    assert len(T0.points) == 1
    assert list(T0.points.values())[0].is_exact_zero()


def test_cm_torsion_q2_n2_m1():
    # 4 points: {0} + three roots of T^3 = t, each of valuation 1/3
    X = cm_module(2, 1, 2)
    Tm = torsion_points(X, 1)
    assert len(Tm.points) == 4
    vals = sorted(pt.valuation() for pt in Tm.points.values()
                  if pt.is_known_nonzero())
    assert vals == [Fraction(1, 3)] * 3
    report = omodule_structure_check(Tm)
    assert report["cardinality"] == 4 and report["rank"] == 2
    # verify each point is killed by [t]
    P = X.embedded_t_action(Tm.field)
    for pt in Tm.points.values():
        assert P(pt).order_lower_bound() >= 40 or P(pt).is_zero_mod_precision()


def test_cm_torsion_q2_n2_m2_counts_and_valuations():
    X = cm_module(2, 1, 2)
    Tm = torsion_points(X, 2)
    assert len(Tm.points) == 16
    prim = [pt for pt in Tm.points.values()
            if pt.is_known_nonzero() and pt.valuation() == Fraction(1, 12)]
    assert len(prim) == 12
    lower = [pt for pt in Tm.points.values()
             if pt.is_known_nonzero() and pt.valuation() == Fraction(1, 3)]
    assert len(lower) == 3


def test_mixed_torsion_u1_unit():
    # tT + T^2 + T^4 at level 1: {0, a valuation-1 point, two valuation-0
    # points}, the latter pair living in a wild quadratic extension
    F = base_field(2, 1, precision=64)
    X = module_from_unit_coefficients(F, [1], 2)
    tower = FieldTower(F)
    Tm = torsion_points(X, 1, tower)
    assert len(Tm.points) == 4
    vals = sorted(pt.valuation() for pt in Tm.points.values() if pt.is_known_nonzero())
    assert vals == [Fraction(0), Fraction(0), Fraction(1)]
    assert Tm.field.absolute_ramification == 2
    omodule_structure_check(Tm)


def test_structure_check_negative_control():
    X = cm_module(2, 1, 2)
    Tm = torsion_points(X, 1)
    corrupted = dict(Tm.points)
    keys = sorted(corrupted)
    # shift one nonzero point by the embedded uniformizer: no longer torsion,
    # so additivity against the coordinates must break
    from omod.tower import root_uniformizer_image

    k_bad = next(k for k in keys if corrupted[k].is_known_nonzero())
    corrupted[k_bad] = corrupted[k_bad] + root_uniformizer_image(Tm.field)
    bad = TorsionModule(X, 1, Tm.ring, Tm.field, Tm.basis, corrupted, Tm.coords,
                        generator=Tm.generator, tower=Tm.tower)
    with pytest.raises(StructureViolation):
        omodule_structure_check(bad)


def test_level_structure_product_equals_t_action():
    # bijective phi on CM q=2, n=2, m=1: prod (T - phi(a)) = T^4 + tT exactly
    X = cm_module(2, 1, 2)
    Tm = torsion_points(X, 1)
    phi = bijective_level_structure(Tm)
    report = verify_level_structure(phi)
    assert report["divisible"] and report["equal"]


def test_level_structure_product_at_level2():
    # the level-1 restriction of a bijective level-2 structure also multiplies
    # out to the [t]-polynomial exactly
    X = cm_module(2, 1, 2)
    Tm = torsion_points(X, 2)
    phi = bijective_level_structure(Tm)
    report = verify_level_structure(phi)
    assert report["divisible"] and report["equal"]


def test_level_structure_zero_map_closed_fibre():
    X = cm_module(2, 1, 2)
    Tm = torsion_points(X, 1)
    phi0 = zero_level_structure(Tm)
    report = verify_level_structure(phi0, fibre="closed")
    assert report["divisible"] and report["equal"]
    # on the generic fibre the zero map fails
    report_gen = verify_level_structure(phi0)
    assert not report_gen["divisible"]


def test_level_structure_non_injective_fails():
    X = cm_module(2, 1, 2)
    Tm = torsion_points(X, 1)
    ring = Tm.ring
    # send both basis vectors to the same point
    matrix = [[ring.one(), ring.one()], [ring.zero(), ring.zero()]]
    phi = LevelStructure(Tm, matrix)
    report = verify_level_structure(phi)
    assert not report["divisible"]


def test_count_level_structures_gl2_f2():
    X = cm_module(2, 1, 2)
    Tm = torsion_points(X, 1)
    assert count_level_structures(Tm) == 6  # |GL_2(F_2)|


def test_count_level_structures_height1_m2():
    # n=1, q=3, m=2: |GL_1(o/t^2)| = |(o/t^2)^x| = 6
    F = base_field(3, 1)
    X = lubin_tate_module(F, 1)
    Tm = torsion_points(X, 2)
    assert count_level_structures(Tm) == 6


def test_kernel_rank_three_specializations():
    # etale judgment: kernel 0; u1-unit closed: rank 1; CM closed: rank 2 = n
    X = cm_module(2, 1, 2)
    Tm = torsion_points(X, 1)
    phi = bijective_level_structure(Tm)
    assert kernel_rank(phi, reduction="generic") == 0
    assert kernel_rank(phi, reduction="closed") == 2
    F = base_field(2, 1)
    X_mixed = module_from_unit_coefficients(F, [1], 2)
    Tm_mixed = torsion_points(X_mixed, 1, FieldTower(F))
    phi_mixed = bijective_level_structure(Tm_mixed)
    assert kernel_rank(phi_mixed, reduction="closed") == 1
    assert kernel_rank(phi_mixed, reduction="generic") == 0


def test_kernel_height_correspondence():
    # the assertable identity: kernel rank equals connected height
    F = base_field(2, 1)
    cases = []
    X_cm = cm_module(2, 1, 2)
    cases.append((X_cm, torsion_points(X_cm, 1), "closed"))
    X_mx = module_from_unit_coefficients(F, [1], 2)
    cases.append((X_mx, torsion_points(X_mx, 1, FieldTower(F)), "closed"))
    cases.append((X_cm, torsion_points(X_cm, 1), "generic"))
    for X, Tm, fibre in cases:
        phi = bijective_level_structure(Tm)
        assert kernel_rank(phi, reduction=fibre) == connected_height(X, fibre=fibre)


def test_degree_cap_enforced():
    F = base_field(2, 1)
    with pytest.raises(CapExceeded):
        lubin_tate_module(unramified_extension(F, 13), 13)


def test_torsion_export_shapes():
    X = cm_module(2, 1, 2)
    Tm = torsion_points(X, 1)
    doc = Tm.to_json()
    assert doc["cardinality"] == 4
    assert len(doc["points"]) == 4
    rows = Tm.to_csv_rows()
    assert len(rows) == 5  # header + 4 points
