import json
from fractions import Fraction
from types import SimpleNamespace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symendo.lattice import IntLattice, TorusTorsionPoint, mat, mat_mul, identity_mat
from symendo.involution import GammaThetaFrame, frame_from_raw
from symendo.rootdata import build_datum, classical_datum
from symendo.spherical import OuterCharacter, build_model, spherical_datum
from symendo.dual import (
    AssociatedCoroots,
    AssociatedRootsError,
    DualityError,
    FoldingError,
    associated_coroots,
    associated_group_and_involution,
    derived_restriction_check,
    dual_group,
    dual_package,
    heart_conditions,
    heart_predicate,
    is_excellent,
    levi_datum,
    pinned_pair,
    s_rep,
)
from zoo import (
    MODELS,
    a1_model,
    antidiag,
    diag,
    fj_model,
    galois_model,
    gl2_model,
    group_gl2_model,
    linear_rank1_model,
    sl2sl2_mid_model,
    sp4_product_model,
    spin_pair_model,
    split_model,
)

SETTINGS = {"max_examples": 100, "deadline": None}


def half(*xs):
    return TorusTorsionPoint.from_values([Fraction(x, 2) for x in xs])


def so_rank1_model(l):
    # SO(2l-1) inside SO(2l): one rootless restricted ray in direction e_1
    d = classical_datum("SO_even", l)
    return build_model(GammaThetaFrame.build(d, diag(*([-1] + [1] * (l - 1)))))


def true_galois_frame():
    # factor exchange as both the involution and the Galois action
    sw = mat([[0, 1], [1, 0]])
    return frame_from_raw(build_datum("A1xA1"), sw, {"s": sw})


class TestPinnedPair:
    def test_rank_two_orthogonal_pair_is_the_base(self):
        sd = spherical_datum(galois_model())
        d = sd.model.datum
        assert d.base == ((-2, 0), (0, 2))
        assert pinned_pair(d, sd.roots[0].gamma_sv) == ((-2, 0), (0, 2))

    @pytest.mark.parametrize("l", [3, 4, 5])
    def test_even_orthogonal_pairs_split_on_last_node(self, l):
        d = classical_datum("SO_even", l)
        g1 = tuple(1 if i == 0 else -1 if i == l - 1 else 0 for i in range(l))
        g2 = tuple(1 if i in (0, l - 1) else 0 for i in range(l))
        gamma_sv = tuple(2 if i == 0 else 0 for i in range(l))
        assert pinned_pair(d, gamma_sv) == (g1, g2)
        assert d.coroot_of(g1) == g1 and d.coroot_of(g2) == g2

    def test_b3_pair_mixes_lengths(self):
        d = classical_datum("SO_odd", 3)
        assert pinned_pair(d, (1, 1, 1)) == ((0, 1, 0), (1, 0, 1))
        assert d.coroot_of((0, 1, 0)) == (0, 2, 0)
        assert d.coroot_of((1, 0, 1)) == (1, 0, 1)

    def test_sum_of_adjacent_simples_is_not_pinned(self):
        d = classical_datum("GL", 3)
        with pytest.raises(AssociatedRootsError):
            pinned_pair(d, (1, 0, -1))


class TestAssociatedCoroots:
    def test_fj_groups_and_flat_order(self):
        assoc = associated_coroots(spherical_datum(fj_model()))
        assert assoc.members == (((0, 0, 1, -1), (1, -1, 0, 0)), ((0, 1, -1, 0),))
        assert assoc.roots_of == assoc.members
        assert assoc.flat == ((0, 0, 1, -1), (1, -1, 0, 0), (0, 1, -1, 0))
        assert assoc.flat_roots == assoc.flat

    def test_galois_pair_members_are_the_simple_coroots(self):
        assoc = associated_coroots(spherical_datum(galois_model()))
        assert assoc.members == (((-1, 0), (0, 1)),)
        assert assoc.roots_of == (((-2, 0), (0, 2)),)

    def test_split_group_rays_are_singletons(self):
        assoc = associated_coroots(spherical_datum(split_model(classical_datum("Sp", 2))))
        assert assoc.members == (((1, -1),), ((0, 1),))
        assert assoc.roots_of == (((1, -1),), ((0, 2),))

    @pytest.mark.parametrize("l", [3, 4, 5])
    def test_even_orthogonal_pair_through_the_model(self, l):
        sd = spherical_datum(so_rank1_model(l))
        assert [r.root_type for r in sd.roots] == ["G"]
        (grp,) = associated_coroots(sd).members
        g1 = tuple(1 if i == 0 else -1 if i == l - 1 else 0 for i in range(l))
        g2 = tuple(1 if i in (0, l - 1) else 0 for i in range(l))
        assert grp == (g1, g2)


class TestDualGroup:
    def test_fj_dual_is_symplectic_rank_two(self):
        sd = spherical_datum(fj_model())
        d = dual_group(sd)
        assert d.base == ((1, -1), (0, 2))
        assert d.simple_coroots == ((1, -1), (0, 1))
        assert d.cartan_of_base() == ((2, -2), (-1, 2))
        assert d.cartan_type().families() == (("C", 2),)

    @pytest.mark.parametrize(
        "factory,families",
        [
            (lambda: split_model(classical_datum("Sp", 2)), (("B", 2),)),
            (lambda: split_model(classical_datum("GL", 3)), (("A", 2),)),
            (sp4_product_model, (("A", 1),)),
            (lambda: spin_pair_model(2), (("C", 2),)),
            (lambda: spin_pair_model(3), (("C", 3),)),
            (sl2sl2_mid_model, (("A", 1), ("A", 1))),
            (galois_model, (("A", 1),)),
            (group_gl2_model, (("A", 1),)),
        ],
    )
    def test_dual_types(self, factory, families):
        assert dual_group(spherical_datum(factory())).cartan_type().families() == families

    def test_split_symplectic_dual_base(self):
        d = dual_group(spherical_datum(split_model(classical_datum("Sp", 2))))
        assert d.base == ((0, -2), (1, 2))
        assert d.simple_coroots == ((1, -1), (0, 1))

    def test_no_rays_give_a_torus_datum(self):
        m = fj_model()
        d = dual_group(SimpleNamespace(model=m, roots=()))
        assert d.base == () and d.dim == m.weight_lattice.rank


class TestAssociatedGroup:
    def test_fj_dual_variety_is_the_symplectic_quotient(self):
        sd = spherical_datum(fj_model())
        ahat, vth, index = associated_group_and_involution(sd)
        assert ahat.base == ((0, 0, 1, -1), (1, -1, 0, 0), (0, 1, -1, 0))
        assert vth == tuple(tuple(-x for x in row) for row in antidiag(4))
        pkg = dual_package(sd)
        assert pkg.dual_satake == "A3:*o*+T1"
        other = frame_from_raw(classical_datum("GL", 4), antidiag(4, -1))
        assert pkg.dual_satake == other.satake()

    def test_galois_dual_variety_is_the_group_case(self):
        pkg = dual_package(spherical_datum(galois_model()))
        assert pkg.vartheta == ((0, -1), (-1, 0))
        assert pkg.associated_datum.base == ((-1, 0), (0, 1))
        assert pkg.dual_satake == "A1:o x A1:o|arcs=1<->2"

    def test_split_dual_involution_is_trivial(self):
        pkg = dual_package(spherical_datum(split_model(classical_datum("Sp", 2))))
        assert pkg.vartheta == identity_mat(2)
        assert pkg.dual_satake == "B2:**"

    def test_spin_rank1_dual_variety_is_compact(self):
        pkg = dual_package(spherical_datum(spin_pair_model(1)))
        assert pkg.associated_datum.base == ((2, 0, 0, 0),)
        assert pkg.vartheta == diag(1, -1, -1, -1)
        assert pkg.dual_satake == "A1:*+T3"

    def test_moved_singleton_is_rejected(self):
        sd = spherical_datum(sp4_product_model())
        bad = AssociatedCoroots((((1, -1),),), (((1, -1),),))
        with pytest.raises(FoldingError):
            associated_group_and_involution(sd, bad)

    def test_unswapped_pair_is_rejected(self):
        sd = spherical_datum(fj_model())
        bad = AssociatedCoroots(
            (((0, 0, 1, -1), (0, 1, -1, 0)),),
            (((0, 0, 1, -1), (0, 1, -1, 0)),),
        )
        with pytest.raises(FoldingError):
            associated_group_and_involution(sd, bad)


class TestLeviAndHeart:
    def test_levi_of_quasi_split_rank_full_is_trivial(self):
        assert levi_datum(fj_model().frame).base == ()

    def test_levi_of_spin_rank1(self):
        levi = levi_datum(spin_pair_model(1).frame)
        assert levi.base == ((0, 1, -1, 0), (0, 0, 1, -1), (0, 0, 0, 1))
        assert levi.coroot_of((0, 0, 0, 1)) == (0, 0, 0, 2)

    def test_fj_heart_needs_reversal_symmetry(self):
        h = heart_conditions(fj_model().frame)
        assert h.fixed_coroots == ()
        assert h.holds(TorusTorsionPoint.zero(4))
        assert h.holds(half(1, 0, 0, 1))
        assert h.holds(half(1, 1, 1, 1))
        assert not h.holds(half(1, 1, 0, 0))

    def test_spin_heart_vanishes_on_fixed_coroots(self):
        h = heart_conditions(spin_pair_model(1).frame)
        assert len(h.fixed_coroots) == 18
        assert h.holds(half(1, 0, 0, 0))
        assert not h.holds(half(0, 1, 0, 0))

    def test_galois_heart_is_the_diagonal_two_torsion(self):
        h = heart_conditions(true_galois_frame())
        assert h.holds(half(0, 0)) and h.holds(half(1, 1))
        assert not h.holds(half(1, 0))
        assert not h.holds(TorusTorsionPoint.from_values([Fraction(1, 4), Fraction(1, 4)]))

    def test_predicate_delegates_to_the_package(self):
        sd = spherical_datum(fj_model())
        pkg = dual_package(sd)
        assert heart_predicate(pkg, half(1, 0, 0, 1))
        assert not heart_predicate(pkg, half(0, 1, 0, 0))


class TestDualPackage:
    def test_report_is_json_round_trippable(self):
        rep = dual_package(spherical_datum(fj_model())).report()
        assert sorted(rep) == [
            "ambient_dim",
            "associated",
            "dual",
            "dual_satake",
            "heart_fixed_coroots",
            "levi_roots",
            "sv_basis",
            "vartheta",
        ]
        assert rep["dual"]["type"] == [["C", 2]]
        assert rep["sv_basis"] == [[1, 0, 0, -1], [0, 1, -1, 0]]
        assert rep["vartheta"][0] == [0, 0, 0, -1]
        assert json.loads(json.dumps(rep, sort_keys=True)) == rep

    @pytest.mark.parametrize("name,factory", MODELS, ids=[n for n, _ in MODELS])
    def test_package_invariants(self, name, factory):
        sd = spherical_datum(factory())
        pkg = dual_package(sd)
        assert len(pkg.dual_datum.base) == len(sd.roots)
        for r, grp in zip(sd.roots, pkg.associated.members):
            assert len(grp) == (2 if r.root_type == "G" else 1)
        assert mat_mul(pkg.vartheta, pkg.vartheta) == identity_mat(sd.model.datum.dim)
        assert pkg.associated_datum.is_automorphism(pkg.vartheta)
        assert pkg.heart.holds(TorusTorsionPoint.zero(sd.model.datum.dim))
        assert pkg.sv_lattice.contains_lattice(sd.model.weight_lattice)


class TestSymplecticRepresentation:
    def test_fj_standard_summand(self):
        sd = spherical_datum(fj_model())
        rep = s_rep(sd, dual_package(sd))
        assert rep.warnings == ()
        (s,) = rep.summands
        assert s.highest_weight == (1, 0)
        assert s.orbit == (1,)
        assert s.multiplicity == 2
        assert s.character == (("e", 1), ("sigma", 1))
        assert s.minuscule and s.symplectic
        assert s.factor_type == ("C", 2)

    def test_fj_cocycle_flips_the_character(self):
        sd = spherical_datum(fj_model(cocycle_data={(0, 1, -1, 0): {"sigma": -1}}))
        (s,) = s_rep(sd, dual_package(sd)).summands
        assert s.character == (("e", 1), ("sigma", -1))
        assert s.multiplicity == 2

    def test_split_chevalley_orbit_is_skipped_with_warning(self):
        sd = spherical_datum(split_model(classical_datum("Sp", 2)))
        rep = s_rep(sd, dual_package(sd))
        assert rep.summands == ()
        assert rep.warnings == (
            "distinguished orbit at ray 1 lies on a Chevalley-type factor; "
            "summand omitted",
        )

    @pytest.mark.parametrize(
        "factory,weight,mult",
        [
            (sp4_product_model, (1,), 1),
            (a1_model, (1,), 2),
            (lambda: spin_pair_model(1), (1,), 1),
        ],
    )
    def test_rank_one_summands(self, factory, weight, mult):
        sd = spherical_datum(factory())
        (s,) = s_rep(sd, dual_package(sd)).summands
        assert s.highest_weight == weight
        assert s.multiplicity == mult
        assert s.minuscule and s.symplectic

    def test_no_distinguished_rays_give_an_empty_representation(self):
        sd = spherical_datum(sl2sl2_mid_model())
        rep = s_rep(sd, dual_package(sd))
        assert rep.summands == () and rep.warnings == ()

    def test_fabricated_orbit_on_a_linear_factor_is_an_invariant_violation(self):
        sd = spherical_datum(split_model(classical_datum("GL", 3)))
        pkg = dual_package(sd)
        fake = OuterCharacter(orbit=(0,), representative=0, values=(("e", 1),))
        with pytest.raises(DualityError):
            s_rep(sd, pkg, outer_data=(fake,))


class TestDerivedAndExcellence:
    @pytest.mark.parametrize("name,factory", MODELS, ids=[n for n, _ in MODELS])
    def test_derived_comparison_passes(self, name, factory):
        assert derived_restriction_check(factory())

    def test_wrong_derived_lattices_fail(self):
        m = fj_model()
        doubled = IntLattice.from_rows(3, [(2, 0, 0), (0, 2, 0), (0, 0, 2)])
        assert not derived_restriction_check(m, doubled)
        thin = IntLattice.from_rows(3, [(1, 0, 0)])
        assert not derived_restriction_check(m, thin)

    def test_excellence_is_weight_lattice_saturation(self):
        expected = {
            "a1_conn": False,
            "a1_double": False,
            "gl2_orth": False,
            "gl2_sorth": False,
            "group_gl2": True,
            "linear_rank1": True,
            "gl3_split": False,
            "sp4_split": False,
            "sp4_product": True,
            "sp6_rank1": True,
            "fj4": True,
            "spin9_r1": True,
            "spin9_r2": False,
            "spin9_r3": False,
            "galois": True,
            "gl4_symplectic": True,
            "sl2sl2_mid": False,
        }
        got = {name: is_excellent(factory()) for name, factory in MODELS}
        assert got == expected

    @pytest.mark.parametrize("name,factory", MODELS, ids=[n for n, _ in MODELS])
    def test_excellent_models_have_no_type_n_rays(self, name, factory):
        m = factory()
        if is_excellent(m):
            sd = spherical_datum(m)
            assert all(not r.root_type.startswith("N") for r in sd.roots)


@st.composite
def orthogonal_sign_involution(draw):
    k = draw(st.integers(min_value=2, max_value=4))
    r = draw(st.integers(min_value=1, max_value=k))
    return k, r


class TestRandomDual:
    @given(orthogonal_sign_involution())
    @settings(**SETTINGS)
    def test_odd_orthogonal_pipeline_invariants(self, spec):
        k, r = spec
        d = classical_datum("SO_odd", k)
        m = build_model(GammaThetaFrame.build(d, diag(*([-1] * r + [1] * (k - r)))))
        sd = spherical_datum(m)
        pkg = dual_package(sd)
        rep = s_rep(sd, pkg)
        assert len(pkg.dual_datum.base) == r
        for s in rep.summands:
            assert s.minuscule and s.symplectic
            assert s.multiplicity >= 1
        assert derived_restriction_check(m)

    @given(st.integers(min_value=3, max_value=6))
    @settings(**SETTINGS)
    def test_linear_reversal_duals_are_symplectic(self, n):
        m = build_model(frame_from_raw(classical_datum("GL", n), antidiag(n)))
        sd = spherical_datum(m)
        pkg = dual_package(sd)
        fams = pkg.dual_datum.cartan_type().families()
        assert fams == ((("A", 1),) if n // 2 == 1 else (("C", n // 2),))
        for r, grp in zip(sd.roots, pkg.associated.members):
            assert len(grp) == (2 if r.root_type == "G" else 1)
        assert derived_restriction_check(m)

    @given(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1), st.integers(0, 1))
    @settings(**SETTINGS)
    def test_fj_heart_is_closed_under_addition(self, a, b, c, d):
        h = heart_conditions(fj_model().frame)
        k1, k2 = half(a, b, b, a), half(c, d, d, c)
        assert h.holds(k1) and h.holds(k2)
        assert h.holds(k1.add(k2))

    @given(orthogonal_sign_involution())
    @settings(**SETTINGS)
    def test_heart_respects_the_weyl_normalized_data(self, spec):
        k, r = spec
        d = classical_datum("SO_odd", k)
        fr = GammaThetaFrame.build(d, diag(*([-1] * r + [1] * (k - r))))
        h = heart_conditions(fr)
        probe = half(*([1] * r + [0] * (k - r)))
        assert h.holds(probe)
        if r < k:
            assert not h.holds(half(*([0] * r + [1] + [0] * (k - r - 1))))
