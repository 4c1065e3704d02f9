import pytest

from gerbekit.atlas import canonical_cocycle, constant_atlas
from gerbekit.enumerate import enumerate_gerbes
from gerbekit.gpd import Groupoid, GFunctor, GroupoidPresheaf, constant_group_presheaf, is_gerbe, is_lwe, pi0_map
from gerbekit.groth import (
    CocycleMorphism,
    GrothError,
    PresheafCocycle,
    check_cor19,
    check_lemma10,
    check_lemma13,
    check_lemma16,
    check_lemma17,
    cylinder,
    gamma,
    grothendieck,
    homotopy_path,
    induced_map,
    law_failures,
    omega,
    point_cocycle,
    projection,
    psi,
    well_definedness_failures,
)
from gerbekit.groups import cyclic, symmetric3
from gerbekit.presheaf import is_bijective
from gerbekit.site import terminal_site
from gerbekit.two_gpd import identity_two_map, is_lwe2

from conftest import SITES, sierpinski, three


def group_gerbe(site, G):
    return GroupoidPresheaf.from_group_presheaf(constant_group_presheaf(site, G))


def codiscrete(site, n):
    S = Groupoid.codiscrete([str(k) for k in range(n)])
    ident = GFunctor({x: x for x in S.objects}, {a: a for a in S.arrows})
    return GroupoidPresheaf(site, {U: S for U in site.objects}, {f: ident for f in site.category.morphisms})


def global_point(atlas):
    return {U: atlas.objects(U)[0] for U in atlas.site.objects}


def test_point_cocycle_gives_the_global_group():
    F = constant_atlas(terminal_site(), symmetric3())
    c = point_cocycle(F, global_point(F))
    assert c.violations() == []
    E = grothendieck(c).sections["*"]
    assert len(E.objects) == 1 and len(E.arrows) == 6
    assert check_lemma10(c)


def test_inverse_formula_holds_in_e():
    for G in enumerate_gerbes(sierpinski(), 2, 2):
        c = canonical_cocycle(G)
        assert law_failures(c) == []
        E = grothendieck(c)
        for U, S in E.sections.items():
            for p in S.arrows:
                assert S.comp[S.inv[p], p] == S.ident[S.src(p)]


def test_psi_on_codiscrete_gerbe():
    G = codiscrete(sierpinski(), 2)
    assert is_gerbe(G)
    m = psi(G)
    assert all(len(set(m.arr[U].values())) == len(G.sections[U].arrows) == 4 for U in m.arr)
    assert check_lemma13(G)


def test_psi_on_group_gerbe_is_bijective():
    G = group_gerbe(three(), symmetric3())
    E = grothendieck(PresheafCocycle(G))
    assert all(len(E.sections[U].arrows) == 6 for U in E.sections)
    assert check_lemma13(G)


def test_gamma_of_point_cocycle_is_an_isomorphism():
    F = constant_atlas(sierpinski(), cyclic(3))
    c = point_cocycle(F, global_point(F))
    m, src, tgt = gamma(c, "ab", "*")
    assert is_bijective(m)
    v = check_lemma17(c, "ab", "*")
    assert v and set(v.witness.values()) == {3}


def test_gamma_on_presheaf_cocycle():
    G = codiscrete(terminal_site(), 2)
    m, src, tgt = gamma(PresheafCocycle(G), "*", G.sections["*"].objects[0])
    assert is_bijective(m)


def test_identity_morphism_induces_identity():
    F = constant_atlas(terminal_site(), cyclic(2))
    c = point_cocycle(F, global_point(F))
    fmap, v = induced_map(CocycleMorphism(c, c, identity_two_map(c.A)))
    assert v
    assert all(k == x for U in fmap.arr for k, x in fmap.arr[U].items())


def test_omega_is_a_local_weak_equivalence():
    for G in enumerate_gerbes(sierpinski(), 2, 2):
        c = canonical_cocycle(G)
        w = omega(c)
        assert w.violations() == []
        assert is_lwe2(w)


def test_homotopy_path_endpoints():
    G = group_gerbe(sierpinski(), cyclic(2))
    c = canonical_cocycle(G)
    path = homotopy_path(c)
    assert [d for _, d in path] == ["+", "-", "+"]
    (m0, _), (m1, _), (m2, _) = path
    assert m0.target is m1.target
    assert m1.source is m2.source
    assert m0.source.A is c.A
    assert m2.target.atlas is m0.source.atlas


def test_cylinder_rejects_mismatched_ends():
    F = constant_atlas(terminal_site(), cyclic(2))
    c = point_cocycle(F, global_point(F))
    d = point_cocycle(constant_atlas(terminal_site(), cyclic(2)), global_point(F))
    with pytest.raises(GrothError):
        cylinder(c, d, {})


def test_projection_is_bijective_on_pi0():
    for G in enumerate_gerbes(three(), 1, 2):
        c = canonical_cocycle(G)
        p = projection(c)
        assert p.violations() == []
        assert is_bijective(pi0_map(p))


@pytest.mark.parametrize("name,bounds", [("terminal", (2, 3)), ("sierp", (2, 2)), ("three", (1, 2))])
def test_checks_hold_on_enumerated_gerbes(name, bounds):
    n = 0
    for G in enumerate_gerbes(SITES[name](), *bounds):
        c = canonical_cocycle(G)
        assert well_definedness_failures(c) == []
        assert check_lemma10(c)
        assert check_lemma13(G)
        assert check_lemma16(c)
        for U, S in c.A.sections.items():
            for i in S.objects:
                assert check_lemma17(c, U, i)
        n += 1
    assert n > 0


@pytest.mark.parametrize("name,bounds", [("terminal", (2, 2)), ("sierp", (1, 2))])
def test_homotopy_path_legs_are_lwe(name, bounds):
    for G in enumerate_gerbes(SITES[name](), *bounds):
        assert check_cor19(canonical_cocycle(G))


def test_map_from_e_to_g_is_lwe():
    G = group_gerbe(sierpinski(), cyclic(3))
    assert is_lwe(psi(G))
