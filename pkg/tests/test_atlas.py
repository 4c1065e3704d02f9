import pytest

from gerbekit.atlas import (
    AtlasError,
    GroupSheafAtlas,
    atlas_inclusion,
    atlas_violations,
    canonical_cocycle,
    canonical_sheaf,
    constant_atlas,
    g_star,
    locally_isomorphic,
    reversed_copy,
    saturate_atlas,
    sheaf_isomorphisms,
)
from gerbekit.enumerate import enumerate_gerbes
from gerbekit.gpd import GroupoidPresheaf, constant_group_presheaf, discrete_presheaf
from gerbekit.groth import Cocycle
from gerbekit.groups import cyclic, symmetric3
from gerbekit.presheaf import constant_presheaf
from gerbekit.site import slice_site, terminal_site
from gerbekit.two_gpd import is_lwe2, pi_groupoid

from conftest import SITES, sierpinski, three


def group_gerbe(site, G):
    return GroupoidPresheaf.from_group_presheaf(constant_group_presheaf(site, G))


def test_constant_atlases_are_valid(any_site):
    assert atlas_violations(constant_atlas(any_site, cyclic(2))) == []


def test_constant_atlas_names_default_to_the_group():
    assert constant_atlas(terminal_site(), cyclic(3)).name == "const-Z3"


def test_g_star_of_z3_over_a_point():
    F, nu = g_star(group_gerbe(terminal_site(), cyclic(3)))
    S = F.two.sections["*"]
    assert len(S.objects) == 1
    assert nu["*", "*"] == S.objects[0]
    # the two automorphisms of Z3
    assert len(S.one_cells) == 2
    # abelian, so every conjugator gives an endo 2-cell
    assert all(S.two_cells[c][0] == S.two_cells[c][1] for c in S.two_cells)


def test_g_star_of_s3_has_inner_automorphisms_only():
    F, _ = g_star(group_gerbe(terminal_site(), symmetric3()))
    S = F.two.sections["*"]
    assert len(S.objects) == 1 and len(S.one_cells) == 6
    P, _ = pi_groupoid(F.two)
    x = P.sections["*"].objects[0]
    assert len(P.sections["*"].hom(x, x)) == 1


def test_isomorphic_copies_are_connected():
    s = sierpinski()
    F = constant_atlas(s, cyclic(3))
    items = [(U, reversed_copy(F.sheaf(U, sid))) for U in s.objects for sid in F.objects(U)]
    F2 = saturate_atlas(F, items)
    assert atlas_violations(F2) == []
    assert all(len(F2.objects(U)) == 2 * len(F.objects(U)) for U in s.objects)
    P, _ = pi_groupoid(F2.two)
    assert all(len(P.sections[U].components) == 1 for U in s.objects)


def first_sheaf(atlas, U):
    return atlas.sheaf(U, atlas.objects(U)[0])


def test_reversed_copy_gets_its_own_id_and_is_isomorphic():
    P = first_sheaf(constant_atlas(terminal_site(), cyclic(2)), "*")
    sid, C, _ = canonical_sheaf(P)
    sid2, _, _ = canonical_sheaf(reversed_copy(P))
    assert sid != sid2
    assert sheaf_isomorphisms(C, reversed_copy(C))


def test_emptied_isomorphisms_break_fullness():
    F = constant_atlas(sierpinski(), cyclic(2))
    broken = GroupSheafAtlas(F.site, F.sheaves, given_isos={}, name="broken")
    vs = atlas_violations(broken)
    assert vs and all(v[0] == "fullness" for v in vs)
    assert atlas_violations(broken, check_fullness=False) == []


def test_missing_restriction_is_reported():
    s = sierpinski()
    F = constant_atlas(s, cyclic(2))
    cut = GroupSheafAtlas(s, {"a": {}, "ab": dict(F.sheaves["ab"])})
    assert atlas_violations(cut)[0][0] == "restriction-closure"


def test_locally_isomorphic():
    s = three()
    F = constant_atlas(s, cyclic(2))
    sl = slice_site(s, "ab")
    good = first_sheaf(F, "ab")
    assert locally_isomorphic(F, "ab", good)
    bad = first_sheaf(constant_atlas(s, cyclic(3)), "ab")
    v = locally_isomorphic(F, "ab", bad)
    assert not v and v.witness[0] == "ab"
    assert bad.site.objects == sl.objects


def test_inclusion_into_a_saturated_copy_is_lwe():
    s = sierpinski()
    F = constant_atlas(s, cyclic(2))
    F2 = saturate_atlas(F, [(U, reversed_copy(F.sheaf(U, sid))) for U in s.objects for sid in F.objects(U)])
    assert is_lwe2(atlas_inclusion(F, F2))


def test_inclusion_of_a_non_equivalent_atlas_is_not_lwe():
    s = terminal_site()
    F = constant_atlas(s, cyclic(2))
    F2 = saturate_atlas(F, [("*", first_sheaf(constant_atlas(s, cyclic(3)), "*"))])
    assert not is_lwe2(atlas_inclusion(F, F2))
    with pytest.raises(AtlasError):
        atlas_inclusion(F2, F)


@pytest.mark.parametrize("name,bounds", [("terminal", (2, 3)), ("sierp", (2, 2)), ("three", (1, 2))])
def test_canonical_cocycles_of_gerbes_are_valid(name, bounds):
    n = 0
    for G in enumerate_gerbes(SITES[name](), *bounds):
        c = canonical_cocycle(G)
        assert isinstance(c, Cocycle)
        assert c.K.violations() == []
        n += 1
    assert n > 0


def test_canonical_cocycle_needs_a_gerbe():
    G = discrete_presheaf(constant_presheaf(terminal_site(), ["x", "y"]))
    with pytest.raises(AtlasError):
        canonical_cocycle(G)
