import pytest

from gerbekit import io
from gerbekit.atlas import GroupSheafAtlas, constant_atlas, make_atlas, reversed_copy, saturate_atlas
from gerbekit.classify import (
    Bounds,
    Corpus,
    PreconditionError,
    enumerate_corpus_gerbes,
    f_local,
    render_report,
    verify_theorem20,
    verify_theorem23,
)
from gerbekit.enumerate import BudgetExceeded, enumerate_gerbes_indexed
from gerbekit.gpd import GroupoidPresheaf, constant_group_presheaf
from gerbekit.groups import cyclic
from gerbekit.site import relabel_site, terminal_site

from conftest import sierpinski, three


def dump(G):
    return io.dumps("groupoid_presheaf", G)


def with_z3(F):
    Z = constant_atlas(F.site, cyclic(3))
    return saturate_atlas(F, [(U, Z.sheaf(U, sid)) for U in F.site.objects for sid in Z.objects(U)])


def reversed_atlas(F):
    return saturate_atlas(F, [(U, reversed_copy(F.sheaf(U, sid))) for U in F.site.objects for sid in F.objects(U)])


def test_terminal_z2():
    r = verify_theorem20(Corpus(terminal_site(), constant_atlas(terminal_site(), cyclic(2)), Bounds(2, 2)))
    assert r.bijection
    assert len(r.gerbe_ids) == 2
    assert len(r.gerbe_classes) == len(r.cocycle_classes) == 1


def test_two_groups_give_two_classes():
    s = terminal_site()
    F = constant_atlas(s, cyclic(2))
    F = with_z3(F)
    r = verify_theorem20(Corpus(s, F, Bounds(2, 3)))
    assert r.bijection and len(r.gerbe_classes) == 2


def test_zero_bounds_give_an_empty_bijection():
    s = sierpinski()
    r = verify_theorem20(Corpus(s, constant_atlas(s, cyclic(2)), Bounds(0, 0)))
    assert r.gerbe_ids == [] and r.cocycle_classes == []
    assert r.bijection


def test_invalid_atlas_is_a_precondition_error():
    F = constant_atlas(sierpinski(), cyclic(2))
    broken = GroupSheafAtlas(F.site, F.sheaves, given_isos={})
    with pytest.raises(PreconditionError):
        verify_theorem20(Corpus(F.site, broken, Bounds(1, 2)))


def test_f_local_rejects_other_groups():
    s = terminal_site()
    G = GroupoidPresheaf.from_group_presheaf(constant_group_presheaf(s, cyclic(3)))
    assert not f_local(constant_atlas(s, cyclic(2)), G)
    assert f_local(constant_atlas(s, cyclic(3)), G)


def test_budget_is_enforced():
    s = sierpinski()
    with pytest.raises(BudgetExceeded):
        enumerate_corpus_gerbes(Corpus(s, constant_atlas(s, cyclic(2)), Bounds(2, 2, budget=10)))


def test_resume_index_continues_the_enumeration():
    s = sierpinski()
    full = list(enumerate_gerbes_indexed(s, 2, 3))
    with pytest.raises(BudgetExceeded) as exc:
        list(enumerate_gerbes_indexed(s, 2, 3, budget=40))
    k = exc.value.partial["resume"]
    rest = list(enumerate_gerbes_indexed(s, 2, 3, start=k))
    assert 0 < len(rest) < len(full)
    assert [(i, dump(G)) for i, G in rest] == [(i, dump(G)) for i, G in full if i >= k]


def test_parallel_enumeration_matches_sequential():
    s = sierpinski()
    corpus = Corpus(s, constant_atlas(s, cyclic(3)), Bounds(2, 3))
    seq = enumerate_corpus_gerbes(corpus)
    par = enumerate_corpus_gerbes(corpus, jobs=2)
    assert [dump(G) for G in seq] == [dump(G) for G in par]
    assert render_report(verify_theorem20(corpus, seq)) == render_report(verify_theorem20(corpus, par))


def test_report_rendering_is_stable():
    s = three()
    corpus = Corpus(s, constant_atlas(s, cyclic(2)), Bounds(1, 2))
    a = render_report(verify_theorem20(corpus))
    b = render_report(verify_theorem20(Corpus(three(), constant_atlas(three(), cyclic(2)), Bounds(1, 2))))
    assert a == b
    assert a.endswith("verdict: PASS\n")


@pytest.mark.parametrize("seed", [0, 7])
def test_class_counts_survive_relabelling(seed):
    s = relabel_site(sierpinski(), seed)
    r = verify_theorem20(Corpus(s, constant_atlas(s, cyclic(2)), Bounds(2, 2)))
    base = verify_theorem20(Corpus(sierpinski(), constant_atlas(sierpinski(), cyclic(2)), Bounds(2, 2)))
    assert r.bijection
    assert (len(r.gerbe_ids), len(r.gerbe_classes)) == (len(base.gerbe_ids), len(base.gerbe_classes))


def test_enlargement_by_equal_atlas():
    s = sierpinski()
    F = constant_atlas(s, cyclic(2))
    assert verify_theorem23(Corpus(s, F, Bounds(1, 2)), F).ok


def test_enlargement_by_isomorphic_copy():
    s = three()
    F = constant_atlas(s, cyclic(2))
    r = verify_theorem23(Corpus(s, F, Bounds(1, 2)), reversed_atlas(F))
    assert r.ok and r.witnesses == []
    assert len(r.small.cocycle_classes) == len(r.large.cocycle_classes)


def test_enlargement_needs_local_isomorphism():
    s = terminal_site()
    F = constant_atlas(s, cyclic(2))
    big = with_z3(F)
    with pytest.raises(PreconditionError):
        verify_theorem23(Corpus(s, F, Bounds(2, 2)), big)


def test_enlargement_needs_inclusion():
    s = terminal_site()
    F = constant_atlas(s, cyclic(2))
    other = make_atlas(s, [("*", reversed_copy(F.sheaf("*", F.objects("*")[0])))])
    with pytest.raises(PreconditionError):
        verify_theorem23(Corpus(s, F, Bounds(2, 2)), other)
