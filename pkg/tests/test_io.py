import json
from pathlib import Path

import pytest

from gerbekit import io
from gerbekit.atlas import atlas_violations, constant_atlas
from gerbekit.enumerate import enumerate_gerbes
from gerbekit.gpd import is_gerbe
from gerbekit.groth import Cocycle
from gerbekit.groups import cyclic
from gerbekit.io import ParseError
from gerbekit.presheaf import constant_presheaf
from gerbekit.two_gpd import resolution

from conftest import sierpinski, three

FIXTURES = Path(__file__).parent / "fixtures"


def round_trip(kind, obj):
    text = io.dumps(kind, obj)
    k, back = io.loads(text)
    assert k == kind
    assert io.dumps(kind, back) == text
    return back


def test_presheaf_round_trip():
    round_trip("presheaf", constant_presheaf(three(), ["0", "1"]))


def test_groupoid_presheaf_round_trip():
    for G in enumerate_gerbes(sierpinski(), 2, 2):
        back = round_trip("groupoid_presheaf", G)
        assert bool(is_gerbe(back))


def test_two_groupoid_presheaf_round_trip():
    G = next(iter(enumerate_gerbes(sierpinski(), 1, 2)))
    round_trip("two_groupoid_presheaf", resolution(G))


def test_atlas_round_trip():
    back = round_trip("atlas", constant_atlas(sierpinski(), cyclic(3)))
    assert atlas_violations(back) == []


def test_file_round_trip(tmp_path):
    X = constant_presheaf(sierpinski(), ["x"])
    p = tmp_path / "x.json"
    io.dump("presheaf", X, p)
    assert io.dumps("presheaf", io.load(p)[1]) == p.read_text()


SITELESS = ("atlas_s3.json", "atlas_z3.json")


@pytest.mark.parametrize("path", sorted(p.name for p in FIXTURES.glob("*.json") if p.name not in SITELESS))
def test_fixtures_load(path):
    kind, obj = io.load(FIXTURES / path)
    assert kind in ("site", "presheaf", "groupoid_presheaf", "two_groupoid_presheaf", "atlas", "cocycle")
    if kind == "cocycle":
        assert isinstance(obj, Cocycle)


@pytest.mark.parametrize("path", SITELESS)
def test_siteless_atlas_needs_a_site(path):
    with pytest.raises(ParseError, match="site"):
        io.load(FIXTURES / path)
    doc = _doc(path)
    doc["site"] = _doc("three_site.json")
    kind, F = io.from_doc(doc)
    assert kind == "atlas" and atlas_violations(F) == []


def test_bad_json_reports_line_and_column(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n "format": "gerbekit",\n "kind": \n}\n')
    with pytest.raises(ParseError) as exc:
        io.load(p)
    assert exc.value.where == f"{p}:4:1"


def test_loads_reports_line_and_column():
    with pytest.raises(ParseError) as exc:
        io.loads("[1,\n 2")
    assert exc.value.where.startswith("line 2 column")


def _doc(name):
    return json.loads((FIXTURES / name).read_text())


def test_wrong_format_and_version():
    doc = _doc("poset_site.json")
    with pytest.raises(ParseError, match=r"\$\.format"):
        io.from_doc({**doc, "format": "other"})
    with pytest.raises(ParseError, match=r"\$\.version"):
        io.from_doc({**doc, "version": 99})
    with pytest.raises(ParseError, match="unknown kind"):
        io.from_doc({**doc, "kind": "sheaf"})


def test_missing_field_is_located():
    doc = _doc("presheaf_three.json")
    del doc["restrict"]
    with pytest.raises(ParseError, match="restrict"):
        io.from_doc(doc)


def test_unknown_group_is_reported():
    doc = _doc("atlas_z2.json")
    doc["group"] = "Q8x"
    with pytest.raises(ParseError, match="unknown group"):
        io.from_doc(doc)
