"""Regenerate the JSON fixtures: python3 tests/fixtures/generate.py"""

import copy
import json
from pathlib import Path

from gerbekit import io
from gerbekit.atlas import constant_atlas
from gerbekit.gpd import GroupoidPresheaf, cech_groupoid, constant_group_presheaf
from gerbekit.groups import cyclic, symmetric3
from gerbekit.presheaf import constant_presheaf, map_from_function, terminal_presheaf
from gerbekit.site import open_cover_site, poset_site, terminal_site
from gerbekit.two_gpd import resolution

HERE = Path(__file__).parent


def write(name, doc):
    (HERE / name).write_text(json.dumps(doc, indent=1, sort_keys=True, ensure_ascii=False) + "\n")


def header(kind, **body):
    return {"format": "gerbekit", "version": 1, "kind": kind, **body}


def main():
    sierp = poset_site(["a", "ab"], lambda V, U: V == U or (V, U) == ("a", "ab"), "sierp")
    three = open_cover_site({"a": ["a"], "b": ["b"], "ab": ["a", "b"]}, "three")
    term = terminal_site()

    write("poset_site.json", io.to_doc("site", sierp))

    broken = io.to_doc("site", sierp)
    broken["compose"] = [[g, f, "a->ab" if (g, f) == ("ab->ab", "ab->ab") else h] for g, f, h in broken["compose"]]
    write("broken_compose_site.json", broken)

    nonsieve = io.to_doc("site", sierp)
    nonsieve["covering"]["ab"] = nonsieve["covering"]["ab"] + [["ab->ab"]]
    write("nonsieve_site.json", nonsieve)

    write("three_site.json", header("site", builder="open_cover", name="three",
                                    opens={"a": ["a"], "b": ["b"], "ab": ["a", "b"]}))

    G = GroupoidPresheaf.from_group_presheaf(constant_group_presheaf(term, symmetric3()))
    write("gerbe_s3.json", io.to_doc("groupoid_presheaf", G))

    X = constant_presheaf(three, ["x"], empty_over=("ab",))  # empty top section
    p = map_from_function(X, terminal_presheaf(three), lambda U, x: "*")
    write("cech.json", io.to_doc("groupoid_presheaf", cech_groupoid(p)))

    write("presheaf_three.json", io.to_doc("presheaf", X))

    Gs = GroupoidPresheaf.from_group_presheaf(constant_group_presheaf(sierp, cyclic(2)))
    write("two_resolution.json", io.to_doc("two_groupoid_presheaf", resolution(Gs)))

    write("cocycle_sierp_z2.json", header("cocycle", builder="canonical", gerbe=io.to_doc("groupoid_presheaf", Gs)))

    write("atlas_z2.json", header("atlas", builder="constant", group="Z2", site=header("site", builder="terminal")))
    write("atlas_z3.json", header("atlas", builder="constant", group="Z3"))
    write("atlas_s3.json", header("atlas", builder="constant", group="S3"))

    full = io.to_doc("atlas", constant_atlas(term, cyclic(2)))
    write("atlas_z2_explicit.json", full)
    nofull = copy.deepcopy(full)
    nofull["isos"] = [row for row in nofull["isos"] if row[3] != nofull["isos"][0][3]]
    write("atlas_broken.json", nofull)


if __name__ == "__main__":
    main()
