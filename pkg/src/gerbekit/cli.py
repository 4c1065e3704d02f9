"""Command-line front end.

    gerbekit validate FILE...
    gerbekit classify --atlas A.json [--site S.json] --bounds 2,3 [--out report.txt]
    gerbekit check lemma17 --cocycle c.json --at U,i

Exit codes: 0 pass, 1 validation failure, 2 budget exceeded, 3 precondition
violated, 4 parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import io
from ._util import sort
from .atlas import AtlasError, atlas_violations
from .classify import (
    Bounds,
    BudgetExceeded,
    Corpus,
    PreconditionError,
    enumerate_corpus_gerbes,
    render_report,
    verify_theorem20,
    verify_theorem23,
)
from .gpd import is_cech, is_cech_definitional, is_gerbe
from .groth import check_cor19, check_lemma10, check_lemma13, check_lemma16, check_lemma17
from .presheaf import presheaf_violations
from .site import validate_site
from .two_gpd import check_lemma6, check_lemma8

log = logging.getLogger("gerbekit")

EXIT_OK, EXIT_INVALID, EXIT_BUDGET, EXIT_PRECONDITION, EXIT_PARSE = 0, 1, 2, 3, 4
JOBS_ENV = "GERBEKIT_JOBS"

CHECKS = ("lemma6", "lemma7", "lemma8", "lemma10", "lemma13", "lemma16", "lemma17", "cor19")


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    bounds: Bounds = field(default_factory=Bounds)
    out: str = None
    verbosity: int = 0
    seed: int = None
    sample: int = None
    jobs: int = 1

    def __post_init__(self):
        if self.jobs < 1:
            raise ValueError("jobs must be positive")
        for p in self.inputs:
            if not Path(p).exists():
                raise FileNotFoundError(p)


# ---------------------------------------------------------------- validate


def _violations(kind, obj) -> list:
    site = obj if kind == "site" else getattr(obj, "site", None)
    if site is None and kind == "cocycle":
        site = obj.A.site
    out = [f"site {v}" for v in validate_site(site)] if site is not None else []
    if out or kind == "site":
        return out
    if kind == "presheaf":
        return [str(v) for v in presheaf_violations(obj)]
    if kind == "atlas":
        return [repr(v) for v in atlas_violations(obj)]
    return [repr(v) for v in obj.violations()]


def validate_file(path) -> tuple[int, list[str]]:
    try:
        kind, obj = io.load(path)
    except io.ParseError as exc:
        return EXIT_PARSE, [f"{path}: parse error at {exc}"]
    except (KeyError, ValueError, TypeError) as exc:
        # structurally readable but inconsistent enough that construction failed
        return EXIT_INVALID, [f"{path}: invalid {exc!r}"]
    try:
        vs = _violations(kind, obj)
    except (KeyError, ValueError) as exc:
        vs = [f"inconsistent data: {exc!r}"]
    if vs:
        return EXIT_INVALID, [f"{path}: {kind} INVALID"] + [f"  {v}" for v in vs]
    return EXIT_OK, [f"{path}: {kind} OK"]


def cmd_validate(cfg: RunConfig) -> tuple[int, str]:
    with ThreadPoolExecutor(max_workers=cfg.jobs) as ex:
        results = list(ex.map(validate_file, cfg.inputs))
    lines = [ln for _, out in results for ln in out]
    codes = [c for c, _ in results]
    # parse errors dominate, then validation failures
    code = EXIT_PARSE if EXIT_PARSE in codes else max(codes, default=EXIT_OK)
    return code, "\n".join(lines) + "\n"


# ---------------------------------------------------------------- classify


def _load_atlas(atlas_path, site_path=None):
    doc = io._read(atlas_path)
    if site_path is not None:
        doc["site"] = io._read(site_path)
    kind, atlas = io.from_doc(doc, str(atlas_path))
    if kind != "atlas":
        raise io.ParseError(f"{atlas_path}.kind", f"expected an atlas, got {kind!r}")
    return atlas


def _sampled(corpus: Corpus, cfg: RunConfig):
    gerbes = enumerate_corpus_gerbes(corpus, cfg.jobs)
    if cfg.sample is None or cfg.sample >= len(gerbes):
        return gerbes, None
    picked = sorted(random.Random(cfg.seed).sample(range(len(gerbes)), cfg.sample))
    return [gerbes[k] for k in picked], f"sample: {cfg.sample} of {len(gerbes)} gerbes (seed {cfg.seed})"


def _render23(r) -> str:
    parts = ["== smaller atlas ==", render_report(r.small).rstrip("\n"),
             "== larger atlas ==", render_report(r.large).rstrip("\n"),
             f"lwe2 inclusion: {r.lwe2}",
             f"cocycle comparison bijective: {r.cocycle_map_bijective}",
             f"gerbe comparison bijective: {r.gerbe_map_bijective}"]
    parts += [f"witness: {w!r}" for w in r.witnesses]
    parts.append(f"verdict: {'PASS' if r.ok else 'FAIL'}")
    return "\n".join(parts) + "\n"


def cmd_classify(cfg: RunConfig, site_path, atlas_path, large_path=None, check="theorem20") -> tuple[int, str]:
    atlas = _load_atlas(atlas_path, site_path)
    corpus = Corpus(atlas.site, atlas, cfg.bounds)
    try:
        if check == "theorem23":
            if large_path is None:
                raise PreconditionError("theorem23 needs --large")
            large = _load_atlas(large_path, site_path)
            r = verify_theorem23(corpus, large, cfg.jobs)
            return (EXIT_OK if r.ok else EXIT_INVALID), _render23(r)
        gerbes, note = _sampled(corpus, cfg)
        r = verify_theorem20(corpus, gerbes)
        text = render_report(r)
        if note:
            text = text.replace("\nscope:", f"\n{note}\nscope:", 1)
        return (EXIT_OK if r.bijection else EXIT_INVALID), text
    except BudgetExceeded as exc:
        b = cfg.bounds
        return EXIT_BUDGET, (
            "gerbekit classification report\n"
            f"site: {atlas.site.name}\natlas: {atlas.name}\n"
            f"bounds: max_objects={b.max_objects} max_order={b.max_order} budget={b.budget} map_budget={b.map_budget}\n"
            f"incomplete: {exc}\nverdict: BUDGET\n"
        )
    except AtlasError as exc:
        raise PreconditionError(str(exc)) from exc


# ---------------------------------------------------------------- check


def _load_kind(path, kinds):
    kind, obj = io.load(path)
    if kind not in kinds:
        raise io.ParseError(f"{path}.kind", f"expected one of {list(kinds)}, got {kind!r}")
    return obj


def cmd_check(name: str, args) -> tuple[int, str]:
    if name in ("lemma6", "lemma8"):
        H = _load_kind(_require(args.two, "--two"), ("two_groupoid_presheaf",))
        r = check_lemma6(H) if name == "lemma6" else check_lemma8(H)
        return _verdict(name, r.agree, {"left": r.left, "right": r.right})
    if name == "lemma7":
        G = _load_kind(_require(args.groupoid or args.gerbe, "--groupoid"), ("groupoid_presheaf",))
        a, b = is_cech(G), is_cech_definitional(G)
        return _verdict(name, bool(a) == bool(b), {"cech": bool(a), "definitional": bool(b), "witness": a.witness})
    if name == "lemma13":
        G = _load_kind(_require(args.gerbe or args.groupoid, "--gerbe"), ("groupoid_presheaf",))
        v = is_gerbe(G)
        if not v:
            raise PreconditionError(f"input is not a gerbe: {v.witness!r}")
        r = check_lemma13(G)
        return _verdict(name, r.ok, r.witness)
    c = _load_kind(_require(args.cocycle, "--cocycle"), ("cocycle",))
    if name == "lemma10":
        r = check_lemma10(c)
    elif name == "lemma16":
        r = check_lemma16(c)
    elif name == "cor19":
        r = check_cor19(c)
    else:
        points = [_parse_at(args.at)] if args.at else [(U, i) for U in c.A.site.objects for i in sort(c.A.sections[U].objects)]
        for U, i in points:
            if U not in c.A.sections or i not in c.A.sections[U].objects:
                raise PreconditionError(f"no object {i!r} over {U!r}")
        results = {f"{U},{i}": check_lemma17(c, U, i) for U, i in points}
        ok = all(results.values())
        return _verdict(name, ok, {k: v.witness for k, v in results.items()})
    return _verdict(name, r.ok, r.witness)


def _require(path, flag):
    if path is None:
        raise PreconditionError(f"this check needs {flag}")
    return path


def _parse_at(text: str) -> tuple:
    U, sep, i = text.partition(",")
    if not sep:
        raise io.ParseError("--at", "expected U,i")
    return U, i


def _verdict(name, ok, witness) -> tuple[int, str]:
    doc = {"check": name, "verdict": "PASS" if ok else "FAIL", "witness": witness}
    return (EXIT_OK if ok else EXIT_INVALID), json.dumps(doc, sort_keys=True, default=repr) + "\n"


# ---------------------------------------------------------------- entry point


def _bounds(text: str, budget) -> Bounds:
    try:
        vals = [int(x) for x in text.split(",")]
    except ValueError:
        raise io.ParseError("--bounds", f"expected integers, got {text!r}") from None
    if len(vals) not in (2, 3):
        raise io.ParseError("--bounds", "expected max_objects,max_order[,map_budget]")
    kw = {"max_objects": vals[0], "max_order": vals[1]}
    if len(vals) == 3:
        kw["map_budget"] = vals[2]
    if budget is not None:
        kw["budget"] = budget
    return Bounds(**kw)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gerbekit", description="Finite-site gerbe classification checks.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("--jobs", type=int, default=int(os.environ.get(JOBS_ENV, "1")),
                   help=f"worker count (default from ${JOBS_ENV}, else 1)")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check interchange files against their axioms")
    v.add_argument("paths", nargs="+")

    c = sub.add_parser("classify", help="compare path components of gerbes and cocycles")
    c.add_argument("--site", help="site document; overrides the atlas file's site field")
    c.add_argument("--atlas", required=True)
    c.add_argument("--large", help="larger atlas for --check theorem23")
    c.add_argument("--check", choices=("theorem20", "theorem23"), default="theorem20")
    c.add_argument("--bounds", default="2,2", help="max_objects,max_order[,map_budget]")
    c.add_argument("--budget", type=int, help="candidate presheaves examined before giving up")
    c.add_argument("--sample", type=int, help="classify a seeded random subset of this many gerbes")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")

    k = sub.add_parser("check", help="run one lemma on one instance")
    k.add_argument("name", choices=CHECKS)
    k.add_argument("--gerbe")
    k.add_argument("--groupoid")
    k.add_argument("--two", help="2-groupoid presheaf document")
    k.add_argument("--cocycle")
    k.add_argument("--at", help="U,i for lemma17")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    try:
        if args.command == "validate":
            cfg = RunConfig("validate", list(args.paths), jobs=args.jobs)
            code, text = cmd_validate(cfg)
        elif args.command == "classify":
            inputs = [x for x in (args.site, args.atlas, args.large) if x]
            cfg = RunConfig("classify", inputs, _bounds(args.bounds, args.budget), args.out, args.verbose,
                            args.seed, args.sample, args.jobs)
            code, text = cmd_classify(cfg, args.site, args.atlas, args.large, args.check)
        else:
            code, text = cmd_check(args.name, args)
    except io.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"no such file: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
