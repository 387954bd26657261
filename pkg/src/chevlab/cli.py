"""Command line front end."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from . import engine as eng
from .chevgen import Representation, generator_set_E, generator_set_X, generator_set_Y, generator_set_Z, validate_relations
from .report import FAILS, SKIPPED, VerdictReport
from .rings import RingError, parse_ideal, parse_ring
from .rootsys import KINDS, RootSystemError, roots_of
from .theorems import (
    CLAIMS,
    DEEP_SUITE,
    DEFAULT_SUITE,
    T4_CHAIN,
    CaseError,
    VerificationCase,
    load_suite_file,
    run_case,
)

TSV_COLUMNS = ("claim", "phi", "ring", "i", "j", "verdict", "size_M", "size_EIJ", "millis")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    cases: List[VerificationCase]
    budget: int = eng.DEFAULT_BUDGET
    fmt: str = "json"
    jobs: int = 1
    strict: bool = False
    cache_dir: Optional[Path] = None

    def __post_init__(self):
        if self.budget < 1000:
            raise ConfigError("budget must be at least 1000")
        if self.jobs < 1:
            raise ConfigError("--jobs must be positive")


def _claim(text: str) -> str:
    try:
        return VerificationCase(text, "A2", "Z/2", "0", "0").claim
    except CaseError:
        raise argparse.ArgumentTypeError(f"unknown claim {text!r}; choose from {', '.join(CLAIMS)}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chevlab", description="Elementary Chevalley groups over finite rings.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="structure constants as TSV")
    c.add_argument("--phi", required=True, choices=KINDS)

    r = sub.add_parser("relations", help="exhaustive Steinberg relation check")
    r.add_argument("--phi", required=True, choices=KINDS)
    r.add_argument("--ring", required=True)

    g = sub.add_parser("gens", help="dump a generator set as JSON")
    g.add_argument("--set", dest="family", required=True, choices=("E", "Z", "X", "Y"))
    g.add_argument("--phi", required=True, choices=KINDS)
    g.add_argument("--ring", required=True)
    g.add_argument("--ideal-i", required=True)
    g.add_argument("--ideal-j")

    v = sub.add_parser("verify", help="run verification cases")
    v.add_argument("--claim", type=_claim, action="append", help="claim to run (repeatable); filters a suite")
    v.add_argument("--phi", choices=KINDS, action="append", help="root system (repeatable); filters a suite")
    v.add_argument("--ring")
    v.add_argument("--ideal-i")
    v.add_argument("--ideal-j")
    v.add_argument("--suite", choices=("default",))
    v.add_argument("--suite-file", type=Path, help="TSV of cases: claim phi ring i [j]")
    v.add_argument("--deep", action="store_true", help="include the large G2 cases")
    v.add_argument("--budget", type=int, default=eng.DEFAULT_BUDGET, help="max subgroup size (default %(default)s)")
    v.add_argument("--format", dest="fmt", choices=("json", "tsv", "human"), default="json")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--strict", action="store_true", help="treat skipped cases as failures")
    v.add_argument("--cache-dir", type=Path, help="cache directory for enumerated subgroups")
    v.add_argument("--no-cache", action="store_true", help="do not read or write the cache")

    k = sub.add_parser("cache", help="inspect cached subgroup files")
    k.add_argument("action", choices=("ls", "check", "clear"))
    k.add_argument("--cache-dir", type=Path)
    return p


def _cases_from_args(args) -> List[VerificationCase]:
    if args.suite or args.suite_file:
        cases: List[VerificationCase] = []
        if args.suite:
            cases += DEFAULT_SUITE
        if args.suite_file:
            cases += load_suite_file(args.suite_file)
        if args.deep:
            cases += DEEP_SUITE
        if args.claim:
            cases = [c for c in cases if c.claim in args.claim]
        if args.phi:
            cases = [c for c in cases if c.phi in args.phi]
        if args.ring:
            cases = [c for c in cases if c.ring == args.ring]
        return cases
    if not (args.claim and args.phi and args.ring and args.ideal_i is not None):
        raise ConfigError("give --suite/--suite-file, or --claim, --phi, --ring and --ideal-i")
    if len(args.claim) != 1 or len(args.phi) != 1:
        raise ConfigError("a single case takes exactly one --claim and one --phi")
    case = VerificationCase(args.claim[0], args.phi[0], args.ring, args.ideal_i, args.ideal_j)
    case.resolve()
    return [case]


def _run_group(cases, budget, cache_dir):
    return [run_case(c, budget, cache_dir) for c in cases]


def run(config: RunConfig) -> List[VerdictReport]:
    """Reports in case order, whatever the scheduling."""
    groups = {}
    for idx, c in enumerate(config.cases):
        groups.setdefault((c.phi, c.ring), []).append(idx)
    results: List[Optional[VerdictReport]] = [None] * len(config.cases)
    if config.jobs == 1:
        for idxs in groups.values():
            for idx in idxs:
                results[idx] = run_case(config.cases[idx], config.budget, config.cache_dir)
    else:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futs = {
                pool.submit(_run_group, [config.cases[i] for i in idxs], config.budget, config.cache_dir): idxs
                for idxs in groups.values()
            }
            for fut, idxs in futs.items():
                for idx, rep in zip(idxs, fut.result()):
                    results[idx] = rep
    return [r for r in results if r is not None]


def exit_code(reports: Sequence[VerdictReport], strict: bool) -> int:
    bad = {FAILS, SKIPPED} if strict else {FAILS}
    return 1 if any(r.verdict in bad for r in reports) else 0


def _fmt_size(v) -> str:
    return "" if v is None else str(v)


def format_tsv(reports: Sequence[VerdictReport]) -> str:
    lines = ["\t".join(TSV_COLUMNS)]
    for r in reports:
        row = [r.claim, r.phi, r.ring, r.i or "", r.j or "", r.verdict,
               _fmt_size(r.sizes.get("M")), _fmt_size(r.sizes.get("E_IJ")), str(r.millis)]
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def format_human(reports: Sequence[VerdictReport]) -> str:
    out = []
    for r in reports:
        ideals = f"I={r.i}" + (f" J={r.j}" if r.j is not None else "")
        head = f"{r.claim:<10} {r.phi} {r.ring:<9} {ideals:<12} {r.verdict.upper():<7} {r.millis} ms"
        out.append(head)
        if r.details.get("exploratory"):
            out.append(f"    exploratory, observed {r.details.get('observed')}")
        if r.details.get("reason") and r.verdict == SKIPPED and not r.details.get("exploratory"):
            out.append(f"    {r.details['reason']}")
        if "observed" in r.details and r.claim == "STRICTNESS":
            out.append(f"    M vs E(R,IJ): {r.details['observed']}, index {r.details.get('index')}")
        if r.claim == "T4" and "links" in r.details:
            out.extend(_chain_diagram(r))
        if r.witness:
            out.append(f"    witness: {json.dumps(r.witness)}")
    return "\n".join(out) + "\n"


def _chain_diagram(r: VerdictReport) -> List[str]:
    sizes = {
        T4_CHAIN[0]: r.sizes.get("E_IJ"),
        T4_CHAIN[1]: r.sizes.get("D"),
        T4_CHAIN[2]: r.sizes.get("M"),
        T4_CHAIN[3]: r.sizes.get("GG"),
        T4_CHAIN[4]: None,
    }
    marks = {}
    for link in r.details["links"]:
        if not link.get("direct"):
            marks[link["link"][1]] = link["verdict"]
    lines = []
    for k, name in enumerate(T4_CHAIN):
        if k:
            v = marks.get(name, "")
            sym = {"holds": "<=", "fails": "!<=", "skipped": "?<="}.get(v, "  ")
            lines.append(f"      {sym:>3}   ({v})")
        size = sizes[name]
        lines.append(f"    {name:<18} {'' if size is None else '|' + str(size) + '|'}")
    direct = [l for l in r.details["links"] if l.get("direct")]
    if direct:
        lines.append(f"    direct level check {T4_CHAIN[2]} <= {T4_CHAIN[4]}: {direct[0]['verdict']}")
    return lines


def emit(reports: Sequence[VerdictReport], fmt: str, stream) -> None:
    if fmt == "json":
        for r in reports:
            stream.write(json.dumps(r.to_dict()) + "\n")
    elif fmt == "tsv":
        stream.write(format_tsv(reports))
    else:
        stream.write(format_human(reports))


def _cmd_constants(args) -> int:
    system = roots_of(args.phi)
    print("alpha\tbeta\ti\tj\tN")
    for a in system.roots:
        for b in system.roots:
            for i, j, n in system.constants.get((a, b), ()):
                print(f"{a}\t{b}\t{i}\t{j}\t{n}")
    return 0


def _cmd_relations(args) -> int:
    rep = Representation(args.phi, parse_ring(args.ring))
    report = validate_relations(rep)
    print(json.dumps(report.to_dict()))
    return 1 if report.verdict == FAILS else 0


def _cmd_gens(args) -> int:
    ring = parse_ring(args.ring)
    rep = Representation(args.phi, ring)
    i = parse_ideal(ring, args.ideal_i)
    if args.family in ("X", "Y") and args.ideal_j is None:
        raise ConfigError(f"--set {args.family} needs --ideal-j")
    if args.family == "E":
        gens = generator_set_E(rep, i)
    elif args.family == "Z":
        gens = generator_set_Z(rep, i)
    else:
        j = parse_ideal(ring, args.ideal_j)
        gens = (generator_set_X if args.family == "X" else generator_set_Y)(rep, i, j)
    out = [
        {"matrix": g.tolist(), "labels": [[fam, list(root), list(params)] for fam, root, params in labels]}
        for g, labels in zip(gens, gens.labels)
    ]
    json.dump({"set": args.family, "phi": args.phi, "ring": ring.name, "count": len(out), "elements": out},
              sys.stdout)
    sys.stdout.write("\n")
    return 0


def _cmd_verify(args) -> int:
    cache = None
    if not args.no_cache and (args.cache_dir or os.environ.get("CHEVLAB_CACHE")):
        cache = eng.cache_dir(args.cache_dir)
    config = RunConfig(_cases_from_args(args), args.budget, args.fmt, args.jobs, args.strict, cache)
    if not config.cases:
        raise ConfigError("no cases selected")
    reports = run(config)
    emit(reports, config.fmt, sys.stdout)
    return exit_code(reports, config.strict)


def _cmd_cache(args) -> int:
    d = eng.cache_dir(args.cache_dir)
    files = sorted(d.glob("*.chvl")) if d.exists() else []
    status = 0
    for f in files:
        if args.action == "clear":
            f.unlink()
            continue
        try:
            info = eng.inspect_cache(f)
        except eng.CacheError as exc:
            print(f"{f.name}\tCORRUPT\t{exc}")
            status = 1
            continue
        print(f"{f.name}\tdim={info['dim']}\tring_size={info['ring_size']}\tcount={info['count']}")
    return status


COMMANDS = {
    "constants": _cmd_constants,
    "relations": _cmd_relations,
    "gens": _cmd_gens,
    "verify": _cmd_verify,
    "cache": _cmd_cache,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, CaseError, RingError, RootSystemError) as exc:
        print(f"chevlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
