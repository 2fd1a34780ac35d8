"""Command line interface.

Subcommands: decompose (distribution -> atoms), lattice (DOT of a concept's
order), domains (a concept's antichains), rank (proper-synergy rank
analysis), check (re-verify a result file).  JSON is the canonical output
format; --table switches the commands that have one to a plain-text view.
Errors print a single ``error: ...`` line to stderr; exit status is 1 for
validation failures and 2 for usage mistakes.
"""

from __future__ import annotations

import argparse
import json
import sys

from .concepts import BaseConcept, concept_lattice, domain_for_concept
from .distributions import load_joint, random_joint
from .engine import (
    decompose,
    derived_measure_table,
    export_result,
    inclusion_exclusion_check,
    load_result,
    proper_synergy_rank_analysis,
    verify_consistency,
)
from .errors import PidError
from .lattices import lattice_to_dot

CONCEPT_TAGS = tuple(c.value for c in BaseConcept)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _build_parser() -> _Parser:
    parser = _Parser(prog="pidlattice", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", help="decompose a joint distribution into atoms")
    p.add_argument("--input", required=True, help="distribution file, or 'random' with --n/--seed")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.add_argument("--concept", required=True, choices=CONCEPT_TAGS)
    p.add_argument("--measure", default="reference", help="'reference' or a measure file path")
    p.add_argument("--table", action="store_true", help="attach all derived measure tables")
    p.add_argument("--n", type=int, help="source count for --input random")
    p.add_argument("--seed", type=int, default=0, help="seed for --input random")
    p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("lattice", help="emit a concept's (semi-)lattice as Graphviz DOT")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--concept", required=True, choices=CONCEPT_TAGS)
    p.add_argument("--out")

    p = sub.add_parser("domains", help="list the antichains a concept's measure is defined on")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--concept", required=True, choices=CONCEPT_TAGS)
    p.add_argument("--table", action="store_true", help="one label per line instead of JSON")
    p.add_argument("--out")

    p = sub.add_parser("rank", help="rank analysis of the proper-synergy constraint system")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--table", action="store_true", help="key=value lines instead of JSON")
    p.add_argument("--out")

    p = sub.add_parser("check", help="re-verify a result file's summation identities")
    p.add_argument("--input", required=True, help="result file from decompose")
    p.add_argument("--out")

    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_decompose(args) -> int:
    if args.input == "random":
        if args.n is None:
            print("error: --input random needs --n", file=sys.stderr)
            return 2
        dist = random_joint(args.n, args.seed)
    else:
        dist = load_joint(args.input, args.format)
    concept = BaseConcept.from_tag(args.concept)
    result = decompose(dist, concept, args.measure)
    doc = export_result(result)
    if args.table:
        derived = derived_measure_table(result)
        tables: dict[str, dict[str, float]] = {}
        for (c, alpha), v in derived.items():
            tables.setdefault(c.tag, {})[alpha.label()] = v
        doc["derived_measures"] = tables
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def _cmd_lattice(args) -> int:
    concept = BaseConcept.from_tag(args.concept)
    if concept in (BaseConcept.UNIQUE, BaseConcept.UNIQUE_PARTNER):
        print(f"error: {concept.tag} information is not nested; no lattice", file=sys.stderr)
        return 2
    _emit(lattice_to_dot(concept_lattice(concept, args.n)), args.out)
    return 0


def _cmd_domains(args) -> int:
    concept = BaseConcept.from_tag(args.concept)
    labels = [a.label() for a in domain_for_concept(concept, args.n)]
    if args.table:
        _emit("".join(label + "\n" for label in labels), args.out)
    else:
        _emit(json.dumps(labels, indent=2) + "\n", args.out)
    return 0


def _cmd_rank(args) -> int:
    analysis = proper_synergy_rank_analysis(args.n)
    fields = {
        "n": analysis.n,
        "unknowns": analysis.unknowns,
        "consistency_rank": analysis.consistency_rank,
        "combined_rank": analysis.combined_rank,
        "novel_constraints": analysis.novel_constraints,
        "deficit": analysis.deficit,
    }
    if args.table:
        _emit("".join(f"{k}={v}\n" for k, v in fields.items()), args.out)
    else:
        _emit(json.dumps(fields, indent=2) + "\n", args.out)
    return 0


def _cmd_check(args) -> int:
    result = load_result(args.input)
    report = verify_consistency(result)
    doc = {
        "consistency": {
            "passed": report.passed,
            "worst_collection": report.worst_label,
            "worst_error": report.worst_error,
            "tolerance": report.tolerance,
        }
    }
    failed = not report.passed
    if result.n <= 3:
        worst = 0.0
        ie_passed = True
        count = 0
        for alpha in domain_for_concept(BaseConcept.UNION, result.n):
            ie = inclusion_exclusion_check(result, alpha)
            count += 1
            worst = max(worst, ie.error)
            ie_passed = ie_passed and ie.passed
        doc["inclusion_exclusion"] = {
            "checked": count,
            "passed": ie_passed,
            "worst_error": worst,
        }
        failed = failed or not ie_passed
    else:
        doc["inclusion_exclusion"] = {"skipped": f"n={result.n} > 3"}
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    if failed:
        print("error: result file fails its summation identities", file=sys.stderr)
        return 1
    return 0


_COMMANDS = {
    "decompose": _cmd_decompose,
    "lattice": _cmd_lattice,
    "domains": _cmd_domains,
    "rank": _cmd_rank,
    "check": _cmd_check,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except PidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
