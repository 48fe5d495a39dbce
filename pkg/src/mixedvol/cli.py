"""Command line front end.

Subcommands: compute (either or both algorithms, canonical polynomial
JSON), verify (invariant checks on a stored or fresh polynomial), compare
(multi-seed cross validation), corpus (uniform plus random matroid sweep).
The report goes to stdout, diagnostics and timings to stderr.  Exit codes:
0 success, 1 invalid input, 2 failed verification or method disagreement,
3 genericity retry budget exhausted (budget set by MIXEDVOL_RETRY_BUDGET).

Matroid JSON: {"ground_set": [1, 2, 3, 4], "bases": [[1, 2, 4], ...]} or
{"ground_set": [...], "flats": [[], [1], ..., [1, 2, 3, 4]]} with exactly
one of "bases"/"flats".  Polynomial JSON: {"degree": d, "terms": [{"coeff":
"p/q", "exponents": {"1,4": 1, ...}}, ...]} in canonical term order.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass

from .fan import bergman_fan, check_balancing, constant_weight
from .matroid import (
    ENUM_LIMIT,
    Matroid,
    MatroidError,
    random_matroid,
    uniform_matroid,
)
from .poly import diff_terms, poly_from_json_dict, poly_to_json_dict, pretty
from .volume import (
    GenericityError,
    VolPolynomial,
    _map_ordered,
    annihilator_check,
    brion_volume,
    chow_rank_checks,
    cross_validate,
    deletion_volume,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2
EXIT_GENERICITY = 3


def matroid_from_doc(doc) -> Matroid:
    if not isinstance(doc, dict):
        raise ValueError("matroid document must be a JSON object")
    if "ground_set" not in doc:
        raise ValueError("matroid document needs 'ground_set'")
    keys = [k for k in ("bases", "flats") if k in doc]
    if len(keys) != 1:
        raise ValueError("matroid document needs exactly one of 'bases'/'flats'")
    ground = doc["ground_set"]
    if keys[0] == "bases":
        return Matroid.from_bases(ground, doc["bases"])
    return Matroid.from_flats(ground, doc["flats"])


def matroid_to_doc(M: Matroid) -> dict:
    return {
        "ground_set": list(M.ground_sorted()),
        "bases": [list(B) for B in M.bases_sorted()],
    }


def load_matroid(path: str) -> Matroid:
    with open(path, encoding="utf-8") as fh:
        return matroid_from_doc(json.load(fh))


def volume_json_text(vol: VolPolynomial) -> str:
    return json.dumps(poly_to_json_dict(vol.poly, vol.degree), indent=2) + "\n"


@dataclass(frozen=True)
class RunReport:
    command: str
    passed: bool
    lines: tuple[str, ...]
    elapsed: float

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_FAILED


def _emit(report: RunReport) -> int:
    for line in report.lines:
        print(line)
    print(f"{report.command}: {'pass' if report.passed else 'FAIL'}")
    print(f"elapsed: {report.elapsed:.3f}s", file=sys.stderr)
    return report.exit_code


def _describe(M: Matroid) -> str:
    return (
        f"matroid: {len(M.elements)} elements, rank {M.rank}, "
        f"{len(M.bases)} bases, {len(M.maximal_chains())} maximal chains"
    )


def cmd_compute(args) -> int:
    start = time.perf_counter()
    M = load_matroid(args.input)
    lines = [_describe(M)]
    computed: dict[str, VolPolynomial] = {}
    if args.method in ("brion", "both"):
        computed["brion"] = brion_volume(M, seed=args.seed, jobs=args.jobs)
        lines.append(f"brion: seed {args.seed}, {len(computed['brion'].poly)} terms")
    if args.method in ("deletion", "both"):
        computed["deletion"] = deletion_volume(M)
        lines.append(f"deletion: {len(computed['deletion'].poly)} terms")
    if args.method == "both" and computed["brion"].poly != computed["deletion"].poly:
        lines.append("methods disagree:")
        lines.extend(
            "  " + d
            for d in diff_terms(computed["brion"].poly, computed["deletion"].poly)[:8]
        )
        return _emit(
            RunReport("compute", False, tuple(lines), time.perf_counter() - start)
        )
    vol = computed.get("brion") or computed["deletion"]
    text = volume_json_text(vol)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        lines.append(f"wrote: {args.output}")
    else:
        sys.stdout.write(text)
    if args.pretty:
        lines.append(pretty(vol.poly))
    return _emit(RunReport("compute", True, tuple(lines), time.perf_counter() - start))


def cmd_verify(args) -> int:
    start = time.perf_counter()
    M = load_matroid(args.input)
    lines = [_describe(M)]
    if args.vol:
        with open(args.vol, encoding="utf-8") as fh:
            poly, degree = poly_from_json_dict(json.load(fh))
        vol = VolPolynomial(
            poly, degree, frozenset(M.nontrivial_labels()), method="file"
        )
        lines.append(f"polynomial: {args.vol} ({len(poly)} terms, degree {degree})")
    else:
        vol = brion_volume(M, seed=args.seed)
        lines.append(f"polynomial: computed (brion, seed {args.seed})")
    report = annihilator_check(M, vol)
    fan = bergman_fan(M)
    balancing = check_balancing(fan, constant_weight(fan))
    checks = [
        ("degree normalization", report.degree_matches),
        ("homogeneity", report.homogeneous),
        ("variables inside flat universe", report.inside_universe),
        ("incomparable-pair annihilators", not report.incomparable_failures),
        ("ground-pair linear relations", not report.relation_failures),
        ("chain monomials evaluate to 1", not report.chain_failures),
        ("Bergman fan balancing", balancing.ok),
    ]
    if args.rank_checks:
        for p in range(M.rank):
            rank_report = chow_rank_checks(fan, vol, p)
            checks.append(
                (
                    f"chow rank p={p} (dim {rank_report.chow_dim}, "
                    f"pairing rank {rank_report.pairing_rank})",
                    rank_report.ok,
                )
            )
    passed = all(ok for _, ok in checks)
    lines.extend(f"{name}: {'pass' if ok else 'FAIL'}" for name, ok in checks)
    return _emit(RunReport("verify", passed, tuple(lines), time.perf_counter() - start))


def cmd_compare(args) -> int:
    start = time.perf_counter()
    if args.seeds < 1:
        raise ValueError("--seeds must be at least 1")
    M = load_matroid(args.input)
    lines = [_describe(M)]
    report = cross_validate(M, seeds=range(args.seeds), jobs=args.jobs)
    lines.append(f"seeds: {', '.join(str(s) for s in range(args.seeds))}")
    if report.ok:
        lines.append(
            f"all {args.seeds} determinant run(s) match the deletion volume "
            f"({len(report.volume.poly)} terms)"
        )
    else:
        lines.extend(report.messages)
    return _emit(
        RunReport("compare", report.ok, tuple(lines), time.perf_counter() - start)
    )


def cmd_corpus(args) -> int:
    start = time.perf_counter()
    if args.max_elements < 1 or args.max_elements > ENUM_LIMIT:
        raise ValueError(f"--max-elements must be between 1 and {ENUM_LIMIT}")
    if args.count < 0:
        raise ValueError("--count must be nonnegative")
    jobs = args.jobs
    entries: list[tuple[str, Matroid]] = []
    for m in range(1, args.max_elements + 1):
        for r in range(1, m + 1):
            entries.append((f"U_{r},{m}", uniform_matroid(r, m)))
    rng = random.Random(f"corpus:{args.seed}")
    for k in range(args.count):
        M = random_matroid(rng, args.max_elements)
        entries.append((f"random{k}", M))

    def run(entry):
        name, M = entry
        return name, M, cross_validate(M, seeds=(args.seed, args.seed + 1))

    lines = [f"corpus: {len(entries)} matroids (seed {args.seed})"]
    passed = True
    for name, M, report in _map_ordered(run, entries, jobs):
        status = "pass" if report.ok else "FAIL"
        lines.append(
            f"{name:<12} |E|={len(M.elements)} rank={M.rank} "
            f"bases={len(M.bases):<3} {status}"
        )
        if not report.ok:
            passed = False
            lines.extend("  " + msg for msg in report.messages)
    return _emit(RunReport("corpus", passed, tuple(lines), time.perf_counter() - start))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixedvol",
        description="Exact volume polynomials of matroid Chow rings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", help="compute the volume polynomial")
    compute.add_argument("--input", required=True, help="matroid JSON file")
    compute.add_argument(
        "--method", choices=("brion", "deletion", "both"), default="both"
    )
    compute.add_argument("--seed", type=int, default=0)
    compute.add_argument("--output", help="write polynomial JSON here")
    compute.add_argument("--pretty", action="store_true")
    compute.add_argument("--jobs", type=int, default=1)
    compute.set_defaults(func=cmd_compute)

    verify = sub.add_parser("verify", help="check the volume invariants")
    verify.add_argument("--input", required=True, help="matroid JSON file")
    verify.add_argument("--vol", help="polynomial JSON file (default: compute)")
    verify.add_argument("--rank-checks", action="store_true")
    verify.add_argument("--seed", type=int, default=0)
    verify.set_defaults(func=cmd_verify)

    compare = sub.add_parser("compare", help="cross-validate both algorithms")
    compare.add_argument("--input", required=True, help="matroid JSON file")
    compare.add_argument("--seeds", type=int, required=True, help="seed count")
    compare.add_argument("--jobs", type=int, default=1)
    compare.set_defaults(func=cmd_compare)

    corpus = sub.add_parser("corpus", help="sweep uniform and random matroids")
    corpus.add_argument("--max-elements", type=int, default=6)
    corpus.add_argument("--count", type=int, default=50)
    corpus.add_argument("--seed", type=int, default=0)
    corpus.add_argument("--jobs", type=int, default=1)
    corpus.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits itself on usage errors and --help; fold the former
        # into the invalid-input code.
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except GenericityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GENERICITY
    except (MatroidError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
