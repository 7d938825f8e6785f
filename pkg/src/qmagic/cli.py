"""Command-line interface: ``qmagic <command> ...``.

Exit codes are shared by all commands:

    0  success / decided positive
    1  decided (or likely) negative
    2  input error
    3  undetermined

The environment variable ``MAGIC_TOLERANCE_SCALE`` multiplies every
tolerance.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import construct, decompose, documents, linalg, mconv, squares
from .documents import DocumentError
from .errors import MagicSquareError

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_UNDETERMINED = 0, 1, 2, 3

log = logging.getLogger("qmagic")


class UsageError(MagicSquareError):
    pass


def tolerances_from_env() -> linalg.Tolerances:
    raw = os.environ.get("MAGIC_TOLERANCE_SCALE", "").strip()
    if not raw:
        return linalg.Tolerances()
    try:
        factor = float(raw)
    except ValueError as exc:
        raise UsageError(f"MAGIC_TOLERANCE_SCALE={raw!r} is not a number") from exc
    return linalg.Tolerances().scaled(factor)


def _emit(doc: dict, path: str | None) -> None:
    if path:
        documents.write(doc, path)
    else:
        sys.stdout.write(documents.dumps(doc))


def _basis(choice: str, n: int, seed: int) -> np.ndarray:
    if choice == "standard":
        return linalg.standard_basis(n)
    if choice == "fourier":
        return linalg.fourier_basis(n)
    if choice == "haar":
        return linalg.random_haar_basis(n, seed)
    return documents.to_basis(documents.read(choice))


def _square(doc: dict) -> squares.QuantumMagicSquare:
    """A qms, a qls or a decomposition document, as a square."""
    if doc.get("kind") == "decomposition":
        return construct.assemble(documents.to_decomposition(doc))
    return documents.to_qms(doc)


def classification_fields(info: squares.Classification) -> dict:
    return {
        "n": info.n, "s": info.s,
        "qms": info.is_qms, "qpm": info.is_qpm,
        "commuting": info.is_commuting, "rank_one": info.is_rank_one,
        "residuals": dict(info.residuals),
    }


# -- commands ---------------------------------------------------------------

def cmd_classify(args, tol) -> int:
    a = _square(documents.read(args.input))
    info = squares.classify(a, tol)
    _emit(documents.report_doc("classify", input=args.input, **classification_fields(info)), args.output)
    return EXIT_OK


def cmd_construct(args, tol) -> int:
    what = args.what
    if what == "easy-qls":
        latin = documents.to_latin(documents.read(_required(args.latin, "--latin")))
        doc = documents.qls_doc(construct.easy_qls(latin, _basis(args.basis, latin.n, args.seed)))
    elif what == "povm-latin":
        latin = documents.to_latin(documents.read(_required(args.latin, "--latin")))
        povm = documents.to_povm(documents.read(_required(args.povm, "--povm")))
        doc = documents.qms_doc(construct.povm_latin(latin, povm, tol))
    elif what == "counterexample":
        m = _required(args.m, "--m")
        v = _basis(args.basis_v, m, args.seed) if args.basis_v else None
        w = _basis(args.basis_w, m, args.seed + 1) if args.basis_w else None
        doc = documents.bundle_doc(construct.build_counterexample(m, v, w, tol))
    elif what == "random":
        doc = _random_doc(args)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown construction {what!r}")
    _emit(doc, args.output)
    return EXIT_OK


def _required(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required here")
    return value


def _random_doc(args) -> dict:
    n, s, seed = _required(args.n, "--n"), args.s, args.seed
    if n < 1 or s < 1:
        raise UsageError("--n and --s must be positive")
    kind = args.kind
    if kind == "ds":
        return documents.qms_doc(construct.random_doubly_stochastic(n, seed))
    if kind == "latin":
        return documents.latin_doc(construct.random_latin_square(n, seed))
    if kind == "basis":
        return documents.basis_doc(linalg.random_haar_basis(n, seed))
    if kind == "povm":
        return documents.povm_doc(construct.random_povm(n, s, seed))
    if kind == "semiclassical":
        return documents.decomposition_doc(construct.random_semiclassical(n, s, seed))
    if kind == "easy-qls":
        latin = construct.random_latin_square(n, seed)
        return documents.qls_doc(construct.easy_qls(latin, linalg.random_haar_basis(n, seed)))
    if kind == "qms2":
        return documents.qms_doc(construct.random_qms_exterior2(s, seed))
    raise UsageError(f"unknown random kind {kind!r}")


def cmd_decompose(args, tol) -> int:
    doc = documents.read(args.input)
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    method = args.method

    if method == "bvn":
        terms = decompose.bvn_decompose(_square(doc), tol)
        cert = decompose.bvn_to_decomposition(terms)
        if out_dir:
            documents.write(documents.decomposition_doc(cert), out_dir / "decomposition.json")
        _emit(documents.report_doc(
            "decompose bvn", decided=True, terms=len(terms),
            weights=[w for w, _ in terms], permutations=[list(p.images) for _, p in terms],
            weight_sum_error=abs(sum(w for w, _ in terms) - 1.0),
        ), args.output)
        return EXIT_OK

    a = _square(doc)
    if method == "semiclassical":
        verdict = decompose.semiclassical_membership(
            a, max_iter=args.max_iter, tol_feas=args.tol, tol=tol, allow_large=args.allow_large,
            facial_reduction=not args.no_facial_reduction, refine=not args.no_refine,
        )
        if verdict.certificate is not None and out_dir:
            documents.write(documents.decomposition_doc(verdict.certificate), out_dir / "decomposition.json")
        _emit(documents.report_doc(
            "decompose semiclassical", status=verdict.status.value, residual=verdict.residual,
            iterations=verdict.iterations, active_permutations=verdict.active_permutations,
            certificate_terms=None if verdict.certificate is None else len(verdict.certificate),
        ), args.output)
        return {
            decompose.Status.FEASIBLE: EXIT_OK,
            decompose.Status.LIKELY_INFEASIBLE: EXIT_NEGATIVE,
            decompose.Status.UNDETERMINED: EXIT_UNDETERMINED,
        }[verdict.status]

    if method == "rank-one-test":
        verdict = decompose.rank_one_semiclassical_test(a, tol)
        if verdict.is_semiclassical and out_dir:
            documents.write(documents.latin_doc(verdict.latin), out_dir / "latin.json")
            documents.write(documents.basis_doc(verdict.basis), out_dir / "basis.json")
        _emit(documents.report_doc(
            "decompose rank-one-test", semiclassical=verdict.is_semiclassical, reason=verdict.reason,
            latin=None if verdict.latin is None else verdict.latin.cells.tolist(),
        ), args.output)
        return EXIT_OK if verdict.is_semiclassical else EXIT_NEGATIVE
    raise UsageError(f"unknown method {method!r}")  # pragma: no cover


def cmd_purify(args, tol) -> int:
    terms = documents.to_decomposition(documents.read(args.input))
    basis = _basis(args.basis, terms.n, args.seed)
    comb = decompose.purify_semiclassical(terms, basis, tol)
    target = construct.assemble(terms)
    res = decompose.purification_residuals(comb, target, tol)
    _emit(documents.combination_doc(comb), args.output)
    if args.report:
        documents.write(documents.report_doc(
            "purify", terms=len(comb.terms), isometry_residual=res.isometry,
            reconstruction_residual=res.reconstruction,
        ), args.report)
    return EXIT_OK


def cmd_combine(args, tol) -> int:
    docs = [documents.read(p) for p in args.inputs]
    if args.isometries:
        t, vs = documents.to_isometries(documents.read(args.isometries))
        sources = [documents.to_qms(d) for d in docs]
        if len(sources) == 1 and len(vs) > 1:
            sources = sources * len(vs)
        if len(sources) != len(vs):
            raise UsageError(f"{len(sources)} sources but {len(vs)} contractions")
        comb = mconv.MatrixConvexCombination(t, tuple(zip(sources, vs)))
    else:
        if len(docs) != 1:
            raise UsageError("without --isometries pass exactly one combination document")
        comb = documents.to_combination(docs[0])
    result = mconv.combine(comb, tol)
    _emit(documents.qms_doc(result), args.output)
    if args.report:
        info = squares.classify(result, tol)
        documents.write(documents.report_doc("combine", **classification_fields(info)), args.report)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmagic", description="Quantum magic squares and quantum Latin squares.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="membership in M, P, C, R with residuals")
    c.add_argument("input")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("construct", help="build squares")
    c.add_argument("what", choices=["easy-qls", "povm-latin", "counterexample", "random"])
    c.add_argument("--latin")
    c.add_argument("--basis", default="standard", help="standard | fourier | haar | FILE")
    c.add_argument("--basis-v")
    c.add_argument("--basis-w")
    c.add_argument("--povm")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--m", type=int)
    c.add_argument("--n", type=int)
    c.add_argument("--s", type=int, default=1)
    c.add_argument("--kind", default="ds",
                   choices=["ds", "latin", "basis", "povm", "semiclassical", "easy-qls", "qms2"])
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("decompose", help="decision procedures and decompositions")
    c.add_argument("method", choices=["bvn", "semiclassical", "rank-one-test"])
    c.add_argument("input")
    c.add_argument("--max-iter", type=int, default=50_000)
    c.add_argument("--tol", type=float, default=None, help="feasibility tolerance")
    c.add_argument("--allow-large", action="store_true")
    c.add_argument("--no-facial-reduction", action="store_true")
    c.add_argument("--no-refine", action="store_true")
    c.add_argument("--out-dir", help="directory for certificate documents")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_decompose)

    c = sub.add_parser("purify", help="semiclassical decomposition -> combination of easy QLS")
    c.add_argument("input")
    c.add_argument("--basis", default="standard")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--report")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_purify)

    c = sub.add_parser("combine", help="evaluate sum V_i^* A_i V_i")
    c.add_argument("inputs", nargs="+")
    c.add_argument("--isometries")
    c.add_argument("--report")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_combine)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        tol = tolerances_from_env()
        return args.func(args, tol)
    except (MagicSquareError, DocumentError, ValueError, KeyError, TypeError) as exc:
        print(f"qmagic: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
