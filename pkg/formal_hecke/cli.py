#!/usr/bin/env python3
"""
Command-line surface for formal_hecke
Each subcommand writes one versioned JSON document; exit code 0 on success,
1 when a check fails, 2 on usage or parse errors
"""

import argparse
import logging
import sys
from typing import List, Optional, Sequence, Tuple

from .classgroup import class_group
from .config import get_settings
from .eigsys import inner_twists, recover, restrict_to_principal, synthesize
from .errors import FormalHeckeError, PreconditionError
from .heckemat import (
    HeckeMatrixSet,
    hecke_matrices_index_b,
    tp_wq_matrices,
    verify_sublattice_action,
    wqm_matrix_set,
)
from .heckeops import OperatorDescriptor, OperatorKind, evaluate, t_aa, w_q
from .ideals import Ideal
from .modpts import FormalSum, ModularPoint1, validate
from .qfield import FieldDesc
from .relations import RelationContext, run_suites, suite_names
from .utils.documents import (
    EigensystemSetDocument,
    RestrictionDocument,
    classgroup_document,
    eigensystem_set_document,
    eigensystems_from_document,
    formal_sum_document,
    matrix_set_document,
    p1_document,
    read_document,
    restriction_document,
    restriction_from_document,
    verify_report_document,
    write_document,
)
from .utils.literals import parse_ideal, parse_operator, parse_point
from .verify_runner import VerificationRunner, all_passed

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1


def _field_and_level(args) -> Tuple[FieldDesc, Ideal]:
    field = FieldDesc(args.d)
    level = parse_ideal(args.level, field) if args.level else Ideal.unit(field)
    return field, level


def _emit(doc, args) -> None:
    text = write_document(doc, args.out)
    if not args.out:
        print(text)


# subcommands

def cmd_classgroup(args) -> int:
    field, level = _field_and_level(args)
    cg = class_group(field, level)
    logger.info(f"{field}: h = {cg.h}, structure {cg.cyclic_structure}")
    _emit(classgroup_document(cg), args)
    return EXIT_OK


def cmd_p1(args) -> int:
    field, level = _field_and_level(args)
    doc = p1_document(level)
    logger.info(f"P^1 of {level} has {doc.count} symbols")
    _emit(doc, args)
    return EXIT_OK


def _parts(T: OperatorDescriptor) -> List[OperatorDescriptor]:
    return list(T.parts) if T.kind is OperatorKind.COMPOSITE else [T]


_UNDUAL = {
    OperatorKind.TA_DUAL: OperatorKind.TA,
    OperatorKind.TAA_DUAL: OperatorKind.TAA,
    OperatorKind.WQ_DUAL: OperatorKind.WQ,
}


def matrix_set_for(T: OperatorDescriptor, n: Ideal) -> HeckeMatrixSet:
    """The matrix realization of Ta(b), Comp[Taa(a),Ta(b)], Wq(q), Comp[Taa(m),Wq(q)] or Comp[Ta(p),Wq(q)]

    Plain and dual spellings name the same set.
    """
    unit = Ideal.unit(n.field)
    by_kind = {}
    for part in _parts(T):
        kind = _UNDUAL.get(part.kind, part.kind)
        if kind in by_kind or kind not in (OperatorKind.TA, OperatorKind.TAA, OperatorKind.WQ):
            raise PreconditionError(f"No matrix realization for {T}")
        by_kind[kind] = part.ideal
    ta, taa, wq = (by_kind.get(k) for k in (OperatorKind.TA, OperatorKind.TAA, OperatorKind.WQ))
    if taa is not None and not isinstance(taa, Ideal):
        raise PreconditionError(f"Scaling ideal {taa} must be integral")
    if wq is None and ta is not None:
        return hecke_matrices_index_b(taa or unit, ta, n)
    if wq is not None and ta is None:
        return wqm_matrix_set(wq, taa or unit, n)
    if wq is not None and ta is not None and taa is None:
        return tp_wq_matrices(ta, wq, n)
    raise PreconditionError(f"No matrix realization for {T}")


def cmd_hecke_matrices(args) -> int:
    field, level = _field_and_level(args)
    T = parse_operator(args.op, field)
    S = matrix_set_for(T, level)
    report = verify_sublattice_action(S, VerificationRunner(args.workers))
    _emit(matrix_set_document(S, report.results), args)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_apply(args) -> int:
    field, level = _field_and_level(args)
    T = parse_operator(args.op, field)
    points = [parse_point(p, level) for p in args.point]
    v = FormalSum(level, [(P, 1) for P in points])
    T.check(level, gamma1=any(isinstance(P, ModularPoint1) for P in points))
    result = evaluate(T, v, scaled=not args.unscaled)
    agreement = None
    if T.kind is OperatorKind.WQ:
        agreement = w_q(T.ideal, result, scaled=not args.unscaled) == t_aa(T.ideal, v, scaled=not args.unscaled)
    invalid = [P for P in result.points() if not validate(P)]
    for P in invalid:
        logger.error(f"{T} produced an invalid point {P}")
    _emit(formal_sum_document(result, descriptor=str(T), source=" + ".join(args.point), agreement=agreement), args)
    return EXIT_CHECK_FAILED if invalid or agreement is False else EXIT_OK


def cmd_verify(args) -> int:
    field, level = _field_and_level(args)
    names = suite_names(args.suite)
    ctx = RelationContext.build(field, level, prime_bound=args.bound, max_power=args.max_power)
    results = run_suites(ctx, ",".join(names), VerificationRunner(args.workers))
    _emit(verify_report_document(field, level, args.suite, results), args)
    return EXIT_OK if all_passed(results) else EXIT_CHECK_FAILED


def cmd_synthesize(args) -> int:
    field, level = _field_and_level(args)
    cg = class_group(field, level)
    lam = synthesize(args.seed, cg, level, args.bound, force_inner_twist=args.inner_twist)
    doc = eigensystem_set_document([lam], level, args.bound, inner_twists=len(inner_twists(lam)))
    _emit(doc, args)
    return EXIT_OK


def cmd_restrict(args) -> int:
    doc = read_document(args.input, EigensystemSetDocument)
    systems = eigensystems_from_document(doc)
    if not 0 <= args.index < len(systems):
        raise PreconditionError(f"Document holds {len(systems)} systems, index {args.index} requested")
    r = restrict_to_principal(systems[args.index], with_witnesses=not args.no_witnesses)
    logger.info(f"Restriction has {len(r.entries)} entries")
    _emit(restriction_document(r), args)
    return EXIT_OK


def cmd_recover(args) -> int:
    r = restriction_from_document(read_document(args.input, RestrictionDocument))
    systems = recover(r)
    twists = len(inner_twists(systems[0])) if systems else None
    _emit(eigensystem_set_document(systems, r.level, r.bound, inner_twists=twists), args)
    return EXIT_OK if systems else EXIT_CHECK_FAILED


# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="formal-hecke", description="Formal Hecke operators over imaginary quadratic fields")
    parser.add_argument("--log-level", default=None, help="Override FORMAL_HECKE_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="Write the document here instead of stdout")
    common.add_argument("--workers", type=int, default=None, help="Verification workers")

    fielded = argparse.ArgumentParser(add_help=False, parents=[common])
    fielded.add_argument("--d", type=int, required=True, help="Squarefree d for Q(sqrt(-d))")
    fielded.add_argument("--level", default=None, help="Level ideal literal, [a,b,c] or (g1,g2)")

    p = sub.add_parser("classgroup", parents=[fielded], help="Class group and representatives")
    p.set_defaults(func=cmd_classgroup)

    p = sub.add_parser("p1", parents=[fielded], help="M-symbols with SL2 lifts")
    p.set_defaults(func=cmd_p1, level_required=True)

    p = sub.add_parser("hecke-matrices", parents=[fielded], help="Matrix realization of a principal operator")
    p.add_argument("--op", required=True)
    p.set_defaults(func=cmd_hecke_matrices, level_required=True)

    p = sub.add_parser("apply", parents=[fielded], help="Apply an operator to modular points")
    p.add_argument("--op", required=True)
    p.add_argument("--point", action="append", required=True, help="std(i,j), std1(i,j) or a point literal")
    p.add_argument("--unscaled", action="store_true", help="Omit the norm factors")
    p.set_defaults(func=cmd_apply, level_required=True)

    p = sub.add_parser("verify", parents=[fielded], help="Run relation suites")
    p.add_argument("--suite", default="all")
    p.add_argument("--bound", type=int, default=13, help="Norm bound for the sample primes")
    p.add_argument("--max-power", type=int, default=3)
    p.set_defaults(func=cmd_verify, level_required=True)

    p = sub.add_parser("synthesize", parents=[fielded], help="Random eigensystem satisfying the Hecke relations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bound", type=int, default=60)
    p.add_argument("--inner-twist", action="store_true")
    p.set_defaults(func=cmd_synthesize, level_required=True)

    p = sub.add_parser("restrict", parents=[common], help="Principal restriction of an eigensystem document")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--no-witnesses", action="store_true")
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("recover", parents=[common], help="Eigensystems with a given principal restriction")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_recover)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "level_required", False) and not args.level:
        parser.error(f"{args.command} needs --level")
    try:
        return args.func(args)
    except FormalHeckeError as e:
        if settings.debug:
            logger.exception(f"{type(e).__name__}: {e.message}")
        else:
            logger.error(f"{type(e).__name__}: {e.message}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
