#!/usr/bin/env python3
"""
Versioned output documents
Every CLI result is a pydantic model written as indented JSON and read
back with model_validate_json
"""

import logging
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Type, TypeVar

from pydantic import BaseModel, ValidationError

from ..classgroup import ClassGroup
from ..cyclotomic import AdjoinedValue, CycValue, UnramifiedCharacter, Value
from ..eigsys import Eigensystem, PrincipalRestriction, RestrictionEntry
from ..errors import ParseError
from ..heckemat import HeckeMatrixSet
from ..ideals import Ideal
from ..modpts import FormalSum
from ..msym import enumerate_p1, lift_to_sl2
from ..qfield import FieldDesc, format_element
from ..verify_runner import CheckResult
from .literals import matrix_rows, parse_fractional_ideal, parse_ideal, parse_point

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

DocumentT = TypeVar("DocumentT", bound="Document")


class Document(BaseModel):
    schema_version: int = SCHEMA_VERSION
    kind: str
    d: int
    level: str


# exact values

class CycModel(BaseModel):
    m: int
    coeffs: List[str]


class AdjoinedTermModel(BaseModel):
    roots: List[int]  # indices into radicands
    coeff: CycModel


class ValueModel(BaseModel):
    cyc: Optional[CycModel] = None
    radicands: List[CycModel] = []
    terms: List[AdjoinedTermModel] = []


def _cyc_model(v: CycValue) -> CycModel:
    return CycModel(m=v.m, coeffs=[str(c) for c in v.coeffs])


def _cyc_value(m: CycModel) -> CycValue:
    return CycValue(m.m, tuple(Fraction(c) for c in m.coeffs))


def value_model(v: Value) -> ValueModel:
    if isinstance(v, CycValue):
        return ValueModel(cyc=_cyc_model(v))
    terms = [
        AdjoinedTermModel(roots=sorted(S), coeff=_cyc_model(v.terms[S]))
        for S in sorted(v.terms, key=lambda s: (len(s), sorted(s)))
    ]
    return ValueModel(radicands=[_cyc_model(r) for r in v.radicands], terms=terms)


def value_from_model(m: ValueModel) -> Value:
    if m.cyc is not None:
        return _cyc_value(m.cyc)
    return AdjoinedValue(
        [_cyc_value(r) for r in m.radicands],
        {frozenset(t.roots): _cyc_value(t.coeff) for t in m.terms},
    )


# class groups and P^1

class ClassGroupDocument(Document):
    kind: str = "classgroup"
    h: int
    structure: List[int]
    generators: List[str]
    reps_p: List[str]
    reps_q: List[str]


def classgroup_document(cg: ClassGroup) -> ClassGroupDocument:
    s = cg.summary()
    return ClassGroupDocument(
        d=cg.field.d,
        level=str(cg.level),
        h=s["h"],
        structure=s["structure"],
        generators=s["generators"],
        reps_p=s["reps_p"],
        reps_q=s["reps_q"],
    )


class SymbolModel(BaseModel):
    symbol: str
    lift: List[List[str]]


class P1Document(Document):
    kind: str = "p1"
    count: int
    symbols: List[SymbolModel]


def p1_document(n: Ideal) -> P1Document:
    symbols = [SymbolModel(symbol=str(s), lift=matrix_rows(lift_to_sl2(s))) for s in enumerate_p1(n)]
    return P1Document(d=n.field.d, level=str(n), count=len(symbols), symbols=symbols)


# matrix sets and verification

class CheckModel(BaseModel):
    name: str
    passed: bool
    detail: str = ""


def _check_models(results: Sequence[CheckResult]) -> List[CheckModel]:
    return [CheckModel(name=r.name, passed=r.passed, detail=r.detail) for r in results]


class MatrixSetDocument(Document):
    kind: str = "matrix_set"
    descriptor: str
    delta: str
    expected_count: int
    matrices: List[List[List[str]]]
    checks: List[CheckModel] = []


def matrix_set_document(S: HeckeMatrixSet, results: Sequence[CheckResult] = ()) -> MatrixSetDocument:
    return MatrixSetDocument(
        d=S.field.d,
        level=str(S.level),
        descriptor=str(S.descriptor),
        delta=format_element(S.delta),
        expected_count=S.expected_count,
        matrices=[matrix_rows(M) for M in S.matrices],
        checks=_check_models(results),
    )


class VerifyReportDocument(Document):
    kind: str = "verify_report"
    suite: str
    passed: bool
    total: int
    failed: int
    checks: List[CheckModel]


def verify_report_document(field: FieldDesc, level: Ideal, suite: str, results: Sequence[CheckResult]) -> VerifyReportDocument:
    failed = sum(1 for r in results if not r.passed)
    return VerifyReportDocument(
        d=field.d,
        level=str(level),
        suite=suite,
        passed=failed == 0,
        total=len(results),
        failed=failed,
        checks=_check_models(results),
    )


# formal sums

class TermModel(BaseModel):
    point: str
    coefficient: str


class FormalSumDocument(Document):
    kind: str = "formal_sum"
    descriptor: Optional[str] = None
    source: Optional[str] = None
    terms: List[TermModel]
    agreement: Optional[bool] = None  # set when a relation was checked alongside


def formal_sum_document(
    v: FormalSum,
    descriptor: Optional[str] = None,
    source: Optional[str] = None,
    agreement: Optional[bool] = None,
) -> FormalSumDocument:
    return FormalSumDocument(
        d=v.level.field.d,
        level=str(v.level),
        descriptor=descriptor,
        source=source,
        terms=[TermModel(point=str(P), coefficient=str(c)) for P, c in v],
        agreement=agreement,
    )


def formal_sum_from_document(doc: FormalSumDocument) -> FormalSum:
    level = parse_ideal(doc.level, FieldDesc(doc.d))
    try:
        terms = [(parse_point(t.point, level), Fraction(t.coefficient)) for t in doc.terms]
    except ValueError as e:
        raise ParseError(f"Bad coefficient in formal sum document: {e}")
    return FormalSum(level, terms)


# eigensystems

class PrimeValuesModel(BaseModel):
    prime: str
    values: List[ValueModel]


class EigensystemModel(BaseModel):
    chi_structure: List[int]
    chi_exponents: List[int]
    chi_conductor: int
    alpha: List[PrimeValuesModel]


class EigensystemSetDocument(Document):
    kind: str = "eigensystem_set"
    bound: int
    systems: List[EigensystemModel]
    inner_twists: Optional[int] = None


def _eigensystem_model(lam: Eigensystem) -> EigensystemModel:
    return EigensystemModel(
        chi_structure=list(lam.chi.structure),
        chi_exponents=list(lam.chi.exponents),
        chi_conductor=lam.chi.conductor,
        alpha=[
            PrimeValuesModel(prime=str(p), values=[value_model(v) for v in lam.alpha[p]])
            for p in lam.primes()
        ],
    )


def eigensystem_set_document(
    systems: Sequence[Eigensystem],
    level: Ideal,
    bound: int,
    inner_twists: Optional[int] = None,
) -> EigensystemSetDocument:
    return EigensystemSetDocument(
        d=level.field.d,
        level=str(level),
        bound=bound,
        systems=[_eigensystem_model(lam) for lam in systems],
        inner_twists=inner_twists,
    )


def eigensystems_from_document(doc: EigensystemSetDocument) -> List[Eigensystem]:
    field = FieldDesc(doc.d)
    level = parse_ideal(doc.level, field)
    out = []
    for m in doc.systems:
        chi = UnramifiedCharacter(tuple(m.chi_structure), tuple(m.chi_exponents), m.chi_conductor)
        alpha = {
            parse_ideal(pv.prime, field): tuple(value_from_model(v) for v in pv.values)
            for pv in m.alpha
        }
        out.append(Eigensystem(level, chi, alpha, doc.bound))
    return out


# principal restrictions

class RestrictionEntryModel(BaseModel):
    role: str
    descriptor: str
    a: str
    factors: List[str]
    value: ValueModel


class WitnessModel(BaseModel):
    square: ValueModel
    root: ValueModel


class RestrictionDocument(Document):
    kind: str = "restriction"
    bound: int
    entries: List[RestrictionEntryModel]
    witnesses: List[WitnessModel] = []


def restriction_document(r: PrincipalRestriction) -> RestrictionDocument:
    return RestrictionDocument(
        d=r.field.d,
        level=str(r.level),
        bound=r.bound,
        entries=[
            RestrictionEntryModel(
                role=e.role,
                descriptor=e.label(),
                a=str(e.a),
                factors=[str(b) for b in e.factors],
                value=value_model(e.value),
            )
            for e in r.entries
        ],
        witnesses=[WitnessModel(square=value_model(s), root=value_model(t)) for s, t in r.witnesses],
    )


def restriction_from_document(doc: RestrictionDocument) -> PrincipalRestriction:
    field = FieldDesc(doc.d)
    entries = [
        RestrictionEntry(
            e.role,
            parse_fractional_ideal(e.a, field),
            tuple(parse_ideal(b, field) for b in e.factors),
            value_from_model(e.value),
        )
        for e in doc.entries
    ]
    witnesses = [(value_from_model(w.square), value_from_model(w.root)) for w in doc.witnesses]
    return PrincipalRestriction(parse_ideal(doc.level, field), doc.bound, entries, witnesses)


# files

def dump_document(doc: Document) -> str:
    return doc.model_dump_json(indent=2)


def write_document(doc: Document, path: Optional[str] = None) -> str:
    """Serialize a document; write it to path when one is given"""
    text = dump_document(doc)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
        logger.info(f"Wrote {doc.kind} document to {path}")
    return text


def load_document(text: str, model: Type[DocumentT]) -> DocumentT:
    try:
        doc = model.model_validate_json(text)
    except ValidationError as e:
        raise ParseError(f"Invalid {model.__name__}: {e.error_count()} error(s)", {"errors": e.errors()})
    if doc.schema_version != SCHEMA_VERSION:
        raise ParseError(f"Unsupported schema version {doc.schema_version}")
    return doc


def read_document(path: str, model: Type[DocumentT]) -> DocumentT:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"Cannot read {path}: {e}")
    return load_document(text, model)
