"""Representability decision procedure and certificates.

decide() classifies a structure: invalid tables, a schema violation with a
replayable two-sided derivation witness, or a verified representation.  The
schema is checked on the structure itself; the representation is then built
over the identity-adjoined extension and verified directly, so a hypothetical
failure of the construction surfaces as an internal error rather than a wrong
certificate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import CertificateError, DerivationError, FormatError
from .predicates import (
    BlackFact,
    Derivation,
    PredicateFixpoint,
    TriFact,
    check_derivation,
    compute_fixpoint,
    derivation_from_obj,
    derivation_to_obj,
    explain,
    sigma_min_violated_stage,
    sigma_violation,
)
from .repbuilder import (
    Representation,
    _represent_checked_fixpoints,
    parse_representation,
    representation_to_obj,
    verify,
)
from .structure import (
    Diagnostics,
    FinStructure,
    structure_from_obj,
    structure_to_obj,
    validate,
)

__all__ = [
    "Representable",
    "NotRepresentable",
    "InvalidStructure",
    "Certificate",
    "check_sigma",
    "min_sigma_stage",
    "decide",
    "certificate_to_obj",
    "certificate_to_json",
    "load_certificate",
]


@dataclass(frozen=True)
class Representable:
    representation: Representation

    status = "representable"


@dataclass(frozen=True)
class NotRepresentable:
    """Witness pair (a, b): b is forced below a in domain, a forced inside b
    on dom(b), yet a <= b fails.  Both derivations replay against the bare
    structure tables."""

    a: int
    b: int
    min_violated_stage: int
    black_derivation: Derivation
    tri_derivation: Derivation

    status = "not_representable"


@dataclass(frozen=True)
class InvalidStructure:
    diagnostics: Diagnostics

    status = "invalid_structure"


Certificate = Representable | NotRepresentable | InvalidStructure


def _check_fixpoint_source(s: FinStructure, f: PredicateFixpoint):
    if f.structure is not s and f.structure != s:
        raise ValueError("fixpoint was not computed from this structure")


def check_sigma(s: FinStructure, f: PredicateFixpoint) -> tuple[int, int] | None:
    """None iff the schema holds; otherwise the first violating pair (a, b)."""
    _check_fixpoint_source(s, f)
    return sigma_violation(f)


def min_sigma_stage(s: FinStructure, f: PredicateFixpoint) -> int | None:
    """Least stage whose schema instance is violated, None when all hold."""
    _check_fixpoint_source(s, f)
    return sigma_min_violated_stage(f)


def decide(s: FinStructure, engine: str | None = None) -> Certificate:
    diag = validate(s)
    if not diag.is_valid:
        return InvalidStructure(diag)
    f = compute_fixpoint(s, engine=engine)
    viol = sigma_violation(f)
    if viol is not None:
        a, b = viol
        stage = sigma_min_violated_stage(f)
        black_d = explain(f, BlackFact(b, a))
        tri_d = explain(f, TriFact(b, a, b))
        return NotRepresentable(a, b, stage, black_d, tri_d)
    rep = _represent_checked_fixpoints(s, engine=engine)
    report = verify(s, rep)
    if not report.passed:
        raise RuntimeError(
            "internal error: constructed representation failed verification: "
            f"{report.failures[:3]}"
        )
    return Representable(rep)


def certificate_to_obj(s: FinStructure, cert: Certificate) -> dict:
    obj = {"status": cert.status, "structure": structure_to_obj(s)}
    if isinstance(cert, Representable):
        obj["representation"] = representation_to_obj(cert.representation)
    elif isinstance(cert, NotRepresentable):
        obj["witness"] = {"a": s.elements[cert.a], "b": s.elements[cert.b]}
        obj["min_violated_stage"] = cert.min_violated_stage
        obj["black_derivation"] = derivation_to_obj(s, cert.black_derivation)
        obj["tri_derivation"] = derivation_to_obj(s, cert.tri_derivation)
    elif isinstance(cert, InvalidStructure):
        d = cert.diagnostics
        obj["diagnostics"] = {
            "status": d.status,
            "witness": list(d.witness) if d.witness else None,
            "detail": d.detail,
        }
    else:
        raise TypeError(f"not a certificate: {cert!r}")
    return obj


def certificate_to_json(s: FinStructure, cert: Certificate) -> str:
    return json.dumps(certificate_to_obj(s, cert), indent=2) + "\n"


def _revalidate_invalid(s: FinStructure, diag_obj) -> Diagnostics:
    status = diag_obj.get("status")
    witness = diag_obj.get("witness")
    detail = diag_obj.get("detail", "")
    if status not in ("not_partial_order", "not_associative"):
        raise CertificateError(f"bad diagnostics status: {status!r}")
    if not witness:
        raise CertificateError("invalid-structure certificate carries no witness")
    idx = [s.index(w) for w in witness]
    leq, comp = s.leq, s.comp
    ok = False
    if detail == "reflexivity" and len(idx) == 2:
        ok = not leq[idx[0], idx[0]]
    elif detail == "antisymmetry" and len(idx) == 2:
        a, b = idx
        ok = a != b and leq[a, b] and leq[b, a]
    elif detail == "transitivity" and len(idx) == 3:
        a, b, c = idx
        ok = leq[a, b] and leq[b, c] and not leq[a, c]
    elif detail == "associativity" and len(idx) == 3:
        a, b, c = idx
        ok = comp[comp[a, b], c] != comp[a, comp[b, c]]
    if not ok:
        raise CertificateError("diagnostics witness does not re-check against the structure")
    return Diagnostics(status, tuple(witness), detail)


def load_certificate(text: str) -> tuple[FinStructure, Certificate]:
    """Parse a certificate and re-validate it against its embedded structure.

    Representable certificates are re-verified; non-representability
    witnesses are replayed and checked to be actual schema violations;
    invalid-structure diagnostics are re-checked.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or "status" not in obj or "structure" not in obj:
        raise FormatError('certificate must carry "status" and "structure"')
    s = structure_from_obj(obj["structure"])
    status = obj["status"]
    if status == "representable":
        rep = parse_representation(json.dumps(obj["representation"]), s)
        report = verify(s, rep)
        if not report.passed:
            raise CertificateError(
                f"representation does not verify: {report.failures[:3]}"
            )
        return s, Representable(rep)
    if status == "not_representable":
        wit = obj.get("witness", {})
        a = s.index(wit["a"])
        b = s.index(wit["b"])
        if s.leq[a, b]:
            raise CertificateError("witness pair is ordered; schema is not violated")
        black_d = derivation_from_obj(s, obj["black_derivation"])
        tri_d = derivation_from_obj(s, obj["tri_derivation"])
        if black_d.fact != BlackFact(b, a):
            raise CertificateError("domain-inclusion derivation proves the wrong fact")
        if tri_d.fact != TriFact(b, a, b):
            raise CertificateError("restricted-inclusion derivation proves the wrong fact")
        try:
            check_derivation(s, black_d)
            check_derivation(s, tri_d)
        except DerivationError as exc:
            raise CertificateError(f"derivation replay failed: {exc}") from None
        stage = obj.get("min_violated_stage")
        if not isinstance(stage, int) or stage < 0:
            raise CertificateError("missing or bad min_violated_stage")
        return s, NotRepresentable(a, b, stage, black_d, tri_d)
    if status == "invalid_structure":
        diag = _revalidate_invalid(s, obj.get("diagnostics", {}))
        return s, InvalidStructure(diag)
    raise FormatError(f"unknown certificate status: {status!r}")
