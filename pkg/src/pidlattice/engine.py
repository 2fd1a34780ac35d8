"""Decomposition engine: turn measure values into information atoms.

Redundancy values are cumulative sums of atoms downward in the redundancy
order and weak-synergy values cumulative sums upward in the synergy order;
both invert by recursive descent.  Union and vulnerable information are
complements of those two against the total information, and each partner
concept reads its base concept's value at the partner-mapped antichain, so
every concept funnels into one of the two inversions (or, for unique
information, directly into single atoms).

Externally supplied measures are screened first: the single-collection
boundary identities (self-redundancy and friends) must hold to 1e-7 or the
engine refuses to invert.  A passing preflight does not certify the
summation identities at the 1e-9 reporting tolerance; measures that are
internally consistent (the reference family, or tables generated from an
atom vector) reproduce exactly, noisy files reproduce at their own noise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .concepts import (
    REFERENCE_MEASURE_NAME,
    BaseConcept,
    MeasureAssignment,
    domain_for_concept,
    load_measure,
    reference_measure,
    selection_mask,
    summate,
)
from .distributions import JointDistribution, mi_table
from .errors import (
    CompletenessError,
    DomainError,
    MeasureInconsistencyError,
    ParseError,
    ValidationError,
)
from .lattices import (
    Antichain,
    ParthoodDistribution,
    _invert_cumulative,
    collection_label,
    downward_closure,
    enumerate_parthood_distributions,
    maximal_non_supersets,
    minimal_non_subsets,
    parse_antichain_label,
    parse_collection_label,
    parthood_from_antichain,
    parthood_from_synergy_antichain,
    source_mask,
    antichain_from_parthood,
    synergy_antichain_from_parthood,
)

ENGINE_TOL = 1e-9
PREFLIGHT_TOL = 1e-7


@dataclass(frozen=True)
class PidMeta:
    concept: str
    measure: str
    digest: str


@dataclass(frozen=True)
class PidResult:
    """A full decomposition: one value per parthood distribution."""

    n: int
    atoms: Mapping[ParthoodDistribution, float]
    meta: PidMeta
    mi: Mapping[int, float]

    @classmethod
    def build(
        cls,
        n: int,
        atoms: Mapping[ParthoodDistribution, float],
        meta: PidMeta,
        mi: Mapping[int, float],
    ) -> "PidResult":
        """Construct after checking the atoms reproduce every MI value."""
        expected_keys = enumerate_parthood_distributions(n)
        if set(atoms) != set(expected_keys):
            raise CompletenessError("atom table does not cover all parthood distributions")
        ordered = {f: float(atoms[f]) for f in expected_keys}
        result = cls(n=n, atoms=ordered, meta=meta, mi=dict(mi))
        report = verify_consistency(result)
        if not report.passed:
            raise MeasureInconsistencyError(
                "atoms do not reproduce mutual information at "
                f"{report.worst_label}: error {report.worst_error:.3e} > {ENGINE_TOL}"
            )
        return result


@dataclass(frozen=True)
class ConsistencyReport:
    n: int
    tolerance: float
    worst_label: str
    worst_error: float
    errors: Mapping[str, float]
    passed: bool


def verify_consistency(result: PidResult, dist: JointDistribution | None = None) -> ConsistencyReport:
    """Check that atoms marked at each collection sum to its mutual information.

    With a distribution the MI values are recomputed from it; otherwise the
    table stored on the result is used.
    """
    if dist is not None:
        if dist.n != result.n:
            raise ValidationError("distribution and result disagree on source count")
        expected = mi_table(dist)
    else:
        expected = dict(result.mi)
    tables = np.array([f.table for f in result.atoms], dtype=np.uint64)
    values = np.array(list(result.atoms.values()), dtype=np.float64)
    errors = {}
    worst_label, worst = "", 0.0
    for bits in range(1 << result.n):
        marked = ((tables >> np.uint64(bits)) & np.uint64(1)) == 1
        got = float(values[marked].sum())
        err = abs(got - expected[bits])
        label = collection_label(bits)
        errors[label] = err
        if err >= worst:
            worst_label, worst = label, err
    return ConsistencyReport(
        n=result.n,
        tolerance=ENGINE_TOL,
        worst_label=worst_label,
        worst_error=worst,
        errors=errors,
        passed=worst <= ENGINE_TOL,
    )


def _check_completeness(concept: BaseConcept, n: int, values: Mapping[Antichain, float]) -> None:
    domain = domain_for_concept(concept, n)
    missing = [a.label() for a in domain if a not in values]
    if missing:
        raise CompletenessError(
            f"{concept.tag} values missing for: {', '.join(missing[:5])}"
            + (" ..." if len(missing) > 5 else "")
        )
    domain_set = set(domain)
    extra = [a.label() for a in values if a not in domain_set]
    if extra:
        raise CompletenessError(
            f"{concept.tag} values outside the domain: {', '.join(extra[:5])}"
        )


def _preflight_boundary(
    concept: BaseConcept, n: int, values: Mapping[Antichain, float], mi: Mapping[int, float]
) -> None:
    """Refuse to invert when a single-collection identity is violated."""
    total = mi[source_mask(n)]
    checks: list[tuple[Antichain, float, str]] = []
    for alpha in domain_for_concept(concept, n):
        if len(alpha.collections) != 1:
            continue
        a = alpha.collections[0].bits
        if concept in (BaseConcept.REDUNDANCY, BaseConcept.UNION):
            checks.append((alpha, mi[a], f"self-{concept.tag} identity"))
        elif concept in (BaseConcept.WEAK_SYNERGY, BaseConcept.VULNERABLE):
            checks.append((alpha, total - mi[a], f"self-{concept.tag} identity"))
    for alpha, want, name in checks:
        got = float(values[alpha])
        if abs(got - want) > PREFLIGHT_TOL:
            raise MeasureInconsistencyError(
                f"{name} violated at {alpha.label()}: value {got!r} vs expected {want!r} "
                f"(tolerance {PREFLIGHT_TOL})"
            )


_SOLVE_REMAP: dict[BaseConcept, tuple[BaseConcept, Callable[[Antichain], Antichain]]] = {
    # base_value(alpha) = supplied_value(mapper(alpha)) over the base domain
    BaseConcept.RESTRICTED: (BaseConcept.WEAK_SYNERGY, minimal_non_subsets),
    BaseConcept.REDUNDANCY_PARTNER: (BaseConcept.REDUNDANCY, maximal_non_supersets),
    BaseConcept.UNION_PARTNER: (BaseConcept.UNION, minimal_non_subsets),
    BaseConcept.VULNERABLE_PARTNER: (BaseConcept.VULNERABLE, maximal_non_supersets),
}


def solve_concept(
    n: int,
    concept: BaseConcept,
    values: Mapping[Antichain, float],
    mi: Mapping[int, float],
) -> dict[ParthoodDistribution, float]:
    """Invert one concept's measure values into atoms.

    ``mi`` must give the mutual information for every collection bitmask;
    only the total enters the union/vulnerable complements, the rest feeds
    the preflight identities.
    """
    _check_completeness(concept, n, values)
    total = mi[source_mask(n)]

    if concept in _SOLVE_REMAP:
        base, mapper = _SOLVE_REMAP[concept]
        values = {alpha: values[mapper(alpha)] for alpha in domain_for_concept(base, n)}
        concept = base

    _preflight_boundary(concept, n, values, mi)

    if concept is BaseConcept.UNION:
        ws = {}
        for alpha in domain_for_concept(BaseConcept.WEAK_SYNERGY, n):
            if alpha.is_empty_collection_chain:
                ws[alpha] = total
            else:
                ws[alpha] = total - values[alpha]
        values, concept = ws, BaseConcept.WEAK_SYNERGY
    elif concept is BaseConcept.VULNERABLE:
        red = {}
        for alpha in domain_for_concept(BaseConcept.REDUNDANCY, n):
            if alpha.is_full_collection_chain:
                red[alpha] = total
            else:
                red[alpha] = total - values[alpha]
        values, concept = red, BaseConcept.REDUNDANCY

    if concept is BaseConcept.UNIQUE:
        return {
            parthood_from_antichain(alpha): float(values[alpha])
            for alpha in domain_for_concept(concept, n)
        }
    if concept is BaseConcept.UNIQUE_PARTNER:
        return {
            parthood_from_synergy_antichain(alpha): float(values[alpha])
            for alpha in domain_for_concept(concept, n)
        }

    if concept is BaseConcept.REDUNDANCY:
        domain = domain_for_concept(concept, n)
        keys = [parthood_from_antichain(alpha) for alpha in domain]
        supersets = True  # value at alpha sums atoms at or below in the redundancy order
    elif concept is BaseConcept.WEAK_SYNERGY:
        domain = domain_for_concept(concept, n)
        keys = [parthood_from_synergy_antichain(alpha) for alpha in domain]
        supersets = False  # value at alpha sums atoms at or above in the synergy order
    else:
        raise DomainError(f"unknown concept {concept!r}")

    tables = [f.table for f in keys]
    vals = [float(values[alpha]) for alpha in domain]
    pi = _invert_cumulative(tables, vals, supersets)
    return {f: pi[i] for i, f in enumerate(keys)}


def decompose(
    dist: JointDistribution,
    concept: BaseConcept,
    measure: str | MeasureAssignment = "reference",
) -> PidResult:
    """Decompose the distribution's total information into atoms.

    ``measure`` is the string ``"reference"``, a MeasureAssignment, or a
    path to a measure file for the same concept.
    """
    mi = mi_table(dist)
    if isinstance(measure, str) and measure == "reference":
        measure_name = REFERENCE_MEASURE_NAME
        if concept in (BaseConcept.UNIQUE, BaseConcept.UNIQUE_PARTNER):
            # The reference family defines unique information as the atoms of
            # the reference redundancy decomposition.
            atoms = solve_concept(
                dist.n,
                BaseConcept.REDUNDANCY,
                reference_measure(dist, BaseConcept.REDUNDANCY).values,
                mi,
            )
            meta = PidMeta(concept=concept.tag, measure=measure_name, digest=dist.digest())
            return PidResult.build(dist.n, atoms, meta, mi)
        assignment = reference_measure(dist, concept)
    elif isinstance(measure, MeasureAssignment):
        assignment = measure
        measure_name = "supplied"
    else:
        assignment = load_measure(measure, dist.n)
        measure_name = f"file:{str(measure).rsplit('/', 1)[-1]}"
    if assignment.concept is not concept:
        raise ValidationError(
            f"measure is for {assignment.concept.tag!r}, decomposition asked for {concept.tag!r}"
        )
    if assignment.n != dist.n:
        raise ValidationError("measure and distribution disagree on source count")
    atoms = solve_concept(dist.n, concept, assignment.values, mi)
    meta = PidMeta(concept=concept.tag, measure=measure_name, digest=dist.digest())
    return PidResult.build(dist.n, atoms, meta, mi)


def measure_table_from_atoms(
    concept: BaseConcept, n: int, atoms: Mapping[ParthoodDistribution, float]
) -> MeasureAssignment:
    """Evaluate a concept over its whole domain from an atom vector."""
    tables = np.array([f.table for f in atoms], dtype=np.uint64)
    values = np.array([float(v) for v in atoms.values()], dtype=np.float64)
    out = {}
    for alpha in domain_for_concept(concept, n):
        out[alpha] = float(values[selection_mask(concept, alpha, tables)].sum())
    return MeasureAssignment(concept, n, out)


def derived_measure_table(result: PidResult) -> dict[tuple[BaseConcept, Antichain], float]:
    """All ten concepts evaluated over their domains from the result's atoms."""
    out = {}
    for concept in BaseConcept:
        table = measure_table_from_atoms(concept, result.n, result.atoms)
        for alpha, v in table.values.items():
            out[(concept, alpha)] = v
    return out


@dataclass(frozen=True)
class InclusionExclusionReport:
    alpha: Antichain
    union_value: float
    alternating_sum: float
    error: float
    tolerance: float
    passed: bool


def inclusion_exclusion_check(result: PidResult, alpha: Antichain) -> InclusionExclusionReport:
    """Union information vs the alternating redundancy sum over subsets of alpha."""
    if alpha not in set(domain_for_concept(BaseConcept.UNION, result.n)):
        raise DomainError(f"antichain {alpha.label()!r} outside the union domain")
    union_value = summate(BaseConcept.UNION, alpha, result)
    members = alpha.collections
    acc = 0.0
    for pick in range(1, 1 << len(members)):
        subset = [members[i] for i in range(len(members)) if (pick >> i) & 1]
        sign = -1.0 if subset and len(subset) % 2 == 0 else 1.0
        acc += sign * summate(BaseConcept.REDUNDANCY, Antichain(result.n, tuple(subset)), result)
    tol = ENGINE_TOL * (1 << len(members))
    err = abs(union_value - acc)
    return InclusionExclusionReport(
        alpha=alpha,
        union_value=union_value,
        alternating_sum=acc,
        error=err,
        tolerance=tol,
        passed=err <= tol,
    )


def proper_synergy_values(result: PidResult, alpha: Antichain) -> float:
    """Sum of atoms first reachable at exactly the union of alpha's collections.

    Collects atoms marking the union while marking no proper subset of it.
    Depends on alpha only through the union.  The empty union is rejected:
    the value there is identically zero by the parthood axioms, so asking
    for it is almost surely a mistake.
    """
    if alpha.n != result.n:
        raise DomainError("antichain and result disagree on source count")
    union = 0
    for m in alpha.masks:
        union |= m
    if union == 0:
        raise DomainError(
            "proper synergy at an empty union is identically zero by the parthood "
            "axioms; supply a non-empty union"
        )
    strict_down = downward_closure(result.n, (union,)) & ~(1 << union)
    acc = 0.0
    for f, v in result.atoms.items():
        if (f.table >> union) & 1 and f.table & strict_down == 0:
            acc += v
    return acc


@dataclass(frozen=True)
class RankAnalysis:
    n: int
    unknowns: int
    consistency_rank: int
    combined_rank: int
    novel_constraints: int
    deficit: int


def _exact_rank(rows: list[list[int]]) -> int:
    """Rank over the rationals by fraction-free integer elimination."""
    mat = [list(r) for r in rows if any(r)]
    rank = 0
    col_count = len(rows[0]) if rows else 0
    col = 0
    while mat and col < col_count:
        pivot_row = None
        for i, r in enumerate(mat):
            if r[col]:
                pivot_row = i
                break
        if pivot_row is None:
            col += 1
            continue
        pivot = mat.pop(pivot_row)
        p = pivot[col]
        reduced = []
        for r in mat:
            if r[col]:
                f = r[col]
                r = [rv * p - pv * f for rv, pv in zip(r, pivot)]
                g = math.gcd(*(abs(x) for x in r)) or 1
                r = [x // g for x in r]
            if any(r):
                reduced.append(r)
        mat = reduced
        rank += 1
        col += 1
    return rank


def proper_synergy_rank_analysis(n: int) -> RankAnalysis:
    """How far proper synergy constraints go toward pinning down the atoms.

    Builds the linear system whose unknowns are the atoms: one consistency
    row per non-empty collection (atoms marking it sum to its MI) and one
    proper-synergy row per non-empty union.  Ranks are computed exactly in
    integer arithmetic.
    """
    atoms = enumerate_parthood_distributions(n)
    unknowns = len(atoms)
    consistency_rows = []
    for bits in range(1, 1 << n):
        consistency_rows.append([(f.table >> bits) & 1 for f in atoms])
    synergy_rows = []
    for union in range(1, 1 << n):
        strict_down = downward_closure(n, (union,)) & ~(1 << union)
        synergy_rows.append(
            [1 if (f.table >> union) & 1 and f.table & strict_down == 0 else 0 for f in atoms]
        )
    consistency_rank = _exact_rank(consistency_rows)
    combined_rank = _exact_rank(consistency_rows + synergy_rows)
    return RankAnalysis(
        n=n,
        unknowns=unknowns,
        consistency_rank=consistency_rank,
        combined_rank=combined_rank,
        novel_constraints=combined_rank - consistency_rank,
        deficit=unknowns - combined_rank,
    )


def export_result(result: PidResult) -> dict:
    """JSON-ready form: atoms carry both antichain labelings, sorted by the
    access label; the MI table rides along so files can be re-verified."""
    mi_obj = {
        collection_label(bits): result.mi[bits]
        for bits in sorted(result.mi, key=lambda b: (b.bit_count(), b))
    }
    rows = []
    for f, v in result.atoms.items():
        rows.append(
            {
                "alpha": antichain_from_parthood(f).label(),
                "alpha_tilde": synergy_antichain_from_parthood(f).label(),
                "value": v,
            }
        )
    rows.sort(key=lambda r: r["alpha"])
    return {
        "n": result.n,
        "concept": result.meta.concept,
        "measure": result.meta.measure,
        "distribution_digest": result.meta.digest,
        "mi": mi_obj,
        "atoms": rows,
    }


def save_result(result: PidResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(export_result(result), fh, indent=2)
        fh.write("\n")


def load_result(path) -> PidResult:
    """Read a result file back; the stored MI table is trusted as-is."""
    try:
        doc = json.loads(open(path, "r", encoding="utf-8").read())
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON in result file: {exc}") from None
    for key in ("n", "concept", "measure", "distribution_digest", "mi", "atoms"):
        if key not in doc:
            raise ParseError(f"result file missing field {key!r}")
    n = doc["n"]
    if not isinstance(n, int):
        raise ParseError("field 'n' must be an int")
    mi = {}
    for label, v in doc["mi"].items():
        mi[parse_collection_label(label, n)] = float(v)
    if set(mi) != set(range(1 << n)):
        raise ParseError("result file's MI table does not cover all collections")
    atoms = {}
    for row in doc["atoms"]:
        alpha = parse_antichain_label(row["alpha"], n)
        f = parthood_from_antichain(alpha)
        expect_tilde = synergy_antichain_from_parthood(f).label()
        if row.get("alpha_tilde") != expect_tilde:
            raise ParseError(
                f"atom {row['alpha']!r} pairs with {expect_tilde!r}, file says "
                f"{row.get('alpha_tilde')!r}"
            )
        if f in atoms:
            raise ParseError(f"duplicate atom {row['alpha']!r}")
        atoms[f] = float(row["value"])
    meta = PidMeta(
        concept=doc["concept"], measure=doc["measure"], digest=doc["distribution_digest"]
    )
    ordered = {f: atoms[f] for f in enumerate_parthood_distributions(n) if f in atoms}
    if len(ordered) != len(enumerate_parthood_distributions(n)):
        raise ParseError("result file does not cover all atoms")
    return PidResult(n=n, atoms=ordered, meta=meta, mi=mi)
