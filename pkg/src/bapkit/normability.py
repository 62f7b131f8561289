"""Diagnostics separating graded norms from graded seminorms.

The central failure mode: a sequence that is Cauchy at a high level and
vanishes at a low level, yet stays bounded away from zero at a level in
between.  Finite data cannot prove a limit statement, so every verdict
here leans on closed-form certificates (geometric decay shapes, explicit
floors) that are re-verified against raw measured traces before a
violation is reported.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    CertificateFailureError,
    InputError,
    InsufficientDataError,
    UnboundedSeminormError,
)
from .polyhedral import graded_operator_norm
from .scalars import DEFAULT_TOLERANCES, RATIONAL, Tolerances, zero
from .seminorms import SeminormSystem, SupPartialSumSeminorms
from .spaces import vector_from_dense


def measure_trace(system: SeminormSystem, level: int, vectors) -> tuple:
    """Level values of a vector sequence, in order."""
    return tuple(system.value(level, x) for x in vectors)


def _leq(a, b, mode: str, slack: float = 1e-9) -> bool:
    if mode == RATIONAL:
        return a <= b
    return a <= b + slack * max(1.0, abs(a), abs(b))


def _close(a, b, mode: str, slack: float = 1e-9) -> bool:
    if mode == RATIONAL:
        return a == b
    return abs(a - b) <= slack * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class GeometricForm:
    """Closed-form trace shape: value(m) = scale * ratio**(m + shift)."""

    scale: object
    ratio: object
    shift: int = 0

    def value(self, m: int):
        return self.scale * self.ratio ** (m + self.shift)

    def is_decaying(self) -> bool:
        return 0 <= self.ratio < 1 and self.scale >= 0

    def dominates_trace(self, trace, indices, mode: str) -> bool:
        """Measured values never exceed the form at their indices."""
        return all(_leq(t, self.value(m), mode) for m, t in zip(indices, trace))


@dataclass(frozen=True)
class FloorCertificate:
    """Claim: every value of the trace at this level stays >= bound > 0."""

    level: int
    bound: object

    def verify(self, system: SeminormSystem, vectors) -> bool:
        if not self.bound > 0:
            return False
        trace = measure_trace(system, self.level, vectors)
        slack = 0 if system.mode == RATIONAL else 1e-9
        return all(v >= self.bound * (1 - slack) for v in trace)


@dataclass(frozen=True)
class CauchyFamily:
    """Vector sequence with a tail modulus at one level.

    modulus[i] = (l, bound) claims value(level, x_m - x_l) <= bound for
    every later member m; modulus_form, when present, is a decaying closed
    form dominating those bounds.
    """

    level: int
    vectors: tuple
    modulus: tuple
    modulus_form: GeometricForm | None = None

    @staticmethod
    def from_vectors(
        system: SeminormSystem, level: int, vectors, modulus_form: GeometricForm | None = None
    ) -> "CauchyFamily":
        vectors = tuple(vectors)
        system.check_level(level)
        modulus = []
        for li, xl in enumerate(vectors[:-1]):
            worst = zero(system.mode)
            for xm in vectors[li + 1 :]:
                v = system.value(level, xm - xl)
                if v > worst:
                    worst = v
            modulus.append((li, worst))
        return CauchyFamily(level, vectors, tuple(modulus), modulus_form)

    def verify_modulus(self, system: SeminormSystem) -> bool:
        """Re-measure every pair against the stored bounds."""
        bounds = dict(self.modulus)
        for li, xl in enumerate(self.vectors[:-1]):
            if li not in bounds:
                return False
            for xm in self.vectors[li + 1 :]:
                if not _leq(system.value(self.level, xm - xl), bounds[li], system.mode):
                    return False
        return True

    def modulus_decays(self, system: SeminormSystem, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        """Closed form wins when present; otherwise a tail threshold."""
        bounds = [b for _, b in self.modulus]
        if not bounds:
            return False
        if self.modulus_form is not None:
            if not self.modulus_form.is_decaying():
                return False
            indices = [li for li, _ in self.modulus]
            return self.modulus_form.dominates_trace(bounds, indices, system.mode)
        first, last = bounds[0], bounds[-1]
        if first == 0:
            return all(b == 0 for b in bounds)
        if system.mode == RATIONAL:
            return last <= first * Fraction(1, 10**6)
        return last <= first * tol.decay


@dataclass(frozen=True)
class DiagnosticVerdict:
    """Outcome of a diagnostic: 'violated' or 'consistent', with a reason."""

    verdict: str
    reason: str
    details: tuple = ()

    @property
    def violated(self) -> bool:
        return self.verdict == "violated"


def injective_extension_test(
    system: SeminormSystem,
    family: CauchyFamily,
    decay_level: int,
    decay_form: GeometricForm,
    floor: FloorCertificate | None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> DiagnosticVerdict:
    """Detect a Cauchy-and-vanishing sequence pinned above a floor.

    A 'violated' verdict needs all three certified legs, each re-verified
    on raw traces: a decaying Cauchy modulus at the family's level, decay
    at decay_level dominated by a decaying closed form, and a positive
    floor at a level strictly between the two.  Certificates that fail
    re-verification raise instead of silently flipping the verdict.
    """
    if len(family.vectors) < 3:
        raise InsufficientDataError("need at least three family members")
    system.check_level(decay_level)
    system.check_level(family.level)
    if floor is not None:
        system.check_level(floor.level)
        if not decay_level < floor.level <= family.level:
            raise InputError(
                f"levels must satisfy decay {decay_level} < floor {floor.level}"
                f" <= family {family.level}"
            )
    if floor is None:
        return DiagnosticVerdict(
            "consistent", "no floor certificate supplied, no violation demonstrable"
        )
    if not family.verify_modulus(system):
        raise CertificateFailureError("Cauchy modulus does not match the raw pair traces")
    if not family.modulus_decays(system, tol):
        return DiagnosticVerdict(
            "consistent", f"tail modulus at level {family.level} not certified decaying"
        )
    decay_trace = measure_trace(system, decay_level, family.vectors)
    if not decay_form.is_decaying():
        return DiagnosticVerdict(
            "consistent", f"decay form at level {decay_level} has ratio >= 1"
        )
    indices = list(range(1, len(family.vectors) + 1))
    if not decay_form.dominates_trace(decay_trace, indices, system.mode):
        raise CertificateFailureError(
            f"decay form does not dominate the raw trace at level {decay_level}"
        )
    if not floor.verify(system, family.vectors):
        raise CertificateFailureError(
            f"floor {floor.bound} fails against the raw trace at level {floor.level}"
        )
    return DiagnosticVerdict(
        "violated",
        f"family Cauchy at level {family.level} and vanishing at level {decay_level}"
        f" stays >= {floor.bound} at level {floor.level}",
        details=(
            ("cauchy_level", family.level),
            ("decay_level", decay_level),
            ("floor_level", floor.level),
            ("floor_bound", floor.bound),
        ),
    )


@dataclass(frozen=True)
class VanishingEvidence:
    """One observed family for the dominated-vanishing diagnostic."""

    family: CauchyFamily
    decay_form: GeometricForm
    floor: FloorCertificate | None = None


def dv_condition_check(
    system: SeminormSystem,
    comparison_levels,
    base_level: int,
    evidence,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> DiagnosticVerdict:
    """Check the level-comparison condition against observed families.

    comparison_levels maps each tested level k to its j(k) > k >= base
    level; a family bounded (Cauchy) at j(k) and vanishing at the base
    level must not carry a verified floor at k.  Empty evidence is
    vacuously consistent and flagged as such.
    """
    system.check_level(base_level)
    if callable(comparison_levels):
        j_of = comparison_levels
    else:
        for k, j in comparison_levels.items():
            if not (isinstance(k, int) and isinstance(j, int) and j > k >= base_level):
                raise InputError(
                    f"comparison levels must satisfy j(k) > k >= {base_level},"
                    f" got j({k})={j}"
                )
        j_of = lambda k: comparison_levels[k]
    items = list(evidence)
    if not items:
        return DiagnosticVerdict("consistent", "no evidence", details=(("evidence", 0),))
    for item in items:
        if item.floor is None:
            continue
        k = item.floor.level
        try:
            j = j_of(k)
        except KeyError:
            raise InputError(f"no comparison level declared for level {k}")
        if not (isinstance(j, int) and j > k >= base_level):
            raise InputError(
                f"comparison levels must satisfy j(k) > k >= {base_level}, got j({k})={j}"
            )
        if item.family.level != j:
            raise InputError(
                f"evidence family sits at level {item.family.level}, expected j({k})={j}"
            )
        sub = injective_extension_test(
            system, item.family, base_level, item.decay_form, item.floor, tol
        )
        if sub.violated:
            return DiagnosticVerdict(
                "violated",
                f"level {k} with comparison level {j}: " + sub.reason,
                details=sub.details + (("tested_level", k), ("comparison_level", j)),
            )
    return DiagnosticVerdict(
        "consistent",
        f"no certified violation among {len(items)} families",
        details=(("evidence", len(items)),),
    )


@dataclass(frozen=True)
class NormedBasisReport:
    """Sup-partial-sum norms built from a biorthogonal rank-one family."""

    system: SupPartialSumSeminorms
    comparisons: tuple  # (level, comparison_level, constant)
    sample_count: int
    passed: bool


def _biorthogonal(operators, tol: Tolerances) -> bool:
    for i, a in enumerate(operators):
        for j, b in enumerate(operators):
            prod = a.compose(b)
            target = a if i == j else a.scale(0)
            if not prod.approx_equal(target, tol):
                return False
    return True


def basis_sup_norms(
    base: SeminormSystem,
    operators,
    rng: random.Random | None = None,
    sample_count: int = 20,
    tol: Tolerances = DEFAULT_TOLERANCES,
    cap: int = 200_000,
) -> NormedBasisReport:
    """Upgrade a graded system along a basis-like family of projections.

    Requires every operator to have rank one and the family to be exactly
    biorthogonal (A_i A_j = A_i when i = j, zero otherwise).  The returned
    system takes, at each level, the max of the base value over running
    partial sums of the family.  Constants compare it back to the base:
    an exact graded norm of every prefix against the smallest workable
    comparison level, then sampled two-sided checks.
    """
    ops = tuple(operators)
    if not ops:
        raise InputError("need at least one operator")
    for op in ops:
        if op.rank != 1:
            raise InputError(f"operator {op.label or '?'} must have rank one")
    if not _biorthogonal(ops, tol):
        raise InputError("family is not biorthogonal")
    sup_system = SupPartialSumSeminorms(base, ops)
    prefix = []
    acc = None
    for op in ops:
        acc = op if acc is None else acc + op
        prefix.append(acc)
    total = prefix[-1]
    comparisons = []
    for k in range(1, base.level_count + 1):
        found = None
        for l in range(k, base.level_count + 1):
            try:
                norms = [graded_operator_norm(base, k, l, P, cap=cap) for P in prefix]
            except UnboundedSeminormError:
                continue
            found = (l, max(norms))
            break
        if found is None:
            raise UnboundedSeminormError(
                f"no comparison level controls the partial sums at level {k}"
            )
        comparisons.append((k, found[0], found[1]))
    rng = rng or random.Random(0)
    mode = base.mode
    passed = True
    for _ in range(sample_count):
        dense = []
        for _ in range(base.box.dimension):
            if mode == RATIONAL:
                dense.append(Fraction(rng.randint(-6, 6), rng.randint(1, 4)))
            else:
                dense.append(rng.gauss(0.0, 1.0))
        y = vector_from_dense(base.box, mode, dense)
        for k, l, c in comparisons:
            sup_val = sup_system.value(k, y)
            base_total = base.value(k, total.apply(y))
            if not _leq(base_total, sup_val, mode):
                passed = False
            if not _leq(sup_val, c * base.value(l, y), mode):
                passed = False
            for op in ops:
                if not _leq(base.value(k, op.apply(y)), 2 * sup_val, mode):
                    passed = False
        if not _leq(base.value(1, ops[0].apply(y)), sup_system.value(1, y), mode):
            passed = False
    return NormedBasisReport(
        system=sup_system,
        comparisons=tuple(comparisons),
        sample_count=sample_count,
        passed=passed,
    )
