"""Embedding a graded space into the span of a rank-one schedule.

Elements of the target space assign one coefficient to each schedule slot;
the graded values there take the max over partial sums of the coefficient
components.  The embedding I sends x to (schedule operator applied to x)
per slot, the projection L resums and re-embeds.  The certificate couples
the two gradings: value(k, x) <= |||I(x)|||_k <= 5 * M_k * value(l(k), x)
with M_k an exact graded operator norm over the family's partial sums.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    CertificateFailureError,
    ConstructionSoundnessError,
    InputError,
    LevelError,
    UnboundedSeminormError,
)
from .operators import FiniteRankOperator, ScheduledFamily, accumulate
from .polyhedral import graded_operator_norm
from .scalars import RATIONAL, as_scalar, zero
from .seminorms import SeminormSystem
from .spaces import TruncatedVector, vector_from_dense, zero_vector


@dataclass(frozen=True)
class BasisSpaceElement:
    """Coefficient sequence along the schedule's generator lines."""

    schedule: ScheduledFamily
    coefficients: tuple

    def __len__(self) -> int:
        return len(self.coefficients)

    def component(self, s: int) -> TruncatedVector:
        """Slot s as a vector: coefficient times generator, 0-based s."""
        return self.schedule.generators[s].scale(self.coefficients[s])

    def partial_totals(self):
        """Yields the running sums of the components, one per slot."""
        acc = zero_vector(self.schedule.box, self.schedule.mode)
        for s in range(len(self.coefficients)):
            c = self.coefficients[s]
            if c != 0:
                acc = acc + self.schedule.generators[s].scale(c)
            yield acc

    def total(self) -> TruncatedVector:
        acc = zero_vector(self.schedule.box, self.schedule.mode)
        for acc in self.partial_totals():
            pass
        return acc

    def prefix(self, t: int) -> "BasisSpaceElement":
        """First t slots kept, the rest zeroed."""
        if not 0 <= t <= len(self.coefficients):
            raise InputError(f"prefix length {t} outside 0..{len(self.coefficients)}")
        z = zero(self.schedule.mode)
        return BasisSpaceElement(
            self.schedule,
            self.coefficients[:t] + (z,) * (len(self.coefficients) - t),
        )


def element_from_components(schedule: ScheduledFamily, coefficients) -> BasisSpaceElement:
    coeffs = tuple(as_scalar(c, schedule.mode) for c in coefficients)
    if len(coeffs) != len(schedule.operators):
        raise InputError(
            f"need {len(schedule.operators)} coefficients, got {len(coeffs)}"
        )
    return BasisSpaceElement(schedule, coeffs)


def e0_value(system: SeminormSystem, element: BasisSpaceElement, position: int):
    """Graded value at a working-level position: max over partial sums."""
    schedule = element.schedule
    level = schedule.original_level(position)
    best = zero(schedule.mode)
    for partial in element.partial_totals():
        v = system.value(level, partial)
        if v > best:
            best = v
    return best


def embed(system: SeminormSystem, schedule: ScheduledFamily, x: TruncatedVector) -> BasisSpaceElement:
    """I(x): one coefficient per slot, read off the generator's lead entry."""
    if x.box != schedule.box or x.mode != schedule.mode:
        raise InputError("vector does not live on the schedule's box and mode")
    coeffs = []
    for op, gen in zip(schedule.operators, schedule.generators):
        img = op.apply(x)
        lead_index = gen.entries[0][0]
        c = img.get(lead_index)
        coeffs.append(c)
        if not img.approx_equal(gen.scale(c)):
            raise ConstructionSoundnessError(
                f"image of {op.label} left the generator line"
            )
    return BasisSpaceElement(schedule, tuple(coeffs))


def project(system: SeminormSystem, element: BasisSpaceElement) -> BasisSpaceElement:
    """L(y): resum the components and embed again; idempotent."""
    return embed(system, element.schedule, element.total())


@dataclass(frozen=True)
class EquicontinuityCertificate:
    """Per-position comparison levels and exact partial-sum norms.

    entries[i] = (position, base_level, comparison_level, partial_sum_norm);
    the certified upper bound at a position is factor * partial_sum_norm *
    value(comparison_level, x).
    """

    factor: int
    entries: tuple
    sample_count: int

    def entry(self, position: int):
        for row in self.entries:
            if row[0] == position:
                return row
        raise LevelError(f"no certificate entry for position {position}")

    def bound(self, position: int):
        row = self.entry(position)
        return self.factor * row[3]


def _random_scalar(rng: random.Random, mode: str):
    if mode == RATIONAL:
        return Fraction(rng.randint(-6, 6), rng.randint(1, 4))
    return rng.gauss(0.0, 1.0)


def _random_vector(box, mode, rng: random.Random) -> TruncatedVector:
    return vector_from_dense(box, mode, [_random_scalar(rng, mode) for _ in range(box.dimension)])


def certify_equicontinuity(
    system: SeminormSystem,
    schedule: ScheduledFamily,
    rng: random.Random | None = None,
    sample_count: int = 25,
    factor: int = 5,
    cap: int = 200_000,
) -> EquicontinuityCertificate:
    """Exact M_k per position, then a sampled check of the two-sided bound.

    The comparison level for a position is the smallest system level at or
    above its working level against which every partial sum of the source
    family has a finite graded norm; M_k is the max of those norms.  The
    sampled check enforces value(k, total x) <= |||I(x)|||_k and
    |||I(x)|||_k <= factor * M_k * value(l, x), failing loudly otherwise.
    """
    rng = rng or random.Random(0)
    prefix_sums = accumulate(schedule.source_family)
    entries = []
    for position in range(1, schedule.grading_depth + 1):
        base_level = schedule.original_level(position)
        found = None
        for l in range(base_level, system.level_count + 1):
            norms = []
            try:
                for op in prefix_sums:
                    norms.append(
                        graded_operator_norm(system, base_level, l, op, cap=cap)
                    )
            except UnboundedSeminormError:
                continue
            found = (l, max(norms))
            break
        if found is None:
            raise UnboundedSeminormError(
                f"no comparison level controls the partial sums at level {base_level}"
            )
        entries.append((position, base_level, found[0], found[1]))
    cert = EquicontinuityCertificate(
        factor=factor, entries=tuple(entries), sample_count=sample_count
    )
    total_op = prefix_sums[-1]
    slack = 1 if schedule.mode == RATIONAL else 1 + 1e-9
    for trial in range(sample_count):
        x = _random_vector(schedule.box, schedule.mode, rng)
        y = embed(system, schedule, x)
        for position, base_level, comp_level, m_val in entries:
            e0 = e0_value(system, y, position)
            lower = system.value(base_level, total_op.apply(x))
            upper = factor * m_val * system.value(comp_level, x)
            if not lower <= e0 * slack:
                raise CertificateFailureError(
                    f"lower bound failed at position {position}, sample {trial}: "
                    f"{lower} > {e0}"
                )
            if not e0 <= upper * slack:
                raise CertificateFailureError(
                    f"upper bound failed at position {position}, sample {trial}: "
                    f"{e0} > {upper}"
                )
    return cert


@dataclass(frozen=True)
class ReconstructionReport:
    """Residual traces value(k, x - partial sums) per sample and position."""

    passed: bool
    traces: tuple  # per sample: tuple per position of the residual trace
    final_residuals: tuple

    @property
    def sample_count(self) -> int:
        return len(self.traces)


def verify_reconstruction(
    system: SeminormSystem,
    schedule: ScheduledFamily,
    vectors=None,
    rng: random.Random | None = None,
    sample_count: int = 10,
) -> ReconstructionReport:
    """Check the schedule resums sampled vectors exactly.

    Requires the source family to sum to the identity; the residual
    value(k, x - sum of the first t slots) must reach 0 at the final slot
    for every working level.
    """
    total = None
    for op in schedule.source_family:
        total = op if total is None else total + op
    if not total.approx_equal(FiniteRankOperator.identity(schedule.box, schedule.mode)):
        raise InputError("reconstruction needs a family summing to the identity")
    rng = rng or random.Random(0)
    if vectors is None:
        vectors = [
            _random_vector(schedule.box, schedule.mode, rng) for _ in range(sample_count)
        ]
    all_traces = []
    finals = []
    passed = True
    for x in vectors:
        per_position = []
        partial = zero_vector(schedule.box, schedule.mode)
        partials = [partial]
        for op in schedule.operators:
            partial = partial + op.apply(x)
            partials.append(partial)
        worst = zero(schedule.mode)
        for position in range(1, schedule.grading_depth + 1):
            level = schedule.original_level(position)
            trace = tuple(system.value(level, x - p) for p in partials)
            per_position.append(trace)
            if trace[-1] > worst:
                worst = trace[-1]
        all_traces.append(tuple(per_position))
        finals.append(worst)
        if schedule.mode == RATIONAL:
            ok = worst == 0
        else:
            ok = worst <= 1e-9 * max(1.0, system.value(schedule.working_levels[-1], x))
        passed = passed and ok
    return ReconstructionReport(
        passed=passed, traces=tuple(all_traces), final_residuals=tuple(finals)
    )


@dataclass(frozen=True)
class BasisCriterionReport:
    """Prefix monotonicity of the graded values along the schedule."""

    passed: bool
    constant: int
    sample_count: int


def basis_criterion_check(
    system: SeminormSystem,
    schedule: ScheduledFamily,
    rng: random.Random | None = None,
    sample_count: int = 20,
) -> BasisCriterionReport:
    """Prefixes never exceed the full element in any graded value.

    The values are running maxima over partial sums, so the prefix map has
    constant 1 by construction; this confirms it numerically on random
    coefficient sequences.
    """
    rng = rng or random.Random(0)
    slack = 1 if schedule.mode == RATIONAL else 1 + 1e-12
    for _ in range(sample_count):
        coeffs = [_random_scalar(rng, schedule.mode) for _ in schedule.operators]
        y = element_from_components(schedule, coeffs)
        for position in range(1, schedule.grading_depth + 1):
            level = schedule.original_level(position)
            running = zero(schedule.mode)
            full = e0_value(system, y, position)
            for partial in y.partial_totals():
                v = system.value(level, partial)
                if v > running:
                    running = v
                if not running <= full * slack:
                    return BasisCriterionReport(False, 1, sample_count)
    return BasisCriterionReport(True, 1, sample_count)
