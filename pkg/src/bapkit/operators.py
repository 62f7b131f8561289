"""Finite-rank operators and the telescoping schedule construction.

The pipeline realized here, given a finite operator family (A_p) and a
graded seminorm system:

  1. renumber levels so the p-th working level is a norm on range(A_p);
  2. intersect range(A_p) with the kernels of the working levels below p
     (a decreasing filtration) and split it into orthogonal complement
     blocks, ordered head block first;
  3. project onto each adapted basis line: rank-one pieces B_j summing to
     the identity on range(A_p), with a certified level-uniform control
     constant R_p;
  4. damp by N_p >= m_p * R_p and replicate N_p times: pieces C_i whose
     running prefixes stay within twice the seminorm of the input;
  5. flatten every block, composing with its A_p, into one rank-one
     schedule whose total equals the total of the original family.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    ConstructionSoundnessError,
    ContinuousNormError,
    DegenerateInputError,
    DomainError,
    InputError,
    LevelError,
    ModeError,
    ZeroOperatorError,
)
from .linalg import in_span, invert, mat_mul, rank
from .polyhedral import rank_one_family_constant
from .scalars import (
    DEFAULT_TOLERANCES,
    RATIONAL,
    Tolerances,
    as_scalar,
    ceil_scalar,
    check_mode,
    zero,
)
from .seminorms import SeminormSystem, seminorm_kernel_basis
from .spaces import Box, TruncatedVector, vector_from_dense, zero_vector


@dataclass(frozen=True)
class FiniteRankOperator:
    """Dense coordinate matrix on a box plus a basis of its column space.

    range_basis is derived deterministically (pivot columns) by the public
    constructors, so span(range_basis) always equals the column space and
    rank == len(range_basis).
    """

    box: Box
    mode: str
    matrix: tuple  # row-major, box.dimension square
    range_basis: tuple = ()
    label: str = ""

    @staticmethod
    def from_matrix(box: Box, mode: str, rows, label: str = "") -> "FiniteRankOperator":
        check_mode(mode)
        d = box.dimension
        if len(rows) != d or any(len(r) != d for r in rows):
            raise InputError(f"matrix must be {d}x{d} for this box")
        coerced = tuple(tuple(as_scalar(v, mode) for v in r) for r in rows)
        ftol = None if mode == RATIONAL else DEFAULT_TOLERANCES.rank
        from .linalg import column_space_basis

        pivots = column_space_basis([list(r) for r in coerced], ftol)
        basis = tuple(
            vector_from_dense(box, mode, [coerced[r][c] for r in range(d)]) for c in pivots
        )
        return FiniteRankOperator(box, mode, coerced, basis, label)

    @staticmethod
    def identity(box: Box, mode: str, label: str = "identity") -> "FiniteRankOperator":
        d = box.dimension
        rows = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        return FiniteRankOperator.from_matrix(box, mode, rows, label)

    @staticmethod
    def zero(box: Box, mode: str, label: str = "zero") -> "FiniteRankOperator":
        d = box.dimension
        return FiniteRankOperator.from_matrix(box, mode, [[0] * d] * d, label)

    @staticmethod
    def rank_one(
        output: TruncatedVector, functional_row, label: str = ""
    ) -> "FiniteRankOperator":
        """Operator x -> functional(x) * output; functional_row is dense."""
        d = output.box.dimension
        if len(functional_row) != d:
            raise InputError("functional row length must match the box dimension")
        out = output.dense()
        rows = [[out[r] * functional_row[c] for c in range(d)] for r in range(d)]
        return FiniteRankOperator.from_matrix(output.box, output.mode, rows, label)

    @property
    def rank(self) -> int:
        return len(self.range_basis)

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.matrix for v in r)

    def _check_peer(self, other: "FiniteRankOperator") -> None:
        if self.box != other.box:
            raise DomainError("operator boxes differ")
        if self.mode != other.mode:
            raise ModeError("operator modes differ")

    def apply(self, x: TruncatedVector) -> TruncatedVector:
        if x.box != self.box:
            raise DomainError("vector box does not match operator box")
        if x.mode != self.mode:
            raise ModeError("vector mode does not match operator mode")
        out = [zero(self.mode)] * self.box.dimension
        for idx, val in x.entries:
            c = self.box.position(idx)
            for r in range(self.box.dimension):
                m = self.matrix[r][c]
                if m != 0:
                    out[r] += m * val
        return vector_from_dense(self.box, self.mode, out)

    def compose(self, other: "FiniteRankOperator", label: str = "") -> "FiniteRankOperator":
        self._check_peer(other)
        rows = mat_mul([list(r) for r in self.matrix], [list(r) for r in other.matrix])
        return FiniteRankOperator.from_matrix(self.box, self.mode, rows, label)

    def __add__(self, other: "FiniteRankOperator") -> "FiniteRankOperator":
        self._check_peer(other)
        rows = [
            [a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.matrix, other.matrix)
        ]
        return FiniteRankOperator.from_matrix(self.box, self.mode, rows)

    def __sub__(self, other: "FiniteRankOperator") -> "FiniteRankOperator":
        return self + other.scale(-1)

    def scale(self, factor, label: str = "") -> "FiniteRankOperator":
        c = as_scalar(factor, self.mode)
        rows = [[c * v for v in r] for r in self.matrix]
        return FiniteRankOperator.from_matrix(self.box, self.mode, rows, label)

    def approx_equal(
        self, other: "FiniteRankOperator", tol: Tolerances = DEFAULT_TOLERANCES
    ) -> bool:
        self._check_peer(other)
        if self.mode == RATIONAL:
            return self.matrix == other.matrix
        scale = max(
            [1.0]
            + [abs(v) for r in self.matrix for v in r]
            + [abs(v) for r in other.matrix for v in r]
        )
        return all(
            abs(a - b) <= tol.eq * scale
            for ra, rb in zip(self.matrix, other.matrix)
            for a, b in zip(ra, rb)
        )

    def range_consistent(self, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        ftol = None if self.mode == RATIONAL else tol.rank
        rows = [list(r) for r in self.matrix]
        if rank(rows, ftol) != len(self.range_basis):
            return False
        cols = [[self.matrix[r][c] for r in range(self.box.dimension)]
                for c in range(self.box.dimension)]
        basis_dense = [v.dense() for v in self.range_basis]
        return all(in_span(basis_dense, col, ftol) for col in cols) and all(
            in_span(cols, b, ftol) for b in basis_dense
        )


# ---------------------------------------------------------------------------
# telescoping


def telescope(family) -> list:
    """Successive differences: first member, then each minus its predecessor."""
    ops = list(family)
    if not ops:
        raise DegenerateInputError("telescope needs at least one operator")
    out = [ops[0]]
    for prev, cur in zip(ops, ops[1:]):
        out.append(cur - prev)
    return out


def accumulate(family) -> list:
    """Running partial sums; inverse of telescope."""
    ops = list(family)
    if not ops:
        raise DegenerateInputError("accumulate needs at least one operator")
    out = [ops[0]]
    for cur in ops[1:]:
        out.append(out[-1] + cur)
    return out


# ---------------------------------------------------------------------------
# kernel filtration and complements


def smallest_norm_level(op: FiniteRankOperator, system: SeminormSystem) -> int:
    """First level whose restriction to range(op) has trivial kernel."""
    for k in range(1, system.level_count + 1):
        if not seminorm_kernel_basis(system, k, op.range_basis):
            return k
    raise ContinuousNormError(
        f"no level of the system is a norm on range({op.label or 'operator'})"
    )


def kernel_filtration(op: FiniteRankOperator, system: SeminormSystem, levels=None):
    """Bases of Ker(value(j, .)) intersected with range(op), nested decreasing.

    levels defaults to every level strictly below the first norm level on
    the range, matching the blocks-below-the-norm-level reading.
    """
    if op.rank == 0:
        raise ZeroOperatorError("kernel filtration of a zero operator is undefined")
    if levels is None:
        levels = list(range(1, smallest_norm_level(op, system)))
    out = []
    for j in levels:
        system.check_level(j)
        out.append(tuple(seminorm_kernel_basis(system, j, op.range_basis)))
    ftol = None if system.mode == RATIONAL else DEFAULT_TOLERANCES.rank
    for finer_level_basis, coarser in zip(out[1:], out):
        span = [v.dense() for v in coarser]
        for v in finer_level_basis:
            if not in_span(span, v.dense(), ftol):
                raise ConstructionSoundnessError("kernel filtration is not nested")
    return out


@dataclass(frozen=True)
class ComplementDecomposition:
    """Ordered blocks (kernel_tag, basis) with head block tagged 0.

    A block tagged l >= 1 lies inside the kernel of working level l; the
    adapted basis is the concatenation in tag order.
    """

    blocks: tuple  # tuple of (int, tuple[TruncatedVector, ...])

    @property
    def adapted_basis(self) -> tuple:
        return tuple(v for _, basis in self.blocks for v in basis)

    def tag_of_position(self, j: int) -> int:
        pos = 0
        for tag, basis in self.blocks:
            pos += len(basis)
            if j < pos:
                return tag
        raise InputError(f"position {j} outside the adapted basis")


def _orthogonalize(vectors):
    """Unnormalized Gram-Schmidt; exact in rational mode."""
    out = []
    for v in vectors:
        w = v
        for u in out:
            denom = u.dot(u)
            if denom != 0:
                w = w - u.scale(w.dot(u) / denom)
        if not w.is_zero():
            out.append(w)
    return out


def select_complements(range_basis, filtration) -> ComplementDecomposition:
    """Split span(range_basis) along the filtration into orthogonal blocks.

    Block l is the orthogonal complement (standard coordinate inner
    product) of filtration[l] inside the previous space; the final block is
    the last filtration space itself.  Trivial filtrations therefore give a
    single head block equal to the range basis, unchanged.
    """
    chain = [tuple(range_basis)] + [tuple(f) for f in filtration]
    if not chain[0]:
        raise ZeroOperatorError("cannot decompose an empty range")
    mode = chain[0][0].mode
    ftol = None if mode == RATIONAL else DEFAULT_TOLERANCES.rank
    blocks = []
    for l in range(len(chain) - 1):
        inner_orth = _orthogonalize(chain[l + 1])
        candidates = []
        for v in chain[l]:
            w = v
            for u in inner_orth:
                denom = u.dot(u)
                if denom != 0:
                    w = w - u.scale(w.dot(u) / denom)
            candidates.append(w)
        kept: list = []
        kept_dense: list = []
        target = len(chain[l]) - len(chain[l + 1])
        for w in candidates:
            if len(kept) == target:
                break
            if w.is_zero():
                continue
            if kept_dense and in_span(kept_dense, w.dense(), ftol):
                continue
            kept.append(w)
            kept_dense.append(w.dense())
        if len(kept) != target:
            raise ConstructionSoundnessError(
                f"complement block {l} has dimension {len(kept)}, expected {target}"
            )
        if kept:
            blocks.append((l, tuple(kept)))
    final_tag = len(chain) - 1
    if chain[-1]:
        blocks.append((final_tag, tuple(chain[-1])))
    decomp = ComplementDecomposition(tuple(blocks))
    total = sum(len(b) for _, b in decomp.blocks)
    if total != len(chain[0]):
        raise ConstructionSoundnessError("block dimensions do not add up")
    dense = [v.dense() for v in decomp.adapted_basis]
    if rank(dense, ftol) != total:
        raise ConstructionSoundnessError("adapted basis is dependent")
    return decomp


# ---------------------------------------------------------------------------
# rank-one split


@dataclass(frozen=True)
class RankOneSplit:
    """Rank-one pieces summing to the identity on the source range.

    control_constant bounds max_j value(k, B_j e) / value(k, e) for every
    control level k; level_constants records the exact per-level optimum.
    """

    source: FiniteRankOperator
    pieces: tuple
    norm_grading: tuple  # control levels, last one a norm on the range
    control_constant: object
    level_constants: tuple
    decomposition: ComplementDecomposition

    @property
    def piece_count(self) -> int:
        return len(self.pieces)


def rank_one_split(
    op: FiniteRankOperator,
    system: SeminormSystem,
    control_levels=None,
    cap: int = 200_000,
) -> RankOneSplit:
    if op.rank == 0 or op.is_zero():
        raise ZeroOperatorError("cannot split a zero operator")
    if op.box != system.box or op.mode != system.mode:
        raise DomainError("operator and system live on different boxes or modes")
    if control_levels is None:
        control_levels = list(range(1, smallest_norm_level(op, system) + 1))
    control_levels = list(control_levels)
    if not control_levels:
        raise LevelError("need at least one control level")
    for a, b in zip(control_levels, control_levels[1:]):
        if not a < b:
            raise LevelError("control levels must be strictly increasing")
    for k in control_levels:
        system.check_level(k)
    if seminorm_kernel_basis(system, control_levels[-1], op.range_basis):
        raise ContinuousNormError(
            f"level {control_levels[-1]} is not a norm on the operator range"
        )
    filtration = kernel_filtration(op, system, control_levels[:-1])
    decomp = select_complements(op.range_basis, filtration)
    adapted = decomp.adapted_basis
    m = len(adapted)
    d = op.box.dimension
    ftol = None if op.mode == RATIONAL else DEFAULT_TOLERANCES.rank
    vt = [v.dense() for v in adapted]  # m x d, rows are basis vectors
    gram = [[adapted[a].dot(adapted[b]) for b in range(m)] for a in range(m)]
    ginv = invert(gram, ftol)
    if ginv is None:
        raise ConstructionSoundnessError("adapted basis Gram matrix is singular")
    phi = mat_mul(ginv, vt)  # m x d, biorthogonal coefficient functionals
    pieces = []
    for j in range(m):
        pieces.append(
            FiniteRankOperator.rank_one(
                adapted[j], phi[j], label=f"{op.label or 'op'}:piece{j + 1}"
            )
        )
    zero_vec = zero_vector(op.box, op.mode)
    constants = []
    for level in control_levels:
        piece_images = []
        for j in range(m):
            piece_images.append([adapted[j] if i == j else zero_vec for i in range(m)])
        constants.append(
            rank_one_family_constant(system, level, adapted, piece_images, cap=cap)
        )
    control = max(constants)
    for v in adapted:
        total = zero_vec
        for piece in pieces:
            total = total + piece.apply(v)
        if not total.approx_equal(v):
            raise ConstructionSoundnessError("pieces do not sum to the identity on the range")
    return RankOneSplit(
        source=op,
        pieces=tuple(pieces),
        norm_grading=tuple(control_levels),
        control_constant=control,
        level_constants=tuple(constants),
        decomposition=decomp,
    )


# ---------------------------------------------------------------------------
# damping, replication, flattening


@dataclass(frozen=True)
class ScheduleBlock:
    """One damped, replicated split: operators C_i = B_j / N, i = r*m + j."""

    split: RankOneSplit
    operators: tuple
    replication: int

    @property
    def piece_count(self) -> int:
        return self.split.piece_count


def scale_and_replicate(
    split: RankOneSplit,
    system: SeminormSystem,
    rng: random.Random | None = None,
    sample_count: int = 50,
) -> ScheduleBlock:
    """Damp by N = ceil(m * R) and lay out N copies of the m pieces.

    Verifies the identity on the range exactly and the prefix bound
    value(k, prefix) <= 2 * value(k, e) on sampled range elements for every
    control level.
    """
    m = split.piece_count
    n_rep = max(1, ceil_scalar(m * split.control_constant))
    scaled = tuple(
        piece.scale(
            Fraction(1, n_rep) if split.source.mode == RATIONAL else 1.0 / n_rep,
            label=f"{piece.label}/N{n_rep}",
        )
        for piece in split.pieces
    )
    operators = tuple(scaled[j] for _ in range(n_rep) for j in range(m))
    block = ScheduleBlock(split=split, operators=operators, replication=n_rep)
    _verify_prefix_bound(block, system, rng or random.Random(0), sample_count)
    return block


def _random_coefficient(rng: random.Random, mode: str):
    if mode == RATIONAL:
        return Fraction(rng.randint(-6, 6), rng.randint(1, 4))
    return rng.gauss(0.0, 1.0)


def _verify_prefix_bound(
    block: ScheduleBlock, system: SeminormSystem, rng: random.Random, sample_count: int
) -> None:
    split = block.split
    adapted = split.decomposition.adapted_basis
    m = split.piece_count
    n_rep = block.replication
    mode = split.source.mode
    two = as_scalar(2, mode)
    for _ in range(sample_count):
        coeffs = [_random_coefficient(rng, mode) for _ in range(m)]
        e = zero_vector(split.source.box, mode)
        for c, v in zip(coeffs, adapted):
            e = e + v.scale(c)
        partial_piece = [zero_vector(split.source.box, mode)]
        for c, v in zip(coeffs, adapted):
            partial_piece.append(partial_piece[-1] + v.scale(c))
        for level in split.norm_grading:
            bound = two * system.value(level, e)
            for r in range(n_rep):
                for w in range(m):
                    # prefix q = r*m + w + 1 ends inside copy r after w+1 pieces
                    q_vec = e.scale(
                        Fraction(r, n_rep) if mode == RATIONAL else r / n_rep
                    ) + partial_piece[w + 1].scale(
                        Fraction(1, n_rep) if mode == RATIONAL else 1.0 / n_rep
                    )
                    val = system.value(level, q_vec)
                    ok = val <= bound if mode == RATIONAL else val <= bound * (1 + 1e-9)
                    if not ok:
                        raise ConstructionSoundnessError(
                            f"prefix bound failed at level {level}, copy {r}, piece {w + 1}: "
                            f"{val} > 2 * {system.value(level, e)}"
                        )


@dataclass(frozen=True)
class ScheduledFamily:
    """Flattened rank-one schedule with its block bookkeeping.

    operators[s] acts as C_i of block p composed with that block's source
    operator; block_structure[s] = (p, i) with 1-based p and i.  generators
    are the range lines normalized to leading coordinate 1.
    """

    box: Box
    mode: str
    operators: tuple
    block_structure: tuple
    replication_counts: tuple  # (p, N_p) pairs
    source_family: tuple
    splits: tuple
    working_levels: tuple
    generators: tuple

    def __len__(self) -> int:
        return len(self.operators)

    @property
    def grading_depth(self) -> int:
        return len(self.working_levels)

    def original_level(self, grading_position: int) -> int:
        if not 1 <= grading_position <= len(self.working_levels):
            raise LevelError(
                f"grading position {grading_position} outside 1..{len(self.working_levels)}"
            )
        return self.working_levels[grading_position - 1]


def flatten_schedule(blocks) -> ScheduledFamily:
    """Concatenate blocks, composing each damped piece with its source."""
    blocks = list(blocks)
    if not blocks:
        raise DegenerateInputError("flatten_schedule needs at least one block")
    box = blocks[0].split.source.box
    mode = blocks[0].split.source.mode
    operators = []
    structure = []
    generators = []
    for p, block in enumerate(blocks, start=1):
        source = block.split.source
        if source.box != box or source.mode != mode:
            raise DomainError("blocks live on different boxes or modes")
        adapted = block.split.decomposition.adapted_basis
        m = block.piece_count
        for i, c_op in enumerate(block.operators, start=1):
            composed_rows = mat_mul(
                [list(r) for r in c_op.matrix], [list(r) for r in source.matrix]
            )
            b_vec = adapted[(i - 1) % m]
            composed = FiniteRankOperator(
                box,
                mode,
                tuple(tuple(v for v in r) for r in composed_rows),
                (b_vec,),
                label=f"schedule:p{p}:i{i}",
            )
            operators.append(composed)
            structure.append((p, i))
            lead = b_vec.entries[0][1]
            generators.append(b_vec.scale(1 / lead))
    total = None
    for op in operators:
        total = op if total is None else total + op
    family_total = None
    for block in blocks:
        src = block.split.source
        family_total = src if family_total is None else family_total + src
    if not total.approx_equal(family_total):
        raise ConstructionSoundnessError("schedule total differs from the family total")
    return ScheduledFamily(
        box=box,
        mode=mode,
        operators=tuple(operators),
        block_structure=tuple(structure),
        replication_counts=tuple(
            (p, block.replication) for p, block in enumerate(blocks, start=1)
        ),
        source_family=tuple(block.split.source for block in blocks),
        splits=tuple(block.split for block in blocks),
        working_levels=tuple(blocks[-1].split.norm_grading),
        generators=tuple(generators),
    )


def build_schedule(
    family,
    system: SeminormSystem,
    rng: random.Random | None = None,
    prefix_samples: int = 50,
    cap: int = 200_000,
) -> ScheduledFamily:
    """Full pipeline: renumber, split, damp, replicate, flatten."""
    ops = list(family)
    if not ops:
        raise DegenerateInputError("build_schedule needs a nonempty family")
    working = []
    prev = 0
    for p, op in enumerate(ops, start=1):
        if op.rank == 0 or op.is_zero():
            raise ZeroOperatorError(f"family member {p} is the zero operator")
        found = None
        for k in range(prev + 1, system.level_count + 1):
            if not seminorm_kernel_basis(system, k, op.range_basis):
                found = k
                break
        if found is None:
            raise ContinuousNormError(
                f"no level above {prev} is a norm on range of family member {p}"
            )
        working.append(found)
        prev = found
    rng = rng or random.Random(0)
    blocks = []
    for p, op in enumerate(ops, start=1):
        split = rank_one_split(op, system, control_levels=working[:p], cap=cap)
        blocks.append(scale_and_replicate(split, system, rng, prefix_samples))
    return flatten_schedule(blocks)
