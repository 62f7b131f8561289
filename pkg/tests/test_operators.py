"""Finite-rank operators and the schedule pipeline."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bapkit import (
    ConstructionSoundnessError,
    ContinuousNormError,
    DegenerateInputError,
    DomainError,
    FiniteRankOperator,
    InputError,
    KoetheSeminorms,
    LevelError,
    MaxPrefixSeminorms,
    SingleBox,
    ZeroOperatorError,
    accumulate,
    build_schedule,
    flatten_schedule,
    kernel_filtration,
    rank_one_split,
    scale_and_replicate,
    select_complements,
    smallest_norm_level,
    telescope,
    unit_vector,
    vector_from_dense,
)
from bapkit.operators import ComplementDecomposition

F = Fraction
BOX2 = SingleBox(2)


def op2(rows, label=""):
    return FiniteRankOperator.from_matrix(BOX2, "rational", rows, label)


def flat_system():
    return KoetheSeminorms(((1, 1),), BOX2, "rational")


# ---------------------------------------------------------------------------
# operator basics


def test_from_matrix_shape_check():
    with pytest.raises(InputError):
        op2([[1, 2]])
    with pytest.raises(InputError):
        op2([[1], [2]])


def test_range_basis_from_pivot_columns():
    a = op2([[1, 2], [2, 4]])
    assert a.rank == 1
    assert a.range_basis[0].dense() == [F(1), F(2)]
    assert a.range_consistent()
    b = op2([[1, 1], [0, 2]])
    assert b.rank == 2 and b.range_consistent()


def test_identity_zero_and_apply():
    eye = FiniteRankOperator.identity(BOX2, "rational")
    z = FiniteRankOperator.zero(BOX2, "rational")
    x = vector_from_dense(BOX2, "rational", [F(3), F(-1)])
    assert eye.apply(x) == x
    assert z.apply(x).is_zero()
    assert z.is_zero() and z.rank == 0
    assert eye.rank == 2


def test_apply_oracle():
    a = op2([[1, 1], [0, 2]])
    x = vector_from_dense(BOX2, "rational", [F(1), F(2)])
    assert a.apply(x).dense() == [F(3), F(4)]
    with pytest.raises(DomainError):
        a.apply(unit_vector(SingleBox(3), "rational", 1))


def test_compose_matches_matrix_product():
    a = op2([[1, 1], [0, 2]])
    b = op2([[0, 1], [1, 0]])
    assert a.compose(b).matrix == ((F(1), F(1)), (F(2), F(0)))


def test_algebra_and_equality():
    a = op2([[1, 0], [0, 1]])
    b = op2([[0, 1], [0, 0]])
    assert (a + b).matrix == ((F(1), F(1)), (F(0), F(1)))
    assert (a - a).is_zero()
    assert a.scale(3).matrix == ((F(3), F(0)), (F(0), F(3)))
    assert a.approx_equal(FiniteRankOperator.identity(BOX2, "rational"))


def test_rank_one_constructor():
    out = vector_from_dense(BOX2, "rational", [F(1), F(2)])
    p = FiniteRankOperator.rank_one(out, [F(1), F(0)])
    x = vector_from_dense(BOX2, "rational", [F(5), F(7)])
    assert p.apply(x) == out.scale(5)
    assert p.rank == 1
    with pytest.raises(InputError):
        FiniteRankOperator.rank_one(out, [F(1)])


# ---------------------------------------------------------------------------
# telescoping


def test_telescope_accumulate_roundtrip_oracle():
    a = op2([[1, 0], [0, 0]])
    b = op2([[1, 0], [0, 1]])
    diffs = telescope([a, b])
    assert diffs[0].approx_equal(a)
    assert diffs[1].matrix == ((F(0), F(0)), (F(0), F(1)))
    sums = accumulate(diffs)
    assert sums[0].approx_equal(a) and sums[1].approx_equal(b)


small_entries = st.integers(-3, 3)
matrices = st.lists(
    st.lists(small_entries, min_size=2, max_size=2), min_size=2, max_size=2
)


@settings(max_examples=40, deadline=None)
@given(st.lists(matrices, min_size=1, max_size=4))
def test_telescope_and_accumulate_are_inverse(mats):
    family = [op2(m) for m in mats]
    recovered = accumulate(telescope(family))
    assert all(x.approx_equal(y) for x, y in zip(recovered, family))
    recovered2 = telescope(accumulate(family))
    assert all(x.approx_equal(y) for x, y in zip(recovered2, family))


def test_empty_family_is_rejected():
    with pytest.raises(DegenerateInputError):
        telescope([])
    with pytest.raises(DegenerateInputError):
        accumulate([])


# ---------------------------------------------------------------------------
# norm levels, filtration, complements


def test_smallest_norm_level():
    system = KoetheSeminorms(((0, 1), (1, 1)), BOX2, "rational")
    eye = FiniteRankOperator.identity(BOX2, "rational")
    assert smallest_norm_level(eye, system) == 2
    proj2 = op2([[0, 0], [0, 1]])
    assert smallest_norm_level(proj2, system) == 1


def test_no_norm_level_raises():
    system = KoetheSeminorms(((0, 1),), BOX2, "rational")
    eye = FiniteRankOperator.identity(BOX2, "rational")
    with pytest.raises(ContinuousNormError):
        smallest_norm_level(eye, system)


def test_kernel_filtration_defaults_to_levels_below_the_norm_level():
    system = KoetheSeminorms(((0, 1), (1, 1)), BOX2, "rational")
    eye = FiniteRankOperator.identity(BOX2, "rational")
    spaces = kernel_filtration(eye, system)
    assert len(spaces) == 1
    assert [v.support for v in spaces[0]] == [(1,)]
    with pytest.raises(ZeroOperatorError):
        kernel_filtration(FiniteRankOperator.zero(BOX2, "rational"), system)


def test_select_complements_trivial_filtration_keeps_the_range():
    a = op2([[1, 1], [0, 2]])
    decomp = select_complements(a.range_basis, [])
    assert len(decomp.blocks) == 1
    assert decomp.blocks[0][0] == 0
    assert decomp.adapted_basis == a.range_basis


def test_select_complements_splits_along_a_kernel():
    box = SingleBox(3)
    e = [unit_vector(box, "rational", j) for j in (1, 2, 3)]
    decomp = select_complements((e[0], e[1]), [(e[1],)])
    assert [tag for tag, _ in decomp.blocks] == [0, 1]
    assert decomp.adapted_basis == (e[0], e[1])
    assert decomp.tag_of_position(0) == 0
    assert decomp.tag_of_position(1) == 1
    with pytest.raises(InputError):
        decomp.tag_of_position(2)


def test_select_complements_orthogonalizes_against_the_inner_space():
    box = SingleBox(2)
    mixed = vector_from_dense(box, "rational", [F(1), F(1)])
    e2 = unit_vector(box, "rational", 2)
    decomp = select_complements((mixed, e2), [(e2,)])
    # the head block must be orthogonal to e2, so only e1 survives
    assert decomp.blocks[0][1][0].dense() == [F(1), F(0)]


def test_select_complements_rejects_empty_range():
    with pytest.raises(ZeroOperatorError):
        select_complements((), [])


# ---------------------------------------------------------------------------
# the rank-one split


def test_rank_one_split_frozen_instance():
    """The 2x2 instance with a skewed range basis: every derived number."""
    a = op2([[1, 1], [0, 2]], label="a")
    split = rank_one_split(a, flat_system())
    assert split.norm_grading == (1,)
    assert split.control_constant == F(3, 2)
    assert split.level_constants == (F(3, 2),)
    assert split.piece_count == 2
    # biorthogonal functionals recovered from the Gram system
    assert split.pieces[0].matrix == ((F(1), F(-1, 2)), (F(0), F(0)))
    assert split.pieces[1].matrix == ((F(0), F(1, 2)), (F(0), F(1)))
    # pieces must resum to the identity on the range
    for v in a.range_basis:
        img = split.pieces[0].apply(v) + split.pieces[1].apply(v)
        assert img == v


def test_rank_one_split_rejects_zero_and_bad_levels():
    system = flat_system()
    with pytest.raises(ZeroOperatorError):
        rank_one_split(FiniteRankOperator.zero(BOX2, "rational"), system)
    a = op2([[1, 0], [0, 1]])
    with pytest.raises(LevelError):
        rank_one_split(a, system, control_levels=[])
    with pytest.raises(LevelError):
        rank_one_split(a, system, control_levels=[1, 1])
    with pytest.raises(LevelError):
        rank_one_split(a, system, control_levels=[2])


def test_rank_one_split_needs_a_norm_level():
    system = KoetheSeminorms(((0, 1), (1, 1)), BOX2, "rational")
    eye = FiniteRankOperator.identity(BOX2, "rational")
    with pytest.raises(ContinuousNormError):
        rank_one_split(eye, system, control_levels=[1])


def test_rank_one_split_box_mismatch():
    system = KoetheSeminorms(((1, 1, 1),), SingleBox(3), "rational")
    with pytest.raises(DomainError):
        rank_one_split(op2([[1, 0], [0, 1]]), system)


# ---------------------------------------------------------------------------
# damping, replication, flattening


def test_scale_and_replicate_frozen_instance():
    a = op2([[1, 1], [0, 2]], label="a")
    split = rank_one_split(a, flat_system())
    block = scale_and_replicate(split, flat_system())
    # N = ceil(2 * 3/2) = 3 copies of both pieces
    assert block.replication == 3
    assert len(block.operators) == 6
    assert block.operators[0].matrix == ((F(1, 3), F(-1, 6)), (F(0), F(0)))
    assert block.operators[0].approx_equal(block.operators[2])


def test_flatten_schedule_structure():
    a = op2([[1, 1], [0, 2]], label="a")
    split = rank_one_split(a, flat_system())
    block = scale_and_replicate(split, flat_system())
    schedule = flatten_schedule([block])
    assert len(schedule) == 6
    assert schedule.block_structure == tuple((1, i) for i in range(1, 7))
    assert schedule.replication_counts == ((1, 3),)
    assert schedule.working_levels == (1,)
    # the flattened operators resum to the source
    total = schedule.operators[0]
    for op in schedule.operators[1:]:
        total = total + op
    assert total.approx_equal(a)
    # generators are normalized to leading coordinate 1
    for gen in schedule.generators:
        assert gen.entries[0][1] == 1
    with pytest.raises(DegenerateInputError):
        flatten_schedule([])


def test_schedule_level_bookkeeping():
    a = op2([[1, 1], [0, 2]], label="a")
    split = rank_one_split(a, flat_system())
    schedule = flatten_schedule([scale_and_replicate(split, flat_system())])
    assert schedule.grading_depth == 1
    assert schedule.original_level(1) == 1
    with pytest.raises(LevelError):
        schedule.original_level(0)
    with pytest.raises(LevelError):
        schedule.original_level(2)


def test_build_schedule_renumbers_working_levels():
    box = SingleBox(3)
    system = MaxPrefixSeminorms(box, "rational", 3)
    family = []
    for p in range(3):
        rows = [[1 if (i == j == p) else 0 for j in range(3)] for i in range(3)]
        family.append(FiniteRankOperator.from_matrix(box, "rational", rows, f"p{p + 1}"))
    schedule = build_schedule(family, system, rng=random.Random(1), prefix_samples=10)
    # coordinate p only becomes visible at prefix length p
    assert schedule.working_levels == (1, 2, 3)
    assert len(schedule) == 3
    # the later splits carry degenerate control constants at the low levels
    assert schedule.splits[2].level_constants == (0, 0, 1)


def test_build_schedule_rejects_zero_members_and_exhausted_levels():
    system = flat_system()
    eye = FiniteRankOperator.identity(BOX2, "rational")
    with pytest.raises(ZeroOperatorError):
        build_schedule([FiniteRankOperator.zero(BOX2, "rational")], system)
    with pytest.raises(DegenerateInputError):
        build_schedule([], system)
    # the single level is spent on the first member
    with pytest.raises(ContinuousNormError):
        build_schedule([eye, eye], system)


def test_prefix_bound_check_runs():
    # the sampled prefix verification must accept an honest block
    a = op2([[1, 1], [0, 2]])
    split = rank_one_split(a, flat_system())
    block = scale_and_replicate(split, flat_system(), rng=random.Random(3), sample_count=40)
    assert block.replication == 3


def test_tag_bookkeeping_of_decompositions():
    e1 = unit_vector(BOX2, "rational", 1)
    decomp = ComplementDecomposition(((0, (e1,)),))
    assert decomp.adapted_basis == (e1,)
    assert decomp.tag_of_position(0) == 0
