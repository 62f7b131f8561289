"""Round-trip serialization for every public object kind."""

import json
import random
from fractions import Fraction

import pytest

from bapkit import (
    CustomLevel,
    CustomSeminorms,
    DiagnosticVerdict,
    FiniteRankOperator,
    InputError,
    KoetheSeminorms,
    MaxPrefixSeminorms,
    RhoTable,
    SingleBox,
    SupPartialSumSeminorms,
    TripleBox,
    TruncatedVector,
    VogtInstance,
    VogtSeminorms,
    bap_failure_witness,
    basis_criterion_check,
    basis_sup_norms,
    build_schedule,
    certify_equicontinuity,
    comparison_inequality_check,
    element_from_components,
    injective_extension_test,
    norm_positivity_check,
    nuclearity_certificate,
    unit_vector,
    vector_from_dense,
    verify_reconstruction,
    witness_evidence,
)
from bapkit import jsonio

F = Fraction


def roundtrip(obj):
    decoded = jsonio.loads(jsonio.dumps(obj))
    return decoded


def identical_after_roundtrip(obj):
    # dataclass equality where available, canonical text otherwise
    decoded = roundtrip(obj)
    return jsonio.dumps(decoded) == jsonio.dumps(obj)


def test_boxes_and_vectors():
    box = TripleBox(3, 2, 2)
    assert roundtrip(box) == box
    assert roundtrip(SingleBox(5)) == SingleBox(5)
    v = TruncatedVector.create(box, "rational", {(1, 2, 1): F(3, 7), (2, 1, 2): -2})
    assert roundtrip(v) == v


def test_float_entries_survive_exactly():
    v = vector_from_dense(SingleBox(3), "float", [0.1, -2.5, 0.0])
    assert roundtrip(v) == v


def test_rho_tables():
    assert roundtrip(RhoTable.dyadic()) == RhoTable.dyadic()
    table = RhoTable.from_grid({(1, 1): F(1, 2), (2, 1): F(1, 4)})
    assert roundtrip(table) == table


def test_seminorm_systems():
    vogt = VogtSeminorms(RhoTable.dyadic(), TripleBox(3, 2, 3), "rational", 3)
    assert roundtrip(vogt) == vogt
    koethe = KoetheSeminorms(((1, 2), (3, 4)), SingleBox(2), "rational")
    assert roundtrip(koethe) == koethe
    prefix = MaxPrefixSeminorms(SingleBox(4), "rational", 4)
    assert roundtrip(prefix) == prefix
    custom = CustomSeminorms(
        (CustomLevel((((1, F(1)), (2, F(-1))),), "sum"),), SingleBox(2), "rational"
    )
    assert roundtrip(custom) == custom


def test_sup_partial_system_roundtrip():
    box = SingleBox(2)
    base = KoetheSeminorms(((1, 1),), box, "rational")
    ops = [
        FiniteRankOperator.from_matrix(box, "rational", [[1, 0], [1, 0]], "a1"),
        FiniteRankOperator.from_matrix(box, "rational", [[0, 0], [-1, 1]], "a2"),
    ]
    sup = SupPartialSumSeminorms(base, ops)
    # not a dataclass, so compare canonical text
    assert identical_after_roundtrip(sup)
    decoded = roundtrip(sup)
    y = vector_from_dense(box, "rational", [F(1), F(0)])
    assert decoded.value(1, y) == sup.value(1, y)


def test_operator_roundtrip_preserves_declared_range_basis():
    box = SingleBox(2)
    op = FiniteRankOperator.from_matrix(box, "rational", [[1, 1], [0, 2]], "a")
    assert roundtrip(op) == op
    # a schedule operator carries a range basis that from_matrix would not pick
    override = FiniteRankOperator(
        box, "rational", op.matrix, (vector_from_dense(box, "rational", [F(1), F(2)]),), "b"
    )
    decoded = roundtrip(override)
    assert decoded.range_basis == override.range_basis


def test_schedule_and_derived_objects():
    box = SingleBox(2)
    system = KoetheSeminorms(((1, 1),), box, "rational")
    a = FiniteRankOperator.from_matrix(box, "rational", [[1, 1], [0, 2]], "a")
    schedule = build_schedule([a], system, rng=random.Random(0), prefix_samples=5)
    assert roundtrip(schedule) == schedule
    assert roundtrip(schedule.splits[0]) == schedule.splits[0]
    assert roundtrip(schedule.splits[0].decomposition) == schedule.splits[0].decomposition
    y = element_from_components(schedule, [1, 2, 3, 4, 5, 6])
    assert roundtrip(y) == y


def test_report_roundtrips():
    box = SingleBox(3)
    system = KoetheSeminorms(
        tuple(tuple(k for _ in range(3)) for k in (1, 2, 3)), box, "rational"
    )
    family = []
    for p in range(3):
        rows = [[1 if (i == j == p) else 0 for j in range(3)] for i in range(3)]
        family.append(FiniteRankOperator.from_matrix(box, "rational", rows, f"c{p + 1}"))
    schedule = build_schedule(family, system, rng=random.Random(0), prefix_samples=5)
    cert = certify_equicontinuity(system, schedule, rng=random.Random(1), sample_count=5)
    assert roundtrip(cert) == cert
    rec = verify_reconstruction(system, schedule, rng=random.Random(2), sample_count=3)
    assert roundtrip(rec) == rec
    bas = basis_criterion_check(system, schedule, rng=random.Random(3), sample_count=5)
    assert roundtrip(bas) == bas


def test_witness_and_diagnostic_roundtrips():
    inst = VogtInstance(RhoTable.dyadic(), TripleBox(5, 3, 4), "rational", 4)
    assert roundtrip(inst) == inst
    witness = bap_failure_witness(inst)
    assert roundtrip(witness) == witness
    assert roundtrip(witness.cauchy) == witness.cauchy
    assert roundtrip(witness.floor) == witness.floor
    assert roundtrip(witness.decay_form) == witness.decay_form
    ev = witness_evidence(witness)
    assert roundtrip(ev) == ev
    verdict = injective_extension_test(
        inst.system(), witness.cauchy, 1, witness.decay_form, witness.floor
    )
    assert roundtrip(verdict) == verdict
    assert roundtrip(verdict).violated


def test_vogt_report_roundtrips():
    inst = VogtInstance(RhoTable.dyadic(), TripleBox(4, 2, 3), "rational", 3)
    rep = comparison_inequality_check(inst, rng=random.Random(0), sample_count=5)
    assert roundtrip(rep) == rep
    cert = nuclearity_certificate(inst, 1)
    assert roundtrip(cert) == cert
    pos = norm_positivity_check(inst)
    assert roundtrip(pos) == pos


def test_normed_basis_report_roundtrip():
    box = SingleBox(2)
    base = KoetheSeminorms(((1, 1),), box, "rational")
    a1 = FiniteRankOperator.from_matrix(box, "rational", [[1, 0], [1, 0]], "a1")
    a2 = FiniteRankOperator.from_matrix(box, "rational", [[0, 0], [-1, 1]], "a2")
    report = basis_sup_norms(base, [a1, a2], rng=random.Random(0), sample_count=5)
    assert identical_after_roundtrip(report)


def test_dumps_is_deterministic_and_sorted():
    v = TruncatedVector.create(SingleBox(3), "rational", {2: F(1, 3), 1: 4})
    text = jsonio.dumps(v)
    assert text == jsonio.dumps(roundtrip(v))
    data = json.loads(text)
    assert list(data) == sorted(data)


def test_fraction_encoding_shape():
    data = jsonio.encode(TruncatedVector.create(SingleBox(1), "rational", {1: F(2, 3)}))
    assert data["entries"] == [[1, {"num": 2, "den": 3}]]


def test_decode_error_paths():
    with pytest.raises(InputError):
        jsonio.decode({"kind": "wavelet"})
    with pytest.raises(InputError):
        jsonio.decode(["not", "a", "dict"])
    with pytest.raises(InputError):
        jsonio.decode({"no": "kind"})
    # a missing field is reported as such, not as an unknown kind
    with pytest.raises(InputError, match="missing field"):
        jsonio.decode({"kind": "single-box"})


def test_encode_rejects_unknown_objects():
    with pytest.raises(InputError):
        jsonio.encode(object())


def test_save_and_load(tmp_path):
    path = tmp_path / "witness.json"
    inst = VogtInstance(RhoTable.dyadic(), TripleBox(5, 3, 4), "rational", 4)
    witness = bap_failure_witness(inst)
    jsonio.save(witness, str(path))
    assert jsonio.load(str(path)) == witness
