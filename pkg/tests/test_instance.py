import pytest

from conftest import FIXTURES, instance_or_skip
from shopbound.instance import (
    Instance,
    InvalidInstance,
    MachineIndexOutOfRange,
    MalformedHeader,
    NonPositiveDuration,
    OperationSpec,
    TruncatedJobLine,
    WrongPairCount,
    find_instance,
    horizon,
    load_instance,
    make_instance,
    parse_auto,
    parse_fjssp,
    parse_jssp,
    serialize,
)

CORPUS = sorted((FIXTURES / "instances").rglob("*.txt"))


def alts(inst):
    return [[op.alternatives for op in job] for job in inst.jobs]


def test_fjssp_single_op():
    inst = parse_fjssp("1 1\n1 1 1 4\n")
    assert (inst.job_count, inst.machine_count) == (1, 1)
    assert alts(inst) == [[((0, 4),)]]
    assert inst.is_jssp()


def test_fjssp_flexible_op():
    inst = parse_fjssp("2 2\n2 1 1 3 1 2 2\n1 2 1 5 2 5\n")
    assert alts(inst) == [[((0, 3),), ((1, 2),)], [((0, 5), (1, 5))]]
    assert not inst.is_jssp()


def test_fjssp_avg_flex_header_and_crlf():
    inst = parse_fjssp("1 2 1.5\r\n1 2 1 3 2 4\r\n\r\n")
    assert alts(inst) == [[((0, 3), (1, 4))]]


def test_jssp_examples():
    assert alts(parse_jssp("1 2\n0 3 1 2\n")) == [[((0, 3),), ((1, 2),)]]
    two = parse_jssp("2 1\n0 4\n0 6\n")
    assert alts(two) == [[((0, 4),)], [((0, 6),)]]
    assert two.is_jssp()


@pytest.mark.parametrize("text, exc, line", [
    ("x 1\n1 1 1 4\n", MalformedHeader, 1),
    ("", MalformedHeader, None),
    ("2 1\n1 1 1 4\n", TruncatedJobLine, None),
    ("1 1\n2 1 1 4\n", TruncatedJobLine, 2),
    ("1 1\n1 1 2 4\n", MachineIndexOutOfRange, 2),
    ("1 1\n1 1 0 4\n", MachineIndexOutOfRange, 2),
    ("1 1\n1 1 1 0\n", NonPositiveDuration, 2),
])
def test_fjssp_errors(text, exc, line):
    with pytest.raises(exc) as info:
        parse_fjssp(text)
    if line is not None:
        assert info.value.line == line
        assert f"line {line}" in str(info.value)


def test_jssp_errors():
    with pytest.raises(WrongPairCount) as info:
        parse_jssp("1 2\n0 3\n")
    assert info.value.line == 2
    with pytest.raises(MachineIndexOutOfRange):
        parse_jssp("1 1\n1 3\n")
    with pytest.raises(NonPositiveDuration):
        parse_jssp("1 1\n0 -2\n")


def test_auto_detects_both_shapes():
    assert alts(parse_auto("2 2\n2 1 1 3 1 2 2\n1 2 1 5 2 5\n"))[1] == [((0, 5), (1, 5))]
    assert alts(parse_auto("1 2\n0 3 1 2\n")) == [[((0, 3),), ((1, 2),)]]


def test_horizon_examples():
    assert horizon(make_instance("a", 1, [[[(0, 4)]]])) == 4
    assert horizon(make_instance("b", 2, [[[(0, 5), (1, 7)]], [[(0, 2)]]])) == 9


def test_model_invariants():
    with pytest.raises(InvalidInstance):
        OperationSpec(0, 0, ())
    with pytest.raises(InvalidInstance):
        OperationSpec(0, 0, ((0, 2), (0, 3)))
    with pytest.raises(InvalidInstance):
        make_instance("bad", 1, [[[(1, 2)]]])
    op = OperationSpec(0, 0, ((0, 5), (1, 3)))
    assert (op.min_duration, op.max_duration, op.duration_on(1), op.duration_on(2)) == (3, 5, 3, None)
    with pytest.raises(InvalidInstance):
        Instance("x", 1, 1, ((OperationSpec(0, 1, ((0, 1),)),),))


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.stem)
def test_round_trip_corpus(path):
    inst = load_instance(path)
    again = parse_fjssp(serialize(inst), inst.name)
    assert again == inst
    assert again.is_jssp()


def test_ta45_dimensions():
    inst = load_instance(FIXTURES / "instances" / "taillard" / "ta45.txt", "jssp")
    assert (inst.job_count, inst.machine_count) == (30, 20)
    assert horizon(inst) >= 1997


def test_find_instance_by_stem_and_dataset(tmp_path, monkeypatch):
    (tmp_path / "brandimarte").mkdir()
    (tmp_path / "brandimarte" / "mkx.txt").write_text("1 1\n1 1 1 4\n")
    monkeypatch.setenv("SHOPBOUND_INSTANCES", str(tmp_path))
    assert find_instance("mkx") == tmp_path / "brandimarte" / "mkx.txt"
    assert find_instance("mkx", dataset="taillard") is None
    assert load_instance(find_instance("mkx")).name == "mkx"


def test_mk10_when_available():
    inst = instance_or_skip("mk10")
    assert (inst.job_count, inst.machine_count) == (20, 15)
