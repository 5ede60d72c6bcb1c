import pytest

from popmatch.model import (
    Instance,
    Matching,
    ParseError,
    parse_instance,
    parse_matching,
    serialize_instance,
    serialize_matching,
)

from conftest import FIG1_TEXT


def test_parse_serialize_round_trip(fig1):
    assert parse_instance(serialize_instance(fig1)) == fig1


def test_comments_and_blank_lines_ignored(fig1):
    noisy = "# header\n\n" + FIG1_TEXT.replace("a2: b1 b2", "a2: b1 b2  # tail")
    assert parse_instance(noisy) == fig1


def test_roommates_parse():
    inst = parse_instance("roommates\nV x y z\nx: y z\ny: x\nz: x\n")
    assert inst.kind == "roommates"
    assert inst.edges == (("x", "y"), ("x", "z"))


def test_missing_kind_line():
    with pytest.raises(ParseError):
        parse_instance("")


def test_unknown_kind():
    with pytest.raises(ParseError):
        parse_instance("triangle\nV x\n")


def test_asymmetric_lists_rejected():
    bad = "marriage\nA a\nB b c\na: b c\nb: a\nc:\n"
    with pytest.raises((ParseError, ValueError)):
        parse_instance(bad)


def test_duplicate_neighbor_rejected():
    bad = "marriage\nA a\nB b\na: b b\nb: a\n"
    with pytest.raises((ParseError, ValueError)):
        parse_instance(bad)


def test_self_loop_rejected():
    with pytest.raises((ParseError, ValueError)):
        parse_instance("roommates\nV x y\nx: x y\ny: x\n")


def test_same_side_edge_rejected():
    bad = "marriage\nA a c\nB b\na: b c\nb: a\nc: a\n"
    with pytest.raises((ParseError, ValueError)):
        parse_instance(bad)


def test_parse_error_carries_position():
    try:
        parse_instance("marriage\nA a\nB b\na: q\nb: a\n")
    except ParseError as e:
        assert e.line == 4
    else:
        pytest.fail("expected a parse error")


def test_matching_partner_and_contains(fig1, m1):
    assert m1.partner("a1") == "b1"
    assert m1.partner("b2") == "a2"
    assert m1.partner("a3") is None
    assert ("a1", "b1") in m1
    assert ("b1", "a1") in m1
    assert ("a1", "b2") not in m1
    assert len(m1) == 2


def test_matching_duplicate_pair_tolerated(fig1):
    m = Matching(fig1, [("a1", "b1"), ("b1", "a1")])
    assert len(m) == 1


def test_matching_vertex_used_twice_rejected(fig1):
    with pytest.raises(ValueError):
        Matching(fig1, [("a1", "b1"), ("a1", "b2")])


def test_matching_non_edge_rejected(fig1):
    with pytest.raises(ValueError):
        Matching(fig1, [("a3", "b3")])


def test_parse_matching_unknown_vertex(fig1):
    with pytest.raises(ParseError):
        parse_matching("a1 zz\n", fig1)


def test_matching_round_trip(fig1, m2):
    assert parse_matching(serialize_matching(m2), fig1) == m2


def test_instance_equality_ignores_list_identity():
    a = parse_instance(FIG1_TEXT)
    b = parse_instance(FIG1_TEXT)
    assert a == b and hash(a) == hash(b)


def test_restrict_keeps_induced_lists(fig1):
    sub = fig1.restrict({"a1", "a2", "b1", "b2"})
    assert sub.vertices == ("a1", "a2", "b1", "b2")
    assert sub.neighbors("a1") == ("b1", "b2")
    assert sub.neighbors("b1") == ("a1", "a2")
