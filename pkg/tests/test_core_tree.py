"""Tests for tree arithmetic: words, one-step decomposition, action and identity."""

import math

import numpy as np
import pytest

from grigorchuk_lab.errors import LevelMismatchError, OmegaParseError, PreconditionError
from grigorchuk_lab.services.core_tree import (
    Element,
    OmegaString,
    act_ray,
    act_vertex,
    all_vertices,
    element_order,
    equal,
    expand,
    iota,
    is_identity,
    klein_multiply,
    multiply,
    normalize_ray,
    one_step,
    portrait_along_ray,
    reduce_word,
    rigid,
    rigid_commutator,
    section,
    shifted,
)

FIRST = OmegaString("", "012")


def word(text: str, level: int = 0, omega: OmegaString = FIRST) -> Element:
    return Element(text, level, omega)


def test_klein_table():
    """b, c, d multiply as the Klein four-group."""
    assert klein_multiply("b", "c") == "d"
    assert klein_multiply("c", "d") == "b"
    assert klein_multiply("b", "d") == "c"
    assert klein_multiply("c", "c") == ""
    assert klein_multiply("", "d") == "d"


def test_reduce_word():
    """Adjacent a's cancel and adjacent Klein letters merge."""
    assert reduce_word("aa") == ""
    assert reduce_word("abca") == "ada"
    assert reduce_word("abba") == ""
    assert reduce_word("bcd") == ""
    assert reduce_word("abacad") == "abacad"


def test_reduce_word_rejects_letters():
    """Only a, b, c, d are letters."""
    with pytest.raises(PreconditionError):
        reduce_word("abe")


def test_omega_parse_and_digits():
    """Preperiod then period, forever."""
    omega = OmegaString.parse("01|201")
    assert [omega.digit(n) for n in range(8)] == [0, 1, 2, 0, 1, 2, 0, 1]
    assert str(omega) == "01|201"
    assert OmegaString.parse("012") == FIRST


@pytest.mark.parametrize("text", ["|", "01|", "3|012", "0|1|2", "ab"])
def test_omega_parse_errors(text):
    """Empty periods, foreign digits and extra bars are rejected."""
    with pytest.raises(OmegaParseError):
        OmegaString.parse(text)


def test_omega_shift_and_kills():
    """Digit 0 kills d, 1 kills c, 2 kills b."""
    assert FIRST.kills(0) == "d"
    assert FIRST.kills(1) == "c"
    assert FIRST.kills(2) == "b"
    assert FIRST.shift(2) == OmegaString("", "201")
    assert OmegaString("01", "2").shift(5) == OmegaString("", "2")


def test_letter_one_step():
    """b = (a, b), c = (a, c), d = (id, d) at level 0 of (012)^inf."""
    left, right, swap = one_step(word("b"))
    assert (left.word, right.word, swap) == ("a", "b", False)
    left, right, swap = one_step(word("d"))
    assert (left.word, right.word, swap) == ("", "d", False)
    left, right, swap = one_step(word("a"))
    assert (left.word, right.word, swap) == ("", "", True)


def test_one_step_levels():
    """Sections live one level down."""
    left, right, _ = one_step(word("ab", level=4))
    assert left.level == right.level == 5


def test_one_step_recomposes_action():
    """(left, right, swap) reproduces the action below the root."""
    g = word("abacabad")
    left, right, swap = one_step(g)
    for vertex in all_vertices(6):
        head = vertex[0]
        tail = (left if head == "0" else right).act(vertex[1:])
        flipped = ("1" if head == "0" else "0") if swap else head
        assert g.act(vertex) == flipped + tail


def test_right_action_composes():
    """x.(gh) = (x.g).h."""
    g, h = word("abac"), word("adab")
    for vertex in all_vertices(5):
        assert multiply(g, h).act(vertex) == h.act(g.act(vertex))


def test_act_vertex_rejects_non_binary():
    """Vertices are binary strings."""
    with pytest.raises(PreconditionError):
        act_vertex("012", word("a"))


def test_generators_are_involutions():
    """Every letter squares to the identity."""
    for s in "abcd":
        assert is_identity(word(s + s))


def test_klein_relations_hold_as_automorphisms():
    """bc = d, cd = b, bd = c on the tree."""
    assert equal(word("bc"), word("d"))
    assert equal(word("cd"), word("b"))
    assert equal(word("bd"), word("c"))


def test_ad_has_order_four():
    """(ad)^4 = id but (ad)^2 is not."""
    assert is_identity(word("ad" * 4))
    assert not is_identity(word("adad"))
    assert element_order(word("ad"), 16) == 4


def test_order_ab_is_sixteen():
    """ab has order 16 in the first group."""
    assert element_order(word("ab"), 64) == 16


def test_element_order_cap():
    """None when the order exceeds the cap."""
    assert element_order(word("ab"), 8) is None


def test_multiply_level_mismatch():
    """Elements of different levels do not multiply."""
    with pytest.raises(LevelMismatchError):
        multiply(word("a"), word("a", level=1))


def test_multiply_merges_explicit_words():
    """Explicit neighbours collapse to a reduced word."""
    product = multiply(word("ab"), word("ba"))
    assert isinstance(product, Element)
    assert product.word == ""


def test_trace_reports_germ_at_fixed_ray():
    """The germ of d at 1^inf is d; a moves 1^inf to 01^inf."""
    assert word("d").trace("") == ("", "d")
    assert word("a").trace("") == ("0", "")
    assert act_ray("", word("aba")) == "10"


def test_germ_of_b_is_b_at_every_level():
    """Germs use level-independent letters along 1^inf."""
    for level in range(4):
        assert word("b", level).trace("")[1] == "b"


def test_normalize_ray():
    """Trailing 1s are dropped."""
    assert normalize_ray("01011") == "010"
    assert normalize_ray("111") == ""


def test_iota_acts_below_vertex_only():
    """iota(d, v) moves nothing outside the subtree of v."""
    element = iota(FIRST, "d", "0")
    for vertex in all_vertices(6):
        if not vertex.startswith("0"):
            assert element.act(vertex) == vertex
    assert any(element.act(v) != v for v in all_vertices(6))


def test_iota_matches_rigid_commutator():
    """The explicit and lazy rigid commutators agree."""
    for vertex in ("0", "1", "01", "11"):
        gamma = FIRST.kills(len(vertex) - 1)
        explicit = iota(FIRST, gamma, vertex)
        lazy = rigid_commutator(FIRST, gamma, vertex)
        assert equal(explicit, lazy)


def test_iota_ab_moves_origin_past_the_vertex():
    """[a, b] planted at 1^{3k} sends 1^inf to 1^{3k+1}001^inf."""
    for k in (1, 2):
        vertex = "111" * k
        element = iota(FIRST, "b", vertex, a_first=True)
        assert act_ray("", element) == "1" * (3 * k + 1) + "00"
        assert len(element.word) <= 2 ** (len(vertex) + 2)


def test_iota_orientations_are_inverse():
    """[b, a] and [a, b] planted at the same vertex multiply to the identity."""
    ba = iota(FIRST, "b", "111")
    ab = iota(FIRST, "b", "111", a_first=True)
    assert act_ray("", ba) == "11110"
    assert is_identity(multiply(ba, ab))


def test_iota_ab_is_trivial_off_its_vertex():
    """Sections of iota([a, b], 110) at the other depth-3 vertices are trivial."""
    element = iota(FIRST, "b", "110", a_first=True)
    for vertex in all_vertices(3):
        assert element.act(vertex) == vertex
        if vertex != "110":
            assert is_identity(section(element, vertex))


def test_iota_requires_killed_letter():
    """The commutator letter must be killed by the digit above."""
    with pytest.raises(PreconditionError):
        iota(FIRST, "b", "0")


def test_rigid_node_sections():
    """A rigid node is trivial off its vertex and equals its inner element below it."""
    inner = word("ab", level=2)
    node = rigid(inner, "01")
    assert is_identity(section(node, "1"))
    assert is_identity(section(node, "00"))
    assert equal(section(node, "01"), inner)


def test_shifted_node_keeps_action():
    """Shifting by a period multiple keeps the automorphism."""
    g = word("abacad")
    moved = shifted(g, 3)
    assert moved.level == 3
    for vertex in all_vertices(5):
        assert moved.act(vertex) == g.act(vertex)


def test_shifted_rejects_other_deltas():
    """Shifts must preserve the digit tail."""
    with pytest.raises(PreconditionError):
        shifted(word("ab"), 1)


def test_portrait_requires_fixed_vertex():
    """Portraits are taken along fixed vertices."""
    with pytest.raises(PreconditionError):
        portrait_along_ray(word("a"), "0")


def test_portrait_of_d():
    """d has sections id, d along 1 and the last entry is the section at the vertex."""
    portrait = portrait_along_ray(word("d"), "1")
    assert [vertex for vertex, _ in portrait] == ["0", "1"]
    assert is_identity(portrait[0][1])
    assert equal(portrait[1][1], word("d", level=1))


def test_relabel_to_usual_notation():
    """Level 1 of (012)^inf renames letters back to level 0."""
    g = word("ab", level=1)
    usual = g.usual()
    assert usual.level == 0
    assert usual.word == "ac"


def test_expand_explicit_element():
    """Explicit elements expand to themselves."""
    g = word("abab")
    assert expand(g) == g


def random_reduced_word(rng: np.random.Generator, length: int) -> str:
    start = int(rng.integers(0, 2))
    letters = []
    for i in range(start, start + length):
        letters.append("a" if i % 2 else str(rng.choice(["b", "c", "d"])))
    return reduce_word("".join(letters))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_sections_contract(seed):
    """Both sections of a reduced word g have length at most ceil((|g| + 1) / 2)."""
    rng = np.random.default_rng(seed)
    for _ in range(200):
        g = word(random_reduced_word(rng, int(rng.integers(2, 201))))
        if len(g.word) < 2:
            continue
        bound = math.ceil((len(g.word) + 1) / 2)
        left, right, _ = one_step(g)
        assert len(left.word) <= bound
        assert len(right.word) <= bound


def test_one_step_abab():
    """abab = (ca, ac) in usual notation, with no swap."""
    left, right, swap = one_step(word("abab"))
    assert not swap
    assert (left.usual().word, right.usual().word) == ("ca", "ac")


def test_section_of_conjugated_c():
    """[a, b] c [a, b]^-1 has section b at 10."""
    g = multiply(word("abab"), word("c"), word("baba"))
    assert section(g, "10").usual().word == "b"


def test_portrait_of_conjugated_c():
    """Portrait along 10 is cac at 0, id at 11 and b at 10."""
    g = multiply(word("abab"), word("c"), word("baba"))
    portrait = portrait_along_ray(g, "10")
    assert [vertex for vertex, _ in portrait] == ["0", "11", "10"]
    assert portrait[0][1].usual().word == "cac"
    assert is_identity(portrait[1][1])
    assert portrait[2][1].usual().word == "b"
