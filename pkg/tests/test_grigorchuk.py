"""Tests for germs at cofinal rays and the subgroup H^b."""

import logging

import pytest

from grigorchuk_lab.errors import PreconditionError
from grigorchuk_lab.services.core_tree import Element, act_ray, iota, multiply
from grigorchuk_lab.services.grigorchuk import (
    FIRST_GROUP,
    bad_germ_support,
    check_ray,
    digit,
    germ_at,
    germ_coset,
    germ_label,
    germ_multiplicative_at_fixed_point,
    in_Hb,
    in_hb_orbit,
    omega_kills,
    parse_omega,
)
from grigorchuk_lab.services.subst_calculus import build_hn


def word(text: str) -> Element:
    return Element(text, 0, FIRST_GROUP)


def test_germs_of_generators_at_origin():
    """b, c, d fix 1^inf with themselves as germs."""
    for s in "bcd":
        assert germ_at(word(s), "") == s


def test_germ_cosets():
    """id and b form one coset, c and d the other."""
    assert germ_coset("") == germ_coset("b") == 0
    assert germ_coset("c") == germ_coset("d") == 1
    assert germ_label("") == "e"
    assert germ_label("c") == "c"


def test_check_ray_rejects_non_binary():
    """Ray prefixes are binary."""
    with pytest.raises(PreconditionError):
        check_ray("012")


def test_parse_omega_warns_on_collapsed_germs(caplog):
    """An omega missing a digit eventually gets a warning."""
    with caplog.at_level(logging.WARNING, logger="grigorchuk_lab.services.grigorchuk"):
        parse_omega("012|0")
    assert "torsion" in caplog.text


def test_parse_omega_quiet_for_first_group(caplog):
    """(012)^inf parses without warnings."""
    with caplog.at_level(logging.WARNING, logger="grigorchuk_lab.services.grigorchuk"):
        assert parse_omega("|012") == FIRST_GROUP
    assert caplog.text == ""


def test_in_hb_letters():
    """b lies in H^b and c does not."""
    assert in_Hb(word("b")) is True
    assert in_Hb(word("a")) is True
    assert in_Hb(word("c")) is False


def test_in_hb_short_words():
    """ab has sections b and a; ac has a c section."""
    assert in_Hb(word("ab")) is True
    assert in_Hb(word("ac")) is False


def test_in_hb_rigid_commutator():
    """[a, b] and [b, a] planted at 111 have only b-germs."""
    assert in_Hb(iota(FIRST_GROUP, "b", "111", a_first=True)) is True
    assert in_Hb(iota(FIRST_GROUP, "b", "111")) is True


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_hn_lies_in_hb(n):
    """The h_n sequence lives in H^b."""
    assert in_Hb(build_hn(n)) is True


def test_hb_closed_under_products():
    """Products of h_n stay in H^b."""
    assert in_Hb(multiply(build_hn(1), build_hn(3), build_hn(2))) is True


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_hn_respects_orbit_constraint(n):
    """h_n moves 1^inf inside the H^b-orbit."""
    assert in_hb_orbit(act_ray("", build_hn(n)))


def test_in_hb_orbit_positions():
    """Digits at positions 4, 7, ... must be 1."""
    assert in_hb_orbit("")
    assert in_hb_orbit("000")
    assert in_hb_orbit("0001")
    assert not in_hb_orbit("1110")


def test_bad_germ_support():
    """d is bad at 1^inf, ac carries its c germ at 01^inf."""
    assert bad_germ_support(word("d")) == {""}
    assert bad_germ_support(word("b")) == set()
    assert bad_germ_support(word("ac")) == {"0"}
    assert germ_at(word("ac"), "0") == "c"


def test_germ_multiplicative_at_fixed_point():
    """Germs multiply at a common fixed ray."""
    assert germ_multiplicative_at_fixed_point(word("b"), word("c"))
    assert germ_multiplicative_at_fixed_point(word("d"), word("ab"), "0")


def test_germ_multiplicative_needs_fixed_ray():
    """The first factor has to fix the ray."""
    with pytest.raises(PreconditionError):
        germ_multiplicative_at_fixed_point(word("a"), word("b"))


def test_digits_and_killed_letters():
    """omega_n and the letter it kills."""
    omega = parse_omega("1|20")
    assert [digit(omega, n) for n in range(5)] == [1, 2, 0, 2, 0]
    assert [omega_kills(omega, n) for n in range(3)] == ["c", "b", "d"]
