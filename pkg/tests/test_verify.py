"""Tests for the verification suites."""

import itertools

import numpy as np
import pytest

from grigorchuk_lab.errors import PreconditionError
from grigorchuk_lab.services import verify
from grigorchuk_lab.services.core_tree import OmegaString
from grigorchuk_lab.services.measures import Upsilon, check_frD
from grigorchuk_lab.services.verify import expected_ckv_portrait, run_suite, suite_names, upsilon_points


def test_suite_names():
    """Every suite is listed, plus all."""
    assert suite_names() == [
        "relations",
        "gray-vs-bfs",
        "cube-independence",
        "ckv-portrait",
        "zeta-portraits",
        "construction",
        "germ-bookkeeping",
        "all",
    ]


def test_relations_suite_passes():
    """Generators, Klein relations and orders."""
    checks = run_suite("relations")
    assert checks
    assert all(check.passed for check in checks), [c for c in checks if not c.passed]
    assert {check.suite for check in checks} == {"relations"}


def test_gray_suite_covers_acceptance_ranges():
    """All pairs below 2^12 and the depth bounds below 2^16."""
    assert verify.GRAY_PAIR_LIMIT == 1 << 12
    assert verify.GRAY_BOUND_LIMIT == 1 << 16


def test_gray_suite_passes(monkeypatch):
    """Gray distance against breadth-first search on a reduced ball."""
    monkeypatch.setattr(verify, "GRAY_PAIR_LIMIT", 1 << 8)
    monkeypatch.setattr(verify, "GRAY_BOUND_LIMIT", 1 << 10)
    checks = run_suite("gray-vs-bfs")
    assert len(checks) == 3
    assert all(check.passed for check in checks), [c for c in checks if not c.passed]


def test_unknown_suite():
    """Unknown names raise."""
    with pytest.raises(PreconditionError):
        run_suite("nope")


def test_expected_ckv_portrait_shape():
    """One sibling section per digit of v, then c at the end of v."""
    omega = OmegaString("", "201")
    expected = expected_ckv_portrait(omega, 0, "1101110")
    assert [vertex for vertex, _ in expected] == [
        "0", "10", "111", "1100", "11010", "110110", "1101111", "1101110",
    ]
    assert expected[-1][1].word == "c"
    assert expected[-1][1].level == 7
    assert [section.word for _, section in expected[:3]] == ["a", "bab", ""]


def test_upsilon_points_enumerates_small_supports():
    """Lambda_3 on (201)^inf is listed in full."""
    upsilon = Upsilon(check_frD(OmegaString("", "201"), 3), 3, 6)
    points = list(upsilon_points(upsilon, np.random.default_rng(0)))
    assert len(points) == upsilon.size


def test_upsilon_points_samples_every_eps(monkeypatch):
    """Large supports get the same number of gamma draws for each eps."""
    monkeypatch.setattr(verify, "UNIQUE_DRAWS_PER_EPS", 2)
    upsilon = Upsilon(check_frD(OmegaString("", "201"), 3), 6, 12)
    assert upsilon.size > verify.UNIQUE_ENUMERATION_CAP
    points = list(upsilon_points(upsilon, np.random.default_rng(0)))
    assert len(points) == 2 * 64
    assert {p.eps for p in points} == set(itertools.product((0, 1), repeat=6))
