"""Tests for Fr(D), the index sets, the modified generators and the mixture samplers."""

import itertools
import math

import pytest

from grigorchuk_lab.errors import FrConditionError, PreconditionError
from grigorchuk_lab.services.core_tree import OmegaString, act_ray, all_vertices
from grigorchuk_lab.services.grigorchuk import FIRST_GROUP, bad_germ_support
from grigorchuk_lab.services.measures import (
    Upsilon,
    bad_locations,
    build_eta0,
    build_eta2,
    build_Fjn,
    build_gjv,
    build_identity,
    build_mu_beta,
    build_sampler,
    build_uniform,
    build_Vk,
    build_Wk,
    check_frD,
    conjugator_h,
    conjugator_product,
    cube_weights,
    desk_kn,
    family_size_formula,
    is_theorem_faithful,
    sample_upsilon,
    support_iter,
)
from grigorchuk_lab.services.subst_calculus import build_gn
from grigorchuk_lab.services.verify import ckv_portrait_matches

RESTRICTED = OmegaString("", "201")


@pytest.fixture(name="fr")
def fr_fixture():
    return check_frD(RESTRICTED, 3)


def test_frd_passes_after_shift():
    """01|201 needs two digits dropped to start on 201."""
    fr = check_frD(OmegaString.parse("01|201"), 3)
    assert fr.passed
    assert fr.shift == 2
    assert fr.normalized.digit(0) == 2


def test_frd_first_group_shift():
    """(012)^inf is normalized to (201)^inf."""
    fr = check_frD(FIRST_GROUP, 3)
    assert fr.passed
    assert fr.shift == 2


def test_frd_mixed_blocks():
    """201211 repeated has a pattern in every block."""
    fr = check_frD(OmegaString.parse("|201211"), 3)
    assert fr.passed
    assert fr.shift == 0
    assert fr.m_values(4) == [0, 0, 0, 0]


def test_frd_failure():
    """A constant string fails at the first block."""
    fr = check_frD(OmegaString.parse("|0"), 3)
    assert not fr.passed
    assert fr.failure_block == 0
    with pytest.raises(FrConditionError) as excinfo:
        fr.require()
    assert excinfo.value.block == 0


def test_frd_needs_d_at_least_three():
    """D = 2 has no room for a pattern."""
    with pytest.raises(PreconditionError):
        check_frD(RESTRICTED, 2)


def test_index_points(fr):
    """I_omega = {3, 6, 9, ...} for (201)^inf."""
    assert fr.index_points(12) == [3, 6, 9, 12]
    assert fr.in_I(9)
    assert not fr.in_I(10)


def test_wk(fr):
    """W_6^0 frees positions 3 and 6."""
    assert set(build_Wk(fr, 0, 6)) == {"110110", "110111", "111110", "111111"}


def test_wk_requires_multiples(fr):
    """n and k are multiples of D."""
    with pytest.raises(PreconditionError):
        build_Wk(fr, 0, 4)


@pytest.mark.parametrize("j,k", itertools.product(range(4), (3, 6, 9)))
def test_vk_size(fr, j, k):
    """|V_k^j| = 2^(k/D) and every vertex ends in 0."""
    vertices = build_Vk(fr, j, k)
    assert len(vertices) == 1 << (k // 3)
    assert all(vertex.v.endswith("0") for vertex in vertices)
    assert len({vertex.v for vertex in vertices}) == len(vertices)


def test_conjugator_moves_origin(fr):
    """The conjugator carries 1^inf to v 1^inf."""
    for vertex in build_Vk(fr, 0, 6):
        assert act_ray("", conjugator_product(fr.normalized, 0, vertex.v)) == vertex.v


def test_conjugator_index_range(fr):
    """h_i^v exists for 1 <= i <= |v|."""
    with pytest.raises(PreconditionError):
        conjugator_h(fr.normalized, 0, "110", 4)


def test_ckv_portrait(fr):
    """c_0^v has the expected sections along v."""
    for vertex in build_Vk(fr, 0, 6)[:2]:
        passed, detail = ckv_portrait_matches(fr.normalized, 0, vertex.v)
        assert passed, detail


def test_gjv_requires_trailing_zero(fr):
    """Index vertices end in 0."""
    with pytest.raises(PreconditionError):
        build_gjv(fr.normalized, 1, "111")


@pytest.mark.parametrize("j", [1, 2, 3])
def test_bad_locations(j):
    """B(j, v) has 2^j points of odd parity."""
    v = "110110"
    found = bad_locations(j, v)
    assert len(found) == 1 << j
    assert all((j + 1 + ray[: j + 1].count("1")) % 2 for ray in found)
    assert all(ray.endswith(v[1:]) for ray in found)


def test_modified_generator_bad_germs(fr):
    """The bad germs of g_1^v sit exactly on B(1, v)."""
    v = build_Vk(fr, 1, 6)[1].v
    generator = build_gjv(fr.normalized, 1, v)
    assert bad_germ_support(generator.element) == generator.expected_bad_locations()


@pytest.mark.parametrize("j,n,k_n", [(1, 3, 3), (1, 6, 6), (4, 6, 6)])
def test_family_size(fr, j, n, k_n):
    """|F_{j,n}| matches 2^((2k_n - (n - j + jbar)) / D)."""
    family = build_Fjn(fr, j, n, k_n)
    assert family.modified
    assert family.size == family_size_formula(j, n, k_n, 3)


def test_unmodified_family(fr):
    """Levels without a 2 above keep g_j alone."""
    family = build_Fjn(fr, 2, 3, 3)
    assert not family.modified
    assert family.size == 1
    with pytest.raises(PreconditionError):
        family.member(1)


def test_family_members_act_as_gj(fr):
    """Every member of F_{1,3} acts as g_1 on level 7."""
    family = build_Fjn(fr, 1, 3, 3)
    reference = build_gn(fr.normalized, 1)
    vertices = list(all_vertices(7))
    targets = [reference.act(x) for x in vertices]
    for member in family.members():
        assert [member.act(x) for x in vertices] == targets


def test_upsilon_recovers_eps(fr):
    """The image of 1^7 determines eps over all of Lambda_3."""
    upsilon = Upsilon(fr, 3, desk_kn(3, 6, 3))
    assert [f.size for f in upsilon.families] == [8, 1, 1]
    seen = {}
    for draw in upsilon.support_iter():
        image = draw.element.act("1" * 7)
        assert seen.setdefault(image, draw.eps) == draw.eps
    assert set(seen.values()) == set(itertools.product((0, 1), repeat=3))


def test_upsilon_size(fr):
    """log2 |Lambda_n| counts the eps bits and the family bits."""
    upsilon = Upsilon(fr, 3, 6)
    assert upsilon.log2_size == 3 + sum(f.log2_size for f in upsilon.families)
    with pytest.raises(PreconditionError):
        Upsilon(fr, 0, 3)


def test_sample_upsilon_is_reproducible(fr):
    """Same seed, same draw; every draw stays under the length bound."""
    first = sample_upsilon(fr, 3, 3, seed=11)
    second = sample_upsilon(fr, 3, 3, seed=11)
    assert (first.eps, first.gammas) == (second.eps, second.gammas)
    assert first.element.construction_length <= Upsilon(fr, 3, 3).length_bound


def test_support_iter_covers_lambda(fr):
    """Enumeration yields one draw per point of Lambda_n."""
    draws = list(support_iter(fr, 3, 3))
    assert len(draws) == Upsilon(fr, 3, 3).size
    assert len({(d.eps, d.gammas) for d in draws}) == len(draws)


def test_desk_kn():
    """k_n = A floor(log2 n) rounded up to a multiple of D."""
    assert desk_kn(3, 6, 3) == 6
    assert desk_kn(6, 6, 3) == 12
    assert desk_kn(8, 4, 3) == 12


def test_uniform_sampler():
    """u_S is a symmetric single atom list."""
    sampler = build_uniform()
    assert sampler.weight_table() == {"u_S": 1.0}
    assert sampler.is_symmetric
    assert sampler.entropy_proxy() == pytest.approx(2.0)
    assert sampler.bad_germ_profile([""], samples=0) == {"": pytest.approx(0.5)}


def test_identity_sampler():
    """The id sampler always returns the identity."""
    sampler = build_identity()
    assert all(sample.element.to_explicit().word == "" for sample in sampler.sample(5))


def test_cube_weights():
    """Weights are normalized and decay."""
    weights = cube_weights(0.1, 8)
    assert sum(weights) == pytest.approx(1.0)
    assert weights[2] > weights[-1]
    with pytest.raises(PreconditionError):
        cube_weights(0.0, 8)


def test_eta0_symmetric():
    """eta_0 pairs every cube with its inverse."""
    sampler = build_eta0(nmax=4)
    table = sampler.weight_table()
    assert math.isclose(sum(table.values()), 1.0)
    assert sampler.is_symmetric
    assert table["F_1"] == table["F_1~"]


def test_eta2_has_no_bad_germs_at_origin():
    """eta_2 samples lie in H^b."""
    sampler = build_eta2(nmax=4, seed=1)
    assert sampler.bad_germ_profile([""], samples=16) == {"": 0.0}


def test_sampler_reproducible():
    """A clone with the same seed replays the same draws."""
    sampler = build_eta0(nmax=4, seed=7)
    first = [s.detail for s in sampler.clone(11).sample(10)]
    second = [s.detail for s in sampler.clone(11).sample(10)]
    assert first == second


def test_mu_beta_info():
    """mu_beta on 01|201 normalizes omega and records k_n."""
    sampler, info = build_mu_beta(OmegaString.parse("01|201"), D=3, beta=0.9, A=6, nmax=6)
    assert info.kn == {3: 6, 6: 12}
    assert sampler.flags["shift"] == 2
    assert sampler.omega == RESTRICTED
    assert not info.theorem_faithful
    assert sampler.is_symmetric
    assert sampler.weight_table()["u_S"] == pytest.approx(0.5)


def test_theorem_faithful_parameters():
    """A has to exceed D(1 + beta) / (2(1 - beta)) and be a multiple of D."""
    assert is_theorem_faithful(3, 0.9, 30)
    assert not is_theorem_faithful(3, 0.9, 29)
    assert not is_theorem_faithful(3, 0.5, 30)


def test_mu_beta_rejects_bad_input():
    """Fr(D) failures and betas outside (0, 1) are refused."""
    with pytest.raises(FrConditionError):
        build_mu_beta(OmegaString.parse("|0"), nmax=6)
    with pytest.raises(PreconditionError):
        build_mu_beta(RESTRICTED, beta=1.0, nmax=6)
    with pytest.raises(PreconditionError):
        build_mu_beta(RESTRICTED, nmax=6, mode="fast")


def test_build_sampler_names():
    """Unknown names and first-group samplers elsewhere are refused."""
    assert build_sampler("uniform").name == "uniform"
    with pytest.raises(PreconditionError):
        build_sampler("eta2", RESTRICTED)
    with pytest.raises(PreconditionError):
        build_sampler("bogus")
