"""Tests for random walks, Green estimates, ball growth and tail statistics."""

import pytest

from grigorchuk_lab.errors import CapacityError, PreconditionError
from grigorchuk_lab.services.core_tree import OmegaString, act_ray, multiply
from grigorchuk_lab.services.grigorchuk import FIRST_GROUP, germ_at
from grigorchuk_lab.services.measures import (
    build_eta2,
    build_eta2_restricted,
    build_identity,
    build_mu_beta,
    build_uniform,
)
from grigorchuk_lab.services.schreier import from_gray_index
from grigorchuk_lab.services.walk_lab import (
    ball_growth,
    default_checkpoints,
    eta0_envelope,
    green_mc,
    moment_growth,
    mu_beta_envelope,
    run_walk,
    stabilization_stats,
    tail_report,
    weighted_green_sum,
)


@pytest.fixture(name="uniform")
def uniform_fixture():
    return build_uniform(seed=5)


def test_identity_walk_stays_home():
    """The id sampler never moves or flips."""
    trajectory = run_walk(build_identity(), 20, seed=1)
    assert trajectory.positions == [0] * 21
    assert trajectory.flips == []
    assert set(trajectory.germs) == {""}
    summary = trajectory.summary()
    assert summary["final_germ"] == "e"
    assert summary["completed"] == 20
    assert summary["last_flip"] is None


def test_walk_needs_steps(uniform):
    """T >= 1."""
    with pytest.raises(PreconditionError):
        run_walk(uniform, 0)


def test_walk_is_reproducible(uniform):
    """Same seed, same trajectory."""
    first = run_walk(uniform, 100, seed=9)
    second = run_walk(uniform, 100, seed=9)
    assert first.positions == second.positions
    assert first.flips == second.flips


def test_uniform_walk_flips(uniform):
    """u_S picks up c and d germs at o."""
    trajectory = run_walk(uniform, 200, seed=2)
    assert trajectory.flips
    assert trajectory.cosets[0] == 0


def test_germ_bookkeeping_replays(uniform):
    """The recorded germ and position agree with the product of the steps."""
    for seed in range(5):
        trajectory = run_walk(uniform, 60, seed=seed, keep_elements=True)
        product = multiply(*trajectory.elements)
        assert germ_at(product, "") == trajectory.germs[-1]
        assert act_ray("", product) == from_gray_index(trajectory.positions[-1]).ray


def test_restricted_germs_never_flip():
    """(u_ab + eta_2) / 2 has germs in <b> at every point."""
    sampler = build_eta2_restricted(nmax=4, seed=3)
    for seed in range(3):
        assert run_walk(sampler, 40, seed=seed).flips == []


def test_default_checkpoints():
    """Powers of ten below the horizon."""
    assert default_checkpoints(10_000) == [10, 100, 1000]
    assert default_checkpoints(5) == [2]


def test_stabilization_identity():
    """Nobody flips under the id sampler."""
    result = stabilization_stats(build_identity(), 50, 3, seed=100)
    assert result.seeds == [100, 101, 102]
    assert result.fraction_flipping_after == [0.0]
    assert result.total_flips == 0
    assert result.histogram == {}
    assert len(result.summaries) == 3


def test_stabilization_uniform_histogram(uniform):
    """Histogram bins add up to the flip count."""
    result = stabilization_stats(uniform, 100, 4)
    assert sum(result.histogram.values()) == result.total_flips > 0
    assert result.fraction_flipping_after[0] > 0


def test_green_identity():
    """Staying at o gives T + 1 visits per trajectory."""
    (result,) = green_mc(build_identity(), [0], 30, 4)
    assert result.estimate == 31
    assert result.stderr == 0
    assert result.half_horizon_estimate == 16


def test_green_uniform(uniform):
    """o is visited at least at time 0."""
    results = green_mc(uniform, [0, 1], 100, 3)
    assert results[0].estimate >= 1
    assert [r.target for r in results] == [0, 1]


def test_weighted_green_sum_vanishes_on_hb():
    """eta_2 has no bad germs near o."""
    result = weighted_green_sum(build_eta2(nmax=3, seed=1), 4, 20, 2, samples=8)
    assert result.total == 0
    assert result.flattening


def test_weighted_green_sum_uniform(uniform):
    """Half of u_S is bad at o."""
    result = weighted_green_sum(uniform, 4, 50, 2)
    assert result.weights[0] == pytest.approx(0.5)
    assert result.partial_sums == sorted(result.partial_sums)


def test_ball_growth_first_radii():
    """v(0..3) = 1, 5, 11, 23."""
    result = ball_growth(FIRST_GROUP, 3)
    assert result.sizes == [1, 5, 11, 23]
    assert result.radii == [0, 1, 2, 3]


def test_ball_growth_cap():
    """Radii above the configured cap raise."""
    with pytest.raises(CapacityError):
        ball_growth(FIRST_GROUP, 11)


def test_moment_growth_hand_example():
    """rho, phi and R on four equally likely lengths."""
    rho, phi, growth = moment_growth([1, 2, 3, 4], [1, 2, 4])
    assert rho == {1: 1.0, 2: 3.0, 4: 4.0}
    assert phi == {1: 0.25, 2: 1.5, 4: 2.5}
    assert growth == {1: 0.25, 2: 3.0, 4: 10.0}


def test_tail_report_identity():
    """The id sampler has an empty tail."""
    result = tail_report(build_identity(), 8)
    assert result.tail == [0.0]
    assert set(result.R.values()) == {0.0}
    assert result.volume_lower_curve == [(0.0, n) for n in sorted(result.R)]


def test_tail_report_envelope(uniform):
    """Envelope constants are reported when an envelope is given."""
    result = tail_report(uniform, 16, grid=[1.0, 2.0], envelope=([1.0], [0.5]))
    assert result.tail == [1.0, 0.0]
    assert result.envelope_constant == pytest.approx(2.0)


def test_envelopes():
    """One radius per level."""
    radii, bounds = eta0_envelope(5, 0.1)
    assert len(radii) == len(bounds) == 5
    _, info = build_mu_beta(OmegaString("", "201"), nmax=6)
    radii, bounds = mu_beta_envelope(info)
    assert len(radii) == 2
    assert bounds == [2.0 ** (-3 * 0.9), 2.0 ** (-6 * 0.9)]


def test_ball_growth_increases_to_radius_eight():
    """Ball sizes grow strictly up to radius 8."""
    sizes = ball_growth(FIRST_GROUP, 8).sizes
    assert sizes == [1, 5, 11, 23, 40, 68, 108, 176, 271]
    assert all(x < y for x, y in zip(sizes, sizes[1:]))
