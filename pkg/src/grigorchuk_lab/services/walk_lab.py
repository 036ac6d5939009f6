"""Random walks driven by a MixtureSampler, observed on the orbit of o = 1^inf."""

from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from grigorchuk_lab.config import settings
from grigorchuk_lab.errors import CapacityError, PreconditionError
from grigorchuk_lab.services.core_tree import (
    LETTERS,
    Element,
    OmegaString,
    TreeNode,
    equal,
    klein_multiply,
    reduce_word,
)
from grigorchuk_lab.services.grigorchuk import germ_coset
from grigorchuk_lab.services.measures import BAD_GERMS, MixtureSampler, MuBetaInfo, betatail_radius
from grigorchuk_lab.services.schreier import OrbitPoint, from_gray_index, gray_index
from grigorchuk_lab.services.subst_calculus import lambda_zero

logger = logging.getLogger(__name__)

HORIZON_TOLERANCE = 0.02
FLATTENING_TOLERANCE = 0.05


@dataclass
class WalkTrajectory:
    steps: int
    seed: int
    positions: list[int]
    germs: list[str]
    flips: list[int]
    truncated: bool = False
    elements: list[TreeNode] = field(default_factory=list, repr=False)

    @property
    def last_flip(self) -> Optional[int]:
        return self.flips[-1] if self.flips else None

    @property
    def cosets(self) -> list[int]:
        return [germ_coset(g) for g in self.germs]

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "steps": self.steps,
            "completed": len(self.positions) - 1,
            "final_position": self.positions[-1],
            "max_position": max(self.positions),
            "final_germ": self.germs[-1] or "e",
            "flip_count": len(self.flips),
            "last_flip": self.last_flip,
            "truncated": self.truncated,
        }


def run_walk(
    sampler: MixtureSampler,
    T: int,
    seed: Optional[int] = None,
    keep_elements: bool = False,
) -> WalkTrajectory:
    """W_t = X_1 ... X_t; a coset flip at step t+1 when the germ of X_{t+1} at o.W_t is c or d."""
    if T < 1:
        raise PreconditionError("a walk needs at least one step")
    walker = sampler if seed is None else sampler.clone(seed)
    ray = ""
    germ = ""
    trajectory = WalkTrajectory(T, walker.seed, [0], [""], [])
    for t in range(T):
        step = walker.draw().element
        image, local = step.trace(ray)
        try:
            point = OrbitPoint.from_ray(image)
        except CapacityError:
            logger.warning("walk seed=%d left the orbit capacity at step %d; truncated", walker.seed, t + 1)
            trajectory.truncated = True
            break
        if local in BAD_GERMS:
            trajectory.flips.append(t)
        germ = klein_multiply(germ, local)
        ray = image
        trajectory.positions.append(gray_index(point))
        trajectory.germs.append(germ)
        if keep_elements:
            trajectory.elements.append(step)
    return trajectory


def default_checkpoints(T: int) -> list[int]:
    points = [10**e for e in range(1, int(math.log10(T)) + 1) if 10**e < T]
    return points or [max(T // 2, 1)]


@dataclass
class StabilizationResult:
    steps: int
    trials: int
    seeds: list[int]
    checkpoints: list[int]
    fraction_flipping_after: list[float]
    histogram: dict[int, int]
    total_flips: int
    truncated_runs: int
    summaries: list[dict] = field(default_factory=list, repr=False)

    @property
    def decreasing(self) -> bool:
        values = self.fraction_flipping_after
        return all(a > b for a, b in zip(values, values[1:]))


def stabilization_stats(
    sampler: MixtureSampler,
    T: int,
    trials: int,
    seed: Optional[int] = None,
    checkpoints: Optional[Sequence[int]] = None,
) -> StabilizationResult:
    """Fraction of trajectories that still flip after time t, and a log2-binned flip histogram."""
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    base = sampler.seed if seed is None else seed
    seeds = [base + i for i in range(trials)]
    checkpoints = list(checkpoints) if checkpoints is not None else default_checkpoints(T)
    last_flips: list[int] = []
    histogram: Counter[int] = Counter()
    summaries = []
    truncated = 0
    for s in seeds:
        trajectory = run_walk(sampler, T, seed=s)
        last_flips.append(-1 if trajectory.last_flip is None else trajectory.last_flip)
        # bin b holds flip times in [2^(b-1), 2^b)
        histogram.update(t.bit_length() for t in trajectory.flips)
        truncated += trajectory.truncated
        summaries.append(trajectory.summary())
    fractions = [sum(1 for last in last_flips if last >= t) / trials for t in checkpoints]
    logger.info("stabilization over %d trials: %s", trials, dict(zip(checkpoints, fractions)))
    return StabilizationResult(
        T,
        trials,
        seeds,
        checkpoints,
        fractions,
        dict(sorted(histogram.items())),
        sum(histogram.values()),
        truncated,
        summaries,
    )


@dataclass
class GreenResult:
    target: int
    visits: int
    trials: int
    estimate: float
    stderr: float
    half_horizon_estimate: float
    converged: bool


def _visit_matrix(
    sampler: MixtureSampler, targets: Sequence[int], T: int, trials: int, seed: Optional[int]
) -> tuple[np.ndarray, np.ndarray]:
    base = sampler.seed if seed is None else seed
    full = np.zeros((trials, len(targets)))
    half = np.zeros((trials, len(targets)))
    index = {target: i for i, target in enumerate(targets)}
    for trial in range(trials):
        positions = run_walk(sampler, T, seed=base + trial).positions
        for t, position in enumerate(positions):
            i = index.get(position)
            if i is None:
                continue
            full[trial, i] += 1
            if t <= T // 2:
                half[trial, i] += 1
    return full, half


def green_mc(
    sampler: MixtureSampler,
    targets: Sequence[int],
    T: int,
    trials: int,
    seed: Optional[int] = None,
) -> list[GreenResult]:
    """Occupation-measure estimate of G(o, x) up to horizon T, with the half-horizon value."""
    if T < 1 or trials < 1:
        raise PreconditionError("horizon and trials must be at least 1")
    full, half = _visit_matrix(sampler, targets, T, trials, seed)
    results = []
    for i, target in enumerate(targets):
        estimate = float(full[:, i].mean())
        stderr = float(full[:, i].std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        previous = float(half[:, i].mean())
        converged = estimate == 0 or abs(estimate - previous) <= HORIZON_TOLERANCE * estimate
        if not converged:
            logger.info("Green estimate at %d still moves with the horizon (%.3f -> %.3f)", target, previous, estimate)
        results.append(
            GreenResult(target, int(full[:, i].sum()), trials, estimate, stderr, previous, converged)
        )
    return results


@dataclass
class GreenSumResult:
    radius_cap: int
    weights: list[float]
    green: list[float]
    partial_sums: list[float]
    flattening: bool

    @property
    def total(self) -> float:
        return self.partial_sums[-1]


def weighted_green_sum(
    sampler: MixtureSampler,
    radius_cap: int,
    T: int,
    trials: int,
    samples: int = 64,
    seed: Optional[int] = None,
) -> GreenSumResult:
    """Partial sums over Gray index of G(o, x) mu({g : germ of g at x is c or d})."""
    if radius_cap < 0:
        raise PreconditionError("radius cap must be nonnegative")
    rays = [from_gray_index(i).ray for i in range(radius_cap + 1)]
    profile = sampler.bad_germ_profile(rays, samples)
    weights = np.array([profile[ray] for ray in rays])
    base = sampler.seed if seed is None else seed
    visits = np.zeros(radius_cap + 1)
    for trial in range(trials):
        near = [p for p in run_walk(sampler, T, seed=base + trial).positions if p <= radius_cap]
        visits += np.bincount(near, minlength=radius_cap + 1)
    green = visits / trials
    partial = np.cumsum(green * weights)
    total = float(partial[-1])
    if total == 0:
        flattening = True
    else:
        quarter = float(partial[(3 * radius_cap) // 4])
        flattening = (total - quarter) <= FLATTENING_TOLERANCE * total
    return GreenSumResult(radius_cap, weights.tolist(), green.tolist(), partial.tolist(), flattening)


@dataclass
class GrowthResult:
    omega: OmegaString
    radii: list[int]
    sizes: list[int]
    exponent_estimates: dict[int, float]
    representatives: list[list[str]] = field(default_factory=list, repr=False)


def _signature(g: Element, vertices: Sequence[str]) -> tuple:
    return (g.abelian, tuple(g.act(v) for v in vertices))


def ball_growth(omega: OmegaString, R: int, signature_depth: int = 6) -> GrowthResult:
    """v(n) for n <= R by breadth-first search over words, identified through is_identity."""
    if R < 0:
        raise PreconditionError("radius must be nonnegative")
    if R > settings.ball_radius_cap:
        raise CapacityError(f"radius {R} exceeds ball_radius_cap {settings.ball_radius_cap}")
    vertices = ["".join(str(b) for b in bits) for bits in np.ndindex(*([2] * signature_depth))]
    identity = Element.identity(omega)
    buckets: dict[tuple, list[Element]] = {_signature(identity, vertices): [identity]}
    frontier = [identity]
    sizes = [1]
    spheres = [[str(identity)]]
    for _ in range(R):
        following: list[Element] = []
        for g in frontier:
            for s in LETTERS:
                h = Element(reduce_word(g.word + s), 0, omega)
                bucket = buckets.setdefault(_signature(h, vertices), [])
                if any(h.word == other.word or equal(h, other) for other in bucket):
                    continue
                bucket.append(h)
                following.append(h)
        sizes.append(sizes[-1] + len(following))
        spheres.append([str(h) for h in following])
        frontier = following
    estimates = {
        r: math.log(math.log(v)) / math.log(r) for r, v in enumerate(sizes) if r >= 2 and v > math.e
    }
    return GrowthResult(omega, list(range(R + 1)), sizes, estimates, spheres)


@dataclass
class TailResult:
    trials: int
    grid: list[float]
    tail: list[float]
    rho: dict[int, float]
    phi: dict[int, float]
    R: dict[int, float]
    envelope_constant: Optional[float] = None
    max_length: float = 0.0
    mean_length: float = 0.0

    @property
    def volume_lower_curve(self) -> list[tuple[float, int]]:
        """Points (R_n, n): log v(R_n) grows at least linearly in n."""
        return [(self.R[n], n) for n in sorted(self.R)]


def moment_growth(lengths: Sequence[float], ns: Sequence[int]) -> tuple[dict[int, float], dict[int, float], dict[int, float]]:
    """rho_n = inf{r : mu(|g| > r) < 1/n}, phi(r) = E[|g|; |g| <= r] and R_n = n phi(rho_n)."""
    values = np.sort(np.asarray(lengths, dtype=float))
    count = len(values)
    candidates = np.concatenate(([0.0], np.unique(values)))
    rho: dict[int, float] = {}
    phi: dict[int, float] = {}
    growth: dict[int, float] = {}
    for n in ns:
        above = count - np.searchsorted(values, candidates, side="right")
        hits = np.nonzero(above / count < 1 / n)[0]
        r = float(candidates[hits[0]]) if len(hits) else float(values[-1])
        rho[n] = r
        phi[n] = float(values[values <= r].sum() / count)
        growth[n] = n * phi[n]
    return rho, phi, growth


def tail_report(
    sampler: MixtureSampler,
    trials: int,
    grid: Optional[Sequence[float]] = None,
    seed: Optional[int] = None,
    ns: Optional[Sequence[int]] = None,
    envelope: Optional[tuple[Sequence[float], Sequence[float]]] = None,
) -> TailResult:
    """Empirical tail of the construction length and the moment-growth quantities."""
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    source = sampler if seed is None else sampler.clone(seed)
    lengths = np.array([float(s.element.construction_length) for s in source.sample(trials)])
    top = float(lengths.max())
    if grid is None:
        grid = [float(2**e) for e in range(0, max(int(math.log2(top)) + 2, 1))] if top > 0 else [1.0]
    tail = [float((lengths >= r).mean()) for r in grid]
    ns = list(ns) if ns is not None else [2**i for i in range(1, int(math.log2(trials)) + 1)]
    rho, phi, growth = moment_growth(lengths, ns)
    constant = None
    if envelope is not None:
        radii, bounds = envelope
        constant = max(float((lengths >= r).mean()) / b for r, b in zip(radii, bounds))
    return TailResult(trials, list(grid), tail, rho, phi, growth, constant, top, float(lengths.mean()))


def eta0_envelope(nmax: int, epsilon: float) -> tuple[list[float], list[float]]:
    """Radii lambda_0^n with bounds n^{1+eps} 2^{-n}."""
    lam = lambda_zero()
    ns = range(1, nmax + 1)
    return [lam**n for n in ns], [n ** (1 + epsilon) / 2.0**n for n in ns]


def mu_beta_envelope(info: MuBetaInfo) -> tuple[list[float], list[float]]:
    """Radii 2^{2k_n} L_n with bounds 2^{-n beta}."""
    omega = info.fr.normalized
    ns = sorted(info.kn)
    return (
        [float(betatail_radius(omega, n, info.kn[n])) for n in ns],
        [2.0 ** (-n * info.beta) for n in ns],
    )
