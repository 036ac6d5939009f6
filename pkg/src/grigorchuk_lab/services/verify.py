"""Named verification suites: exact checks of the group, graph and construction layers."""

from __future__ import annotations

import itertools
import logging
import time
from collections.abc import Callable, Iterator
from typing import NamedTuple

import networkx as nx
import numpy as np

from grigorchuk_lab.errors import GrigorchukLabError, PreconditionError
from grigorchuk_lab.services.core_tree import (
    LETTERS,
    Element,
    OmegaString,
    act_ray,
    all_vertices,
    element_order,
    equal,
    is_identity,
    multiply,
    portrait_along_ray,
    section,
)
from grigorchuk_lab.services.grigorchuk import FIRST_GROUP, bad_germ_support, germ_at, in_hb_orbit
from grigorchuk_lab.services.measures import (
    Upsilon,
    UpsilonDraw,
    bad_locations,
    build_ckv,
    build_Fjn,
    build_gjv,
    build_mu_beta,
    build_Vk,
    check_frD,
    conjugator_product,
    desk_kn,
)
from grigorchuk_lab.services.schreier import (
    ORIGIN,
    ball_graph,
    bfs_distance,
    depth_bounds,
    distance,
    from_gray_index,
    gray_index,
    neighbors,
)
from grigorchuk_lab.services.subst_calculus import (
    apply_zeta_usual,
    build_gn,
    build_gn_sequence,
    build_hn,
    check_cube_independence,
    length_Ln,
    lambda_zero,
)
from grigorchuk_lab.services.walk_lab import run_walk

logger = logging.getLogger(__name__)

RESTRICTED_FIRST = OmegaString("", "201")

GRAY_PAIR_LIMIT = 1 << 12
GRAY_BFS_LIMIT = 1 << 7
GRAY_BOUND_LIMIT = 1 << 16
CUBE_GN_MAX = 8
CUBE_HN_MAX = 6
ZETA_DEPTH = 6
ZETA_WORDS = ("ac", "ad", "abab")
LENGTH_SAMPLES = 16
UNIQUE_ENUMERATION_CAP = 1 << 12
UNIQUE_DRAWS_PER_EPS = 16
BOOKKEEPING_TRAJECTORIES = 50
BOOKKEEPING_STEPS = 200


class Check(NamedTuple):
    suite: str
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


Suite = Callable[[], Iterator[Check]]
SUITES: dict[str, Suite] = {}


def suite(name: str) -> Callable[[Suite], Suite]:
    def register(fn: Suite) -> Suite:
        SUITES[name] = fn
        return fn

    return register


def _check(suite_name: str, name: str, body: Callable[[], tuple[bool, str]]) -> Check:
    start = time.perf_counter()
    try:
        passed, detail = body()
    except GrigorchukLabError as exc:
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    check = Check(suite_name, name, passed, detail, time.perf_counter() - start)
    logger.debug("%s / %s: %s %s", suite_name, name, "ok" if passed else "FAILED", detail)
    return check


def suite_names() -> list[str]:
    return [*SUITES, "all"]


def run_suite(name: str) -> list[Check]:
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise PreconditionError(f"unknown suite {name!r}; expected one of {', '.join(suite_names())}")
    checks: list[Check] = []
    for suite_name in names:
        results = list(SUITES[suite_name]())
        failed = sum(not c.passed for c in results)
        logger.info("suite %s: %d checks, %d failed", suite_name, len(results), failed)
        checks.extend(results)
    return checks


# --- relations ---------------------------------------------------------------


@suite("relations")
def relations() -> Iterator[Check]:
    def raw(word: str) -> Element:
        return Element(word, 0, FIRST_GROUP)

    for s in LETTERS:
        yield _check("relations", f"{s}^2 = id", lambda s=s: (is_identity(raw(s + s)), ""))
    for lhs, rhs in (("bc", "d"), ("cd", "b"), ("bd", "c")):
        yield _check("relations", f"{lhs} = {rhs}", lambda lhs=lhs, rhs=rhs: (equal(raw(lhs), raw(rhs)), ""))
    yield _check("relations", "(ad)^4 = id", lambda: (is_identity(raw("ad" * 4)), ""))
    yield _check("relations", "(ad)^2 != id", lambda: (not is_identity(raw("ad" * 2)), ""))

    def order_ab() -> tuple[bool, str]:
        order = element_order(raw("ab"), 64)
        return order == 16, f"order {order}"

    yield _check("relations", "order(ab) = 16", order_ab)

    def order_ac() -> tuple[bool, str]:
        order = element_order(raw("ac"), 64)
        return order == 8, f"order {order}"

    yield _check("relations", "order(ac) = 8", order_ac)


# --- Schreier graph ---------------------------------------------------------


@suite("gray-vs-bfs")
def gray_vs_bfs() -> Iterator[Check]:
    def pairs() -> tuple[bool, str]:
        ball = ball_graph(GRAY_PAIR_LIMIT)
        exits = {
            data["index"]
            for point, data in ball.nodes(data=True)
            if any(gray_index(image) > GRAY_PAIR_LIMIT for _, image in neighbors(point))
        }
        # paths between indices below the limit can only leave through the top index
        if exits != {GRAY_PAIR_LIMIT}:
            return False, f"ball exits at {sorted(exits)[:5]}"
        ball = nx.relabel_nodes(ball, {point: data["index"] for point, data in ball.nodes(data=True)})
        index = np.array([gray_index(from_gray_index(n)) for n in range(GRAY_PAIR_LIMIT)])
        mismatches = []
        for i in range(GRAY_PAIR_LIMIT):
            levels = nx.single_source_shortest_path_length(ball, i)
            found = np.array([levels.get(j, -1) for j in range(GRAY_PAIR_LIMIT)])
            bad = np.nonzero(found != np.abs(index - index[i]))[0]
            mismatches += [(i, int(j), int(found[j])) for j in bad]
        return not mismatches, f"{len(mismatches)} mismatches" + (f", first {mismatches[0]}" if mismatches else "")

    yield _check("gray-vs-bfs", f"d(x, y) = bfs for indices < {GRAY_PAIR_LIMIT}", pairs)

    def from_origin() -> tuple[bool, str]:
        bad = [
            n for n in range(GRAY_BFS_LIMIT) if bfs_distance(ORIGIN, from_gray_index(n), GRAY_BFS_LIMIT) != n
        ]
        return not bad, f"first bad index {bad[0]}" if bad else ""

    yield _check("gray-vs-bfs", f"d(o, x) = bfs for indices < {GRAY_BFS_LIMIT}", from_origin)

    def bounds() -> tuple[bool, str]:
        for n in range(GRAY_BOUND_LIMIT):
            x = from_gray_index(n)
            low, high = depth_bounds(x)
            if gray_index(x) != n or not low <= distance(x, ORIGIN) <= high:
                return False, f"index {n}"
        return True, ""

    yield _check("gray-vs-bfs", f"2^(n-1) <= d(x, o) <= 2^n - 1 below {GRAY_BOUND_LIMIT}", bounds)


# --- cubes ---------------------------------------------------------------------


@suite("cube-independence")
def cube_independence() -> Iterator[Check]:
    gs = build_gn_sequence(FIRST_GROUP, CUBE_GN_MAX)
    for n in range(1, CUBE_GN_MAX + 1):
        def gn(n: int = n) -> tuple[bool, str]:
            result = check_cube_independence(gs[:n], n + 2)
            return result.independent, f"{result.vertices_checked} vertices"

        yield _check("cube-independence", f"g_1..g_{n} at depth {n + 2}", gn)

    hs = [build_hn(n) for n in range(1, CUBE_HN_MAX + 1)]
    for n in range(1, CUBE_HN_MAX + 1):
        def hn(n: int = n) -> tuple[bool, str]:
            orbit = [v for v in all_vertices(n + 2) if in_hb_orbit(v)]
            result = check_cube_independence(hs[:n], n + 2, vertices=orbit)
            return result.independent, f"{result.vertices_checked} vertices"

        yield _check("cube-independence", f"h_1..h_{n} on the H^b-orbit at depth {n + 2}", hn)

    def planted() -> tuple[bool, str]:
        a = Element("a", 0, FIRST_GROUP)
        result = check_cube_independence([a, a], 3)
        return not result.independent and result.witness is not None, str(result.witness)

    yield _check("cube-independence", "planted (a, a) is rejected", planted)


# --- portraits ----------------------------------------------------------------


def expected_ckv_portrait(omega: OmegaString, j: int, v: str) -> list[tuple[str, Element]]:
    """Sibling sections of c_j^v along v: trivial under digit 1, bab before a 0 turn, else a."""
    expected = []
    last = len(v) - 1
    for i in range(len(v)):
        level = j + i + 1
        sibling = v[:i] + ("1" if v[i] == "0" else "0")
        if omega.digit(j + i) == 1 or i == last:
            word = ""
        elif v[i + 1] == "0":
            word = "bab"
        else:
            word = "a"
        expected.append((sibling, Element(word, level, omega)))
    expected.append((v, Element("c", j + len(v), omega)))
    return expected


def ckv_portrait_matches(omega: OmegaString, j: int, v: str) -> tuple[bool, str]:
    element = build_ckv(omega, j, v)
    portrait = portrait_along_ray(element, v)
    for (vertex, node), (want_vertex, want) in zip(portrait, expected_ckv_portrait(omega, j, v)):
        if vertex != want_vertex or not equal(node, want):
            return False, f"section at {vertex} differs from {want}"
    return True, ""


@suite("ckv-portrait")
def ckv_portrait() -> Iterator[Check]:
    fr = check_frD(RESTRICTED_FIRST, 3)
    omega = fr.normalized
    for vertex in build_Vk(fr, 0, 6):
        v = vertex.v

        def moves(v: str = v) -> tuple[bool, str]:
            image = act_ray("", conjugator_product(omega, 0, v))
            return image == v, f"1^inf -> {image}"

        yield _check("ckv-portrait", f"conjugator carries 1^inf to {v}", moves)
        yield _check("ckv-portrait", f"portrait of c^v for v={v}", lambda v=v: ckv_portrait_matches(omega, 0, v))


@suite("zeta-portraits")
def zeta_portraits() -> Iterator[Check]:
    for w in ZETA_WORDS:
        word = w
        for n in range(1, ZETA_DEPTH + 1):
            word = apply_zeta_usual(word)

            def portrait(n: int = n, word: str = word, w: str = w) -> tuple[bool, str]:
                g = Element(word, 0, FIRST_GROUP)
                seed = Element(w, 0, FIRST_GROUP).relabel(n)
                flanked = Element.parse("a" + seed.word + "a", FIRST_GROUP, n)
                for vertex in all_vertices(n):
                    if g.act(vertex) != vertex:
                        return False, f"moves {vertex}"
                    local = section(g, vertex)
                    if not (equal(local, seed) or equal(local, flanked)):
                        return False, f"section at {vertex} is {local}"
                return True, f"|word| = {len(word)}"

            yield _check("zeta-portraits", f"zeta^{n}({w}) over level {n}", portrait)


# --- measure construction --------------------------------------------------------


def upsilon_points(upsilon: Upsilon, rng: np.random.Generator) -> Iterator[UpsilonDraw]:
    """All of Lambda_n when it is small, else several gamma draws for every eps."""
    if upsilon.size <= UNIQUE_ENUMERATION_CAP:
        yield from upsilon.support_iter()
        return
    for eps in itertools.product((0, 1), repeat=upsilon.n):
        for _ in range(UNIQUE_DRAWS_PER_EPS):
            gammas = tuple(int(rng.integers(0, f.size)) for f in upsilon.families)
            yield UpsilonDraw(upsilon.element(eps, gammas), eps, gammas)


@suite("construction")
def construction() -> Iterator[Check]:
    fr = check_frD(RESTRICTED_FIRST, 3)
    omega = fr.normalized
    D = fr.D

    for j, k in itertools.product(range(3), (3, 6, 9)):
        yield _check(
            "construction",
            f"|V_{k}^{j}| = 2^{k // D}",
            lambda j=j, k=k: (len(build_Vk(fr, j, k)) == 1 << (k // D), ""),
        )

    for j in range(1, 4):
        def locations(j: int = j) -> tuple[bool, str]:
            v = build_Vk(fr, j, 6)[0].v
            found = bad_locations(j, v)
            parities = {(j + 1 + ray[: j + 1].count("1")) % 2 for ray in found}
            return len(found) == 1 << j and parities == {1}, f"{len(found)} locations"

        yield _check("construction", f"B({j}, v) has 2^{j} points", locations)

    def support() -> tuple[bool, str]:
        v = build_Vk(fr, 1, 6)[1].v
        generator = build_gjv(omega, 1, v)
        found = bad_germ_support(generator.element)
        return found == generator.expected_bad_locations(), f"{len(found)} bad germs"

    yield _check("construction", "bad germs of g_1^v sit on B(1, v)", support)

    def same() -> tuple[bool, str]:
        n, k_n, j = 3, 3, 1
        family = build_Fjn(fr, j, n, k_n)
        reference = build_gn(omega, j)
        vertices = list(all_vertices(n + D + 1))
        targets = [reference.act(x) for x in vertices]
        for member in family.members():
            if [member.act(x) for x in vertices] != targets:
                return False, "member differs from g_j"
        return family.modified, f"{family.size} members"

    yield _check("construction", "F_{1,3} acts as g_1 on level 7", same)

    for n in (D, 2 * D):
        def unique(n: int = n) -> tuple[bool, str]:
            upsilon = Upsilon(fr, n, desk_kn(n, 6, D))
            x = "1" * (n + D + 1)
            seen: dict[str, tuple[int, ...]] = {}
            checked = 0
            for draw in upsilon_points(upsilon, np.random.default_rng(n)):
                image = draw.element.act(x)
                if seen.setdefault(image, draw.eps) != draw.eps:
                    return False, f"eps {draw.eps} and {seen[image]} collide"
                checked += 1
            return len(set(seen.values())) == 1 << n, f"{checked} of {upsilon.size} points, {len(seen)} images"

        yield _check("construction", f"eps is recovered from 1^{n + D + 1} for n={n}", unique)

    def length_bound() -> tuple[bool, str]:
        rng = np.random.default_rng(0)
        worst = 0.0
        for n in (D, 2 * D):
            upsilon = Upsilon(fr, n, desk_kn(n, 6, D))
            bound = upsilon.length_bound()
            for _ in range(LENGTH_SAMPLES):
                ratio = upsilon.draw(rng).element.construction_length / bound
                worst = max(worst, ratio)
        return worst <= 1, f"max length / bound = {worst:.3g}"

    yield _check("construction", "sampled upsilon_n lengths stay below the bound", length_bound)

    def first_lengths() -> tuple[bool, str]:
        lam = lambda_zero()
        bad = [n for n in range(31) if length_Ln(FIRST_GROUP, n) > 3 * lam**n]
        return not bad, f"violations at {bad}" if bad else ""

    yield _check("construction", "L_n <= 3 lambda_0^n for n <= 30", first_lengths)


@suite("germ-bookkeeping")
def germ_bookkeeping() -> Iterator[Check]:
    sampler, _ = build_mu_beta(RESTRICTED_FIRST, D=3, beta=0.9, A=6, nmax=6)

    def replay() -> tuple[bool, str]:
        flips = 0
        for trial in range(BOOKKEEPING_TRAJECTORIES):
            trajectory = run_walk(sampler, BOOKKEEPING_STEPS, seed=trial, keep_elements=True)
            product = multiply(*trajectory.elements) if trajectory.elements else Element.identity(sampler.omega)
            if germ_at(product, "") != trajectory.germs[-1]:
                return False, f"germ mismatch on seed {trial}"
            if act_ray("", product) != from_gray_index(trajectory.positions[-1]).ray:
                return False, f"position mismatch on seed {trial}"
            flips += len(trajectory.flips)
        return True, f"{flips} flips replayed"

    yield _check("germ-bookkeeping", f"{BOOKKEEPING_TRAJECTORIES} trajectories of {BOOKKEEPING_STEPS} steps", replay)
