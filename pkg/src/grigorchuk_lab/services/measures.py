"""Fr(D) analysis, modified generators and the measures built from them.

Levels and vertices below follow the (possibly shifted) string returned by
``check_frD``: every construction runs in G_{s^shift omega}.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from grigorchuk_lab.config import settings
from grigorchuk_lab.errors import CapacityError, FrConditionError, PreconditionError
from grigorchuk_lab.services.core_tree import (
    Element,
    OmegaString,
    TreeNode,
    multiply,
    normalize_ray,
    rigid_commutator,
)
from grigorchuk_lab.services.grigorchuk import FIRST_GROUP, germ_at
from grigorchuk_lab.services.subst_calculus import (
    build_gn,
    build_gn_sequence,
    build_hat_hn,
    build_hn,
    length_Ln,
    substituted,
)

logger = logging.getLogger(__name__)

FR_PATTERNS = ("201", "211")
SAMPLER_NAMES = ("mu-beta", "eta0", "eta1", "eta2", "eta2-restricted", "uniform", "f1-only", "id")
BAD_GERMS = ("c", "d")


# --- Fr(D) -----------------------------------------------------------------


@dataclass(frozen=True)
class FrAnalysis:
    """Result of scanning the D-blocks of omega for 201 or 211."""

    omega: OmegaString
    D: int
    shift: int
    passed: bool
    head: tuple[int, ...] = ()
    cycle: tuple[int, ...] = ()
    failure_block: Optional[int] = None

    @property
    def normalized(self) -> OmegaString:
        return self.omega.shift(self.shift)

    def require(self) -> None:
        if not self.passed:
            raise FrConditionError(
                f"omega {self.omega} fails Fr({self.D}) at block {self.failure_block}",
                block=self.failure_block,
            )

    def m(self, k: int) -> int:
        """Offset m_k of the first 201/211 inside block k."""
        self.require()
        if k < len(self.head):
            return self.head[k]
        return self.cycle[(k - len(self.head)) % len(self.cycle)]

    def index_point(self, k: int) -> int:
        return k * self.D + self.m(k) + 3

    def in_I(self, t: int) -> bool:
        if t < 3:
            return False
        return self.index_point((t - 3) // self.D) == t

    def index_points(self, limit: int) -> list[int]:
        """Elements of I_omega up to ``limit``."""
        points = []
        k = 0
        while (point := self.index_point(k)) <= limit:
            points.append(point)
            k += 1
        return points

    def m_values(self, blocks: int) -> list[int]:
        return [self.m(k) for k in range(blocks)]


def _block_offset(omega: OmegaString, D: int, k: int) -> Optional[int]:
    for m in range(D - 2):
        window = "".join(str(omega.digit(k * D + m + i)) for i in range(3))
        if window in FR_PATTERNS:
            return m
    return None


def _scan_blocks(omega: OmegaString, D: int) -> tuple[list[Optional[int]], int]:
    head = -(-len(omega.preperiod) // D)
    cycle = math.lcm(len(omega.period), D) // D
    return [_block_offset(omega, D, k) for k in range(head + cycle)], head


def check_frD(omega: OmegaString, D: int, normalize: bool = True) -> FrAnalysis:
    """Scan omega for Fr(D), trying shifts of up to D-1 digits when ``normalize`` is set."""
    if D < 3:
        raise PreconditionError("Fr(D) needs D >= 3")
    first_failure: Optional[int] = None
    for shift in range(D if normalize else 1):
        offsets, head = _scan_blocks(omega.shift(shift), D)
        bad = next((k for k, m in enumerate(offsets) if m is None), None)
        if bad is None:
            if shift:
                logger.info("omega %s satisfies Fr(%d) after a shift of %d digits", omega, D, shift)
            return FrAnalysis(omega, D, shift, True, tuple(offsets[:head]), tuple(offsets[head:]))
        if first_failure is None:
            first_failure = bad
    logger.info("omega %s fails Fr(%d) at block %s", omega, D, first_failure)
    return FrAnalysis(omega, D, 0, False, failure_block=first_failure)


# --- index sets ------------------------------------------------------------


def _require_multiple(value: int, D: int, name: str) -> None:
    if value < 0 or value % D:
        raise PreconditionError(f"{name}={value} must be a nonnegative multiple of D={D}")


def _fill(length: int, free: Sequence[int], index: int) -> str:
    """All-ones string with the 1-based ``free`` positions read from the bits of ``index``."""
    bits = ["1"] * length
    width = len(free)
    for r, position in enumerate(free):
        if not index >> (width - 1 - r) & 1:
            bits[position - 1] = "0"
    return "".join(bits)


def w_free_positions(fr: FrAnalysis, n: int, k: int) -> list[int]:
    fr.require()
    _require_multiple(n, fr.D, "n")
    _require_multiple(k, fr.D, "k")
    return [i for i in range(1, k + 1) if fr.in_I(n + i)]


def build_Wk(fr: FrAnalysis, n: int, k: int) -> list[str]:
    """W_k^n: length-k strings of 1s, free where n + i lies in I_omega."""
    free = w_free_positions(fr, n, k)
    return [_fill(k, free, index) for index in range(1 << len(free))]


@dataclass(frozen=True)
class VLayout:
    """Shape of V_k^j: 1^{D-jbar} u 1^{m+2} 0 with u in W_k^{j+D-jbar}."""

    j: int
    k: int
    lead: int
    m: int
    free: tuple[int, ...]

    @property
    def length(self) -> int:
        return self.lead + self.k + self.m + 3

    def vertex(self, index: int, free: Optional[Sequence[int]] = None) -> str:
        free = self.free if free is None else free
        if not 0 <= index < 1 << len(free):
            raise PreconditionError(f"index {index} out of range for {len(free)} free digits")
        return _fill(self.length - 1, free, index) + "0"

    def vertices(self) -> Iterator[str]:
        for index in range(1 << len(self.free)):
            yield self.vertex(index)


class IndexVertex(NamedTuple):
    v: str
    j: int
    k: int


def v_layout(fr: FrAnalysis, j: int, k: int) -> VLayout:
    fr.require()
    _require_multiple(k, fr.D, "k")
    if j < 0:
        raise PreconditionError("level j must be nonnegative")
    D = fr.D
    lead = D - j % D
    ell = (j + lead + k) // D
    free = tuple(lead + i for i in w_free_positions(fr, j + lead, k))
    return VLayout(j, k, lead, fr.m(ell), free)


def build_Vk(fr: FrAnalysis, j: int, k: int) -> list[IndexVertex]:
    return [IndexVertex(v, j, k) for v in v_layout(fr, j, k).vertices()]


# --- conjugated generators -------------------------------------------------


def conjugator_h(omega: OmegaString, j: int, v: str, i: int) -> TreeNode:
    """h_i^v in G_{s^j omega}: id when v_i = 1, else [b, a] rigid at v_1..v_{i-2}."""
    if not 1 <= i <= len(v):
        raise PreconditionError(f"conjugator index {i} outside 1..{len(v)}")
    if v[i - 1] == "1":
        return Element.identity(omega, j)
    if i < 2 or j + i - 3 < 0 or omega.digit(j + i - 3) != 2:
        raise PreconditionError(f"h_{i} at level {j} needs digit 2 at level {j + i - 3}")
    return rigid_commutator(omega, "b", v[: i - 2], base_level=j)


def conjugator_product(omega: OmegaString, j: int, v: str) -> TreeNode:
    """h_1^v h_2^v ... h_{k'}^v; moves 1^inf to v 1^inf."""
    factors = [conjugator_h(omega, j, v, i) for i in range(1, len(v) + 1)]
    return multiply(*factors, level=j, omega=omega)


def build_ckv(omega: OmegaString, j: int, v: str) -> TreeNode:
    """The conjugate of c at level j whose germ c sits at v 1^inf."""
    conjugator = conjugator_product(omega, j, v)
    return multiply(conjugator.inverse(), Element("c", j, omega), conjugator)


@dataclass(frozen=True)
class ModifiedGenerator:
    j: int
    v: str
    conjugated: TreeNode
    element: TreeNode

    def expected_bad_locations(self) -> set[str]:
        return bad_locations(self.j, self.v)


def build_gjv(omega: OmegaString, j: int, v: str) -> ModifiedGenerator:
    """zeta_{omega_0} ... zeta_{omega_{j-1}} (a c_j^v)."""
    if not v.endswith("0"):
        raise PreconditionError(f"index vertex {v!r} must end with 0")
    conjugated = build_ckv(omega, j, v)
    seed = multiply(Element("a", j, omega), conjugated)
    return ModifiedGenerator(j, v, conjugated, substituted(0, j, seed))


def bad_locations(j: int, v: str) -> set[str]:
    """Rays x_1..x_{j+1} v_2 v_3 ... 1^inf with j + 1 + x_1 + ... + x_{j+1} odd."""
    tail = v[1:]
    return {
        normalize_ray("".join(bits) + tail)
        for bits in itertools.product("01", repeat=j + 1)
        if (j + 1 + bits.count("1")) % 2
    }


# --- F_{j,n} and upsilon_n ---------------------------------------------------


class GeneratorFamily:
    """F_{j,n}: g_j alone, or the modified generators indexed by vertices with prefix 1^{n-j+D}."""

    def __init__(
        self,
        omega: OmegaString,
        j: int,
        n: int,
        layout: Optional[VLayout] = None,
        fixed: int = 0,
    ):
        self.omega = omega
        self.j = j
        self.n = n
        self.layout = layout
        self.fixed = fixed
        self.free = tuple(p for p in layout.free if p > fixed) if layout else ()
        self._members: dict[int, TreeNode] = {}

    def __repr__(self) -> str:
        return f"GeneratorFamily(j={self.j}, n={self.n}, size={self.size})"

    @property
    def modified(self) -> bool:
        return self.layout is not None

    @property
    def size(self) -> int:
        return 1 << len(self.free)

    @property
    def log2_size(self) -> int:
        return len(self.free)

    def vertex(self, index: int) -> Optional[str]:
        if self.layout is None:
            return None
        return self.layout.vertex(index, self.free)

    def member(self, index: int) -> TreeNode:
        cached = self._members.get(index)
        if cached is not None:
            return cached
        if self.layout is None:
            if index:
                raise PreconditionError(f"F_{{{self.j},{self.n}}} holds only g_{self.j}")
            element = build_gn(self.omega, self.j)
        else:
            element = build_gjv(self.omega, self.j, self.vertex(index)).element
        self._members[index] = element
        return element

    def members(self) -> Iterator[TreeNode]:
        for index in range(self.size):
            yield self.member(index)


def family_size_formula(j: int, n: int, k_n: int, D: int) -> int:
    return 1 << (2 * k_n - (n - j + j % D)) // D


def build_Fjn(fr: FrAnalysis, j: int, n: int, k_n: int) -> GeneratorFamily:
    fr.require()
    _require_multiple(n, fr.D, "n")
    _require_multiple(k_n, fr.D, "k_n")
    if not 1 <= j <= n:
        raise PreconditionError(f"level j={j} outside 1..{n}")
    omega = fr.normalized
    if omega.digit(j - 1) != 2 or not n - k_n < j <= n:
        return GeneratorFamily(omega, j, n)
    return GeneratorFamily(omega, j, n, v_layout(fr, j, 2 * k_n), fixed=n - j + fr.D)


class UpsilonDraw(NamedTuple):
    element: TreeNode
    eps: tuple[int, ...]
    gammas: tuple[int, ...]


class Upsilon:
    """Uniformised n-quasi-cubic measure: push-forward of the uniform measure on Lambda_n."""

    def __init__(self, fr: FrAnalysis, n: int, k_n: int):
        fr.require()
        _require_multiple(n, fr.D, "n")
        if n == 0:
            raise PreconditionError("upsilon_n needs n >= D")
        self.fr = fr
        self.n = n
        self.k_n = k_n
        self.omega = fr.normalized
        self.families = [build_Fjn(fr, i, n, k_n) for i in range(1, n + 1)]

    def __repr__(self) -> str:
        return f"Upsilon(n={self.n}, k_n={self.k_n}, log2|Lambda|={self.log2_size})"

    @property
    def log2_size(self) -> int:
        return self.n + sum(f.log2_size for f in self.families)

    @property
    def size(self) -> int:
        return 1 << self.log2_size

    def element(self, eps: Sequence[int], gammas: Sequence[int]) -> TreeNode:
        """theta_n(eps, gamma) = gamma_n^{eps_n} ... gamma_1^{eps_1}."""
        factors = [self.families[i].member(gammas[i]) for i in reversed(range(self.n)) if eps[i]]
        if not factors:
            return Element.identity(self.omega)
        return multiply(*factors)

    def draw(self, rng: np.random.Generator) -> UpsilonDraw:
        eps = tuple(int(e) for e in rng.integers(0, 2, size=self.n))
        gammas = tuple(int(rng.integers(0, f.size)) for f in self.families)
        return UpsilonDraw(self.element(eps, gammas), eps, gammas)

    def support_iter(self) -> Iterator[UpsilonDraw]:
        if self.size > settings.support_enumeration_cap:
            raise CapacityError(
                f"|Lambda_{self.n}| = 2^{self.log2_size} exceeds the enumeration cap "
                f"{settings.support_enumeration_cap}"
            )
        for eps in itertools.product((0, 1), repeat=self.n):
            for gammas in itertools.product(*(range(f.size) for f in self.families)):
                yield UpsilonDraw(self.element(eps, gammas), eps, gammas)

    def length_bound(self) -> int:
        """2^{2k_n + 2D + 4} L_n."""
        return (1 << (2 * self.k_n + 2 * self.fr.D + 4)) * length_Ln(self.omega, self.n)


def sample_upsilon(fr: FrAnalysis, n: int, k_n: int, seed: Optional[int] = None) -> UpsilonDraw:
    rng = np.random.default_rng(settings.default_seed if seed is None else seed)
    return Upsilon(fr, n, k_n).draw(rng)


def support_iter(fr: FrAnalysis, n: int, k_n: int) -> Iterator[UpsilonDraw]:
    return Upsilon(fr, n, k_n).support_iter()


def desk_kn(n: int, A: int, D: int) -> int:
    """k_n = A floor(log2 n), rounded up to a multiple of D."""
    raw = A * int(math.floor(math.log2(n))) if n >= 1 else 0
    return D * -(-raw // D)


def betatail_radius(omega: OmegaString, n: int, k_n: int) -> int:
    return (1 << (2 * k_n)) * length_Ln(omega, n)


# --- mixtures ----------------------------------------------------------------


class Sample(NamedTuple):
    element: TreeNode
    component: str
    detail: dict


@dataclass(frozen=True)
class Component:
    label: str
    weight: float
    draw: Callable[[np.random.Generator], Sample]
    partner: str
    support: Optional[tuple[TreeNode, ...]] = None
    log2_size: float = 0.0


def atom_component(label: str, element: TreeNode, weight: float, partner: Optional[str] = None) -> Component:
    sample = Sample(element, label, {})
    return Component(label, weight, lambda rng: sample, partner or label, (element,))


def uniform_component(
    label: str, elements: Sequence[TreeNode], weight: float, partner: Optional[str] = None
) -> Component:
    support = tuple(elements)

    def draw(rng: np.random.Generator) -> Sample:
        index = int(rng.integers(0, len(support)))
        return Sample(support[index], label, {"index": index})

    return Component(label, weight, draw, partner or label, support, math.log2(len(support)))


def cube_component(
    label: str, seq: Sequence[TreeNode], weight: float, partner: str, invert: bool = False
) -> Component:
    """Uniform measure on {g_n^{e_n} ... g_1^{e_1}} (or its inverses), drawn through eps."""
    seq = tuple(seq)
    omega = seq[0].omega

    def draw(rng: np.random.Generator) -> Sample:
        eps = tuple(int(e) for e in rng.integers(0, 2, size=len(seq)))
        factors = [g for g, e in zip(reversed(seq), reversed(eps)) if e]
        element = multiply(*factors) if factors else Element.identity(omega)
        return Sample(element.inverse() if invert else element, label, {"eps": eps})

    return Component(label, weight, draw, partner, log2_size=float(len(seq)))


def upsilon_component(label: str, upsilon: Upsilon, weight: float, partner: str, invert: bool = False) -> Component:
    def draw(rng: np.random.Generator) -> Sample:
        result = upsilon.draw(rng)
        element = result.element.inverse() if invert else result.element
        return Sample(element, label, {"n": upsilon.n, "eps": result.eps, "gammas": result.gammas})

    return Component(label, weight, draw, partner, log2_size=float(upsilon.log2_size))


class MixtureSampler:
    """Seeded random source of elements: a weighted list of component samplers."""

    def __init__(
        self,
        name: str,
        omega: OmegaString,
        components: Sequence[Component],
        seed: Optional[int] = None,
        spec: Optional[dict] = None,
        flags: Optional[dict] = None,
    ):
        if not components:
            raise PreconditionError("a mixture needs at least one component")
        weights = np.array([c.weight for c in components], dtype=float)
        if (weights < 0).any() or weights.sum() <= 0:
            raise PreconditionError("mixture weights must be nonnegative with a positive sum")
        self.name = name
        self.omega = omega
        self.components = list(components)
        self.weights = weights / weights.sum()
        self.seed = settings.default_seed if seed is None else seed
        self.rng = np.random.default_rng(self.seed)
        self.spec = {"sampler": name, **(spec or {}), "seed": self.seed}
        self.flags = dict(flags or {})

    def __repr__(self) -> str:
        return f"MixtureSampler({self.name!r}, {len(self.components)} components, seed={self.seed})"

    def clone(self, seed: int) -> MixtureSampler:
        return MixtureSampler(self.name, self.omega, self.components, seed, self.spec, self.flags)

    def draw(self) -> Sample:
        index = int(self.rng.choice(len(self.components), p=self.weights))
        return self.components[index].draw(self.rng)

    def sample(self, count: int) -> list[Sample]:
        return [self.draw() for _ in range(count)]

    def weight_table(self) -> dict[str, float]:
        return {c.label: float(w) for c, w in zip(self.components, self.weights)}

    @property
    def is_symmetric(self) -> bool:
        table = self.weight_table()
        return all(
            c.partner in table and math.isclose(table[c.partner], table[c.label])
            for c in self.components
        )

    def entropy_proxy(self) -> float:
        """Sum of weight * log2 |support| over the components."""
        return float(sum(w * c.log2_size for c, w in zip(self.components, self.weights)))

    def bad_germ_profile(self, rays: Sequence[str], samples: int) -> dict[str, float]:
        """mu({g : germ of g at x is c or d}) per ray; exact on finite supports, sampled otherwise."""
        profile = {ray: 0.0 for ray in rays}
        rng = np.random.default_rng(self.seed)
        for component, weight in zip(self.components, self.weights):
            if component.support is not None:
                elements: Sequence[TreeNode] = component.support
            elif samples <= 0:
                raise PreconditionError(
                    f"component {component.label} has no finite support; bad-germ weights need samples"
                )
            else:
                elements = [component.draw(rng).element for _ in range(samples)]
            share = float(weight) / len(elements)
            for g in elements:
                for ray in rays:
                    if germ_at(g, ray) in BAD_GERMS:
                        profile[ray] += share
        return profile


def _generators(omega: OmegaString) -> list[Element]:
    return [Element(s, 0, omega) for s in "abcd"]


def build_uniform(omega: OmegaString = FIRST_GROUP, seed: Optional[int] = None) -> MixtureSampler:
    """u_S on {a, b, c, d}."""
    return MixtureSampler(
        "uniform",
        omega,
        [uniform_component("u_S", _generators(omega), 1.0)],
        seed,
        {"omega": str(omega)},
    )


def build_identity(omega: OmegaString = FIRST_GROUP, seed: Optional[int] = None) -> MixtureSampler:
    return MixtureSampler("id", omega, [atom_component("id", Element.identity(omega), 1.0)], seed, {"omega": str(omega)})


def build_f1_only(omega: OmegaString = FIRST_GROUP, seed: Optional[int] = None) -> MixtureSampler:
    """(u_{F_1} + u_{F_1^{-1}}) / 2 with F_1 = {id, g_1}."""
    g1 = build_gn(omega, 1)
    identity = Element.identity(omega)
    return MixtureSampler(
        "f1-only",
        omega,
        [
            uniform_component("F_1", [identity, g1], 0.5, partner="F_1~"),
            uniform_component("F_1~", [identity, g1.inverse()], 0.5, partner="F_1"),
        ],
        seed,
        {"omega": str(omega)},
    )


def cube_weights(epsilon: float, nmax: int) -> list[float]:
    """C n^{1+eps} / 2^n for n = 1..nmax, normalized to sum 1."""
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    if nmax < 1:
        raise PreconditionError("nmax must be at least 1")
    raw = np.array([n ** (1 + epsilon) / 2.0**n for n in range(1, nmax + 1)])
    return list(raw / raw.sum())


def _cube_mixture(
    name: str,
    prefix: str,
    seq: Sequence[TreeNode],
    epsilon: float,
    nmax: int,
    seed: Optional[int],
    spec: dict,
    extra: Sequence[Component] = (),
    scale: float = 1.0,
) -> MixtureSampler:
    components = list(extra)
    for n, c in enumerate(cube_weights(epsilon, nmax), start=1):
        label = f"{prefix}_{n}"
        components.append(cube_component(label, seq[:n], scale * c / 2, partner=label + "~"))
        components.append(cube_component(label + "~", seq[:n], scale * c / 2, partner=label, invert=True))
    return MixtureSampler(name, seq[0].omega, components, seed, {**spec, "epsilon": epsilon, "nmax": nmax})


def build_eta0(
    omega: OmegaString = FIRST_GROUP, epsilon: float = 0.1, nmax: int = 16, seed: Optional[int] = None
) -> MixtureSampler:
    """Sum of C n^{1+eps}/2^n (u_{F_n} + u_{F_n^{-1}}) over the g_n sequence."""
    seq = build_gn_sequence(omega, nmax)
    return _cube_mixture("eta0", "F", seq, epsilon, nmax, seed, {"omega": str(omega)})


def build_eta1(
    omega: OmegaString = FIRST_GROUP, epsilon: float = 0.1, nmax: int = 16, seed: Optional[int] = None
) -> MixtureSampler:
    """The same mixture over hat h_n, the g_n with b-germs."""
    seq = [build_hat_hn(omega, n) for n in range(1, nmax + 1)]
    return _cube_mixture("eta1", "hatH", seq, epsilon, nmax, seed, {"omega": str(omega)})


def build_eta2(epsilon: float = 0.1, nmax: int = 12, seed: Optional[int] = None) -> MixtureSampler:
    """The mixture over h_n; supported on H^b of the first group."""
    seq = [build_hn(n) for n in range(1, nmax + 1)]
    return _cube_mixture("eta2", "H", seq, epsilon, nmax, seed, {"omega": str(FIRST_GROUP)})


def build_eta2_restricted(epsilon: float = 0.1, nmax: int = 12, seed: Optional[int] = None) -> MixtureSampler:
    """(u_{a,b} + eta_2) / 2: every step has a germ in <b>."""
    seq = [build_hn(n) for n in range(1, nmax + 1)]
    ab = uniform_component("u_ab", [Element(s, 0, FIRST_GROUP) for s in "ab"], 0.5)
    return _cube_mixture(
        "eta2-restricted", "H", seq, epsilon, nmax, seed, {"omega": str(FIRST_GROUP)}, extra=[ab], scale=0.5
    )


@dataclass
class MuBetaInfo:
    fr: FrAnalysis
    beta: float
    A: int
    nmax: int
    mode: str
    c_beta: float
    kn: dict[int, int] = field(default_factory=dict)
    log2_lambda: dict[int, int] = field(default_factory=dict)
    a_bound: float = 0.0
    theorem_faithful: bool = False


def a_lower_bound(D: int, beta: float) -> float:
    """A must exceed D(1 + beta) / (2(1 - beta))."""
    return D * (1 + beta) / (2 * (1 - beta))


def is_theorem_faithful(D: int, beta: float, A: int) -> bool:
    return beta > 1 - 1 / D and A > a_lower_bound(D, beta) and A % D == 0


def build_mu_beta(
    omega: OmegaString,
    D: int = 3,
    beta: float = 0.9,
    A: int = 6,
    nmax: Optional[int] = None,
    seed: Optional[int] = None,
    mode: str = "desk",
) -> tuple[MixtureSampler, MuBetaInfo]:
    """u_S / 2 plus sum over D | n <= nmax of C_beta 2^{-n beta} (upsilon_n + inverse) / 2."""
    if not 0 < beta < 1:
        raise PreconditionError(f"beta={beta} must lie in (0, 1)")
    if mode not in ("desk", "theorem"):
        raise PreconditionError(f"mode must be desk or theorem, got {mode!r}")
    fr = check_frD(omega, D)
    fr.require()
    nmax = 8 * D if nmax is None else nmax
    levels = list(range(D, nmax + 1, D))
    if not levels:
        raise PreconditionError(f"nmax={nmax} leaves no n divisible by D={D}")
    decay = {n: 2.0 ** (-n * beta) for n in levels}
    c_beta = 1.0 / (2 * sum(decay.values()))
    info = MuBetaInfo(fr, beta, A, nmax, mode, c_beta, a_bound=a_lower_bound(D, beta))
    info.theorem_faithful = is_theorem_faithful(D, beta, A)
    if mode == "theorem" and not info.theorem_faithful:
        logger.warning(
            "theorem mode with A=%d, beta=%s: needs beta > %.3f and A > %.2f divisible by %d",
            A, beta, 1 - 1 / D, info.a_bound, D,
        )
    elif not info.theorem_faithful:
        logger.info("desk parameters A=%d, beta=%s are not theorem-faithful", A, beta)

    normalized = fr.normalized
    components = [uniform_component("u_S", _generators(normalized), 0.5)]
    for n in levels:
        k_n = desk_kn(n, A, D)
        upsilon = Upsilon(fr, n, k_n)
        info.kn[n] = k_n
        info.log2_lambda[n] = upsilon.log2_size
        weight = 0.5 * c_beta * decay[n]
        label = f"upsilon_{n}"
        components.append(upsilon_component(label, upsilon, weight, partner=label + "~"))
        components.append(upsilon_component(label + "~", upsilon, weight, partner=label, invert=True))
    spec = {
        "omega": str(omega),
        "shift": fr.shift,
        "D": D,
        "beta": beta,
        "A": A,
        "nmax": nmax,
        "mode": mode,
    }
    flags = {"theorem_faithful": info.theorem_faithful, "shift": fr.shift}
    return MixtureSampler("mu-beta", normalized, components, seed, spec, flags), info


def _matches_first_group(omega: OmegaString) -> bool:
    return all(omega.digit(i) == FIRST_GROUP.digit(i) for i in range(omega.window + 3))


def build_sampler(
    name: str,
    omega: OmegaString = FIRST_GROUP,
    *,
    D: int = 3,
    beta: float = 0.9,
    A: int = 6,
    nmax: Optional[int] = None,
    epsilon: float = 0.1,
    seed: Optional[int] = None,
    mode: str = "desk",
) -> MixtureSampler:
    """Sampler by its command-line name."""
    if name == "mu-beta":
        return build_mu_beta(omega, D, beta, A, nmax, seed, mode)[0]
    if name in ("eta2", "eta2-restricted") and not _matches_first_group(omega):
        raise PreconditionError(f"{name} lives on the first group, not on {omega}")
    if name == "eta0":
        return build_eta0(omega, epsilon, nmax or 16, seed)
    if name == "eta1":
        return build_eta1(omega, epsilon, nmax or 16, seed)
    if name == "eta2":
        return build_eta2(epsilon, nmax or 12, seed)
    if name == "eta2-restricted":
        return build_eta2_restricted(epsilon, nmax or 12, seed)
    if name == "uniform":
        return build_uniform(omega, seed)
    if name == "f1-only":
        return build_f1_only(omega, seed)
    if name == "id":
        return build_identity(omega, seed)
    raise PreconditionError(f"unknown sampler {name!r}; expected one of {', '.join(SAMPLER_NAMES)}")
