"""Substitutions zeta_i and sigma, the sequences g_n, h_n, hat h_n, and their length matrices.

Words are written in general notation: the letters b, c, d at level n are
the generators of G_{s^n omega}. ``zeta_i`` carries a word of level m+1 to
a word of level m whenever omega_m = i.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterator, Sequence
from functools import cached_property, reduce
from typing import NamedTuple, Optional

import numpy as np

from grigorchuk_lab.config import settings
from grigorchuk_lab.errors import PreconditionError
from grigorchuk_lab.services.core_tree import (
    KILLED_BY_DIGIT,
    KLEIN,
    Element,
    OmegaString,
    OneStep,
    Product,
    Rigid,
    Shifted,
    TreeNode,
    multiply,
    power,
    reduce_word,
    rigid,
    shifted,
)
from grigorchuk_lab.services.grigorchuk import FIRST_GROUP

logger = logging.getLogger(__name__)

SYLLABLES = ("ab", "ac", "ad")

ZETA_TABLES: dict[int, dict[str, str]] = {
    0: {"ab": "abab", "ac": "acac", "ad": "abadac"},
    1: {"ab": "abab", "ac": "adacab", "ad": "adad"},
    2: {"ab": "acabad", "ac": "acac", "ad": "adad"},
}

# first group, usual notation
SIGMA_TABLE = {"a": "aca", "b": "d", "c": "b", "d": "c"}

MATRIX_M = ((1, 2, 0), (1, 0, 2), (1, 0, 0))
MATRIX_A = ((0, 1, 0), (1, 1, 2), (1, 0, 0))


def count_vector(word: str) -> tuple[int, int, int]:
    """(#ab, #ac, #ad) of an a-alternating word, read letter by letter."""
    return word.count("b"), word.count("c"), word.count("d")


def substitution_matrix(i: int) -> np.ndarray:
    """M_i: column j holds the counts of zeta_i applied to the j-th syllable."""
    if i not in ZETA_TABLES:
        raise PreconditionError(f"substitution index {i} is not in 012")
    columns = [count_vector(ZETA_TABLES[i][s]) for s in SYLLABLES]
    return np.array(columns, dtype=object).T


def matrix_M() -> np.ndarray:
    return np.array(MATRIX_M, dtype=object)


def matrix_A() -> np.ndarray:
    return np.array(MATRIX_A, dtype=object)


def matrix_product(omega: OmegaString, start: int, stop: int) -> np.ndarray:
    """M_{omega_start} ... M_{omega_{stop-1}} with exact integers."""
    return reduce(
        lambda acc, n: acc.dot(substitution_matrix(omega.digit(n))),
        range(start, stop),
        np.identity(3, dtype=int).astype(object),
    )


def _letter_image(i: int, letter: str) -> str:
    if letter == "a":
        return "a"
    # zeta_i(a x) = a zeta_i(x) and every image starts with a
    return ZETA_TABLES[i]["a" + letter][1:]


def apply_zeta(i: int, word: str) -> str:
    """zeta_i as a letter homomorphism: a is fixed, x maps to a^{-1} zeta_i(a x)."""
    if i not in ZETA_TABLES:
        raise PreconditionError(f"substitution index {i} is not in 012")
    return reduce_word("".join(_letter_image(i, ch) for ch in word))


def apply_zeta_usual(word: str) -> str:
    """The single substitution zeta of the first group, in usual notation."""
    relabelled = "".join(FIRST_GROUP.relabel_letter(ch, 0, 1) for ch in word)
    return apply_zeta(0, relabelled)


def apply_sigma(word: str) -> str:
    """sigma: a -> aca, b -> d, c -> b, d -> c (first group, usual notation)."""
    return reduce_word("".join(SIGMA_TABLE[ch] for ch in word))


def zeta_a_parity(i: int, abelian: tuple[int, str]) -> int:
    """a-parity of zeta_i(W) from the abelian image (t, kappa) of W.

    Letters other than the one killed by digit i pick up one a each; on
    a-alternating words this is the parity of the killed-letter syllables.
    """
    t, klein = abelian
    return t ^ (0 if klein in ("", KILLED_BY_DIGIT[i]) else 1)


def _image_length(node: TreeNode, images: list[int]) -> int:
    """Upper bound on the length of a substituted node; Klein letters grow to ``images``."""
    explicit = node.to_explicit()
    if explicit is not None:
        word = explicit.word
        return word.count("a") + sum(word.count(x) * images[k] for k, x in enumerate(KLEIN))
    if isinstance(node, Product):
        return sum(_image_length(f, images) for f in node.factors)
    if isinstance(node, Shifted):
        return _image_length(node.inner, images)
    if isinstance(node, Rigid):
        # reduced words alternate a with a Klein letter
        half = (node.construction_length + 1) // 2
        return half + half * max(images)
    return node.construction_length * max(images)


class Substituted(TreeNode):
    """zeta_{omega_m} o ... o zeta_{omega_{j-1}} (U), with U at level j (lazy)."""

    def __init__(self, start: int, stop: int, seed: TreeNode):
        if not 0 <= start < stop or seed.level != stop:
            raise PreconditionError(
                f"substitution chain {start}..{stop} does not match the seed level {seed.level}"
            )
        self.start = start
        self.stop = stop
        self.seed = seed
        self.level = start
        self.omega = seed.omega

    def __repr__(self) -> str:
        return f"Substituted({self.start}, {self.stop}, {self.seed!r})"

    @cached_property
    def inner(self) -> TreeNode:
        """The next node down the chain, at level start + 1."""
        return substituted(self.start + 1, self.stop, self.seed)

    @cached_property
    def key(self) -> tuple:
        omega = self.omega
        return ("Z", omega.level_key(self.start), self.stop - self.start, self.seed.key)

    @cached_property
    def abelian(self) -> tuple[int, str]:
        return zeta_a_parity(self.omega.digit(self.start), self.inner.abelian), ""

    @cached_property
    def construction_length(self) -> int:
        product = matrix_product(self.omega, self.start, self.stop)
        images = [2 * int(sum(product[:, j])) - 1 for j in range(3)]
        return _image_length(self.seed, images)

    def one_step(self) -> OneStep:
        inner = self.inner
        a = Element("a", inner.level, self.omega)
        if self.abelian[0] == 0:
            return OneStep(multiply(a, inner, a), inner, False)
        return OneStep(multiply(a, inner), multiply(inner, a), True)

    def inverse(self) -> TreeNode:
        return Substituted(self.start, self.stop, self.seed.inverse())

    @cached_property
    def _expanded(self) -> Optional[Element]:
        explicit = self.seed.to_explicit()
        if explicit is None or self.construction_length > settings.explicit_length_cap:
            return None
        word = explicit.word
        for n in range(self.stop - 1, self.start - 1, -1):
            word = apply_zeta(self.omega.digit(n), word)
        return Element(word, self.start, self.omega)

    def to_explicit(self) -> Optional[Element]:
        return self._expanded


def substituted(start: int, stop: int, seed: TreeNode) -> TreeNode:
    if start == stop:
        return seed
    explicit = seed.to_explicit()
    if explicit is not None and not explicit.word:
        return Element("", start, seed.omega)
    return Substituted(start, stop, seed)


def zeta_chain(omega: OmegaString, j: int, seed: str | TreeNode, start: int = 0) -> TreeNode:
    """zeta_{omega_start} o ... o zeta_{omega_{j-1}} applied to a seed of level j."""
    if isinstance(seed, str):
        seed = Element.parse(seed, omega, j)
    if seed.level != j:
        raise PreconditionError(f"seed lives at level {seed.level}, expected {j}")
    return substituted(start, j, seed)


def gn_seed(omega: OmegaString, n: int) -> str:
    """ab unless omega_{n-1} = 2 (which kills b), then ac."""
    return "ac" if omega.digit(n - 1) == 2 else "ab"


def build_gn(omega: OmegaString, n: int) -> TreeNode:
    """g_n of the cube-independent sequence, a level-n stabilizer element of G_omega."""
    if n < 1:
        raise PreconditionError("g_n is defined for n >= 1")
    return zeta_chain(omega, n, gn_seed(omega, n))


def build_gn_sequence(omega: OmegaString, n: int) -> list[TreeNode]:
    return [build_gn(omega, k) for k in range(1, n + 1)]


def sigma_lift(node: TreeNode, level: int) -> TreeNode:
    """sigma(X) = (id, X) as a rigid node; X is read one level below ``level``."""
    return rigid(shifted(node, level + 1 - node.level), "1")


def build_hn(n: int) -> TreeNode:
    """h_n of the first group: h_{2k-1} = (zeta^2 sigma)^{k-1} zeta(ac), h_{2k} = h_{2k-1}^2."""
    if n < 1:
        raise PreconditionError("h_n is defined for n >= 1")
    k = (n + 1) // 2
    node: TreeNode = zeta_chain(FIRST_GROUP, 1, "ab")
    for _ in range(k - 1):
        node = substituted(0, 2, sigma_lift(node, 2))
    return node if n % 2 else power(node, 2)


def build_hat_hn(omega: OmegaString, n: int) -> TreeNode:
    """hat h_{2k-1} = g_{3k-2}, hat h_{2k} = g_{3k-1}: the g_n with b-germs."""
    if n < 1:
        raise PreconditionError("hat h_n is defined for n >= 1")
    k = (n + 1) // 2
    return build_gn(omega, 3 * k - 2 if n % 2 else 3 * k - 1)


def length_Ln(omega: OmegaString, n: int) -> int:
    """(1 1 1) M_{omega_0} ... M_{omega_{n-1}} (1 1 1)^T, exact."""
    if n < 0:
        raise PreconditionError("n must be nonnegative")
    return int(matrix_product(omega, 0, n).sum())


def zeta_power_length(n: int, seed: Sequence[int] = (0, 1, 0)) -> int:
    """(2 2 2) M^n l(seed): the length of zeta^n of a syllable word (usual notation)."""
    counts = np.array(seed, dtype=object)
    m = matrix_M()
    for _ in range(n):
        counts = m.dot(counts)
    return 2 * int(counts.sum())


def _is_primitive(matrix: np.ndarray) -> bool:
    current = (matrix > 0).astype(int)
    boolean = current.copy()
    for _ in range(matrix.shape[0] ** 2):
        if current.all():
            return True
        current = np.minimum(current @ boolean, 1)
    return False


def spectral_radius(matrix: np.ndarray) -> float:
    """Perron root by power iteration, with an eigenvalue fallback."""
    values = np.asarray(matrix, dtype=float)
    if (values < 0).any():
        raise PreconditionError("spectral radius needs a nonnegative matrix")
    if not _is_primitive(values):
        raise PreconditionError("matrix product is not primitive (no positive power)")
    vector = np.ones(values.shape[0]) / values.shape[0]
    estimate = 0.0
    for _ in range(settings.power_max_iterations):
        image = values @ vector
        norm = image.sum()
        if abs(norm - estimate) <= settings.power_tolerance * norm:
            return float(norm)
        estimate = norm
        vector = image / norm
    logger.warning("power iteration did not settle; falling back to eigvals")
    return float(max(abs(np.linalg.eigvals(values))))


class ExponentReportData(NamedTuple):
    lam: float
    alpha: float
    period: int


def growth_exponent(omega: OmegaString) -> ExponentReportData:
    """alpha = q log 2 / log lambda for the product over one period."""
    if omega.preperiod:
        logger.info("growth exponent of %s ignores the preperiod %s", omega, omega.preperiod)
    q = len(omega.period)
    product = reduce(
        lambda acc, ch: acc.dot(substitution_matrix(int(ch))),
        omega.period,
        np.identity(3, dtype=int).astype(object),
    )
    lam = spectral_radius(product)
    return ExponentReportData(lam, q * math.log(2) / math.log(lam), q)


def largest_real_root(coefficients: Sequence[float]) -> float:
    roots = np.roots(coefficients)
    return float(max(r.real for r in roots if abs(r.imag) < 1e-9))


def lambda_zero() -> float:
    """Positive root of X^3 - X^2 - 2X - 4."""
    return largest_real_root([1, -1, -2, -4])


def lambda_one() -> float:
    """Largest root of X^3 - 15X^2 + 44X - 32, the Perron root of M^2 A."""
    return largest_real_root([1, -15, 44, -32])


def tail_exponents() -> dict[str, float]:
    """Growth lower-bound exponents carried by eta_0, eta_1 and eta_2."""
    alpha0 = growth_exponent(FIRST_GROUP).alpha
    lam1 = spectral_radius(matrix_M().dot(matrix_M()).dot(matrix_A()))
    return {
        "eta0": alpha0,
        "eta1": 2 * alpha0 / 3,
        "eta2": 2 / math.log2(lam1),
    }


class CubeWitness(NamedTuple):
    vertex: str
    first: tuple[int, ...]
    second: tuple[int, ...]


class CubeIndependence(NamedTuple):
    independent: bool
    witness: Optional[CubeWitness]
    vertices_checked: int


def sample_vertices(depth: int, seed: Optional[int] = None) -> Iterator[str]:
    """All vertices up to the exhaustive depth, a seeded uniform sample beyond."""
    if depth <= settings.exhaustive_depth:
        for bits in itertools.product("01", repeat=depth):
            yield "".join(bits)
        return
    rng = np.random.default_rng(settings.default_seed if seed is None else seed)
    for row in rng.integers(0, 2, size=(settings.sampled_vertices, depth)):
        yield "".join(str(int(b)) for b in row)


def _orbit_images(
    vertex: str, seq: Sequence[TreeNode], ks: Sequence[int]
) -> dict[tuple[int, ...], str]:
    # x . g_n^{e_n} ... g_1^{e_1}: g_n acts first
    images: dict[tuple[int, ...], str] = {(): vertex}
    for g, k in zip(reversed(seq), reversed(ks)):
        following: dict[tuple[int, ...], str] = {}
        for eps, point in images.items():
            for e in range(k + 1):
                following[(e,) + eps] = point
                point = g.act(point)
        images = following
    return images


def check_cube_independence(
    seq: Sequence[TreeNode],
    test_depth: int,
    ks: Optional[Sequence[int]] = None,
    vertices: Optional[Sequence[str]] = None,
) -> CubeIndependence:
    """Brute-force injectivity of eps -> x . g_n^{e_n} ... g_1^{e_1} over a vertex set."""
    ks = [1] * len(seq) if ks is None else list(ks)
    if len(ks) != len(seq):
        raise PreconditionError("one exponent bound per sequence element")
    checked = 0
    for vertex in vertices if vertices is not None else sample_vertices(test_depth):
        checked += 1
        seen: dict[str, tuple[int, ...]] = {}
        for eps, image in _orbit_images(vertex, seq, ks).items():
            if image in seen:
                return CubeIndependence(False, CubeWitness(vertex, seen[image], eps), checked)
            seen[image] = eps
    return CubeIndependence(True, None, checked)


def quasi_cubic_set(
    seq: Sequence[TreeNode], n: Optional[int] = None, ks: Optional[Sequence[int]] = None
) -> list[TreeNode]:
    """F_n = {g_n^{e_n} ... g_1^{e_1}}, checked distinct on the orbit of 1^{n+2}."""
    seq = list(seq if n is None else seq[:n])
    ks = [1] * len(seq) if ks is None else list(ks)
    vertex = "1" * (len(seq) + 2)
    result = check_cube_independence(seq, len(vertex), ks, vertices=[vertex])
    if not result.independent:
        raise PreconditionError(f"quasi-cubic set collides: {result.witness}")
    elements = []
    for eps in itertools.product(*(range(k + 1) for k in ks)):
        # eps[i] is the exponent of g_{i+1}
        factors = [power(g, e) for g, e in zip(reversed(seq), reversed(eps)) if e]
        if factors:
            elements.append(multiply(*factors))
        else:
            elements.append(Element.identity(seq[0].omega if seq else FIRST_GROUP, 0))
    return elements


class CriticalExponent(NamedTuple):
    alpha: float
    depth: int
    period: Optional[ExponentReportData]


def critical_exponent_bound(omega: OmegaString, blocks: int = 30) -> CriticalExponent:
    """Volume exponent 1 / log2 lim L_n^{1/n}, read off L_n at two period-aligned depths.

    For strings satisfying Fr(D) this is also the critical constant of
    recurrence of (G_omega, Stab(1^inf)). ``period`` holds the exact
    q log 2 / log lambda when the period product is primitive.
    """
    if blocks < 1:
        raise PreconditionError("blocks must be positive")
    span = len(omega.period) * math.ceil(blocks / len(omega.period))
    start = len(omega.preperiod) + span
    stop = start + span
    gain = math.log2(length_Ln(omega, stop)) - math.log2(length_Ln(omega, start))
    try:
        period = growth_exponent(omega)
    except PreconditionError as exc:
        logger.info("no period exponent for %s: %s", omega, exc)
        period = None
    return CriticalExponent(span / gain, stop, period)
