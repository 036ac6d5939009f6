"""Word arithmetic for automorphisms of the rooted binary tree.

Elements of G_{s^n omega} are handled in two shapes sharing the TreeNode
protocol:

* ``Element``: an explicit reduced word over {a, b, c, d} at a level n.
* lazy nodes (``Product``, ``Rigid``, ``Shifted`` and, in subst_calculus,
  ``Substituted``) for elements whose words are too long to expand.

Vertices and rays are strings over {0, 1}. A ray is stored as a finite
prefix; every digit after the prefix is 1, so ``""`` is the ray 1^inf.
The action is a right action: ``x.g.h == (x.g).h``.
"""

from __future__ import annotations

import functools
import itertools
import logging
from abc import ABC, abstractmethod
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

from grigorchuk_lab.config import settings
from grigorchuk_lab.errors import (
    CapacityError,
    ContractionError,
    LevelMismatchError,
    OmegaParseError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

LETTERS = "abcd"
KLEIN = "bcd"

# Klein four-group on {id, b, c, d}; the identity is the empty string.
_KLEIN_TABLE = {
    ("", ""): "",
    ("", "b"): "b",
    ("", "c"): "c",
    ("", "d"): "d",
    ("b", "b"): "",
    ("c", "c"): "",
    ("d", "d"): "",
    ("b", "c"): "d",
    ("c", "b"): "d",
    ("c", "d"): "b",
    ("d", "c"): "b",
    ("b", "d"): "c",
    ("d", "b"): "c",
}
for _x in KLEIN:
    _KLEIN_TABLE[(_x, "")] = _x

# digit -> letter it kills
KILLED_BY_DIGIT = {0: "d", 1: "c", 2: "b"}
DIGIT_KILLING = {letter: digit for digit, letter in KILLED_BY_DIGIT.items()}


def klein_multiply(x: str, y: str) -> str:
    """Multiply two Klein letters (``""`` is the identity)."""
    return _KLEIN_TABLE[(x, y)]


def klein_product(letters: Iterable[str]) -> str:
    """Multiply a sequence of Klein letters."""
    result = ""
    for letter in letters:
        result = _KLEIN_TABLE[(result, letter)]
    return result


@dataclass(frozen=True)
class OmegaString:
    """Eventually periodic string over {0, 1, 2}: preperiod then period forever."""

    preperiod: str
    period: str

    def __post_init__(self) -> None:
        if not self.period:
            raise OmegaParseError("omega period must be nonempty")
        for ch in self.preperiod + self.period:
            if ch not in "012":
                raise OmegaParseError(f"omega digit {ch!r} is not in 012")

    @classmethod
    def parse(cls, text: str) -> OmegaString:
        """Parse ``"preperiod|period"``; a bare string is a pure period."""
        text = text.strip()
        if "|" in text:
            pre, _, period = text.partition("|")
        else:
            pre, period = "", text
        if "|" in period:
            raise OmegaParseError(f"too many '|' in omega {text!r}")
        return cls(pre.strip(), period.strip())

    def __str__(self) -> str:
        return f"{self.preperiod}|{self.period}"

    def digit(self, n: int) -> int:
        if n < 0:
            raise PreconditionError("omega index must be nonnegative")
        if n < len(self.preperiod):
            return int(self.preperiod[n])
        return int(self.period[(n - len(self.preperiod)) % len(self.period)])

    def kills(self, n: int) -> str:
        """Letter sent to the identity by the digit at position n."""
        return KILLED_BY_DIGIT[self.digit(n)]

    def image(self, letter: str, n: int) -> str:
        """omega_n(letter): ``"a"`` or ``""`` for a Klein letter."""
        return "" if KILLED_BY_DIGIT[self.digit(n)] == letter else "a"

    def level_key(self, n: int) -> int:
        """Smallest level whose digit tail equals the tail at n."""
        pre = len(self.preperiod)
        if n < pre:
            return n
        return pre + (n - pre) % len(self.period)

    def shift(self, k: int) -> OmegaString:
        """The shifted string s^k omega."""
        key = self.level_key(k)
        if key < len(self.preperiod):
            return OmegaString(self.preperiod[key:], self.period)
        offset = key - len(self.preperiod)
        return OmegaString("", self.period[offset:] + self.period[:offset])

    @property
    def window(self) -> int:
        """Digits needed to see the whole string (preperiod plus one period)."""
        return len(self.preperiod) + len(self.period)

    @property
    def is_torsion_type(self) -> bool:
        """All three digits occur infinitely often."""
        return set(self.period) == {"0", "1", "2"}

    def letter_vanishes(self, letter: str) -> bool:
        """True when ``letter`` acts trivially from some level on (degenerate omega)."""
        killer = str(DIGIT_KILLING[letter])
        return set(self.period) == {killer}

    def letter_is_trivial(self, letter: str, n: int) -> bool:
        """True when the level-n generator ``letter`` acts as the identity."""
        if letter == "a":
            return False
        killer = DIGIT_KILLING[letter]
        return all(self.digit(i) == killer for i in range(n, n + self.window))

    def digit_permutation(self, src: int, dst: int) -> dict[int, int] | None:
        """Digit renaming carrying the tail at ``src`` onto the tail at ``dst``."""
        mapping: dict[int, int] = {}
        used: dict[int, int] = {}
        for i in range(self.window + len(self.period)):
            x, y = self.digit(src + i), self.digit(dst + i)
            if mapping.setdefault(x, y) != y or used.setdefault(y, x) != x:
                return None
        return mapping

    def relabel_letter(self, letter: str, src: int, dst: int) -> str:
        """Name at level ``dst`` of the generator called ``letter`` at level ``src``."""
        if letter == "a":
            return letter
        mapping = self.digit_permutation(src, dst)
        if mapping is None:
            raise PreconditionError(f"levels {src} and {dst} of {self} are not relabelings")
        digit = DIGIT_KILLING[letter]
        if digit not in mapping:
            # the killing digit never occurs at src; any free slot is consistent
            free = sorted(set(KILLED_BY_DIGIT) - set(mapping.values()))
            return KILLED_BY_DIGIT[free[0]]
        return KILLED_BY_DIGIT[mapping[digit]]

    def canonical_level(self, n: int) -> int:
        """Lowest level m <= n whose tail is a digit renaming of the tail at n."""
        for m in range(n + 1):
            if self.digit_permutation(n, m) is not None:
                return m
        return n


def reduce_word(raw: str) -> str:
    """Free reduction with a^2 = 1 and Klein products of adjacent b, c, d."""
    stack: list[str] = []
    for letter in raw:
        if letter not in LETTERS:
            raise PreconditionError(f"letter {letter!r} is not in abcd")
        if letter == "a":
            if stack and stack[-1] == "a":
                stack.pop()
            else:
                stack.append("a")
            continue
        if stack and stack[-1] != "a":
            merged = klein_multiply(stack.pop(), letter)
            if merged:
                stack.append(merged)
            continue
        stack.append(letter)
    return "".join(stack)


def _flip(bit: str) -> str:
    return "1" if bit == "0" else "0"


def normalize_ray(ray: str) -> str:
    """Drop the trailing 1s of a ray prefix."""
    return ray.rstrip("1")


class OneStep(NamedTuple):
    """One step of the wreath recursion: g = (left, right) with an optional swap."""

    left: TreeNode
    right: TreeNode
    swap: bool


class TreeNode(ABC):
    """An automorphism of the level-``level`` subtree of G_{s^level omega}."""

    level: int
    omega: OmegaString

    @abstractmethod
    def one_step(self) -> OneStep: ...

    @abstractmethod
    def inverse(self) -> TreeNode: ...

    @property
    @abstractmethod
    def key(self) -> tuple: ...

    @property
    @abstractmethod
    def abelian(self) -> tuple[int, str]:
        """(a-parity, Klein part) of any representing word."""

    @property
    @abstractmethod
    def construction_length(self) -> int:
        """Length of the word the node was built from (upper bound on word length)."""

    def to_explicit(self) -> Element | None:
        return None

    @property
    def is_explicit(self) -> bool:
        return False

    def act(self, vertex: str) -> str:
        """Image of a finite vertex."""
        if not vertex:
            return vertex
        left, right, swap = self.one_step()
        bit = vertex[0]
        section = left if bit == "0" else right
        return (_flip(bit) if swap else bit) + section.act(vertex[1:])

    def trace(self, ray: str) -> tuple[str, str]:
        """Image of a ray cofinal with 1^inf together with the germ there."""
        bit = ray[0] if ray else "1"
        left, right, swap = self.one_step()
        section = left if bit == "0" else right
        image, germ = section.trace(ray[1:])
        return normalize_ray((_flip(bit) if swap else bit) + image), germ

    def __mul__(self, other: TreeNode) -> TreeNode:
        return multiply(self, other)


@functools.lru_cache(maxsize=1 << 16)
def _split_word(omega: OmegaString, level_key: int, word: str) -> tuple[str, str, bool]:
    left: list[str] = []
    right: list[str] = []
    swap = False
    for letter in word:
        if letter == "a":
            swap = not swap
            continue
        image = omega.image(letter, level_key)
        if swap:
            left.append(letter)
            right.append(image)
        else:
            left.append(image)
            right.append(letter)
    return reduce_word("".join(left)), reduce_word("".join(right)), swap


@dataclass(frozen=True)
class Element(TreeNode):
    """Reduced word over {a, b, c, d} read as an element of G_{s^level omega}."""

    word: str
    level: int
    omega: OmegaString

    @classmethod
    def parse(cls, text: str, omega: OmegaString, level: int = 0) -> Element:
        text = text.strip()
        if text in ("", "id", "e", "1"):
            return cls("", level, omega)
        return cls(reduce_word(text), level, omega)

    @classmethod
    def identity(cls, omega: OmegaString, level: int = 0) -> Element:
        return cls("", level, omega)

    def __str__(self) -> str:
        return self.word or "id"

    def __len__(self) -> int:
        return len(self.word)

    @property
    def is_explicit(self) -> bool:
        return True

    def to_explicit(self) -> Element:
        return self

    @property
    def key(self) -> tuple:
        return ("W", self.word, self.omega.level_key(self.level))

    @property
    def abelian(self) -> tuple[int, str]:
        return self.word.count("a") % 2, klein_product(ch for ch in self.word if ch != "a")

    @property
    def construction_length(self) -> int:
        return len(self.word)

    def one_step(self) -> OneStep:
        left, right, swap = _split_word(self.omega, self.omega.level_key(self.level), self.word)
        return OneStep(
            Element(left, self.level + 1, self.omega),
            Element(right, self.level + 1, self.omega),
            swap,
        )

    def inverse(self) -> Element:
        return Element(self.word[::-1], self.level, self.omega)

    def relabel(self, level: int) -> Element:
        """The same automorphism written in the alphabet of an equivalent level."""
        if level == self.level:
            return self
        word = "".join(self.omega.relabel_letter(ch, self.level, level) for ch in self.word)
        return Element(word, level, self.omega)

    def usual(self) -> Element:
        """Relabel to the lowest equivalent level (usual notation for (012)^inf)."""
        return self.relabel(self.omega.canonical_level(self.level))

    def act(self, vertex: str) -> str:
        bits = list(vertex)
        depth = len(bits)
        for letter in self.word:
            if not depth:
                break
            if letter == "a":
                bits[0] = _flip(bits[0])
                continue
            i = 0
            while i < depth and bits[i] == "1":
                i += 1
            if i + 1 < depth and self.omega.image(letter, self.level + i) == "a":
                bits[i + 1] = _flip(bits[i + 1])
        return "".join(bits)

    def trace(self, ray: str) -> tuple[str, str]:
        bits = list(ray)
        germ = ""
        for letter in self.word:
            if letter == "a":
                if bits:
                    bits[0] = _flip(bits[0])
                else:
                    bits.append("0")
                continue
            i = 0
            while i < len(bits) and bits[i] == "1":
                i += 1
            if i == len(bits):
                if not self.omega.letter_vanishes(letter):
                    germ = klein_multiply(germ, letter)
                continue
            if self.omega.image(letter, self.level + i) == "a":
                if i + 1 < len(bits):
                    bits[i + 1] = _flip(bits[i + 1])
                else:
                    bits.append("0")
        return normalize_ray("".join(bits)), germ

    def serialize(self) -> dict:
        return {"word": self.word, "level": self.level, "omega": str(self.omega)}


class Product(TreeNode):
    """Lazy product g_1 g_2 ... g_k; build it through ``multiply``."""

    def __init__(self, factors: tuple[TreeNode, ...]):
        self.factors = factors
        self.level = factors[0].level
        self.omega = factors[0].omega

    def __repr__(self) -> str:
        return f"Product({len(self.factors)} factors @ {self.level})"

    @cached_property
    def key(self) -> tuple:
        return ("P",) + tuple(f.key for f in self.factors)

    @cached_property
    def abelian(self) -> tuple[int, str]:
        parity, klein = 0, ""
        for factor in self.factors:
            p, k = factor.abelian
            parity ^= p
            klein = klein_multiply(klein, k)
        return parity, klein

    @cached_property
    def construction_length(self) -> int:
        return sum(f.construction_length for f in self.factors)

    def one_step(self) -> OneStep:
        lefts: list[TreeNode] = []
        rights: list[TreeNode] = []
        swap = False
        for factor in self.factors:
            left, right, s = factor.one_step()
            if swap:
                lefts.append(right)
                rights.append(left)
            else:
                lefts.append(left)
                rights.append(right)
            swap ^= s
        level = self.level + 1
        return OneStep(
            multiply(*lefts, level=level, omega=self.omega),
            multiply(*rights, level=level, omega=self.omega),
            swap,
        )

    def inverse(self) -> TreeNode:
        return multiply(*(f.inverse() for f in reversed(self.factors)))

    def to_explicit(self) -> Element | None:
        words = []
        for factor in self.factors:
            explicit = factor.to_explicit()
            if explicit is None:
                return None
            words.append(explicit.word)
        return Element(reduce_word("".join(words)), self.level, self.omega)

    def act(self, vertex: str) -> str:
        for factor in self.factors:
            vertex = factor.act(vertex)
        return vertex

    def trace(self, ray: str) -> tuple[str, str]:
        germ = ""
        for factor in self.factors:
            ray, g = factor.trace(ray)
            germ = klein_multiply(germ, g)
        return ray, germ


def multiply(
    *nodes: TreeNode, level: int | None = None, omega: OmegaString | None = None
) -> TreeNode:
    """Product of elements of the same group; explicit neighbours are merged."""
    if nodes:
        level = nodes[0].level if level is None else level
        omega = nodes[0].omega if omega is None else omega
    if level is None or omega is None:
        raise PreconditionError("empty product needs an explicit level and omega")
    flat: list[TreeNode] = []
    for node in nodes:
        if node.level != level or node.omega != omega:
            raise LevelMismatchError(
                f"cannot multiply level {node.level} of {node.omega} into level {level} of {omega}"
            )
        parts = node.factors if isinstance(node, Product) else (node,)
        for part in parts:
            if isinstance(part, Element):
                if not part.word:
                    continue
                if flat and isinstance(flat[-1], Element):
                    merged = reduce_word(flat[-1].word + part.word)
                    flat.pop()
                    if merged:
                        flat.append(Element(merged, level, omega))
                    continue
            flat.append(part)
    if not flat:
        return Element("", level, omega)
    if len(flat) == 1:
        return flat[0]
    return Product(tuple(flat))


def inverse(g: TreeNode) -> TreeNode:
    return g.inverse()


def power(g: TreeNode, k: int) -> TreeNode:
    if k < 0:
        return power(g.inverse(), -k)
    if isinstance(g, Element):
        return Element(reduce_word(g.word * k), g.level, g.omega)
    return multiply(*([g] * k), level=g.level, omega=g.omega)


class Rigid(TreeNode):
    """Acts as ``inner`` below ``vertex`` and trivially everywhere else."""

    def __init__(self, inner: TreeNode, vertex: str):
        if not vertex:
            raise PreconditionError("use the inner element directly for the root")
        self.inner = inner
        self.vertex = vertex
        self.level = inner.level - len(vertex)
        self.omega = inner.omega
        if self.level < 0:
            raise PreconditionError("rigid vertex is deeper than the inner level")

    def __repr__(self) -> str:
        return f"Rigid({self.inner!r} at {self.vertex!r})"

    @cached_property
    def key(self) -> tuple:
        return ("R", self.inner.key, self.vertex)

    @property
    def abelian(self) -> tuple[int, str]:
        return 0, self.inner.abelian[1]

    @cached_property
    def construction_length(self) -> int:
        return self.inner.construction_length << len(self.vertex)

    def one_step(self) -> OneStep:
        child = rigid(self.inner, self.vertex[1:])
        trivial = Element("", self.level + 1, self.omega)
        if self.vertex[0] == "0":
            return OneStep(child, trivial, False)
        return OneStep(trivial, child, False)

    def inverse(self) -> TreeNode:
        return Rigid(self.inner.inverse(), self.vertex)

    def act(self, vertex: str) -> str:
        depth = len(self.vertex)
        if len(vertex) <= depth or not vertex.startswith(self.vertex):
            return vertex
        return self.vertex + self.inner.act(vertex[depth:])

    def trace(self, ray: str) -> tuple[str, str]:
        depth = len(self.vertex)
        head = (ray + "1" * depth)[:depth]
        if head != self.vertex:
            return ray, ""
        image, germ = self.inner.trace(ray[depth:])
        return normalize_ray(self.vertex + image), germ


def rigid(inner: TreeNode, vertex: str) -> TreeNode:
    """Rigid-stabilizer embedding of ``inner`` at ``vertex`` (lazy)."""
    if not vertex:
        return inner
    if isinstance(inner, Element) and not inner.word:
        return Element("", inner.level - len(vertex), inner.omega)
    return Rigid(inner, vertex)


class Shifted(TreeNode):
    """The same automorphism read ``delta`` levels deeper, delta a period multiple."""

    def __init__(self, inner: TreeNode, delta: int):
        omega = inner.omega
        if omega.level_key(inner.level) != omega.level_key(inner.level + delta):
            raise PreconditionError(f"shift by {delta} does not preserve the digits of {omega}")
        self.inner = inner
        self.delta = delta
        self.level = inner.level + delta
        self.omega = omega

    def __repr__(self) -> str:
        return f"Shifted({self.inner!r}, {self.delta})"

    @property
    def key(self) -> tuple:
        return self.inner.key

    @property
    def abelian(self) -> tuple[int, str]:
        return self.inner.abelian

    @property
    def construction_length(self) -> int:
        return self.inner.construction_length

    def one_step(self) -> OneStep:
        left, right, swap = self.inner.one_step()
        return OneStep(shifted(left, self.delta), shifted(right, self.delta), swap)

    def inverse(self) -> TreeNode:
        return shifted(self.inner.inverse(), self.delta)

    def to_explicit(self) -> Element | None:
        explicit = self.inner.to_explicit()
        if explicit is None:
            return None
        return Element(explicit.word, self.level, self.omega)

    def act(self, vertex: str) -> str:
        return self.inner.act(vertex)

    def trace(self, ray: str) -> tuple[str, str]:
        return self.inner.trace(ray)


def shifted(node: TreeNode, delta: int) -> TreeNode:
    if delta == 0:
        return node
    if isinstance(node, Element):
        if node.omega.level_key(node.level) != node.omega.level_key(node.level + delta):
            raise PreconditionError(f"shift by {delta} does not preserve the digits")
        return Element(node.word, node.level + delta, node.omega)
    if isinstance(node, Shifted):
        return shifted(node.inner, node.delta + delta)
    return Shifted(node, delta)


def one_step(g: TreeNode) -> OneStep:
    return g.one_step()


def section(g: TreeNode, vertex: str) -> TreeNode:
    """Section g_v; explicit whenever no lazy part survives."""
    node = g
    for bit in vertex:
        left, right, _ = node.one_step()
        node = left if bit == "0" else right
    explicit = node.to_explicit()
    return explicit if explicit is not None else node


def act_vertex(vertex: str, g: TreeNode) -> str:
    """v.g under the right action."""
    if any(ch not in "01" for ch in vertex):
        raise PreconditionError(f"vertex {vertex!r} is not a binary string")
    return g.act(vertex)


def act_ray(ray: str, g: TreeNode) -> str:
    """x.g for a ray cofinal with 1^inf given by its finite prefix."""
    return g.trace(ray)[0]


def all_vertices(depth: int) -> Iterator[str]:
    for bits in itertools.product("01", repeat=depth):
        yield "".join(bits)


_IDENTITY_CACHE: dict[tuple[OmegaString, int, str], bool] = {}


def _word_is_identity(word: str, level: int, omega: OmegaString, depth: int) -> bool:
    if not word:
        return True
    if word.count("a") % 2:
        return False
    if len(word) == 1:
        return omega.letter_is_trivial(word, level)
    cache_key = (omega, omega.level_key(level), word)
    cached = _IDENTITY_CACHE.get(cache_key)
    if cached is not None:
        return cached
    if depth > settings.identity_depth_guard:
        raise ContractionError(f"identity recursion exceeded depth {depth} on {word!r}")
    left, right, swap = _split_word(omega, omega.level_key(level), word)
    if swap:
        result = False
    else:
        if len(left) >= len(word) or len(right) >= len(word):
            raise ContractionError(f"sections of {word!r} did not contract")
        result = _word_is_identity(left, level + 1, omega, depth + 1) and _word_is_identity(
            right, level + 1, omega, depth + 1
        )
    _IDENTITY_CACHE[cache_key] = result
    return result


def _node_is_identity(node: TreeNode, depth: int) -> bool:
    explicit = node.to_explicit()
    if explicit is not None:
        return _word_is_identity(explicit.word, explicit.level, explicit.omega, depth)
    if isinstance(node, Rigid):
        return _node_is_identity(node.inner, depth)
    if depth > settings.identity_depth_guard:
        raise ContractionError(f"identity recursion exceeded depth {depth} on a lazy node")
    if node.abelian != (0, ""):
        return False
    left, right, swap = node.one_step()
    if swap:
        return False
    return _node_is_identity(left, depth + 1) and _node_is_identity(right, depth + 1)


def is_identity(g: TreeNode) -> bool:
    """Decide g == id through the contracting recursion."""
    return _node_is_identity(g, 0)


def equal(g: TreeNode, h: TreeNode) -> bool:
    return is_identity(multiply(g, h.inverse()))


def element_order(g: TreeNode, cap: int) -> int | None:
    """Least k <= cap with g^k = id, or None when the order exceeds the cap."""
    if cap < 1:
        raise PreconditionError("cap must be at least 1")
    acc: TreeNode = g
    for k in range(1, cap + 1):
        if is_identity(acc):
            return k
        acc = multiply(acc, g)
    return None


def _conjugator_letter(omega: OmegaString, base_level: int, m: int) -> str:
    """Letter y of the substitution a -> a y a carrying level base+m to base+m-1."""
    here = base_level + m - 1
    if m >= 2 and omega.digit(here - 1) != omega.digit(here):
        return omega.kills(here - 1)
    return next(y for y in KLEIN if omega.image(y, here) == "a")


def _check_commutator_letter(omega: OmegaString, gamma: str, depth: int, base_level: int) -> None:
    if gamma not in KLEIN:
        raise PreconditionError(f"commutator letter must be one of bcd, got {gamma!r}")
    if depth and omega.kills(base_level + depth - 1) != gamma:
        raise PreconditionError(
            f"letter {gamma} is not killed by digit {omega.digit(base_level + depth - 1)} "
            f"at level {base_level + depth - 1}"
        )


def commutator_word(gamma: str, a_first: bool = False) -> str:
    return f"a{gamma}a{gamma}" if a_first else f"{gamma}a{gamma}a"


def iota(
    omega: OmegaString,
    gamma: str,
    vertex: str,
    *,
    base_level: int = 0,
    a_first: bool = False,
) -> Element:
    """Explicit word of the rigid-stabilizer element acting as [gamma, a] below ``vertex``.

    ``gamma`` names the generator at level ``base_level + len(vertex)`` and must be
    killed by the digit just above that level. The default is [gamma, a] =
    ``gamma a gamma a``; ``a_first`` gives [a, gamma] = ``a gamma a gamma``, so
    iota([a, b], 1^n) is ``iota(omega, "b", "1" * n, a_first=True)``.
    """
    _check_commutator_letter(omega, gamma, len(vertex), base_level)
    word = commutator_word(gamma, a_first)
    depth = len(vertex)
    for m in range(depth, 0, -1):
        y = _conjugator_letter(omega, base_level, m)
        image = "".join(f"a{y}a" if ch == "a" else ch for ch in word)
        if vertex[m - 1] == "0":
            image = f"a{image}a"
        word = reduce_word(image)
    return Element(word, base_level, omega)


def rigid_commutator(
    omega: OmegaString,
    gamma: str,
    vertex: str,
    *,
    base_level: int = 0,
    a_first: bool = False,
) -> TreeNode:
    """Lazy counterpart of ``iota``: the commutator embedded at ``vertex``."""
    _check_commutator_letter(omega, gamma, len(vertex), base_level)
    inner = Element(commutator_word(gamma, a_first), base_level + len(vertex), omega)
    return rigid(inner, vertex)


def portrait_along_ray(g: TreeNode, vertex: str) -> list[tuple[str, TreeNode]]:
    """Sections at the siblings v_1..v_{i-1} v'_i and finally at v itself."""
    if g.act(vertex) != vertex:
        raise PreconditionError(f"vertex {vertex!r} is not fixed by the element")
    portrait: list[tuple[str, TreeNode]] = []
    node = g
    for i, bit in enumerate(vertex):
        left, right, _ = node.one_step()
        sibling = right if bit == "0" else left
        explicit = sibling.to_explicit()
        portrait.append((vertex[:i] + _flip(bit), explicit if explicit is not None else sibling))
        node = left if bit == "0" else right
    explicit = node.to_explicit()
    portrait.append((vertex, explicit if explicit is not None else node))
    return portrait


def expand(g: TreeNode) -> Element:
    """Explicit word of g; fails when a lazy part is longer than the expansion cap."""
    explicit = g.to_explicit()
    if explicit is None:
        raise CapacityError(
            f"element is lazy with construction length {g.construction_length}; "
            f"raise explicit_length_cap ({settings.explicit_length_cap}) to expand it"
        )
    return explicit
