"""The G_omega layer: omega strings, germs at cofinal rays and the subgroup H^b."""

from __future__ import annotations

import logging
from typing import Optional

from grigorchuk_lab.config import settings
from grigorchuk_lab.errors import CapacityError, PreconditionError
from grigorchuk_lab.services.core_tree import (
    KILLED_BY_DIGIT,
    OmegaString,
    TreeNode,
    klein_multiply,
    normalize_ray,
)

logger = logging.getLogger(__name__)

FIRST_GROUP = OmegaString("", "012")

# germ cosets modulo H_o = {id, b}
B_COSET = 0
C_COSET = 1


def parse_omega(text: str) -> OmegaString:
    """Parse ``"preperiod|period"`` and log when the germ group degenerates."""
    omega = OmegaString.parse(text)
    if not omega.is_torsion_type:
        logger.warning("omega %s is not of torsion type; the germ group at 1^inf collapses", omega)
    return omega


def digit(omega: OmegaString, n: int) -> int:
    return omega.digit(n)


def omega_kills(omega: OmegaString, n: int) -> str:
    """Letter killed by omega_n: 0 kills d, 1 kills c, 2 kills b."""
    return KILLED_BY_DIGIT[omega.digit(n)]


def germ_group_collapsed(omega: OmegaString) -> bool:
    """True when some letter vanishes eventually, so the isotropy germs shrink."""
    return not omega.is_torsion_type


def check_ray(ray: str) -> str:
    if any(ch not in "01" for ch in ray):
        raise PreconditionError(f"ray prefix {ray!r} must be binary (the tail is all 1s)")
    return normalize_ray(ray)


def germ_at(g: TreeNode, ray: str) -> str:
    """Germ of g at the ray ``ray + 1^inf`` as a Klein letter (``""`` is id)."""
    return g.trace(check_ray(ray))[1]


def germ_coset(germ: str) -> int:
    """Class of a germ value modulo {id, b}."""
    return B_COSET if germ in ("", "b") else C_COSET


def germ_label(germ: str) -> str:
    """Single-character form of a germ value."""
    return germ or "e"


def _is_letter(node: TreeNode, letters: str) -> bool:
    explicit = node.to_explicit()
    return explicit is not None and len(explicit.word) <= 1 and (explicit.word or "e") in letters


def _bad_letter(node: TreeNode) -> bool:
    explicit = node.to_explicit()
    if explicit is None or explicit.word not in ("c", "d"):
        return False
    return not explicit.omega.letter_vanishes(explicit.word)


def default_search_depth(g: TreeNode) -> int:
    return settings.germ_depth_padding * (
        g.construction_length.bit_length() + len(g.omega.period) + len(g.omega.preperiod)
    )


def in_Hb(g: TreeNode, bound: Optional[int] = None) -> Optional[bool]:
    """Tri-state membership in H^b: True, False, or None when undecided at ``bound``."""
    if germ_group_collapsed(g.omega):
        logger.info("in_Hb on non-torsion omega %s: germ group is collapsed", g.omega)
    bound = default_search_depth(g) if bound is None else bound
    frontier: dict[tuple, TreeNode] = {g.key: g}
    for _ in range(bound + 1):
        if all(_is_letter(node, "eab") for node in frontier.values()):
            return True
        if any(_bad_letter(node) for node in frontier.values()):
            return False
        following: dict[tuple, TreeNode] = {}
        for node in frontier.values():
            if _is_letter(node, "eab"):
                continue
            left, right, _ = node.one_step()
            for child in (left, right):
                explicit = child.to_explicit()
                child = explicit if explicit is not None else child
                following.setdefault(child.key, child)
            if len(following) > settings.support_enumeration_cap:
                logger.warning("in_Hb frontier exceeded %d sections", settings.support_enumeration_cap)
                return None
        frontier = following
    return None


def bad_germ_support(g: TreeNode, depth_bound: Optional[int] = None) -> set[str]:
    """Rays (as normalized prefixes) where the germ of g lies in {c, d}."""
    depth_bound = default_search_depth(g) if depth_bound is None else depth_bound
    memo: dict[tuple, frozenset[str]] = {}

    def explore(node: TreeNode, remaining: int) -> frozenset[str]:
        explicit = node.to_explicit()
        if explicit is not None:
            node = explicit
            if len(explicit.word) <= 1:
                return frozenset({""}) if _bad_letter(explicit) else frozenset()
        cached = memo.get(node.key)
        if cached is not None:
            return cached
        if remaining <= 0:
            raise CapacityError(f"depth bound {depth_bound} is too small to classify the sections")
        left, right, _ = node.one_step()
        rays = frozenset(
            normalize_ray(bit + suffix)
            for bit, child in (("0", left), ("1", right))
            for suffix in explore(child, remaining - 1)
        )
        memo[node.key] = rays
        return rays

    return set(explore(g, depth_bound))


def germ_multiplicative_at_fixed_point(g: TreeNode, h: TreeNode, ray: str = "") -> bool:
    """For g fixing the ray, germ(gh) equals germ(g) * germ(h) there."""
    image, germ_g = g.trace(check_ray(ray))
    if image != normalize_ray(ray):
        raise PreconditionError("the first element must fix the ray")
    germ_h = h.trace(image)[1]
    return germ_at(g * h, ray) == klein_multiply(germ_g, germ_h)


def in_hb_orbit(ray: str) -> bool:
    """Membership of ``ray + 1^inf`` in the H^b-orbit of 1^inf for (012)^inf.

    Digits at positions 4, 7, 10, ... (one-based) must all be 1.
    """
    ray = check_ray(ray)
    return all(ray[i] == "1" for i in range(3, len(ray), 3))
