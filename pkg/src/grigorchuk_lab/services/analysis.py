"""Omega analysis and matrix tables shared by the CLI and the HTTP surface."""

import logging
from typing import NamedTuple, Optional

import numpy as np

from grigorchuk_lab.errors import PreconditionError
from grigorchuk_lab.services.core_tree import OmegaString
from grigorchuk_lab.services.grigorchuk import parse_omega
from grigorchuk_lab.services.measures import FrAnalysis, check_frD
from grigorchuk_lab.services.subst_calculus import (
    ExponentReportData,
    critical_exponent_bound,
    matrix_A,
    matrix_M,
    spectral_radius,
    substitution_matrix,
    tail_exponents,
)

logger = logging.getLogger(__name__)


class OmegaAnalysis(NamedTuple):
    omega: OmegaString
    fr: FrAnalysis
    exponent: Optional[ExponentReportData]
    tails: dict[str, float]
    volume_exponent: float


def _is_first_group(omega: OmegaString) -> bool:
    return len(omega.period) == 3 and omega.is_torsion_type


def analyze_omega(text: str, D: int) -> OmegaAnalysis:
    """Fr(D) scan, the volume exponent from L_n and the period exponent when it exists."""
    omega = parse_omega(text)
    fr = check_frD(omega, D)
    bound = critical_exponent_bound(omega)
    logger.debug("%s: volume exponent %.6f from L_%d", omega, bound.alpha, bound.depth)
    tails = tail_exponents() if _is_first_group(omega) else {}
    return OmegaAnalysis(omega, fr, bound.period, tails, bound.alpha)


def perron_value(matrix: np.ndarray) -> float:
    try:
        return spectral_radius(matrix)
    except PreconditionError:
        return float(max(abs(np.linalg.eigvals(np.asarray(matrix, dtype=float)))))


def matrix_table() -> list[tuple[str, np.ndarray, float]]:
    """M_0, M_1, M_2, M, A and M^2 A with their Perron values."""
    m, a = matrix_M(), matrix_A()
    named = [(f"M{i}", substitution_matrix(i)) for i in range(3)]
    named += [("M", m), ("A", a), ("M2A", m.dot(m).dot(a))]
    return [(name, matrix, perron_value(matrix)) for name, matrix in named]
