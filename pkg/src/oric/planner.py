"""Choosing chain length and chain count for a detection threshold.

A pattern of frequency ``p`` lands in the tail of one length-``L`` chain with
probability ``p**L``, so ``M`` chains detect it with probability
``1 - (1 - p**L)**M``. Given the smallest frequent frequency ``p1`` and the
largest infrequent one ``p2``, :func:`plan` finds the shortest ``L`` whose
chain count ``M*(L)`` keeps misses below ``eta1`` while false detections of
``p2`` stay below ``eta2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import Infeasible, PlannerOverflow

L_MAX_DEFAULT = 64
# relative slack for float rounding in m * log(1 - p**L); one chain moves the product by 1/m
_REL_TOL = 1e-15


@dataclass(frozen=True)
class PlannerSpec:
    theta: float
    eta1: float
    eta2: float
    p1: float
    p2: float
    horizon: int = 1

    def __post_init__(self):
        if not 0.0 <= self.p2 < self.theta <= self.p1 <= 1.0:
            raise ValueError("need 0 <= p2 < theta <= p1 <= 1")
        if not (0.0 < self.eta1 < 1.0 and 0.0 < self.eta2 < 1.0):
            raise ValueError("eta1 and eta2 must lie in (0, 1)")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


@dataclass(frozen=True)
class PlannerResult:
    L_star: int
    M_star: int
    detect_prob_frequent: float
    detect_prob_infrequent: float
    multi_update_fp_bound: float
    false_positive_curve: tuple[float, ...] = ()


def _log_miss(p: float, L: int) -> float:
    """log(1 - p**L), stable for tiny p**L."""
    return math.log1p(-(p ** L)) if p < 1.0 else -math.inf


def detection_probability(p: float, L: int, M: float) -> float:
    """Probability that at least one of ``M`` length-``L`` chains keeps the pattern."""
    if not 0.0 <= p <= 1.0 or L < 1 or M < 0:
        raise ValueError("need p in [0, 1], L >= 1, M >= 0")
    if M == 0 or p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    return -math.expm1(M * _log_miss(p, L))


def _chain_count_bound(p1: float, L: int, eta1: float) -> float:
    """Real-valued log(eta1) / log(1 - p1**L)."""
    if p1 == 1.0:
        return 0.0
    pl = p1 ** L
    if pl == 0.0:
        raise PlannerOverflow(f"p1**L underflows at L={L}")
    return math.log(eta1) / _log_miss(p1, L)


def required_chains(p1: float, L: int, eta1: float) -> int:
    """Smallest chain count detecting frequency ``p1`` with probability >= 1 - eta1."""
    if not (0.0 < p1 <= 1.0 and 0.0 < eta1 < 1.0 and L >= 1):
        raise ValueError("need 0 < p1 <= 1, 0 < eta1 < 1, L >= 1")
    if p1 == 1.0:
        return 1
    bound = _chain_count_bound(p1, L, eta1)
    if bound > 2 ** 53:
        raise PlannerOverflow(f"chain count for L={L} exceeds float precision")
    lq, target = _log_miss(p1, L), math.log(eta1)

    def enough(m):
        return m * lq <= target + _REL_TOL * abs(target)

    m = max(1, math.ceil(bound))
    # ceil of a rounded ratio can be off by one at exact boundaries
    while m > 1 and enough(m - 1):
        m -= 1
    while not enough(m):
        m += 1
    return m


def conservative_chains(p1: float, L: int, eta1: float) -> float:
    return _chain_count_bound(p1, L, eta1) + 1.0


def false_positive_probability(p1: float, p2: float, L: int, eta1: float) -> float:
    """Detection probability of frequency ``p2`` with the conservative count."""
    return detection_probability(p2, L, conservative_chains(p1, L, eta1))


def plan(spec: PlannerSpec, L_max: int = L_MAX_DEFAULT) -> PlannerResult:
    if L_max < 1:
        raise ValueError("L_max must be >= 1")
    curve = []
    best = (math.inf, None)
    scanned = 0
    for L in range(1, L_max + 1):
        try:
            M = required_chains(spec.p1, L, spec.eta1)
            fp = false_positive_probability(spec.p1, spec.p2, L, spec.eta1)
        except PlannerOverflow:
            break
        if curve and fp > curve[-1] * (1 + 1e-9) + 1e-15:
            raise AssertionError(f"false-positive curve increased at L={L}: {curve[-1]} -> {fp}")
        curve.append(fp)
        scanned = L
        if fp < best[0]:
            best = (fp, L)
        if fp <= spec.eta2:
            return PlannerResult(
                L_star=L,
                M_star=M,
                detect_prob_frequent=detection_probability(spec.p1, L, M),
                detect_prob_infrequent=fp,
                multi_update_fp_bound=spec.eta2 * spec.horizon,
                false_positive_curve=tuple(curve),
            )
    raise Infeasible(f"no L <= {scanned} meets eta2={spec.eta2}; best {best[0]:.6g} at L={best[1]}",
                     best_probability=best[0], best_length=best[1], curve=curve)
