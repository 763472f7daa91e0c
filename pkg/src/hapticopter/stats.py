"""Nonparametric k-sample tests used on the trial metrics.

Kruskal-Wallis ranks all observations jointly (mid-ranks on ties, with the
standard tie-correction divisor) and refers H to a chi-square tail; the
Levene test compares absolute deviations from a group center (mean, or median
for the Brown-Forsythe flavor) through an F tail. Both are implemented
directly; see `special` for the tail probabilities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .geometry import InputDomainError
from .special import chi2_sf, f_sf


@dataclass(frozen=True)
class RankTestResult:
    statistic: float
    p_value: float
    dof: int | tuple[int, int]
    degenerate: bool = False


def _validate_groups(groups: Sequence[Sequence[float]], min_size: int) -> list[list[float]]:
    if len(groups) < 2:
        raise InputDomainError(f"need at least 2 groups, got {len(groups)}")
    cleaned = []
    for j, group in enumerate(groups):
        values = [float(v) for v in group]
        if len(values) < min_size:
            raise InputDomainError(f"group {j} has {len(values)} observations, need >= {min_size}")
        if any(not math.isfinite(v) for v in values):
            raise InputDomainError(f"group {j} contains non-finite values")
        cleaned.append(values)
    return cleaned


def _midranks(values: list[float]) -> tuple[list[float], float]:
    """Mid-ranks of `values` and the tie term sum(t^3 - t) over tie groups."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    tie_term = 0.0
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = 0.5 * (i + j) + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        t = j - i + 1
        if t > 1:
            tie_term += t * (t * t - 1)
        i = j + 1
    return ranks, tie_term


def kruskal_wallis(groups: Sequence[Sequence[float]]) -> RankTestResult:
    """Kruskal-Wallis H test of k samples sharing one distribution.

    H = 12/(N(N+1)) * sum R_j^2/n_j - 3(N+1), divided by the tie correction
    1 - sum(t^3 - t)/(N^3 - N); p from the chi-square tail with k-1 dof.
    All observations identical is reported as H = 0, p = 1.
    """
    cleaned = _validate_groups(groups, min_size=1)
    sizes = [len(g) for g in cleaned]
    n_total = sum(sizes)
    if n_total < 3:
        raise InputDomainError(f"need at least 3 observations overall, got {n_total}")
    pooled = [v for g in cleaned for v in g]
    ranks, tie_term = _midranks(pooled)
    dof = len(cleaned) - 1

    correction = 1.0 - tie_term / (n_total**3 - n_total)
    if correction <= 0.0:
        # every observation equal: no evidence of any difference
        return RankTestResult(statistic=0.0, p_value=1.0, dof=dof, degenerate=True)

    h = 0.0
    offset = 0
    for n_j in sizes:
        r_j = sum(ranks[offset:offset + n_j])
        h += r_j * r_j / n_j
        offset += n_j
    h = 12.0 / (n_total * (n_total + 1)) * h - 3.0 * (n_total + 1)
    h = max(h / correction, 0.0)
    return RankTestResult(statistic=h, p_value=chi2_sf(h, dof), dof=dof)


class Center(str, Enum):
    MEAN = "mean"
    MEDIAN = "median"


def _center(values: list[float], center: Center) -> float:
    if center is Center.MEAN:
        return sum(values) / len(values)
    ordered = sorted(values)
    n = len(ordered)
    mid = n // 2
    if n % 2:
        return ordered[mid]
    return 0.5 * (ordered[mid - 1] + ordered[mid])


def levene(groups: Sequence[Sequence[float]], center: Center = Center.MEAN) -> RankTestResult:
    """Levene's W test of variance equality across k samples.

    W = [(N-k)/(k-1)] * [sum n_j (zbar_j - zbar)^2] / [sum sum (z_ij - zbar_j)^2]
    where z_ij = |x_ij - center_j|; p from the F tail with (k-1, N-k) dof.
    Zero within-group spread of the z values in every group is degenerate:
    W = inf (p = 0) when the group means still differ, W = 0 (p = 1) otherwise.
    """
    center = Center(center)
    cleaned = _validate_groups(groups, min_size=2)
    k = len(cleaned)
    n_total = sum(len(g) for g in cleaned)
    dof = (k - 1, n_total - k)

    z_groups = []
    for g in cleaned:
        c = _center(g, center)
        z_groups.append([abs(v - c) for v in g])
    z_means = [sum(z) / len(z) for z in z_groups]
    z_grand = sum(sum(z) for z in z_groups) / n_total

    between = sum(len(z) * (zm - z_grand) ** 2 for z, zm in zip(z_groups, z_means))
    within = sum(sum((v - zm) ** 2 for v in z) for z, zm in zip(z_groups, z_means))

    if within == 0.0:
        if between == 0.0:
            return RankTestResult(statistic=0.0, p_value=1.0, dof=dof, degenerate=True)
        return RankTestResult(statistic=math.inf, p_value=0.0, dof=dof, degenerate=True)

    w = (n_total - k) / (k - 1) * between / within
    return RankTestResult(statistic=w, p_value=f_sf(w, dof[0], dof[1]), dof=dof)
