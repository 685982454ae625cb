"""Wilcoxon signed-rank test for paired samples."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

ALPHA = 0.05
EXACT_MAX_N = 20


@dataclass(frozen=True)
class WilcoxonResult:
    n: int  # pairs left after dropping zero differences
    statistic: Optional[float]  # min(W+, W-)
    w_plus: Optional[float]
    w_minus: Optional[float]
    p_value: Optional[float]
    method: str  # exact | normal | none
    reject: Optional[bool]

    @property
    def decision(self) -> str:
        if self.reject is None:
            return "no nonzero differences"
        return "reject" if self.reject else "retain"

    def to_json(self) -> dict:
        return {
            "n": self.n, "W": self.statistic, "W_plus": self.w_plus, "W_minus": self.w_minus,
            "p_value": self.p_value, "method": self.method, "decision": self.decision,
        }


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks with ties sharing the mean of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        r = (i + j + 2) / 2
        for k in range(i, j + 1):
            ranks[order[k]] = r
        i = j + 1
    return ranks


def _exact_lower_tail(doubled: list[int], t2: int) -> float:
    """P(W+ <= t) under random signs; ranks enter doubled so half-ranks stay integral."""
    total = sum(doubled)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled:
        for s in range(total, r - 1, -1):
            counts[s] += counts[s - r]
    hits = sum(counts[: t2 + 1])
    return hits / 2 ** len(doubled)


def wilcoxon_signed_rank(x: Sequence[float], y: Optional[Sequence[float]] = None, alpha: float = ALPHA) -> WilcoxonResult:
    """Two-sided test on differences ``x - y`` (or on ``x`` itself when ``y`` is omitted).

    Exact p-value for up to 20 nonzero differences, normal approximation with
    tie and continuity corrections beyond.  Reject when ``p < alpha``.
    """
    d = list(x) if y is None else [a - b for a, b in zip(x, y, strict=True)]
    if not d:
        raise ValueError("need at least one pair")
    d = [v for v in d if v != 0]
    n = len(d)
    if n == 0:
        return WilcoxonResult(0, None, None, None, None, "none", None)
    ranks = average_ranks([abs(v) for v in d])
    w_plus = math.fsum(r for r, v in zip(ranks, d) if v > 0)
    w_minus = math.fsum(r for r, v in zip(ranks, d) if v < 0)
    stat = min(w_plus, w_minus)
    if n <= EXACT_MAX_N:
        doubled = [round(2 * r) for r in ranks]
        p = min(1.0, 2 * _exact_lower_tail(doubled, round(2 * stat)))
        method = "exact"
    else:
        mean = n * (n + 1) / 4
        ties: dict[float, int] = {}
        for r in ranks:
            ties[r] = ties.get(r, 0) + 1
        var = n * (n + 1) * (2 * n + 1) / 24 - sum(t ** 3 - t for t in ties.values()) / 48
        if var <= 0:
            p = 1.0
        else:
            z = max(0.0, abs(stat - mean) - 0.5) / math.sqrt(var)
            p = min(1.0, math.erfc(z / math.sqrt(2)))
        method = "normal"
    return WilcoxonResult(n, stat, w_plus, w_minus, p, method, p < alpha)
