"""Run reports holding per-strategy costs and timings, plus paired significance tests."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .coupling import OrderCost
from .stats import wilcoxon_signed_rank


@dataclass
class StrategyRun:
    strategy: str
    order: tuple[str, ...]
    cost: OrderCost
    runtime: Optional[float] = None  # seconds, wall clock
    metadata: dict = field(default_factory=dict)

    def to_json(self, timing: bool = True) -> dict:
        d = {"order": list(self.order), "cost": self.cost.to_json(), "metadata": self.metadata}
        if timing:
            d["runtime"] = self.runtime
        return d

    @classmethod
    def from_json(cls, strategy: str, d: dict) -> "StrategyRun":
        return cls(strategy, tuple(d["order"]), OrderCost.from_json(d["cost"]), d.get("runtime"), d.get("metadata", {}))


def mean_cost(costs: list[OrderCost]) -> OrderCost:
    n = len(costs)
    return OrderCost(
        math.fsum(c.ocplx for c in costs) / n,
        math.fsum(c.acplx for c in costs) / n,
        math.fsum(c.mcplx for c in costs) / n,
        math.fsum(c.tcplx for c in costs) / n,
        sum(c.stubs for c in costs) / n,
    )


@dataclass
class RunReport:
    command: str
    inputs: list[str]
    settings: dict
    runs: dict[str, list[StrategyRun]]
    rt_base: Optional[str] = None
    timing: bool = True
    timestamp: Optional[str] = None
    wilcoxon: list[dict] = field(default_factory=list)

    def mean_cost(self, strategy: str) -> OrderCost:
        return mean_cost([r.cost for r in self.runs[strategy]])

    def mean_runtime(self, strategy: str) -> Optional[float]:
        times = [r.runtime for r in self.runs[strategy]]
        if not self.timing or any(t is None for t in times):
            return None
        return math.fsum(times) / len(times)

    def rt(self, strategy: str) -> Optional[float]:
        """Mean runtime relative to the base strategy; the base itself is 1."""
        if self.rt_base is None or self.rt_base not in self.runs or not self.timing:
            return None
        if strategy == self.rt_base:
            return 1.0
        base = self.mean_runtime(self.rt_base)
        mine = self.mean_runtime(strategy)
        if base is None or mine is None or base == 0:
            return None
        return mine / base

    def compute_wilcoxon(self) -> None:
        self.wilcoxon = []
        metrics = ["ocplx"] + (["runtime"] if self.timing else [])
        for a, b in combinations(self.runs, 2):
            for metric in metrics:
                xs = [_metric(r, metric) for r in self.runs[a]]
                ys = [_metric(r, metric) for r in self.runs[b]]
                if len(xs) != len(ys):
                    continue
                res = wilcoxon_signed_rank(xs, ys)
                self.wilcoxon.append({"a": a, "b": b, "metric": metric, **res.to_json()})

    def to_json(self) -> dict:
        d: dict = {"command": self.command, "inputs": self.inputs, "settings": self.settings}
        if self.timestamp is not None:
            d["timestamp"] = self.timestamp
        if self.rt_base is not None:
            d["rt_base"] = self.rt_base
        strategies = {}
        for name, runs in self.runs.items():
            s: dict = {"mean": self.mean_cost(name).to_json()}
            if self.timing:
                s["mean_runtime"] = self.mean_runtime(name)
                s["RT"] = self.rt(name)
            s["runs"] = [r.to_json(self.timing) for r in runs]
            strategies[name] = s
        d["strategies"] = strategies
        if self.wilcoxon:
            d["wilcoxon"] = self.wilcoxon
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, d: dict) -> "RunReport":
        runs = {
            name: [StrategyRun.from_json(name, r) for r in s["runs"]]
            for name, s in d["strategies"].items()
        }
        timing = any("mean_runtime" in s for s in d["strategies"].values())
        return cls(
            d["command"], d["inputs"], d["settings"], runs, d.get("rt_base"), timing,
            d.get("timestamp"), d.get("wilcoxon", []),
        )

    @classmethod
    def loads(cls, text: str) -> "RunReport":
        return cls.from_json(json.loads(text))

    def table(self) -> str:
        """Aligned text table, one row per strategy."""
        head = ["Strategy", "Order", "OCplx", "ACplx", "MCplx", "TCplx", "Stubs"]
        if self.timing and self.rt_base is not None:
            head.append("RT")
        rows = [head]
        for name, runs in self.runs.items():
            c = self.mean_cost(name)
            orders = {r.order for r in runs}
            order = _short(runs[0].order) if len(orders) == 1 else f"({len(orders)} distinct)"
            row = [name, order, f"{c.ocplx:.4f}", f"{c.acplx:.2f}", f"{c.mcplx:.2f}", f"{c.tcplx:.4f}", f"{c.stubs:g}"]
            if len(head) == 8:
                rt = self.rt(name)
                row.append("-" if rt is None else f"{rt:.3f}")
            rows.append(row)
        widths = [max(len(r[k]) for r in rows) for k in range(len(head))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
        for t in self.wilcoxon:
            p = "-" if t["p_value"] is None else f"{t['p_value']:.4g}"
            lines.append(f"wilcoxon {t['a']} vs {t['b']} [{t['metric']}]: p={p} ({t['decision']})")
        return "\n".join(lines) + "\n"


def _short(order: tuple[str, ...], keep: int = 6) -> str:
    if len(order) <= keep:
        return ",".join(order)
    return ",".join(order[:keep]) + f",... ({len(order)} classes)"


def _metric(run: StrategyRun, metric: str) -> float:
    return run.cost.ocplx if metric == "ocplx" else run.runtime
