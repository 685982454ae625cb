"""Data coupling between classes and the stubbing cost of a test order."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Iterable, Optional, Sequence

from .model import ProgramModel

if TYPE_CHECKING:
    from .eord import Eord


@dataclass(frozen=True)
class Weights:
    attribute: float = 1 / 3
    method: float = 1 / 3
    control: float = 1 / 3

    def __post_init__(self):
        parts = (self.attribute, self.method, self.control)
        if any(w < 0 or math.isnan(w) for w in parts):
            raise ValueError(f"weights must be nonnegative: {parts}")
        if not math.isclose(sum(parts), 1.0, rel_tol=0, abs_tol=1e-9):
            raise ValueError(f"weights must sum to 1, got {sum(parts)!r}")

    @classmethod
    def parse(cls, text: str) -> "Weights":
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError("expected three comma-separated weights wa,wm,wt")
        return cls(*parts)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.attribute, self.method, self.control)


@dataclass(frozen=True)
class CouplingRecord:
    src: str
    dst: str
    attributes: int = 0  # distinct attributes of dst used by src
    methods: int = 0  # distinct methods of dst called by src
    control: float = 0.0
    attributes_norm: float = 0.0
    methods_norm: float = 0.0

    @property
    def pair(self) -> tuple[str, str]:
        return (self.src, self.dst)

    def scplx(self, w: Weights = Weights()) -> float:
        return scplx(self, w)


def measure_data_coupling(model: ProgramModel) -> dict[tuple[str, str], CouplingRecord]:
    """Distinct cross-class attributes and methods used, per dependent pair."""
    attrs: dict[tuple[str, str], set[str]] = {}
    methods: dict[tuple[str, str], set[str]] = {}
    for site in model.call_sites():
        if site.caller_class == site.target_class:
            continue
        pair = (site.caller_class, site.target_class)
        bucket = attrs if site.member_kind == "attribute" else methods
        bucket.setdefault(pair, set()).add(site.target_member)
    pairs = sorted(set(attrs) | set(methods))
    return {
        p: CouplingRecord(p[0], p[1], len(attrs.get(p, ())), len(methods.get(p, ())))
        for p in pairs
    }


def normalize(records: Iterable[CouplingRecord]) -> list[CouplingRecord]:
    """Scale attribute and method counts by their own system-wide maxima."""
    records = list(records)
    max_a = max((r.attributes for r in records), default=0)
    max_m = max((r.methods for r in records), default=0)
    return [
        replace(
            r,
            attributes_norm=r.attributes / max_a if max_a else 0.0,
            methods_norm=r.methods / max_m if max_m else 0.0,
        )
        for r in records
    ]


def scplx(rec: CouplingRecord, w: Weights = Weights()) -> float:
    return math.sqrt(
        w.attribute * rec.attributes_norm ** 2 + w.method * rec.methods_norm ** 2 + w.control * rec.control ** 2
    )


@dataclass(frozen=True)
class StubSet:
    order: tuple[str, ...]
    stubs: frozenset[tuple[str, str]]

    def __len__(self) -> int:
        return len(self.stubs)


@dataclass(frozen=True)
class OrderCost:
    ocplx: float
    acplx: float
    mcplx: float
    tcplx: float
    stubs: int

    def to_json(self) -> dict:
        return {"OCplx": self.ocplx, "ACplx": self.acplx, "MCplx": self.mcplx,
                "TCplx": self.tcplx, "Stubs": self.stubs}

    @classmethod
    def from_json(cls, d: dict) -> "OrderCost":
        return cls(d["OCplx"], d["ACplx"], d["MCplx"], d["TCplx"], d["Stubs"])


def _positions(eord: "Eord", order: Sequence[str]) -> dict[str, int]:
    pos = {c: i for i, c in enumerate(order)}
    if len(pos) != len(order) or set(pos) != set(eord.nodes):
        raise ValueError("order is not a permutation of the diagram's classes")
    return pos


def stub_set(eord: "Eord", order: Sequence[str]) -> StubSet:
    order = tuple(getattr(order, "sequence", order))
    pos = _positions(eord, order)
    stubs = frozenset(e.pair for e in eord.edges if pos[e.src] < pos[e.dst])
    return StubSet(order, stubs)


def ocplx(eord: "Eord", order: Sequence[str], w: Optional[Weights] = None) -> OrderCost:
    w = w or eord.weights
    stubs = stub_set(eord, order).stubs
    recs = [eord.edge(i, j).coupling for i, j in sorted(stubs)]
    return OrderCost(
        ocplx=math.fsum(scplx(r, w) for r in recs),
        acplx=float(sum(r.attributes for r in recs)),
        mcplx=float(sum(r.methods for r in recs)),
        tcplx=math.fsum(r.control for r in recs),
        stubs=len(recs),
    )
