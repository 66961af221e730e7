"""The Model container and the result records shared by the analysis routes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Mapping

from .algebra import DFT_NODES, DRBD_NODES, Expr, RWsp, Wsp, event_ids, walk
from .distributions import DistributionSpec, SpareSpec
from .errors import ModelReferenceError, StructureError

Kind = Literal["dft", "drbd"]


@dataclass(frozen=True)
class Model:
    name: str
    kind: Kind
    events: Mapping[str, DistributionSpec | SpareSpec]
    top: Expr
    # source (line, column) of each declared event and gate name, when parsed from text
    positions: Mapping[str, tuple[int, int]] = field(default_factory=dict, compare=False)

    def spare_mains(self) -> dict[str, Expr]:
        """Main subexpression guarded by each spare."""
        return {n.spare: n.main for n in walk(self.top) if isinstance(n, (Wsp, RWsp))}

    def ordinary_ids(self) -> list[str]:
        return [k for k, v in self.events.items() if not isinstance(v, SpareSpec)]

    def spare_ids(self) -> list[str]:
        return [k for k, v in self.events.items() if isinstance(v, SpareSpec)]

    def check(self) -> None:
        """Raise on references that no evaluation could satisfy."""
        allowed = DFT_NODES if self.kind == "dft" else DRBD_NODES
        for node in walk(self.top):
            if not isinstance(node, allowed):
                raise StructureError(f"{type(node).__name__} node in a {self.kind} model")
        for eid in event_ids(self.top):
            if eid not in self.events:
                raise ModelReferenceError(f"undeclared event {eid!r}")
        for node in walk(self.top):
            if isinstance(node, (Wsp, RWsp)) and not isinstance(self.events[node.spare], SpareSpec):
                raise StructureError(f"{node.spare!r} is used as a spare but declared basic")
            if hasattr(node, "id") and isinstance(self.events[node.id], SpareSpec):
                raise StructureError(f"spare {node.id!r} used outside a spare gate")
        spares = [n.spare for n in walk(self.top) if isinstance(n, (Wsp, RWsp))]
        if len(spares) != len(set(spares)):
            raise StructureError("a spare is shared by more than one spare gate")

    def with_top(self, top: Expr, kind: Kind) -> "Model":
        return Model(self.name, kind, self.events, top, self.positions)


@dataclass(frozen=True)
class AnalysisResult:
    """Analytic probability at one mission time.

    ``method`` fixes the quantity: ``dft-pie`` is an unreliability,
    ``drbd-structural`` a reliability.
    """

    model: str
    kind: Kind
    method: str
    time: float
    value: float
    error_bound: float
    term_count: int | None = None


def ci95(p: float, std_err: float) -> tuple[float, float]:
    return (max(0.0, p - 1.96 * std_err), min(1.0, p + 1.96 * std_err))


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo frequency estimate with a normal-approximation 95% interval."""

    model: str
    kind: Kind
    method: str
    time: float
    p_hat: float
    std_err: float
    n: int
    seed: int
    ci95: tuple[float, float] = field(default=(0.0, 1.0))

    @property
    def value(self) -> float:
        return self.p_hat
