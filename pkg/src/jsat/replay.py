"""Independent trace replay: verifies currency and exchange accounting.

This module re-derives, from a finished trace plus the model alone, the
resource stamping that the engine must have performed, then checks two
properties event by event:

* currency: at every function execution, each consumed finite-currency
  resource was within its required age, unless a cycle-cut warning at the
  same timestamp excused the resolution;
* exchanges: the engine's exchange events are exactly the consumptions of
  resources last stamped by a different agent.

It deliberately shares no code with the engine's resolution logic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import JsatModel
from .sim import INITIALIZED_RESOURCES, SimTrace


@dataclass(frozen=True, slots=True)
class ReplayIssue:
    time: float
    kind: str  # "currency-violation" | "exchange-mismatch"
    detail: str


@dataclass
class ReplayReport:
    issues: list[ReplayIssue] = field(default_factory=list)
    executions: int = 0
    expected_exchanges: int = 0
    recorded_exchanges: int = 0

    @property
    def ok(self) -> bool:
        return not self.issues


def replay_check(model: JsatModel, trace: SimTrace) -> ReplayReport:
    """Scan a trace against the model's currency and exchange semantics."""
    report = ReplayReport()
    last_updated: dict[str, float] = {rid: 0.0 for rid in INITIALIZED_RESOURCES if rid in model.resources_by_id}
    last_writer: dict[str, str] = {}
    cut_functions_at: dict[float, set[str]] = {}
    expected: list[tuple[float, str, str]] = []  # (time, function, resource)
    recorded: list[tuple[float, str, str]] = []

    for event in trace.events:
        if event.kind == "cycle-cut-warning":
            cut_functions_at.setdefault(event.time, set()).add(event.function)

    for event in trace.events:
        if event.kind == "exchange":
            resource = ""
            for part in event.detail.split(";"):
                if part.startswith("resource="):
                    resource = part.split("=", 1)[1]
            recorded.append((event.time, event.function, resource))
            continue
        if event.kind != "function-exec":
            continue
        report.executions += 1
        now = event.time
        for edge in model.inputs_of(event.function):
            stamp = last_updated.get(edge.src)
            if math.isfinite(edge.required_currency_s):
                age = math.inf if stamp is None else now - stamp
                producer = model.default_producer.get(edge.src, "")
                excused = producer in cut_functions_at.get(now, ())
                if age > edge.required_currency_s + 1e-9 and not excused:
                    report.issues.append(
                        ReplayIssue(
                            time=now,
                            kind="currency-violation",
                            detail=(
                                f"{event.function} consumed {edge.src} aged {age:.3f}s "
                                f"(limit {edge.required_currency_s:.3f}s)"
                            ),
                        )
                    )
            writer = last_writer.get(edge.src)
            if writer is not None and writer != event.agent:
                expected.append((now, event.function, edge.src))
        for edge in model.outputs_of(event.function):
            last_updated[edge.dst] = now
            last_writer[edge.dst] = event.agent

    report.expected_exchanges = len(expected)
    report.recorded_exchanges = len(recorded)
    if sorted(expected) != sorted(recorded):
        missing = sorted(set(expected) - set(recorded))[:3]
        extra = sorted(set(recorded) - set(expected))[:3]
        report.issues.append(
            ReplayIssue(
                time=-1.0,
                kind="exchange-mismatch",
                detail=(
                    f"expected {len(expected)} exchanges, trace records {len(recorded)}"
                    + (f"; missing e.g. {missing}" if missing else "")
                    + (f"; extra e.g. {extra}" if extra else "")
                ),
            )
        )
    return report
