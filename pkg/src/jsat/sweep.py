"""Strategy trade-space sweep: run a currency x look-ahead grid and derive the frontier.

Each grid point is one independent simulation run; runs may execute in
parallel (process pool) without affecting output, since results are ordered
by (look-ahead, currency) before any aggregation or serialization.
"""

from __future__ import annotations

import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .model import JsatModel
from .scenario import ScenarioConfig
from .sim import SimTrace, count_exchanges, run

SWEPT_EDGE_DEFAULT = "PP->NWS"
DEFAULT_CURRENCIES = tuple(float(t) for t in range(0, 71, 5))
DEFAULT_LADS = (2.5, 4.0, 6.0, 8.0, 10.0, 12.0, 15.0, 17.5, 20.0)


@dataclass(frozen=True)
class SweepGrid:
    """The grid of strategy parameterizations to evaluate."""

    currency_values: tuple[float, ...] = DEFAULT_CURRENCIES
    lad_values: tuple[float, ...] = DEFAULT_LADS
    swept_edge: str = SWEPT_EDGE_DEFAULT

    def check(self) -> None:
        for name, values in (("currency", self.currency_values), ("lad", self.lad_values)):
            if not values:
                raise ValueError(f"{name} values must be nonempty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ValueError(f"{name} values must be strictly increasing")

    @property
    def points(self) -> tuple[tuple[float, float], ...]:
        return tuple((lad, tau) for lad in self.lad_values for tau in self.currency_values)


@dataclass(frozen=True)
class SweepRow:
    """Aggregates of one run at one grid point."""

    lad_m: float
    currency_s: float
    exchanges: int
    unsafe_entries: int
    completion_time_s: float
    distance_m: float
    termination: str


@dataclass(frozen=True)
class FrontierRow:
    """Per look-ahead minimum safe coordination load."""

    lad_m: float
    min_exchanges: int | None
    feasible: bool


@dataclass
class SweepResult:
    grid: SweepGrid
    rows: list[SweepRow] = field(default_factory=list)
    traces: dict[tuple[float, float], SimTrace] = field(default_factory=dict)


def _run_point(args: tuple[JsatModel, ScenarioConfig, float, float, str]) -> tuple[float, float, SimTrace]:
    model, scenario, lad, tau, edge = args
    trace = run(model, scenario.with_lad(lad).with_currency(edge, tau))
    return lad, tau, trace


def run_sweep(
    model: JsatModel,
    scenario: ScenarioConfig,
    grid: SweepGrid | None = None,
    jobs: int = 1,
    keep_traces: bool = False,
) -> SweepResult:
    """Run every grid point and collect per-run aggregates (ordered, deterministic)."""
    grid = grid or SweepGrid()
    grid.check()
    tasks = [(model, scenario, lad, tau, grid.swept_edge) for lad, tau in grid.points]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_point, tasks, chunksize=4))
    else:
        outcomes = [_run_point(t) for t in tasks]

    result = SweepResult(grid=grid)
    by_point = {(lad, tau): trace for lad, tau, trace in outcomes}
    for lad, tau in grid.points:
        trace = by_point[(lad, tau)]
        result.rows.append(
            SweepRow(
                lad_m=lad,
                currency_s=tau,
                exchanges=count_exchanges(trace),
                unsafe_entries=trace.count("unsafe-entry"),
                completion_time_s=trace.final_time,
                distance_m=trace.distance_m,
                termination=trace.termination,
            )
        )
        if keep_traces:
            result.traces[(lad, tau)] = trace
    return result


def frontier(rows: list[SweepRow]) -> list[FrontierRow]:
    """Per look-ahead minimum exchanges over safe, goal-reaching runs."""
    lads = sorted({r.lad_m for r in rows})
    out = []
    for lad in lads:
        qualifying = [
            r.exchanges
            for r in rows
            if r.lad_m == lad and r.unsafe_entries == 0 and r.termination == "goal"
        ]
        if qualifying:
            out.append(FrontierRow(lad_m=lad, min_exchanges=min(qualifying), feasible=True))
        else:
            out.append(FrontierRow(lad_m=lad, min_exchanges=None, feasible=False))
    return out


def sweep_to_csv(rows: list[SweepRow]) -> str:
    out = io.StringIO()
    out.write("lad_m,currency_s,exchanges,unsafe_entries,completion_time_s,distance_m,termination\n")
    for r in rows:
        out.write(
            f"{r.lad_m:g},{r.currency_s:g},{r.exchanges},{r.unsafe_entries},"
            f"{r.completion_time_s:.3f},{r.distance_m:.3f},{r.termination}\n"
        )
    return out.getvalue()


def frontier_to_csv(rows: list[FrontierRow]) -> str:
    out = io.StringIO()
    out.write("lad_m,min_exchanges,feasible\n")
    for r in rows:
        value = "" if r.min_exchanges is None else str(r.min_exchanges)
        out.write(f"{r.lad_m:g},{value},{'true' if r.feasible else 'false'}\n")
    return out.getvalue()
