"""Cycle accounting for the streaming extractor/classifier dataflow.

Per-unit budgets (108 cycles per cell, 47 per block normalization) are
multiplied out over the window geometry. How the stages overlap is not known,
so two compositions are offered; the result is a bound to compare against,
not a cycle-exact twin.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .descriptor import DEFAULT_GEOMETRY, HogGeometry

PUBLISHED_CLOCK_HZ = 50_000_000
PUBLISHED_EXTRACT_S = 0.411e-3
PUBLISHED_DETECT_S = 0.757e-3
# software baselines measured in Matlab
PUBLISHED_SOFTWARE_EXTRACT_S = 16e-3
PUBLISHED_SOFTWARE_DETECT_S = 41e-3


class OverlapMode(str, Enum):
    SEQUENTIAL = "sequential"
    CELL_NORM_OVERLAPPED = "cell_norm_overlapped"


@dataclass(frozen=True)
class CyclePlan:
    cycles_per_cell: int = 108
    cycles_per_block_norm: int = 47
    cycles_per_mac: int = 1
    svm_pipeline_fill: int = 0
    clock_hz: float = PUBLISHED_CLOCK_HZ
    overlap_mode: OverlapMode = OverlapMode.SEQUENTIAL

    def __post_init__(self):
        for name in ("cycles_per_cell", "cycles_per_block_norm", "cycles_per_mac", "svm_pipeline_fill"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value}")
        if not self.clock_hz > 0:
            raise ValueError(f"clock_hz must be > 0, got {self.clock_hz}")
        object.__setattr__(self, "overlap_mode", OverlapMode(self.overlap_mode))


@dataclass(frozen=True)
class CycleReport:
    cell_stage_cycles: int
    norm_stage_cycles: int
    svm_stage_cycles: int
    total_extract_cycles: int
    total_detect_cycles: int
    clock_hz: float

    @property
    def extract_time_s(self) -> float:
        return self.total_extract_cycles / self.clock_hz

    @property
    def detect_time_s(self) -> float:
        return self.total_detect_cycles / self.clock_hz

    @property
    def svm_time_s(self) -> float:
        return self.svm_stage_cycles / self.clock_hz


def estimate(geom: HogGeometry = DEFAULT_GEOMETRY, plan: CyclePlan = CyclePlan()) -> CycleReport:
    cells = geom.cells_x * geom.cells_y
    blocks = geom.blocks_x * geom.blocks_y
    cell_stage = cells * plan.cycles_per_cell
    norm_stage = blocks * plan.cycles_per_block_norm
    svm_stage = geom.descriptor_len * plan.cycles_per_mac + plan.svm_pipeline_fill

    if plan.overlap_mode is OverlapMode.SEQUENTIAL:
        extract = cell_stage + norm_stage
    else:
        # the last block can only normalize once the final cell is out
        drain = min(plan.cycles_per_block_norm, cell_stage, norm_stage)
        extract = max(cell_stage, norm_stage) + drain

    return CycleReport(
        cell_stage_cycles=cell_stage,
        norm_stage_cycles=norm_stage,
        svm_stage_cycles=svm_stage,
        total_extract_cycles=extract,
        total_detect_cycles=extract + svm_stage,
        clock_hz=plan.clock_hz,
    )


@dataclass(frozen=True)
class TimingComparison:
    name: str
    published_s: float
    modeled_s: float

    @property
    def rel_diff(self) -> float:
        """Signed (modeled - published) / published."""
        return (self.modeled_s - self.published_s) / self.published_s


def compare_to_paper(report: CycleReport) -> list[TimingComparison]:
    """Line modeled times up against the published 50 MHz timings.

    The published detect time is read two ways: including extraction, and as
    classification alone (detect minus extract).
    """
    return [
        TimingComparison("extract", PUBLISHED_EXTRACT_S, report.extract_time_s),
        TimingComparison("detect", PUBLISHED_DETECT_S, report.detect_time_s),
        TimingComparison("classify_only", PUBLISHED_DETECT_S - PUBLISHED_EXTRACT_S, report.svm_time_s),
    ]


def format_key_values(report: CycleReport, comparisons: list[TimingComparison] | None = None) -> str:
    lines = [
        f"cell_stage_cycles={report.cell_stage_cycles}",
        f"norm_stage_cycles={report.norm_stage_cycles}",
        f"svm_stage_cycles={report.svm_stage_cycles}",
        f"total_extract_cycles={report.total_extract_cycles}",
        f"total_detect_cycles={report.total_detect_cycles}",
        f"clock_hz={report.clock_hz:g}",
        f"extract_time_s={report.extract_time_s!r}",
        f"detect_time_s={report.detect_time_s!r}",
    ]
    for c in comparisons or ():
        lines.append(f"published_{c.name}_s={c.published_s!r}")
        lines.append(f"{c.name}_rel_diff={c.rel_diff!r}")
    return "\n".join(lines)


def format_report_table(report: CycleReport, comparisons: list[TimingComparison] | None = None) -> str:
    rows = [
        ("cell stage", f"{report.cell_stage_cycles:,}"),
        ("norm stage", f"{report.norm_stage_cycles:,}"),
        ("svm stage", f"{report.svm_stage_cycles:,}"),
        ("extract total", f"{report.total_extract_cycles:,}"),
        ("detect total", f"{report.total_detect_cycles:,}"),
    ]
    out = [f"{'stage':<16}{'cycles':>12}"]
    out += [f"{name:<16}{value:>12}" for name, value in rows]
    out.append("")
    out.append(f"at {report.clock_hz / 1e6:g} MHz: extract {report.extract_time_s * 1e3:.3f} ms, detect {report.detect_time_s * 1e3:.3f} ms")
    if comparisons:
        out.append("")
        out.append(f"{'timing':<16}{'ref ms':>10}{'model ms':>10}{'diff':>10}")
        for c in comparisons:
            out.append(f"{c.name:<16}{c.published_s * 1e3:>10.3f}{c.modeled_s * 1e3:>10.3f}{c.rel_diff * 100:>9.2f}%")
    return "\n".join(out)
