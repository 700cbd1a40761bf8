"""Line-delimited JSON traces.

One record per step.  Every record carries the per-cell states, so the
synchronization verdict can always be recomputed from the file alone;
per-cell contents are written on every step (``full``) or every k-th step
(``sampled:k``), and always on the first and last records.  The last
record of a finished run also carries the verdict.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional

from .engine import SystemConfiguration
from .fssp import SyncReport, check_synchronization
from .symbols import parse_symbol


class TraceFormatError(ValueError):
    pass


def parse_granularity(text: str) -> int:
    """``full`` -> 1, ``sampled:k`` -> k (k >= 1)."""
    if text == "full":
        return 1
    if text.startswith("sampled:"):
        try:
            k = int(text.split(":", 1)[1])
        except ValueError:
            k = 0
        if k >= 1:
            return k
    raise ValueError(f"granularity must be 'full' or 'sampled:<k>' with k >= 1, got {text!r}")


@dataclass
class TraceRecord:
    step: int
    states: dict[int, str]
    contents: Optional[dict[int, list]] = None
    halted: bool = False
    sync: Optional[dict] = None

    @classmethod
    def from_config(cls, config: SystemConfiguration, with_contents: bool = True) -> "TraceRecord":
        contents = None
        if with_contents:
            contents = {cid: [[str(s), n] for s, n in c.contents.sorted_items()]
                        for cid, c in config.cells.items()}
        return cls(config.step_index, config.states(), contents)

    def to_json(self) -> str:
        out = {"step": self.step, "states": {str(k): v for k, v in self.states.items()}, "halted": self.halted}
        if self.contents is not None:
            out["contents"] = {str(k): v for k, v in self.contents.items()}
        if self.sync is not None:
            out["sync"] = self.sync
        return json.dumps(out, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "TraceRecord":
        try:
            raw = json.loads(line)
            states = {int(k): str(v) for k, v in raw["states"].items()}
            contents = raw.get("contents")
            if contents is not None:
                contents = {int(k): [[str(s), int(n)] for s, n in v] for k, v in contents.items()}
                for items in contents.values():
                    for s, _ in items:
                        parse_symbol(s)
            return cls(int(raw["step"]), states, contents, bool(raw.get("halted", False)), raw.get("sync"))
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise TraceFormatError(f"bad trace record: {exc}") from exc


@dataclass
class TraceWriter:
    stream: IO[str]
    every: int = 1
    # the newest configuration is held back until we know whether it is last
    _held: Optional[SystemConfiguration] = field(default=None, repr=False)

    def write(self, config: SystemConfiguration) -> None:
        if self._held is not None:
            held = self._held
            self._emit(TraceRecord.from_config(held, held.step_index % self.every == 0))
        self._held = config

    def close(self, halted: bool, report: SyncReport | None = None) -> None:
        if self._held is None:
            return
        last = TraceRecord.from_config(self._held)
        last.halted = halted
        if report is not None:
            last.sync = sync_dict(report)
        self._emit(last)
        self._held = None

    def _emit(self, rec: TraceRecord) -> None:
        self.stream.write(rec.to_json() + "\n")


def sync_dict(report: SyncReport) -> dict:
    return {
        "fired": report.fired,
        "firing_step": report.firing_step,
        "simultaneous": report.simultaneous,
        "first_time": report.first_time,
        "reason": report.reason,
    }


def read_records(lines: Iterable[str]) -> Iterator[TraceRecord]:
    prev = None
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        rec = TraceRecord.from_json(line)
        if prev is not None and rec.step <= prev:
            raise TraceFormatError(f"line {n}: step {rec.step} does not increase")
        prev = rec.step
        yield rec


def read_trace(path: str | Path) -> list[TraceRecord]:
    """Read a trace file; a cut-off final line (no newline) is ignored."""
    text = Path(path).read_text()
    lines = text.split("\n")
    if lines and lines[-1].strip():
        try:
            TraceRecord.from_json(lines[-1])
        except TraceFormatError:
            lines.pop()
    return list(read_records(lines))


def check_records(records: list[TraceRecord]) -> SyncReport:
    """Recompute the synchronization verdict from trace records alone."""
    if not records:
        raise TraceFormatError("empty trace")
    for i, rec in enumerate(records):
        if rec.step != records[0].step + i:
            raise TraceFormatError(f"missing step before {rec.step}")
    if records[0].step != 0:
        raise TraceFormatError("trace does not start at step 0")
    return check_synchronization([r.states for r in records], halted=records[-1].halted)
