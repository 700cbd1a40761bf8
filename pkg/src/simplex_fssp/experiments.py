"""The four published experiment families and their expected results."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

from .engine import run
from .fssp import build_fssp_program, check_synchronization, initial_configuration
from .topology import Digraph, family, metrics

# family -> {N: (e_g, D, steps)}
EXPECTED: dict[str, dict[int, tuple[int, int, int]]] = {
    "ring": {n: (n - 1, n - 1, s) for n, s in zip(
        range(2, 16), (18, 29, 42, 57, 74, 93, 114, 137, 162, 189, 218, 249, 282, 317))},
    "rings2": {n: (n - 1, n - 1, s) for n, s in zip(
        range(2, 21, 2), (18, 40, 62, 90, 122, 158, 198, 242, 290, 342))},
    "rings3": {5: (4, 4, 57), 10: (5, 5, 67), 15: (6, 6, 78), 20: (7, 7, 90), 25: (8, 8, 101)},
    "increasing": {2: (1, 1, 18), 5: (3, 3, 40), 9: (5, 5, 63), 14: (7, 7, 90),
                   20: (9, 9, 121), 27: (11, 11, 156)},
}

TITLES = {
    "ring": "Ring networks",
    "rings2": "Ring networks of size 2 rings",
    "rings3": "Ring networks of size 3 rings",
    "increasing": "Ring networks of increasing size rings",
}


def default_max_steps(n: int) -> int:
    return 10 * n * n


@dataclass(frozen=True)
class RowResult:
    family: str
    n: int
    eccentricity: int
    diameter: int
    steps: Optional[int]
    expected: tuple[int, int, int]

    @property
    def ok(self) -> bool:
        return (self.eccentricity, self.diameter, self.steps) == self.expected

    def as_dict(self) -> dict:
        out = asdict(self)
        out["expected"] = dict(zip(("eccentricity", "diameter", "steps"), self.expected))
        out["ok"] = self.ok
        return out


def firing_step(d: Digraph, seed: int | None = None, max_steps: int | None = None) -> Optional[int]:
    """Simulate the synchronization program; None if it did not fire."""
    max_steps = max_steps or default_max_steps(len(d))
    trace = run(initial_configuration(d), build_fssp_program(), d, max_steps, seed=seed, every=0)
    report = check_synchronization(trace)
    return report.firing_step if report.fired else None


def run_row(name: str, n: int, seed: int | None = None) -> RowResult:
    d = family(name, n)
    m = metrics(d)
    return RowResult(name, n, m.eccentricity, m.diameter, firing_step(d, seed), EXPECTED[name][n])


def all_rows() -> list[tuple[str, int]]:
    return [(name, n) for name, rows in EXPECTED.items() for n in rows]
