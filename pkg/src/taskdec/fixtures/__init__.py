"""Bundled example scenarios and the golden verdict table they must match."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from ..decomposability import decomposability_report
from ..failure import remains_decomposable
from ..scenario import Scenario, parse_scenario
from ..topdown import verify_team_under_failure


def _root():
    return resources.files(__package__)


def fixture_names() -> list[str]:
    return sorted(
        path.name[: -len(".scn")]
        for path in _root().iterdir()
        if path.name.endswith(".scn")
    )


def fixture_text(name: str) -> str:
    return (_root() / f"{name}.scn").read_text()


def load(name: str) -> Scenario:
    return parse_scenario(fixture_text(name))


def golden() -> dict:
    return json.loads((_root() / "golden.json").read_text())


@dataclass(frozen=True)
class MatrixRow:
    name: str
    passed: bool
    detail: str


def _mismatches(pairs) -> list[str]:
    return [
        f"{key}: expected {expected}, got {actual}"
        for key, expected, actual in pairs
        if expected != actual
    ]


def check_fixture(name: str, entry: dict) -> MatrixRow:
    sc = load(name)
    expect = entry["expect"]
    kind = entry["kind"]
    problems: list[str] = []
    if kind == "decomp":
        report = decomposability_report(sc.task_automaton, sc.d)
        pairs = [("decomposable", expect["decomposable"], report.oracle.holds)]
        for cond, wanted in expect.get("conditions", {}).items():
            actual = next(c.holds for c in report.conditions if c.condition == cond)
            pairs.append((cond, wanted, actual))
        pairs.append(("consistent", True, report.consistent))
        problems = _mismatches(pairs)
    elif kind == "failure":
        report = remains_decomposable(sc.task_automaton, sc.d, sc.failures)
        pairs = [
            ("pre", expect["pre"], report.pre.holds),
            ("all_passive", expect["all_passive"], report.passivity.all_passive),
            ("remains", expect["remains"], report.remains),
            ("consistent", True, report.consistent),
        ]
        reported = {c.condition: c.holds for c in report.conditions}
        for cond, wanted in expect.get("conditions", {}).items():
            pairs.append((cond, wanted, reported.get(cond)))
        problems = _mismatches(pairs)
        if "illegal_contains" in expect:
            ef3 = next(c for c in report.conditions if c.condition == "EF3")
            seen = {w.string for w in ef3.witnesses}
            for joined in expect["illegal_contains"]:
                if tuple(joined.split()) not in seen:
                    problems.append(f"illegal string {joined!r} not reported")
    elif kind == "team":
        report = verify_team_under_failure(sc.team_design())
        pairs = [
            ("locals", expect["locals"], all(v.holds for _, v in report.locals_)),
            ("team", expect["team"], report.team.holds),
            ("all_passive", expect["all_passive"], report.passivity.all_passive),
            ("final", expect["final"], report.holds),
            ("consistent", True, report.consistent),
        ]
        problems = _mismatches(pairs)
    else:
        problems = [f"unknown kind {kind!r}"]
    return MatrixRow(name, not problems, "; ".join(problems))


def run_matrix() -> list[MatrixRow]:
    """Evaluate every fixture against the golden table."""
    table = golden()
    return [check_fixture(name, table[name]) for name in sorted(table)]
