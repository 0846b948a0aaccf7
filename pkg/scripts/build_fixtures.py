"""Regenerate the bundled fixture scenarios and their golden verdict table.

Run from the repository root:

    PYTHONPATH=src python scripts/build_fixtures.py

Fixtures are written in canonical form (emit of the parsed scenario is byte
identical), so keep edits here rather than in the .scn files.
"""
from __future__ import annotations

import json
from pathlib import Path

from taskdec.automata import build_alphabet, build_automaton
from taskdec.failure import build_failures
from taskdec.scenario import Scenario, emit, parse_scenario

OUT = Path(__file__).resolve().parent.parent / "src" / "taskdec" / "fixtures"


def chain(name_prefix: str, events: list[str]):
    states = [f"{name_prefix}{i}" for i in range(len(events) + 1)]
    transitions = [
        (states[i], e, states[i + 1]) for i, e in enumerate(events)
    ]
    return build_automaton(states, states[0], None, transitions)


def scenario(task, local_sets, channels=(), failures=None, extra=(), plants=(), controllers=()):
    automata = (("task", task),) + tuple(extra)
    return Scenario(
        automata=automata,
        d=build_alphabet(local_sets, channels),
        task="task",
        failures=build_failures(failures or {}),
        plants=tuple(plants),
        controllers=tuple(controllers),
    )


def ex1_task():
    return build_automaton(
        [f"q{i}" for i in range(9)],
        "q0",
        None,
        [
            ("q0", "e1", "q1"),
            ("q1", "e2", "q2"),
            ("q2", "a", "q3"),
            ("q0", "e2", "q4"),
            ("q4", "e1", "q5"),
            ("q5", "a", "q6"),
            ("q4", "a", "q7"),
            ("q7", "e1", "q8"),
        ],
    )


def ex2_task():
    return build_automaton(
        ["q0", "q1", "q2"],
        "q0",
        None,
        [("q0", "a", "q1"), ("q0", "b", "q2")],
    )


def ex2_orders_task():
    return build_automaton(
        ["q0", "q1", "q2", "q3", "q4"],
        "q0",
        None,
        [
            ("q0", "a", "q1"),
            ("q1", "b", "q2"),
            ("q0", "b", "q3"),
            ("q3", "a", "q4"),
        ],
    )


def ex4_task():
    return build_automaton(
        ["q0", "q1", "q2", "q3", "q4", "q5"],
        "q0",
        None,
        [
            ("q0", "a", "q1"),
            ("q1", "b", "q2"),
            ("q2", "c", "q3"),
            ("q0", "c", "q4"),
            ("q4", "b", "q5"),
        ],
    )


def ex5_task():
    return build_automaton(
        ["q0", "q1", "q2", "q3", "q4"],
        "q0",
        None,
        [
            ("q0", "b", "q1"),
            ("q1", "c", "q2"),
            ("q0", "c", "q3"),
            ("q3", "a", "q4"),
        ],
    )


def ex6_task():
    rows = [
        ("s", ["e1", "a", "e2", "b", "e3"]),
        ("t", ["e1", "e2", "b", "e3"]),
        ("u", ["e1", "b", "e3"]),
        ("v", ["e1", "e3"]),
        ("w", ["e1"]),
    ]
    states = []
    transitions = []
    for prefix, events in rows:
        names = [f"{prefix}{i}" for i in range(len(events) + 1)]
        states.extend(names)
        transitions.extend(
            (names[i], e, names[i + 1]) for i, e in enumerate(events)
        )
    # drop from each row's start into the next row by doing the next pending
    # task step early
    transitions += [
        ("s0", "a", "t0"),
        ("t0", "e2", "u0"),
        ("u0", "b", "v0"),
        ("v0", "e3", "w0"),
    ]
    return build_automaton(states, "s0", None, transitions)


def ex6_plants():
    ap1 = build_automaton(
        ["p0", "p1", "p2", "p3", "p4"],
        "p0",
        None,
        [
            ("p0", "e1", "p1"),
            ("p1", "a", "p2"),
            ("p0", "a", "p3"),
            ("p3", "e1", "p4"),
        ],
    )
    branches = [["b", "e2", "a"], ["e2", "b", "a"], ["a", "e2", "b"], ["b", "a", "e2"]]
    states = ["z0"]
    transitions = []
    for i, events in enumerate(branches):
        names = [f"z{i}{j}" for j in range(1, len(events) + 1)]
        states.extend(names)
        path = ["z0"] + names
        transitions.extend(
            (path[j], e, path[j + 1]) for j, e in enumerate(events)
        )
    ap2 = build_automaton(states, "z0", None, transitions)
    ap3 = build_automaton(
        ["r0", "r1", "r2", "r3", "r4"],
        "r0",
        None,
        [
            ("r0", "e3", "r1"),
            ("r1", "b", "r2"),
            ("r0", "b", "r3"),
            ("r3", "e3", "r4"),
        ],
    )
    return ap1, ap2, ap3


def ex6_controllers():
    ac1 = build_automaton(
        ["c0", "c1", "c2", "c3", "c4"],
        "c0",
        None,
        [
            ("c0", "e1", "c1"),
            ("c1", "a", "c2"),
            ("c0", "a", "c3"),
            ("c3", "e1", "c4"),
        ],
    )
    ac2 = chain("d", ["a", "e2", "b"])
    ac3 = chain("g", ["b", "e3"])
    return ac1, ac2, ac3


def ex7_task():
    return build_automaton(
        ["s0", "s1", "t0", "s2", "s3"],
        "s0",
        None,
        [
            ("s0", "a", "s1"),
            ("s0", "e2", "t0"),
            ("s1", "e1", "s2"),
            ("t0", "e4", "s2"),
            ("s2", "b", "s3"),
        ],
    )


def ex8_task():
    return build_automaton(
        ["q0", "q1", "q2", "q3", "q4", "q5"],
        "q0",
        None,
        [
            ("q0", "e1", "q1"),
            ("q1", "a", "q2"),
            ("q2", "e2", "q3"),
            ("q0", "a", "q4"),
            ("q4", "e2", "q5"),
        ],
    )


def ex9_task():
    return build_automaton(
        ["q0", "q1", "q2", "q3", "q4"],
        "q0",
        None,
        [
            ("q0", "e1", "q1"),
            ("q1", "a", "q2"),
            ("q2", "b", "q3"),
            ("q0", "a", "q4"),
        ],
    )


def main() -> None:
    ex1_sets = {"1": ["e1", "a"], "2": ["e2", "a"], "3": ["a"]}
    ex23_sets = {"1": ["a"], "2": ["b"], "3": ["a", "b"]}
    ex23_channels = [("a", "1", "3"), ("b", "2", "3")]

    fixtures: dict[str, Scenario] = {}
    fixtures["ex1"] = scenario(
        ex1_task(), ex1_sets, [("a", "3", "1"), ("a", "3", "2")], {"1": ["a"]}
    )
    fixtures["ex1_source"] = scenario(
        ex1_task(), ex1_sets, [("a", "3", "1"), ("a", "3", "2")], {"3": ["a"]}
    )
    fixtures["ex1_relay"] = scenario(
        ex1_task(),
        ex1_sets,
        [("a", "3", "1"), ("a", "1", "2"), ("a", "1", "3")],
        {"1": ["a"]},
    )
    fixtures["ex2"] = scenario(ex2_task(), ex23_sets, ex23_channels, {"3": ["a"]})
    fixtures["ex2_orders"] = scenario(
        ex2_orders_task(), ex23_sets, ex23_channels, {"3": ["a"]}
    )
    fixtures["ex3"] = scenario(
        chain("q", ["a", "b"]), ex23_sets, ex23_channels, {"3": ["a"]}
    )
    fixtures["ex4"] = scenario(
        ex4_task(),
        {"1": ["a", "b", "c"], "2": ["b", "c"], "3": ["a", "b"]},
        [("b", "2", "1"), ("c", "2", "1"), ("a", "3", "1"), ("b", "2", "3")],
        {"1": ["b"]},
    )
    fixtures["ex5"] = scenario(
        ex5_task(),
        {"1": ["a", "b", "c"], "2": ["a", "b"], "3": ["b", "c"]},
        [("a", "2", "1"), ("b", "2", "1"), ("c", "3", "1"), ("b", "2", "3")],
        {"1": ["b"]},
    )
    ap1, ap2, ap3 = ex6_plants()
    ac1, ac2, ac3 = ex6_controllers()
    ex6_sets = {"1": ["e1", "a"], "2": ["a", "b", "e2"], "3": ["b", "e3"]}
    ex6_channels = [("a", "2", "1"), ("b", "2", "3")]
    ex6_extra = (
        ("AC1", ac1), ("AC2", ac2), ("AC3", ac3),
        ("AP1", ap1), ("AP2", ap2), ("AP3", ap3),
    )
    ex6_wiring = dict(
        extra=ex6_extra,
        plants=[("1", "AP1"), ("2", "AP2"), ("3", "AP3")],
        controllers=[("1", "AC1"), ("2", "AC2"), ("3", "AC3")],
    )
    fixtures["ex6"] = scenario(
        ex6_task(), ex6_sets, ex6_channels, {"1": ["a"]}, **ex6_wiring
    )
    fixtures["ex6_private"] = scenario(
        ex6_task(), ex6_sets, ex6_channels, {"2": ["e2"]}, **ex6_wiring
    )
    fixtures["ex7"] = scenario(
        ex7_task(), {"1": ["a", "b", "e1"], "2": ["a", "b", "e2", "e4"]}
    )
    fixtures["ex8"] = scenario(ex8_task(), {"1": ["a", "e1"], "2": ["a", "e2"]})
    fixtures["ex9"] = scenario(ex9_task(), {"1": ["a", "b", "e1"], "2": ["a", "b"]})

    golden = {
        "ex1": {
            "kind": "failure",
            "expect": {
                "pre": True,
                "all_passive": True,
                "conditions": {"EF1": True, "EF2": True, "EF3": True, "EF4": True},
                "remains": True,
            },
            "note": "losing the received event is harmless",
        },
        "ex1_source": {
            "kind": "failure",
            "expect": {"pre": True, "all_passive": False, "remains": False},
            "note": "the source of the event cannot lose it",
        },
        "ex1_relay": {
            "kind": "failure",
            "expect": {"pre": True, "all_passive": False, "remains": False},
            "note": "a relay without a backup sender cannot lose the event",
        },
        "ex2": {
            "kind": "failure",
            "expect": {
                "pre": True,
                "all_passive": True,
                "conditions": {"EF1": False},
                "remains": False,
            },
            "note": "after the failure nobody can decide between the two events",
        },
        "ex2_orders": {
            "kind": "failure",
            "expect": {
                "pre": True,
                "all_passive": True,
                "conditions": {"EF1": True, "EF2": True, "EF3": True, "EF4": True},
                "remains": True,
            },
            "note": "both orders are legal, so nobody needs to decide",
        },
        "ex3": {
            "kind": "failure",
            "expect": {
                "pre": True,
                "all_passive": True,
                "conditions": {"EF2": False},
                "remains": False,
            },
            "note": "the failed agent can no longer enforce the order",
        },
        "ex4": {
            "kind": "failure",
            "expect": {
                "pre": True,
                "all_passive": True,
                "conditions": {"EF1": True, "EF2": True, "EF3": False, "EF4": True},
                "remains": False,
                "illegal_contains": ["b", "a c"],
            },
            "note": "local views weave strings the task forbids",
        },
        "ex5": {
            "kind": "failure",
            "expect": {
                "pre": True,
                "all_passive": True,
                "conditions": {"EF1": True, "EF2": True, "EF3": True, "EF4": False},
                "remains": False,
            },
            "note": "hiding the failed event creates branches with different futures",
        },
        "ex6": {
            "kind": "team",
            "expect": {
                "locals": True,
                "team": True,
                "all_passive": True,
                "final": True,
            },
            "note": "locally verified loops survive the passive failure",
        },
        "ex6_private": {
            "kind": "team",
            "expect": {
                "locals": True,
                "team": True,
                "all_passive": False,
                "final": False,
            },
            "note": "a private event cannot fail passively",
        },
        "ex7": {
            "kind": "decomp",
            "expect": {"decomposable": True},
            "note": "decomposable although neither view alone refines the task",
        },
        "ex8": {
            "kind": "decomp",
            "expect": {
                "decomposable": True,
                "conditions": {"DC1": True, "DC2": True, "DC3": True, "DC4": True},
            },
            "note": "benign nondeterminism in one view",
        },
        "ex9": {
            "kind": "decomp",
            "expect": {
                "decomposable": False,
                "conditions": {"DC1": True, "DC2": True, "DC3": True, "DC4": False},
            },
            "note": "language-equal but not bisimilar",
        },
    }

    OUT.mkdir(parents=True, exist_ok=True)
    for name, sc in fixtures.items():
        text = emit(sc)
        assert parse_scenario(text) == sc, f"round trip failed for {name}"
        assert emit(parse_scenario(text)) == text, f"not canonical: {name}"
        (OUT / f"{name}.scn").write_text(text)
    (OUT / "golden.json").write_text(
        json.dumps(golden, indent=2, sort_keys=True) + "\n"
    )
    print(f"wrote {len(fixtures)} fixtures and golden.json to {OUT}")


if __name__ == "__main__":
    main()
