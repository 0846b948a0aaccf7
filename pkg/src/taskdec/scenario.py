"""A small text format for scenarios: automata, agents, channels, failures.

The grammar is line oriented.  `#` starts a comment, blank lines separate
nothing in particular, and names are any whitespace-free text without `#`
or `:`.  The label `eps` marks a hidden move.  See the README for the full
grammar; `emit` writes the canonical form, and parsing what it wrote gives
back an equal scenario.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .automata import (
    EPSILON,
    Automaton,
    AutomatonError,
    DistributedAlphabet,
)
from .failure import FailureSpec
from .topdown import TeamDesign

_AUTOMATON_OPEN = re.compile(r"^automaton\s+(\S+)\s*\{$")
_SECTION_OPEN = re.compile(r"^(agents|channels|failures)\s*\{$")
_NAME_OK = re.compile(r"^[^\s#:]+$")


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Scenario:
    """Named automata plus the distributed structure that interprets them."""

    automata: tuple[tuple[str, Automaton], ...]
    d: DistributedAlphabet
    task: str
    failures: FailureSpec = FailureSpec()
    plants: tuple[tuple[str, str], ...] = ()
    controllers: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "automata", tuple(tuple(x) for x in self.automata))
        object.__setattr__(self, "plants", tuple(sorted(tuple(x) for x in self.plants)))
        object.__setattr__(
            self, "controllers", tuple(sorted(tuple(x) for x in self.controllers))
        )

    def automaton(self, name: str) -> Automaton:
        for n, a in self.automata:
            if n == name:
                return a
        raise AutomatonError(f"no automaton named {name!r}")

    @property
    def task_automaton(self) -> Automaton:
        return self.automaton(self.task)

    def team_design(self) -> TeamDesign:
        if not self.plants:
            raise AutomatonError("this scenario declares no plants or controllers")
        return TeamDesign(
            task=self.task_automaton,
            d=self.d,
            plants=tuple((a, self.automaton(n)) for a, n in self.plants),
            controllers=tuple((a, self.automaton(n)) for a, n in self.controllers),
            failures=self.failures,
        )


def _col_of(raw: str, token: str) -> int:
    at = raw.find(token)
    return at + 1 if at >= 0 else 1


def _check_name(token: str, raw: str, lineno: int, what: str) -> str:
    if not _NAME_OK.match(token):
        raise ScenarioError(f"bad {what} name {token!r}", lineno, _col_of(raw, token))
    return token


def parse_scenario(text: str) -> Scenario:
    """Parse the scenario format; errors carry line and column positions."""
    automata: list[tuple[str, Automaton]] = []
    agent_sets: dict[str, list[str]] = {}
    agents_line = 0
    channels: list[tuple[str, str, str, int, str]] = []
    failures: dict[str, set[str]] = {}
    task_name: str | None = None
    task_line = 0
    plants: list[tuple[str, str]] = []
    controllers: list[tuple[str, str]] = []

    lines = text.splitlines()
    i = 0

    def strip(raw: str) -> str:
        return raw.split("#", 1)[0].strip()

    while i < len(lines):
        lineno = i + 1
        raw = lines[i]
        line = strip(raw)
        i += 1
        if not line:
            continue
        m = _AUTOMATON_OPEN.match(line)
        if m:
            name = _check_name(m.group(1), raw, lineno, "automaton")
            if any(n == name for n, _ in automata):
                raise ScenarioError(f"duplicate automaton {name!r}", lineno)
            i, automaton = _parse_automaton_body(lines, i, strip)
            automata.append((name, automaton))
            continue
        m = _SECTION_OPEN.match(line)
        if m:
            section = m.group(1)
            if section == "agents" and agent_sets:
                raise ScenarioError("duplicate agents section", lineno)
            if section == "agents":
                agents_line = lineno
            i = _parse_section(
                lines, i, strip, section, agent_sets, channels, failures
            )
            continue
        if line.startswith("task:"):
            if task_name is not None:
                raise ScenarioError("duplicate task line", lineno)
            task_name = _check_name(line[5:].strip(), raw, lineno, "task")
            task_line = lineno
            continue
        for keyword, into in (("plant", plants), ("controller", controllers)):
            if line.startswith(keyword + " "):
                rest = line[len(keyword) + 1 :]
                if ":" not in rest:
                    raise ScenarioError(f"expected '{keyword} AGENT: NAME'", lineno)
                agent, name = (part.strip() for part in rest.split(":", 1))
                _check_name(name, raw, lineno, keyword)
                if any(a == agent for a, _ in into):
                    raise ScenarioError(f"duplicate {keyword} for agent {agent!r}", lineno)
                into.append((agent, name))
                break
        else:
            raise ScenarioError(f"unrecognized line {line!r}", lineno)

    if not automata:
        raise ScenarioError("no automaton blocks", len(lines) or 1)
    if not agent_sets:
        raise ScenarioError("no agents section", len(lines) or 1)

    if task_name is None:
        names = [n for n, _ in automata]
        if len(names) == 1:
            task_name = names[0]
        elif "task" in names:
            task_name = "task"
        else:
            raise ScenarioError(
                "several automata and no task line", len(lines) or 1
            )
        task_line = len(lines) or 1
    if all(n != task_name for n, _ in automata):
        raise ScenarioError(f"task automaton {task_name!r} not defined", task_line)

    agent_names = list(agent_sets)
    for event, sender, receiver, lineno, raw in channels:
        for endpoint in (sender, receiver):
            if endpoint not in agent_sets:
                raise ScenarioError(
                    f"channel endpoint {endpoint!r} is not an agent",
                    lineno,
                    _col_of(raw, endpoint),
                )
        for endpoint in (sender, receiver):
            if event not in agent_sets[endpoint]:
                raise ScenarioError(
                    f"channel event {event!r} is not in agent {endpoint!r}'s set",
                    lineno,
                    _col_of(raw, event),
                )
        if sender == receiver:
            raise ScenarioError("channel loops on one agent", lineno)
    try:
        d = DistributedAlphabet(
            tuple(agent_names),
            tuple(frozenset(agent_sets[a]) for a in agent_names),
            frozenset((e, s, r) for e, s, r, _, _ in channels),
        )
    except AutomatonError as exc:
        raise ScenarioError(str(exc), agents_line) from exc

    task_automaton = dict(automata)[task_name]
    loose = task_automaton.alphabet - d.alphabet
    if loose:
        raise ScenarioError(
            f"task events not in any agent's set: {sorted(loose)}", task_line
        )
    for agent, events in failures.items():
        if agent not in agent_sets:
            raise ScenarioError(f"failure for unknown agent {agent!r}", agents_line)
        stray = events - set(agent_sets[agent])
        if stray:
            raise ScenarioError(
                f"failed events not in agent {agent!r}'s set: {sorted(stray)}",
                agents_line,
            )
    for keyword, entries in (("plant", plants), ("controller", controllers)):
        for agent, name in entries:
            if agent not in agent_sets:
                raise ScenarioError(f"{keyword} for unknown agent {agent!r}", agents_line)
            if all(n != name for n, _ in automata):
                raise ScenarioError(f"{keyword} automaton {name!r} not defined", agents_line)
    return Scenario(
        automata=tuple(automata),
        d=d,
        task=task_name,
        failures=FailureSpec(tuple((a, frozenset(ev)) for a, ev in failures.items())),
        plants=tuple(plants),
        controllers=tuple(controllers),
    )


def _parse_automaton_body(lines, i, strip):
    states: list[str] = []
    initials: list[str] = []
    alphabet: list[str] | None = None
    transitions: list[tuple[str, str, str]] = []
    body_start = i
    while i < len(lines):
        lineno = i + 1
        raw = lines[i]
        line = strip(raw)
        i += 1
        if not line:
            continue
        if line == "}":
            if not states:
                raise ScenarioError("automaton without states", lineno)
            if not initials:
                raise ScenarioError("automaton without initial states", lineno)
            try:
                return i, Automaton(
                    tuple(states),
                    frozenset(initials),
                    frozenset(alphabet)
                    if alphabet is not None
                    else frozenset(l for _, l, _ in transitions if l != EPSILON),
                    frozenset(transitions),
                )
            except AutomatonError as exc:
                raise ScenarioError(str(exc), body_start) from exc
        if line.startswith("states:"):
            for token in line[7:].split():
                _check_name(token, raw, lineno, "state")
                states.append(token)
            continue
        if line.startswith("initial:"):
            initials.extend(line[8:].split())
            continue
        if line.startswith("alphabet:"):
            alphabet = line[9:].split()
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ScenarioError(
                f"expected 'SRC LABEL DST', got {line!r}", lineno
            )
        src, label, dst = parts
        transitions.append((src, EPSILON if label == "eps" else label, dst))
    raise ScenarioError("automaton block never closed", body_start)


def _parse_section(lines, i, strip, section, agent_sets, channels, failures):
    start = i
    while i < len(lines):
        lineno = i + 1
        raw = lines[i]
        line = strip(raw)
        i += 1
        if not line:
            continue
        if line == "}":
            return i
        if section in ("agents", "failures"):
            if ":" not in line:
                raise ScenarioError(f"expected 'AGENT: events...'", lineno)
            agent, rest = (part.strip() for part in line.split(":", 1))
            _check_name(agent, raw, lineno, "agent")
            events = rest.split()
            for e in events:
                _check_name(e, raw, lineno, "event")
            if section == "agents":
                if agent in agent_sets:
                    raise ScenarioError(f"duplicate agent {agent!r}", lineno)
                agent_sets[agent] = events
            else:
                failures.setdefault(agent, set()).update(events)
            continue
        m = re.match(r"^(\S+)\s*:\s*(\S+)\s*->\s*(\S+)$", line)
        if section == "channels":
            if not m:
                raise ScenarioError("expected 'EVENT: SENDER -> RECEIVER'", lineno)
            event, sender, receiver = m.group(1), m.group(2), m.group(3)
            channels.append((event, sender, receiver, lineno, raw))
            continue
    raise ScenarioError(f"{section} section never closed", start)


def automaton_block(name: str, a: Automaton) -> str:
    """The canonical text block for one automaton."""
    lines = [f"automaton {name} {{"]
    lines.append("  states: " + " ".join(a.states))
    lines.append(
        "  initial: " + " ".join(sorted(a.initials, key=a.sort_key))
    )
    lines.append("  alphabet: " + " ".join(sorted(a.alphabet)))
    for src, label, dst in sorted(
        a.transitions, key=lambda t: (a.sort_key(t[0]), t[1], a.sort_key(t[2]))
    ):
        lines.append(f"  {src} {label if label != EPSILON else 'eps'} {dst}")
    lines.append("}")
    return "\n".join(lines)


def emit(sc: Scenario) -> str:
    """Canonical text for a scenario: task block first, sections sorted."""
    chunks = []
    names = [sc.task] + sorted(n for n, _ in sc.automata if n != sc.task)
    for name in names:
        chunks.append(automaton_block(name, sc.automaton(name)))
    agent_lines = ["agents {"]
    for agent in sc.d.agents:
        agent_lines.append(f"  {agent}: " + " ".join(sorted(sc.d.local(agent))))
    agent_lines.append("}")
    chunks.append("\n".join(agent_lines))
    if sc.d.channels:
        channel_lines = ["channels {"]
        for event, sender, receiver in sorted(sc.d.channels):
            channel_lines.append(f"  {event}: {sender} -> {receiver}")
        channel_lines.append("}")
        chunks.append("\n".join(channel_lines))
    if not sc.failures.empty:
        failure_lines = ["failures {"]
        for agent, events in sc.failures.failed:
            if events:
                failure_lines.append(f"  {agent}: " + " ".join(sorted(events)))
        failure_lines.append("}")
        chunks.append("\n".join(failure_lines))
    chunks.append(f"task: {sc.task}")
    design_lines = []
    for keyword, entries in (("plant", sc.plants), ("controller", sc.controllers)):
        for agent, name in sorted(entries):
            design_lines.append(f"{keyword} {agent}: {name}")
    if design_lines:
        chunks.append("\n".join(design_lines))
    return "\n\n".join(chunks) + "\n"
