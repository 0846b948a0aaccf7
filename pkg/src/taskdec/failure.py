"""Event failures: passivity of failed events, failed local views, survival.

A failed event stops being locally controllable or observable.  Whether the
team survives hinges on passivity: an agent can afford to lose an event only
if it merely receives the event over some channel and every agent it used to
feed has a backup sender.  Passive failures turn the event into a hidden move
of that agent's view; non-passive failures stop the event's transitions
outright, so the composed team blocks it everywhere.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .automata import (
    Automaton,
    AutomatonError,
    DistributedAlphabet,
    compose_all,
    run_from,
    subset_views,
)
from .decomposability import (
    ConditionReport,
    ConditionWitness,
    check_dc1,
    check_dc2,
    check_dc3,
    check_dc4,
    is_decomposable,
)
from .projection import _project_with_classes, project_automaton
from .relations import RelationVerdict, bisimilar, state_language_equal

PASSIVE = "passive"
NOT_RECEIVED = "not-received"
NO_BACKUP = "relay-without-backup"


class NonPassiveFailure(AutomatonError):
    """A condition check was asked to run on a non-passive failure."""


@dataclass(frozen=True)
class FailureSpec:
    """Which events fail in which agent, as (agent, events) pairs."""

    failed: tuple[tuple[str, frozenset[str]], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self,
            "failed",
            tuple(sorted((a, frozenset(ev)) for a, ev in self.failed if ev)),
        )
        agents = [a for a, _ in self.failed]
        if len(set(agents)) != len(agents):
            raise AutomatonError("one failure entry per agent")

    def for_agent(self, agent: str) -> frozenset[str]:
        for a, events in self.failed:
            if a == agent:
                return events
        return frozenset()

    @property
    def events(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for _, events in self.failed:
            out |= events
        return out

    @property
    def empty(self) -> bool:
        return not self.events


def build_failures(failed: Mapping[str, Iterable[str]]) -> FailureSpec:
    return FailureSpec(tuple((a, frozenset(ev)) for a, ev in failed.items()))


@dataclass(frozen=True)
class CommMaps:
    """Who sends each event to whom, derived from the channels."""

    sends_to: dict[tuple[str, str], frozenset[str]]
    receives_from: dict[tuple[str, str], frozenset[str]]


def comm_maps(d: DistributedAlphabet) -> CommMaps:
    sends: dict[tuple[str, str], set[str]] = {}
    receives: dict[tuple[str, str], set[str]] = {}
    for event, sender, receiver in d.channels:
        sends.setdefault((event, sender), set()).add(receiver)
        receives.setdefault((event, receiver), set()).add(sender)
    return CommMaps(
        {k: frozenset(v) for k, v in sends.items()},
        {k: frozenset(v) for k, v in receives.items()},
    )


@dataclass(frozen=True)
class PassivityEntry:
    agent: str
    event: str
    passive: bool
    reason: str


@dataclass(frozen=True)
class PassivityVerdict:
    entries: tuple[PassivityEntry, ...]
    all_passive: bool

    def passive_for(self, agent: str) -> frozenset[str]:
        return frozenset(
            e.event for e in self.entries if e.agent == agent and e.passive
        )

    @property
    def non_passive(self) -> tuple[PassivityEntry, ...]:
        return tuple(e for e in self.entries if not e.passive)


def passivity(d: DistributedAlphabet, f: FailureSpec) -> PassivityVerdict:
    """Classify every failed event: received-only with backed-up forwarding?"""
    maps = comm_maps(d)
    entries = []
    for agent, events in f.failed:
        local = d.local(agent)
        for event in sorted(events):
            if event not in local:
                raise AutomatonError(
                    f"event {event!r} cannot fail in agent {agent!r}: not in its set"
                )
            receives = maps.receives_from.get((event, agent), frozenset())
            if not receives:
                entries.append(
                    PassivityEntry(agent, event, False, NOT_RECEIVED)
                )
                continue
            fed = maps.sends_to.get((event, agent), frozenset())
            backed_up = all(
                any(
                    k in maps.sends_to.get((event, j), frozenset())
                    for j in d.agents
                    if j not in (agent, k)
                )
                for k in fed
            )
            entries.append(
                PassivityEntry(
                    agent, event, backed_up, PASSIVE if backed_up else NO_BACKUP
                )
            )
    entries.sort(key=lambda e: (e.agent, e.event))
    return PassivityVerdict(tuple(entries), all(e.passive for e in entries))


def refined_alphabets(
    d: DistributedAlphabet, f: FailureSpec
) -> dict[str, frozenset[str]]:
    """Per-agent event sets after failure: passive losses leave, the rest stay."""
    pv = passivity(d, f)
    return {
        agent: d.local(agent) - pv.passive_for(agent) for agent in d.agents
    }


def apply_failure(
    a: Automaton, failed: Iterable[str], passive_events: Iterable[str]
) -> Automaton:
    """A local view after failure: hide passive events, stop the others.

    Passive events become hidden moves and are projected away; non-passive
    events keep their place in the alphabet but lose all their transitions.
    """
    failed = frozenset(failed)
    passive_events = frozenset(passive_events)
    if not failed <= a.alphabet:
        raise AutomatonError(
            f"failed events missing from the alphabet: {sorted(failed - a.alphabet)}"
        )
    if not passive_events <= failed:
        raise AutomatonError("passive events must be failed events")
    if not failed:
        return a
    result = a
    stopped = failed - passive_events
    if stopped:
        kept = frozenset(t for t in result.transitions if t[1] not in stopped)
        result = Automaton(result.states, result.initials, result.alphabet, kept)
        reached = set(result.initials)
        frontier = list(result.initials)
        while frontier:
            q = frontier.pop()
            for src, _, dst in result.transitions:
                if src == q and dst not in reached:
                    reached.add(dst)
                    frontier.append(dst)
        result = Automaton(
            tuple(q for q in result.states if q in reached),
            result.initials,
            result.alphabet,
            frozenset(t for t in result.transitions if t[0] in reached),
        )
    if passive_events:
        result = project_automaton(result, result.alphabet - passive_events)
    return result


def failed_local_views(
    a_s: Automaton, d: DistributedAlphabet, f: FailureSpec
) -> tuple[tuple[str, Automaton], ...]:
    """Each agent's post-failure view of the task, in agent order."""
    pv = passivity(d, f)
    out = []
    for agent in d.agents:
        view = project_automaton(a_s, d.local(agent))
        out.append(
            (agent, apply_failure(view, f.for_agent(agent), pv.passive_for(agent)))
        )
    return tuple(out)


def _ef4_literal(
    a_s: Automaton,
    d: DistributedAlphabet,
    f: FailureSpec,
    sigma: Mapping[str, frozenset[str]],
) -> ConditionReport:
    """Failure-aware branch condition, read directly off the pre-failure views.

    Two branches count as a pair when the same surviving event reaches them
    from points separated only by failed events; their futures are compared
    inside the post-failure view, where those failed events are hidden.
    """
    witnesses = []
    for agent in d.agents:
        lost = f.for_agent(agent)
        view = project_automaton(a_s, d.local(agent))
        failed_view, of_state = _project_with_classes(view, sigma[agent])
        hidden_reach: dict[str, set[str]] = {}
        for x in view.states:
            reach = {x}
            frontier = [x]
            while frontier:
                q = frontier.pop()
                for e in lost:
                    for dst in view.targets(q, e):
                        if dst not in reach:
                            reach.add(dst)
                            frontier.append(dst)
            hidden_reach[x] = reach
        reported: set[tuple[str, str]] = set()
        for x in view.states:
            for e in sorted(sigma[agent] & view.alphabet):
                direct = view.targets(x, e)
                via_failures = frozenset(
                    t for y in hidden_reach[x] for t in view.targets(y, e)
                )
                for x1, x2 in itertools.product(sorted(via_failures), sorted(direct)):
                    if x1 == x2 or (x1, x2) in reported or (x2, x1) in reported:
                        continue
                    c1, c2 = of_state.get(x1), of_state.get(x2)
                    if c1 == c2 or c1 is None or c2 is None:
                        continue
                    det, (n1, n2) = subset_views(failed_view, [[c1], [c2]])
                    verdict = state_language_equal(det, n1, n2)
                    if not verdict.holds:
                        reported.add((x1, x2))
                        witnesses.append(
                            ConditionWitness(
                                kind="failure-branch",
                                state=x,
                                events=(e,),
                                string=verdict.witness.string,
                                agent=agent,
                                pair=(x1, x2),
                                note="futures diverge once the failed events are hidden",
                            )
                        )
    return ConditionReport(
        "EF4", not witnesses, tuple(witnesses), notes=("literal reading",)
    )


def check_ef(
    a_s: Automaton,
    d: DistributedAlphabet,
    f: FailureSpec,
    which: str,
    mode: str = "exact",
    depth: int | None = None,
) -> ConditionReport:
    """One post-failure condition, evaluated over the refined event sets.

    EF4 is evaluated along two independent routes (the refined-set branch
    condition and the literal failure-aware reading); the report notes
    whether they agree.
    """
    pv = passivity(d, f)
    if not pv.all_passive:
        bad = ", ".join(f"{e.event} in agent {e.agent} ({e.reason})" for e in pv.non_passive)
        raise NonPassiveFailure(f"non-passive failure present: {bad}")
    sigma = refined_alphabets(d, f)
    if which == "EF1":
        return replace(check_dc1(a_s, d, sigma), condition="EF1")
    if which == "EF2":
        return replace(check_dc2(a_s, d, sigma), condition="EF2")
    if which == "EF3":
        return replace(
            check_dc3(a_s, d, sigma, mode=mode, depth=depth), condition="EF3"
        )
    if which == "EF4":
        canonical = check_dc4(a_s, d, sigma)
        literal = _ef4_literal(a_s, d, f, sigma)
        agree = canonical.holds == literal.holds
        notes = (
            f"refined-set reading: {'holds' if canonical.holds else 'violated'}",
            f"literal reading: {'holds' if literal.holds else 'violated'}",
            "dual readings agree" if agree else "dual readings disagree",
        )
        return ConditionReport(
            "EF4",
            canonical.holds,
            canonical.witnesses + literal.witnesses,
            notes=notes,
        )
    raise AutomatonError(f"unknown condition {which!r}")


def ef_dual_agreement(report: ConditionReport) -> bool:
    return "dual readings disagree" not in report.notes


@dataclass(frozen=True)
class FailureReport:
    pre: RelationVerdict
    passivity: PassivityVerdict
    sigma: tuple[tuple[str, frozenset[str]], ...]
    conditions: tuple[ConditionReport, ...]
    conjunction: bool | None
    failed_locals: tuple[tuple[str, Automaton], ...]
    composition: Automaton
    oracle: RelationVerdict
    remains: bool
    predicted: bool | None
    consistent: bool
    notes: tuple[str, ...]


def remains_decomposable(
    a_s: Automaton,
    d: DistributedAlphabet,
    f: FailureSpec,
    mode: str = "exact",
    depth: int | None = None,
) -> FailureReport:
    """Does decomposability survive the failures?

    The pipeline classifies passivity, evaluates the four post-failure
    conditions when every failure is passive, and always closes with the
    oracle: composing the failed local views and comparing against the task.
    """
    pre = is_decomposable(a_s, d)
    pv = passivity(d, f)
    sigma_map = refined_alphabets(d, f)
    sigma = tuple((agent, sigma_map[agent]) for agent in d.agents)
    notes: list[str] = []
    if not pre.holds:
        notes.append("the task does not decompose even before failures")
    for entry in pv.non_passive:
        notes.append(
            f"event {entry.event} fails non-passively in agent {entry.agent}: {entry.reason}"
        )
    conditions: tuple[ConditionReport, ...] = ()
    conjunction: bool | None = None
    if pv.all_passive:
        conditions = tuple(
            check_ef(a_s, d, f, which, mode=mode, depth=depth)
            for which in ("EF1", "EF2", "EF3", "EF4")
        )
        conjunction = all(c.holds for c in conditions)
    else:
        notes.append("condition checks skipped: they require passive failures")
    failed_locals = failed_local_views(a_s, d, f)
    composition = compose_all([v for _, v in failed_locals])
    oracle = bisimilar(composition, a_s)
    remains = oracle.holds
    predicted = conjunction if pv.all_passive else None
    dual_ok = all(ef_dual_agreement(c) for c in conditions if c.condition == "EF4")
    if not dual_ok:
        notes.append("internal inconsistency: the two EF4 readings disagree")
    consistent = True
    if pre.holds and predicted is not None:
        consistent = predicted == remains and dual_ok
    return FailureReport(
        pre=pre,
        passivity=pv,
        sigma=sigma,
        conditions=conditions,
        conjunction=conjunction,
        failed_locals=failed_locals,
        composition=composition,
        oracle=oracle,
        remains=remains,
        predicted=predicted,
        consistent=consistent,
        notes=tuple(notes),
    )


def _switch_order_over_pairs(
    a_s: Automaton, pairs: Sequence[tuple[str, str]], tag: str
) -> tuple[ConditionReport, ConditionReport]:
    """Raw switch and order requirements over an explicit list of event pairs."""
    switch_witnesses = []
    order_witnesses = []
    for q in a_s.states:
        enabled = a_s.enabled(q)
        for e1, e2 in pairs:
            r12 = run_from(a_s, [q], (e1, e2))
            r21 = run_from(a_s, [q], (e2, e1))
            if e1 in enabled and e2 in enabled and not (r12 and r21):
                switch_witnesses.append(
                    ConditionWitness(kind="selection", state=q, events=(e1, e2))
                )
            if not r12 and not r21:
                continue
            if bool(r12) != bool(r21):
                order_witnesses.append(
                    ConditionWitness(kind="order", state=q, events=(e1, e2))
                )
                continue
            verdict = state_language_equal(a_s, next(iter(r12)), next(iter(r21)))
            if not verdict.holds:
                order_witnesses.append(
                    ConditionWitness(
                        kind="order",
                        state=q,
                        events=(e1, e2),
                        string=verdict.witness.string,
                    )
                )
    return (
        ConditionReport(f"switch[{tag}]", not switch_witnesses, tuple(switch_witnesses)),
        ConditionReport(f"order[{tag}]", not order_witnesses, tuple(order_witnesses)),
    )


@dataclass(frozen=True)
class IdentityReport:
    failed_sets_disjoint: bool
    failures_within_shared_events: bool
    private_view_shift: bool
    holds: bool


@dataclass(frozen=True)
class QuadrantReport:
    name: str
    switch: ConditionReport
    order: ConditionReport


@dataclass(frozen=True)
class PairSpaceReport:
    quadrants: tuple[QuadrantReport, ...]
    sigma_switch: ConditionReport
    sigma_order: ConditionReport
    agree: bool


@dataclass(frozen=True)
class WholeAgentReport:
    agent: str
    all_passive: bool
    remains: bool
    equivalence_holds: bool


@dataclass(frozen=True)
class TwoAgentFailureReport:
    pre: RelationVerdict
    passivity: PassivityVerdict
    identities: IdentityReport | None
    pair_spaces: PairSpaceReport | None
    whole_agent: tuple[WholeAgentReport, ...]
    oracle: RelationVerdict
    remains: bool
    notes: tuple[str, ...]


def two_agent_analysis(
    a_s: Automaton, d: DistributedAlphabet, f: FailureSpec
) -> TwoAgentFailureReport:
    """The sharper two-agent picture of failure survival.

    Passive failures of a two-agent team always sit inside the shared events
    and never on both sides at once, which shrinks the post-failure checks to
    a handful of event-pair quadrants.  Whole-agent failures admit a clean
    answer: survival is exactly passivity of everything that agent had.
    """
    if len(d.agents) != 2:
        raise AutomatonError("two-agent analysis needs exactly two agents")
    one, two = d.agents
    e1_set, e2_set = d.local(one), d.local(two)
    f1, f2 = f.for_agent(one), f.for_agent(two)
    pre = is_decomposable(a_s, d)
    pv = passivity(d, f)
    sigma = refined_alphabets(d, f)
    notes: list[str] = []
    identities = None
    pair_spaces = None
    if pv.all_passive:
        shift = (
            sigma[one] - sigma[two] == (e1_set - e2_set) | f2
            and sigma[two] - sigma[one] == (e2_set - e1_set) | f1
        )
        identities = IdentityReport(
            failed_sets_disjoint=not (f1 & f2),
            failures_within_shared_events=(f1 | f2) <= (e1_set & e2_set),
            private_view_shift=shift,
            holds=not (f1 & f2)
            and (f1 | f2) <= (e1_set & e2_set)
            and shift,
        )
        quadrant_pairs = (
            ("private1 x private2", sorted((e1_set - e2_set)), sorted((e2_set - e1_set))),
            ("private1 x failed1", sorted((e1_set - e2_set)), sorted(f1)),
            ("failed2 x private2", sorted(f2), sorted((e2_set - e1_set))),
            ("failed2 x failed1", sorted(f2), sorted(f1)),
        )
        quadrants = []
        for name, left, right in quadrant_pairs:
            pairs = [(a, b) for a in left for b in right if a != b]
            switch, order = _switch_order_over_pairs(a_s, pairs, name)
            quadrants.append(QuadrantReport(name, switch, order))
        sigma_pairs = [
            (a, b)
            for a in sorted(sigma[one] - sigma[two])
            for b in sorted(sigma[two] - sigma[one])
            if a != b
        ]
        sigma_switch, sigma_order = _switch_order_over_pairs(
            a_s, sigma_pairs, "refined"
        )
        quadrant_conj = all(q.switch.holds and q.order.holds for q in quadrants)
        pair_spaces = PairSpaceReport(
            tuple(quadrants),
            sigma_switch,
            sigma_order,
            agree=quadrant_conj == (sigma_switch.holds and sigma_order.holds),
        )
    else:
        notes.append("identity and pair-space sections need passive failures")
    failed_locals = failed_local_views(a_s, d, f)
    composition = compose_all([v for _, v in failed_locals])
    oracle = bisimilar(composition, a_s)
    whole_agent = []
    for agent, full, lost in ((one, e1_set, f1), (two, e2_set, f2)):
        if lost == full and full:
            all_passive_here = pv.passive_for(agent) == lost
            whole_agent.append(
                WholeAgentReport(
                    agent=agent,
                    all_passive=all_passive_here,
                    remains=oracle.holds,
                    equivalence_holds=(oracle.holds == all_passive_here),
                )
            )
            if not pre.holds:
                notes.append(
                    "whole-agent equivalence is only promised for decomposable tasks"
                )
    return TwoAgentFailureReport(
        pre=pre,
        passivity=pv,
        identities=identities,
        pair_spaces=pair_spaces,
        whole_agent=tuple(whole_agent),
        oracle=oracle,
        remains=oracle.holds,
        notes=tuple(notes),
    )


def replay_failure_witness(
    a_s: Automaton,
    d: DistributedAlphabet,
    f: FailureSpec,
    w: ConditionWitness,
) -> bool:
    """Replay an EF4 literal (failure-branch) witness."""
    if w.kind != "failure-branch":
        raise AutomatonError(f"not a failure witness: {w.kind!r}")
    sigma = refined_alphabets(d, f)
    view = project_automaton(a_s, d.local(w.agent))
    failed_view, of_state = _project_with_classes(view, sigma[w.agent])
    x1, x2 = w.pair
    if x1 not in of_state or x2 not in of_state:
        return False
    c1, c2 = of_state[x1], of_state[x2]
    return bool(run_from(failed_view, [c1], w.string)) != bool(
        run_from(failed_view, [c2], w.string)
    )
