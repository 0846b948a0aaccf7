"""The four decomposability conditions, their oracle, and replayable evidence.

A deterministic task automaton decomposes across agents exactly when the
parallel composition of its per-agent projections is bisimilar to it.  The
four conditions below predict that verdict structurally: DC1 constrains which
of two enabled events may be chosen, DC2 constrains whether their order can
matter, DC3 rules out illegal interleavings reassembled from local views, and
DC4 demands that local nondeterminism never splits into different futures.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .automata import (
    MAX_DEPTH,
    Automaton,
    AutomatonError,
    DistributedAlphabet,
    bounded_language,
    compose_all,
    defined,
    run_from,
    subset_views,
)
from .projection import (
    enumerate_sync_product,
    project_automaton,
    project_string,
    sync_product_contains,
)
from .relations import (
    RelationVerdict,
    bisimilar,
    language_included,
    state_language_equal,
)

ILLEGAL_WITNESS_CAP = 64
TUPLE_BUDGET = 250_000


@dataclass(frozen=True)
class ConditionWitness:
    """One concrete reason a condition fails; replayable via replay_condition_witness."""

    kind: str
    state: str | None = None
    events: tuple[str, ...] = ()
    string: tuple[str, ...] = ()
    agent: str | None = None
    pair: tuple[str, str] | None = None
    sources: tuple[tuple[str, ...], ...] = ()
    note: str = ""


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    holds: bool
    witnesses: tuple[ConditionWitness, ...] = ()
    mode: str = "exact"
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class TwoAgentReport:
    """Private-pair forms of DC1/DC2 plus a bounded pairwise reading of DC3.

    With two agents a pair of events escapes co-location only when each is
    private to a different agent, so the restricted checks agree with the
    full ones; they are reported separately because the restricted pair
    space is what the two-agent theory talks about.
    """

    dc1_private_pairs: ConditionReport
    dc2_private_pairs: ConditionReport
    dc3_pairwise: ConditionReport
    consistent_with_oracle: bool


@dataclass(frozen=True)
class DecompReport:
    agents: tuple[str, ...]
    conditions: tuple[ConditionReport, ...]
    conjunction: bool
    oracle: RelationVerdict
    consistent: bool
    locals_: tuple[tuple[str, Automaton], ...]
    composition: Automaton
    two_agent: TwoAgentReport | None = None


def _require_task(a_s: Automaton) -> None:
    if not a_s.deterministic:
        raise AutomatonError("the task automaton must be deterministic")


def _sets_in_order(
    d: DistributedAlphabet, sets: Mapping[str, frozenset[str]] | None
) -> list[tuple[str, frozenset[str]]]:
    if sets is None:
        return [(a, d.local(a)) for a in d.agents]
    extra = set(sets) - set(d.agents)
    if extra:
        raise AutomatonError(f"event sets for unknown agents: {sorted(extra)}")
    return [(a, frozenset(sets[a])) for a in d.agents if a in sets]


def _colocated(e1: str, e2: str, sets: Sequence[tuple[str, frozenset[str]]]) -> bool:
    return any(e1 in events and e2 in events for _, events in sets)


def local_views(
    a_s: Automaton,
    d: DistributedAlphabet,
    sets: Mapping[str, frozenset[str]] | None = None,
) -> tuple[tuple[str, Automaton], ...]:
    """Each agent's projection of the task, in agent order."""
    return tuple(
        (agent, project_automaton(a_s, events))
        for agent, events in _sets_in_order(d, sets)
    )


def check_dc1(
    a_s: Automaton,
    d: DistributedAlphabet,
    sets: Mapping[str, frozenset[str]] | None = None,
) -> ConditionReport:
    """Choices between two enabled events must be decidable somewhere.

    Either one agent sees both events, or the choice must not matter: both
    orders have to be possible.
    """
    _require_task(a_s)
    pairs = _sets_in_order(d, sets)
    witnesses = []
    for q in a_s.states:
        for e1, e2 in itertools.combinations(sorted(a_s.enabled(q)), 2):
            if _colocated(e1, e2, pairs):
                continue
            both = defined_from(a_s, q, (e1, e2)) and defined_from(a_s, q, (e2, e1))
            if not both:
                witnesses.append(
                    ConditionWitness(
                        kind="selection",
                        state=q,
                        events=(e1, e2),
                        note="no agent sees both events and the orders are not interchangeable",
                    )
                )
    return ConditionReport("DC1", not witnesses, tuple(witnesses))


def defined_from(a: Automaton, state: str, string: Sequence[str]) -> bool:
    return bool(run_from(a, [state], string))


def check_dc2(
    a_s: Automaton,
    d: DistributedAlphabet,
    sets: Mapping[str, frozenset[str]] | None = None,
) -> ConditionReport:
    """Where no agent sees both events, their order must never matter.

    If one order of two events can run from a state, the other order must run
    too, and the two orders must allow exactly the same continuations.
    """
    _require_task(a_s)
    pairs = _sets_in_order(d, sets)
    events = sorted(a_s.alphabet)
    witnesses = []
    for q in a_s.states:
        for e1, e2 in itertools.combinations(events, 2):
            if _colocated(e1, e2, pairs):
                continue
            r12 = run_from(a_s, [q], (e1, e2))
            r21 = run_from(a_s, [q], (e2, e1))
            if not r12 and not r21:
                continue
            if bool(r12) != bool(r21):
                witnesses.append(
                    ConditionWitness(
                        kind="order",
                        state=q,
                        events=(e1, e2),
                        note="only one order of the two events can run",
                    )
                )
                continue
            (q12,) = r12
            (q21,) = r21
            verdict = state_language_equal(a_s, q12, q21)
            if not verdict.holds:
                witnesses.append(
                    ConditionWitness(
                        kind="order",
                        state=q,
                        events=(e1, e2),
                        string=verdict.witness.string,
                        note="the two orders allow different continuations",
                    )
                )
    return ConditionReport("DC2", not witnesses, tuple(witnesses))


def _illegal_strings(
    composition: Automaton, a_s: Automaton, depth: int, cap: int
) -> list[tuple[str, ...]]:
    """Shortest-first sample of strings the composition allows but the task forbids."""
    found: list[tuple[str, ...]] = []
    frontier: list[tuple[tuple[str, ...], frozenset[str], frozenset[str]]] = [
        ((), frozenset(composition.initials), frozenset(a_s.initials))
    ]
    events = sorted(composition.alphabet)
    budget = 50_000
    while frontier and len(found) < cap and budget > 0:
        next_frontier = []
        for string, sc, sa in frontier:
            if len(string) == depth:
                continue
            for e in events:
                budget -= 1
                nc = frozenset(t for q in sc for t in composition.targets(q, e))
                if not nc:
                    continue
                na = frozenset(t for q in sa for t in a_s.targets(q, e))
                longer = string + (e,)
                if not na:
                    if len(found) < cap:
                        found.append(longer)
                    continue
                next_frontier.append((longer, nc, na))
        frontier = next_frontier
    return found


def check_dc3(
    a_s: Automaton,
    d: DistributedAlphabet,
    sets: Mapping[str, frozenset[str]] | None = None,
    mode: str = "exact",
    depth: int | None = None,
) -> ConditionReport:
    """No interleaving reassembled from the local views may escape the task.

    Exact mode checks language inclusion of the composed projections in the
    task.  Bounded mode rebuilds the interleaving closure explicitly: every
    way of weaving together local views of task strings (two of which must
    differ) has to be a task string itself.
    """
    _require_task(a_s)
    pairs = _sets_in_order(d, sets)
    views = [(agent, project_automaton(a_s, events)) for agent, events in pairs]
    composition = compose_all([v for _, v in views])
    if mode == "exact":
        inclusion = language_included(composition, a_s)
        if inclusion.holds:
            return ConditionReport("DC3", True)
        shortest = inclusion.witness.string
        sample_depth = min(MAX_DEPTH, len(shortest) + 2)
        sample = _illegal_strings(composition, a_s, sample_depth, ILLEGAL_WITNESS_CAP)
        witnesses = tuple(
            ConditionWitness(kind="illegal-string", string=s) for s in sample
        ) or (ConditionWitness(kind="illegal-string", string=shortest),)
        return ConditionReport("DC3", False, witnesses)
    if mode != "bounded":
        raise AutomatonError(f"unknown mode {mode!r}")
    if depth is None:
        raise AutomatonError("bounded mode needs a depth")
    language = sorted(bounded_language(a_s, depth))
    set_list = pairs
    shared_keys: list[tuple[int, frozenset[str]]] = []
    for i, j in itertools.combinations(range(len(set_list)), 2):
        shared = set_list[i][1] & set_list[j][1]
        if shared:
            shared_keys.append((i * len(set_list) + j, shared))

    def anchors(s: tuple[str, ...]) -> frozenset[tuple[int, str]]:
        out = set()
        for key, shared in shared_keys:
            p = project_string(s, shared)
            if p:
                out.add((key, p[0]))
        return frozenset(out)

    core = [s for s in language if anchors(s)]
    n = len(set_list)
    if len(core) ** n > TUPLE_BUDGET:
        raise AutomatonError(
            "bounded interleaving check is too large here; use exact mode"
        )
    vectors: set[tuple[tuple[str, ...], ...]] = set()
    for combo in itertools.product(core, repeat=n):
        if all(x == combo[0] for x in combo):
            continue
        vectors.add(
            tuple(project_string(s, events) for s, (_, events) in zip(combo, set_list))
        )
    witnesses = []
    notes = (f"interleaving closure holds {len(core)} of {len(language)} strings",)
    for vector in sorted(vectors):
        locals_ = {agent: vector[i] for i, (agent, _) in enumerate(set_list)}
        members = enumerate_sync_product(
            locals_, dict(set_list), sum(len(p) for p in vector)
        )
        for member in sorted(members):
            if not defined(a_s, member):
                witnesses.append(
                    ConditionWitness(
                        kind="illegal-interleaving",
                        string=member,
                        note="woven from " + " | ".join(" ".join(p) or "(empty)" for p in vector),
                    )
                )
            if len(witnesses) >= ILLEGAL_WITNESS_CAP:
                break
        if len(witnesses) >= ILLEGAL_WITNESS_CAP:
            break
    return ConditionReport("DC3", not witnesses, tuple(witnesses), mode="bounded", notes=notes)


def check_dc4(
    a_s: Automaton,
    d: DistributedAlphabet,
    sets: Mapping[str, frozenset[str]] | None = None,
) -> ConditionReport:
    """Nondeterministic branches in a local view must share their futures.

    Projection can map one local observation to several successor classes;
    that is harmless only when every such pair of successors generates the
    same language.
    """
    _require_task(a_s)
    witnesses = []
    for agent, events in _sets_in_order(d, sets):
        view = project_automaton(a_s, events)
        reported: set[tuple[str, str]] = set()
        for x in view.states:
            for e in sorted(view.enabled(x)):
                succs = sorted(view.targets(x, e), key=view.sort_key)
                for x1, x2 in itertools.combinations(succs, 2):
                    if (x1, x2) in reported:
                        continue
                    det, (n1, n2) = subset_views(view, [[x1], [x2]])
                    verdict = state_language_equal(det, n1, n2)
                    if not verdict.holds:
                        reported.add((x1, x2))
                        witnesses.append(
                            ConditionWitness(
                                kind="conflicting-branches",
                                state=x,
                                events=(e,),
                                string=verdict.witness.string,
                                agent=agent,
                                pair=(x1, x2),
                                note="branches reached by the same event diverge later",
                            )
                        )
    return ConditionReport("DC4", not witnesses, tuple(witnesses))


def is_decomposable(
    a_s: Automaton,
    d: DistributedAlphabet,
    sets: Mapping[str, frozenset[str]] | None = None,
) -> RelationVerdict:
    """Ground truth: compose the local views and compare against the task."""
    _require_task(a_s)
    views = local_views(a_s, d, sets)
    return bisimilar(compose_all([v for _, v in views]), a_s)


def _bounded_from(a: Automaton, state: str, depth: int) -> list[tuple[str, ...]]:
    out = [()]
    frontier = [((), frozenset([state]))]
    while frontier:
        string, states = frontier.pop()
        if len(string) == depth:
            continue
        for e in sorted(a.alphabet):
            nxt = frozenset(t for q in states for t in a.targets(q, e))
            if nxt:
                out.append(string + (e,))
                frontier.append((string + (e,), nxt))
    return sorted(set(out))


def _check_dc1_private(
    a_s: Automaton, d: DistributedAlphabet
) -> ConditionReport:
    e1_only = d.local(d.agents[0]) - d.local(d.agents[1])
    e2_only = d.local(d.agents[1]) - d.local(d.agents[0])
    witnesses = []
    for q in a_s.states:
        enabled = a_s.enabled(q)
        for e1 in sorted(enabled & e1_only):
            for e2 in sorted(enabled & e2_only):
                if not (
                    defined_from(a_s, q, (e1, e2)) and defined_from(a_s, q, (e2, e1))
                ):
                    witnesses.append(
                        ConditionWitness(kind="selection", state=q, events=(e1, e2))
                    )
    return ConditionReport("DC1-private-pairs", not witnesses, tuple(witnesses))


def _check_dc2_private(
    a_s: Automaton, d: DistributedAlphabet
) -> ConditionReport:
    e1_only = sorted(d.local(d.agents[0]) - d.local(d.agents[1]))
    e2_only = sorted(d.local(d.agents[1]) - d.local(d.agents[0]))
    witnesses = []
    for q in a_s.states:
        for e1 in e1_only:
            for e2 in e2_only:
                r12 = run_from(a_s, [q], (e1, e2))
                r21 = run_from(a_s, [q], (e2, e1))
                if not r12 and not r21:
                    continue
                if bool(r12) != bool(r21):
                    witnesses.append(
                        ConditionWitness(kind="order", state=q, events=(e1, e2))
                    )
                    continue
                verdict = state_language_equal(a_s, next(iter(r12)), next(iter(r21)))
                if not verdict.holds:
                    witnesses.append(
                        ConditionWitness(
                            kind="order",
                            state=q,
                            events=(e1, e2),
                            string=verdict.witness.string,
                        )
                    )
    return ConditionReport("DC2-private-pairs", not witnesses, tuple(witnesses))


def _check_dc3_pairwise(
    a_s: Automaton, d: DistributedAlphabet, depth: int
) -> ConditionReport:
    """Two-agent reading of DC3: cross-weave any two strings that open on the
    same shared event, from any state where both can run."""
    first, second = d.agents
    shared = d.local(first) & d.local(second)
    sets = {first: d.local(first), second: d.local(second)}
    witnesses = []
    for q in a_s.states:
        strings = [
            s
            for s in _bounded_from(a_s, q, depth)
            if project_string(s, shared)
        ]
        for s1, s2 in itertools.permutations(strings, 2):
            if project_string(s1, shared)[0] != project_string(s2, shared)[0]:
                continue
            locals_ = {
                first: project_string(s1, sets[first]),
                second: project_string(s2, sets[second]),
            }
            members = enumerate_sync_product(
                locals_, sets, len(s1) + len(s2)
            )
            for member in sorted(members):
                if not defined_from(a_s, q, member):
                    witnesses.append(
                        ConditionWitness(
                            kind="illegal-interleaving",
                            state=q,
                            string=member,
                            sources=(s1, s2),
                            note=f"woven from {' '.join(s1)} and {' '.join(s2)}",
                        )
                    )
                if len(witnesses) >= ILLEGAL_WITNESS_CAP:
                    break
            if len(witnesses) >= ILLEGAL_WITNESS_CAP:
                break
    return ConditionReport(
        "DC3-pairwise",
        not witnesses,
        tuple(witnesses),
        mode="bounded",
        notes=(f"string pairs explored to depth {depth}",),
    )


def decomposability_report(
    a_s: Automaton,
    d: DistributedAlphabet,
    mode: str = "exact",
    depth: int | None = None,
) -> DecompReport:
    """Run everything: the four conditions, the oracle, and their agreement."""
    _require_task(a_s)
    missing = a_s.alphabet - d.alphabet
    if missing:
        raise AutomatonError(
            f"task events not owned by any agent: {sorted(missing)}"
        )
    dc3_depth = depth
    conditions = (
        check_dc1(a_s, d),
        check_dc2(a_s, d),
        check_dc3(a_s, d, mode=mode, depth=dc3_depth),
        check_dc4(a_s, d),
    )
    conjunction = all(c.holds for c in conditions)
    views = local_views(a_s, d)
    composition = compose_all([v for _, v in views])
    oracle = bisimilar(composition, a_s)
    two_agent = None
    if len(d.agents) == 2:
        dc1p = _check_dc1_private(a_s, d)
        dc2p = _check_dc2_private(a_s, d)
        dc3p = _check_dc3_pairwise(a_s, d, depth=min(4, MAX_DEPTH))
        restricted = (
            dc1p.holds and dc2p.holds and conditions[2].holds and conditions[3].holds
        )
        two_agent = TwoAgentReport(dc1p, dc2p, dc3p, restricted == oracle.holds)
    return DecompReport(
        agents=d.agents,
        conditions=conditions,
        conjunction=conjunction,
        oracle=oracle,
        consistent=conjunction == oracle.holds,
        locals_=views,
        composition=composition,
        two_agent=two_agent,
    )


def replay_condition_witness(
    a_s: Automaton,
    d: DistributedAlphabet,
    w: ConditionWitness,
    sets: Mapping[str, frozenset[str]] | None = None,
) -> bool:
    """Re-run one witness against the inputs it was issued for."""
    pairs = _sets_in_order(d, sets)
    if w.kind == "selection":
        e1, e2 = w.events
        return (
            {e1, e2} <= a_s.enabled(w.state)
            and not _colocated(e1, e2, pairs)
            and not (
                defined_from(a_s, w.state, (e1, e2))
                and defined_from(a_s, w.state, (e2, e1))
            )
        )
    if w.kind == "order":
        e1, e2 = w.events
        one = defined_from(a_s, w.state, (e1, e2) + w.string)
        other = defined_from(a_s, w.state, (e2, e1) + w.string)
        return one != other
    if w.kind in ("illegal-string", "illegal-interleaving"):
        if w.state is not None:
            # Pairwise witnesses quantify from an arbitrary task state: both
            # source strings must run there while the woven member must not.
            sets_map = dict(pairs)
            runnable = all(defined_from(a_s, w.state, s) for s in w.sources)
            woven = sync_product_contains(
                {a: project_string(w.sources[i], sets_map[a])
                 for i, a in enumerate(list(sets_map))},
                sets_map,
                w.string,
            ) if len(w.sources) == len(sets_map) else True
            return runnable and woven and not defined_from(a_s, w.state, w.string)
        views = local_views(a_s, d, sets)
        composition = compose_all([v for _, v in views])
        return defined(composition, w.string) and not defined(a_s, w.string)
    if w.kind == "conflicting-branches":
        sets_map = dict(pairs)
        view = project_automaton(a_s, sets_map[w.agent])
        x1, x2 = w.pair
        if x1 not in view._index or x2 not in view._index:
            return False
        succs = view.targets(w.state, w.events[0])
        if x1 not in succs or x2 not in succs or x1 == x2:
            return False
        return bool(run_from(view, [x1], w.string)) != bool(
            run_from(view, [x2], w.string)
        )
    raise AutomatonError(f"unknown witness kind {w.kind!r}")
