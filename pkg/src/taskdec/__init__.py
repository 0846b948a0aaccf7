"""Decide whether a global task automaton splits across cooperating agents,
and whether the split survives event failures."""

from .automata import (
    EPSILON,
    Automaton,
    AutomatonError,
    DistributedAlphabet,
    accessible,
    bounded_language,
    build_alphabet,
    build_automaton,
    compose_all,
    determinize,
    epsilon_closure,
    loc,
    parallel_compose,
    run,
)
from .decomposability import (
    ConditionReport,
    ConditionWitness,
    DecompReport,
    check_dc1,
    check_dc2,
    check_dc3,
    check_dc4,
    decomposability_report,
    is_decomposable,
)
from .failure import (
    FailureReport,
    FailureSpec,
    NonPassiveFailure,
    apply_failure,
    build_failures,
    check_ef,
    comm_maps,
    passivity,
    refined_alphabets,
    remains_decomposable,
    two_agent_analysis,
)
from .projection import (
    enumerate_sync_product,
    inverse_projection_contains,
    project_automaton,
    project_string,
    state_classes,
    sync_product_contains,
)
from .relations import (
    RelationVerdict,
    Witness,
    bisimilar,
    language_included,
    replay_witness,
    simulates,
    state_language_equal,
)
from .scenario import Scenario, ScenarioError, emit, parse_scenario
from .testkit import GenParams, differential_suite, gen_scenario
from .topdown import (
    TeamDesign,
    verify_local,
    verify_team,
    verify_team_under_failure,
)
from .dot import dot_export

__version__ = "0.1.0"
