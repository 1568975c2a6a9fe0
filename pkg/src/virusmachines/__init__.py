"""Virus machine simulation, enumeration and normal-form analysis."""

from .analysis import (
    ClassificationReport,
    IngredientProfile,
    acyclic_host_bound,
    classify,
    ingredient_profile,
    longest_simple_cycle,
    prune_to_rooted_tree,
    reachable_instructions,
    tree_depth,
)
from .constructions import (
    SetSpec,
    build_arith,
    build_comb_a,
    build_comb_b,
    build_example,
    build_finite_one_host,
    build_finite_one_virus,
    build_finite_set,
    build_lin_fin,
    build_nat,
    build_singleton,
    build_union,
    predicted_set,
)
from .core import (
    ENV,
    HALT,
    Attachment,
    Channel,
    Configuration,
    InstructionEdge,
    InvalidMachineError,
    VirusMachine,
    initial_configuration,
    make_machine,
    validate_machine,
)
from .io import export_dot, parse_machine, serialize_machine
from .semantics import (
    ComputationTrace,
    ExplorationBounds,
    GeneratedSetReport,
    RandomPolicy,
    ScriptedPolicy,
    assert_trace,
    brute_force_oracle,
    enumerate_generated_set,
    run_trace,
    successors,
)

__version__ = "0.1.0"
