"""Asynchronous island-model memetic solver for the multi-objective QAP."""

from .archive import Archive, archive_merge
from .evaluation import (
    ObjectiveVector,
    Solution,
    apply_swap,
    evaluate_delta,
    evaluate_full,
    make_solution,
    swap_delta_matrix,
)
from .genetics import Rng, VariationParams, cycle_crossover, swap_mutation, tournament_select
from .instance import (
    Instance,
    InstanceSpec,
    generate_uniform,
    load_instance,
    parse_instance,
    save_instance,
    write_instance,
)
from .island import (
    IslandConfig,
    Topology,
    build_topology,
    check_migrants,
    run_fleet,
    run_memetic_island,
    run_nsga2_island,
)
from .localsearch import (
    LocalSearchParams,
    dominance_based_local_search,
    ordered_swap_neighborhood,
)
from .metrics import hypervolume, normalize_fronts, reference_point, wilcoxon_rank_sum
from .ranking import (
    compare_fitness_then_diversity,
    crowding_assign,
    dominance_depth_assign,
    dominates,
    elitist_integration,
)
from .runner import ExperimentConfig, enumerate_front, run_experiment

__version__ = "0.1.0"
