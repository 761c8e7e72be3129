"""Scaling paths of infinite-width two-layer ReLU interpolants.

Core objects: sphere grids and discrete conic measures, the entropic
unbalanced transport primitive with its debiased divergence, projected
solvers for the constrained/penalized path problems and the rich limit,
wide-network gradient descent with measure binning, the tangent-kernel
interpolation endpoint, and the alpha/beta sweep pipeline.
"""

from .experiment import (
    BUNDLED_DATASET,
    ComparisonRecord,
    SweepConfig,
    build_setup,
    compare,
    eval_surface,
    kernel_predictor,
    load_dataset,
    load_predictor,
    run_sweep,
    save_kernel_solution,
    save_solution,
    save_training_run,
    write_surface_csv,
)
from .grids import SphereGrid, fibonacci_s2, lift_p, lift_q
from .measures import (
    DiscreteMeasure,
    ParamAtom,
    pi2_project,
    scale_mass,
    total_variation,
    uniform_on,
)
from .ntk import (
    GramMatrix,
    InterpolationResult,
    eval_kernel_predictor,
    gram,
    solve_interpolation,
)
from .relu import Dataset, eval_network, feature_matrix, lift_inputs, phi_relu
from .solver import (
    DykstraConfig,
    FbsConfig,
    PathConfig,
    PathSolution,
    PolyhedronProjector,
    project_polyhedron,
    solve_penalized,
    solve_rich_limit,
    solve_scaling_path,
)
from .training import (
    GdConfig,
    ParamCloud,
    empirical_measure,
    init_from_grid,
    load_cloud,
    loss_and_grad,
    save_cloud,
    save_history,
    train,
)
from .uot import (
    CostMatrix,
    DivergenceResult,
    UotResult,
    cost_matrix,
    hk_bruteforce,
    hk_dirac_exact,
    hk_entropic,
    hk_gradient,
    self_potential,
    sinkhorn_divergence,
)

__version__ = "0.1.0"

__all__ = [
    "BUNDLED_DATASET",
    "ComparisonRecord",
    "CostMatrix",
    "Dataset",
    "DiscreteMeasure",
    "DivergenceResult",
    "DykstraConfig",
    "FbsConfig",
    "GdConfig",
    "GramMatrix",
    "InterpolationResult",
    "ParamAtom",
    "ParamCloud",
    "PathConfig",
    "PathSolution",
    "PolyhedronProjector",
    "SphereGrid",
    "SweepConfig",
    "UotResult",
    "build_setup",
    "compare",
    "cost_matrix",
    "empirical_measure",
    "eval_kernel_predictor",
    "eval_network",
    "eval_surface",
    "feature_matrix",
    "fibonacci_s2",
    "gram",
    "hk_bruteforce",
    "hk_dirac_exact",
    "hk_entropic",
    "hk_gradient",
    "init_from_grid",
    "kernel_predictor",
    "lift_inputs",
    "lift_p",
    "lift_q",
    "load_cloud",
    "load_dataset",
    "load_predictor",
    "loss_and_grad",
    "phi_relu",
    "pi2_project",
    "project_polyhedron",
    "run_sweep",
    "save_cloud",
    "save_history",
    "save_kernel_solution",
    "save_solution",
    "save_training_run",
    "scale_mass",
    "self_potential",
    "sinkhorn_divergence",
    "solve_interpolation",
    "solve_penalized",
    "solve_rich_limit",
    "solve_scaling_path",
    "total_variation",
    "train",
    "uniform_on",
    "write_surface_csv",
]
