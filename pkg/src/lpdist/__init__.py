"""Uniformity testing and learning of discrete distributions under lp metrics."""
from .bounds import (
    BoundReport,
    CurvePoint,
    Kind,
    PackingBound,
    coin_learning_lower_m,
    curve_points,
    fano_failure_lower_bound,
    identification_lower_m,
    identification_n_hat,
    learn_necessary_m,
    learn_sufficient_m,
    linf_test_necessary_m,
    packing_bound,
    packing_log_size,
    samples_entropy_bound,
    test_necessary_m,
    test_sufficient_m,
    testing_necessary_m,
)
from .core import (
    INF,
    AliasTable,
    DiscreteDistribution,
    SampleHistogram,
    SampleSource,
    conjugate,
    discretize,
    heavy_coordinate_dist,
    is_thin,
    lp_distance,
    lp_norm,
    make_uniform,
    mix64,
    paninski_member,
    random_paninski_member,
    read_distribution,
    read_histogram,
    sample,
    sparse_uniform_member,
    write_distribution,
    write_histogram,
)
from .harness import (
    Adversary,
    ExperimentConfig,
    ExperimentReport,
    Problem,
    emit_csv,
    estimate_failure_rate,
    verify_collision_moments,
)
from .learner import LearnParams, empirical_distribution, learn, learn_sample_size
from .testers import (
    LinfTestPlan,
    Outcome,
    Regime,
    TestParams,
    Verdict,
    alpha,
    collision_count,
    collision_test_m,
    collision_threshold,
    linf_test_m,
    majority_vote_plan,
    solve_nhat,
    test_uniformity,
    test_uniformity_collisions,
    test_uniformity_linf,
    test_uniformity_majority,
)

__version__ = "0.1.0"
