"""Burr distribution family: exact quantiles, tail expansions, extreme-value
classification, record-value simulation and record limit laws."""
from .distributions import (
    BURR_MEMBERS,
    PARAM_NAMES,
    MemberId,
    Params,
    cdf,
    pdf,
    quantile,
    sample,
    sf,
    support,
    tail_quantile,
)
from .evt import (
    DomainClass,
    Transform,
    aux_b,
    aux_functions,
    aux_s,
    classify,
    gev_cdf,
    hb_limit,
    mean_excess,
    probe_gamma,
)
from .exceptions import (
    BurrError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    ParameterError,
    StatisticError,
    UnsupportedMemberError,
)
from .expansions import (
    ExpansionResult,
    Frame,
    RemainderKind,
    RemainderOrder,
    exact_quantity,
    expand_quantile,
    fit_remainder_order,
    remainder,
    remainder_order,
    xi_constants,
)
from .records import (
    RecordDraw,
    extract_records,
    record_from_sum,
    record_path,
    replication_rng,
    simulate_record,
    simulate_records,
    stream_records,
)
from .asymptotics import (
    ExperimentReport,
    HypothesisTestResult,
    LawSpec,
    Variant,
    coupling_residual,
    ks_test,
    record_hypothesis_test,
    run_experiment,
    standardized_statistic,
    statistic_form,
    target_law,
)

__version__ = "0.1.0"
