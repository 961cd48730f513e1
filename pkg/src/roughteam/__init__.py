"""Rough-set rule induction and classifier comparison for team-composition models."""

__version__ = "0.1.0"

from .table import (
    STUDY_SCHEMA,
    Attribute,
    AttributeSchema,
    CandidateProfile,
    DecisionTable,
    TableError,
    class_counts,
    decode_profile,
    encode_profile,
    get_schema,
    load_profiles,
    load_table,
    write_table,
)
from .roughset import (
    DiscernibilityMatrix,
    GAParams,
    Partition,
    Reduct,
    approximations,
    discernibility_matrix,
    exhaustive_reducts,
    ga_reducts,
    indiscernibility,
    induce_rules,
    johnson_reduct,
    object_discernibility,
)
from .rules import (
    DecisionRule,
    RuleModel,
    Verdict,
    classify,
    embedded_model,
    lhs_coverage,
    match,
    read_model,
    resolve_final_decision,
    rhs_coverage,
    write_model,
)
from .evaluation import (
    ConfusionMatrix,
    EvalReport,
    TechniqueCandidate,
    cross_validate,
    kfold_split,
    metrics,
    select_technique,
)
