from .expectations import (
    Expectations,
    OracleResult,
    OrientationDistribution,
    Variant,
    aux_integrals,
    closed_expectations,
    cone_aux_closed,
    expectation_oracle,
    general_expectations,
)
from .predictors import (
    ElasticConstants,
    MaterialParams,
    Mode,
    constants_from_tensor,
    elastic_tensor_meso,
    macro_tensor,
    nu_interval,
    nu_limits,
    predict_cone,
    predict_general,
    predict_limit,
    stationary_gammas,
)

__all__ = [
    "ElasticConstants", "Expectations", "MaterialParams", "Mode", "OracleResult", "OrientationDistribution",
    "Variant", "aux_integrals", "closed_expectations", "cone_aux_closed", "constants_from_tensor",
    "elastic_tensor_meso", "expectation_oracle", "general_expectations", "macro_tensor", "nu_interval",
    "nu_limits", "predict_cone", "predict_general", "predict_limit", "stationary_gammas",
]
