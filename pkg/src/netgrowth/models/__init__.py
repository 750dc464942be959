from .baselines import (
    simulate_barabasi_albert,
    simulate_dorogovtsev,
    simulate_vazquez,
    simulate_vertex_copying,
)
from .closed_form import (
    invert_model_ii,
    model_ii_curve_params,
    predicted_avg_degree,
    predicted_avg_degree_model_i,
    predicted_edge_fractions,
    predicted_edge_fractions_model_ii,
    predicted_nz_fraction,
)
from .params import (
    BaselineParams,
    InvalidParameters,
    ModelIIParams,
    ModelIParams,
    load_params,
    params_from_dict,
)
from .simulate import simulate_model_i, simulate_model_ii

__all__ = [
    "BaselineParams",
    "InvalidParameters",
    "ModelIIParams",
    "ModelIParams",
    "invert_model_ii",
    "load_params",
    "model_ii_curve_params",
    "params_from_dict",
    "predicted_avg_degree",
    "predicted_avg_degree_model_i",
    "predicted_edge_fractions",
    "predicted_edge_fractions_model_ii",
    "predicted_nz_fraction",
    "simulate_barabasi_albert",
    "simulate_dorogovtsev",
    "simulate_model_i",
    "simulate_model_ii",
    "simulate_vazquez",
    "simulate_vertex_copying",
]
