"""数值核：模板函数近端算子与单纯形投影"""
from .prox import PairPoint, template_value, shrink, pair_prox, template_prox
from .simplex import Axis, WeightedSimplex, project_simplex, project_cylinder, penalty_prox

__all__ = [
    "PairPoint",
    "template_value",
    "shrink",
    "pair_prox",
    "template_prox",
    "Axis",
    "WeightedSimplex",
    "project_simplex",
    "project_cylinder",
    "penalty_prox",
]
