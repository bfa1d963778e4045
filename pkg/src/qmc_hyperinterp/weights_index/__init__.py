from .base import (
    cardinality_bound,
    digit_add,
    digit_sub,
    dumps_index_set,
    enumerate_box,
    enumerate_cross,
    loads_index_set,
    minkowski_difference,
    minkowski_double,
    mu1,
    r_korobov,
    r_walsh,
    zeta,
)
from .schemas import IndexSet, ProductWeights, Provenance

__all__ = [
    "IndexSet",
    "ProductWeights",
    "Provenance",
    "cardinality_bound",
    "digit_add",
    "digit_sub",
    "dumps_index_set",
    "enumerate_box",
    "enumerate_cross",
    "loads_index_set",
    "minkowski_difference",
    "minkowski_double",
    "mu1",
    "r_korobov",
    "r_walsh",
    "zeta",
]
