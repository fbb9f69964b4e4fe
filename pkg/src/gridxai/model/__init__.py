from .booster import Ensemble, Hyperparameters, coerce_matrix, fit
from .serialize import from_dict, from_json, load, save, to_dict, to_json
from .trees import TreeArrays, make_leaf_tree, make_stump

__all__ = [
    "Ensemble",
    "Hyperparameters",
    "TreeArrays",
    "coerce_matrix",
    "fit",
    "from_dict",
    "from_json",
    "load",
    "make_leaf_tree",
    "make_stump",
    "save",
    "to_dict",
    "to_json",
]
