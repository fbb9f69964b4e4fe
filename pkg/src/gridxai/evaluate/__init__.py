from .ablation import PROXIES, build_proxy, proxy_ablation
from .rfe import RFEStep, RFETrace, rfe
from .scoring import r2
from .search import (
    DEFAULT_SPACE,
    SearchResult,
    cross_val_score,
    random_search,
    sample_hyperparameters,
)
from .splits import GroupGapSplit, check_gap, split

__all__ = [
    "DEFAULT_SPACE",
    "PROXIES",
    "GroupGapSplit",
    "RFEStep",
    "RFETrace",
    "SearchResult",
    "build_proxy",
    "check_gap",
    "cross_val_score",
    "proxy_ablation",
    "r2",
    "random_search",
    "rfe",
    "sample_hyperparameters",
    "split",
]
