"""gridxai: explainable boosted-tree analytics for grid congestion volumes.

Pipeline: ingest day-ahead market/grid series and intervention records,
build an hourly redispatch-volume target plus feature matrix, train
gradient-boosted regression trees, and explain them with exact SHAP
values, importances, dependence data and pairwise interactions.
"""

from ._kernels import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = ["kernel_backend", "__version__"]
