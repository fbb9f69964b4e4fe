"""Kernel backend selection.

The hot loops (histogram accumulation, tree traversal, SHAP recursion)
exist twice: a compiled Cython extension and a pure-Python/NumPy twin
with identical semantics. The compiled one is preferred when importable;
set GRIDXAI_PURE_PYTHON=1 to force the fallback.
"""

import os

from . import _core_py

pure = _core_py

_impl = None
if os.environ.get("GRIDXAI_PURE_PYTHON", "").lower() not in {"1", "true", "yes"}:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = None
    if _impl is not None and not hasattr(_impl, "tree_shap_batch"):
        _impl = None
if _impl is None:
    _impl = _core_py

compiled = _impl if _impl is not _core_py else None

BACKEND = _impl.BACKEND
node_histograms = _impl.node_histograms
predict_tree = _impl.predict_tree
tree_shap_batch = _impl.tree_shap_batch
