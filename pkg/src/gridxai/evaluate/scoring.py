"""Coefficient of determination."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError, UndefinedScoreError


def r2(y_true, y_pred) -> float:
    """1 - SS_res / SS_tot; undefined for a constant y_true."""
    yt = np.asarray(y_true, dtype=np.float64).reshape(-1)
    yp = np.asarray(y_pred, dtype=np.float64).reshape(-1)
    if yt.shape != yp.shape:
        raise InvalidInputError("y_true and y_pred lengths differ")
    if yt.size < 2:
        raise InvalidInputError("need at least 2 samples")
    if not (np.all(np.isfinite(yt)) and np.all(np.isfinite(yp))):
        raise InvalidInputError("non-finite values in scores input")
    ss_tot = float(np.sum((yt - yt.mean()) ** 2))
    if ss_tot == 0.0:
        raise UndefinedScoreError("R^2 undefined for constant y_true")
    ss_res = float(np.sum((yt - yp) ** 2))
    return 1.0 - ss_res / ss_tot
