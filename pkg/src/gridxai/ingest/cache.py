"""On-disk series cache keyed by request hash.

Historical market data never changes, so entries have no TTL. Writes go
through a temp file + rename so concurrent readers never see partial
content.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Optional

from .series import RawSeries, SeriesRequest


class SeriesCache:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path(self, req: SeriesRequest) -> Path:
        return self.root / f"{req.cache_key()}.json"

    def get(self, req: SeriesRequest) -> Optional[RawSeries]:
        p = self.path(req)
        if not p.exists():
            return None
        series = RawSeries.from_json(p.read_text(encoding="utf-8"))
        series.source = "cache"
        return series

    def put(self, series: RawSeries) -> None:
        p = self.path(series.request)
        tmp = p.with_suffix(".tmp")
        tmp.write_text(series.to_json(), encoding="utf-8")
        os.replace(tmp, p)
