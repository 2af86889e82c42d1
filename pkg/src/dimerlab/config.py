"""Run bounds shared by the library pipeline and the command line."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, replace
from typing import Optional

from .contraction import DEFAULT_REWRITE_BOUND
from .monomial import DEFAULT_TRUNCATION
from .quiver import DimerQuiver

TRUNC_ENV = "DIMERLAB_TRUNC"


@dataclass(frozen=True)
class RunConfig:
    """Search bounds; ``None`` means "derive from the quiver size"."""
    truncation: int = DEFAULT_TRUNCATION
    cycle_bound: Optional[int] = None
    rewrite_bound: int = DEFAULT_REWRITE_BOUND
    path_bound: Optional[int] = None
    alias_path: Optional[str] = None
    output_path: Optional[str] = None

    def __post_init__(self):
        for name in ("truncation", "cycle_bound", "rewrite_bound", "path_bound"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        base = {}
        if os.environ.get(TRUNC_ENV):
            base["truncation"] = int(os.environ[TRUNC_ENV])
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    def resolved(self, q: DimerQuiver) -> "RunConfig":
        n = len(q.arrows)
        return replace(self,
                       cycle_bound=self.cycle_bound or 4 * n,
                       path_bound=self.path_bound or 2 * n)

    def bounds(self) -> dict:
        d = asdict(self)
        d.pop("alias_path")
        d.pop("output_path")
        return d
