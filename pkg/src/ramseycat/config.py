from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

MIN_COLORS = 2
MAX_COLORS = 16


@dataclass(frozen=True)
class RunConfig:
    """Caps, search mode and seed shared by the verifier, the transfers and the CLI."""

    cap_hom: int = 32
    cap_colorings: int = 1 << 22
    cap_nodes: int = 10 ** 8
    mode: str = "exhaustive"
    seed: int = 0
    out: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        for name in ("cap_hom", "cap_colorings", "cap_nodes", "jobs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.mode not in ("exhaustive", "backtrack"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


DEFAULT_CONFIG = RunConfig()
