"""Run configuration: one serializable object fed to every stage and
recorded verbatim in run manifests."""

from dataclasses import dataclass, field, asdict
from pathlib import Path

import yaml

from .gateway import GenerationConfig
from .summarize import SummarizerConfig


@dataclass
class RunConfig:
    train_path: str = ""
    test_path: str = ""
    out_dir: str = "runs/default"
    subset_size: int = 100
    subset_seed: int = 13
    variant: str = "C"
    bm25_k1: float = 1.2
    bm25_b: float = 0.75
    context_budget: int | None = None
    baseline_name: str = "CodeReviewer"
    baseline_bleu: float = 4.28
    generation: GenerationConfig = field(default_factory=GenerationConfig)
    summarizer: SummarizerConfig = field(default_factory=SummarizerConfig)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        gen = data.pop("generation", {}) or {}
        summ = data.pop("summarizer", {}) or {}
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(
            generation=GenerationConfig(**gen),
            summarizer=SummarizerConfig(**summ),
            **data,
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        return cls.from_dict(data)
