"""Stage orchestration: each stage reads upstream artifacts, writes its
own artifact plus a manifest entry, and can be rerun independently."""

import hashlib
import json
import logging
from pathlib import Path

from . import callgraph, corpus, gateway, prompts, retrieval, summarize
from .config import RunConfig
from .evaluation import BleuConfig, corpus_report, render_table
from .gateway import GenerationConfig
from .prompts import PromptBundle, PromptConfig, RecordMetadata

log = logging.getLogger(__name__)


class StageError(RuntimeError):
    pass


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


class Runner:
    def __init__(self, config: RunConfig):
        self.config = config
        self.out = Path(config.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.out / "manifest.json"

    # -- manifest ------------------------------------------------------

    def _record_stage(self, stage: str, outputs: list[Path], extra: dict | None = None):
        manifest = {}
        if self.manifest_path.exists():
            manifest = json.loads(self.manifest_path.read_text())
        manifest.setdefault("config", self.config.to_dict())
        manifest.setdefault("stages", {})[stage] = {
            "outputs": {str(p.relative_to(self.out)): _sha256_file(p) for p in outputs},
            **(extra or {}),
        }
        self.manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))

    def _require(self, path: Path, producing_stage: str) -> Path:
        if not path.exists():
            raise StageError(f"missing artifact {path.name}: run {producing_stage} first")
        return path

    # -- stages --------------------------------------------------------

    def ingest(self) -> dict:
        counts = {}
        for split, src in (("train", self.config.train_path), ("test", self.config.test_path)):
            if not src:
                continue
            loaded = corpus.load_split(src, split)
            dest = self.out / f"{split}.jsonl"
            corpus.write_split(dest, loaded.records)
            corpus.write_rejects(src, loaded.rejects)
            counts[split] = {"accepted": len(loaded.records), "rejected": len(loaded.rejects)}
            log.info("%s: %d records, %d rejects", split, len(loaded.records), len(loaded.rejects))
        self._record_stage("ingest", [self.out / f"{s}.jsonl" for s in counts], counts)
        return counts

    def _load(self, name: str, producing_stage: str) -> list[corpus.ReviewRecord]:
        path = self._require(self.out / name, producing_stage)
        return list(corpus.load_split(path).records)

    def subset(self) -> list[corpus.ReviewRecord]:
        records = self._load("test.jsonl", "ingest")
        spec = corpus.SubsetSpec("test", min(self.config.subset_size, len(records)),
                                 self.config.subset_seed)
        chosen = corpus.sample_subset(records, spec)
        dest = self.out / "subset.jsonl"
        corpus.write_split(dest, chosen)
        self._record_stage("subset", [dest], {"size": len(chosen), "seed": spec.seed})
        return chosen

    def metadata(self) -> dict[str, dict]:
        records = self._load("subset.jsonl", "subset")
        rows = {}
        for record in records:
            graph = callgraph.extract_call_graph(record.lang, record.old_file)
            rows[record.id] = {
                "id": record.id,
                "call_graph": callgraph.render_call_graph(graph),
                "summary": summarize.summarize_record(record, self.config.summarizer),
                "graph_size": len(graph.defined),
            }
        dest = self.out / "metadata.jsonl"
        with open(dest, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(rows[record.id], ensure_ascii=False) + "\n")
        self._record_stage("metadata", [dest])
        return rows

    def retrieve(self) -> dict[str, list]:
        train = self._load("train.jsonl", "ingest")
        subset = self._load("subset.jsonl", "subset")
        index = retrieval.build_or_load(
            train, cache_dir=self.out / "cache",
            k1=self.config.bm25_k1, b=self.config.bm25_b,
        )
        k = self.config.generation.shot_count
        rows = {}
        for record in subset:
            rows[record.id] = retrieval.top_k(index, record, k)
        dest = self.out / "retrievals.jsonl"
        with open(dest, "w", encoding="utf-8") as fh:
            for record in subset:
                fh.write(json.dumps({"id": record.id, "exemplars": rows[record.id]}) + "\n")
        self._record_stage("retrieve", [dest], {"k": k})
        return rows

    def _train_metadata(self, record: corpus.ReviewRecord, var) -> RecordMetadata:
        graph = None
        summary = None
        if var.include_callgraph:
            graph = callgraph.render_call_graph(
                callgraph.extract_call_graph(record.lang, record.old_file)
            )
        if var.include_summary:
            summary = summarize.summarize_record(record, self.config.summarizer)
        return RecordMetadata(call_graph=graph, summary=summary)

    def prompt(self) -> list[PromptBundle]:
        train = {r.id: r for r in self._load("train.jsonl", "ingest")}
        subset = self._load("subset.jsonl", "subset")
        retr_path = self._require(self.out / "retrievals.jsonl", "retrieve")
        meta_path = self._require(self.out / "metadata.jsonl", "metadata")
        retrievals = {row["id"]: row["exemplars"]
                      for row in map(json.loads, open(retr_path, encoding="utf-8"))}
        metadata = {row["id"]: row
                    for row in map(json.loads, open(meta_path, encoding="utf-8"))}

        var = prompts.variant(self.config.variant)
        pconfig = PromptConfig(
            instruction_style=self.config.generation.provider_profile == gateway.CHAT_PROFILE,
            shot_count=self.config.generation.shot_count,
            context_budget=self.config.context_budget,
        )
        bundles = []
        for record in subset:
            exemplars = []
            for ex_id, _score in retrievals.get(record.id, []):
                ex_record = train[ex_id]
                exemplars.append((ex_record, self._train_metadata(ex_record, var)))
            meta = metadata.get(record.id, {})
            test_meta = RecordMetadata(
                call_graph=meta.get("call_graph", ""), summary=meta.get("summary", "")
            )
            bundles.append(
                prompts.build_prompt(record, exemplars, var, pconfig, test_metadata=test_meta)
            )
        dest = self.out / "prompts.jsonl"
        with open(dest, "w", encoding="utf-8") as fh:
            for b in bundles:
                fh.write(json.dumps({
                    "record_id": b.record_id,
                    "variant": b.variant.tag,
                    "instruction": b.instruction,
                    "exemplar_blocks": list(b.exemplar_blocks),
                    "query_block": b.query_block,
                    "shot_count": b.shot_count,
                    "short": b.short,
                    "token_estimate": b.token_estimate,
                }, ensure_ascii=False) + "\n")
        self._record_stage("prompt", [dest], {"variant": var.tag})
        return bundles

    def load_bundles(self) -> list[PromptBundle]:
        path = self._require(self.out / "prompts.jsonl", "prompt")
        bundles = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                row = json.loads(line)
                bundles.append(PromptBundle(
                    record_id=row["record_id"],
                    variant=prompts.variant(row["variant"]),
                    instruction=row["instruction"],
                    exemplar_blocks=tuple(row["exemplar_blocks"]),
                    query_block=row["query_block"],
                    shot_count=row["shot_count"],
                    short=row["short"],
                    token_estimate=row["token_estimate"],
                ))
        return bundles

    def generate(self, provider=None, sleep=None) -> dict:
        bundles = self.load_bundles()
        gen_dir = self.out / "generation"
        kwargs = {}
        if provider is not None:
            kwargs["provider"] = provider
        if sleep is not None:
            kwargs["sleep"] = sleep
        manifest = gateway.run_batch(bundles, self.config.generation, gen_dir, **kwargs)
        self._record_stage("generate", [gen_dir / "results.jsonl"],
                           {"records": len(manifest["records"])})
        return manifest

    def evaluate(self) -> dict:
        self._require(self.out / "generation" / "results.jsonl", "generate")
        results = gateway.load_results(self.out / "generation")
        subset = self._load("subset.jsonl", "subset")
        references = {r.id: r.reference_comment for r in subset}
        report = corpus_report(results, references, BleuConfig())
        model_label = (
            f"{self.config.generation.provider_profile} ({self.config.variant})"
        )
        table = render_table(
            [(model_label, report.mean_bleu_x100)],
            (self.config.baseline_name, self.config.baseline_bleu),
        )
        report_json = {
            "mean_bleu_x100": report.mean_bleu_x100,
            "record_count": report.record_count,
            "skipped": sorted(report.skipped),
            "per_record": {
                rid: {"best_index": idx, "best_bleu": score}
                for rid, (idx, score) in sorted(report.per_record.items())
            },
        }
        (self.out / "report.json").write_text(json.dumps(report_json, indent=2, sort_keys=True))
        (self.out / "table.txt").write_text(table + "\n")
        self._record_stage("evaluate", [self.out / "report.json", self.out / "table.txt"])
        return report_json

    def export_finetune(self) -> Path:
        train = self._load("train.jsonl", "ingest")
        dest = self.out / "finetune.jsonl"
        with open(dest, "w", encoding="utf-8") as fh:
            for record in train:
                fh.write(json.dumps(prompts.build_finetune_record(record),
                                    ensure_ascii=False) + "\n")
        self._record_stage("export-finetune", [dest], {"records": len(train)})
        return dest

    def pipeline(self, provider=None, sleep=None) -> dict:
        self.ingest()
        self.subset()
        self.retrieve()
        self.metadata()
        self.prompt()
        self.generate(provider=provider, sleep=sleep)
        return self.evaluate()
