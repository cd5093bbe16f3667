"""Command-line entry points for the review-comment generation pipeline."""

import json
import logging
import sys

import click

from . import callgraph as callgraph_mod
from . import corpus
from .config import RunConfig
from .evaluation import wilcoxon_signed_rank
from .pipeline import Runner, StageError

log = logging.getLogger(__name__)


def _load_config(config_path, **overrides) -> RunConfig:
    cfg = RunConfig.from_file(config_path) if config_path else RunConfig()
    gen = cfg.generation
    gen_overrides = {}
    for key in ("n", "temperature", "shot_count", "provider_profile"):
        if overrides.get(key) is not None:
            gen_overrides[key] = overrides[key]
    if gen_overrides:
        from dataclasses import replace
        cfg.generation = replace(gen, **gen_overrides)
    for key in ("variant", "out_dir", "subset_seed"):
        if overrides.get(key) is not None:
            setattr(cfg, key, overrides[key])
    return cfg


def _common(fn):
    fn = click.option("--config", "config_path", type=click.Path(exists=True),
                      help="YAML run-config file.")(fn)
    fn = click.option("--variant", type=click.Choice(["W", "C", "S", "CS"]), default=None)(fn)
    fn = click.option("--k", "shot_count", type=int, default=None, help="Few-shot count.")(fn)
    fn = click.option("--n", type=int, default=None, help="Candidates per record.")(fn)
    fn = click.option("--temperature", type=float, default=None)(fn)
    fn = click.option("--provider", "provider_profile",
                      type=click.Choice(["mock", "chat-instruct", "completion"]), default=None)(fn)
    fn = click.option("--seed", "subset_seed", type=int, default=None)(fn)
    fn = click.option("--out", "out_dir", type=click.Path(), default=None)(fn)
    return fn


@click.group()
def main():
    """Review-comment generation pipeline."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


def _run(stage_name, config_path, **overrides):
    cfg = _load_config(config_path, **overrides)
    runner = Runner(cfg)
    try:
        return getattr(runner, stage_name)()
    except StageError as exc:
        raise click.ClickException(str(exc))


for _stage, _cmd in [
    ("ingest", "ingest"),
    ("subset", "subset"),
    ("metadata", "summarize"),
    ("retrieve", "retrieve"),
    ("prompt", "prompt"),
    ("generate", "generate"),
    ("evaluate", "evaluate"),
    ("export_finetune", "export-finetune"),
    ("pipeline", "pipeline"),
]:
    def _make(stage):
        @_common
        def cmd(config_path, **overrides):
            result = _run(stage, config_path, **overrides)
            if isinstance(result, dict):
                click.echo(json.dumps(result, indent=2, sort_keys=True, default=str))
        cmd.__name__ = stage
        return cmd
    main.command(name=_cmd)(_make(_stage))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.argument("old_file", type=click.Path(exists=True))
@click.option("--lang", required=True,
              type=click.Choice(sorted(corpus.LANGUAGES)))
def callgraph(config_path, old_file, lang):
    """Print the rendered call graph for one source file."""
    source = open(old_file, encoding="utf-8").read()
    graph = callgraph_mod.extract_call_graph(lang, source)
    click.echo(callgraph_mod.render_call_graph(graph))


@main.command()
@click.argument("scores_a", type=click.Path(exists=True))
@click.argument("scores_b", type=click.Path(exists=True))
def wilcoxon(scores_a, scores_b):
    """Compare two per-record score files (JSON {id: score}) pairwise."""
    a = json.loads(open(scores_a, encoding="utf-8").read())
    b = json.loads(open(scores_b, encoding="utf-8").read())
    shared = sorted(set(a) & set(b))
    if not shared:
        raise click.ClickException("no shared record ids between score files")
    w, p = wilcoxon_signed_rank([a[i] for i in shared], [b[i] for i in shared])
    click.echo(json.dumps({"n": len(shared), "W": w, "p_value": p}))


@main.group()
def study():
    """Human-evaluation study service."""


@study.command()
@click.option("--items", "items_path", type=click.Path(exists=True), required=True,
              help="JSON file of study items.")
@click.option("--tokens", "tokens_path", type=click.Path(exists=True), required=True,
              help="Text file of participant tokens, one per line.")
@click.option("--admin-token", envvar="REVIEWGEN_ADMIN_TOKEN", required=True)
@click.option("--state", "state_path", type=click.Path(), default="study-state.json")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(items_path, tokens_path, admin_token, state_path, host, port):
    """Run the study backend."""
    import uvicorn

    from .study import StudyItem, StudyStore, create_app

    raw_items = json.loads(open(items_path, encoding="utf-8").read())
    items = [StudyItem(
        item_id=it["item_id"],
        diff_lines=tuple(it["diff_lines"]),
        region=it.get("region", ""),
        summary=it.get("summary", ""),
        ground_truth=it["ground_truth"],
        model_outputs=it["model_outputs"],
        key_map=it["key_map"],
    ) for it in raw_items]
    tokens = [t.strip() for t in open(tokens_path, encoding="utf-8") if t.strip()]
    store = StudyStore(items, tokens, admin_token, path=state_path)
    uvicorn.run(create_app(store), host=host, port=port)


@study.command()
@click.option("--url", required=True, help="Base URL of a running study service.")
@click.option("--admin-token", envvar="REVIEWGEN_ADMIN_TOKEN", required=True)
def report(url, admin_token):
    """Fetch the aggregate study report."""
    import httpx

    resp = httpx.get(f"{url}/api/report", params={"admin_token": admin_token})
    if resp.status_code != 200:
        raise click.ClickException(f"report failed: {resp.status_code} {resp.text}")
    click.echo(json.dumps(resp.json(), indent=2))


if __name__ == "__main__":
    sys.exit(main())
