import json
from pathlib import Path

import pytest

from reviewgen.corpus import ReviewRecord
from reviewgen.prompts import (
    CHAT_INSTRUCTION,
    PromptAssemblyError,
    PromptConfig,
    RecordMetadata,
    VARIANTS,
    build_exemplar_block,
    build_finetune_record,
    build_prompt,
    build_query_block,
    variant,
)
from reviewgen.tokens import count_tokens

GOLDEN_DIR = Path(__file__).parent / "fixtures" / "golden"

EX1 = ReviewRecord(
    id="ex-1", lang="python",
    old_file="def add(a, b):\n    return a + b\n",
    diff_text="@@ -1,2 +1,2 @@\n def add(a, b):\n-    return a + b\n+    return a + b + 1",
    reference_comment="Why is the result offset by one here?",
)
EX2 = ReviewRecord(
    id="ex-2", lang="go",
    old_file="func scale(v int) int {\n\treturn v * 2\n}\n",
    diff_text="@@ -2,1 +2,1 @@\n-\treturn v * 2\n+\treturn v * 4",
    reference_comment="Please make the scale factor a named constant.",
)
QUERY = ReviewRecord(
    id="q-1", lang="python",
    old_file="def mean(xs):\n    return sum(xs) / len(xs)\n",
    diff_text="@@ -2,1 +2,1 @@\n-    return sum(xs) / len(xs)\n+    return sum(xs) / max(len(xs), 1)",
    reference_comment="unused",
)
META = {
    "ex-1": RecordMetadata(call_graph="add ->",
                           summary="def add(a, b); identifiers: a, add, b, return"),
    "ex-2": RecordMetadata(call_graph="scale ->",
                           summary="func scale(v int) int; identifiers: int, return, scale, v"),
    "q-1": RecordMetadata(call_graph="mean -> sum, len",
                          summary="def mean(xs); identifiers: len, mean, return, sum, xs"),
}


def _bundle(tag, instruction_style=True, budget=None):
    return build_prompt(
        QUERY, [(EX1, META["ex-1"]), (EX2, META["ex-2"])], variant(tag),
        PromptConfig(instruction_style=instruction_style, shot_count=2,
                     context_budget=budget),
        test_metadata=META["q-1"],
    )


@pytest.mark.parametrize("tag", ["W", "C", "S", "CS"])
def test_variant_goldens_byte_identical(tag):
    golden = (GOLDEN_DIR / f"prompt_{tag}.txt").read_text()
    assert _bundle(tag).text == golden


def test_variant_lookup():
    assert variant("c").tag == "C"
    assert variant("C+S").tag == "CS"
    assert variant("cs") is VARIANTS["CS"]
    with pytest.raises(PromptAssemblyError):
        variant("X")


def test_section_structure():
    blk = build_exemplar_block(EX1, variant("CS"), META["ex-1"])
    labels = [l for l in blk.split("\n") if l.endswith(":") and " " not in l.split(":")[0]
              or l in ("Code Diff:", "Function Call Graph:", "Code Summary:", "Code Review:")]
    assert blk.index("Code Diff:") < blk.index("Function Call Graph:") \
        < blk.index("Code Summary:") < blk.index("Code Review:")
    assert blk.endswith(EX1.reference_comment)
    q = build_query_block(EX1, variant("W"), META["ex-1"])
    assert q.endswith("Code Review:")


def test_variant_section_presence():
    for tag, needs_graph, needs_summary in [
        ("W", False, False), ("C", True, False), ("S", False, True), ("CS", True, True),
    ]:
        text = _bundle(tag).text
        assert ("Function Call Graph:" in text) is needs_graph
        assert ("Code Summary:" in text) is needs_summary
        assert text.count("Code Diff:") == 3  # 2 exemplars + query
        assert text.endswith("Code Review:")


def test_missing_metadata_rejected():
    with pytest.raises(PromptAssemblyError, match="call graph"):
        build_exemplar_block(EX1, variant("C"), RecordMetadata(call_graph=None, summary="s"))
    with pytest.raises(PromptAssemblyError, match="summary"):
        build_exemplar_block(EX1, variant("S"), RecordMetadata(call_graph="g", summary=None))
    # variant W needs neither
    build_exemplar_block(EX1, variant("W"), RecordMetadata())


def test_instruction_only_for_chat_style():
    chat = _bundle("C", instruction_style=True)
    completion = _bundle("C", instruction_style=False)
    assert chat.text.startswith(CHAT_INSTRUCTION)
    assert CHAT_INSTRUCTION not in completion.text
    assert completion.text.startswith("Code Diff:")


def test_budget_drops_whole_tail_blocks():
    full = _bundle("CS")
    # a budget just under the full size must drop exactly the last block
    tight = _bundle("CS", budget=full.token_estimate - 1)
    assert tight.exemplar_blocks == full.exemplar_blocks[:1]
    assert tight.short
    assert tight.token_estimate <= full.token_estimate - 1
    # tiny budget: all exemplars dropped, query always kept
    minimal = _bundle("CS", budget=1)
    assert minimal.exemplar_blocks == ()
    assert minimal.query_block == full.query_block
    assert not full.short


def test_token_estimate_matches_text():
    for tag in VARIANTS:
        b = _bundle(tag)
        assert b.token_estimate == count_tokens(b.text)


def test_finetune_golden():
    rec = ReviewRecord(
        id="ft-1", lang="python",
        old_file=QUERY.old_file,
        diff_text=QUERY.diff_text,
        reference_comment="Guard against empty input before dividing.",
    )
    golden = json.loads((GOLDEN_DIR / "finetune.json").read_text())
    assert build_finetune_record(rec) == golden
