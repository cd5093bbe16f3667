"""Few-shot prompt assembly in four ablation variants, plus the
instruction-format export used for supervised fine-tuning."""

from dataclasses import dataclass, field

from .corpus import ReviewRecord
from .tokens import count_tokens

# Instruction used for chat-style models only; completion-style prompts
# carry no instruction section.
CHAT_INSTRUCTION = (
    "Please provide formal code review for software developers in one "
    "sentence for following test case, implementing few-shot learning from "
    "examples. Don't start with code review/review. Just give the answer."
)

# Fixed task description for the {instruction, input, output} export.
FINETUNE_INSTRUCTION = (
    "Below is a code diff from a pull request. Write a formal code review "
    "comment for the change, in one sentence, as a human reviewer would."
)


class PromptAssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class AblationVariant:
    tag: str
    include_callgraph: bool
    include_summary: bool


VARIANTS: dict[str, AblationVariant] = {
    "W": AblationVariant("W", False, False),
    "C": AblationVariant("C", True, False),
    "S": AblationVariant("S", False, True),
    "CS": AblationVariant("CS", True, True),
}


def variant(tag: str) -> AblationVariant:
    try:
        return VARIANTS[tag.upper().replace("+", "")]
    except KeyError:
        raise PromptAssemblyError(f"unknown ablation variant: {tag!r}") from None


@dataclass(frozen=True)
class RecordMetadata:
    call_graph: str | None = None
    summary: str | None = None


@dataclass(frozen=True)
class PromptConfig:
    instruction_style: bool = False  # chat-instruct models get the instruction
    shot_count: int = 5
    context_budget: int | None = None  # estimated tokens; None = unlimited


@dataclass(frozen=True)
class PromptBundle:
    record_id: str
    variant: AblationVariant
    instruction: str | None
    exemplar_blocks: tuple[str, ...]
    query_block: str
    shot_count: int
    short: bool  # retrieval returned fewer exemplars than requested
    token_estimate: int

    @property
    def text(self) -> str:
        parts = []
        if self.instruction:
            parts.append(self.instruction)
        parts.extend(self.exemplar_blocks)
        parts.append(self.query_block)
        return "\n\n".join(parts)


def _sections(record: ReviewRecord, var: AblationVariant, metadata: RecordMetadata,
              include_review: bool) -> str:
    parts = [f"Code Diff:\n{record.diff_text}"]
    if var.include_callgraph:
        if metadata.call_graph is None:
            raise PromptAssemblyError(f"record {record.id}: call graph required for variant {var.tag}")
        parts.append(f"Function Call Graph:\n{metadata.call_graph}")
    if var.include_summary:
        if metadata.summary is None:
            raise PromptAssemblyError(f"record {record.id}: summary required for variant {var.tag}")
        parts.append(f"Code Summary:\n{metadata.summary}")
    if include_review:
        parts.append(f"Code Review:\n{record.reference_comment}")
    else:
        parts.append("Code Review:")
    return "\n\n".join(parts)


def build_exemplar_block(record: ReviewRecord, var: AblationVariant,
                         metadata: RecordMetadata) -> str:
    """Labeled sections in fixed order, separated by single blank lines."""
    return _sections(record, var, metadata, include_review=True)


def build_query_block(record: ReviewRecord, var: AblationVariant,
                      metadata: RecordMetadata) -> str:
    """Like an exemplar but ending with a bare ``Code Review:`` tag."""
    return _sections(record, var, metadata, include_review=False)


def build_prompt(
    test_record: ReviewRecord,
    exemplars: list[tuple[ReviewRecord, RecordMetadata]],
    var: AblationVariant,
    config: PromptConfig,
    test_metadata: RecordMetadata | None = None,
) -> PromptBundle:
    """Assemble instruction + exemplars (most relevant first) + query.

    If the estimated prompt exceeds the context budget, whole exemplar
    blocks are dropped from the tail until it fits.
    """
    blocks = [build_exemplar_block(r, var, m) for r, m in exemplars]
    query = build_query_block(test_record, var, test_metadata or RecordMetadata("", ""))
    instruction = CHAT_INSTRUCTION if config.instruction_style else None

    def estimate(blks):
        text = "\n\n".join(([instruction] if instruction else []) + list(blks) + [query])
        return count_tokens(text)

    while config.context_budget is not None and blocks and estimate(blocks) > config.context_budget:
        blocks.pop()

    return PromptBundle(
        record_id=test_record.id,
        variant=var,
        instruction=instruction,
        exemplar_blocks=tuple(blocks),
        query_block=query,
        shot_count=config.shot_count,
        short=len(blocks) < config.shot_count,
        token_estimate=estimate(blocks),
    )


def build_finetune_record(record: ReviewRecord) -> dict:
    """{instruction, input, output} sample for supervised fine-tuning."""
    return {
        "instruction": FINETUNE_INSTRUCTION,
        "input": record.diff_text,
        "output": record.reference_comment,
    }
