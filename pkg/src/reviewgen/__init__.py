"""Review-comment generation pipeline: diff metadata extraction, BM-25
few-shot prompting, LLM gateway, BLEU evaluation, and a rating study."""

__version__ = "0.1.0"
