"""In-file function call graph extraction and adjacency-list rendering.

Normalization applied to every edge: scope qualifiers stripped from
names, duplicate callees dropped, and callees not defined in the file
(library/external calls) removed entirely.
"""

import re
from dataclasses import dataclass, field

from . import syntax
from .languages import language_spec
from .syntax import SourceAnalysis, normalize_name  # re-exported convenience

MODULE_CALLER = "<module>"

_CALL_RE = re.compile(
    r"(?<![\w$.:>~])([A-Za-z_$][\w$]*(?:(?:::|->|\.)\s*[A-Za-z_$][\w$]*)*)\s*\("
)


@dataclass
class CallGraph:
    adjacency: dict[str, list[str]] = field(default_factory=dict)
    defined: set[str] = field(default_factory=set)


def iter_call_sites(analysis: SourceAnalysis):
    """Yield (offset, qualified_name) for every call expression."""
    spec = language_spec(analysis.lang)
    def_sites = {f.name_off for f in analysis.functions if f.name_off >= 0}
    for m in _CALL_RE.finditer(analysis.sanitized):
        if m.start(1) in def_sites:
            continue
        raw = re.sub(r"\s+", "", m.group(1))
        segments = re.split(r"::|->|\.", raw)
        if segments[-1] in spec.control_keywords or segments[0] in spec.control_keywords:
            continue
        yield m.start(1), raw


def _caller_of(analysis: SourceAnalysis, off: int) -> str:
    """Name of the innermost function containing offset, else <module>."""
    best = None
    for f in analysis.functions:
        if f.start_off <= off <= f.end_off:
            if best is None or (f.end_off - f.start_off) < (best.end_off - best.start_off):
                best = f
    return best.name if best is not None else MODULE_CALLER


def extract_call_graph(lang: str, source: str) -> CallGraph:
    analysis = syntax.analyze(lang, source)
    defined = {f.name for f in analysis.functions}
    adjacency: dict[str, list[str]] = {name: [] for name in sorted(defined)}
    module_edges: list[str] = []
    for off, raw in iter_call_sites(analysis):
        callee = normalize_name(raw, lang)
        if callee not in defined:
            continue  # external (library) call
        caller = _caller_of(analysis, off)
        target = module_edges if caller == MODULE_CALLER else adjacency[caller]
        if callee not in target:
            target.append(callee)
    graph = CallGraph(adjacency=adjacency, defined=set(defined))
    if module_edges:
        # top-level calls attach to a synthetic module node
        graph.adjacency[MODULE_CALLER] = module_edges
        graph.defined.add(MODULE_CALLER)
    return graph


def render_call_graph(graph: CallGraph) -> str:
    """One line per defined function: ``caller -> callee1, callee2``."""
    lines = []
    for caller in sorted(graph.defined):
        callees = graph.adjacency.get(caller, [])
        if callees:
            lines.append(f"{caller} -> {', '.join(callees)}")
        else:
            lines.append(f"{caller} ->")
    return "\n".join(lines)
