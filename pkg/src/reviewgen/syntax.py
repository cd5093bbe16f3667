"""Lightweight, error-tolerant source analysis for nine languages.

Parsing is heuristic but grammar-shaped: comments and string contents
are blanked first (preserving offsets and newlines), then per-family
finders locate function and class definitions. Malformed regions simply
contribute no definitions instead of failing the parse.
"""

import bisect
import re
from dataclasses import dataclass, field

from .languages import LanguageSpec, language_spec

ANON = "<anon>"


@dataclass(frozen=True)
class FunctionSpan:
    """A function definition localized to 1-based inclusive old-file lines."""

    name: str
    start_line: int
    end_line: int
    body: str


@dataclass
class SyntaxNodeRef:
    kind: str
    start_line: int
    end_line: int
    children: list = field(default_factory=list)


@dataclass(frozen=True)
class FunctionInfo:
    raw_name: str  # qualified text as written (e.g. Foo::bar, self.update)
    name: str  # normalized bare name
    start_line: int
    end_line: int
    start_off: int
    end_off: int
    name_off: int  # offset of raw_name in source; -1 for anonymous


@dataclass(frozen=True)
class ClassInfo:
    name: str
    start_line: int
    end_line: int


@dataclass
class SourceAnalysis:
    lang: str
    source: str
    sanitized: str
    functions: list[FunctionInfo]
    classes: list[ClassInfo]
    line_starts: list[int]

    def line_of(self, off: int) -> int:
        return bisect.bisect_right(self.line_starts, off)


def normalize_name(raw: str, lang: str) -> str:
    """Bare function name: text after the final scope separator."""
    spec = language_spec(lang)
    name = raw.strip()
    for sep in sorted(spec.scope_separators, key=len, reverse=True):
        name = name.split(sep)[-1] if sep in name else name
    return name.strip()


# ---------------------------------------------------------------------------
# sanitizer


def sanitize(source: str, spec: LanguageSpec) -> str:
    """Blank comments and string contents, preserving length and newlines."""
    out = list(source)
    n = len(source)
    i = 0

    def blank(a: int, b: int) -> None:
        for k in range(a, min(b, n)):
            if out[k] != "\n":
                out[k] = " "

    at_line_start = True
    while i < n:
        ch = source[i]
        if ch == "\n":
            at_line_start = True
            i += 1
            continue

        # block comments (ruby's =begin/=end only at line start)
        matched = False
        for open_tok, close_tok in spec.block_comments:
            if source.startswith(open_tok, i):
                if open_tok.startswith("=") and not at_line_start:
                    continue
                end = source.find(close_tok, i + len(open_tok))
                end = n if end == -1 else end + len(close_tok)
                blank(i, end)
                i = end
                matched = True
                break
        if matched:
            at_line_start = False
            continue

        for tok in spec.line_comments:
            if source.startswith(tok, i):
                end = source.find("\n", i)
                end = n if end == -1 else end
                blank(i, end)
                i = end
                matched = True
                break
        if matched:
            continue

        if spec.triple_quotes and source[i : i + 3] in ('"""', "'''"):
            q = source[i : i + 3]
            end = source.find(q, i + 3)
            end = n if end == -1 else end + 3
            blank(i, end)
            i = end
            at_line_start = False
            continue

        if ch in spec.quotes or (spec.raw_backtick and ch == "`"):
            raw = ch == "`"
            j = i + 1
            while j < n:
                if not raw and source[j] == "\\":
                    j += 2
                    continue
                if source[j] == ch:
                    j += 1
                    break
                j += 1
            blank(i, j)
            i = j
            at_line_start = False
            continue

        if not ch.isspace():
            at_line_start = False
        i += 1
    return "".join(out)


# ---------------------------------------------------------------------------
# brace-language finder


def _brace_pairs(text: str) -> list[tuple[int, int]]:
    pairs = []
    stack = []
    for i, ch in enumerate(text):
        if ch == "{":
            stack.append(i)
        elif ch == "}":
            if stack:
                pairs.append((stack.pop(), i))
    # unterminated blocks extend to EOF
    for leftover in stack:
        pairs.append((leftover, len(text) - 1))
    pairs.sort()
    return pairs


def _preamble_start(text: str, open_off: int) -> int:
    depth = 0
    i = open_off - 1
    while i >= 0:
        ch = text[i]
        if ch == ")":
            depth += 1
        elif ch == "(":
            depth -= 1
        elif depth <= 0 and ch in ";{}":
            return i + 1
        elif depth <= 0 and ch == "\n":
            # a blank line also ends the signature preamble
            j = i - 1
            while j >= 0 and text[j] in " \t\r":
                j -= 1
            if j < 0 or text[j] == "\n":
                return i + 1
        i -= 1
    return 0


def _strip_paren_groups(text: str) -> str:
    out = []
    depth = 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        elif depth == 0:
            out.append(ch)
    return "".join(out)


_ASSIGN_RE = re.compile(r"(?<![=<>!+\-*/&|^%])=(?![=>])")


def _has_toplevel_assign(pre: str) -> bool:
    return bool(_ASSIGN_RE.search(_strip_paren_groups(pre)))


_CLASS_RE = re.compile(
    r"\b(?:class|struct|interface|trait|enum|namespace|module)\s+([A-Za-z_]\w*)[^(){};=]*$"
)

_CF_NAME = re.compile(r"(~?[A-Za-z_]\w*(?:\s*::\s*~?[A-Za-z_]\w*)*)\s*\(")
_CPP_LAMBDA = re.compile(
    r"\[[^\[\]]*\]\s*(?:\([^()]*\))?\s*(?:mutable\b|noexcept\b|->[\w:<>\s&*]+)?\s*$"
)
_GO_FUNC = re.compile(r"\bfunc\b")
_GO_NAME = re.compile(r"\s*(?:\([^)]*\)\s*)?([A-Za-z_]\w*)\s*\(")
_FUNC_KW = re.compile(
    r"(?:([A-Za-z_$][\w$]*)\s*[:=]\s*)?(?:async\s+)?"
    r"function\s*\*?\s*&?\s*([A-Za-z_$][\w$]*)?\s*"
    r"\([^()]*(?:\([^()]*\)[^()]*)*\)\s*(?:use\s*\([^()]*\)\s*)?"
    r"(?::\s*\??[\w\\\[\]| ]+\s*)?$"
)
_ARROW_NAME = re.compile(
    r"([A-Za-z_$][\w$]*)\s*[:=]\s*(?:async\s*)?(?:\([^()]*\)|[A-Za-z_$][\w$]*)\s*=>\s*$"
)
_METHOD_SHORTHAND = re.compile(
    r"^\s*(?:@\w+\s+)*(?:(?:public|private|protected|static|async|get|set|final|abstract|override)\s+)*"
    r"\*?\s*([A-Za-z_$][\w$]*)\s*\([^{};]*\)\s*$"
)


def _classify_preamble(spec: LanguageSpec, pre: str):
    """Return (raw_name or ANON, name offset in pre) for a function brace."""
    if spec.name == "go":
        m = _GO_FUNC.search(pre)
        if not m:
            return None
        nm = _GO_NAME.match(pre, m.end())
        if nm:
            return nm.group(1), nm.start(1)
        return ANON, -1

    if spec.name in ("javascript", "php"):
        m = _FUNC_KW.search(pre)
        if m:
            if m.group(2):
                return m.group(2), m.start(2)
            if m.group(1):
                return m.group(1), m.start(1)
            return ANON, -1
        if spec.name == "javascript" and pre.rstrip().endswith("=>"):
            m = _ARROW_NAME.search(pre)
            if m:
                return m.group(1), m.start(1)
            return ANON, -1
        if spec.name == "javascript":
            m = _METHOD_SHORTHAND.match(pre)
            if m and m.group(1) not in spec.control_keywords:
                return m.group(1), m.start(1)
        return None

    # c, cpp, csharp, java
    if "(" not in pre:
        return None
    m = _CF_NAME.search(pre)
    if not m:
        if spec.name == "cpp" and _CPP_LAMBDA.search(pre):
            return ANON, -1
        return None
    raw = re.sub(r"\s+", "", m.group(1))
    segments = re.split(r"::", raw)
    if segments[-1].lstrip("~") in spec.control_keywords:
        return None
    if segments[0].lstrip("~") in spec.control_keywords:
        return None
    before = pre[: m.start()]
    if re.search(r"\bnew\s*$", before):
        return None  # anonymous-class instantiation, not a definition
    if _has_toplevel_assign(before):
        return None  # initializer block, not a definition
    return raw, m.start(1)


def _find_brace_definitions(spec, source, sanitized, line_starts):
    functions: list[FunctionInfo] = []
    classes: list[ClassInfo] = []
    for open_off, close_off in _brace_pairs(sanitized):
        pre_start = _preamble_start(sanitized, open_off)
        pre = sanitized[pre_start:open_off]
        cm = _CLASS_RE.search(pre)
        if cm and "(" not in pre:
            start_line = _line_at(line_starts, pre_start + cm.start())
            classes.append(ClassInfo(cm.group(1), start_line, _line_at(line_starts, close_off)))
            continue
        hit = _classify_preamble(spec, pre)
        if hit is None:
            continue
        raw_name, name_pos = hit
        first_sig = pre_start + len(pre) - len(pre.lstrip())
        start_line = _line_at(line_starts, first_sig)
        end_line = _line_at(line_starts, close_off)
        if raw_name == ANON:
            name = f"<anon@{start_line}>"
            raw_name = name
            name_off = -1
        else:
            name = normalize_name(raw_name, spec.name)
            name_off = pre_start + name_pos
        functions.append(
            FunctionInfo(raw_name, name, start_line, end_line, first_sig, close_off, name_off)
        )
    return functions, classes


def _line_at(line_starts: list[int], off: int) -> int:
    return bisect.bisect_right(line_starts, off)


# ---------------------------------------------------------------------------
# indentation-language finder (python)

_PY_DEF = re.compile(r"^([ \t]*)(?:async[ \t]+)?def[ \t]+([A-Za-z_]\w*)[ \t]*\(")
_PY_CLASS = re.compile(r"^([ \t]*)class[ \t]+([A-Za-z_]\w*)")


def _indent_width(ws: str) -> int:
    return sum(8 if c == "\t" else 1 for c in ws)


def _py_block_end(lines: list[str], start_idx: int, indent: int) -> int:
    """Index of the last line belonging to a block opened at start_idx."""
    # consume a multi-line header: parens must balance before the body starts
    depth = 0
    header_end = start_idx
    for k in range(start_idx, len(lines)):
        depth += lines[k].count("(") - lines[k].count(")")
        depth += lines[k].count("[") - lines[k].count("]")
        header_end = k
        if depth <= 0:
            break
    end = header_end
    for k in range(header_end + 1, len(lines)):
        if not lines[k].strip():
            continue
        if _indent_width(lines[k][: len(lines[k]) - len(lines[k].lstrip())]) <= indent:
            break
        end = k
    return end


def _find_indent_definitions(spec, source, sanitized, line_starts):
    functions: list[FunctionInfo] = []
    classes: list[ClassInfo] = []
    lines = sanitized.split("\n")
    for idx, line in enumerate(lines):
        dm = _PY_DEF.match(line)
        if dm:
            indent = _indent_width(dm.group(1))
            end_idx = _py_block_end(lines, idx, indent)
            end_off = (
                line_starts[end_idx + 1] - 1 if end_idx + 1 < len(line_starts) else len(sanitized)
            )
            functions.append(
                FunctionInfo(
                    raw_name=dm.group(2),
                    name=dm.group(2),
                    start_line=idx + 1,
                    end_line=end_idx + 1,
                    start_off=line_starts[idx],
                    end_off=end_off,
                    name_off=line_starts[idx] + dm.start(2),
                )
            )
            continue
        cm = _PY_CLASS.match(line)
        if cm:
            indent = _indent_width(cm.group(1))
            end_idx = _py_block_end(lines, idx, indent)
            classes.append(ClassInfo(cm.group(2), idx + 1, end_idx + 1))
    return functions, classes


# ---------------------------------------------------------------------------
# keyword-end finder (ruby)

_RB_DEF = re.compile(r"^\s*def\s+((?:self\s*\.\s*)?[A-Za-z_][\w.:]*[?!]?)")
_RB_ENDLESS = re.compile(r"^\s*def\s+[\w.?!]+(?:\([^()]*\))?\s*=")
_RB_OPENER = re.compile(r"^\s*(class|module|if|unless|while|until|for|begin|case)\b")
_RB_CLASS = re.compile(r"^\s*(?:class|module)\s+([A-Za-z_][\w:]*)")
_RB_DO = re.compile(r"\bdo(?:\s*\|[^|]*\|)?\s*$")
_RB_END = re.compile(r"^\s*end\b")
_RB_ONELINE_END = re.compile(r";\s*end\s*$|\bend\s*$")


def _find_keyword_end_definitions(spec, source, sanitized, line_starts):
    functions: list[FunctionInfo] = []
    classes: list[ClassInfo] = []
    lines = sanitized.split("\n")
    stack: list[tuple[str, str, int, int]] = []  # kind, name, line_idx, name_off
    for idx, line in enumerate(lines):
        if _RB_END.match(line):
            if stack:
                kind, name, start_idx, name_off = stack.pop()
                if kind == "def":
                    end_off = (
                        line_starts[idx + 1] - 1
                        if idx + 1 < len(line_starts)
                        else len(sanitized)
                    )
                    functions.append(
                        FunctionInfo(
                            raw_name=name,
                            name=normalize_name(name, "ruby"),
                            start_line=start_idx + 1,
                            end_line=idx + 1,
                            start_off=line_starts[start_idx],
                            end_off=end_off,
                            name_off=name_off,
                        )
                    )
                elif kind == "class":
                    classes.append(ClassInfo(name, start_idx + 1, idx + 1))
            continue
        dm = _RB_DEF.match(line)
        if dm:
            name = re.sub(r"\s+", "", dm.group(1))
            name_off = line_starts[idx] + dm.start(1)
            if _RB_ENDLESS.match(line) or _RB_ONELINE_END.search(line):
                eol = line_starts[idx + 1] - 1 if idx + 1 < len(line_starts) else len(sanitized)
                functions.append(
                    FunctionInfo(name, normalize_name(name, "ruby"), idx + 1, idx + 1,
                                 line_starts[idx], eol, name_off)
                )
            else:
                stack.append(("def", name, idx, name_off))
            continue
        om = _RB_OPENER.match(line)
        if om:
            if om.group(1) in ("class", "module"):
                cm = _RB_CLASS.match(line)
                stack.append(("class", cm.group(1) if cm else "?", idx, -1))
            elif not _RB_ONELINE_END.search(line):
                stack.append(("block", "", idx, -1))
            continue
        if _RB_DO.search(line):
            stack.append(("block", "", idx, -1))
    # unterminated defs extend to EOF
    while stack:
        kind, name, start_idx, name_off = stack.pop()
        if kind == "def":
            functions.append(
                FunctionInfo(name, normalize_name(name, "ruby"), start_idx + 1, len(lines),
                             line_starts[start_idx], len(sanitized), name_off)
            )
        elif kind == "class":
            classes.append(ClassInfo(name, start_idx + 1, len(lines)))
    functions.sort(key=lambda f: f.start_off)
    classes.sort(key=lambda c: c.start_line)
    return functions, classes


# ---------------------------------------------------------------------------
# public API


def analyze(lang: str, source: str) -> SourceAnalysis:
    spec = language_spec(lang)
    sanitized = sanitize(source, spec)
    line_starts = [0]
    for i, ch in enumerate(sanitized):
        if ch == "\n":
            line_starts.append(i + 1)
    if spec.family == "brace":
        functions, classes = _find_brace_definitions(spec, source, sanitized, line_starts)
    elif spec.family == "indent":
        functions, classes = _find_indent_definitions(spec, source, sanitized, line_starts)
    else:
        functions, classes = _find_keyword_end_definitions(spec, source, sanitized, line_starts)
    functions.sort(key=lambda f: (f.start_off, -(f.end_off)))
    return SourceAnalysis(lang, source, sanitized, functions, classes, line_starts)


def parse_source(lang: str, source: str) -> SyntaxNodeRef:
    """Root node covering the whole file, with nested definition nodes."""
    analysis = analyze(lang, source)
    n_lines = source.count("\n") + 1 if source else 1
    root = SyntaxNodeRef("source_file", 1, n_lines, [])
    nodes = [
        SyntaxNodeRef("class_definition", c.start_line, c.end_line, []) for c in analysis.classes
    ] + [
        SyntaxNodeRef("function_definition", f.start_line, f.end_line, [])
        for f in analysis.functions
    ]
    nodes.sort(key=lambda nd: (nd.start_line, -nd.end_line))
    open_stack = [root]
    for node in nodes:
        while (
            len(open_stack) > 1
            and not (
                open_stack[-1].start_line <= node.start_line
                and node.end_line <= open_stack[-1].end_line
            )
        ):
            open_stack.pop()
        open_stack[-1].children.append(node)
        open_stack.append(node)
    return root


def list_functions(lang: str, source: str, root: SyntaxNodeRef | None = None) -> list[FunctionSpan]:
    """Function spans (free functions, methods, nested) in source order."""
    analysis = analyze(lang, source)
    lines = source.split("\n")
    spans = []
    for f in analysis.functions:
        body = "\n".join(lines[f.start_line - 1 : f.end_line])
        spans.append(FunctionSpan(f.name, f.start_line, f.end_line, body))
    return spans


def enclosing_function(spans: list[FunctionSpan], lines: set[int]) -> FunctionSpan | None:
    """The function most related to a set of touched lines.

    Nested candidates collapse to the innermost; among disjoint
    candidates the one covering the most touched lines wins, ties broken
    by smaller span then earlier start.
    """
    touched = [
        (s, sum(1 for l in lines if s.start_line <= l <= s.end_line)) for s in spans
    ]
    touched = [(s, c) for s, c in touched if c > 0]
    if not touched:
        return None
    # drop any candidate that strictly contains another candidate
    innermost = []
    for s, c in touched:
        contains_other = any(
            o is not s
            and s.start_line <= o.start_line
            and o.end_line <= s.end_line
            and (o.start_line, o.end_line) != (s.start_line, s.end_line)
            for o, _ in touched
        )
        if not contains_other:
            innermost.append((s, c))
    return min(
        innermost,
        key=lambda sc: (-sc[1], sc[0].end_line - sc[0].start_line, sc[0].start_line),
    )[0]
