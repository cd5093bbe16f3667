"""Per-language analysis tables for the nine supported languages.

Each language is described by data (comment syntax, string syntax,
scope separators, definition style) rather than per-language code
branches, so the nine variants stay auditable in one place.
"""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class LanguageSpec:
    name: str
    family: str  # "brace" | "indent" | "keyword-end"
    line_comments: tuple[str, ...]
    block_comments: tuple[tuple[str, str], ...]
    quotes: tuple[str, ...]
    triple_quotes: bool = False
    raw_backtick: bool = False  # Go raw strings / JS template literals
    scope_separators: tuple[str, ...] = (".",)
    # identifiers that can precede "(" without being a call or definition
    control_keywords: frozenset = field(default_factory=frozenset)


_C_CONTROL = frozenset(
    {
        "if", "else", "for", "while", "switch", "catch", "return", "sizeof",
        "do", "constexpr", "foreach", "using", "lock", "fixed", "synchronized",
        "typeof", "nameof", "throw", "assert", "case", "defined", "alignof",
        "decltype", "static_assert", "typeid",
    }
)

_JS_CONTROL = frozenset(
    {"if", "else", "for", "while", "switch", "catch", "return", "typeof",
     "do", "throw", "await", "yield", "delete", "void", "in", "of", "new"}
)

_PY_CONTROL = frozenset(
    {"if", "elif", "else", "for", "while", "return", "yield", "not", "and",
     "or", "in", "is", "assert", "del", "raise", "lambda", "await", "with",
     "except", "match", "case"}
)

_RUBY_CONTROL = frozenset(
    {"if", "elsif", "else", "unless", "while", "until", "for", "case",
     "when", "return", "yield", "not", "and", "or", "raise", "then", "do"}
)


LANGUAGE_SPECS: dict[str, LanguageSpec] = {
    "c": LanguageSpec(
        name="c", family="brace",
        line_comments=("//",), block_comments=(("/*", "*/"),),
        quotes=('"', "'"), scope_separators=("->", "."),
        control_keywords=_C_CONTROL,
    ),
    "cpp": LanguageSpec(
        name="cpp", family="brace",
        line_comments=("//",), block_comments=(("/*", "*/"),),
        quotes=('"', "'"), scope_separators=("::", "->", "."),
        control_keywords=_C_CONTROL,
    ),
    "csharp": LanguageSpec(
        name="csharp", family="brace",
        line_comments=("//",), block_comments=(("/*", "*/"),),
        quotes=('"', "'"), scope_separators=(".",),
        control_keywords=_C_CONTROL,
    ),
    "go": LanguageSpec(
        name="go", family="brace",
        line_comments=("//",), block_comments=(("/*", "*/"),),
        quotes=('"', "'"), raw_backtick=True, scope_separators=(".",),
        control_keywords=frozenset({"if", "for", "switch", "select", "return", "go", "defer", "range", "case"}),
    ),
    "java": LanguageSpec(
        name="java", family="brace",
        line_comments=("//",), block_comments=(("/*", "*/"),),
        quotes=('"', "'"), scope_separators=("::", "."),
        control_keywords=_C_CONTROL,
    ),
    "javascript": LanguageSpec(
        name="javascript", family="brace",
        line_comments=("//",), block_comments=(("/*", "*/"),),
        quotes=('"', "'"), raw_backtick=True, scope_separators=(".",),
        control_keywords=_JS_CONTROL,
    ),
    "php": LanguageSpec(
        name="php", family="brace",
        line_comments=("//", "#"), block_comments=(("/*", "*/"),),
        quotes=('"', "'"), scope_separators=("::", "->"),
        control_keywords=_C_CONTROL | frozenset({"echo", "isset", "unset", "empty", "list", "array", "require", "include", "require_once", "include_once"}),
    ),
    "python": LanguageSpec(
        name="python", family="indent",
        line_comments=("#",), block_comments=(),
        quotes=('"', "'"), triple_quotes=True, scope_separators=(".",),
        control_keywords=_PY_CONTROL,
    ),
    "ruby": LanguageSpec(
        name="ruby", family="keyword-end",
        line_comments=("#",), block_comments=(("=begin", "=end"),),
        quotes=('"', "'"), scope_separators=("::", "."),
        control_keywords=_RUBY_CONTROL,
    ),
}


def language_spec(lang: str) -> LanguageSpec:
    try:
        return LANGUAGE_SPECS[lang]
    except KeyError:
        raise ValueError(f"unsupported language: {lang!r}") from None
