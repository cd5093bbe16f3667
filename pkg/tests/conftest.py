"""Shared fixtures: a deterministic synthetic corpus whose diffs are
derived from real old-file content, so line anchoring holds by
construction."""

import random

import pytest

from reviewgen.corpus import ReviewRecord

# Populated by tests/test_acceptance.py; echoed after the run so the
# one-line-per-criterion verdicts are visible even under output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

_PY_TEMPLATE = """\
import os

def helper_{i}(x):
    return x + {i}

def process_{i}(data):
    total = helper_{i}(data)
    scaled = total * {i}
    print(scaled)
    return scaled

def main_{i}():
    value = process_{i}({i})
    return value
"""

_GO_TEMPLATE = """\
package main

import "fmt"

func helperNum{i}(x int) int {{
	return x + {i}
}}

func process{i}(n int) int {{
	v := helperNum{i}(n)
	w := v * {i}
	fmt.Println(w)
	return w
}}

func main() {{
	process{i}({i})
}}
"""

_CPP_TEMPLATE = """\
#include <cstdio>

int helper_{i}(int x) {{
    return x + {i};
}}

int process_{i}(int n) {{
    int v = helper_{i}(n);
    int w = v * {i};
    printf("%d", w);
    return w;
}}

int main() {{
    return process_{i}({i});
}}
"""

_JAVA_TEMPLATE = """\
public class App{i} {{
    private int helper{i}(int x) {{
        return x + {i};
    }}

    public int process{i}(int n) {{
        int v = helper{i}(n);
        int w = v * {i};
        System.out.println(w);
        return w;
    }}
}}
"""

_JS_TEMPLATE = """\
function helper{i}(x) {{
  return x + {i};
}}

function process{i}(n) {{
  const v = helper{i}(n);
  const w = v * {i};
  console.log(w);
  return w;
}}

process{i}({i});
"""

_TEMPLATES = [
    ("python", _PY_TEMPLATE),
    ("go", _GO_TEMPLATE),
    ("cpp", _CPP_TEMPLATE),
    ("java", _JAVA_TEMPLATE),
    ("javascript", _JS_TEMPLATE),
]

_COMMENTS = [
    "Please rename this variable to something descriptive.",
    "This multiplication can overflow for large inputs.",
    "Consider extracting this into a helper function.",
    "Why is the scale factor hardcoded here?",
    "Missing a bounds check before the arithmetic.",
    "This should use the shared logging utility instead.",
    "The change looks fine but needs a unit test.",
    "Prefer early return to reduce nesting here.",
]


def make_record(i: int, rng: random.Random) -> ReviewRecord:
    lang, template = _TEMPLATES[i % len(_TEMPLATES)]
    old_file = template.format(i=i)
    lines = old_file.split("\n")
    # pick a deletable line with context on both sides
    candidates = [k for k in range(2, len(lines) - 2) if lines[k].strip()]
    idx = rng.choice(candidates)
    deleted = lines[idx]
    added = deleted + "  /* changed */" if lang != "python" else deleted + "  # changed"
    diff_text = (
        f"@@ -{idx},3 +{idx},3 @@\n"
        f" {lines[idx - 1]}\n"
        f"-{deleted}\n"
        f"+{added}\n"
        f" {lines[idx + 1]}"
    )
    return ReviewRecord(
        id=f"rec-{i}",
        lang=lang,
        old_file=old_file,
        diff_text=diff_text,
        reference_comment=rng.choice(_COMMENTS),
    )


def make_corpus(n: int, seed: int = 7) -> list[ReviewRecord]:
    rng = random.Random(seed)
    return [make_record(i, rng) for i in range(n)]


@pytest.fixture(scope="session")
def small_corpus() -> list[ReviewRecord]:
    return make_corpus(30, seed=11)


@pytest.fixture(scope="session")
def train_corpus() -> list[ReviewRecord]:
    return make_corpus(120, seed=5)
