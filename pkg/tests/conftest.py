import sys
from pathlib import Path

import pytest

from eventrec.kg import EntityRecord, KnowledgeGraph, LinkSet

TESTS = Path(__file__).parent
if str(TESTS) not in sys.path:
    sys.path.insert(0, str(TESTS))

BERLIN = (52.5200, 13.4050)
PARIS = (48.8566, 2.3522)


def make_graph(entities, links=None, countries=None):
    """Build a KnowledgeGraph from EntityRecords and {lang: [(s, t), ...]}."""
    ents = {e.id: e for e in entities}
    ls = {lang: LinkSet(lang, edges) for lang, edges in (links or {}).items()}
    return KnowledgeGraph(ents, ls, countries or {})


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p
    return _write


@pytest.fixture
def tiny_graph():
    ents = [
        EntityRecord("berlin", "Berlin", coords=(BERLIN,)),
        EntityRecord("paris", "Paris", coords=(PARIS,)),
        EntityRecord("e", "query"),
        EntityRecord("v", "event", is_event=True),
        EntityRecord("x"),
        EntityRecord("y"),
    ]
    return make_graph(ents, {"de": [("x", "v"), ("x", "e"), ("y", "v")]})


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(acceptance_log.RESULTS):
            terminalreporter.write_line(acceptance_log.RESULTS[n])
