import sys

import pytest

from coset_forge import fold, parse_word, parse_words

WORKED = "a^3,b^3,ab^2A,ba^3B,bab^2AB"


def W(text):
    return parse_word(text)


@pytest.fixture(scope="session")
def worked_graph():
    return fold(parse_words(WORKED), 2)


@pytest.fixture(scope="session")
def worked_basis(worked_graph):
    from coset_forge import nielsen_basis
    return nielsen_basis(worked_graph)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
