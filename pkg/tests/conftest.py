import pytest

from pronpred.model import get_subtask

REFERENCE_LINE = ("ce OTHER\tce|PRON qui|PRON\tIt 's an idiotic debate . It has to stop .\t"
             "REPLACE_0 être|VER un|DET débat|NOM idiot|ADJ REPLACE_6 devoir|VER "
             "stopper|VER .|.\t0-0 1-1 2-2 3-4 4-3 6-5 7-6 8-6 9-7 10-8")


@pytest.fixture
def en_fr():
    return get_subtask('en-fr')


@pytest.fixture
def reference_line():
    return REFERENCE_LINE


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS
    if RESULTS:
        terminalreporter.section('acceptance criteria')
        for line in RESULTS:
            terminalreporter.write_line(line)
