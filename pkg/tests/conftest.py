"""Collects acceptance-criterion verdicts and prints one line per criterion."""

import pytest

_VERDICTS: dict[int, dict] = {}


class _Check:
    def __init__(self, number: int, title: str):
        self.number = number
        self.entry = _VERDICTS.setdefault(number, {"title": title, "results": []})
        self.called = False

    def __call__(self, ok: bool, detail: str) -> None:
        self.called = True
        self.entry["results"].append((bool(ok), detail))
        print(f"criterion {self.number}: {'PASS' if ok else 'FAIL'} - {detail}")
        assert ok, detail


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    if marker is None:
        raise RuntimeError("the criterion fixture needs @pytest.mark.criterion(number, title)")
    check = _Check(*marker.args)
    yield check
    if not check.called:
        check.entry["results"].append((False, f"{request.node.name} did not finish"))


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        entry = _VERDICTS[number]
        ok = all(r[0] for r in entry["results"])
        details = "; ".join(r[1] for r in entry["results"])
        terminalreporter.write_line(
            f"[{'PASS' if ok else 'FAIL'}] {number}. {entry['title']}: {details}")
