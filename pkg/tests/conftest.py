import pytest

# criterion number -> list of (ok, detail) recorded by the acceptance tests
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def record():
    def _record(num: int, ok: bool, detail: str) -> None:
        ACCEPTANCE.setdefault(num, []).append((bool(ok), detail))
        print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[num]
        ok = all(p for p, _ in parts)
        tr.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  " + " | ".join(d for _, d in parts))
