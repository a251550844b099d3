"""Collects one result line per acceptance criterion."""

LINES: list[str] = []


def record(number: int, ok: bool, summary: str) -> bool:
    LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {summary}")
    print(LINES[-1])
    return ok
