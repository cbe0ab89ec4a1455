"""Shared store for acceptance-criterion result lines."""

RESULTS: dict[int, str] = {}


def record(number: int, ok: bool, title: str, detail: str) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
    RESULTS[number] = line
    print(line)
    return line
