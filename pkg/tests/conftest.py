from __future__ import annotations

from pathlib import Path

import pytest

from tabandwidth.model import parse_automaton
from tabandwidth.regions import region_split
from tabandwidth.barycentric import build_abstraction
from tabandwidth.stg import parse_stg

DATA = Path(__file__).parent / "data"

# criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def load_automaton(name: str):
    path = DATA / name if "." in name else DATA / f"{name}.ta"
    return parse_automaton(path.read_text())


def load_graph(name: str):
    return parse_stg((DATA / name).read_text())


@pytest.fixture(scope="session")
def automata():
    return {n: load_automaton(n) for n in ("a1", "a2", "a3", "a4", "a5", "a6", "a7")}


@pytest.fixture(scope="session")
def split(automata):
    return {n: region_split(a) for n, a in automata.items()}


@pytest.fixture(scope="session")
def abstraction(split):
    return {n: build_abstraction(r) for n, r in split.items()}


@pytest.fixture(scope="session")
def two_state():
    return load_graph("two_state.yaml")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    groups: dict[int, list[str]] = {}
    for key in ACCEPTANCE_RESULTS:
        groups.setdefault(int(key.split(".")[0]), []).append(key)
    for number in sorted(groups):
        keys = sorted(groups[number], key=lambda k: [int(p) for p in k.split(".")])
        if keys == [str(number)]:
            ok, detail = ACCEPTANCE_RESULTS[keys[0]]
            terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
            continue
        failed = [k for k in keys if not ACCEPTANCE_RESULTS[k][0]]
        summary = f"{len(keys) - len(failed)}/{len(keys)} parts pass" + (f", failing: {', '.join(failed)}" if failed else "")
        terminalreporter.write_line(f"criterion {number}: {'FAIL' if failed else 'PASS'}  {summary}")
        for k in keys:
            ok, detail = ACCEPTANCE_RESULTS[k]
            terminalreporter.write_line(f"  {k}: {'PASS' if ok else 'FAIL'}  {detail}")
