"""Shared fixtures plus the acceptance-criteria summary table.

Tests marked @pytest.mark.criterion(n, "label") are aggregated into one
PASS/FAIL line per criterion at the end of the run. A skipped criterion
test counts as FAIL: every criterion must actually execute.
"""
from __future__ import annotations

import os

import pytest

from egoqa.core import Narration, NarrationTrack

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "criterion(num, label): acceptance criterion exercised by this test",
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    num, label = marker.args
    entry = _CRITERIA.setdefault(num, {"label": label, "ok": True, "note": ""})
    if report.when == "call" and report.failed:
        entry["ok"] = False
    elif report.when == "setup" and report.failed:
        entry["ok"] = False
        entry["note"] = " (errored in setup)"
    elif report.skipped:
        entry["ok"] = False
        entry["note"] = " (skipped, not verified)"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num in sorted(_CRITERIA):
        entry = _CRITERIA[num]
        status = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(
            f"criterion {num:2d} [{status}] {entry['label']}{entry['note']}"
        )


@pytest.fixture
def data_dir() -> str:
    return DATA_DIR


def make_track(clip_uid: str, duration_s: float, timestamps, text="C does a thing.") -> NarrationTrack:
    return NarrationTrack(
        clip_uid=clip_uid,
        duration_s=duration_s,
        narrations=tuple(Narration(text, float(t)) for t in timestamps),
    )
