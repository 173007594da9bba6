from __future__ import annotations

import pytest

from pidlint import EngineConfig, build_demo_fixture, builtin_rules


@pytest.fixture()
def fixture_graph():
    return build_demo_fixture()


@pytest.fixture(scope="session")
def rules():
    return builtin_rules()


@pytest.fixture()
def rules_by_id(rules):
    return {r.meta.id: r for r in rules}


@pytest.fixture()
def fix_config():
    return EngineConfig(mode="fix", recommendation_threshold="consideration")


@pytest.fixture()
def detect_config():
    return EngineConfig(mode="detect", recommendation_threshold="consideration")
