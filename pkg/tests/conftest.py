import json
import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text())


PAIR_FIXTURES = ["pair_d2_axes.json", "pair_d2_axes_q2.json", "pair_d2_hex_q2.json"]
SCENE_FIXTURES = ["scene_delta.json", "scene_mixed.json", "scene_near_boundary.json", "scene_compact.json"]


@pytest.fixture(scope="session")
def axes_spec():
    from prambig.liftnd import PairSpec
    return PairSpec.from_json(load_fixture("pair_d2_axes.json"))


@pytest.fixture(scope="session")
def axes_pair(axes_spec):
    from prambig.liftnd import build
    return build(axes_spec)


@pytest.fixture(scope="session")
def hex_pair():
    from prambig.liftnd import PairSpec, build
    return build(PairSpec.from_json(load_fixture("pair_d2_hex_q2.json")))


def load_scene(name):
    from prambig.liftnd import PairSpec
    from prambig.scene import SceneSpec
    obj = load_fixture(name)
    return PairSpec.from_json(obj["pair"]), SceneSpec.from_json(obj["scene"])


@pytest.fixture(scope="session")
def scene_pairs():
    from prambig.scene import build_scene_pair
    out = {}
    for name in SCENE_FIXTURES:
        ps, ss = load_scene(name)
        out[name] = build_scene_pair(ps, ss)
    return out


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
