import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from photoevents.data import Interaction, InteractionKind, Photo  # noqa: E402


def make_photo(pid, user="u", taken=0, upload=None, lat=None, lon=None, tags=(), title=None,
               description=None, event=None):
    return Photo(pid, user, taken, taken if upload is None else upload, lat, lon, tuple(tags),
                 title, description, event)


def comment(user, pid, t=0):
    return Interaction(InteractionKind.COMMENT, user, pid, t)


def favorite(user, pid, t=0):
    return Interaction(InteractionKind.FAVORITE, user, pid, t)


@pytest.fixture
def small_photos():
    return [
        make_photo("a1", "u1", 1000, lat=40.0, lon=-74.0, tags=["rock", "concert"], title="Rock night",
                   event="E1"),
        make_photo("a2", "u2", 1500, lat=40.01, lon=-74.0, tags=["rock"], title="Concert rock", event="E1"),
        make_photo("a3", "u1", 2000, tags=["concert"], description="great show", event="E1"),
        make_photo("b1", "u3", 900000, lat=34.0, lon=-118.0, tags=["marathon"], title="Race day",
                   event="E2"),
        make_photo("b2", "u4", 901000, lat=34.02, lon=-118.01, tags=["marathon", "run"], event="E2"),
    ]
