import pytest

from photoevents._validation import ConfigError
from photoevents.data import InteractionKind, serialize_interactions, serialize_photos
from photoevents.synth import SynthConfig, generate, load_profile

SMALL = SynthConfig(num_events=5, photos_per_event=(4, 8), seed=3)


def test_deterministic_bytes():
    a, b = generate(SMALL), generate(SMALL)
    assert serialize_photos(a[0]) == serialize_photos(b[0])
    assert serialize_interactions(a[1]) == serialize_interactions(b[1])


def test_event_count_and_sizes():
    photos, _ = generate(SynthConfig(num_events=3, photos_per_event=(2, 5), seed=1))
    events = [p.event_id for p in photos]
    assert len(set(events)) == 3
    for e in set(events):
        assert 2 <= events.count(e) <= 5


def test_distinct_seeds_distinct_ids():
    a = generate(SMALL)[0].ids
    b = generate(SynthConfig(num_events=5, photos_per_event=(4, 8), seed=4))[0].ids
    assert a != b


def test_out_of_event_comments_disabled():
    photos, inter = generate(SynthConfig(num_events=6, p_comment_out=0.0, p_favorite_out=0.0,
                                         p_user_second_event=0.0, seed=2))
    event = {p.photo_id: p.event_id for p in photos}
    attended = {}
    for p in photos:
        attended.setdefault(p.user_id, set()).add(p.event_id)
    assert any(it.kind is InteractionKind.COMMENT for it in inter)
    for it in inter:
        # users are named after their home event
        assert f"e{it.user_id[1:4]}" == event[it.photo_id]


@pytest.mark.parametrize("rate,expect", [(0.0, True), (1.0, False)])
def test_geo_missing_rate_extremes(rate, expect):
    photos, _ = generate(SynthConfig(num_events=4, geo_missing_rate=rate, seed=5))
    assert all(p.has_geo == expect for p in photos)


def test_every_user_owns_or_attends():
    photos, _ = generate(SMALL)
    assert all(p.user_id.startswith("u") for p in photos)


@pytest.mark.parametrize("bad", [
    dict(photos_per_event=(5, 2)),
    dict(num_events=0),
    dict(p_comment_in=0.1, p_comment_out=0.2),
    dict(geo_missing_rate=1.5),
    dict(ambiguity=-1.0),
])
def test_infeasible_config(bad):
    with pytest.raises(ConfigError):
        SynthConfig(**bad)


def test_profiles_ship():
    assert load_profile("ablation")["synth"]["ambiguity"] > 0
    assert load_profile("clean")["synth"]["ambiguity"] == 0
    with pytest.raises(ConfigError):
        load_profile("nope")
    assert SynthConfig.from_dict(SMALL.to_dict()) == SMALL
