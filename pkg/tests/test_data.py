import json

import pytest
from hypothesis import given, strategies as st

from conftest import make_photo
from photoevents.data import (DataFormatError, InteractionKind, PhotoCollection, order_stream,
                              parse_interactions, parse_photo_records, serialize_interactions,
                              serialize_photos)


def rec(**kw):
    base = {"photo_id": "p1", "user_id": "u1", "taken_time": 10, "upload_time": 20}
    base.update(kw)
    return json.dumps(base)


def test_empty_input():
    assert len(parse_photo_records(b"")) == 0
    assert parse_interactions(b"") == []


def test_tags_normalized():
    photos = parse_photo_records(rec(tags=["Rock", " concert ", "  "]))
    assert photos[0].tags == ("rock", "concert")


def test_duplicate_id_names_the_id():
    with pytest.raises(DataFormatError, match="'p1'"):
        parse_photo_records(rec() + "\n" + rec())


def test_lat_without_lon():
    with pytest.raises(DataFormatError, match="line 1"):
        parse_photo_records(rec(latitude=10.0))


@pytest.mark.parametrize("line", ["{not json", "[1, 2]", rec(taken_time="yesterday"), rec(photo_id=None)])
def test_malformed_line_reports_line_number(line):
    with pytest.raises(DataFormatError, match="line 2"):
        parse_photo_records(rec(photo_id="p0") + "\n" + line)


def test_out_of_range_coordinates():
    with pytest.raises(DataFormatError):
        parse_photo_records(rec(latitude=91.0, longitude=0.0))


def test_unknown_fields_ignored_and_optional_fields():
    p = parse_photo_records(rec(extra="x", latitude=1.5, longitude=2.5, title="T", event_id=7))[0]
    assert (p.latitude, p.longitude, p.title, p.event_id, p.description) == (1.5, 2.5, "T", "7", None)


def test_interaction_kinds():
    log = parse_interactions('{"kind": "comment", "user_id": "u", "photo_id": "p", "time": 1}\n'
                             '{"kind": "FAVORITE", "user_id": "u", "photo_id": "p", "time": 2}')
    assert [i.kind for i in log] == [InteractionKind.COMMENT, InteractionKind.FAVORITE]
    with pytest.raises(DataFormatError, match="unknown interaction kind"):
        parse_interactions('{"kind": "like", "user_id": "u", "photo_id": "p", "time": 1}')
    with pytest.raises(DataFormatError, match="line 1"):
        parse_interactions("nope")


def test_order_stream_examples():
    photos = [make_photo("x", upload=5), make_photo("y", upload=3), make_photo("z", upload=9)]
    assert [p.upload_time for p in order_stream(photos)] == [3, 5, 9]
    tie = [make_photo("b", upload=1), make_photo("a", upload=1)]
    assert [p.photo_id for p in order_stream(tie)] == ["a", "b"]
    assert order_stream([photos[0]]) == [photos[0]]


def test_order_by_taken_time():
    photos = [make_photo("x", taken=2, upload=1), make_photo("y", taken=1, upload=2)]
    assert [p.photo_id for p in order_stream(photos, "taken_time")] == ["y", "x"]
    with pytest.raises(ValueError):
        order_stream(photos, "id")


photo_st = st.builds(
    lambda pid, up, geo, tags, title: make_photo(
        pid, "u", up, up, *(geo if geo else (None, None)), tags=tags, title=title),
    st.text(min_size=1, max_size=6),
    st.integers(0, 10**9),
    st.none() | st.tuples(st.floats(-90, 90), st.floats(-180, 180)),
    st.lists(st.text(max_size=5), max_size=4),
    st.none() | st.text(max_size=10),
)


@given(st.lists(photo_st, max_size=10, unique_by=lambda p: p.photo_id))
def test_order_stream_idempotent_permutation(photos):
    once = order_stream(photos)
    assert order_stream(once) == once
    assert sorted(p.photo_id for p in once) == sorted(p.photo_id for p in photos)
    keys = [(p.upload_time, p.photo_id) for p in once]
    assert keys == sorted(keys)


@given(st.lists(photo_st, max_size=10, unique_by=lambda p: p.photo_id))
def test_photo_round_trip(photos):
    coll = PhotoCollection(tuple(photos))
    again = parse_photo_records(serialize_photos(coll))
    assert again == coll
    assert parse_photo_records(serialize_photos(again)) == coll


def test_interaction_round_trip():
    text = ('{"kind":"comment","user_id":"u","photo_id":"p","time":1}\n'
            '{"kind":"favorite","user_id":"v","photo_id":"q","time":2}\n')
    assert serialize_interactions(parse_interactions(text)) == text
