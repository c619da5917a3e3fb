"""Photo and interaction records, line-delimited JSON I/O, and stream ordering."""

from __future__ import annotations

import enum
import io
import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence, Union

Source = Union[bytes, str, IO[bytes], IO[str], Iterable[str]]

PHOTO_KEYS = (
    "photo_id", "user_id", "taken_time", "upload_time", "latitude",
    "longitude", "tags", "title", "description", "event_id",
)
INTERACTION_KEYS = ("kind", "user_id", "photo_id", "time")
ORDER_KEYS = ("upload_time", "taken_time")


class DataFormatError(ValueError):
    """Raised for malformed or inconsistent input records."""


class InteractionKind(str, enum.Enum):
    COMMENT = "comment"
    FAVORITE = "favorite"


def normalize_tags(tags: Iterable[str]) -> tuple[str, ...]:
    out = []
    for t in tags:
        t = t.strip().lower()
        if t:
            out.append(t)
    return tuple(out)


@dataclass(frozen=True)
class Photo:
    photo_id: str
    user_id: str
    taken_time: int
    upload_time: int
    latitude: float | None = None
    longitude: float | None = None
    tags: tuple[str, ...] = ()
    title: str | None = None
    description: str | None = None
    event_id: str | None = None

    def __post_init__(self):
        if (self.latitude is None) != (self.longitude is None):
            raise DataFormatError(
                f"photo {self.photo_id!r}: latitude and longitude must both be present or both absent")
        if self.latitude is not None:
            if not -90.0 <= self.latitude <= 90.0:
                raise DataFormatError(f"photo {self.photo_id!r}: latitude {self.latitude} out of range")
            if not -180.0 <= self.longitude <= 180.0:
                raise DataFormatError(f"photo {self.photo_id!r}: longitude {self.longitude} out of range")
        object.__setattr__(self, "tags", normalize_tags(self.tags))

    @property
    def has_geo(self) -> bool:
        return self.latitude is not None

    @property
    def text(self) -> str:
        """Title and description joined into one free-text field."""
        return " ".join(s for s in (self.title, self.description) if s)

    def to_record(self) -> dict:
        return {
            "photo_id": self.photo_id,
            "user_id": self.user_id,
            "taken_time": self.taken_time,
            "upload_time": self.upload_time,
            "latitude": self.latitude,
            "longitude": self.longitude,
            "tags": list(self.tags),
            "title": self.title,
            "description": self.description,
            "event_id": self.event_id,
        }


@dataclass(frozen=True)
class Interaction:
    kind: InteractionKind
    user_id: str
    photo_id: str
    time: int

    def to_record(self) -> dict:
        return {"kind": self.kind.value, "user_id": self.user_id,
                "photo_id": self.photo_id, "time": self.time}


@dataclass(frozen=True)
class PhotoCollection:
    """Photos with unique ids, kept in file order."""

    photos: tuple[Photo, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for p in self.photos:
            if p.photo_id in index:
                raise DataFormatError(f"duplicate photo_id {p.photo_id!r}")
            index[p.photo_id] = p
        object.__setattr__(self, "photos", tuple(self.photos))
        object.__setattr__(self, "_index", index)

    def __len__(self):
        return len(self.photos)

    def __iter__(self):
        return iter(self.photos)

    def __getitem__(self, i):
        return self.photos[i]

    def __contains__(self, photo_id):
        return photo_id in self._index

    def get(self, photo_id: str) -> Photo:
        return self._index[photo_id]

    @property
    def ids(self) -> list[str]:
        return [p.photo_id for p in self.photos]


def _lines(source: Source) -> Iterable[str]:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def _decode(raw, lineno: int) -> dict | None:
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    raw = raw.strip()
    if not raw:
        return None
    try:
        rec = json.loads(raw)
    except json.JSONDecodeError as e:
        raise DataFormatError(f"line {lineno}: invalid JSON ({e.msg})") from None
    if not isinstance(rec, dict):
        raise DataFormatError(f"line {lineno}: record is not a JSON object")
    return rec


def _require(rec: dict, key: str, types, lineno: int):
    if key not in rec or rec[key] is None:
        raise DataFormatError(f"line {lineno}: missing field {key!r}")
    val = rec[key]
    if not isinstance(val, types) or isinstance(val, bool):
        raise DataFormatError(f"line {lineno}: field {key!r} has wrong type")
    return val


def _optional(rec: dict, key: str, types, lineno: int):
    val = rec.get(key)
    if val is None:
        return None
    if not isinstance(val, types) or isinstance(val, bool):
        raise DataFormatError(f"line {lineno}: field {key!r} has wrong type")
    return val


def _epoch(rec: dict, key: str, lineno: int) -> int:
    val = _require(rec, key, (int, float), lineno)
    if isinstance(val, float):
        if not val.is_integer():
            raise DataFormatError(f"line {lineno}: field {key!r} must be integer seconds")
        val = int(val)
    return val


def _photo_from_record(rec: dict, lineno: int) -> Photo:
    lat = _optional(rec, "latitude", (int, float), lineno)
    lon = _optional(rec, "longitude", (int, float), lineno)
    if (lat is None) != (lon is None):
        raise DataFormatError(f"line {lineno}: latitude and longitude must both be present or both absent")
    tags = rec.get("tags") or []
    if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
        raise DataFormatError(f"line {lineno}: field 'tags' must be a list of strings")
    event_id = rec.get("event_id")
    if event_id is not None and not isinstance(event_id, str):
        # integer event ids are common in exports
        if isinstance(event_id, int) and not isinstance(event_id, bool):
            event_id = str(event_id)
        else:
            raise DataFormatError(f"line {lineno}: field 'event_id' has wrong type")
    try:
        return Photo(
            photo_id=_require(rec, "photo_id", str, lineno),
            user_id=_require(rec, "user_id", str, lineno),
            taken_time=_epoch(rec, "taken_time", lineno),
            upload_time=_epoch(rec, "upload_time", lineno),
            latitude=None if lat is None else float(lat),
            longitude=None if lon is None else float(lon),
            tags=tuple(tags),
            title=_optional(rec, "title", str, lineno),
            description=_optional(rec, "description", str, lineno),
            event_id=event_id,
        )
    except DataFormatError as e:
        raise DataFormatError(f"line {lineno}: {e}") from None


def parse_photo_records(source: Source) -> PhotoCollection:
    """Parse line-delimited JSON photo records.

    Blank lines are skipped, unknown keys ignored. Errors carry the 1-based
    line number; a repeated ``photo_id`` is reported by id.
    """
    photos = []
    seen = set()
    for lineno, raw in enumerate(_lines(source), start=1):
        rec = _decode(raw, lineno)
        if rec is None:
            continue
        photo = _photo_from_record(rec, lineno)
        if photo.photo_id in seen:
            raise DataFormatError(f"line {lineno}: duplicate photo_id {photo.photo_id!r}")
        seen.add(photo.photo_id)
        photos.append(photo)
    return PhotoCollection(tuple(photos))


def parse_interactions(source: Source) -> list[Interaction]:
    out = []
    for lineno, raw in enumerate(_lines(source), start=1):
        rec = _decode(raw, lineno)
        if rec is None:
            continue
        kind = _require(rec, "kind", str, lineno)
        try:
            kind = InteractionKind(kind.strip().lower())
        except ValueError:
            raise DataFormatError(f"line {lineno}: unknown interaction kind {kind!r}") from None
        out.append(Interaction(
            kind=kind,
            user_id=_require(rec, "user_id", str, lineno),
            photo_id=_require(rec, "photo_id", str, lineno),
            time=_epoch(rec, "time", lineno),
        ))
    return out


def _dumps(rec: dict) -> str:
    return json.dumps(rec, ensure_ascii=False, separators=(",", ":"))


def serialize_photos(photos: Iterable[Photo]) -> str:
    return "".join(_dumps(p.to_record()) + "\n" for p in photos)


def serialize_interactions(interactions: Iterable[Interaction]) -> str:
    return "".join(_dumps(i.to_record()) + "\n" for i in interactions)


def read_photos(path) -> PhotoCollection:
    with open(path, encoding="utf-8") as fh:
        return parse_photo_records(fh)


def read_interactions(path) -> list[Interaction]:
    with open(path, encoding="utf-8") as fh:
        return parse_interactions(fh)


def order_stream(photos: Sequence[Photo] | PhotoCollection, key: str = "upload_time") -> list[Photo]:
    """Return photos sorted by ``key`` ascending, ties broken by photo_id."""
    if key not in ORDER_KEYS:
        raise ValueError(f"order key must be one of {ORDER_KEYS}, got {key!r}")
    return sorted(photos, key=lambda p: (getattr(p, key), p.photo_id))
