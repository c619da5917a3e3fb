"""Seeded synthetic photo streams with planted events and social interactions.

Each event has a time center, a geo center, a private tag/word vocabulary and
a set of attending users. Photos are owned by attendees and scatter around
the event's time and place; ``ambiguity`` widens that scatter and raises the
share of tags drawn from a vocabulary shared by all events. Attendees comment
on their event's photos with probability ``p_comment_in``, everyone else with
``p_comment_out``.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import asdict, dataclass
from importlib import resources

import numpy as np

from ._validation import ConfigError, check_probability, check_scalar
from .data import Interaction, InteractionKind, Photo, PhotoCollection

KM_PER_DEGREE = 111.195


@dataclass(frozen=True)
class SynthConfig:
    num_events: int = 20
    photos_per_event: tuple[int, int] = (5, 20)
    users_per_event: int = 4
    # chance that a user also attends one other, random event
    p_user_second_event: float = 0.1
    time_center_spread_days: float = 90.0
    within_event_sigma_hours: float = 6.0
    upload_delay_mean_hours: float = 48.0
    # lat_min, lat_max, lon_min, lon_max
    geo_box: tuple[float, float, float, float] = (25.0, 49.0, -124.0, -67.0)
    sigma_km: float = 5.0
    tags_per_event: int = 8
    noise_vocab_size: int = 50
    event_tags_per_photo: int = 3
    noise_tags_per_photo: int = 2
    title_words: int = 3
    p_description: float = 0.5
    geo_missing_rate: float = 0.3
    p_comment_in: float = 0.3
    p_comment_out: float = 0.01
    p_favorite_in: float = 0.1
    p_favorite_out: float = 0.0
    ambiguity: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "photos_per_event", tuple(int(x) for x in self.photos_per_event))
        object.__setattr__(self, "geo_box", tuple(float(x) for x in self.geo_box))
        check_scalar(self.num_events, "num_events", min_val=1, integer=True)
        lo, hi = self.photos_per_event
        if lo < 1 or lo > hi:
            raise ConfigError(f"photos_per_event must satisfy 1 <= min <= max, got {self.photos_per_event}")
        check_scalar(self.users_per_event, "users_per_event", min_val=1, integer=True)
        for name in ("time_center_spread_days", "within_event_sigma_hours",
                     "upload_delay_mean_hours", "sigma_km", "ambiguity"):
            check_scalar(getattr(self, name), name, min_val=0.0)
        for name in ("tags_per_event", "noise_vocab_size", "event_tags_per_photo",
                     "noise_tags_per_photo", "title_words"):
            check_scalar(getattr(self, name), name, min_val=0, integer=True)
        for name in ("p_user_second_event", "p_description", "geo_missing_rate", "p_comment_in",
                     "p_comment_out", "p_favorite_in", "p_favorite_out"):
            check_probability(getattr(self, name), name)
        if self.p_comment_in < self.p_comment_out:
            raise ConfigError("p_comment_in must be >= p_comment_out")
        lat0, lat1, lon0, lon1 = self.geo_box
        if not (-90 <= lat0 <= lat1 <= 90 and -180 <= lon0 <= lon1 <= 180):
            raise ConfigError(f"invalid geo_box {self.geo_box}")
        if self.noise_tags_per_photo and not self.noise_vocab_size:
            raise ConfigError("noise tags requested but noise_vocab_size is 0")
        if self.event_tags_per_photo and not self.tags_per_event:
            raise ConfigError("event tags requested but tags_per_event is 0")
        check_scalar(self.seed, "seed", integer=True)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["photos_per_event"] = list(self.photos_per_event)
        d["geo_box"] = list(self.geo_box)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        return cls(**d)


def load_profile(name: str) -> dict:
    """A shipped config profile from ``photoevents/profiles/<name>.json``."""
    path = resources.files("photoevents") / "profiles" / f"{name}.json"
    if not path.is_file():
        raise ConfigError(f"unknown profile {name!r}")
    return json.loads(path.read_text(encoding="utf-8"))


def generate(config: SynthConfig) -> tuple[PhotoCollection, list[Interaction]]:
    rng = np.random.default_rng(config.seed)
    widen = 1.0 + config.ambiguity
    noise_share = 0.0
    total_tags = config.event_tags_per_photo + config.noise_tags_per_photo
    if total_tags:
        noise_share = min(1.0, config.noise_tags_per_photo / total_tags * widen)
    K = config.num_events
    t0 = 1_300_000_000
    window = config.time_center_spread_days * 86400.0
    time_sigma = config.within_event_sigma_hours * 3600.0 * widen
    geo_sigma = config.sigma_km * widen
    lat0, lat1, lon0, lon1 = config.geo_box

    centers_t = t0 + rng.uniform(0.0, window, size=K)
    centers_lat = rng.uniform(lat0, lat1, size=K)
    centers_lon = rng.uniform(lon0, lon1, size=K)

    # attendees: a private block of users per event, some also attend a second event
    attendees: list[list[str]] = [[] for _ in range(K)]
    users = []
    for k in range(K):
        for u in range(config.users_per_event):
            uid = f"u{k:03d}_{u:02d}"
            users.append(uid)
            attendees[k].append(uid)
    for uid in list(users):
        if K > 1 and rng.random() < config.p_user_second_event:
            home = int(uid[1:4])
            other = int(rng.integers(0, K - 1))
            other += other >= home
            attendees[other].append(uid)
    attends = {(uid, k) for k in range(K) for uid in attendees[k]}

    noise_vocab = [f"n{v:03d}" for v in range(config.noise_vocab_size)]
    photos = []
    lo, hi = config.photos_per_event
    for k in range(K):
        event_id = f"e{k:03d}"
        vocab = [f"t{k:03d}x{v:02d}" for v in range(config.tags_per_event)]
        words = [f"w{k:03d}x{v:02d}" for v in range(config.tags_per_event)]
        for _ in range(int(rng.integers(lo, hi + 1))):
            hex_id = "".join(f"{b:02x}" for b in rng.integers(0, 256, size=6))
            taken = int(round(centers_t[k] + rng.normal(0.0, time_sigma)))
            upload = taken + int(round(rng.exponential(config.upload_delay_mean_hours * 3600.0)))
            if rng.random() < config.geo_missing_rate:
                lat = lon = None
            else:
                dy, dx = rng.normal(0.0, geo_sigma, size=2)
                lat = float(np.clip(centers_lat[k] + dy / KM_PER_DEGREE, -90.0, 90.0))
                scale = KM_PER_DEGREE * max(math.cos(math.radians(lat)), 1e-6)
                lon = float((centers_lon[k] + dx / scale + 180.0) % 360.0 - 180.0)
                lat, lon = round(lat, 6), round(lon, 6)
            tags = []
            for _ in range(total_tags):
                if rng.random() < noise_share:
                    tags.append(noise_vocab[int(rng.integers(len(noise_vocab)))])
                else:
                    tags.append(vocab[int(rng.integers(len(vocab)))])
            title = " ".join(
                noise_vocab[int(rng.integers(len(noise_vocab)))]
                if noise_vocab and rng.random() < noise_share else words[int(rng.integers(len(words)))]
                for _ in range(config.title_words) if words)
            description = None
            if rng.random() < config.p_description and words:
                description = " ".join(words[int(rng.integers(len(words)))] for _ in range(2))
            owner = attendees[k][int(rng.integers(len(attendees[k])))]
            photos.append(Photo(
                photo_id=f"p{hex_id}",
                user_id=owner,
                taken_time=taken,
                upload_time=upload,
                latitude=lat,
                longitude=lon,
                tags=tuple(dict.fromkeys(tags)),
                title=title or None,
                description=description,
                event_id=event_id,
            ))

    # photo ids are random; regenerate on the rare collision
    seen = set()
    for idx, p in enumerate(photos):
        pid = p.photo_id
        while pid in seen:
            pid = "p" + "".join(f"{b:02x}" for b in rng.integers(0, 256, size=6))
        seen.add(pid)
        if pid != p.photo_id:
            photos[idx] = dataclasses.replace(p, photo_id=pid)

    interactions = []
    event_of = {p.photo_id: int(p.event_id[1:]) for p in photos}
    for p in photos:
        k = event_of[p.photo_id]
        for uid in users:
            if uid == p.user_id:
                continue
            inside = (uid, k) in attends
            pc = config.p_comment_in if inside else config.p_comment_out
            pf = config.p_favorite_in if inside else config.p_favorite_out
            draws = rng.random(3)
            if draws[0] < pc:
                when = p.upload_time + int(rng.integers(60, 14 * 86400))
                interactions.append(Interaction(InteractionKind.COMMENT, uid, p.photo_id, when))
                if draws[1] < pc:
                    when2 = when + int(rng.integers(60, 86400))
                    interactions.append(Interaction(InteractionKind.COMMENT, uid, p.photo_id, when2))
            if draws[2] < pf:
                when = p.upload_time + int(rng.integers(60, 14 * 86400))
                interactions.append(Interaction(InteractionKind.FAVORITE, uid, p.photo_id, when))

    photos.sort(key=lambda p: (p.upload_time, p.photo_id))
    interactions.sort(key=lambda it: (it.time, it.user_id, it.photo_id, it.kind.value))
    return PhotoCollection(tuple(photos)), interactions
