"""Geographic primitives: great-circle distance and k-means over the sphere."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

EARTH_RADIUS_KM = 6371.0

KMEANS_MAX_ITERS = 100
KMEANS_TOL_KM = 1e-9


@dataclass(frozen=True)
class GeoPoint:
    """A latitude/longitude pair in degrees. Validated at construction."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ValueError(f"non-finite coordinates: ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class CentroidSet:
    """Ordered cluster centroids; order is stable for a given seed."""

    centroids: tuple[GeoPoint, ...]

    def __post_init__(self):
        if not self.centroids:
            raise ValueError("empty centroid set")
        object.__setattr__(self, "centroids", tuple(self.centroids))

    @property
    def k(self) -> int:
        return len(self.centroids)

    def __len__(self) -> int:
        return len(self.centroids)

    def __getitem__(self, i: int) -> GeoPoint:
        return self.centroids[i]


def great_circle_km(a: GeoPoint, b: GeoPoint) -> float:
    """Haversine distance in km on a spherical Earth of radius 6371 km."""
    lat1 = math.radians(a.lat)
    lat2 = math.radians(b.lat)
    dlat = math.radians(b.lat - a.lat)
    dlon = math.radians(b.lon - a.lon)
    s = math.sin(dlat * 0.5) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon * 0.5) ** 2
    return EARTH_RADIUS_KM * 2.0 * math.asin(min(1.0, math.sqrt(s)))


def _to_unit_vector(p: GeoPoint) -> tuple[float, float, float]:
    lat = math.radians(p.lat)
    lon = math.radians(p.lon)
    return (math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat))


def _from_unit_vector(x: float, y: float, z: float) -> GeoPoint:
    norm = math.sqrt(x * x + y * y + z * z)
    if norm == 0.0:
        # Antipodal cancellation; fall back to the north pole projection.
        return GeoPoint(90.0, 0.0)
    x, y, z = x / norm, y / norm, z / norm
    lat = math.degrees(math.asin(max(-1.0, min(1.0, z))))
    lon = math.degrees(math.atan2(y, x))
    return GeoPoint(lat, lon)


def _spherical_mean(points: list[GeoPoint]) -> GeoPoint:
    # 3D mean reprojected to the sphere; lat/lon averaging breaks at the antimeridian.
    sx = sy = sz = 0.0
    for p in points:
        x, y, z = _to_unit_vector(p)
        sx += x
        sy += y
        sz += z
    return _from_unit_vector(sx, sy, sz)


def kmeans(points: list[GeoPoint], k: int, seed: int) -> CentroidSet:
    """Lloyd's algorithm under the great-circle metric.

    Initial centroids are k distinct members of `points` chosen by the seed;
    centroid updates use the spherical mean of the assigned points.
    Deterministic for a fixed seed.
    """
    if not points:
        raise ValueError("kmeans: empty point list")
    if k < 1 or k > len(points):
        raise ValueError(f"kmeans: k={k} out of range for {len(points)} points")
    rng = random.Random(seed)
    centroids = [points[i] for i in rng.sample(range(len(points)), k)]
    assignment: list[int] = []
    for _ in range(KMEANS_MAX_ITERS):
        assignment = [
            min(range(k), key=lambda j: great_circle_km(p, centroids[j])) for p in points
        ]
        new_centroids = []
        for j in range(k):
            members = [p for p, a in zip(points, assignment) if a == j]
            # An emptied cluster keeps its previous centroid.
            new_centroids.append(_spherical_mean(members) if members else centroids[j])
        shift = max(great_circle_km(c, n) for c, n in zip(centroids, new_centroids))
        centroids = new_centroids
        if shift <= KMEANS_TOL_KM:
            break
    return CentroidSet(tuple(centroids))


def closest_centroid(p: GeoPoint, c: CentroidSet) -> int:
    """Index of the nearest centroid; ties go to the lowest index."""
    best = 0
    best_d = great_circle_km(p, c[0])
    for i in range(1, len(c)):
        d = great_circle_km(p, c[i])
        if d < best_d:
            best, best_d = i, d
    return best


def load_locations(path: str) -> list[tuple[str, GeoPoint]]:
    """Read a location dataset: one JSON record per line with id, lat, lon."""
    out: list[tuple[str, GeoPoint]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                out.append((str(rec["id"]), GeoPoint(float(rec["lat"]), float(rec["lon"]))))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad location record: {exc}") from exc
    return out
