"""Shared fixtures: small hand-built networks with known geometry."""

import pytest

from relaylab.geo import CentroidSet, GeoPoint
from relaylab.network import (EXIT, GUARD, ClientSpec, DestinationSpec,
                              NetworkSnapshot, RelayDescriptor)


def mk_relay(rid, lat, lon, bw_guard=0.0, bw_middle=0.0, bw_exit=0.0,
             malicious=False, flags=None):
    """Relay helper; flags default to whatever the bandwidths imply."""
    if flags is None:
        flags = set()
        if bw_guard > 0:
            flags.add(GUARD)
        if bw_exit > 0:
            flags.add(EXIT)
    return RelayDescriptor(id=rid, location=GeoPoint(lat, lon),
                           bw_guard=bw_guard, bw_middle=bw_middle,
                           bw_exit=bw_exit, flags=frozenset(flags),
                           malicious=malicious)


@pytest.fixture
def tri_snapshot():
    """Exactly one candidate per position: forced path g/m/x."""
    return NetworkSnapshot((
        mk_relay("g", 10.0, 0.0, bw_guard=5e6, bw_middle=5e6),
        mk_relay("m", 20.0, 0.0, bw_middle=3e6),
        mk_relay("x", 30.0, 0.0, bw_middle=4e6, bw_exit=4e6),
    ))


@pytest.fixture
def ten_snapshot():
    """Ten relays, three positions, spread locations and bandwidths."""
    rows = [
        ("g0", 48.0, 2.0, 8e6, 8e6, 0.0),
        ("g1", 40.0, -74.0, 2e6, 2e6, 0.0),
        ("g2", 35.0, 139.0, 5e6, 5e6, 0.0),
        ("m0", 52.0, 13.0, 0.0, 6e6, 0.0),
        ("m1", 37.0, -122.0, 0.0, 1e6, 0.0),
        ("m2", -23.0, -46.0, 0.0, 9e6, 0.0),
        ("m3", 1.0, 103.0, 0.0, 4e6, 0.0),
        ("x0", 51.0, 0.0, 0.0, 7e6, 7e6),
        ("x1", 39.0, -77.0, 0.0, 3e6, 3e6),
        ("x2", -33.0, 151.0, 0.0, 2e6, 2e6),
    ]
    return NetworkSnapshot(tuple(
        mk_relay(rid, lat, lon, bw_guard=bg, bw_middle=bm, bw_exit=be)
        for rid, lat, lon, bg, bm, be in rows))


@pytest.fixture
def paris_client():
    return ClientSpec("c-paris", GeoPoint(48.85, 2.35), "web")


@pytest.fixture
def two_dests():
    return (DestinationSpec("d-nyc", GeoPoint(40.71, -74.0)),
            DestinationSpec("d-tokyo", GeoPoint(35.68, 139.69)))


@pytest.fixture
def four_centroids():
    return CentroidSet((GeoPoint(45.0, 0.0), GeoPoint(40.0, -80.0),
                        GeoPoint(35.0, 135.0), GeoPoint(-25.0, -50.0)))
