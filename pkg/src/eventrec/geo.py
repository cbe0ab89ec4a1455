"""Great-circle distances and point/polygon geometry on (lat, lon) degrees."""

import numpy as np

EARTH_RADIUS_KM = 6371.0
# points sampled per polygon edge when measuring point-to-edge distance
EDGE_SAMPLES = 64


def haversine(c1, c2):
    """Great-circle distance in km between two (lat, lon) points."""
    lat1, lon1, lat2, lon2 = np.radians([c1[0], c1[1], c2[0], c2[1]])
    a = np.sin((lat2 - lat1) / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
    return float(2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(min(1.0, a))))


def haversine_many(c, points):
    """Distances in km from one point to an ``(n, 2)`` array of points."""
    points = np.asarray(points, dtype=float)
    lat1, lon1 = np.radians(c[0]), np.radians(c[1])
    lat2, lon2 = np.radians(points[:, 0]), np.radians(points[:, 1])
    a = np.sin((lat2 - lat1) / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.minimum(a, 1.0)))


def _on_segment(p, a, b, eps=1e-12):
    (py, px), (ay, ax), (by, bx) = p, a, b
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    if abs(cross) > eps:
        return False
    return min(ax, bx) - eps <= px <= max(ax, bx) + eps and min(ay, by) - eps <= py <= max(ay, by) + eps


def point_in_polygon(c, poly):
    """Ray casting in lat/lon space; points on the boundary count as inside."""
    lat, lon = c
    n = len(poly)
    inside = False
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if _on_segment((lat, lon), a, b):
            return True
        (alat, alon), (blat, blon) = a, b
        if (alat > lat) != (blat > lat):
            cross_lon = alon + (lat - alat) * (blon - alon) / (blat - alat)
            if lon < cross_lon:
                inside = not inside
    return inside


def point_to_polygon(c, poly):
    """Distance in km from a point to a polygon, 0 if the point is inside.

    Each edge is sampled at ``EDGE_SAMPLES`` equidistant points (endpoints
    included) and the smallest haversine distance is returned.
    """
    if len(poly) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    if point_in_polygon(c, poly):
        return 0.0
    verts = np.asarray(poly, dtype=float)
    nxt = np.roll(verts, -1, axis=0)
    t = np.linspace(0.0, 1.0, EDGE_SAMPLES)[None, :, None]
    samples = verts[:, None, :] + t * (nxt - verts)[:, None, :]
    return float(haversine_many(c, samples.reshape(-1, 2)).min())
