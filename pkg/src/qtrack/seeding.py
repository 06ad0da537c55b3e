"""Doublet and triplet seeding.

Two hits on adjacent layers form a doublet; two doublets sharing their
middle hit form a triplet.  Triplets carry the signed curvature of the
circle through their three hits in the transverse plane, the mismatch of
the two longitudinal slopes, and the azimuth used later for slicing.
Two triplets whose hits overlap as (a,b,c)/(b,c,d) are quadruplet
candidates and get recorded as links.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .detector import TWO_PI, Event, Hit


@dataclass(frozen=True)
class Doublet:
    hit_a: int
    hit_b: int
    dphi: float
    dz_dr: float


@dataclass(frozen=True)
class Triplet:
    hits: tuple[int, int, int]
    curvature: float
    dz_slope_residual: float
    phi: float
    truth_flag: bool


@dataclass(frozen=True)
class QuadrupletLink:
    triplet_i: int
    triplet_j: int
    shared_hits: tuple[int, int]


@dataclass(frozen=True)
class SeedingCuts:
    """Pre-selection cuts, all config-exposed.

    Defaults retain essentially all truth triplets for the default
    geometry and smearing while bounding combinatorics.
    """

    max_dphi: float = 0.1
    max_dz_dr: float = 1.5
    max_curvature: float = 8.0
    max_dz_residual: float = 0.2
    phi_reference: str = "innermost"  # or "mean"


def _wrap_dphi(dphi: float) -> float:
    """Difference of azimuths wrapped into (-pi, pi]."""
    return (dphi + math.pi) % TWO_PI - math.pi


def build_doublets(event: Event, max_dphi: float = 0.1, max_dz_dr: float = 1.5) -> list[Doublet]:
    """All adjacent-layer hit pairs passing the |dphi| and |dz/dr| cuts.

    Output is ordered by (layer, hit_a, hit_b) and independent of the input
    hit ordering.
    """
    by_layer: dict[int, list[Hit]] = {}
    for h in event.hits:
        by_layer.setdefault(h.layer_index, []).append(h)
    for hs in by_layer.values():
        hs.sort(key=lambda h: h.id)

    doublets = []
    for layer in sorted(by_layer):
        inner, outer = by_layer[layer], by_layer.get(layer + 1, [])
        for ha in inner:
            for hb in outer:
                dphi = _wrap_dphi(hb.phi - ha.phi)
                if abs(dphi) > max_dphi:
                    continue
                dr = hb.r - ha.r
                dz_dr = (hb.z - ha.z) / dr if dr > 0.0 else math.inf
                if abs(dz_dr) > max_dz_dr:
                    continue
                doublets.append(Doublet(ha.id, hb.id, dphi, dz_dr))
    return doublets


def circle_curvature(a: tuple[float, float], b: tuple[float, float], c: tuple[float, float]) -> float:
    """Signed inverse circumradius of three transverse points.

    Positive for counter-clockwise a->b->c; exactly zero for collinear
    points.  Sign flips under y -> -y.
    """
    abx, aby = b[0] - a[0], b[1] - a[1]
    acx, acy = c[0] - a[0], c[1] - a[1]
    cross = abx * acy - aby * acx
    if cross == 0.0:
        return 0.0
    lab = math.hypot(abx, aby)
    lac = math.hypot(acx, acy)
    lbc = math.hypot(c[0] - b[0], c[1] - b[1])
    return 2.0 * cross / (lab * lac * lbc)


def build_triplets(
    event: Event,
    doublets: list[Doublet],
    max_curvature: float = 8.0,
    max_dz_residual: float = 0.2,
    phi_reference: str = "innermost",
) -> list[Triplet]:
    """Combine doublets (a,b) and (b,c) into triplets (a,b,c).

    Keeps pairs with |curvature| <= max_curvature and slope residual
    |dz_dr(ab) - dz_dr(bc)| <= max_dz_residual.  The truth flag is set when
    all three hits stem from the same particle on consecutive layers.
    ``phi_reference`` selects the slicing azimuth: that of the innermost
    hit, or the circular mean of the three hit azimuths.
    """
    if phi_reference not in ("innermost", "mean"):
        raise ValueError(f"unknown phi_reference {phi_reference!r}")
    hits = event.hit_by_id()
    by_first: dict[int, list[Doublet]] = {}
    for d in doublets:
        by_first.setdefault(d.hit_a, []).append(d)

    triplets = []
    for d1 in doublets:
        for d2 in by_first.get(d1.hit_b, []):
            ha, hb, hc = hits[d1.hit_a], hits[d1.hit_b], hits[d2.hit_b]
            residual = abs(d1.dz_dr - d2.dz_dr)
            if residual > max_dz_residual:
                continue
            curvature = circle_curvature((ha.x, ha.y), (hb.x, hb.y), (hc.x, hc.y))
            if not (math.isfinite(curvature) and math.isfinite(residual)):
                raise ValueError(f"non-finite features for triplet {(ha.id, hb.id, hc.id)}")
            if abs(curvature) > max_curvature:
                continue
            truth = (
                ha.truth_particle is not None
                and ha.truth_particle == hb.truth_particle == hc.truth_particle
                and hb.layer_index == ha.layer_index + 1
                and hc.layer_index == hb.layer_index + 1
            )
            if phi_reference == "innermost":
                phi = ha.phi
            else:
                phi = math.atan2(
                    sum(math.sin(h.phi) for h in (ha, hb, hc)),
                    sum(math.cos(h.phi) for h in (ha, hb, hc)),
                ) % TWO_PI
            triplets.append(Triplet((ha.id, hb.id, hc.id), curvature, residual, phi, truth))
    triplets.sort(key=lambda t: t.hits)
    return triplets


def find_quadruplet_links(triplets: list[Triplet]) -> list[QuadrupletLink]:
    """Ordered pairs where the last two hits of one triplet equal the first
    two hits of another, i.e. (a,b,c) and (b,c,d) forming a quadruplet."""
    by_first_two: dict[tuple[int, int], list[int]] = {}
    for j, t in enumerate(triplets):
        by_first_two.setdefault(t.hits[:2], []).append(j)

    links = []
    for i, t in enumerate(triplets):
        for j in by_first_two.get(t.hits[1:], []):
            if i != j:
                links.append(QuadrupletLink(i, j, t.hits[1:]))
    return links


def save_triplets_csv(triplets: list[Triplet], path) -> None:
    """Debug dump of the candidate set."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["triplet_id", "hit_a", "hit_b", "hit_c", "curvature", "phi", "truth_flag"])
        for i, t in enumerate(triplets):
            writer.writerow([i, *t.hits, f"{t.curvature:.9g}", f"{t.phi:.9g}", int(t.truth_flag)])
