"""Synthetic collision events in a cylindrical barrel detector.

Charged particles are traced as helices through concentric barrel layers in
a uniform solenoid field along z.  Every crossed layer produces one hit,
optionally smeared with an isotropic Gaussian.  Events can be written to and
read from a small CSV format (hit_id, x, y, z, layer, particle_id).

Units: meters, Tesla, GeV.  The transverse helix radius follows the usual
pt = 0.3 * B * r rule for unit charges.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

# pt [GeV] = PT_B_R * B [T] * r [m] for |q| = 1
PT_B_R = 0.3

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DetectorGeometry:
    """Barrel layers at fixed radii inside a uniform field along z."""

    layer_radii: tuple[float, ...]
    half_length_z: float = 0.5
    magnetic_field: float = 2.0

    def __post_init__(self):
        radii = tuple(float(r) for r in self.layer_radii)
        object.__setattr__(self, "layer_radii", radii)
        if len(radii) < 3:
            raise ValueError("geometry needs at least 3 layers (triplets need 3 hits)")
        if radii[0] <= 0.0 or any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("layer radii must be positive and strictly increasing")
        if self.magnetic_field <= 0.0:
            raise ValueError("magnetic field must be positive")
        if self.half_length_z <= 0.0:
            raise ValueError("half_length_z must be positive")

    @property
    def n_layers(self) -> int:
        return len(self.layer_radii)


#: TrackML-innermost-volume-like 4-layer barrel used throughout.
DEFAULT_GEOMETRY = DetectorGeometry(
    layer_radii=(0.032, 0.072, 0.116, 0.172),
    half_length_z=0.5,
    magnetic_field=2.0,
)


@dataclass(frozen=True)
class Particle:
    """Ground-truth particle.  Kinematic fields are None for particles
    reconstructed from a hits file, where only the id is known."""

    id: int
    charge: int | None = None
    pt: float | None = None
    phi0: float | None = None
    z0: float | None = None
    cot_theta: float | None = None

    def __post_init__(self):
        if self.charge is not None and self.charge not in (-1, 1):
            raise ValueError(f"particle {self.id}: charge must be +-1")
        if self.pt is not None and self.pt <= 0.0:
            raise ValueError(f"particle {self.id}: pt must be positive")
        if self.phi0 is not None and not (0.0 <= self.phi0 < TWO_PI):
            raise ValueError(f"particle {self.id}: phi0 must lie in [0, 2pi)")


@dataclass(frozen=True)
class Hit:
    id: int
    x: float
    y: float
    z: float
    layer_index: int
    truth_particle: int | None = None

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def phi(self) -> float:
        """Azimuth in [0, 2pi)."""
        return math.atan2(self.y, self.x) % TWO_PI


@dataclass
class Event:
    hits: list[Hit] = field(default_factory=list)
    particles: list[Particle] = field(default_factory=list)

    def __post_init__(self):
        ids = [h.id for h in self.hits]
        if len(set(ids)) != len(ids):
            raise ValueError("hit ids must be unique within an event")
        known = {p.id for p in self.particles}
        for h in self.hits:
            if h.truth_particle is not None and h.truth_particle not in known:
                raise ValueError(f"hit {h.id} references unknown particle {h.truth_particle}")

    @property
    def density(self) -> int:
        """Particles per event."""
        return len(self.particles)

    def hit_by_id(self) -> dict[int, Hit]:
        return {h.id: h for h in self.hits}


def helix_radius(pt: float, b_field: float, charge: int) -> float:
    """Transverse helix radius r = pt / (0.3 * B * |q|)."""
    return pt / (PT_B_R * b_field * abs(charge))


def trace_particle(particle: Particle, geometry: DetectorGeometry) -> list[tuple[int, float, float, float]]:
    """Ideal (unsmeared) layer crossings of one helix.

    Returns (layer_index, x, y, z) for every layer the helix reaches with
    2r >= layer radius and |z| <= half_length_z at the crossing.  The helix
    starts at (0, 0, z0) with transverse direction phi0; for charge q in a
    field along +z the circle center sits at angle phi0 - q*pi/2.
    """
    r = helix_radius(particle.pt, geometry.magnetic_field, particle.charge)
    h = 1 if particle.charge > 0 else -1
    psi = particle.phi0 - h * (math.pi / 2.0)
    cx, cy = r * math.cos(psi), r * math.sin(psi)
    alpha0 = psi + math.pi

    crossings = []
    for layer_index, radius in enumerate(geometry.layer_radii):
        if 2.0 * r < radius:
            break  # radii increase: outer layers are unreachable too
        s = 2.0 * r * math.asin(radius / (2.0 * r))  # arc length to first crossing
        z = particle.z0 + particle.cot_theta * s
        if abs(z) > geometry.half_length_z:
            continue
        alpha = alpha0 - h * s / r
        crossings.append((layer_index, cx + r * math.cos(alpha), cy + r * math.sin(alpha), z))
    return crossings


def generate_event(
    geometry: DetectorGeometry,
    density: int,
    smearing_sigma: float = 50e-6,
    seed: int = 0,
    *,
    hit_efficiency: float = 1.0,
    n_noise_hits: int = 0,
) -> Event:
    """Generate one synthetic event with ``density`` helical tracks.

    Particles originate at (0, 0, z0) with z0 ~ N(0, 5 cm), pt log-uniform
    in [0.5, 5] GeV, phi0 uniform, cot(theta) uniform in [-1, 1] and random
    charge.  Hits are smeared with an isotropic Gaussian of width
    ``smearing_sigma``.  Deterministic for a fixed seed.

    ``hit_efficiency`` < 1 randomly drops hits; ``n_noise_hits`` adds hits
    with no truth particle, uniform in azimuth and z on random layers.
    """
    if density < 1:
        raise ValueError("density must be >= 1")
    if smearing_sigma < 0.0:
        raise ValueError("smearing_sigma must be >= 0")
    if not (0.0 < hit_efficiency <= 1.0):
        raise ValueError("hit_efficiency must lie in (0, 1]")
    if n_noise_hits < 0:
        raise ValueError("n_noise_hits must be >= 0")

    rng = np.random.default_rng(seed)
    particles = []
    for pid in range(density):
        particles.append(
            Particle(
                id=pid,
                charge=int(rng.integers(0, 2)) * 2 - 1,
                pt=float(np.exp(rng.uniform(math.log(0.5), math.log(5.0)))),
                phi0=float(rng.uniform(0.0, TWO_PI)),
                z0=float(rng.normal(0.0, 0.05)),
                cot_theta=float(rng.uniform(-1.0, 1.0)),
            )
        )

    hits = []
    hit_id = 0
    for p in particles:
        for layer_index, x, y, z in trace_particle(p, geometry):
            if hit_efficiency < 1.0 and rng.random() >= hit_efficiency:
                continue
            if smearing_sigma > 0.0:
                dx, dy, dz = rng.normal(0.0, smearing_sigma, 3)
                x, y, z = x + dx, y + dy, z + dz
            hits.append(Hit(hit_id, x, y, z, layer_index, truth_particle=p.id))
            hit_id += 1

    for _ in range(n_noise_hits):
        layer_index = int(rng.integers(0, geometry.n_layers))
        radius = geometry.layer_radii[layer_index]
        phi = rng.uniform(0.0, TWO_PI)
        x, y = radius * math.cos(phi), radius * math.sin(phi)
        z = float(rng.uniform(-geometry.half_length_z, geometry.half_length_z))
        if smearing_sigma > 0.0:
            dx, dy, dz = rng.normal(0.0, smearing_sigma, 3)
            x, y, z = x + dx, y + dy, z + dz
        hits.append(Hit(hit_id, x, y, z, layer_index, truth_particle=None))
        hit_id += 1

    return Event(hits=hits, particles=particles)


CSV_HEADER = ["hit_id", "x", "y", "z", "layer", "particle_id"]
# coordinates round-trip through the file at 9 significant digits
_COORD_FMT = "{:.9g}"


def save_hits_csv(event: Event, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        for h in event.hits:
            writer.writerow(
                [
                    h.id,
                    _COORD_FMT.format(h.x),
                    _COORD_FMT.format(h.y),
                    _COORD_FMT.format(h.z),
                    h.layer_index,
                    "" if h.truth_particle is None else h.truth_particle,
                ]
            )


def load_hits_csv(path) -> Event:
    """Read an event back from CSV.

    Particle records are id-only stubs: the file stores hits, not
    kinematics.  Malformed rows raise ValueError naming the 1-based line
    number; duplicate hit ids are rejected.
    """
    hits = []
    seen_ids = set()
    with open(path, newline="") as f:
        reader = csv.reader(f)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1:
                if [c.strip() for c in row] != CSV_HEADER:
                    raise ValueError(f"line 1: expected header {','.join(CSV_HEADER)}")
                continue
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(CSV_HEADER):
                raise ValueError(f"line {lineno}: expected {len(CSV_HEADER)} columns, got {len(row)}")
            try:
                hid = int(row[0])
                x, y, z = float(row[1]), float(row[2]), float(row[3])
                layer = int(row[4])
                pid = None if row[5].strip() == "" else int(row[5])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            if hid in seen_ids:
                raise ValueError(f"line {lineno}: duplicate hit_id {hid}")
            seen_ids.add(hid)
            hits.append(Hit(hid, x, y, z, layer, truth_particle=pid))

    pids = sorted({h.truth_particle for h in hits if h.truth_particle is not None})
    return Event(hits=hits, particles=[Particle(id=pid) for pid in pids])
