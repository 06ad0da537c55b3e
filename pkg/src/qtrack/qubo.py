"""Triplet-selection cost function and its qubit form.

The cost of a binary triplet selection T is

    Q(T) = sum_i a_i T_i + sum_{i<j} b_ij T_i T_j

where a_i rates the quality of triplet i and b_ij the compatibility of a
pair: quadruplet-forming pairs attract (b_ij < 0), pairs fighting over a
hit repel (b_ij > 0).  Substituting T_i -> (1 - Z_i)/2 turns Q into a
diagonal Ising Hamiltonian over one qubit per triplet; minimizing Q and
finding the Hamiltonian ground state are the same problem.

For hardware-sized problems the full QUBO is cut into overlapping
sub-QUBOs: triplets are sorted by azimuth and grouped into slices of k
consecutive triplets overlapping by k/2, the last slice wrapping around
the 2pi seam so that every triplet sits in exactly two slices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .seeding import QuadrupletLink, Triplet


@dataclass(frozen=True)
class CoefficientWeights:
    """Coefficient scheme for the cost function, all config-exposed.

    Linear terms: a_i = w_a * (1 - q_i) with quality
    q_i = exp(-|curvature|/c0) * exp(-dz_slope_residual/r0).
    Quadruplet pairs: b_ij = -w_s * (1 - (delta/delta_max)**kappa)
    clamped to [-w_s, 0], delta = |curv_i - curv_j|.
    Hit-sharing pairs without a quadruplet link: b_ij = +w_conflict.
    """

    w_a: float = 0.5
    c0: float = 4.0
    r0: float = 0.1
    w_s: float = 1.0
    delta_max: float = 1.0
    kappa: float = 2.0
    w_conflict: float = 1.0


class Qubo:
    """Immutable quadratic binary cost: linear a_i plus couplings b_ij (i<j).

    ``triplet_ids`` maps variable index to the triplet's global index; it is
    None for QUBOs that do not come from a tracking event.
    """

    __slots__ = ("n", "linear", "couplings", "triplet_ids", "_rows", "_cols", "_vals")

    def __init__(self, n, linear, couplings, triplet_ids=None):
        self.n = int(n)
        self.linear = np.asarray(linear, dtype=float)
        if self.linear.shape != (self.n,):
            raise ValueError(f"linear terms must have length {self.n}")
        clean = {}
        for (i, j), b in couplings.items():
            if not (0 <= i < j < self.n):
                raise ValueError(f"coupling key ({i}, {j}) must satisfy 0 <= i < j < n")
            if b != 0.0:
                clean[(int(i), int(j))] = float(b)
        self.couplings = clean
        self.triplet_ids = None if triplet_ids is None else list(triplet_ids)
        if self.triplet_ids is not None and len(self.triplet_ids) != self.n:
            raise ValueError("triplet_ids must have one entry per variable")
        keys = sorted(clean)
        self._rows = np.array([k[0] for k in keys], dtype=np.intp)
        self._cols = np.array([k[1] for k in keys], dtype=np.intp)
        self._vals = np.array([clean[k] for k in keys], dtype=float)

    def evaluate(self, bits) -> float:
        """Q(bits); bits is a 0/1 vector of length n."""
        t = np.asarray(bits, dtype=float)
        if t.shape != (self.n,):
            raise ValueError(f"expected {self.n} bits, got shape {t.shape}")
        return float(self.linear @ t + (t[self._rows] * t[self._cols]) @ self._vals)

    def evaluate_indices(self, indices) -> np.ndarray:
        """Energies of basis-state indices (bit i of the index = variable i)."""
        idx = np.asarray(indices, dtype=np.int64)
        bits = (idx[:, None] >> np.arange(self.n)) & 1
        energies = bits.astype(float) @ self.linear
        if self._vals.size:
            energies += (bits[:, self._rows] * bits[:, self._cols]).astype(float) @ self._vals
        return energies


def evaluate(qubo: Qubo, bits) -> float:
    return qubo.evaluate(bits)


def build_qubo(
    triplets: list[Triplet],
    links: list[QuadrupletLink],
    weights: CoefficientWeights = CoefficientWeights(),
) -> Qubo:
    """Assemble the selection QUBO from a candidate set and its links."""
    n = len(triplets)
    linear = np.empty(n)
    for i, t in enumerate(triplets):
        if not (math.isfinite(t.curvature) and math.isfinite(t.dz_slope_residual)):
            raise ValueError(f"non-finite features for triplet {i} {t.hits}")
        quality = math.exp(-abs(t.curvature) / weights.c0) * math.exp(
            -t.dz_slope_residual / weights.r0
        )
        linear[i] = weights.w_a * (1.0 - quality)

    linked = set()
    couplings = {}
    for link in links:
        i, j = sorted((link.triplet_i, link.triplet_j))
        linked.add((i, j))
        delta = abs(triplets[i].curvature - triplets[j].curvature)
        b = -weights.w_s * (1.0 - (delta / weights.delta_max) ** weights.kappa)
        couplings[(i, j)] = min(0.0, max(-weights.w_s, b))

    by_hit: dict[int, list[int]] = {}
    for i, t in enumerate(triplets):
        for h in t.hits:
            by_hit.setdefault(h, []).append(i)
    for members in by_hit.values():
        for a_pos, i in enumerate(members):
            for j in members[a_pos + 1 :]:
                if (i, j) not in linked:
                    couplings[(i, j)] = weights.w_conflict

    return Qubo(n, linear, couplings, triplet_ids=list(range(n)))


@dataclass(frozen=True)
class Assignment:
    bits: np.ndarray
    energy: float


@dataclass(frozen=True)
class IsingHamiltonian:
    """Diagonal Hamiltonian: offset + sum c_i Z_i + sum c_ij Z_i Z_j."""

    offset: float
    z_coeffs: np.ndarray
    zz_coeffs: dict[tuple[int, int], float]

    @property
    def n(self) -> int:
        return len(self.z_coeffs)

    def energy(self, bits) -> float:
        """Energy of a computational basis state; bit 1 means z = -1."""
        z = 1.0 - 2.0 * np.asarray(bits, dtype=float)
        e = self.offset + float(self.z_coeffs @ z)
        for (i, j), c in self.zz_coeffs.items():
            e += c * z[i] * z[j]
        return e


def map_to_ising(qubo: Qubo) -> IsingHamiltonian:
    """Map T_i -> (1 - Z_i)/2, so qubit value 1 corresponds to z = -1.

    offset = sum a_i/2 + sum b_ij/4
    c_i    = -a_i/2 - (1/4) sum_{j != i} b_ij
    c_ij   = b_ij/4
    and the Ising energy equals Q on every bitstring.
    """
    offset = float(qubo.linear.sum() / 2.0)
    z_coeffs = -qubo.linear / 2.0
    zz = {}
    for (i, j), b in qubo.couplings.items():
        offset += b / 4.0
        z_coeffs[i] -= b / 4.0
        z_coeffs[j] -= b / 4.0
        zz[(i, j)] = b / 4.0
    return IsingHamiltonian(offset, z_coeffs, zz)


@dataclass(frozen=True)
class SubQubo:
    qubo: Qubo
    slice_index: int
    member_global_indices: list[int]


def restrict(qubo: Qubo, members: list[int]) -> Qubo:
    """Restriction of a QUBO to a subset of variables.

    Couplings with an endpoint outside the subset are dropped (no boundary
    terms).  Variables keep the sorted order of ``members``.
    """
    members = sorted(members)
    pos = {g: k for k, g in enumerate(members)}
    linear = qubo.linear[members]
    couplings = {}
    for (i, j), b in qubo.couplings.items():
        if i in pos and j in pos:
            couplings[(pos[i], pos[j])] = b
    ids = members if qubo.triplet_ids is None else [qubo.triplet_ids[g] for g in members]
    return Qubo(len(members), linear, couplings, triplet_ids=ids)


def slice_subqubos(triplets: list[Triplet], qubo: Qubo, k: int) -> list[SubQubo]:
    """Cut the full QUBO into azimuthal slices of k consecutive triplets.

    Triplets are sorted by phi (ties broken by index); slices start at
    offsets 0, k/2, k, ... and the final slice wraps around the seam.  For
    k < n every triplet lands in exactly two slices; when k/2 does not
    divide n the two slices at the seam absorb the remainder and are
    slightly larger than k.  k == n degenerates to a single slice.
    """
    n = len(triplets)
    if qubo.n != n:
        raise ValueError("qubo and triplet list disagree on size")
    if k % 2 != 0:
        raise ValueError("slice size k must be even")
    if k < 4:
        raise ValueError("slice size k must be >= 4")
    if k > n:
        raise ValueError(f"slice size k={k} exceeds triplet count {n}")

    order = sorted(range(n), key=lambda i: (triplets[i].phi, i))
    if k == n:
        return [SubQubo(restrict(qubo, order), 0, sorted(order))]

    half = k // 2
    n_interior = (n - k) // half + 1
    windows = []
    for s in range(n_interior - 1):
        windows.append(order[s * half : s * half + k])
    start_last = (n_interior - 1) * half
    windows.append(order[start_last:])  # extends to the seam, size k + (n-k) % half
    windows.append(order[n_interior * half :] + order[:half])  # wrap slice

    out = []
    for slice_index, members in enumerate(windows):
        out.append(SubQubo(restrict(qubo, members), slice_index, sorted(members)))
    return out


def merge_slice_solutions(subqubos: list[SubQubo], slice_bits, n: int) -> np.ndarray:
    """Union rule: a triplet is positive iff it is positive in at least one
    of the slices containing it.  Returns the global 0/1 vector."""
    if len(slice_bits) != len(subqubos):
        raise ValueError(f"expected {len(subqubos)} slice assignments, got {len(slice_bits)}")
    merged = np.zeros(n, dtype=np.uint8)
    for sub, bits in zip(subqubos, slice_bits):
        if bits is None:
            raise ValueError(f"missing assignment for slice {sub.slice_index}")
        bits = np.asarray(bits)
        if bits.shape != (sub.qubo.n,):
            raise ValueError(
                f"slice {sub.slice_index}: expected {sub.qubo.n} bits, got shape {bits.shape}"
            )
        for local, g in enumerate(sub.member_global_indices):
            if bits[local]:
                merged[g] = 1
    return merged


# text serialization: `n <count>` header, then `lin i a_i` / `quad i j b_ij`
_TERM_FMT = "{:.17g}"


def save_qubo(qubo: Qubo, path) -> None:
    with open(path, "w") as f:
        f.write(f"n {qubo.n}\n")
        for i, a in enumerate(qubo.linear):
            if a != 0.0:
                f.write(f"lin {i} {_TERM_FMT.format(a)}\n")
        for (i, j) in sorted(qubo.couplings):
            f.write(f"quad {i} {j} {_TERM_FMT.format(qubo.couplings[(i, j)])}\n")


def load_qubo(path) -> Qubo:
    with open(path) as f:
        lines = [ln.strip() for ln in f if ln.strip()]
    if not lines or not lines[0].startswith("n "):
        raise ValueError("QUBO file must start with a 'n <count>' header")
    n = int(lines[0].split()[1])
    linear = np.zeros(n)
    couplings = {}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        try:
            if parts[0] == "lin" and len(parts) == 3:
                linear[int(parts[1])] = float(parts[2])
            elif parts[0] == "quad" and len(parts) == 4:
                couplings[(int(parts[1]), int(parts[2]))] = float(parts[3])
            else:
                raise ValueError(f"unrecognized term {parts[0]!r}")
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return Qubo(n, linear, couplings)
