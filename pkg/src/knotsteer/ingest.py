"""Protein-backbone angle dataset: extraction, partition and serialization.

``angles_from_coordinates`` measures bending angles over vertex triples and
dihedrals over quadruples with exactly the conventions of
:func:`knotsteer.gsaw.place_bead`, so rebuilding a chain from its angle list
reproduces it (and vice versa).  The alpha-carbon parser reads fixed-column
crystallographic text records, groups by chain, and splits chains at
residue-number gaps.

The bundled ``protein_angles.csv`` asset is a synthetic surrogate generated
by ``scripts/build_angle_dataset.py``: a mixture model reproducing the
documented two-peak structure of backbone angle statistics (a tight helical
peak with a broad non-helical remainder).  The parser exists so the dataset
can be regenerated from real coordinate files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import DegeneratePartition, EmptyInput, InvalidArgument
from .geometry import bending_angles, dihedral_angles
from .gsaw import AnglePair

# helical peak in our angle convention, expanded to the half-peak contour
DEFAULT_HELICAL_REGION = None  # set below, after HelicalRegion is defined


@dataclass(frozen=True)
class HelicalRegion:
    """Angle-space rectangle delimiting the helical basin.

    The default spans the full watershed basin around the helical peak
    (ideal alpha geometry sits near theta 1.55, phi 0.89): drawing only
    from a tight peak neighbourhood produces near-ideal solenoids whose
    axes are too straight to entangle at the chain lengths studied here,
    which contradicts the observed behaviour of helix-constrained walks.
    """

    theta_min: float = 1.15
    theta_max: float = 2.12
    phi_min: float = 0.25
    phi_max: float = 3.00

    def __post_init__(self):
        if not (0 <= self.theta_min < self.theta_max <= math.pi):
            raise InvalidArgument("degenerate theta range")
        if not (0 <= self.phi_min < self.phi_max <= 2 * math.pi):
            raise InvalidArgument("degenerate phi range")

    def contains(self, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
        return ((theta >= self.theta_min) & (theta <= self.theta_max)
                & (phi >= self.phi_min) & (phi <= self.phi_max))


DEFAULT_HELICAL_REGION = HelicalRegion()


@dataclass
class AngleDataset:
    theta: np.ndarray
    phi: np.ndarray
    helical: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64)
        self.phi = np.asarray(self.phi, dtype=np.float64)
        self.helical = np.asarray(self.helical, dtype=bool)
        if self.theta.size == 0:
            raise EmptyInput("angle dataset is empty")
        if not (self.theta.shape == self.phi.shape == self.helical.shape):
            raise InvalidArgument("dataset column lengths differ")
        if np.any((self.theta < 0) | (self.theta > math.pi)):
            raise InvalidArgument("theta out of [0, pi]")
        if np.any((self.phi < 0) | (self.phi >= 2 * math.pi)):
            raise InvalidArgument("phi out of [0, 2pi)")

    def __len__(self) -> int:
        return self.theta.size

    def helical_fraction(self) -> float:
        return float(self.helical.mean())


def angles_from_coordinates(points) -> tuple[list[AnglePair], int]:
    """Correlated (theta, phi) pairs along a backbone, plus exclusion count.

    Pair ``j`` combines the bending angle at vertex ``j + 1`` with the
    dihedral of vertices ``j .. j + 3`` — exactly what placing bead
    ``j + 3`` consumes — so a chain built from its own angle list is
    reproduced.  Pairs whose dihedral is undefined (collinear triple)
    are excluded and counted.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 4:
        raise InvalidArgument("need at least 4 points")
    seps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    if np.any(seps < 1e-9):
        raise InvalidArgument("consecutive points must be distinct")
    theta = bending_angles(pts)
    phi, defined = dihedral_angles(pts)
    pairs = []
    excluded = 0
    for j in range(phi.size):
        if not defined[j]:
            excluded += 1
            continue
        pairs.append(AnglePair(theta=float(theta[j + 1]),
                               phi=float(np.mod(phi[j], 2 * math.pi))))
    return pairs, excluded


def chain_from_angles(pairs, bond_length: float = 2.0,
                      first_theta: float = math.pi / 2) -> np.ndarray:
    """Rebuild a chain from angle pairs (inverse of angles_from_coordinates).

    The first two beads sit at the origin and along +x; the third is placed
    at ``first_theta`` (not recoverable from the pairs — any non-collinear
    value keeps the first dihedral defined).
    """
    from .gsaw import place_bead, place_third_bead

    pts = [np.zeros(3), np.array([bond_length, 0.0, 0.0])]
    pts.append(place_third_bead(pts, first_theta, bond_length))
    for pair in pairs:
        pts.append(place_bead(pts[-3:], pair, bond_length))
    return np.array(pts)


def parse_calpha(source) -> tuple[list[np.ndarray], int]:
    """Alpha-carbon traces from fixed-column coordinate records.

    Accepts a path or an iterable of lines.  Returns (fragments, warning
    count): one (n, 3) array per chain fragment, split wherever residue
    numbering jumps; malformed records are skipped and counted.
    """
    if hasattr(source, "__iter__") and not isinstance(source, (str, bytes)):
        lines = list(source)
    else:
        with open(source, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    warnings = 0
    chains: dict[str, list[tuple[int, np.ndarray]]] = {}
    for line in lines:
        if not line.startswith(("ATOM", "HETATM")):
            continue
        name = line[12:16].strip()
        if name != "CA":
            continue
        altloc = line[16:17]
        if altloc not in (" ", "", "A"):
            continue
        try:
            chain_id = line[21:22]
            resseq = int(line[22:26])
            xyz = np.array([float(line[30:38]), float(line[38:46]), float(line[46:54])])
        except (ValueError, IndexError):
            warnings += 1
            continue
        if not np.all(np.isfinite(xyz)):
            warnings += 1
            continue
        chains.setdefault(chain_id, []).append((resseq, xyz))
    fragments: list[np.ndarray] = []
    for chain_id in sorted(chains):
        records = sorted(chains[chain_id], key=lambda r: r[0])
        run: list[np.ndarray] = []
        prev = None
        for resseq, xyz in records:
            if prev is not None and resseq != prev + 1:
                if len(run) >= 2:
                    fragments.append(np.array(run))
                run = []
            run.append(xyz)
            prev = resseq
        if len(run) >= 2:
            fragments.append(np.array(run))
    if not fragments:
        raise EmptyInput("no alpha-carbon records found")
    return fragments, warnings


def partition_helical(dataset: AngleDataset,
                      region: HelicalRegion = DEFAULT_HELICAL_REGION) -> AngleDataset:
    """Flag pairs inside the helical region; both subsets must be non-empty."""
    flags = region.contains(dataset.theta, dataset.phi)
    if not np.any(flags) or np.all(flags):
        raise DegeneratePartition(
            f"helical partition left an empty subset (helical fraction "
            f"{float(flags.mean()):.3f})")
    return AngleDataset(theta=dataset.theta, phi=dataset.phi, helical=flags,
                        metadata=dict(dataset.metadata,
                                      region=(region.theta_min, region.theta_max,
                                              region.phi_min, region.phi_max)))


def write_dataset(path, dataset: AngleDataset) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key in sorted(dataset.metadata):
            fh.write(f"# {key}: {dataset.metadata[key]}\n")
        fh.write("theta_rad,phi_rad,helical\n")
        for t, p, h in zip(dataset.theta, dataset.phi, dataset.helical):
            fh.write(f"{float(t)!r},{float(p)!r},{int(h)}\n")


def read_dataset(path_or_file) -> AngleDataset:
    def parse(fh):
        metadata = {}
        theta, phi, helical = [], [], []
        header_seen = False
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if ":" in line:
                    key, _, value = line[1:].partition(":")
                    metadata[key.strip()] = value.strip()
                continue
            if not header_seen:
                if line != "theta_rad,phi_rad,helical":
                    raise InvalidArgument(f"unexpected dataset header {line!r}")
                header_seen = True
                continue
            t, p, h = line.split(",")
            theta.append(float(t))
            phi.append(float(p))
            helical.append(bool(int(h)))
        if not theta:
            raise EmptyInput("dataset file holds no angle pairs")
        return AngleDataset(theta=np.array(theta), phi=np.array(phi),
                            helical=np.array(helical), metadata=metadata)

    if hasattr(path_or_file, "read"):
        return parse(path_or_file)
    with open(path_or_file, "r", encoding="utf-8") as fh:
        return parse(fh)


def bundled_dataset() -> AngleDataset:
    ref = resources.files("knotsteer").joinpath("data/protein_angles.csv")
    with ref.open("r", encoding="utf-8") as fh:
        return read_dataset(fh)
