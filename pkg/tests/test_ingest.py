import io
import math

import numpy as np
import pytest

from knotsteer.errors import DegeneratePartition, EmptyInput, InvalidArgument
from knotsteer.gsaw import AnglePair
from knotsteer.ingest import (AngleDataset, HelicalRegion, angles_from_coordinates,
                              bundled_dataset, chain_from_angles, parse_calpha,
                              partition_helical, read_dataset, write_dataset)


def pdb_record(serial, resseq, x, y, z, chain="A", name=" CA "):
    return (f"ATOM  {serial:5d} {name} ALA {chain}{resseq:4d}    "
            f"{x:8.3f}{y:8.3f}{z:8.3f}  1.00  0.00           C\n")


class TestAnglesFromCoordinates:
    def test_counts(self, rng):
        pts = np.cumsum(rng.standard_normal((10, 3)), axis=0) * 2.0
        pairs, excluded = angles_from_coordinates(pts)
        assert len(pairs) + excluded == 7  # n - 3

    def test_cis_square_corner_phi_zero(self):
        pts = np.array([[0.0, 0, 0], [2, 0, 0], [2, 2, 0], [0, 2, 0]])
        pairs, excluded = angles_from_coordinates(pts)
        assert excluded == 0
        assert abs(pairs[0].phi) < 1e-12

    def test_collinear_excluded_and_counted(self):
        pts = np.array([[0.0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0], [4, 0, 0]])
        pairs, excluded = angles_from_coordinates(pts)
        assert pairs == []
        assert excluded == 2

    def test_round_trip_identity(self, rng):
        # chain-from-angles then measurement recovers the list exactly
        for _ in range(50):
            n = int(rng.integers(5, 25))
            pairs = [AnglePair(theta=float(rng.uniform(0.25, math.pi - 0.02)),
                               phi=float(rng.uniform(0, 2 * math.pi - 1e-9)))
                     for _ in range(n)]
            pts = chain_from_angles(pairs)
            measured, excluded = angles_from_coordinates(pts)
            assert excluded == 0
            assert len(measured) == n
            for want, got in zip(pairs, measured):
                assert abs(want.theta - got.theta) < 1e-9
                d = abs(want.phi - got.phi)
                assert min(d, 2 * math.pi - d) < 1e-9

    def test_too_short_rejected(self):
        with pytest.raises(InvalidArgument):
            angles_from_coordinates(np.zeros((3, 3)) + np.arange(3)[:, None])


class TestParseCalpha:
    def test_five_records_one_chain(self):
        lines = [pdb_record(i + 1, i + 1, i * 3.8, 0, 0) for i in range(5)]
        fragments, warnings = parse_calpha(lines)
        assert len(fragments) == 1
        assert fragments[0].shape == (5, 3)
        assert warnings == 0

    def test_gap_splits_chain(self):
        lines = [pdb_record(1, 9, 0, 0, 0), pdb_record(2, 10, 3.8, 0, 0),
                 pdb_record(3, 12, 7.6, 0, 0), pdb_record(4, 13, 11.4, 0, 0)]
        fragments, _ = parse_calpha(lines)
        assert len(fragments) == 2

    def test_empty_input_raises(self):
        with pytest.raises(EmptyInput):
            parse_calpha(["REMARK nothing here\n"])

    def test_malformed_record_counted(self):
        good = [pdb_record(1, 1, 0, 0, 0), pdb_record(2, 2, 3.8, 0, 0)]
        bad = "ATOM      3  CA  ALA A   Q    badbadbad\n"
        fragments, warnings = parse_calpha(good + [bad])
        assert warnings == 1
        assert len(fragments) == 1

    def test_non_ca_ignored(self):
        lines = [pdb_record(1, 1, 0, 0, 0), pdb_record(2, 1, 1, 1, 1, name=" CB "),
                 pdb_record(3, 2, 3.8, 0, 0)]
        fragments, _ = parse_calpha(lines)
        assert fragments[0].shape == (2, 3)

    def test_chains_separated(self):
        lines = [pdb_record(1, 1, 0, 0, 0, chain="A"),
                 pdb_record(2, 2, 3.8, 0, 0, chain="A"),
                 pdb_record(3, 1, 0, 10, 0, chain="B"),
                 pdb_record(4, 2, 3.8, 10, 0, chain="B")]
        fragments, _ = parse_calpha(lines)
        assert len(fragments) == 2


class TestPartition:
    def make_dataset(self):
        theta = np.array([1.55, 1.60, 2.2, 2.5])
        phi = np.array([0.9, 0.8, 3.0, 4.0])
        return AngleDataset(theta=theta, phi=phi,
                            helical=np.zeros(4, dtype=bool))

    def test_default_region_flags(self):
        out = partition_helical(self.make_dataset())
        assert out.helical.tolist() == [True, True, False, False]

    def test_all_inside_degenerate(self):
        ds = AngleDataset(theta=np.array([1.5, 1.6]), phi=np.array([0.7, 0.9]),
                          helical=np.zeros(2, dtype=bool))
        with pytest.raises(DegeneratePartition):
            partition_helical(ds)

    def test_zero_area_region_rejected(self):
        with pytest.raises(InvalidArgument):
            HelicalRegion(theta_min=1.5, theta_max=1.5, phi_min=0, phi_max=1)

    def test_bundled_helical_fraction_in_band(self):
        ds = bundled_dataset()
        assert 0.2 < ds.helical_fraction() < 0.8


class TestDatasetIO:
    def test_round_trip_bytes(self, tmp_path):
        ds = partition_helical(AngleDataset(
            theta=np.array([1.55, 2.2, 1.5]), phi=np.array([0.9, 3.0, 1.0]),
            helical=np.zeros(3, dtype=bool), metadata={"origin": "test"}))
        p1 = tmp_path / "a.csv"
        p2 = tmp_path / "b.csv"
        write_dataset(p1, ds)
        write_dataset(p2, read_dataset(p1))
        assert p1.read_bytes() == p2.read_bytes()

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("theta_rad,phi_rad,helical\n")
        with pytest.raises(EmptyInput):
            read_dataset(path)

    def test_bad_header_rejected(self):
        with pytest.raises(InvalidArgument):
            read_dataset(io.StringIO("a,b,c\n1,2,3\n"))
