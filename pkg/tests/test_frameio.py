import struct

import numpy as np
import pytest

from ebv import (
    FrameFileError,
    FrameIntegrityError,
    FrameMatrix,
    FrameMeta,
    load_frame,
    save_frame,
)
from ebv.frameio import HEADER_SIZE, MAGIC, VERSION
from conftest import normalized_rows


def roundtrip(tmp_path, frame, meta, name="frame.ebv"):
    path = tmp_path / name
    save_frame(frame, meta, path)
    return path, load_frame(path)


class TestRoundTrip:
    def test_identity_bit_exact(self, tmp_path):
        frame = FrameMatrix.from_rows(np.eye(4))
        path, (loaded, meta) = roundtrip(tmp_path, frame, FrameMeta(alpha=0.25, seed=9))
        assert loaded.rows.tobytes() == frame.rows.tobytes()
        assert (loaded.dim, loaded.num) == (4, 4)
        assert meta.alpha == 0.25 and meta.seed == 9

    def test_random_frames_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        for i in range(10):
            n, d = int(rng.integers(2, 40)), int(rng.integers(1, 12))
            frame = FrameMatrix.from_rows(normalized_rows(rng, n, d))
            meta = FrameMeta(alpha=float(rng.uniform(0, 0.99)), seed=int(rng.integers(2**63)))
            _, (loaded, loaded_meta) = roundtrip(tmp_path, frame, meta, f"f{i}.ebv")
            assert loaded.rows.tobytes() == frame.rows.tobytes()
            assert loaded_meta == meta

    def test_load_save_reproduces_byte_stream(self, tmp_path):
        rng = np.random.default_rng(1)
        frame = FrameMatrix.from_rows(normalized_rows(rng, 7, 3))
        first = tmp_path / "a.ebv"
        save_frame(frame, FrameMeta(alpha=0.5, seed=77), first)
        loaded, meta = load_frame(first)
        second = tmp_path / "b.ebv"
        save_frame(loaded, meta, second)
        assert first.read_bytes() == second.read_bytes()


class TestHeaderLayout:
    def test_fixed_offsets(self, tmp_path):
        rng = np.random.default_rng(2)
        frame = FrameMatrix.from_rows(normalized_rows(rng, 10, 6))
        path = tmp_path / "f.ebv"
        save_frame(frame, FrameMeta(alpha=0.125, seed=4242), path)
        blob = path.read_bytes()
        assert blob[:8] == MAGIC
        assert struct.unpack_from("<H", blob, 8)[0] == VERSION
        assert struct.unpack_from("<I", blob, 10)[0] == 6  # dim
        assert struct.unpack_from("<I", blob, 14)[0] == 10  # num
        assert struct.unpack_from("<d", blob, 18)[0] == 0.125
        assert struct.unpack_from("<Q", blob, 26)[0] == 4242
        assert len(blob) == HEADER_SIZE + 10 * 6 * 8


class TestErrorPaths:
    def test_truncated_payload_names_byte_counts(self, tmp_path):
        frame = FrameMatrix.from_rows(np.eye(4))
        path = tmp_path / "t.ebv"
        save_frame(frame, FrameMeta(alpha=0.0, seed=0), path)
        blob = path.read_bytes()
        path.write_bytes(blob[:-8])
        with pytest.raises(FrameFileError, match=r"120 bytes.*expected 128"):
            load_frame(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "h.ebv"
        path.write_bytes(b"EBVFRA")
        with pytest.raises(FrameFileError, match="truncated"):
            load_frame(path)

    def test_bad_magic(self, tmp_path):
        frame = FrameMatrix.from_rows(np.eye(3))
        path = tmp_path / "m.ebv"
        save_frame(frame, FrameMeta(alpha=0.0, seed=0), path)
        blob = bytearray(path.read_bytes())
        blob[:8] = b"NOTAFRAM"
        path.write_bytes(bytes(blob))
        with pytest.raises(FrameFileError, match="magic"):
            load_frame(path)

    def test_unsupported_version(self, tmp_path):
        frame = FrameMatrix.from_rows(np.eye(3))
        path = tmp_path / "v.ebv"
        save_frame(frame, FrameMeta(alpha=0.0, seed=0), path)
        blob = bytearray(path.read_bytes())
        struct.pack_into("<H", blob, 8, 2)
        path.write_bytes(bytes(blob))
        with pytest.raises(FrameFileError, match="version"):
            load_frame(path)

    def test_norm_violation_is_integrity_error(self, tmp_path):
        frame = FrameMatrix.from_rows(np.eye(3))
        path = tmp_path / "n.ebv"
        save_frame(frame, FrameMeta(alpha=0.0, seed=0), path)
        blob = bytearray(path.read_bytes())
        struct.pack_into("<d", blob, HEADER_SIZE, 1.5)  # corrupt row 0
        path.write_bytes(bytes(blob))
        with pytest.raises(FrameIntegrityError, match="row 0"):
            load_frame(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FrameFileError, match="cannot read"):
            load_frame(tmp_path / "absent.ebv")

    def test_unwritable_path_names_target(self, tmp_path):
        frame = FrameMatrix.from_rows(np.eye(2))
        with pytest.raises(FrameFileError, match="cannot write"):
            save_frame(frame, FrameMeta(alpha=0.0, seed=0), tmp_path / "no" / "dir.ebv")

    def test_save_rejects_invalid_frame(self, tmp_path):
        bad = FrameMatrix(dim=2, num=2, rows=np.array([[2.0, 0.0], [0.0, 1.0]]))
        with pytest.raises(ValueError, match="norm"):
            save_frame(bad, FrameMeta(alpha=0.0, seed=0), tmp_path / "x.ebv")
