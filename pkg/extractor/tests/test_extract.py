import csv
import os
import warnings

import numpy as np
import pytest

from housefeat import cli, core as ex


def _write_ppm(path, rng, side=40):
    img = rng.integers(0, 256, size=(side, side, 3), dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(f"P6\n{side} {side}\n255\n".encode("ascii"))
        f.write(img.tobytes())


def _write_manifest(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["id", "view", "path"])
        w.writerows(rows)


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    """Two records x four views, plus a manifest; one image reused twice."""
    root = tmp_path_factory.mktemp("imgs")
    rng = np.random.default_rng(0)
    rows = []
    for rid in ("h0", "h1"):
        for view in range(1, 5):
            path = str(root / f"{rid}_{view}.ppm")
            _write_ppm(path, rng)
            rows.append((rid, view, path))
    manifest = str(root / "manifest.csv")
    _write_manifest(manifest, rows)
    return root, manifest, rows


@pytest.fixture(scope="module")
def features_csv(corpus, tmp_path_factory):
    root, manifest, _ = corpus
    out = str(tmp_path_factory.mktemp("out") / "deep_features.csv")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # seeded-random weights notice
        assert cli.main(["extract", "--manifest", manifest, "--out", out]) == 0
    return out


class TestOutputContract:
    def test_rows_are_exactly_1000_wide(self, features_csv):
        with open(features_csv, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["id", "view"] + [f"f{j}" for j in range(1000)]
        assert len(rows) == 1 + 8
        for row in rows[1:]:
            assert len(row) == 1002

    def test_primary_loader_accepts_the_file(self, features_csv):
        from housepred.dataset import load_deep_features
        from housepred.dataset.records import HouseRecord

        records = [HouseRecord(rid, {}, 100.0, ("a", "b", "c", "d"))
                   for rid in ("h0", "h1")]
        X = load_deep_features(features_csv, records)
        assert X.shape == (2, 1000)
        assert np.all(np.isfinite(X))

    def test_identical_images_yield_identical_rows(self, corpus, tmp_path):
        root, _, rows = corpus
        # a fresh record whose four views are all copies of one image
        manifest = str(tmp_path / "dup.csv")
        src = rows[0][2]
        _write_manifest(manifest, [("dup", v, src) for v in range(1, 5)])
        out = str(tmp_path / "dup.csv.out")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert cli.main(["extract", "--manifest", manifest,
                             "--out", out]) == 0
        with open(out, newline="") as f:
            body = [r[2:] for r in list(csv.reader(f))[1:]]
        assert body[0] == body[1] == body[2] == body[3]

    def test_rerun_is_byte_identical(self, corpus, features_csv, tmp_path):
        _, manifest, _ = corpus
        again = str(tmp_path / "again.csv")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert cli.main(["extract", "--manifest", manifest,
                             "--out", again]) == 0
        assert open(again, "rb").read() == open(features_csv, "rb").read()


class TestErrors:
    def test_truncated_image_names_the_row(self, corpus, tmp_path, capsys):
        root, _, rows = corpus
        bad = str(tmp_path / "bad.ppm")
        with open(rows[0][2], "rb") as f:
            blob = f.read()
        with open(bad, "wb") as f:
            f.write(blob[: len(blob) // 2])
        manifest = str(tmp_path / "m.csv")
        _write_manifest(manifest, [("x", 1, rows[0][2]), ("x", 2, bad),
                                   ("x", 3, rows[2][2]), ("x", 4, rows[3][2])])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            code = cli.main(["extract", "--manifest", manifest,
                             "--out", str(tmp_path / "o.csv")])
        assert code == 1
        err = capsys.readouterr().err
        assert "'x'" in err and "view 2" in err

    def test_incomplete_view_set_rejected(self, corpus, tmp_path, capsys):
        _, _, rows = corpus
        manifest = str(tmp_path / "m.csv")
        _write_manifest(manifest, [("y", v, rows[0][2]) for v in (1, 2, 3)])
        code = cli.main(["extract", "--manifest", manifest,
                         "--out", str(tmp_path / "o.csv")])
        assert code == 1
        assert "expected 4 views" in capsys.readouterr().err

    def test_duplicate_view_rejected(self, corpus, tmp_path):
        _, _, rows = corpus
        manifest = str(tmp_path / "m.csv")
        _write_manifest(manifest, [("z", v, rows[0][2]) for v in (1, 2, 2, 4)])
        assert cli.main(["extract", "--manifest", manifest,
                         "--out", str(tmp_path / "o.csv")]) == 1

    def test_unknown_backbone_rejected(self, corpus, tmp_path):
        _, manifest, _ = corpus
        assert cli.main(["extract", "--manifest", manifest,
                         "--backbone", "nosuchnet",
                         "--out", str(tmp_path / "o.csv")]) == 1


class TestWidthProjection:
    def test_narrow_backbone_padded_with_warning(self, corpus, tmp_path):
        _, _, rows = corpus
        manifest = ex.read_manifest(_single_manifest(tmp_path, rows),
                                    backbone="squeezenet1_0")
        out = str(tmp_path / "o.csv")
        with pytest.warns(UserWarning):
            ex.extract(manifest, out)
        with open(out, newline="") as f:
            row = list(csv.reader(f))[1]
        assert len(row) == 1002


def _single_manifest(tmp_path, rows):
    path = str(tmp_path / "one.csv")
    _write_manifest(path, [("w", v, rows[0][2]) for v in range(1, 5)])
    return path
