import pytest

from qanet.manifest import ManifestRow, read_manifest, require_columns, write_manifest


def test_write_read_roundtrip_preserves_exact_floats(tmp_path):
    path = str(tmp_path / "m.csv")
    q = 0.12345678901234567
    write_manifest(
        path,
        [{"id": "a", "eval_seg": "segs/a.png", "true_q": q}],
        ["id", "eval_seg", "true_q"],
    )
    rows = read_manifest(path)
    assert rows[0].true_q == q


def test_paths_resolve_relative_to_manifest_directory(tmp_path):
    sub = tmp_path / "data"
    sub.mkdir()
    path = str(sub / "m.csv")
    write_manifest(path, [{"id": "a", "image": "images/a.png"}], ["id", "image"])
    rows = read_manifest(path)
    assert rows[0].image == str(sub / "images" / "a.png")


def test_corrupted_seg_is_an_alias_for_eval_seg(tmp_path):
    path = str(tmp_path / "m.csv")
    write_manifest(path, [{"id": "a", "corrupted_seg": "c.png"}], ["id", "corrupted_seg"])
    rows = read_manifest(path)
    assert rows[0].eval_seg == str(tmp_path / "c.png")


def test_extra_columns_are_kept(tmp_path):
    path = str(tmp_path / "m.csv")
    write_manifest(path, [{"id": "a", "op": "erode"}], ["id", "op"])
    rows = read_manifest(path)
    assert rows[0].extras["op"] == "erode"


def test_duplicate_ids_rejected(tmp_path):
    path = str(tmp_path / "m.csv")
    write_manifest(path, [{"id": "a"}, {"id": "a"}], ["id"])
    with pytest.raises(ValueError, match="duplicate"):
        read_manifest(path)


def test_missing_id_column_rejected(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("image\nfoo.png\n")
    with pytest.raises(ValueError, match="id"):
        read_manifest(str(path))


def test_empty_manifest_rejected(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("id,image\n")
    with pytest.raises(ValueError, match="no rows"):
        read_manifest(str(path))


def test_scores_must_be_in_unit_range(tmp_path):
    path = str(tmp_path / "m.csv")
    write_manifest(path, [{"id": "a", "true_q": 1.5}], ["id", "true_q"])
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        read_manifest(str(path))


def test_non_numeric_score_rejected(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("id,true_q\na,high\n")
    with pytest.raises(ValueError, match="non-numeric"):
        read_manifest(str(path))


def test_require_columns():
    rows = [ManifestRow(id="a", image="x.png")]
    require_columns(rows, ("image",), "m.csv")
    with pytest.raises(ValueError, match="gt_seg"):
        require_columns(rows, ("gt_seg",), "m.csv")


def test_empty_cells_stay_none(tmp_path):
    path = str(tmp_path / "m.csv")
    write_manifest(path, [{"id": "a", "true_q": None}], ["id", "true_q"])
    rows = read_manifest(path)
    assert rows[0].true_q is None
