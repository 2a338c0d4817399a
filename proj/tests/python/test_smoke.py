import numpy as np
import pytest

import platekit as pk


def test_box_geometry():
    meta = pk.ImageMeta(1344, 1024)
    px = pk.BBoxPx(100.0, 200.0, 300.0, 400.0)
    norm = pk.to_norm(px, meta)
    back = pk.to_px(norm, meta)
    assert back.x_min == pytest.approx(100.0, abs=1e-9)
    assert back.y_max == pytest.approx(400.0, abs=1e-9)
    assert pk.iou(px, px) == 1.0
    assert pk.iou(px, pk.BBoxPx(500.0, 500.0, 600.0, 600.0)) == 0.0


def test_quadrants_and_remap():
    meta = pk.ImageMeta(1344, 1024)
    tiles = pk.quadrants(meta)
    assert [(t.offset_x, t.offset_y) for t in tiles] == [(0, 0), (672, 0), (0, 512), (672, 512)]
    assert all(t.width == 672 and t.height == 512 for t in tiles)

    inside_tl = pk.Annotation(0, pk.to_norm(pk.BBoxPx(10, 10, 60, 60), meta))
    on_cut = pk.Annotation(1, pk.to_norm(pk.BBoxPx(640, 100, 700, 160), meta))
    assert not pk.straddles_cut(inside_tl, meta)
    assert pk.straddles_cut(on_cut, meta)

    kept_total = 0
    for tile in tiles:
        kept, straddling = pk.remap_annotations([inside_tl, on_cut], meta, tile)
        kept_total += len(kept)
        assert straddling in (0, 1)
    assert kept_total == 1


def test_label_file_round_trip():
    annos = [
        pk.Annotation(2, pk.NormBBox(0.5, 0.5, 0.074405, 0.078125)),
        pk.Annotation(0, pk.NormBBox(0.25, 0.75, 0.1, 0.2)),
    ]
    text = pk.write_label_file(annos)
    assert text.startswith("2 0.500000 0.500000 0.074405 0.078125\n")
    back = pk.read_label_file(text, 4)
    assert [a.class_id for a in back] == [2, 0]
    assert back[1].box.cy == pytest.approx(0.75, abs=5e-7)
    with pytest.raises(pk.DataError):
        pk.read_label_file("9 0.5 0.5 0.1 0.1\n", 4)


def test_matching_and_vote():
    gts = [pk.Annotation(0, pk.NormBBox(0.2, 0.2, 0.1, 0.1)),
           pk.Annotation(1, pk.NormBBox(0.7, 0.7, 0.1, 0.1))]
    dets = [pk.Detection(0, pk.NormBBox(0.2, 0.2, 0.1, 0.1), 0.9),
            pk.Detection(1, pk.NormBBox(0.7, 0.7, 0.1, 0.1), 0.8),
            pk.Detection(1, pk.NormBBox(0.5, 0.2, 0.05, 0.05), 0.7)]
    m = pk.match(gts, dets, iou_thresh=0.5, class_aware=True)
    assert {(p.gt_index, p.det_index) for p in m.pairs} == {(0, 0), (1, 1)}
    assert m.unmatched_det == [2]
    assert pk.average_precision(gts, dets, 0) == pytest.approx(1.0, abs=1e-12)

    classes = pk.ClassSet(["ER", "Mitochondria"])
    vote = pk.majority_vote(dets, classes)
    assert vote.class_id == 1
    split = pk.plate_vote_from_tiles([dets[:1], dets[1:], [], []], classes)
    assert split.class_id == vote.class_id
    assert split.counts == vote.counts


def test_fold_splitting():
    records = [pk.PlateRecord(i // 8 + 1, f"W{i}", "ER" if i % 2 else "M") for i in range(40)]
    folds = pk.make_folds(records, 5, seed=3)
    sizes = [0] * 5
    for r in records:
        sizes[folds.fold_of(r)] += 1
    assert sizes == [8] * 5
    assert folds.as_dict() == pk.make_folds(records, 5, seed=3).as_dict()

    train, valid = pk.split_train_valid(records, 0.1, seed=3)
    assert len(train) == 36 and len(valid) == 4


def test_synthetic_plate_and_mock_detector():
    cfg = pk.SynthConfig()
    cfg.seed = 5
    cfg.width = 448
    cfg.height = 320
    cfg.min_cells = 8
    cfg.max_cells = 12
    cfg.min_radius_px = 6.0
    cfg.max_radius_px = 12.0
    cfg.pixel_noise = 0.0
    plate = pk.gen_plate(cfg)

    assert plate.bf.shape == (320, 448) and plate.bf.dtype == np.uint16
    assert plate.gfp.shape == (320, 448)
    assert plate.mask.shape == (320, 448) and plate.mask.dtype == np.uint32
    n = len(plate.annotations)
    assert 8 <= n <= 12
    assert plate.mask.max() == n
    assert len(plate.cells) == n

    again = pk.gen_plate(cfg)
    assert np.array_equal(plate.bf, again.bf)
    assert np.array_equal(plate.mask, again.mask)

    boxes = pk.instances_to_boxes(plate.mask)
    assert [b.instance_id for b in boxes] == list(range(1, n + 1))
    meta = pk.ImageMeta(cfg.width, cfg.height)
    annos = pk.boxes_to_annotations(boxes, 0, meta)
    assert all(a.box.w > 0 for a in annos)

    noise = pk.NoiseConfig()
    noise.n_classes = 1
    dets = pk.mock_detect(plate.annotations, noise, meta)
    assert len(dets) == n
    assert all(d.confidence == 1.0 for d in dets)


def test_channel_merge():
    bf = np.full((4, 6), 100, dtype=np.uint16)
    gfp = np.zeros((4, 6), dtype=np.uint16)
    gfp[1, 2] = 250
    rgb = pk.merge_channels(bf, gfp)
    assert rgb.shape == (4, 6, 3) and rgb.dtype == np.uint8
    assert tuple(rgb[0, 0]) == (100, 100, 100)
    assert tuple(rgb[1, 2]) == (100, 250, 100)


def test_errors_are_python_exceptions():
    with pytest.raises(pk.ValidationError):
        pk.quadrants(pk.ImageMeta(1343, 1024))
    with pytest.raises(pk.ConfigError):
        pk.match([], [], iou_thresh=0.0)
    assert issubclass(pk.ConfigError, ValueError)
