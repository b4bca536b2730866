import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from artifact import synthetic
from artifact.congestion import (
    BlockType,
    CongestionMap,
    analyze,
    canny,
    classify,
    comparison_maps,
    dct_scores,
    edge_scores,
    entropy_scores,
    msb_sum,
    msb_sums,
    top_nd_map,
)
from artifact.imagecore import GrayImage, partition

blocks9 = arrays(np.uint8, 9)


def test_msb_sum_examples():
    assert msb_sum([0] * 9) == 0
    assert msb_sum([128, 200, 255, 130, 129, 250, 190, 170, 140]) == 9
    block = [200, 10, 130, 5, 255, 0, 128, 60, 90]
    assert msb_sum(block) == sum(p >= 128 for p in block) == 4


def test_msb_sum_needs_nine():
    with pytest.raises(ValueError):
        msb_sum([1, 2, 3])


@pytest.mark.parametrize("s, label", [(0, BlockType.ORDERED), (5, BlockType.DISORDERED), (7, BlockType.ORDERED)])
def test_classify_examples(s, label):
    assert classify(s) is label


def test_classify_partition():
    disordered = {s for s in range(10) if classify(s) is BlockType.DISORDERED}
    ordered = {s for s in range(10) if classify(s) is BlockType.ORDERED}
    assert disordered == {4, 5, 6}
    assert ordered == {0, 1, 2, 3, 7, 8, 9}
    assert len(BlockType) == 2


@pytest.mark.parametrize("s", [-1, 10])
def test_classify_range(s):
    with pytest.raises(ValueError):
        classify(s)


@given(blocks9, arrays(np.uint8, 9, elements=st.integers(0, 127)))
def test_msb_sum_ignores_low_planes(block, noise):
    perturbed = (block & 0x80) | noise
    assert msb_sum(perturbed) == msb_sum(block)


def test_analyze_matches_per_block(random_image):
    img = random_image(20, 25)
    grid = partition(img)
    cmap = analyze(img)
    assert cmap.shape == grid.shape
    for k in range(grid.count):
        bx, by = grid.block_coords(k)
        ys, xs = grid.pixel_slice(bx, by)
        assert cmap[k] is classify(msb_sum(img.pixels[ys, xs]))
    assert cmap.n_d == int(cmap.disordered.sum())
    assert np.array_equal(msb_sums(img).ravel(), [msb_sum(b) for b in grid.flat_blocks(img.pixels)])


def test_map_text_round_trip(random_image):
    cmap = analyze(random_image(30))
    text = cmap.to_text()
    assert set(text) <= {"O", "D", "\n"}
    assert CongestionMap.from_text(text) == cmap


def test_map_text_rejects_garbage():
    with pytest.raises(ValueError):
        CongestionMap.from_text("OD\nOX\n")
    with pytest.raises(ValueError):
        CongestionMap.from_text("OD\nO\n")


# -- DCT ---------------------------------------------------------------------


def _dct_matrix(n):
    c = np.zeros((n, n))
    for k in range(n):
        a = math.sqrt((1 if k == 0 else 2) / n)
        for x in range(n):
            c[k, x] = a * math.cos(math.pi * (2 * x + 1) * k / (2 * n))
    return c


def _dct_oracle(block):
    c = _dct_matrix(3)
    coeff = c @ block @ c.T
    kept = np.zeros_like(coeff)
    kept[0, 0] = coeff[0, 0]
    recon = c.T @ kept @ c
    return float(((block - recon) ** 2).mean())


def test_dct_constant_block_zero():
    assert dct_scores(GrayImage(np.full((3, 3), 77)))[0, 0] == pytest.approx(0.0, abs=1e-9)


def test_dct_checkerboard_is_variance():
    block = np.array([0, 255, 0, 255, 0, 255, 0, 255, 0], dtype=float).reshape(3, 3)
    score = dct_scores(GrayImage(block))[0, 0]
    assert score == pytest.approx(np.var(block), rel=1e-12)
    assert score == pytest.approx(_dct_oracle(block), rel=1e-12)
    assert score > dct_scores(GrayImage(np.full((3, 3), 200)))[0, 0]


def test_dct_matches_matrix_oracle(random_image):
    img = random_image(12)
    got = dct_scores(img)
    grid = partition(img)
    want = [_dct_oracle(b.reshape(3, 3).astype(float)) for b in grid.flat_blocks(img.pixels)]
    np.testing.assert_allclose(got.ravel(), want, rtol=1e-10, atol=1e-9)


# -- entropy -----------------------------------------------------------------


def _entropy_oracle(values):
    n = len(values)
    return -sum(c / n * math.log2(c / n) for c in Counter(values).values())


@pytest.mark.parametrize(
    "block, expected",
    [
        ([5] * 9, 0.0),
        (list(range(9)), math.log2(9)),
        ([1, 1, 1, 7, 7, 7, 9, 9, 9], math.log2(3)),
    ],
)
def test_entropy_examples(block, expected):
    assert entropy_scores(GrayImage(np.reshape(block, (3, 3))))[0, 0] == pytest.approx(expected, abs=1e-12)


def test_entropy_matches_counter_oracle(random_image, rng):
    img = GrayImage(rng.integers(0, 4, size=(15, 18)))
    got = entropy_scores(img)
    grid = partition(img)
    want = [_entropy_oracle(b.tolist()) for b in grid.flat_blocks(img.pixels)]
    np.testing.assert_allclose(got.ravel(), want, atol=1e-12)
    assert got.max() <= math.log2(9) + 1e-12


@settings(max_examples=50)
@given(blocks9)
def test_scores_zero_exactly_on_constant_blocks(block):
    img = GrayImage(block.reshape(3, 3))
    constant = len(set(block.tolist())) == 1
    assert (dct_scores(img)[0, 0] < 1e-9) == constant
    assert (entropy_scores(img)[0, 0] == 0) == constant


# -- edges -------------------------------------------------------------------


def test_edges_constant_image():
    assert edge_scores(GrayImage(np.full((30, 30), 90))).sum() == 0


def test_edges_vertical_step():
    img = np.zeros((30, 30), dtype=np.uint8)
    img[:, 15:] = 200
    edges = canny(img)
    cols = set(np.nonzero(edges)[1].tolist())
    assert cols and cols <= {14, 15}
    scores = edge_scores(GrayImage(img))
    nonzero_bx = set(np.nonzero(scores)[1].tolist())
    # the step sits on the boundary between block columns 4 and 5
    assert nonzero_bx and nonzero_bx <= {4, 5}


def test_edges_step_inside_block():
    img = np.zeros((30, 30), dtype=np.uint8)
    img[:, 13:] = 200
    scores = edge_scores(GrayImage(img))
    assert set(np.nonzero(scores)[1].tolist()) == {4}
    assert (scores[:, 4] > 0).all()


def test_edge_scores_bounded(random_image):
    scores = edge_scores(random_image(60))
    assert scores.min() >= 0 and scores.max() <= 9


# -- top-n_d -----------------------------------------------------------------


def test_top_nd_tie_break():
    cmap = top_nd_map([3.0, 1.0, 3.0, 2.0], 2)
    assert cmap.disordered.ravel().tolist() == [True, False, True, False]


def test_top_nd_extremes():
    scores = np.arange(12.0).reshape(3, 4)
    assert top_nd_map(scores, 0).n_d == 0
    assert top_nd_map(scores, 12).disordered.all()


@pytest.mark.parametrize("n_d", [-1, 13])
def test_top_nd_range(n_d):
    with pytest.raises(ValueError):
        top_nd_map(np.zeros((3, 4)), n_d)


@given(arrays(np.float64, st.integers(1, 40), elements=st.floats(-5, 5)), st.data())
def test_top_nd_count_and_dominance(scores, data):
    n_d = data.draw(st.integers(0, scores.size))
    cmap = top_nd_map(scores, n_d)
    mask = cmap.disordered.ravel()
    assert cmap.n_d == n_d
    if 0 < n_d < scores.size:
        assert scores[mask].min() >= scores[~mask].max()


def test_comparison_maps_share_nd():
    img = synthetic.natural_like(60, 3)
    maps = comparison_maps(img)
    nd = maps["proposed"].n_d
    assert set(maps) == {"dct", "entropy", "edge", "proposed"}
    assert all(m.n_d == nd for m in maps.values())
