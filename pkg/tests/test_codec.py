from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from artifact import codec, metrics, synthetic
from artifact.codec import (
    BASIC,
    ENHANCED,
    PLANE3,
    PLANE5,
    EmbedMode,
    MessageLengthError,
    distortion_case,
    embed,
    expected_sq_distortion,
    expected_sq_distortion_exact,
    extract,
    random_message,
)
from artifact.congestion import analyze
from artifact.imagecore import GrayImage, partition

MODES = [PLANE3, PLANE5, BASIC, ENHANCED]


def enumerated_sq_change(i, mode):
    """Mean squared change over every (target bit, lower bit, w), by explicit bit surgery."""
    total = Fraction(0)
    cases = list(product((0, 1), repeat=3))
    for b_hi, b_lo, w in cases:
        old = (b_hi << (i + 1)) | (b_lo << i)
        new = (w << (i + 1)) | ((1 - w if mode == "enhanced" else b_lo) << i)
        total += (new - old) ** 2
    return total / len(cases)


# -- modes -------------------------------------------------------------------


def test_mode_parse():
    assert EmbedMode.parse("plane3") == PLANE3
    assert EmbedMode.parse("Enhanced") == ENHANCED
    assert PLANE5.label == "plane5"
    with pytest.raises(ValueError):
        EmbedMode.parse("lsb")


@pytest.mark.parametrize("plane", [0, 8, 9])
def test_fixed_plane_range(plane):
    with pytest.raises(ValueError):
        EmbedMode.fixed(plane)


# -- embedding examples ------------------------------------------------------


def test_zero_block_basic_sets_plane3():
    out = embed(GrayImage(np.zeros((3, 3))), [1], BASIC)
    assert out.flat() == [4] * 9


def test_enhanced_disordered_pixel_108():
    # MSB sum 4 makes the block disordered; pixel (0, 0) is 108
    block = np.array([108, 200, 200, 200, 200, 10, 10, 10, 10]).reshape(3, 3)
    assert analyze(GrayImage(block)).n_d == 1
    out = embed(GrayImage(block), [1], ENHANCED)
    assert out.pixels[0, 0] == 116
    case = distortion_case(b_hi=(108 >> 4) & 1, b_lo=(108 >> 3) & 1, w=1, i=3, mode="enhanced")
    assert (case.case, case.magnitude) == (3, 116 - 108) == (3, 2**4 - 2**3)


def test_rewriting_existing_bits_is_identity(rng):
    # blocks whose plane-3 bits agree, message equal to those bits
    base = rng.integers(0, 256, size=(12, 12), dtype=np.uint8)
    agree = np.repeat(np.repeat(rng.integers(0, 2, size=(4, 4)), 3, 0), 3, 1).astype(np.uint8)
    img = GrayImage((base & ~np.uint8(4)) | (agree << 2))
    msg = agree[::3, ::3].ravel()
    assert embed(img, msg, PLANE3) == img


def test_message_length_mismatch(random_image):
    with pytest.raises(MessageLengthError):
        embed(random_image(9), [1] * 8, BASIC)


def test_message_bits_validated(random_image):
    with pytest.raises(ValueError):
        embed(random_image(3), [2], BASIC)


def test_margin_passes_through(random_image, rng):
    img = random_image(11, 13)
    grid = partition(img)
    out = embed(img, random_message(grid.count, 3), ENHANCED)
    assert np.array_equal(out.pixels[9:, :], img.pixels[9:, :])
    assert np.array_equal(out.pixels[:, 12:], img.pixels[:, 12:])


# -- extraction examples -----------------------------------------------------


def test_extract_unanimous():
    assert extract(GrayImage(np.full((3, 3), 4))).tolist() == [1]


def test_extract_five_of_nine():
    block = np.array([4, 4, 4, 4, 4, 0, 0, 0, 0]).reshape(3, 3)
    assert analyze(GrayImage(block)).n_d == 0
    assert extract(GrayImage(block)).tolist() == [1]
    block2 = np.array([4, 4, 4, 4, 0, 0, 0, 0, 0]).reshape(3, 3)
    assert extract(GrayImage(block2)).tolist() == [0]


def test_extract_reads_plane5_in_disordered_blocks():
    block = np.array([16 + 128] * 4 + [16] * 5).reshape(3, 3)  # S = 4
    assert extract(GrayImage(block), BASIC).tolist() == [1]
    assert extract(GrayImage(block), PLANE3).tolist() == [0]


# -- properties --------------------------------------------------------------

dims = st.integers(3, 30)


@settings(max_examples=60, deadline=None)
@given(dims, dims, st.integers(0, 2**32 - 1), st.sampled_from(MODES))
def test_round_trip(h, w, seed, mode):
    rng = np.random.default_rng(seed)
    img = GrayImage(rng.integers(0, 256, size=(h, w)))
    msg = random_message(partition(img).count, seed)
    marked = embed(img, msg, mode)
    assert np.array_equal(extract(marked, mode), msg)
    assert analyze(marked) == analyze(img)


@settings(max_examples=60, deadline=None)
@given(dims, dims, st.integers(0, 2**32 - 1), st.sampled_from(MODES))
def test_plane_isolation(h, w, seed, mode):
    rng = np.random.default_rng(seed)
    img = GrayImage(rng.integers(0, 256, size=(h, w)))
    grid = partition(img)
    cmap = analyze(img)
    marked = embed(img, random_message(grid.count, seed), mode)
    xor = img.pixels ^ marked.pixels
    for k in range(grid.count):
        bx, by = grid.block_coords(k)
        plane = mode.plane if mode.kind == "fixed" else (5 if cmap.disordered[by, bx] else 3)
        allowed = 1 << (plane - 1)
        if mode.kind == "enhanced":
            allowed |= 1 << (plane - 2)
        ys, xs = grid.pixel_slice(bx, by)
        assert not (xor[ys, xs] & ~np.uint8(allowed)).any()
    covered = np.zeros(img.shape, dtype=bool)
    covered[: 3 * grid.blocks_y, : 3 * grid.blocks_x] = True
    assert not xor[~covered].any()


def test_quality_ordering_small_sample():
    psnrs = {m.label: [] for m in MODES}
    for seed in range(6):
        img = synthetic.uniform_noise(60, seed)
        msg = random_message(400, seed)
        for m in MODES:
            psnrs[m.label].append(metrics.psnr(img, embed(img, msg, m)))
    mean = {k: np.mean(v) for k, v in psnrs.items()}
    assert mean["plane3"] > mean["enhanced"] > mean["basic"] > mean["plane5"]


# -- distortion model --------------------------------------------------------


def test_expected_examples():
    assert expected_sq_distortion(1, "basic") == 8
    assert expected_sq_distortion(3, "enhanced") == 96


def test_expected_matches_four_case_enumeration_i1():
    changes = [((w - b) * 4) ** 2 for b, w in product((0, 1), repeat=2)]
    assert Fraction(sum(changes), 4) == expected_sq_distortion_exact(1, "basic")


def test_expected_matches_eight_case_enumeration_i3():
    changes = []
    for b4, b3, w in product((0, 1), repeat=3):
        old = b4 * 16 + b3 * 8
        new = w * 16 + (1 - w) * 8
        changes.append((new - old) ** 2)
    assert Fraction(sum(changes), 8) == expected_sq_distortion_exact(3, "enhanced") == 96


@pytest.mark.parametrize("i", range(7))
def test_expected_all_i(i):
    assert enumerated_sq_change(i, "basic") == expected_sq_distortion_exact(i, "basic")
    assert enumerated_sq_change(i, "enhanced") == expected_sq_distortion_exact(i, "enhanced")
    assert expected_sq_distortion(i, "basic") > expected_sq_distortion(i, "enhanced")


def test_expected_over_full_pixel_range():
    # uniform 8-bit pixels make every bit fair; checks the model on real pixel values
    for i in range(7):
        for mode in ("basic", "enhanced"):
            total = 0
            for p, w in product(range(256), (0, 1)):
                new = codec.replace_bits(p, i, w, mode)
                total += (new - p) ** 2
            assert Fraction(total, 512) == expected_sq_distortion_exact(i, mode)


@pytest.mark.parametrize("bad", [(-1, "basic"), (7, "basic"), (2, "fancy")])
def test_expected_domain(bad):
    with pytest.raises(ValueError):
        expected_sq_distortion(*bad)


# transcription of the two case tables: (b_hi, b_lo, w) -> (case, |D| as a function of i)
BASIC_TABLE = {
    (b_hi, w): ((1, lambda i: 0) if b_hi == w else (2, lambda i: 2 ** (i + 1))) for b_hi, w in product((0, 1), repeat=2)
}
ENH_TABLE = {
    (0, 0, 0): (1, lambda i: 2**i),
    (1, 1, 1): (1, lambda i: 2**i),
    (1, 0, 1): (2, lambda i: 0),
    (0, 1, 0): (2, lambda i: 0),
    (1, 0, 0): (3, lambda i: 2 ** (i + 1) - 2**i),
    (0, 1, 1): (3, lambda i: 2 ** (i + 1) - 2**i),
    (0, 0, 1): (4, lambda i: 2 ** (i + 1)),
    (1, 1, 0): (4, lambda i: 2 ** (i + 1)),
}


@pytest.mark.parametrize("i", range(7))
def test_case_tables(i):
    for (b_hi, b_lo, w), (case, mag) in ENH_TABLE.items():
        got = distortion_case(b_hi, b_lo, w, i, "enhanced")
        assert (got.case, got.magnitude) == (case, mag(i))
    for b_hi, b_lo, w in product((0, 1), repeat=3):
        case, mag = BASIC_TABLE[(b_hi, w)]
        got = distortion_case(b_hi, b_lo, w, i, "basic")
        assert (got.case, got.magnitude) == (case, mag(i))


def test_case_examples():
    assert distortion_case(1, 0, 1, 2, "basic").magnitude == 0
    assert distortion_case(1, 0, 1, 2, "enhanced").magnitude == 0
    assert distortion_case(0, 0, 1, 3, "enhanced").magnitude == 16


@pytest.mark.parametrize("i", range(7))
def test_case_magnitudes_are_allowed(i):
    for b_hi, b_lo, w in product((0, 1), repeat=3):
        assert distortion_case(b_hi, b_lo, w, i, "basic").magnitude in {0, 2 ** (i + 1)}
        assert distortion_case(b_hi, b_lo, w, i, "enhanced").magnitude in {0, 2**i, 2 ** (i + 1) - 2**i, 2 ** (i + 1)}


# -- messages ----------------------------------------------------------------


def test_random_message_deterministic():
    a, b = random_message(1000, 5), random_message(1000, 5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, random_message(1000, 6))
    assert 400 < a.sum() < 600


@given(arrays(np.uint8, st.integers(0, 200), elements=st.integers(0, 1)))
def test_message_text_round_trip(bits):
    text = codec.message_to_text(bits)
    assert set(text) <= {"0", "1", "\n"}
    assert np.array_equal(codec.message_from_text(text), bits)


def test_message_file_and_logo(tmp_path):
    from artifact.imagecore import store_image

    codec.write_message([1, 0, 1], tmp_path / "m.txt")
    assert codec.read_message(tmp_path / "m.txt").tolist() == [1, 0, 1]
    logo = GrayImage(np.array([[0, 200], [127, 128]]))
    store_image(logo, tmp_path / "logo.pgm")
    assert codec.read_message(tmp_path / "logo.pgm").tolist() == [0, 1, 0, 1]
    with pytest.raises(ValueError):
        codec.message_from_text("0102")
