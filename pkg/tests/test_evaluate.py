from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from fusion_gan.data import (
    IdentitySpec,
    background_field,
    generate_sets,
    landmark_array,
    make_holdout_samples,
    render_array,
    sample_shape,
)
from fusion_gan.engine import Tensor
from fusion_gan.errors import ContractError
from fusion_gan.evaluate import (
    BASELINES,
    EvalMetrics,
    LandmarkPoint,
    LandmarkSet,
    detect_landmarks,
    emit_report,
    identity_score,
    make_baseline,
    modified_oks,
    nearest_identity,
    oracle_l1,
    sample_palettes,
)
from fusion_gan.nets import CopyFirstInput, CopySecondInput
from fusion_gan.train import HistoryRecord

MONO = IdentitySpec(id=0, fg=(1.0, 1.0, 1.0), bg=(0.0, 0.0, 0.0))
RED_ON_GREEN = IdentitySpec(id=1, fg=(1.0, 0.0, 0.0), bg=(0.0, 1.0, 0.0))


def _set(points: list[tuple[float, float]], res: int = 32) -> LandmarkSet:
    return LandmarkSet(points=[LandmarkPoint(name=f"p{i}", x=x, y=y) for i, (x, y) in enumerate(points)], res=res)


REF = [(4.0, 5.0), (20.0, 8.0), (12.0, 25.0), (14.0, 14.0)]


def test_detection_recovers_rendered_landmarks() -> None:
    rng = np.random.default_rng(123)
    for _ in range(30):
        shape = sample_shape(rng, 32)
        found = detect_landmarks(render_array(MONO, shape, 32), MONO)
        assert [p.name for p in found.points] == [p.name for p in shape.landmarks], shape.glyph
        got = np.array([[p.x, p.y] for p in found.points])
        err = np.hypot(*(got - landmark_array(shape.landmarks)).T)
        assert err.max() <= 2.0, (shape.glyph, shape.rotation, err)


def test_detection_on_textured_background() -> None:
    identity = IdentitySpec(id=2, fg=(0.9, 0.9, 0.1), bg=(0.2, 0.1, 0.6), texture="checker", period=4)
    rng = np.random.default_rng(9)
    for _ in range(10):
        shape = sample_shape(rng, 32)
        found = detect_landmarks(render_array(identity, shape, 32), identity)
        got = np.array([[p.x, p.y] for p in found.points])
        assert np.hypot(*(got - landmark_array(shape.landmarks)).T).max() <= 2.0


def test_blank_image_has_no_landmarks() -> None:
    found = detect_landmarks(np.zeros((3, 32, 32)), MONO)
    assert len(found.points) == 4
    assert found.num_present == 0


def test_oks_exact_match_is_one() -> None:
    assert modified_oks(_set(REF), _set(REF)) == pytest.approx(1.0, abs=1e-9)


def test_oks_all_missed_at_reference_resolution() -> None:
    ref = _set([(10.0, 10.0), (100.0, 50.0), (200.0, 200.0), (128.0, 128.0)], res=256)
    gen = LandmarkSet.absent(4, 256)
    assert modified_oks(ref, gen) == pytest.approx(math.exp(-(100.0**2) / (2 * 25.6**2)), abs=1e-9)


def test_oks_one_point_off_by_sigma() -> None:
    moved = list(REF)
    moved[1] = (REF[1][0] + 3.2, REF[1][1])
    assert modified_oks(_set(REF), _set(moved)) == pytest.approx((3.0 + math.exp(-0.5)) / 4.0, abs=1e-9)


def test_oks_penalty_scales_with_resolution() -> None:
    ref = _set(REF)
    gen = LandmarkSet(points=[*_set(REF).points[:3], LandmarkPoint(name="p3", present=False)], res=32)
    d = 100.0 * 32 / 256
    expected = (3.0 + math.exp(-(d * d) / (2 * 3.2**2))) / 4.0
    assert modified_oks(ref, gen) == pytest.approx(expected, abs=1e-12)


def test_oks_without_reference_points_and_contract_errors() -> None:
    assert modified_oks(LandmarkSet.absent(4, 32), _set(REF)) == 0.0
    with pytest.raises(ContractError):
        modified_oks(_set(REF), _set(REF[:3]))
    with pytest.raises(ContractError):
        modified_oks(_set(REF), _set(REF, res=64))
    with pytest.raises(ContractError):
        modified_oks(_set(REF), _set(REF), sigma_frac=0.0)


def test_landmarks_outside_image_are_rejected() -> None:
    with pytest.raises(ValueError):
        _set([(40.0, 1.0)])


@settings(max_examples=50, deadline=None)
@given(
    d1=st.floats(min_value=0.0, max_value=20.0),
    extra=st.floats(min_value=0.0, max_value=20.0),
    present=st.booleans(),
)
def test_oks_bounded_and_monotone(d1: float, extra: float, present: bool) -> None:
    ref = _set([(4.0, 4.0), (8.0, 8.0)])
    last = LandmarkPoint(name="p1", x=8.0, y=8.0, present=present)
    near = LandmarkSet(points=[LandmarkPoint(name="p0", x=min(4.0 + d1, 32.0), y=4.0), last], res=32)
    far = LandmarkSet(points=[LandmarkPoint(name="p0", x=min(4.0 + d1 + extra, 32.0), y=4.0), last], res=32)
    a = modified_oks(ref, near)
    b = modified_oks(ref, far)
    assert 0.0 <= b <= a <= 1.0


def test_identity_score_prefers_rendering_palette() -> None:
    rng = np.random.default_rng(5)
    mono = [render_array(MONO, sample_shape(rng, 32), 32) for _ in range(5)]
    red = [render_array(RED_ON_GREEN, sample_shape(rng, 32), 32) for _ in range(5)]
    assert identity_score(mono, MONO, [MONO, RED_ON_GREEN]) == 1.0
    assert identity_score(red, MONO, [MONO, RED_ON_GREEN]) == 0.0
    assert identity_score(mono[:2] + red[:2], MONO, [MONO, RED_ON_GREEN]) == 0.5
    assert identity_score([], MONO, [MONO, RED_ON_GREEN]) == 0.0


def test_identity_score_needs_competing_palettes() -> None:
    img = render_array(MONO, sample_shape(np.random.default_rng(1), 32), 32)
    with pytest.raises(ContractError):
        identity_score([img], MONO, [])
    with pytest.raises(ContractError):
        identity_score([img], MONO, [MONO])


def test_identity_score_counts_off_palette_claim_as_miss() -> None:
    # the claimed palette is the only one offered besides an unrelated one
    blue_on_black = IdentitySpec(id=2, fg=(0.0, 0.0, 1.0), bg=(0.0, 0.0, 0.0))
    red = [render_array(RED_ON_GREEN, sample_shape(np.random.default_rng(2), 32), 32) for _ in range(3)]
    assert identity_score(red, MONO, [MONO, blue_on_black]) == 0.0
    assert nearest_identity(red[0], [MONO, blue_on_black]) is None


@pytest.mark.parametrize("level", [0.0, 0.2, 0.5, 1.0])
def test_identity_score_flat_image_is_a_miss(level: float) -> None:
    flat = np.full((3, 32, 32), level)
    assert nearest_identity(flat, [MONO, RED_ON_GREEN]) is None
    assert identity_score([flat], MONO, [MONO, RED_ON_GREEN]) == 0.0
    assert identity_score([Tensor(flat)], RED_ON_GREEN, [MONO, RED_ON_GREEN]) == 0.0


def test_identity_score_vanished_glyph_is_a_miss() -> None:
    sets = generate_sets(3, 2, 16, seed=3)
    samples = make_holdout_samples(sets, 6, seed=0)
    palettes = sample_palettes(samples)
    for s in samples:
        assert s.x_identity is not None
        blank = background_field(s.x_identity, 16)
        assert identity_score([blank], s.x_identity, palettes) == 0.0


def test_baselines_on_held_out_samples() -> None:
    sets = generate_sets(3, 2, 16, seed=3)
    samples = make_holdout_samples(sets, 10, seed=0)
    gen, copy_x, copy_y = oracle_l1(CopySecondInput(), samples)
    assert gen == copy_y
    assert copy_y > 0.0 and copy_x > 0.0
    assert oracle_l1(CopyFirstInput(), samples)[0] == copy_x
    oracle = make_baseline("oracle", samples)
    assert oracle_l1(oracle, samples)[0] == 0.0
    assert set(BASELINES) == {"copy-x", "copy-y", "oracle"}
    with pytest.raises(ContractError):
        make_baseline("copy-z")
    with pytest.raises(ContractError):
        oracle(Tensor(samples[0].y), Tensor(samples[0].x))
    with pytest.raises(ContractError):
        oracle_l1(CopySecondInput(), [])


def test_emit_report_writes_grid_and_metrics(tmp_path: Path) -> None:
    sets = generate_sets(3, 2, 32, seed=4)
    samples = make_holdout_samples(sets, 3, seed=1)
    paths = emit_report([HistoryRecord(iteration=7)], samples, make_baseline("oracle", samples), str(tmp_path / "r"))
    with open(paths.metrics_json, "r", encoding="utf-8") as f:
        metrics = json.load(f)
    assert set(metrics) == set(EvalMetrics.model_fields)
    assert metrics["iteration"] == 7
    assert metrics["oracle_l1_gen"] == 0.0
    assert 0.5 < metrics["mean_oks"] <= 1.0
    assert 0.0 <= metrics["identity_score"] <= 1.0
    with Image.open(paths.grid_png) as im:
        assert im.size == (4 * 32 + 5 * 2, 3 * 32 + 4 * 2)
