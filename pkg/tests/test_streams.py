import numpy as np
import pytest

from switchmd import (
    Ball,
    ConstantRate,
    DriftingLogisticStream,
    DriftSchedule,
    ListStream,
    RademacherStream,
    SquaredEuclideanMap,
    load_csv_stream,
    run_episode,
    save_stream_csv,
    two_segment_flip_schedule,
)


# ---------------------------------------------------------------------------
# Rademacher streams
# ---------------------------------------------------------------------------


def test_rademacher_coefficients_are_signs():
    stream = RademacherStream(3, 200, seed=1)
    assert set(np.unique(stream.coefficients)) == {-1.0, 1.0}


def test_rademacher_deterministic_under_seed():
    a = RademacherStream(4, 64, seed=7)
    b = RademacherStream(4, 64, seed=7)
    np.testing.assert_array_equal(a.coefficients, b.coefficients)
    assert not np.array_equal(a.coefficients, RademacherStream(4, 64, seed=8).coefficients)


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_rademacher_empirical_mean_bound(seed):
    # |mean| < 4 / sqrt(T): a Hoeffding bound puts the failure probability
    # below 2 exp(-8) ~ 6.7e-4 per draw; asserted on fixed seeds
    T = 10_000
    stream = RademacherStream(1, T, seed=seed)
    assert abs(stream.coefficients.mean()) < 4.0 / np.sqrt(T)


def test_linear_losses_are_odd():
    stream = RademacherStream(3, 30, seed=2)
    rng = np.random.default_rng(0)
    for t in range(1, 31):
        loss = stream.loss(t)
        x = rng.standard_normal(3)
        assert loss.value(-x) == pytest.approx(-loss.value(x), abs=1e-12)


# ---------------------------------------------------------------------------
# Drifting logistic streams
# ---------------------------------------------------------------------------


def test_drift_schedule_validation():
    with pytest.raises(ValueError):
        DriftSchedule(segment_ends=(10, 5), vectors=(np.ones(2), np.ones(2)))
    with pytest.raises(ValueError):
        DriftSchedule(segment_ends=(10,), vectors=())
    sched = DriftSchedule(segment_ends=(5, 10), vectors=(np.ones(2), -np.ones(2)))
    assert sched.vector_at(5) @ sched.vector_at(6) < 0


def test_noise_free_labels_follow_the_segment_vector():
    d, T = 4, 300
    sched = DriftSchedule(segment_ends=(T,), vectors=(np.eye(d)[0],))
    stream = DriftingLogisticStream(d, T, sched, label_noise=0.0, seed=3)
    for t in range(1, T + 1):
        loss = stream.loss(t)
        expected = 1 if loss.a[0] > 0 else -1 if loss.a[0] < 0 else 1
        assert loss.label == expected


def test_frozen_player_suffers_after_the_flip():
    # a player parked at its first-segment optimum sees its mean loss rise
    # once the labelling direction flips
    d, T = 5, 600
    sched = two_segment_flip_schedule(d, T, seed=4)
    stream = DriftingLogisticStream(d, T, sched, label_noise=0.0, seed=5)
    w = sched.vectors[0]
    before = np.mean([stream.loss(t).value(w) for t in range(1, T // 2 + 1)])
    after = np.mean([stream.loss(t).value(w) for t in range(T // 2 + 1, T + 1)])
    assert after > before + 0.3


def test_unit_cube_instances_bound_logistic_curvature():
    d, T = 6, 200
    sched = two_segment_flip_schedule(d, T, seed=6)
    stream = DriftingLogisticStream(d, T, sched, label_noise=0.1, seed=7)
    assert max(loss.lipschitz_gradient() for loss in stream.losses()) <= 0.25 * d


def test_drifting_stream_deterministic_under_seed():
    d, T = 3, 50
    sched = two_segment_flip_schedule(d, T, seed=8)
    a = DriftingLogisticStream(d, T, sched, label_noise=0.2, seed=9)
    b = DriftingLogisticStream(d, T, sched, label_noise=0.2, seed=9)
    np.testing.assert_array_equal(a.instances, b.instances)
    np.testing.assert_array_equal(a.labels, b.labels)


# ---------------------------------------------------------------------------
# CSV loading
# ---------------------------------------------------------------------------


def test_load_two_row_file(tmp_path):
    path = tmp_path / "tiny.csv"
    path.write_text("1,0.5\n-1,-0.5\n")
    stream = load_csv_stream(path)
    assert len(stream) == 2 and stream.dimension == 1
    assert stream.loss(1).label == 1
    assert stream.loss(2).label == -1


def test_zero_one_labels_map_to_signs(tmp_path):
    path = tmp_path / "zeroone.csv"
    path.write_text("1,0.2\n0,0.4\n")
    stream = load_csv_stream(path)
    assert stream.loss(2).label == -1


def test_row_order_preserved(tmp_path):
    rows = [f"1,{i / 10}" for i in range(1, 8)]
    path = tmp_path / "ordered.csv"
    path.write_text("\n".join(rows) + "\n")
    stream = load_csv_stream(path, normalize=False)
    got = [float(stream.loss(t).a[0]) for t in range(1, 8)]
    assert got == [i / 10 for i in range(1, 8)]


def test_max_abs_normalization(tmp_path):
    path = tmp_path / "scale.csv"
    path.write_text("1,2.0,5.0\n-1,-4.0,0.0\n")
    stream = load_csv_stream(path)
    np.testing.assert_allclose(stream.instances[:, 0], [0.5, -1.0])
    np.testing.assert_allclose(stream.instances[:, 1], [1.0, 0.0])


def test_malformed_rows_report_line_numbers(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,0.5\n-1,zebra\n")
    with pytest.raises(ValueError, match="bad.csv:2"):
        load_csv_stream(path)
    path2 = tmp_path / "ragged.csv"
    path2.write_text("1,0.5,0.2\n-1,0.1\n")
    with pytest.raises(ValueError, match="ragged.csv:2"):
        load_csv_stream(path2)
    path3 = tmp_path / "label.csv"
    path3.write_text("2,0.5\n")
    with pytest.raises(ValueError, match="label"):
        load_csv_stream(path3)


def test_empty_file_rejected(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(ValueError, match="empty"):
        load_csv_stream(path)


def test_round_trip_preserves_transcripts(tmp_path):
    d, T = 3, 40
    sched = two_segment_flip_schedule(d, T, seed=10)
    stream = DriftingLogisticStream(d, T, sched, label_noise=0.1, seed=11)
    path = tmp_path / "export.csv"
    save_stream_csv(stream, path)
    assert path.read_text().startswith("# seed=11,kind=drifting-logistic")
    reloaded = load_csv_stream(path, normalize=False)
    domain = Ball(d, 1.5)
    mmap = SquaredEuclideanMap()
    a = run_episode("OCO", stream, ConstantRate(0.3), mmap, domain)
    b = run_episode("OCO", reloaded, ConstantRate(0.3), mmap, domain)
    np.testing.assert_array_equal(a.decisions, b.decisions)


def test_save_rejects_linear_streams(tmp_path):
    stream = RademacherStream(2, 4, seed=0)
    with pytest.raises(ValueError):
        save_stream_csv(stream, tmp_path / "nope.csv")


def test_list_stream_validation():
    with pytest.raises(ValueError):
        ListStream([])
    with pytest.raises(IndexError):
        ListStream([RademacherStream(1, 1, 0).loss(1)]).loss(2)
