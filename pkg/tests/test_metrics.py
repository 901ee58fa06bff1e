import numpy as np
import pytest

from antimimic import (ChangeVector, Forecast, change_vector,
                       directional_accuracy, f1_binary, mim, mse, shifted_mse,
                       summarize)


def random_forecast(rng, n=None):
    n = n or int(rng.integers(1, 40))
    return Forecast(targets=rng.normal(size=n), predictions=rng.normal(size=n),
                    anchor=float(rng.normal()))


class TestForecast:
    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError, match="share a positive length"):
            Forecast(targets=[1.0, 2.0], predictions=[1.0], anchor=0.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            Forecast(targets=[1.0], predictions=[float("nan")], anchor=0.0)

    def test_previous_targets(self):
        f = Forecast(targets=[1.0, 2.0, 3.0], predictions=[0.0, 0.0, 0.0], anchor=9.0)
        assert np.array_equal(f.previous_targets, [9.0, 1.0, 2.0])


class TestMse:
    def test_perfect(self):
        f = Forecast(targets=[1.0, -2.0, 0.5], predictions=[1.0, -2.0, 0.5], anchor=0.0)
        assert mse(f) == 0.0

    def test_hand_value(self):
        f = Forecast(targets=[1.0, 2.0], predictions=[0.0, 0.0], anchor=0.0)
        assert mse(f) == pytest.approx(2.5)

    def test_single_step(self):
        f = Forecast(targets=[0.5], predictions=[0.25], anchor=0.0)
        assert mse(f) == pytest.approx(0.0625)


class TestShiftedMse:
    def test_copy_last_is_zero(self):
        rng = np.random.default_rng(0)
        z = rng.normal(size=30)
        anchor = float(rng.normal())
        prev = np.concatenate([[anchor], z[:-1]])
        f = Forecast(targets=z, predictions=prev, anchor=anchor)
        assert shifted_mse(f) == 0.0

    def test_concrete_zero_case(self):
        f = Forecast(targets=[1.0, 2.0], predictions=[0.0, 1.0], anchor=0.0)
        assert shifted_mse(f) == 0.0

    def test_hand_value(self):
        f = Forecast(targets=[1.0, 2.0], predictions=[1.0, 1.0], anchor=0.0)
        assert shifted_mse(f) == pytest.approx(0.5)


class TestMim:
    def test_perfect_model_lower_bound(self):
        f = Forecast(targets=[1.0, 2.0], predictions=[1.0, 2.0], anchor=0.0)
        assert mim(f) == pytest.approx(-2.0)

    def test_copy_last_positive(self):
        f = Forecast(targets=[1.0, 2.0], predictions=[0.0, 1.0], anchor=0.0)
        assert mim(f) == pytest.approx(2.0)

    def test_identity_random(self):
        rng = np.random.default_rng(42)
        for trial in range(500):
            f = random_forecast(rng)
            lhs = mim(f)
            rhs = len(f) * (mse(f) - shifted_mse(f))
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_perfect_model_formula_random(self):
        rng = np.random.default_rng(43)
        for trial in range(100):
            z = rng.normal(size=int(rng.integers(1, 30)))
            anchor = float(rng.normal())
            f = Forecast(targets=z, predictions=z, anchor=anchor)
            prev = np.concatenate([[anchor], z[:-1]])
            assert mim(f) == pytest.approx(-float(np.sum((prev - z) ** 2)), rel=1e-12)


class TestChangeVector:
    def test_hand_example(self):
        cv = change_vector([1.0, 2.0, 1.0, 1.0], v0=0.0)
        assert np.array_equal(cv.signs, [1, 1, -1, 0])

    def test_constant_all_zero(self):
        cv = change_vector([2.0, 2.0, 2.0], v0=2.0)
        assert np.array_equal(cv.signs, [0, 0, 0])

    def test_strictly_increasing_all_plus(self):
        cv = change_vector(np.arange(10.0), v0=-1.0)
        assert np.array_equal(cv.signs, np.ones(10, dtype=int))

    def test_change_vector_type_invariant(self):
        with pytest.raises(ValueError, match="signs"):
            ChangeVector([2, 0, -1])


class TestDirectionalAccuracy:
    def test_perfect_model(self):
        rng = np.random.default_rng(3)
        z = rng.normal(size=20)
        f = Forecast(targets=z, predictions=z, anchor=0.5)
        assert directional_accuracy(f, lag=0) == 1.0

    def test_hand_example(self):
        f = Forecast(targets=[1.0, 2.0, 1.0, 1.0],
                     predictions=[0.5, 2.5, 0.5, 2.0], anchor=0.0)
        # predicted signs [+1,+1,-1,+1] vs true [+1,+1,-1,0]
        assert directional_accuracy(f, lag=0) == pytest.approx(0.75)

    def test_copy_last_shifted_accuracy_is_one(self):
        rng = np.random.default_rng(4)
        z = rng.normal(size=25)
        anchor = float(rng.normal())
        prev = np.concatenate([[anchor], z[:-1]])
        f = Forecast(targets=z, predictions=prev, anchor=anchor)
        assert directional_accuracy(f, lag=1) == 1.0

    def test_range_and_lag_validation(self):
        rng = np.random.default_rng(5)
        for trial in range(50):
            f = random_forecast(rng, n=int(rng.integers(2, 30)))
            for lag in (0, 1):
                acc = directional_accuracy(f, lag=lag)
                assert 0.0 <= acc <= 1.0
        with pytest.raises(ValueError, match="lag"):
            directional_accuracy(f, lag=2)
        short = Forecast(targets=[1.0], predictions=[1.0], anchor=0.0)
        with pytest.raises(ValueError, match="at least 2"):
            directional_accuracy(short, lag=1)

    def test_zero_sign_matches_only_zero(self):
        # flat target, moving prediction: signs 0 vs +1 never match
        f = Forecast(targets=[1.0, 1.0, 1.0], predictions=[2.0, 3.0, 4.0], anchor=1.0)
        assert directional_accuracy(f, lag=0) == 0.0


class TestF1Binary:
    def test_perfect_model_with_positives(self):
        f = Forecast(targets=[1.0, 2.0, 1.5], predictions=[1.0, 2.0, 1.5], anchor=0.0)
        assert f1_binary(f, positive_sign=1) == 1.0

    def test_all_negative_predictions(self):
        f = Forecast(targets=[1.0, 2.0, 3.0], predictions=[0.5, 0.25, 0.1], anchor=1.0)
        assert f1_binary(f, positive_sign=1) == 0.0

    def test_hand_confusion_matrix(self):
        # true signs [+1,-1,+1,0], predicted [+1,+1,-1,0]: tp=1, fp=1, fn=1
        f = Forecast(targets=[1.0, 0.0, 1.0, 1.0],
                     predictions=[2.0, 3.0, 2.0, 2.0], anchor=0.0)
        assert np.array_equal(change_vector(f.targets, f.anchor).signs, [1, -1, 1, 0])
        assert np.array_equal(change_vector(f.predictions, f.anchor).signs, [1, 1, -1, 0])
        assert f1_binary(f, positive_sign=1) == pytest.approx(0.5)

    def test_no_positives_anywhere_returns_zero(self):
        f = Forecast(targets=[1.0, 1.0], predictions=[1.0, 1.0], anchor=1.0)
        assert f1_binary(f, positive_sign=1) == 0.0

    def test_range(self):
        rng = np.random.default_rng(6)
        for trial in range(50):
            f = random_forecast(rng)
            for sign in (1, -1):
                assert 0.0 <= f1_binary(f, positive_sign=sign) <= 1.0


class TestSummarize:
    def test_keys_and_consistency(self):
        rng = np.random.default_rng(7)
        f = random_forecast(rng, n=20)
        out = summarize(f)
        assert set(out) == {"mse", "s_mse", "mim", "acc", "s_acc", "f1"}
        assert out["mse"] == mse(f)
        assert out["mim"] == mim(f)

    def test_single_step_s_acc_nan(self):
        f = Forecast(targets=[1.0], predictions=[2.0], anchor=0.0)
        assert np.isnan(summarize(f)["s_acc"])
