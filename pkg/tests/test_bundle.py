import numpy as np
import pytest

from kdauth.bundle import (
    BundleFormatError,
    VerifierBundle,
    enroll,
    load_bundle,
    save_bundle,
)
from kdauth.ingest import build_log
from kdauth.models import GridSpec
from kdauth.synthgen import generate, make_profiles
from kdauth.windowing import WindowConfig, segment


@pytest.fixture(scope="module")
def logs():
    profiles = make_profiles(3, seed=11, base_spread=0.6)
    streams = generate(profiles, keystrokes_per_question=60)
    out = {}
    for (user, phase), events in streams.items():
        eventlog, _ = build_log(user, phase, events)
        out[(user, phase)] = eventlog
    return out


WINDOW = WindowConfig(length=40, overlap=20)

GRIDS = {
    "svm": {"C": [1.0], "gamma": ["auto"]},
    "mlp": {"hidden": [8], "lr": [0.05], "epochs": [60]},
    "gbt": {"n_trees": [15], "depth": [2], "lr": [0.3]},
}


def make_bundle(logs, kind):
    return enroll(
        logs, "user00", kind, window=WINDOW,
        grid=GridSpec(grids=GRIDS, cv_folds=3), select_k=20, seed=0,
    )


@pytest.mark.parametrize("kind", ["svm", "mlp", "gbt"])
def test_roundtrip_scores_identical(tmp_path, logs, kind):
    bundle = make_bundle(logs, kind)
    path = tmp_path / f"{kind}.kdab"
    save_bundle(bundle, path)
    loaded = load_bundle(path)

    windows = segment(logs[("user00", 2)], WINDOW)
    assert np.array_equal(bundle.score_windows(windows), loaded.score_windows(windows))
    assert loaded.user_id == "user00"
    assert loaded.threshold == bundle.threshold
    assert loaded.window == WINDOW
    assert loaded.verifier.params == bundle.verifier.params
    assert loaded.vocabulary.entries == bundle.vocabulary.entries


def test_threshold_separates_genuine_from_impostor(logs):
    bundle = make_bundle(logs, "gbt")
    own = bundle.score_windows(segment(logs[("user00", 2)], WINDOW))
    other = bundle.score_windows(segment(logs[("user01", 2)], WINDOW))
    assert np.mean(own >= bundle.threshold) > np.mean(other >= bundle.threshold)


def test_enroll_unknown_user_rejected(logs):
    with pytest.raises(ValueError):
        enroll(logs, "ghost", "gbt", window=WINDOW, grid=GridSpec(grids=GRIDS))


class TestFormatValidation:
    def test_bad_magic(self, tmp_path):
        p = tmp_path / "x.kdab"
        p.write_bytes(b"NOPE" + b"\x00" * 20)
        with pytest.raises(BundleFormatError, match="magic"):
            load_bundle(p)

    def test_unsupported_version(self, tmp_path, logs):
        bundle = make_bundle(logs, "gbt")
        p = tmp_path / "x.kdab"
        save_bundle(bundle, p)
        blob = bytearray(p.read_bytes())
        blob[4] = 99
        p.write_bytes(bytes(blob))
        with pytest.raises(BundleFormatError, match="version"):
            load_bundle(p)

    def test_corrupt_payload_fails_checksum(self, tmp_path, logs):
        bundle = make_bundle(logs, "gbt")
        p = tmp_path / "x.kdab"
        save_bundle(bundle, p)
        blob = bytearray(p.read_bytes())
        blob[30] ^= 0xFF
        p.write_bytes(bytes(blob))
        with pytest.raises(BundleFormatError, match="checksum"):
            load_bundle(p)

    def test_truncated_file(self, tmp_path, logs):
        bundle = make_bundle(logs, "gbt")
        p = tmp_path / "x.kdab"
        save_bundle(bundle, p)
        p.write_bytes(p.read_bytes()[:40])
        with pytest.raises(BundleFormatError, match="truncated"):
            load_bundle(p)
