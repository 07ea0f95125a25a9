import numpy as np
import pytest

from kdauth import ingest
from kdauth.features import extract_kit, naive_kit
from kdauth.ingest import QuestionIndex, build_log
from kdauth.synthgen import (
    TypistProfile,
    generate,
    generate_pairs,
    inject_revisit,
    make_profiles,
    pairs_to_events,
    table_fixture,
)
from kdauth.windowing import Window


def profile(seed=1, **kw):
    return TypistProfile(user_id="u1", seed=seed, **kw)


class TestGenerate:
    def test_logs_pass_ingest_with_zero_orphans(self):
        streams = generate(make_profiles(2, seed=0), keystrokes_per_question=40)
        for (user, phase), events in streams.items():
            log, stats = build_log(user, phase, events)
            assert stats.orphan_downs == 0
            assert stats.orphan_ups == 0
            assert stats.matched == len(log.pairs)

    def test_no_revisits_all_continuous(self):
        pairs = generate_pairs(profile(revisit_probability=0.0), phase=1, keystrokes_per_question=30)
        flagged = ingest.flag_continuity(sorted(pairs, key=lambda p: p.keydown_ts))
        assert all(p.continuous for p in flagged)

    def test_revisits_produce_discontinuities(self):
        pairs = generate_pairs(
            profile(seed=5, revisit_probability=1.0), phase=1, keystrokes_per_question=30
        )
        flagged = ingest.flag_continuity(sorted(pairs, key=lambda p: p.keydown_ts))
        assert any(not p.continuous for p in flagged)

    def test_kht_median_fidelity(self):
        p = profile(seed=9, kht_sigma=0.25)
        pairs = generate_pairs(p, phase=1, keystrokes_per_question=700)
        space = [q.hold_time for q in pairs if q.code == "Space"]
        assert len(space) >= 1000
        expect = p.kht_median("Space")
        assert abs(np.median(space) - expect) / expect < 0.05

    def test_phase_streams_deterministic(self):
        a = generate_pairs(profile(seed=3), phase=1, keystrokes_per_question=20)
        b = generate_pairs(profile(seed=3), phase=1, keystrokes_per_question=20)
        assert a == b

    def test_distinct_profiles_have_distinct_signatures(self):
        p1, p2 = make_profiles(2, seed=4)
        assert p1.kht_median("KeyA") != p2.kht_median("KeyA")


class TestInjectRevisit:
    def test_zero_injections_identity(self):
        pairs = generate_pairs(profile(), phase=1, keystrokes_per_question=20)
        assert inject_revisit(pairs, profile(), 1, QuestionIndex(1, 1), at_ts=0, n_keys=0) == list(
            pairs
        )

    def test_appended_burst_targets_earlier_question(self):
        pairs = generate_pairs(profile(), phase=1, keystrokes_per_question=20)
        last_ts = max(p.keydown_ts for p in pairs)
        out = inject_revisit(pairs, profile(), 1, QuestionIndex(1, 1), at_ts=last_ts + 90_000)
        burst = out[len(pairs) :]
        assert all(p.question_index == QuestionIndex(1, 1) for p in burst)
        assert burst[0].keydown_ts > last_ts

    def test_injection_spikes_naive_kit_only(self):
        pairs = generate_pairs(
            profile(revisit_probability=0.0), phase=1, questions_per_scenario=2,
            keystrokes_per_question=30,
        )
        last_ts = max(p.keydown_ts for p in pairs)
        out = inject_revisit(pairs, profile(), 1, QuestionIndex(1, 1), at_ts=last_ts + 91_982)
        events = pairs_to_events(out, "u1", 1)
        log, _ = build_log("u1", 1, events)
        q11 = [p for p in log.pairs if p.question_index == QuestionIndex(1, 1)]
        window = Window("u1", 1, 1, 1, "low", 0, tuple(q11))
        naive_max = max(v for vals in naive_kit(window).values() for v in vals)
        aware = [v for vals in extract_kit(window).values() for v in vals]
        assert naive_max > 5000
        assert all(v <= 5000 for v in aware)


class TestTableFixture:
    def test_exact_timestamps_and_flags(self):
        log, stats = build_log("user00", 1, table_fixture())
        assert stats.orphan_downs == stats.orphan_ups == 0
        first, last = log.pairs[0], log.pairs[-1]
        assert (first.key, first.code) == ("ㅁ", "KeyA")
        assert (first.keydown_ts, first.keyup_ts) == (1723028762335, 1723028762388)
        assert first.continuous is True
        assert log.pairs[1].continuous is True  # forward move into 1.2
        assert (last.key, last.keydown_ts) == ("Backspace", 1723028854317)
        assert last.continuous is False
        assert last.keydown_ts - first.keydown_ts == 91_982
