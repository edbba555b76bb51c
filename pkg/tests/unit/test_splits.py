"""Unit tests for corpus splits."""

import pytest

from intentgen.constants import SplitName
from intentgen.corpus.splits import load_splits, make_splits, parse_sizes, save_splits, splits_fingerprint
from intentgen.corpus.synthetic import synth_edu
from intentgen.corpus.windows import extract_intent_windows
from intentgen.utils.errors import ConfigurationError, SizingError, UsageError


@pytest.fixture(scope="module")
def pool():
    return extract_intent_windows(synth_edu(intents=10, windows=200, seed=5), max_length=3)


class TestParseSizes:
    """Test split size normalization."""

    def test_sequence(self):
        """Test a four-sequence maps to U, S, DEV, TEST."""
        sizes = parse_sizes([4, 3, 2, 1])

        assert sizes == {SplitName.UNSUPERVISED: 4, SplitName.SUPERVISED: 3, SplitName.DEV: 2, SplitName.TEST: 1}

    def test_string(self):
        """Test the comma form."""
        assert parse_sizes("2538,1012,211,233")[SplitName.SUPERVISED] == 1012

    def test_mapping(self):
        """Test missing mapping keys default to zero."""
        sizes = parse_sizes({'supervised': 5})

        assert sizes[SplitName.SUPERVISED] == 5
        assert sizes[SplitName.TEST] == 0

    @pytest.mark.parametrize("bad", ["1,2,x,4", [1, 2, 3], [1, -2, 3, 4]])
    def test_invalid(self, bad):
        """Test malformed sizes are usage errors."""
        with pytest.raises(UsageError):
            parse_sizes(bad)


class TestMakeSplits:
    """Test dialogue-disjoint splitting."""

    def test_exact_sizes(self, pool):
        """Test every split gets exactly the requested count."""
        splits = make_splits(pool, [100, 40, 20, 30], seed=1, name="t")

        assert splits.counts == {'unsupervised': 100, 'supervised': 40, 'weak': 0, 'dev': 20, 'test': 30}

    def test_dialogue_disjoint(self, pool):
        """Test no dialogue contributes to two splits."""
        splits = make_splits(pool, [100, 40, 20, 30], seed=1)

        seen = {}
        for split in (SplitName.UNSUPERVISED, SplitName.SUPERVISED, SplitName.DEV, SplitName.TEST):
            for dialogue_id in splits.dialogue_ids(split):
                assert seen.setdefault(dialogue_id, split) is split

    def test_unsupervised_labels_erased(self, pool):
        """Test unsupervised windows carry no intent."""
        splits = make_splits(pool, [100, 40, 20, 30], seed=1)

        unsupervised = splits.get(SplitName.UNSUPERVISED)
        assert all(w.intent is None for w in unsupervised)
        assert all(t.intent is None for w in unsupervised for t in w.utterances)
        assert all(w.split is SplitName.UNSUPERVISED for w in unsupervised)

    def test_supervised_covers_every_intent(self, pool):
        """Test the supervised split holds each intent at least once."""
        splits = make_splits(pool, [100, 40, 20, 30], seed=1)

        assert {w.intent for w in splits.get(SplitName.SUPERVISED)} == set(splits.intents)
        assert len(splits.intents) == 10

    def test_seed_determinism(self, pool):
        """Test equal seeds give identical splits and different seeds differ."""
        first = make_splits(pool, [100, 40, 20, 30], seed=7)
        second = make_splits(pool, [100, 40, 20, 30], seed=7)
        other = make_splits(pool, [100, 40, 20, 30], seed=8)

        assert splits_fingerprint(first) == splits_fingerprint(second)
        assert first.windows == second.windows
        assert splits_fingerprint(first) != splits_fingerprint(other)

    def test_oversized_request(self, pool):
        """Test requesting more windows than the pool holds."""
        with pytest.raises(SizingError) as exc_info:
            make_splits(pool, [150, 40, 20, 30], seed=1)

        assert exc_info.value.available == 200
        assert exc_info.value.requested == 240


class TestSplitsOnDisk:
    """Test splits directories."""

    def test_save_and_load(self, tmp_path, pool):
        """Test saved splits load back with meta intact."""
        splits = make_splits(pool, [100, 40, 20, 30], seed=1, name="edu")

        meta_path = save_splits(splits, tmp_path, extra_meta={'prep': {'source': 'synthetic'}})
        loaded = load_splits(tmp_path)

        assert meta_path.name == "splits.meta"
        assert loaded.name == "edu"
        assert loaded.intents == splits.intents
        assert loaded.windows == splits.windows
        assert splits_fingerprint(loaded) == splits_fingerprint(splits)

    def test_missing_meta(self, tmp_path):
        """Test a directory without splits.meta is rejected."""
        with pytest.raises(ConfigurationError):
            load_splits(tmp_path)
