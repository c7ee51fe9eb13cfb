"""Synthetic feature generation and the binary dataset container."""

import numpy as np
import pytest

import visemelab as vl
from visemelab.errors import ConfigurationError
from visemelab.features import ConfusabilityModel, GeneratorParams
from visemelab.visemes import Language


@pytest.fixture(scope="module")
def toy(bundled):
    tables, lexicons, _ = bundled
    words = vl.WordList(Language.ENGLISH, (("PEOPLE", 6), ("THINK", 4), ("ABOUT", 5)))
    corpus = vl.build_labeled_corpus(words, lexicons[Language.ENGLISH], tables)
    inventory = vl.build_inventory(tables, Language.ENGLISH)
    return corpus, inventory


def flat_model(labels, dim=6, sigma=0.0, frames=(2, 2)):
    rng = np.random.default_rng(7)
    means = rng.standard_normal((len(labels), dim))
    return ConfusabilityModel(
        labels=tuple(labels),
        means=means,
        sigma=sigma,
        confusion=np.zeros((len(labels), len(labels))),
        frames_per_viseme=frames,
    )


class TestConfusabilityModel:
    def test_confusion_must_be_symmetric(self):
        confusion = np.zeros((2, 2))
        confusion[0, 1] = 0.5
        with pytest.raises(ConfigurationError):
            ConfusabilityModel(
                labels=("a", "b"),
                means=np.zeros((2, 4)),
                sigma=1.0,
                confusion=confusion,
                frames_per_viseme=(1, 2),
            )

    def test_mixing_pulls_means_together(self):
        confusion = np.array([[0.0, 1.0], [1.0, 0.0]])
        model = ConfusabilityModel(
            labels=("a", "b"),
            means=np.array([[1.0, 0.0], [0.0, 1.0]]),
            sigma=0.1,
            confusion=confusion,
            frames_per_viseme=(1, 1),
        )
        # weight 1 collapses the pair onto its midpoint
        assert np.allclose(model.mixed_means[0], model.mixed_means[1])

    def test_default_model_covers_merged_inventory(self, merged_inventory):
        model = vl.default_confusability_model(merged_inventory.rendered, seed=3)
        assert model.labels == merged_inventory.rendered
        anchor_idx = model.labels.index(GeneratorParams().anchor)
        assert np.allclose(model.means[anchor_idx], 0.0)

    def test_language_offsets_shift_means_oppositely(self, merged_inventory):
        model = vl.default_confusability_model(merged_inventory.rendered, seed=3)
        en = model.means_for_language("en")
        cmn = model.means_for_language("cmn")
        assert not np.allclose(en, cmn)
        assert np.allclose((en + cmn) / 2, model.mixed_means)


class TestGenerateFeatures:
    def test_noise_free_frames_equal_means(self, toy):
        corpus, inventory = toy
        model = flat_model(inventory.rendered)
        data = vl.generate_features(corpus, model, inventory, seed=1)
        for frame, label in zip(data.features, data.labels):
            assert np.allclose(frame, model.mixed_means[label], atol=1e-6)

    def test_same_seed_bit_identical(self, toy):
        corpus, inventory = toy
        model = vl.default_confusability_model(inventory.rendered, seed=5)
        a = vl.generate_features(corpus, model, inventory, seed=2)
        b = vl.generate_features(corpus, model, inventory, seed=2)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)
        assert np.array_equal(a.item_lengths, b.item_lengths)

    def test_different_seed_differs(self, toy):
        corpus, inventory = toy
        model = vl.default_confusability_model(inventory.rendered, seed=5)
        a = vl.generate_features(corpus, model, inventory, seed=2)
        b = vl.generate_features(corpus, model, inventory, seed=3)
        assert not np.array_equal(a.features, b.features)

    def test_item_count_matches_samples(self, toy):
        corpus, inventory = toy
        model = flat_model(inventory.rendered)
        data = vl.generate_features(corpus, model, inventory, seed=1)
        assert data.n_items == corpus.total_samples()

    def test_frame_counts_within_range(self, toy):
        corpus, inventory = toy
        model = vl.default_confusability_model(inventory.rendered, seed=5)
        data = vl.generate_features(corpus, model, inventory, seed=4)
        offset = 0
        item = 0
        for entry in corpus.entries:
            for _ in range(entry.sample_count):
                length = int(data.item_lengths[item])
                lo, hi = model.frames_per_viseme
                assert lo * len(entry.visemes) <= length <= hi * len(entry.visemes)
                item += 1
                offset += length
        assert offset == len(data)

    def test_split_nesting_subset_property(self, bundled):
        tables, lexicons, word_lists = bundled
        corpus = vl.build_labeled_corpus(
            vl.WordList(Language.ENGLISH, word_lists[Language.ENGLISH].entries[:40]),
            lexicons[Language.ENGLISH], tables,
        )
        inventory = vl.build_inventory(tables, Language.ENGLISH)
        model = vl.default_confusability_model(inventory.rendered, seed=11)
        datasets = {
            f: vl.generate_features(
                vl.split_corpus(corpus, vl.SplitSpec(f)), model, inventory, seed=9
            )
            for f in (0.25, 0.5, 1.0)
        }
        # Per word, the samples kept at a smaller fraction are the first
        # samples of any larger fraction: item-wise prefix per word.
        def per_word_items(data, corpus_split):
            out = []
            item = 0
            offset = 0
            for entry in corpus_split.entries:
                frames = []
                for _ in range(entry.sample_count):
                    length = int(data.item_lengths[item])
                    frames.append(data.features[offset:offset + length])
                    item += 1
                    offset += length
                out.append(frames)
            return out

        small = per_word_items(datasets[0.25], vl.split_corpus(corpus, vl.SplitSpec(0.25)))
        large = per_word_items(datasets[1.0], corpus)
        for word_small, word_large in zip(small, large):
            assert len(word_small) <= len(word_large)
            for item_small, item_large in zip(word_small, word_large):
                assert np.array_equal(item_small, item_large)

    def test_unknown_viseme_is_configuration_error(self, toy):
        corpus, inventory = toy
        model = flat_model(inventory.rendered[:3])
        with pytest.raises(ConfigurationError):
            vl.generate_features(corpus, model, inventory, seed=0)

    def test_nearest_mean_oracle_on_separated_toy(self, bundled):
        # With noise small against the mean separation, a brute-force
        # nearest-mean classifier must get nearly every frame right.
        tables, lexicons, _ = bundled
        words = vl.WordList(Language.ENGLISH, (("PEOPLE", 30), ("THINK", 30), ("ABOUT", 30)))
        corpus = vl.build_labeled_corpus(words, lexicons[Language.ENGLISH], tables)
        inventory = vl.build_inventory(tables, Language.ENGLISH)
        rng = np.random.default_rng(0)
        means = rng.standard_normal((len(inventory), 8)) * 5.0
        model = ConfusabilityModel(
            labels=inventory.rendered,
            means=means,
            sigma=0.05,
            confusion=np.zeros((len(inventory), len(inventory))),
            frames_per_viseme=(2, 4),
        )
        data = vl.generate_features(corpus, model, inventory, seed=21)
        dists = ((data.features[:, None, :] - model.mixed_means[None]) ** 2).sum(axis=2)
        preds = dists.argmin(axis=1)
        assert (preds == data.labels).mean() > 0.99


class TestContainer:
    def test_round_trip(self, toy, tmp_path):
        corpus, inventory = toy
        model = vl.default_confusability_model(inventory.rendered, seed=5)
        data = vl.generate_features(corpus, model, inventory, seed=2)
        path = tmp_path / "data.ppfd"
        vl.save_dataset(data, path)
        loaded = vl.load_dataset(path, inventory.rendered)
        assert np.array_equal(loaded.features, data.features)
        assert np.array_equal(loaded.labels, data.labels)
        assert np.array_equal(loaded.item_lengths, data.item_lengths)

    def test_magic_bytes(self, toy, tmp_path):
        corpus, inventory = toy
        model = flat_model(inventory.rendered)
        data = vl.generate_features(corpus, model, inventory, seed=2)
        path = tmp_path / "data.ppfd"
        vl.save_dataset(data, path)
        assert path.read_bytes()[:4] == b"PPFD"

    def test_inventory_mismatch_rejected(self, toy, tmp_path):
        corpus, inventory = toy
        model = flat_model(inventory.rendered)
        data = vl.generate_features(corpus, model, inventory, seed=2)
        path = tmp_path / "data.ppfd"
        vl.save_dataset(data, path)
        with pytest.raises(ConfigurationError):
            vl.load_dataset(path, inventory.rendered[:-1] + ("zz",))
