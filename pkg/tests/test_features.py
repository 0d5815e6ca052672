import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from artmap_seq.errors import FeatureError
from artmap_seq.features import (
    COMPOSITION,
    DIGRAMS,
    HYDRO_C,
    HYDRO_D,
    HYDRO_T,
    N_FEATURES,
    HydropathyTable,
    NormalizationParams,
    composition,
    digram_counts,
    digrams,
    feature_names,
    fit_normalizer,
    hydropathy_composition,
    hydropathy_distribution,
    hydropathy_transmission,
    normalize,
    vectorize,
)
from artmap_seq.sequence_io import ALPHABET, ProteinSequence

EXAMPLE = "SLTKTERTIIIVSM"
residues = st.text(alphabet=ALPHABET, min_size=1, max_size=500)


def at(aa):
    return ALPHABET.index(aa)


class TestComposition:
    def test_single_residue(self):
        v = composition("AAAA")
        assert v[at("A")] == 1.0 and v.sum() == 1.0

    def test_all_twenty(self):
        assert np.allclose(composition(ALPHABET), 0.05)

    def test_example_string(self):
        v = composition(EXAMPLE)
        assert v[at("T")] == 3 / 14 and v[at("I")] == 3 / 14 and v[at("S")] == 2 / 14

    def test_accepts_sequence_objects(self):
        assert np.array_equal(composition(ProteinSequence("x", "AC")), composition("AC"))

    def test_empty(self):
        with pytest.raises(FeatureError):
            composition("")

    def test_bad_residue(self):
        with pytest.raises(FeatureError, match="B"):
            composition("ACB")


class TestHydropathy:
    def test_composition_trivial(self):
        assert hydropathy_composition("AAAA").tolist() == [0, 1, 0]
        assert hydropathy_composition("DV").tolist() == [0.5, 0, 0.5]

    def test_composition_example(self):
        assert np.allclose(hydropathy_composition(EXAMPLE), oracles.class_fractions(EXAMPLE), atol=0)

    def test_transmission(self):
        assert hydropathy_transmission("AAA").tolist() == [0, 0, 0]
        assert hydropathy_transmission("DV").tolist() == [0, 0, 1.0]
        assert hydropathy_transmission("DAV").tolist() == [0.5, 0.5, 0]
        assert hydropathy_transmission("A").tolist() == [0, 0, 0]

    def test_distribution(self):
        assert hydropathy_distribution("AAAA").tolist() == [0, 1, 0] * 4
        d = hydropathy_distribution("DDVV").reshape(4, 3)
        assert np.allclose(d[:, 2], [1, 1, 2 / 3, 1 / 2])
        assert np.allclose(d[:, 0], [0, 0, 1 / 3, 1 / 2])
        assert np.all(d[:, 1] == 0)

    @given(residues)
    def test_last_checkpoint_equals_composition(self, s):
        assert np.array_equal(hydropathy_distribution(s)[9:], hydropathy_composition(s))

    def test_table_parse_and_swap(self, tmp_path):
        text = HydropathyTable.default().to_text().replace("A neutral", "A hydrophobic")
        path = tmp_path / "t.txt"
        path.write_text(text)
        table = HydropathyTable.load(path)
        assert hydropathy_composition("AAAA", table).tolist() == [1, 0, 0]

    def test_table_must_cover_alphabet(self):
        with pytest.raises(FeatureError, match="missing"):
            HydropathyTable.parse("A neutral\n")

    def test_table_rejects_unknown_class(self):
        text = HydropathyTable.default().to_text().replace("A neutral", "A greasy")
        with pytest.raises(FeatureError, match="unknown hydropathy"):
            HydropathyTable.parse(text)

    def test_default_table_partition(self):
        m = HydropathyTable.default().mapping
        assert {aa for aa, c in m.items() if c == "hydrophobic"} == set("CFILMVW")
        assert {aa for aa, c in m.items() if c == "neutral"} == set("AGHPSTY")
        assert {aa for aa, c in m.items() if c == "polar"} == set("DEKNQR")


class TestDigrams:
    def test_example_opening_pairs(self):
        assert digrams(EXAMPLE)[:4] == ["SL", "LT", "TK", "KT"]

    def test_example_counts(self):
        v = digram_counts(EXAMPLE)
        assert v[at("S") * 20 + at("L")] == 1 / 13
        assert v[at("I") * 20 + at("I")] == 2 / 13

    def test_trivial(self):
        v = digram_counts("AA")
        assert v[0] == 1 and v.sum() == 1
        assert not digram_counts("A").any()


class TestVectorize:
    def test_layout_and_names(self):
        v = vectorize("AAAA")
        assert v.shape == (N_FEATURES,) == (438,)
        assert len(feature_names()) == 438
        assert v[COMPOSITION][0] == 1 and v[DIGRAMS][0] == 1
        assert v[HYDRO_D].tolist() == [0, 1, 0] * 4

    def test_deterministic(self):
        assert np.array_equal(vectorize(EXAMPLE), vectorize(EXAMPLE))

    @settings(max_examples=100, deadline=None)
    @given(residues)
    def test_blocks_match_brute_force(self, s):
        v = vectorize(s)
        assert np.allclose(v[COMPOSITION], oracles.composition(s), rtol=0, atol=1e-15)
        assert np.allclose(v[HYDRO_C], oracles.class_fractions(s), rtol=0, atol=1e-15)
        assert np.allclose(v[HYDRO_T], oracles.transitions(s), rtol=0, atol=1e-15)
        assert np.allclose(v[HYDRO_D], oracles.distribution(s), rtol=0, atol=1e-15)
        assert np.allclose(v[DIGRAMS], oracles.digram_freqs(s), rtol=0, atol=1e-15)

    @given(residues)
    def test_block_sums(self, s):
        v = vectorize(s)
        assert abs(v[COMPOSITION].sum() - 1) < 1e-9
        assert abs(v[HYDRO_C].sum() - 1) < 1e-9
        assert abs(v[DIGRAMS].sum() - (1 if len(s) >= 2 else 0)) < 1e-9
        assert (v >= 0).all()


class TestNormalization:
    def test_single_vector(self):
        v = vectorize(EXAMPLE)
        p = fit_normalizer([v])
        assert np.array_equal(p.minimum, v) and np.array_equal(p.maximum, v)
        assert not normalize(v, p).any()

    def test_endpoints_clamp_and_degenerate(self):
        p = NormalizationParams(np.array([0.0, 1.0, 2.0]), np.array([2.0, 3.0, 2.0]))
        assert normalize(np.array([0.0, 1.0, 2.0]), p).tolist() == [0, 0, 0]
        assert normalize(np.array([2.0, 3.0, 2.0]), p).tolist() == [1, 1, 0]
        assert normalize(np.array([5.0, -4.0, 9.0]), p).tolist() == [1, 0, 0]

    def test_fit_min_max(self):
        X = np.array([[0.0, 0.5], [0.2, 0.1]])
        p = fit_normalizer(X)
        assert p.minimum.tolist() == [0.0, 0.1] and p.maximum.tolist() == [0.2, 0.5]

    def test_empty_fit(self):
        with pytest.raises(FeatureError):
            fit_normalizer(np.empty((0, 438)))

    def test_min_above_max_rejected(self):
        with pytest.raises(FeatureError):
            NormalizationParams(np.array([1.0]), np.array([0.0]))

    @given(st.lists(residues, min_size=1, max_size=6), residues)
    @settings(deadline=None)
    def test_output_in_unit_cube(self, train, probe):
        p = fit_normalizer([vectorize(s) for s in train])
        for s in train + [probe]:
            out = normalize(vectorize(s), p)
            assert out.min() >= 0 and out.max() <= 1
        assert all(p.minimum <= p.maximum)

    def test_batch_matches_rowwise(self):
        X = np.array([vectorize(s) for s in ("ACDE", "WWY", "K")])
        p = fit_normalizer(X[:2])
        assert np.array_equal(normalize(X, p), np.vstack([normalize(x, p) for x in X]))
