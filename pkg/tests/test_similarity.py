"""String metrics, blocking and clustering against independent oracles."""

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amdkit.model import Amendment, Corpus, TargetKind, TargetLocation
from amdkit.similarity import (
    Metric,
    PrefixScaleOutOfRangeError,
    UnionFind,
    _score_index_pairs,
    build_index,
    candidate_pairs,
    char_ngrams,
    duplicate_rate,
    find_duplicates,
    fuzzy_ratio,
    indel_distance,
    jaro,
    jaro_winkler,
    score,
)
from amdkit.synth import synthetic_corpus
from amdkit.textnorm import match_key

from oracles import (
    fuzzy_ratio_reference,
    indel_reference,
    jaro_reference,
    jaro_winkler_reference,
)

short_text = st.text(alphabet="abcdef ", max_size=12)
any_text = st.text(max_size=40)


def _amendment(ident, dispositif):
    return Amendment(
        id=ident,
        bill_ref="PLF 2024",
        target=TargetLocation(TargetKind.EXISTING_ARTICLE, "Article 1"),
        dispositif=dispositif,
        rationale="Amendement de précision.",
    )


class TestJaro:
    def test_identical(self):
        assert jaro("abc", "abc") == 1.0

    def test_disjoint(self):
        assert jaro("abc", "xyz") == 0.0

    def test_martha(self):
        # m=6, t=1, |s1|=|s2|=6 -> 17/18
        assert jaro("MARTHA", "MARHTA") == pytest.approx(0.9444444444444445, abs=1e-12)

    def test_empty_conventions(self):
        assert jaro("", "") == 1.0
        assert jaro("", "abc") == 0.0
        assert jaro("abc", "") == 0.0

    def test_single_char(self):
        assert jaro("a", "a") == 1.0
        assert jaro("a", "b") == 0.0

    @given(short_text, short_text)
    @settings(max_examples=300)
    def test_matches_reference(self, s1, s2):
        assert jaro(s1, s2) == pytest.approx(jaro_reference(s1, s2), abs=1e-12)

    @given(any_text, any_text)
    def test_symmetry_and_bounds(self, s1, s2):
        v = jaro(s1, s2)
        assert v == pytest.approx(jaro(s2, s1), abs=1e-12)
        assert 0.0 <= v <= 1.0

    @given(any_text)
    def test_identity(self, s):
        assert jaro(s, s) == 1.0


class TestJaroWinkler:
    def test_martha(self):
        # 17/18 + 3 * 0.1 * (1 - 17/18)
        assert jaro_winkler("MARTHA", "MARHTA", 0.1) == pytest.approx(
            0.9611111111111111, abs=1e-12
        )

    @given(any_text, st.floats(0.0, 0.25))
    def test_identity_fixed_point(self, s, p):
        assert jaro_winkler(s, s, p) == 1.0

    def test_prefix_scale_cap(self):
        with pytest.raises(PrefixScaleOutOfRangeError):
            jaro_winkler("abc", "abd", 0.3)
        with pytest.raises(PrefixScaleOutOfRangeError):
            jaro_winkler("abc", "abd", -0.01)

    @given(short_text, short_text, st.floats(0.0, 0.25))
    @settings(max_examples=300)
    def test_matches_reference(self, s1, s2, p):
        assert jaro_winkler(s1, s2, p) == pytest.approx(
            jaro_winkler_reference(s1, s2, p), abs=1e-12
        )

    @given(any_text, any_text, st.floats(0.0, 0.25))
    def test_dominates_jaro(self, s1, s2, p):
        assert jaro_winkler(s1, s2, p) >= jaro(s1, s2)
        assert jaro_winkler(s1, s2, p) <= 1.0


class TestFuzzyRatio:
    def test_identical(self):
        assert fuzzy_ratio("abcd", "abcd") == 1.0

    def test_one_empty(self):
        assert fuzzy_ratio("abcd", "") == 0.0

    def test_both_empty(self):
        assert fuzzy_ratio("", "") == 1.0

    def test_kitten_sitting(self):
        # exhaustive recursion gives indel distance 5 over total length 13
        assert indel_distance("kitten", "sitting") == 5
        assert fuzzy_ratio("kitten", "sitting") == pytest.approx(
            0.6153846153846154, abs=1e-12
        )

    @given(short_text, short_text)
    @settings(max_examples=300)
    def test_matches_reference(self, s1, s2):
        assert indel_distance(s1, s2) == indel_reference(s1, s2)
        assert fuzzy_ratio(s1, s2) == pytest.approx(
            fuzzy_ratio_reference(s1, s2), abs=1e-12
        )

    @given(any_text, any_text)
    def test_symmetry_bounds_identity(self, s1, s2):
        v = fuzzy_ratio(s1, s2)
        assert v == pytest.approx(fuzzy_ratio(s2, s1), abs=1e-12)
        assert 0.0 <= v <= 1.0
        assert fuzzy_ratio(s1, s1) == 1.0


class TestBulkKernels:
    """The numba batch kernels must agree exactly with the pure functions."""

    @pytest.mark.parametrize("metric", list(Metric))
    def test_kernel_equals_python(self, metric):
        rng = random.Random(7)
        texts = [
            "".join(rng.choice("abcdfg ") for _ in range(rng.randrange(0, 60)))
            for _ in range(80)
        ]
        ia = np.array([rng.randrange(80) for _ in range(400)], dtype=np.int64)
        ib = np.array([rng.randrange(80) for _ in range(400)], dtype=np.int64)
        out = _score_index_pairs(texts, ia, ib, metric, 0.1)
        for p in range(400):
            expect = score(texts[ia[p]], texts[ib[p]], metric, 0.1)
            assert out[p] == pytest.approx(expect, abs=1e-15)

    def test_kernel_unicode(self):
        texts = ["exonérer de tva", "exonerer de tva", "日本語のテキスト", ""]
        ia = np.array([0, 2, 3], dtype=np.int64)
        ib = np.array([1, 2, 3], dtype=np.int64)
        for metric in Metric:
            out = _score_index_pairs(texts, ia, ib, metric, 0.1)
            for p, (i, j) in enumerate(zip(ia, ib)):
                assert out[p] == pytest.approx(score(texts[i], texts[j], metric, 0.1), abs=1e-15)

    def test_banded_fuzzy_exact_at_or_above_threshold(self):
        # thresholded scoring may shortcut pairs below the bar, never above it
        rng = random.Random(13)
        texts = []
        for _ in range(60):
            base = "".join(rng.choice("abcdefg ") for _ in range(rng.randrange(20, 120)))
            mutated = list(base)
            for _ in range(rng.randrange(0, 6)):
                mutated[rng.randrange(len(mutated))] = rng.choice("abcdefg ")
            texts.extend([base, "".join(mutated)])
        ia = np.arange(0, len(texts), 2, dtype=np.int64)
        ib = ia + 1
        threshold = 0.9
        banded = _score_index_pairs(texts, ia, ib, Metric.FUZZY_RATIO, 0.1, threshold=threshold)
        for p in range(ia.shape[0]):
            exact = fuzzy_ratio(texts[ia[p]], texts[ib[p]])
            if exact >= threshold:
                assert banded[p] == pytest.approx(exact, abs=1e-15)
            else:
                assert banded[p] < threshold


class TestBlocking:
    def test_identical_dispositifs_are_candidates(self):
        text = "Exonérer de taxe sur la valeur ajoutée les projets d'habitat participatif."
        corpus = Corpus.build([_amendment("a1", text), _amendment("a2", text)])
        index = build_index(corpus)
        assert ("a1", "a2") in candidate_pairs(index)

    def test_disjoint_alphabets_not_candidates(self):
        corpus = Corpus.build(
            [_amendment("a1", "aaab aabb abbb"), _amendment("a2", "cccd ccdd cddd")]
        )
        assert candidate_pairs(build_index(corpus)) == []

    def test_rejects_tiny_ngram(self):
        corpus = Corpus.build([_amendment("a1", "abc")])
        with pytest.raises(ValueError):
            build_index(corpus, n=1)

    def test_every_long_doc_posted(self):
        sc = synthetic_corpus(40, seed=11)
        index = build_index(sc.corpus)
        posted = set().union(*index.postings.values())
        for a in sc.corpus:
            if len(match_key(a.dispositif)) >= index.n:
                assert a.id in posted

    def test_candidates_match_bruteforce_sets(self):
        sc = synthetic_corpus(120, seed=5, n_duplicates=20)
        index = build_index(sc.corpus)
        got = set(candidate_pairs(index))
        ids = sorted(a.id for a in sc.corpus)
        keys = {a.id: match_key(a.dispositif) for a in sc.corpus}
        grams = {i: char_ngrams(keys[i], 3) for i in ids}
        expected = {
            (a, b)
            for ai, a in enumerate(ids)
            for b in ids[ai + 1 :]
            if len(grams[a] & grams[b]) >= index.min_shared
        }
        assert got == expected

    def test_candidates_cover_high_fuzzy_pairs(self):
        # blocking must not lose any pair the exhaustive scan scores >= 0.9
        sc = synthetic_corpus(200, seed=9, n_duplicates=35, dup_metric=Metric.FUZZY_RATIO)
        index = build_index(sc.corpus)
        got = set(candidate_pairs(index))
        ids = sorted(a.id for a in sc.corpus)
        keys = {a.id: match_key(a.dispositif) for a in sc.corpus}
        texts = [keys[i] for i in ids]
        iu, ju = np.triu_indices(len(ids), k=1)
        scores = _score_index_pairs(
            texts, iu.astype(np.int64), ju.astype(np.int64), Metric.FUZZY_RATIO, 0.1
        )
        for p in np.flatnonzero(scores >= 0.9).tolist():
            assert (ids[iu[p]], ids[ju[p]]) in got


class TestFindDuplicates:
    def test_identical_pair_and_outsider(self):
        text = "Exonérer de taxe sur la valeur ajoutée les projets d'habitat participatif."
        other = "Proroger le fonds de solidarité pour le logement jusqu'en 2027 au plus tard."
        corpus = Corpus.build(
            [_amendment("a1", text), _amendment("a2", text), _amendment("a3", other)]
        )
        matches, clusters = find_duplicates(corpus)
        assert [(m.id_a, m.id_b) for m in matches] == [("a1", "a2")]
        assert matches[0].score == 1.0
        assert len(clusters) == 1
        assert clusters[0].member_ids == ("a1", "a2")
        assert clusters[0].representative_id == "a1"

    def test_transitive_chain_single_cluster(self):
        base = "Majorer le taux applicable aux opérations de cession de titres de participation."
        a = base
        b = base.replace("Majorer", "Majorer durablement")
        c = base.replace("Majorer", "Majorer durablement et fortement")
        corpus = Corpus.build([_amendment("x1", a), _amendment("x2", b), _amendment("x3", c)])
        matches, clusters = find_duplicates(corpus, threshold=0.92, metric=Metric.FUZZY_RATIO)
        pairs = {(m.id_a, m.id_b) for m in matches}
        assert ("x1", "x2") in pairs and ("x2", "x3") in pairs
        assert ("x1", "x3") not in pairs
        assert len(clusters) == 1
        assert clusters[0].member_ids == ("x1", "x2", "x3")

    def test_threshold_validation(self):
        corpus = Corpus.build([_amendment("a", "texte quelconque ici")])
        with pytest.raises(ValueError):
            find_duplicates(corpus, threshold=0.0)
        with pytest.raises(ValueError):
            find_duplicates(corpus, threshold=1.2)

    @pytest.mark.parametrize("metric", list(Metric))
    def test_blocked_equals_exhaustive(self, metric):
        sc = synthetic_corpus(150, seed=21, n_duplicates=25, dup_metric=metric)
        blocked = find_duplicates(sc.corpus, metric=metric)
        full = find_duplicates(sc.corpus, metric=metric, exhaustive=True)
        assert blocked == full

    def test_history_cross_matching(self):
        text = "Abroger la contribution exceptionnelle sur les hauts revenus à compter de 2026."
        current = Corpus.build([_amendment("cur-1", text), _amendment("cur-2", "Texte sans rapport aucun avec le reste du corpus présent.")])
        history = Corpus.build([
            _amendment("his-1", text),
            _amendment("his-2", text),  # history-history pair must not be reported
        ])
        matches, clusters = find_duplicates(current, history=history)
        pairs = [(m.id_a, m.id_b) for m in matches]
        assert ("cur-1", "his-1") in pairs
        assert ("cur-1", "his-2") in pairs
        assert ("his-1", "his-2") not in pairs
        assert len(clusters) == 1
        assert clusters[0].representative_id == "cur-1"

    def test_shared_id_with_history_skipped(self):
        text = "Plafonner les frais bancaires de succession à hauteur de 850 euros par dossier."
        current = Corpus.build([_amendment("same", text)])
        history = Corpus.build([_amendment("same", text)])
        matches, _ = find_duplicates(current, history=history)
        assert matches == []

    def test_permutation_invariance(self):
        sc = synthetic_corpus(80, seed=2, n_duplicates=15)
        matches_a, clusters_a = find_duplicates(sc.corpus)
        shuffled = list(sc.corpus.amendments)
        random.Random(99).shuffle(shuffled)
        matches_b, clusters_b = find_duplicates(Corpus.build(shuffled))
        assert matches_a == matches_b
        assert clusters_a == clusters_b

    def test_repeat_run_deterministic(self):
        sc = synthetic_corpus(60, seed=4, n_duplicates=10)
        assert find_duplicates(sc.corpus) == find_duplicates(sc.corpus)

    def test_duplicate_rate(self):
        sc = synthetic_corpus(60, seed=4, n_duplicates=10)
        _, clusters = find_duplicates(sc.corpus)
        assert duplicate_rate(clusters, len(sc.corpus)) == pytest.approx(10 / 60)
        assert duplicate_rate([], 0) == 0.0


class TestUnionFind:
    def test_components(self):
        uf = UnionFind()
        uf.union("b", "a")
        uf.union("b", "c")
        uf.union("x", "y")
        assert sorted(uf.components()) == [["a", "b", "c"], ["x", "y"]]

    def test_find_idempotent(self):
        uf = UnionFind()
        assert uf.find("k") == "k"
        uf.union("k", "a")
        assert uf.find("k") == "a"
