"""Rule compilation and deterministic bureau routing."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amdkit.attribution import (
    Attribution,
    DuplicateRuleIdError,
    EmptyPatternError,
    InvalidPatternError,
    RulesetError,
    Scope,
    Source,
    attribute,
    batch_attribute,
    compile_ruleset,
    override,
    ruleset_from_keywords,
)
from amdkit.model import Amendment, Corpus, TargetKind, TargetLocation
from amdkit.synth import DEFAULT_BUREAU_KEYWORDS, synthetic_corpus


def _amendment(dispositif, header="", article="Article 1", rationale="Justification donnée."):
    return Amendment(
        id="a-1",
        bill_ref="PLF 2024",
        target=TargetLocation(TargetKind.EXISTING_ARTICLE, article),
        dispositif=dispositif,
        dispositif_header=header,
        rationale=rationale,
    )


def _rules(*rules, min_score=1, default=None):
    return compile_ruleset(
        {"min_score": min_score, "default_bureau": default, "rules": list(rules)}
    )


def _kw_rule(rule_id, bureau, *keywords, weight=1, scope=("dispositif",)):
    return {
        "id": rule_id,
        "bureau": bureau,
        "weight": weight,
        "scope": list(scope),
        "patterns": [{"kind": "keyword", "value": k} for k in keywords],
    }


class TestCompile:
    def test_two_valid_rules(self):
        rs = _rules(_kw_rule("r1", "A", "tva"), _kw_rule("r2", "B", "douane"))
        assert len(rs.rules) == 2
        assert rs.min_score == 1

    def test_duplicate_id(self):
        with pytest.raises(DuplicateRuleIdError):
            _rules(_kw_rule("r1", "A", "tva"), _kw_rule("r1", "B", "douane"))

    def test_empty_pattern(self):
        with pytest.raises(EmptyPatternError):
            _rules(_kw_rule("r1", "A", ""))
        with pytest.raises(EmptyPatternError):
            _rules({"id": "r1", "bureau": "A", "scope": ["dispositif"], "patterns": []})

    def test_invalid_regex(self):
        with pytest.raises(InvalidPatternError):
            _rules(
                {
                    "id": "r1",
                    "bureau": "A",
                    "scope": ["dispositif"],
                    "patterns": [{"kind": "pattern", "value": "(unclosed"}],
                }
            )

    def test_structural_errors(self):
        with pytest.raises(RulesetError):
            _rules({"id": "", "bureau": "A", "patterns": [{"kind": "keyword", "value": "x"}]})
        with pytest.raises(RulesetError):
            _rules({"id": "r", "bureau": "", "patterns": [{"kind": "keyword", "value": "x"}]})
        with pytest.raises(RulesetError):
            _rules(_kw_rule("r", "A", "x", weight=0))
        with pytest.raises(RulesetError):
            compile_ruleset({"min_score": 0, "rules": []})


class TestAttribute:
    def test_keyword_hit_accent_insensitive(self):
        rs = _rules(_kw_rule("r1", "VAT Bureau", "tva"))
        att = attribute(_amendment("Exonérer de TVA les livraisons."), rs)
        assert att.bureau == "VAT Bureau"
        assert att.score == 1
        assert att.matched_rules == ("r1",)
        assert att.source == Source.AUTO

    def test_no_match_no_default(self):
        rs = _rules(_kw_rule("r1", "VAT Bureau", "tva"))
        att = attribute(_amendment("Majorer les droits de douane."), rs)
        assert att.bureau is None
        assert att.score == 0
        assert att.matched_rules == ()

    def test_no_match_with_default(self):
        rs = _rules(_kw_rule("r1", "VAT Bureau", "tva"), default="Tri général")
        att = attribute(_amendment("Majorer les droits de douane."), rs)
        assert att.bureau == "Tri général"

    def test_lexicographic_tie_break(self):
        rs = _rules(
            _kw_rule("r1", "Beta", "impôt", weight=2),
            _kw_rule("r2", "Alpha", "impôt", weight=2),
        )
        att = attribute(_amendment("Réduire l'impôt des ménages."), rs)
        assert att.bureau == "Alpha"
        assert att.score == 2

    def test_word_boundaries(self):
        rs = _rules(_kw_rule("r1", "A", "tva"))
        att = attribute(_amendment("La cotvation n'existe pas."), rs)
        assert att.bureau is None

    def test_min_score_threshold(self):
        rs = _rules(_kw_rule("r1", "A", "tva"), min_score=2)
        att = attribute(_amendment("Exonérer de TVA."), rs)
        assert att.bureau is None
        assert att.score == 1

    def test_weights_accumulate_per_bureau(self):
        rs = _rules(
            _kw_rule("r1", "A", "tva", weight=1),
            _kw_rule("r2", "A", "exonérer", weight=3),
            _kw_rule("r3", "B", "exonérer", weight=2),
        )
        att = attribute(_amendment("Exonérer de TVA les projets."), rs)
        assert att.bureau == "A"
        assert att.score == 4
        assert att.matched_rules == ("r1", "r2")

    def test_scope_isolation_rationale_never_matches(self):
        rs = _rules(_kw_rule("r1", "A", "marqueur"))
        att = attribute(
            _amendment("Texte sans le mot.", rationale="Le marqueur est ici."), rs
        )
        assert att.bureau is None

    def test_header_scope(self):
        rs = _rules(_kw_rule("r1", "A", "insérer", scope=("dispositif_header",)))
        hit = attribute(_amendment("Corps neutre.", header="Insérer après l'article 2"), rs)
        miss = attribute(_amendment("Il faut insérer ce mot.", header="Rien"), rs)
        assert hit.bureau == "A"
        assert miss.bureau is None

    def test_article_label_scope(self):
        rs = _rules(
            {
                "id": "r1",
                "bureau": "A",
                "scope": ["article_label"],
                "patterns": [{"kind": "pattern", "value": r"^article 1\b"}],
            }
        )
        assert attribute(_amendment("Texte.", article="Article 1 bis"), rs).bureau == "A"
        assert attribute(_amendment("Texte.", article="Article 12"), rs).bureau is None

    def test_determinism(self):
        rs = ruleset_from_keywords(DEFAULT_BUREAU_KEYWORDS)
        a = _amendment("Réformer la taxe foncière et la taxe d'habitation.")
        assert attribute(a, rs) == attribute(a, rs)

    @given(st.integers(1, 5))
    @settings(max_examples=20)
    def test_adding_rule_never_decreases_score(self, weight):
        base_rules = [_kw_rule("r1", "B", "impôt")]
        a = _amendment("Réduire l'impôt sur le revenu des ménages.")
        before = attribute(a, _rules(*base_rules))
        extra = base_rules + [_kw_rule("r2", "B", "revenu", weight=weight)]
        after = attribute(a, _rules(*extra))
        assert after.score >= before.score


class TestBatch:
    def test_coverage_counts(self):
        rs = _rules(_kw_rule("r1", "A", "tva"))
        amendments = [
            Amendment(
                id=f"a-{i}",
                bill_ref="PLF 2024",
                target=TargetLocation(TargetKind.EXISTING_ARTICLE, "Article 1"),
                dispositif="Exonérer de TVA." if i < 9 else "Rien à voir.",
                rationale="Motif.",
            )
            for i in range(10)
        ]
        atts, coverage = batch_attribute(Corpus.build(amendments), rs)
        assert len(atts) == 10
        assert [a.amendment_id for a in atts] == [f"a-{i}" for i in range(10)]
        assert coverage == pytest.approx(0.9)

    def test_empty_corpus(self):
        rs = _rules(_kw_rule("r1", "A", "tva"))
        atts, coverage = batch_attribute(Corpus.build([]), rs)
        assert atts == []
        assert coverage == 1.0

    def test_planted_corpus_coverage(self):
        sc = synthetic_corpus(
            400, seed=8, bureau_keywords=DEFAULT_BUREAU_KEYWORDS, keyword_rate=0.94
        )
        rs = ruleset_from_keywords(DEFAULT_BUREAU_KEYWORDS)
        atts, coverage = batch_attribute(sc.corpus, rs)
        assert coverage >= 0.94
        for att in atts:
            expected = sc.expected_bureau[att.amendment_id]
            if expected is not None:
                assert att.bureau == expected


class TestOverride:
    def test_override_keeps_audit(self):
        rs = _rules(_kw_rule("r1", "A", "tva"))
        auto = attribute(_amendment("Exonérer de TVA."), rs)
        human = override(auto, "B")
        assert human.bureau == "B"
        assert human.source == Source.HUMAN_OVERRIDE
        assert human.previous == auto
        assert auto.source == Source.AUTO  # original untouched

    def test_double_override_keeps_original_auto(self):
        auto = Attribution("a-1", None, 0)
        first = override(auto, "A")
        second = override(first, "B")
        assert second.bureau == "B"
        assert second.previous == auto
