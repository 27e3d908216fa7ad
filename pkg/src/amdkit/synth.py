"""Synthetic amendment corpora for tests and benchmarks.

The generators double as oracles: they return what they planted (which
bureau keyword went into which dispositif, which pairs are near-duplicates),
so recovery tests compare against ground truth rather than re-deriving it.
Everything is driven by a seeded ``random.Random`` and fully deterministic.

Base texts are drawn from structurally distinct sentence builders so that
two independent draws almost never land within the duplicate threshold of
each other; ``ensure_distinct_bases`` additionally sweeps the base corpus
with the production matcher and redraws any offender, making "unplanted
pairs never match" a construction guarantee rather than a hope.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .model import Amendment, Chamber, Corpus, Position, TargetKind, TargetLocation
from .similarity import Metric, fast_score, find_duplicates
from .textnorm import match_key

_CODES = [
    "du code général des impôts",
    "du code des douanes",
    "du livre des procédures fiscales",
    "du code monétaire et financier",
    "du code de la construction et de l'habitation",
    "du code de l'environnement",
    "du code rural et de la pêche maritime",
    "du code de l'énergie",
]

_ACTIONS = [
    "est complété par un alinéa ainsi rédigé",
    "est ainsi modifié",
    "est remplacé par les dispositions suivantes",
    "fait l'objet d'une expérimentation",
    "est rétabli dans sa rédaction antérieure",
    "est complété par une phrase ainsi rédigée",
]

_OBJECTS = [
    "le dispositif d'aide exceptionnelle aux collectivités",
    "la dotation globale de fonctionnement",
    "le fonds de solidarité pour le logement",
    "les obligations déclaratives des organismes de gestion",
    "la procédure de rescrit applicable aux associations",
    "le régime des bons de souscription de parts",
    "la redevance pour service rendu des ports maritimes",
    "le plafonnement des frais bancaires de succession",
    "les modalités de versement des avances remboursables",
    "la durée d'amortissement des immobilisations incorporelles",
    "le mécanisme de garantie des prêts participatifs",
    "la majoration applicable aux résidences secondaires vacantes",
    "le barème des indemnités kilométriques",
    "la franchise applicable aux petits organismes",
    "le suramortissement des équipements de production",
]

_CLAUSES = [
    "pour les entreprises de moins de {n} salariés",
    "dans la limite de {amount} euros par bénéficiaire",
    "à compter du 1er janvier {year}",
    "pour une durée de {n} ans renouvelable une fois",
    "sous réserve d'un agrément préalable délivré par l'autorité compétente",
    "selon des modalités fixées par décret en Conseil d'État",
    "dans les zones de revitalisation rurale",
    "au prorata de la durée effective d'exploitation",
]

_GROUPS = [
    "exploitants agricoles", "bailleurs sociaux", "entreprises de presse",
    "organismes de foncier solidaire", "collectivités d'outre-mer",
    "jeunes entreprises innovantes", "groupements d'employeurs",
    "associations reconnues d'utilité publique",
]

_ENUM_WORDS = [
    "coopératives", "mutuelles", "fondations", "syndicats mixtes",
    "établissements publics", "sociétés d'économie mixte", "régies",
    "groupements d'intérêt public", "chambres consulaires", "offices",
    "agences", "opérateurs", "concessionnaires", "délégataires",
    "exploitants", "affréteurs", "armateurs", "transporteurs",
    "producteurs", "distributeurs", "importateurs", "négociants",
    "courtiers", "mandataires",
]

_COMPENSATIONS = [
    "la création d'une taxe additionnelle aux droits mentionnés aux articles {a1} et {a2}",
    "la majoration à due concurrence de la dotation mentionnée à l'article L. {a1}-{a2}",
    "un relèvement du tarif mentionné au b du 1 de l'article {a1}",
    "une réduction à due concurrence du plafond prévu à l'article {a1} bis",
]

_DETAILS = [
    "les justificatifs exigés des demandeurs",
    "le calendrier de dépôt des déclarations",
    "les conditions de reversement en cas de manquement",
    "la liste des pièces constitutives du dossier",
    "les seuils d'éligibilité applicables",
    "la périodicité des contrôles sur place",
    "le contenu du rapport remis au Parlement",
    "les obligations d'information des bénéficiaires",
]

_RATIONALE_TEMPLATES = [
    "Cet amendement vise à corriger une inégalité de traitement constatée {clause}.",
    "Le présent amendement tend à simplifier les démarches des redevables {clause}.",
    "Il s'agit de sécuriser juridiquement un dispositif fragilisé par la jurisprudence récente.",
    "Cet amendement de précision lève une ambiguïté rédactionnelle signalée par les praticiens.",
    "La mesure proposée représente un coût maîtrisé de {amount} euros en régime de croisière.",
]

# keyword pools used by the attribution benchmark; phrases deliberately
# absent from every other pool so unplanted texts match no rule
DEFAULT_BUREAU_KEYWORDS: dict[str, list[str]] = {
    "Bureau TVA": ["taxe sur la valeur ajoutée", "TVA"],
    "Bureau Revenu": ["impôt sur le revenu", "prélèvement à la source"],
    "Bureau Sociétés": ["impôt sur les sociétés", "intégration fiscale"],
    "Bureau Patrimoine": ["droits de mutation", "impôt sur la fortune immobilière"],
    "Bureau Locaux": ["taxe foncière", "taxe d'habitation"],
    "Bureau Douanes": ["droits d'accise", "tarif douanier"],
}

_FILLERS = [
    "notamment", "désormais", "toutefois", "exceptionnellement",
    "progressivement", "temporairement", "spécifiquement", "corrélativement",
]


def _article_ref(rng: random.Random) -> str:
    return f"{rng.randrange(1, 999)} {rng.choice(['bis', 'ter', 'quater', 'A', 'B', ''])}".strip()


def _clause(rng: random.Random) -> str:
    return rng.choice(_CLAUSES).format(
        n=rng.randrange(2, 500),
        amount=rng.randrange(500, 95000),
        year=rng.randrange(2024, 2036),
    )


def _s_modify(rng: random.Random) -> str:
    return (
        f"L'article {_article_ref(rng)} {rng.choice(_CODES)} "
        f"{rng.choice(_ACTIONS)} : {rng.choice(_OBJECTS)} {_clause(rng)}."
    )


def _s_replace_amount(rng: random.Random) -> str:
    return (
        f"Au {rng.choice(['premier', 'deuxième', 'troisième', 'dernier'])} alinéa de "
        f"l'article {_article_ref(rng)} {rng.choice(_CODES)}, le montant de "
        f"{rng.randrange(500, 95000)} euros est remplacé par le montant de "
        f"{rng.randrange(500, 95000)} euros."
    )


def _s_enumerate(rng: random.Random) -> str:
    words = rng.sample(_ENUM_WORDS, 4)
    return (
        f"Sont concernés par la présente mesure : les {words[0]}, les {words[1]}, "
        f"les {words[2]} et les {words[3]}."
    )


def _s_institute(rng: random.Random) -> str:
    return (
        f"Il est institué {rng.choice(_OBJECTS)} au profit des "
        f"{rng.choice(_GROUPS)} {_clause(rng)}."
    )


def _s_compensate(rng: random.Random) -> str:
    formula = rng.choice(_COMPENSATIONS).format(
        a1=rng.randrange(100, 999), a2=rng.randrange(100, 999)
    )
    return (
        "La perte de recettes résultant du présent article est compensée à due "
        f"concurrence par {formula}."
    )


def _s_decree(rng: random.Random) -> str:
    a, b = rng.sample(_DETAILS, 2)
    return (
        "Un décret en Conseil d'État précise les modalités d'application du présent "
        f"article, notamment {a} et {b}, au plus tard le "
        f"{rng.randrange(1, 29)} {rng.choice(['janvier', 'mars', 'juin', 'septembre', 'décembre'])} "
        f"{rng.randrange(2024, 2036)}."
    )


def _s_abolish(rng: random.Random) -> str:
    obj = rng.choice(_OBJECTS)
    return f"{obj[0].upper()}{obj[1:]} est supprimé à compter du 1er janvier {rng.randrange(2024, 2036)}."


def _s_extend(rng: random.Random) -> str:
    obj = rng.choice(_OBJECTS)
    return f"{obj[0].upper()}{obj[1:]} est étendu aux {rng.choice(_GROUPS)} {_clause(rng)}."


_SENTENCE_BUILDERS = [
    _s_modify, _s_replace_amount, _s_enumerate, _s_institute,
    _s_compensate, _s_decree, _s_abolish, _s_extend,
]


def _dispositif(rng: random.Random, keyword: str | None = None) -> str:
    sentences = []
    if keyword is not None:
        sentences.append(f"Le présent article aménage le régime de {keyword} {_clause(rng)}.")
        extra = rng.randrange(1, 3)
    else:
        extra = rng.randrange(2, 4)
    for builder in rng.sample(_SENTENCE_BUILDERS, extra):
        sentences.append(builder(rng))
    return " ".join(sentences)


def _rationale(rng: random.Random) -> str:
    return rng.choice(_RATIONALE_TEMPLATES).format(
        clause=_clause(rng), amount=rng.randrange(500, 95000)
    )


def _target(rng: random.Random) -> TargetLocation:
    label = f"Article {rng.randrange(1, 60)}"
    if rng.random() < 0.25:
        return TargetLocation(
            kind=TargetKind.ADDITIONAL_ARTICLE,
            article_label=label,
            position=rng.choice((Position.BEFORE, Position.AFTER)),
        )
    return TargetLocation(kind=TargetKind.EXISTING_ARTICLE, article_label=label)


def random_amendment(
    rng: random.Random, ident: str, bill_ref: str = "PLF 2024", keyword: str | None = None
) -> Amendment:
    dispositif = _dispositif(rng, keyword)
    first_sentence = dispositif.split(". ")[0]
    return Amendment(
        id=ident,
        bill_ref=bill_ref,
        target=_target(rng),
        dispositif=dispositif,
        dispositif_header=first_sentence,
        rationale=_rationale(rng),
        authors=(f"M. {rng.choice('ABCDEFGH')}. Dupont",),
        chamber=rng.choice((Chamber.SENATE, Chamber.NATIONAL_ASSEMBLY)),
    )


def token_edit(rng: random.Random, text: str, ops: int) -> str:
    """Apply ``ops`` whitespace-token edits, never touching the first token
    (keeps the prefix stable, as real resubmitted amendments do)."""
    tokens = text.split(" ")
    for _ in range(ops):
        op = rng.choice(("replace", "delete", "insert"))
        pos = rng.randrange(1, len(tokens))
        if op == "replace":
            tokens[pos] = rng.choice(_FILLERS)
        elif op == "delete" and len(tokens) > 4:
            del tokens[pos]
        else:
            tokens.insert(pos, rng.choice(_FILLERS))
    return " ".join(tokens)


@dataclass(frozen=True)
class SyntheticCorpus:
    corpus: Corpus
    expected_bureau: dict[str, str | None]
    planted_pairs: list[tuple[str, str]]


def synthetic_corpus(
    n: int,
    seed: int,
    bureau_keywords: dict[str, list[str]] | None = None,
    keyword_rate: float = 0.0,
    n_duplicates: int = 0,
    dup_threshold: float = 0.95,
    dup_metric: Metric = Metric.JARO_WINKLER,
    max_token_edits: int = 2,
    ensure_distinct_bases: bool = True,
) -> SyntheticCorpus:
    """Corpus of ``n`` amendments: ``n - n_duplicates`` fresh base texts (a
    fixed ``keyword_rate`` share carrying one bureau keyword each) plus
    ``n_duplicates`` near-copies of distinct bases, each within
    ``max_token_edits`` token edits and verified to clear ``dup_threshold``
    under ``dup_metric`` on the normalized dispositif.

    With ``ensure_distinct_bases`` the base corpus is swept with the matcher
    and any base pair scoring within 0.02 of the threshold is redrawn, so the
    planted pairs are the only matches by construction."""
    if n_duplicates > n // 2:
        raise ValueError("n_duplicates must leave at least as many base texts")
    rng = random.Random(seed)
    n_base = n - n_duplicates

    planted_kw_count = round(keyword_rate * n_base)
    kw_slots = list(range(n_base))
    rng.shuffle(kw_slots)
    kw_slots_set = set(kw_slots[:planted_kw_count])
    bureaus = sorted(bureau_keywords) if bureau_keywords else []

    bases: list[Amendment] = []
    expected: dict[str, str | None] = {}
    keyword_of: dict[str, str | None] = {}
    for i in range(n_base):
        ident = f"amd-{i:05d}"
        if i in kw_slots_set and bureaus:
            bureau = rng.choice(bureaus)
            keyword = rng.choice(bureau_keywords[bureau])
            bases.append(random_amendment(rng, ident, keyword=keyword))
            expected[ident] = bureau
            keyword_of[ident] = keyword
        else:
            bases.append(random_amendment(rng, ident))
            expected[ident] = None
            keyword_of[ident] = None

    if ensure_distinct_bases and n_base >= 2:
        margin = max(dup_threshold - 0.02, 0.5)
        by_pos = {a.id: p for p, a in enumerate(bases)}
        for _ in range(6):
            matches, _ = find_duplicates(
                Corpus.build(bases), threshold=margin, metric=dup_metric
            )
            if not matches:
                break
            for ident in sorted({m.id_b for m in matches}):
                pos = by_pos[ident]
                bases[pos] = random_amendment(rng, ident, keyword=keyword_of[ident])

    dupes: list[Amendment] = []
    planted: list[tuple[str, str]] = []
    for k in range(n_duplicates):
        base = bases[k]
        base_key = match_key(base.dispositif)
        edited = base.dispositif
        for _ in range(40):
            attempt = token_edit(rng, base.dispositif, ops=rng.randrange(1, max_token_edits + 1))
            if fast_score(match_key(attempt), base_key, dup_metric) >= dup_threshold + 0.002:
                edited = attempt
                break
        dupe = replace(base, id=f"dup-{k:05d}", dispositif=edited)
        dupes.append(dupe)
        planted.append((base.id, dupe.id))

    amendments = bases + dupes
    rng.shuffle(amendments)
    return SyntheticCorpus(
        corpus=Corpus.build(amendments),
        expected_bureau=expected,
        planted_pairs=sorted(planted),
    )
