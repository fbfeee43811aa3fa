import pytest

from corpus import RelationCorpus, index_value
from engine.errors import ConfigError
from engine.presentations import GeneratorSymbol, WordCombination, match_paper_explicit
from engine.ring import LaurentPoly
from expression import parse

RELATIONS = ["rel1", "rel2", "rel3", "rel4", "rel5"]


@pytest.fixture
def corpus(relations_dir):
    return RelationCorpus(str(relations_dir)).load()


def test_index_value():
    assert index_value(parse("m+s*a"), {"m": 2, "s": -1, "a": 3}) == -1
    assert index_value(parse("-n-1"), {"n": 4}) == -5
    with pytest.raises(KeyError):
        index_value(parse("k"), {})


def test_corpus_has_every_relation(corpus):
    assert set(corpus.entries) == {(level, r) for level in ("rational", "trig") for r in RELATIONS}
    rows = corpus.rows()
    assert {row["level"] for row in rows} == {"rational", "trig"}
    assert all(row["statement"] for row in rows)


def test_stated_rational_rel5(corpus):
    t1, t2 = LaurentPoly.symbol("t1"), LaurentPoly.symbol("t2")
    stated = corpus.stated("rational", "rel5")((2, 3))
    f2, e3, h5 = GeneratorSymbol("f", 2), GeneratorSymbol("e", 3), GeneratorSymbol("h", 5)
    commutator = WordCombination.word((f2, e3)) - WordCombination.word((e3, f2))
    assert (stated - commutator).words() == [(h5,)]
    coeff = stated.coefficient((h5,))
    assert coeff * (t1 + t2) == t1 * t2


def test_trig_rel5_cases(corpus):
    stated = corpus.stated("trig", "rel5")
    hp, hm = "hPlus", "hMinus"
    assert [w for w in stated((2, 1)).words() if len(w) == 1] == [(GeneratorSymbol(hp, 3),)]
    assert [w for w in stated((-2, -1)).words() if len(w) == 1] == [(GeneratorSymbol(hm, 3),)]
    assert {w for w in stated((1, -1)).words() if len(w) == 1} == {
        (GeneratorSymbol(hm, 0),),
        (GeneratorSymbol(hp, 0),),
    }


@pytest.mark.parametrize("level", ["rational", "trig"])
@pytest.mark.parametrize("relation", RELATIONS)
def test_stated_forms_match_extracted_identities(corpus, level, relation):
    result = match_paper_explicit(level, relation, corpus.stated(level, relation), window=4)
    assert result.status == "PASS", result.first_mismatch
    assert result.checked > 0


def test_trig_rel1_matches_up_to_a_unit(corpus):
    result = match_paper_explicit("trig", "rel1", corpus.stated("trig", "rel1"), window=3)
    assert result.status == "PASS"
    assert result.unit != "1"


def test_perturbed_schema_fails(corpus):
    result = match_paper_explicit("rational", "rel1", corpus.stated("rational", "rel1"), window=4, perturbed=True)
    assert result.status == "FAIL"
    assert result.first_mismatch["label"]


@pytest.mark.parametrize("level, relation", [("rational", "rel1"), ("rational", "rel5"), ("trig", "rel1"), ("trig", "rel3")])
def test_identities_share_one_unit(corpus, level, relation):
    base = corpus.stated(level, relation)

    def flipped(label):
        # negate the identities with an odd first index only
        form = base(label)
        return form.map(lambda c: -c) if label[-2] % 2 else form

    result = match_paper_explicit(level, relation, flipped, window=4)
    assert result.status == "FAIL"
    assert result.first_mismatch["unit"]


def test_missing_directory():
    with pytest.raises(ConfigError):
        RelationCorpus("no/such/dir").load()


def test_malformed_file_names_the_file(tmp_path):
    (tmp_path / "broken.yaml").write_text("level: rational\nrelations:\n  rel9: {terms: []}\n")
    with pytest.raises(ConfigError, match="broken.yaml"):
        RelationCorpus(str(tmp_path)).load()


def test_bad_letter_names_the_file(tmp_path):
    (tmp_path / "letters.yaml").write_text(
        "level: rational\nrelations:\n  rel5:\n    terms:\n      - {word: ['g[n]']}\n"
    )
    with pytest.raises(ConfigError, match="letters.yaml"):
        RelationCorpus(str(tmp_path)).load()


def test_invalid_yaml(tmp_path):
    (tmp_path / "bad.yaml").write_text("level: [rational\n")
    with pytest.raises(ConfigError):
        RelationCorpus(str(tmp_path)).load()


def test_unknown_level_entry(corpus):
    with pytest.raises(ConfigError):
        corpus.get("elliptic", "rel1")
