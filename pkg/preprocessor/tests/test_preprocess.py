"""Preprocessor tests, including the round-trip through the primary parser."""

import json
from pathlib import Path

import pytest

from gasflow.conllu import parse_conllu  # primary package: round-trip verification
from gasflow_preprocessor.pipeline import assign_heads, preprocess, sentence_block
from gasflow_preprocessor.tagger import tag, tokenize

FIXTURES = Path(__file__).parent / "fixtures"
SENTENCE_1 = "Cuadrilla pauses mining operations after tremor in Lancashire site."


@pytest.fixture(scope="module")
def hundred():
    lines = (FIXTURES / "headlines_100.jsonl").read_text().splitlines()
    conllu, manifest = preprocess(lines)
    return lines, conllu, manifest


class TestTokenizer:
    def test_basic_words_and_punctuation(self):
        assert tokenize("Energy vs environment?") == ["Energy", "vs", "environment", "?"]

    def test_possessive_clitic_split(self):
        assert tokenize("Qatar's Liquid Gold") == ["Qatar", "'s", "Liquid", "Gold"]

    def test_sentence_1(self):
        tokens = tokenize(SENTENCE_1)
        assert tokens[:2] == ["Cuadrilla", "pauses"]
        assert tokens[-1] == "."


class TestTagger:
    def test_sentence_1_after_is_adp(self):
        tagged = tag(tokenize(SENTENCE_1))
        by_form = {t.form: t.upos for t in tagged}
        assert by_form["after"] == "ADP"
        assert by_form["in"] == "ADP"
        assert by_form["."] == "PUNCT"

    def test_inflected_verb_recognized(self):
        tagged = tag(tokenize("Gas prices tumble as exports surge"))
        forms = {t.form: t.upos for t in tagged}
        assert forms["tumble"] == "VERB"
        assert forms["surge"] == "VERB"

    def test_verb_after_determiner_reads_as_noun(self):
        tagged = tag(tokenize("A surge in demand"))
        assert tagged[1].upos == "NOUN"

    def test_lemmas(self):
        tagged = tag(tokenize("Regulators approve acquisitions"))
        lemmas = [t.lemma for t in tagged]
        assert lemmas == ["regulator", "approve", "acquisition"]


class TestHeads:
    def tree_ok(self, tags):
        heads = assign_heads(tags)
        n = len(heads)
        assert sum(1 for h, _ in heads if h == 0) == 1
        for start in range(n):
            seen = set()
            node = start
            while node != -1:
                assert node not in seen
                seen.add(node)
                head = heads[node][0]
                assert 0 <= head <= n
                node = head - 1 if head else -1
        return heads

    @pytest.mark.parametrize(
        "text",
        [
            SENTENCE_1,
            "With natural gas plentiful and cheap, carbon capture projects stumble.",
            "Energy vs environment?",
            "Qatar's Liquid Gold",
            "Report on China's Coal Power Projects",
            "For Cajuns, What Now?",
            "A Map of the Oil World",
        ],
    )
    def test_always_a_single_rooted_tree(self, text):
        self.tree_ok(tag(tokenize(text)))

    def test_preposition_governs_its_noun(self):
        tags = tag(tokenize("Shell on a roll"))
        heads = self.tree_ok(tags)
        on = next(i for i, t in enumerate(tags) if t.form == "on")
        roll = next(i for i, t in enumerate(tags) if t.form == "roll")
        assert heads[roll] == (on + 1, "pobj")


class TestRoundTrip:
    def test_primary_parser_reads_output_with_zero_errors(self, hundred):
        _, conllu, manifest = hundred
        sentences = parse_conllu(conllu.splitlines())
        assert len(sentences) == manifest.sentences

    def test_counts_reconcile(self, hundred):
        lines, conllu, manifest = hundred
        assert manifest.records_in == 100
        assert manifest.records_in == manifest.records_out + len(manifest.failures)
        sentences = parse_conllu(conllu.splitlines())
        assert sum(len(s.tokens) for s in sentences) == manifest.tokens

    def test_headline_ids_biject_with_surviving_records(self, hundred):
        lines, conllu, manifest = hundred
        sentences = parse_conllu(conllu.splitlines())
        ids = [s.headline_id for s in sentences]
        assert len(ids) == len(set(ids)) == manifest.records_out
        failed_lines = {line for line, _ in manifest.failures}
        expected = [
            f"h{lineno:04d}"
            for lineno, line in enumerate(lines, start=1)
            if line.strip() and lineno not in failed_lines
        ]
        assert ids == expected

    def test_dates_preserved(self, hundred):
        lines, conllu, _ = hundred
        sentences = parse_conllu(conllu.splitlines())
        first = json.loads(lines[0])
        assert sentences[0].date == first["date"]

    def test_sentence_1_block_parses_and_tags_after_adp(self):
        from datetime import date

        block, n_tokens = sentence_block("h0001", date(2011, 5, 31), SENTENCE_1)
        sentences = parse_conllu(block.splitlines())
        assert len(sentences) == 1
        token = next(t for t in sentences[0].tokens if t.form == "after")
        assert token.upos == "ADP"
        assert n_tokens == len(sentences[0].tokens)


class TestEdgeCases:
    def test_empty_input(self):
        conllu, manifest = preprocess([])
        assert conllu == ""
        assert manifest.records_in == 0
        assert manifest.records_out == 0
        assert manifest.failures == []

    def test_bad_records_listed_not_fatal(self):
        lines = [
            json.dumps({"date": "2018-01-01", "source": "TG", "title": "Gas prices rise"}),
            "{broken",
            json.dumps({"date": "2018-13-01", "source": "TG", "title": "bad date"}),
            json.dumps({"date": "2018-01-02", "source": "TG", "title": "   "}),
        ]
        conllu, manifest = preprocess(lines)
        assert manifest.records_in == 4
        assert manifest.records_out == 1
        assert [line for line, _ in manifest.failures] == [2, 3, 4]
        assert parse_conllu(conllu.splitlines())

    def test_output_order_matches_input_order(self):
        lines = [
            json.dumps({"date": "2018-01-01", "source": "TG", "title": "Exports surge"}),
            json.dumps({"date": "2018-01-02", "source": "FT", "title": "Prices fall"}),
        ]
        conllu, _ = preprocess(lines)
        sentences = parse_conllu(conllu.splitlines())
        assert [s.headline_id for s in sentences] == ["h0001", "h0002"]

    def test_manifest_json_shape(self):
        _, manifest = preprocess([])
        data = json.loads(manifest.to_json())
        assert data["tool"] == "gasflow-preprocess"
        assert "tagger" in data and "version" in data
