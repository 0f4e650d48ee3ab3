"""Tests for the CoNLL-U reader and subtree spans."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gasflow.conllu import Sentence, Token, parse_conllu, serialize, subtree_span
from gasflow.errors import InputError

MINIMAL = "1\ttremor\ttremor\tNOUN\t_\t_\t0\troot\t_\tSense=noun.phenomenon\n"

TWO_SENTENCES = (
    "# headline_id = A\n"
    "1\tGas\tgas\tNOUN\t_\t_\t0\troot\t_\t_\n"
    "\n"
    "# headline_id = B\n"
    "1\tOil\toil\tNOUN\t_\t_\t0\troot\t_\t_\n"
)


def chain_sentence() -> Sentence:
    # 1 <- 2 <- 3: token 1 depends on 2, 3 is head of 2 and the root
    return Sentence(
        tokens=(
            Token(1, "a", "a", "NOUN", "compound", 2),
            Token(2, "b", "b", "NOUN", "nsubj", 3),
            Token(3, "c", "c", "VERB", "root", 0),
        )
    )


class TestParse:
    def test_minimal_block(self):
        sentences = parse_conllu(MINIMAL.splitlines())
        assert len(sentences) == 1
        token = sentences[0].tokens[0]
        assert token.form == "tremor"
        assert token.sense == "noun.phenomenon"
        assert token.head == 0

    def test_two_sentences(self):
        sentences = parse_conllu(TWO_SENTENCES.splitlines())
        assert len(sentences) == 2
        assert sentences[0].headline_id == "A"
        assert sentences[1].headline_id == "B"

    def test_cycle_detected(self):
        block = (
            "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n"
            "2\tb\tb\tNOUN\t_\t_\t3\tdep\t_\t_\n"
            "3\tc\tc\tNOUN\t_\t_\t2\tdep\t_\t_\n"
        )
        with pytest.raises(InputError, match="cyc"):
            parse_conllu(block.splitlines())

    def test_wrong_column_count_reports_line(self):
        block = "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\n"  # 9 columns
        with pytest.raises(InputError, match="line 1"):
            parse_conllu(block.splitlines())

    def test_multiword_and_empty_nodes_skipped(self):
        block = (
            "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
            "1\tdo\tdo\tAUX\t_\t_\t2\taux\t_\t_\n"
            "2\tnot\tnot\tPART\t_\t_\t0\troot\t_\t_\n"
            "2.1\tghost\tghost\tNOUN\t_\t_\t_\t_\t_\t_\n"
        )
        sentences = parse_conllu(block.splitlines())
        assert [t.form for t in sentences[0].tokens] == ["do", "not"]

    def test_two_roots_rejected(self):
        block = (
            "1\ta\ta\tNOUN\t_\t_\t0\troot\t_\t_\n"
            "2\tb\tb\tNOUN\t_\t_\t0\troot\t_\t_\n"
        )
        with pytest.raises(InputError, match="root"):
            parse_conllu(block.splitlines())

    def test_metadata_comments(self, motivating_sentences):
        assert motivating_sentences[0].headline_id == "S1"
        assert motivating_sentences[0].date == "2011-05-31"

    def test_round_trip(self, motivating_sentences, annotated_20):
        for sentences in (motivating_sentences, annotated_20):
            again = parse_conllu(serialize(sentences).splitlines())
            assert [s.tokens for s in again] == [s.tokens for s in sentences]
            assert [s.headline_id for s in again] == [s.headline_id for s in sentences]


class TestSubtreeSpan:
    def test_root_covers_all(self, motivating_sentences):
        s1 = motivating_sentences[0]
        root = next(t.index for t in s1.tokens if t.head == 0)
        assert subtree_span(s1, root) == (1, len(s1))

    def test_leaf_is_itself(self, motivating_sentences):
        s1 = motivating_sentences[0]
        assert subtree_span(s1, 1) == (1, 1)

    def test_chain(self):
        assert subtree_span(chain_sentence(), 2) == (1, 2)

    def test_out_of_range(self):
        with pytest.raises(InputError):
            subtree_span(chain_sentence(), 9)


@st.composite
def random_tree(draw):
    n = draw(st.integers(min_value=1, max_value=10))
    heads = [0]
    for i in range(2, n + 1):
        heads.append(draw(st.integers(min_value=1, max_value=i - 1)))
    order = draw(st.permutations(list(range(1, n + 1))))
    relabel = {old: new for new, old in enumerate(order, start=1)}
    tokens = [None] * n
    for old_index, head in zip(range(1, n + 1), heads):
        new_index = relabel[old_index]
        new_head = relabel[head] if head else 0
        tokens[new_index - 1] = Token(new_index, f"w{new_index}", f"w{new_index}", "NOUN", "dep", new_head)
    return Sentence(tokens=tuple(tokens))


@given(random_tree())
def test_subtree_nested_in_head_subtree(sentence):
    for token in sentence.tokens:
        if token.head == 0:
            continue
        lo, hi = subtree_span(sentence, token.index)
        outer_lo, outer_hi = subtree_span(sentence, token.head)
        assert outer_lo <= lo and hi <= outer_hi


@given(random_tree())
def test_serialize_parse_round_trip(sentence):
    parsed = parse_conllu(serialize([sentence]).splitlines())
    assert len(parsed) == 1
    assert parsed[0].tokens == sentence.tokens
