"""Secondary acceptance: the preprocessor's round-trip with the primary parser.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

from pathlib import Path

from gasflow.conllu import parse_conllu
from gasflow.events import ExtractionMode, extract_events
from gasflow.wordnet import SenseIndex
from gasflow_preprocessor.pipeline import preprocess

FIXTURES = Path(__file__).parent / "fixtures"


def test_preprocessor_round_trip():
    lines = (FIXTURES / "headlines_100.jsonl").read_text().splitlines()
    conllu, manifest = preprocess(lines)

    # the primary parser reads the output with zero errors
    sentences = parse_conllu(conllu.splitlines())

    # counts reconcile with the manifest
    assert manifest.records_in == 100
    assert manifest.records_in == manifest.records_out + len(manifest.failures)
    assert len(sentences) == manifest.sentences
    assert sum(len(s.tokens) for s in sentences) == manifest.tokens

    # headline ids biject with surviving input records
    ids = [s.headline_id for s in sentences]
    assert len(set(ids)) == manifest.records_out

    # the motivating sentence tags "after" as an adposition
    s1 = next(s for s in sentences if "Cuadrilla" in s.text())
    after = next(t for t in s1.tokens if t.form == "after")
    assert after.upos == "ADP"

    # and the annotated output drives the primary extraction pipeline
    events = [
        e
        for s in sentences
        for e in extract_events(s, ExtractionMode.FULL_PIPELINE, SenseIndex(entries={}))
    ]
    assert isinstance(events, list)
    print(
        f"\n[acceptance] preprocessor round-trip: PASS "
        f"({manifest.records_out} records, {manifest.tokens} tokens, 0 parse errors)"
    )
