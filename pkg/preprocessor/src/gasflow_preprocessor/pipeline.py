"""Headline records in, CoNLL-U out, with a reconciling manifest.

Dependency heads come from deterministic headline heuristics in the legacy
prepositional style (the preposition governs its noun phrase), which keeps
prepositional phrases as proper subtrees. Every sentence is checked to be a
single-rooted acyclic tree before it is emitted; a sentence that somehow
violates that falls back to a flat tree so the output always parses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date as Date

from . import __version__
from .tagger import TAGGER_NAME, TAGGER_VERSION, TaggedToken, tag, tokenize


@dataclass
class PreprocessManifest:
    tool: str = "gasflow-preprocess"
    version: str = __version__
    tagger: str = f"{TAGGER_NAME}/{TAGGER_VERSION}"
    sense_annotation: str = "none"
    records_in: int = 0
    records_out: int = 0
    sentences: int = 0
    tokens: int = 0
    failures: list = field(default_factory=list)  # [line, reason]

    def to_json(self) -> str:
        return json.dumps(
            {
                "tool": self.tool,
                "version": self.version,
                "tagger": self.tagger,
                "sense_annotation": self.sense_annotation,
                "records_in": self.records_in,
                "records_out": self.records_out,
                "sentences": self.sentences,
                "tokens": self.tokens,
                "failures": self.failures,
            },
            sort_keys=True,
            indent=2,
        ) + "\n"


def _noun_run_last(tags: list[TaggedToken], start: int) -> int:
    """Index (0-based) of the last token in the nominal run containing start."""
    end = start
    while end + 1 < len(tags) and tags[end + 1].upos in ("NOUN", "PROPN"):
        end += 1
    return end


def _next_chain_head(tags, position):
    for j in range(position + 1, len(tags)):
        if tags[j].upos in ("NOUN", "PROPN", "PRON"):
            return _noun_run_last(tags, j)
    return None


def _previous_of(tags, position, wanted):
    for j in range(position - 1, -1, -1):
        if tags[j].upos in wanted:
            return j
    return None


def _next_of(tags, position, wanted):
    for j in range(position + 1, len(tags)):
        if tags[j].upos in wanted:
            return j
    return None


def assign_heads(tags: list[TaggedToken]) -> list[tuple[int, str]]:
    """(head, deprel) per token, 1-based heads, 0 for the root."""
    n = len(tags)
    root = _next_of(tags, -1, ("VERB",))
    if root is None:
        first_nominal = _next_of(tags, -1, ("NOUN", "PROPN", "PRON"))
        root = _noun_run_last(tags, first_nominal) if first_nominal is not None else 0
    out: list[tuple[int, str]] = [(0, "root")] * n
    run_last_cache: dict[int, int] = {}
    for i in range(n):
        if tags[i].upos in ("NOUN", "PROPN"):
            run_last_cache[i] = _noun_run_last(tags, i) if (i == 0 or tags[i - 1].upos not in ("NOUN", "PROPN")) else run_last_cache[i - 1]

    for i, token in enumerate(tags):
        if i == root:
            out[i] = (0, "root")
            continue
        upos = token.upos
        if upos == "PUNCT":
            out[i] = (root + 1, "punct")
        elif upos in ("NOUN", "PROPN", "PRON"):
            last = run_last_cache.get(i, i)
            if i != last:
                out[i] = (last + 1, "compound")
                continue
            # chain head: possessive, prepositional object, argument, or loose
            if i + 1 < n and tags[i + 1].upos == "PART":
                possessed = _next_chain_head(tags, i + 1)
                if possessed is not None and possessed != i:
                    out[i] = (possessed + 1, "poss")
                    continue
            j = i if i == run_last_cache.get(i, i) else i
            start = i
            while start > 0 and tags[start - 1].upos in ("NOUN", "PROPN"):
                start -= 1
            scan = start - 1
            while scan >= 0 and tags[scan].upos in ("DET", "ADJ", "NUM", "ADV"):
                scan -= 1
            if scan >= 0 and tags[scan].upos == "PART":
                scan -= 1  # skip the clitic
                while scan >= 0 and tags[scan].upos in ("NOUN", "PROPN"):
                    scan -= 1  # and its possessor run
                while scan >= 0 and tags[scan].upos in ("DET", "ADJ", "NUM"):
                    scan -= 1
            if scan >= 0 and tags[scan].upos == "ADP":
                out[i] = (scan + 1, "pobj")
            elif tags[root].upos == "VERB":
                out[i] = (root + 1, "nsubj" if i < root else "dobj")
            else:
                out[i] = (root + 1, "nmod")
        elif upos == "ADJ":
            target = _next_chain_head(tags, i)
            out[i] = (target + 1, "amod") if target is not None else (root + 1, "dep")
        elif upos == "DET":
            target = _next_chain_head(tags, i)
            out[i] = (target + 1, "det") if target is not None else (root + 1, "dep")
        elif upos == "NUM":
            target = _next_chain_head(tags, i)
            out[i] = (target + 1, "nummod") if target is not None else (root + 1, "dep")
        elif upos == "ADP":
            # nearest previous verb or noun-phrase head wins the attachment
            verb = _previous_of(tags, i, ("VERB",))
            nominal = _previous_of(tags, i, ("NOUN", "PROPN", "PRON"))
            if nominal is not None:
                nominal = run_last_cache.get(nominal, nominal)
            candidates = [c for c in (verb, nominal) if c is not None and c != i]
            anchor = max(candidates) if candidates else None
            out[i] = (anchor + 1, "prep") if anchor is not None else (root + 1, "prep")
        elif upos == "ADV":
            anchor = _previous_of(tags, i, ("VERB",)) or _next_of(tags, i, ("VERB",))
            out[i] = (anchor + 1, "advmod") if anchor is not None else (root + 1, "advmod")
        elif upos == "AUX":
            anchor = _next_of(tags, i, ("VERB",))
            out[i] = (anchor + 1, "aux") if anchor is not None else (root + 1, "aux")
        elif upos == "PART":
            anchor = _previous_of(tags, i, ("NOUN", "PROPN", "PRON"))
            out[i] = (anchor + 1, "case") if anchor is not None else (root + 1, "dep")
        elif upos == "SCONJ":
            anchor = _next_of(tags, i, ("VERB",))
            out[i] = (anchor + 1, "mark") if anchor is not None else (root + 1, "mark")
        elif upos == "CCONJ":
            anchor = _next_of(tags, i, ("NOUN", "PROPN", "ADJ", "VERB", "NUM"))
            out[i] = (anchor + 1, "cc") if anchor is not None else (root + 1, "cc")
        else:
            out[i] = (root + 1, "dep")
    if not _is_tree(out):
        out = [(0, "root") if i == root else (root + 1, "dep") for i in range(n)]
    return out


def _is_tree(heads: list[tuple[int, str]]) -> bool:
    n = len(heads)
    roots = [i for i, (h, _) in enumerate(heads) if h == 0]
    if len(roots) != 1:
        return False
    for start in range(n):
        seen = set()
        node = start
        while node != -1:
            if node in seen:
                return False
            seen.add(node)
            head = heads[node][0]
            node = head - 1 if head else -1
    return True


def parse_headline_line(line: str) -> tuple[Date, str, str] | str:
    """(date, source, title) for a good record, or a failure reason."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        return f"invalid JSON: {exc.msg}"
    if not isinstance(obj, dict):
        return "record is not an object"
    title = str(obj.get("title", "") or "").strip()
    if not title:
        return "empty title"
    try:
        day = Date.fromisoformat(str(obj.get("date", "")))
    except ValueError:
        return f"bad date {obj.get('date')!r}"
    return day, str(obj.get("source", "") or "unknown"), title


def sentence_block(headline_id: str, day: Date, title: str) -> tuple[str, int] | None:
    """One CoNLL-U block for a headline, or None when it yields no tokens."""
    tokens = tokenize(title)
    if not tokens:
        return None
    tags = tag(tokens)
    heads = assign_heads(tags)
    lines = [
        f"# headline_id = {headline_id}",
        f"# date = {day.isoformat()}",
        f"# text = {' '.join(tokens)}",
    ]
    for index, (token, (head, deprel)) in enumerate(zip(tags, heads), start=1):
        lines.append(
            "\t".join(
                [str(index), token.form, token.lemma, token.upos, "_", "_", str(head), deprel, "_", "_"]
            )
        )
    return "\n".join(lines), len(tokens)


def preprocess(lines) -> tuple[str, PreprocessManifest]:
    """Convert line-delimited headline records into CoNLL-U plus a manifest."""
    manifest = PreprocessManifest()
    blocks: list[str] = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        manifest.records_in += 1
        parsed = parse_headline_line(line)
        if isinstance(parsed, str):
            manifest.failures.append([lineno, parsed])
            continue
        day, _source, title = parsed
        block = sentence_block(f"h{lineno:04d}", day, title)
        if block is None:
            manifest.failures.append([lineno, "no tokens in title"])
            continue
        text, n_tokens = block
        blocks.append(text)
        manifest.records_out += 1
        manifest.sentences += 1
        manifest.tokens += n_tokens
    conllu = "\n\n".join(blocks) + ("\n" if blocks else "")
    return conllu, manifest
