"""Command-line front end: ingest, extract, train, report, backtest, tfidf.

Every command writes a ``run_manifest.json`` capturing the resolved arguments,
input checksums and tool version; ``gasflow rerun`` re-executes a manifest and
reproduces the same output bytes. Outputs deliberately contain no timestamps
or absolute paths. Exit codes: 0 success, 1 data-invariant violation,
2 usage or input error.
"""

from __future__ import annotations

import hashlib
import json
import os
from datetime import date as Date
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np
from filelock import FileLock

from . import __version__
from .backtest import (
    BacktestConfig,
    Purchase,
    PurchaseLedger,
    always_fire_forecaster,
    baseline_ledger,
    report as cost_report,
    run_backtest,
)
from .baselines import chain_forecast, fit_linear_ar, persistence_predict, price_windows
from .conllu import parse_conllu
from .errors import GasflowError, InputError, InvariantError
from .events import ExtractionMode, coverage_stats, extract_events
from .ingest import (
    AlignedCorpus,
    HeadlineRecord,
    Market,
    Source,
    TradingDay,
    align,
    keyword_filter,
    parse_headlines,
    parse_prices,
    with_split_marker,
)
from .model import (
    ModelConfig,
    TrainConfig,
    forward,
    load_checkpoint,
    predict,
    save_checkpoint,
    train as train_model,
)
from .tensors import PriceScaler, build_day, build_windows, day_rng, fit_scaler
from .tfidf import View, pre_purchase_view, rank_tfidf, serialize_ranking
from .vocab import build_vocab, load_embeddings, normalize, parse_vocab, serialize_vocab
from .wordnet import load_wordnet


# ---------------------------------------------------------------- utilities


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _json_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_manifest(out_dir: Path, command: str, arguments: dict, inputs: list[Path]) -> Path:
    manifest = {
        "command": command,
        "arguments": arguments,
        "input_checksums": {str(Path(p).resolve()): _sha256(Path(p)) for p in inputs},
        "tool_version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    path = out_dir / "run_manifest.json"
    _write_text(path, _json_dumps(manifest))
    return path


def cache_dir_for(out_dir: Path) -> Path:
    env = os.environ.get("GASFLOW_CACHE")
    return Path(env) if env else out_dir / "cache"


# ------------------------------------------------------- corpus persistence


def corpus_to_json(corpus: AlignedCorpus, split_fraction: float, errors, dropped: int) -> str:
    days = []
    for day in corpus.days:
        days.append(
            {
                "date": day.date.isoformat(),
                "price": day.price,
                "headlines": [
                    {
                        "date": h.date.isoformat(),
                        "source": h.source.value,
                        "title": h.title,
                        "body": h.body,
                    }
                    for h in day.headlines
                ],
            }
        )
    return _json_dumps(
        {
            "market": corpus.market.value,
            "split_fraction": split_fraction,
            "split_index": corpus.split_index,
            "dropped_headlines": dropped,
            "headline_errors": [[e.line, e.message] for e in errors],
            "days": days,
        }
    )


def load_corpus(path: Path) -> AlignedCorpus:
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise InputError(f"corpus file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"corpus file is not valid JSON: {exc}") from exc
    days = []
    for day in raw["days"]:
        headlines = tuple(
            HeadlineRecord(
                date=Date.fromisoformat(h["date"]),
                source=Source.from_string(h["source"]),
                title=h["title"],
                body=h.get("body"),
            )
            for h in day["headlines"]
        )
        days.append(TradingDay(date=Date.fromisoformat(day["date"]), price=day["price"], headlines=headlines))
    return AlignedCorpus(
        days=tuple(days),
        market=Market(raw["market"]),
        dropped_headlines=raw.get("dropped_headlines", 0),
        split_index=raw.get("split_index"),
    )


def _split_days(corpus: AlignedCorpus) -> tuple[list[TradingDay], list[TradingDay]]:
    cut = corpus.split_index
    if cut is None:
        raise InputError("corpus has no train/test split marker; re-run ingest with --split")
    return list(corpus.days[:cut]), list(corpus.days[cut:])


# --------------------------------------------------------------- events io


def events_to_jsonl(sentences, mode: ExtractionMode, index) -> tuple[str, int]:
    lines = []
    for sentence in sentences:
        for event in extract_events(sentence, mode, index):
            trigger = (
                "whole_sentence" if event.trigger == "whole_sentence" else f"indicator:{event.trigger}"
            )
            lines.append(
                json.dumps(
                    {
                        "headline_id": sentence.headline_id,
                        "date": sentence.date,
                        "span_text": event.text,
                        "trigger": trigger,
                        "gate_supersense": event.gate_supersense,
                    },
                    sort_keys=True,
                )
            )
    return "\n".join(lines) + ("\n" if lines else ""), len(lines)


def load_events(path: Path) -> list[dict]:
    try:
        text = path.read_text()
    except FileNotFoundError as exc:
        raise InputError(f"events file not found: {path}") from exc
    events = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            events.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise InputError(f"events file line {lineno}: {exc}") from exc
    return events


def events_by_date(events: list[dict]) -> dict[Date, list[list[str]]]:
    grouped: dict[Date, list[list[str]]] = {}
    for event in events:
        if not event.get("date"):
            continue
        day = Date.fromisoformat(event["date"])
        grouped.setdefault(day, []).append(normalize(event["span_text"]))
    return grouped


def corpus_day_inputs(days: list[TradingDay], grouped) -> list[tuple[Date, float, list[list[str]]]]:
    return [(day.date, day.price, grouped.get(day.date, [])) for day in days]


# ----------------------------------------------------------------- plotting


def svg_line_plot(dates, prices, purchase_dates, width=900, height=300) -> str:
    """Minimal deterministic SVG: price polyline plus purchase-day markers."""
    pad = 40
    lo, hi = min(prices), max(prices)
    span = (hi - lo) or 1.0
    n = len(prices)

    def x(i):
        return pad + (width - 2 * pad) * (i / max(n - 1, 1))

    def y(p):
        return height - pad - (height - 2 * pad) * ((p - lo) / span)

    points = " ".join(f"{x(i):.2f},{y(p):.2f}" for i, p in enumerate(prices))
    marks = []
    purchase_set = set(purchase_dates)
    for i, day in enumerate(dates):
        if day in purchase_set:
            marks.append(
                f'<line x1="{x(i):.2f}" y1="{pad}" x2="{x(i):.2f}" y2="{height - pad}" '
                'stroke="red" stroke-width="1"/>'
            )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        + "\n".join(marks)
        + ("\n" if marks else "")
        + f'<polyline points="{points}" fill="none" stroke="black" stroke-width="1.5"/>\n'
        f"</svg>\n"
    )


# ------------------------------------------------------------ command logic


def run_ingest(prices_path, headlines_path, market, keyword, split, out_dir) -> dict:
    out_dir = Path(out_dir)
    try:
        price_lines = Path(prices_path).read_text().splitlines()
        headline_lines = Path(headlines_path).read_text().splitlines()
    except FileNotFoundError as exc:
        raise InputError(str(exc)) from exc
    series = parse_prices(price_lines, market=Market(market))
    records, errors = parse_headlines(headline_lines)
    kept = keyword_filter(records, keyword) if keyword else records
    corpus = align(series, kept)
    dropped = corpus.dropped_headlines
    corpus = with_split_marker(corpus, split)
    cache = cache_dir_for(out_dir)
    cache.mkdir(parents=True, exist_ok=True)
    with FileLock(str(cache / ".lock")):
        corpus_path = cache / "corpus.json"
        _write_text(corpus_path, corpus_to_json(corpus, split, errors, dropped))
    summary = {
        "trading_days": len(corpus),
        "headlines_parsed": len(records),
        "headline_errors": len(errors),
        "headlines_after_filter": len(kept),
        "headlines_dropped_non_trading": dropped,
        "split_index": corpus.split_index,
        "corpus_path": str(corpus_path),
    }
    _write_text(out_dir / "ingest_summary.json", _json_dumps({k: v for k, v in summary.items() if k != "corpus_path"}))
    return summary


def run_extract(conllu_path, wordnet_dir, mode, out_dir) -> dict:
    out_dir = Path(out_dir)
    wordnet_dir = Path(wordnet_dir)
    try:
        with open(Path(conllu_path)) as fh:
            sentences = parse_conllu(fh)
    except FileNotFoundError as exc:
        raise InputError(str(exc)) from exc
    try:
        with open(wordnet_dir / "index.sense") as sense, open(wordnet_dir / "lexnames") as lex:
            index = load_wordnet(sense, lex)
    except FileNotFoundError as exc:
        raise InputError(str(exc)) from exc
    if not sentences:
        raise InvariantError("no sentences in the annotated input")
    requested = ExtractionMode(mode)
    jsonl, n_events = events_to_jsonl(sentences, requested, index)
    _write_text(out_dir / "events.jsonl", jsonl)
    stats = {}
    rows = ["mode,headlines_total,headlines_with_events,fraction"]
    for m in (ExtractionMode.FULL_PIPELINE, ExtractionMode.VERB_ONLY):
        s = coverage_stats(sentences, m, index)
        stats[m.value] = s
        rows.append(f"{m.value},{s.headlines_total},{s.headlines_with_events},{s.fraction!r}")
    _write_text(out_dir / "coverage.csv", "\n".join(rows) + "\n")
    return {
        "events_written": n_events,
        "mode": requested.value,
        "coverage": {
            m: (s.headlines_total, s.headlines_with_events, s.fraction) for m, s in stats.items()
        },
    }


def _build_split_windows(corpus, grouped_events, vocab, table, m, h, seed):
    train_days, test_days = _split_days(corpus)
    scaler = fit_scaler([d.price for d in train_days])
    train_windows = build_windows(
        corpus_day_inputs(train_days, grouped_events), m, h, scaler, table, vocab, seed=seed
    )
    test_windows = (
        build_windows(corpus_day_inputs(test_days, grouped_events), m, h, scaler, table, vocab, seed=seed)
        if len(test_days) >= m + h
        else []
    )
    return scaler, train_windows, test_windows


def _train_documents(events: list[dict], split_date: Date) -> list[list[str]]:
    per_headline: dict[str, list[str]] = {}
    for event in events:
        if not event.get("date") or Date.fromisoformat(event["date"]) >= split_date:
            continue
        key = event.get("headline_id") or f"date:{event['date']}"
        per_headline.setdefault(key, []).extend(normalize(event["span_text"]))
    return list(per_headline.values())


def _parse_extents(raw: str, name: str) -> tuple[int, int, int]:
    parts = raw.split(",")
    if len(parts) != 3:
        raise InputError(f"--{name} expects three comma-separated integers, got {raw!r}")
    try:
        return tuple(int(p) for p in parts)  # type: ignore[return-value]
    except ValueError as exc:
        raise InputError(f"--{name}: {exc}") from exc


def run_train(
    corpus_path,
    events_path,
    embeddings_path,
    k,
    m,
    h,
    seed,
    epochs,
    batch_size,
    learning_rate,
    momentum,
    decay,
    filters,
    hidden,
    kernel,
    pool,
    out_dir,
) -> dict:
    out_dir = Path(out_dir)
    corpus = load_corpus(Path(corpus_path))
    events = load_events(Path(events_path))
    train_days, _ = _split_days(corpus)
    if not train_days:
        raise InvariantError("empty training split")
    split_date = corpus.days[corpus.split_index].date if corpus.split_index < len(corpus) else Date.max
    documents = _train_documents(events, split_date)
    if len(documents) < 3:
        raise InvariantError(
            f"only {len(documents)} training headlines have events; need at least 3 to build a vocabulary"
        )
    vocab = build_vocab(documents)
    try:
        with open(Path(embeddings_path)) as fh:
            table = load_embeddings(fh, expected_k=k, vocab=vocab)
    except FileNotFoundError as exc:
        raise InputError(str(exc)) from exc
    grouped = events_by_date(events)
    config = ModelConfig(
        m=m,
        h=h,
        k=k,
        filters=filters,
        kernel=_parse_extents(kernel, "kernel"),
        pool=_parse_extents(pool, "pool"),
        hidden=hidden,
        seed=seed,
    )
    config.validate()
    scaler, train_windows, _ = _build_split_windows(corpus, grouped, vocab, table, m, h, seed)
    tc = TrainConfig(
        learning_rate=learning_rate,
        momentum=momentum,
        decay=decay,
        epochs=epochs,
        batch_size=batch_size,
    )
    params, history = train_model(train_windows, config, tc)
    with open(out_dir / "checkpoint.bin", "wb") as fh:
        save_checkpoint(fh, params)
    _write_text(
        out_dir / "loss_history.csv",
        "epoch,loss\n" + "\n".join(f"{i},{loss!r}" for i, loss in enumerate(history)) + "\n",
    )
    _write_text(out_dir / "vocab.tsv", serialize_vocab(vocab))
    _write_text(out_dir / "scaler.json", _json_dumps({"mean": scaler.mean, "std": scaler.std}))
    return {
        "train_windows": len(train_windows),
        "vocabulary_size": len(vocab),
        "final_loss": history[-1] if history else None,
    }


def _load_model_dir(model_dir: Path) -> tuple:
    try:
        with open(model_dir / "checkpoint.bin", "rb") as fh:
            params = load_checkpoint(fh)
        vocab = parse_vocab((model_dir / "vocab.tsv").read_text())
        scaler_raw = json.loads((model_dir / "scaler.json").read_text())
    except FileNotFoundError as exc:
        raise InputError(f"model directory incomplete: {exc}") from exc
    return params, vocab, PriceScaler(mean=scaler_raw["mean"], std=scaler_raw["std"])


def run_report(corpus_path, events_path, embeddings_path, model_dir, ridge, out_dir) -> dict:
    out_dir = Path(out_dir)
    corpus = load_corpus(Path(corpus_path))
    events = load_events(Path(events_path))
    params, vocab, scaler = _load_model_dir(Path(model_dir))
    cfg = params.config
    try:
        with open(Path(embeddings_path)) as fh:
            table = load_embeddings(fh, expected_k=cfg.k, vocab=vocab)
    except FileNotFoundError as exc:
        raise InputError(str(exc)) from exc
    grouped = events_by_date(events)
    train_days, test_days = _split_days(corpus)
    if len(test_days) < cfg.m + cfg.h:
        raise InvariantError("test split shorter than one window")
    test_windows = build_windows(
        corpus_day_inputs(test_days, grouped), cfg.m, cfg.h, scaler, table, vocab, seed=cfg.seed
    )
    test_prices = [d.price for d in test_days]
    x_test, y_test = price_windows(test_prices, cfg.m, cfg.h)
    x_train, y_train = price_windows([d.price for d in train_days], cfg.m, cfg.h)
    ar = fit_linear_ar(x_train, y_train, ridge=ridge)

    predictions = {
        "c3d": np.array([predict(params, w, scaler) for w in test_windows]),
        "persistence": np.array([persistence_predict(row, cfg.h) for row in x_test]),
        "linear-ar": np.array([ar.predict(row) for row in x_test]),
    }
    rows = ["model," + ",".join(f"mse_h{j + 1}" for j in range(cfg.h)) + ",mse_overall"]
    table_out = {}
    for name, preds in predictions.items():
        errors = (preds - y_test) ** 2
        per_h = errors.mean(axis=0)
        overall = float(errors.mean())
        table_out[name] = overall
        rows.append(name + "," + ",".join(repr(float(v)) for v in per_h) + f",{overall!r}")
    _write_text(out_dir / "evaluation.csv", "\n".join(rows) + "\n")
    return {"test_windows": len(test_windows), "mse_overall": table_out}


class C3dLookaheadForecaster:
    """Chains h-step tensor forecasts out to the configured lookahead,
    representing unknown future days as event-free tensors carrying the
    model's own predicted price."""

    def __init__(self, params, vocab, table, scaler, corpus_days, grouped, start_index, lookahead):
        self.params = params
        self.vocab = vocab
        self.table = table
        self.scaler = scaler
        self.days = corpus_days
        self.grouped = grouped
        self.start = start_index  # corpus index of backtest day 0
        self.lookahead = lookahead

    def __call__(self, day_index: int) -> list[float]:
        cfg = self.params.config
        g = self.start + day_index  # current day, inclusive in the input window
        if g + 1 < cfg.m:
            raise InputError(f"day {day_index}: fewer than m={cfg.m} observed days")
        window_days = self.days[g + 1 - cfg.m : g + 1]
        tensors = [
            build_day(
                self.grouped.get(d.date, []),
                self.scaler.scale(d.price),
                self.table,
                self.vocab,
                day_rng(cfg.seed, d.date),
                date=d.date,
            ).data
            for d in window_days
        ]
        last_date = window_days[-1].date
        out: list[float] = []
        while len(out) < self.lookahead:
            x = np.stack(tensors[-cfg.m :])
            y, _ = forward(self.params, x)
            out.extend(self.scaler.inverse_scale(z) for z in y)
            for z in y:
                last_date = Date.fromordinal(last_date.toordinal() + 1)
                tensors.append(
                    build_day(
                        [], float(z), self.table, self.vocab, day_rng(cfg.seed, last_date), date=last_date
                    ).data
                )
        return out[: self.lookahead]


def run_backtest_cmd(
    corpus_path,
    model,
    model_dir,
    events_path,
    embeddings_path,
    total_volume,
    days,
    lookahead,
    force_final,
    ridge,
    out_dir,
) -> dict:
    out_dir = Path(out_dir)
    corpus = load_corpus(Path(corpus_path))
    train_days, test_days = _split_days(corpus)
    if not test_days:
        raise InvariantError("empty test split")
    duration = days or len(test_days)
    if duration > len(test_days):
        raise InputError(f"--days {duration} exceeds the {len(test_days)} test days")
    prices = [(d.date, d.price) for d in test_days[:duration]]
    config = BacktestConfig(
        total_volume=total_volume, days=duration, lookahead=lookahead, force_final=force_final
    )
    all_prices = [d.price for d in corpus.days]
    start = len(train_days)

    if model == "always-fire":
        forecaster = always_fire_forecaster(prices, lookahead)
    elif model == "persistence":
        def forecaster(d):
            history = all_prices[: start + d + 1]
            return chain_forecast(lambda w: persistence_predict(w, 5), history[-10:], lookahead)
    elif model == "linear-ar":
        m_ar, h_ar = 10, 5
        if len(train_days) < m_ar + h_ar:
            raise InvariantError("train split shorter than one autoregression window")
        x_train, y_train = price_windows([d.price for d in train_days], m_ar, h_ar)
        ar = fit_linear_ar(x_train, y_train, ridge=ridge)

        def forecaster(d):
            history = all_prices[: start + d + 1]
            if len(history) < m_ar:
                raise InputError(f"day {d}: fewer than {m_ar} observed prices")
            return chain_forecast(ar.predict, history[-m_ar:], lookahead)
    elif model == "c3d":
        if not (model_dir and events_path and embeddings_path):
            raise InputError("--model c3d requires --model-dir, --events and --embeddings")
        params, vocab, scaler = _load_model_dir(Path(model_dir))
        grouped = events_by_date(load_events(Path(events_path)))
        try:
            with open(Path(embeddings_path)) as fh:
                table = load_embeddings(fh, expected_k=params.config.k, vocab=vocab)
        except FileNotFoundError as exc:
            raise InputError(str(exc)) from exc
        forecaster = C3dLookaheadForecaster(
            params, vocab, table, scaler, list(corpus.days), grouped, start, lookahead
        )
    else:  # pragma: no cover - click restricts choices
        raise InputError(f"unknown model {model}")

    ledger = run_backtest(prices, forecaster, config)
    base = baseline_ledger(prices, config)
    ours, benchmark = cost_report(ledger), cost_report(base)

    ledger_rows = ["date,volume,price,cost"]
    for p in ledger.purchases:
        ledger_rows.append(f"{p.date},{p.volume!r},{p.price!r},{p.cost!r}")
    _write_text(out_dir / "ledger.csv", "\n".join(ledger_rows) + "\n")

    lines = []
    for label, rep in (("strategy", ours), ("baseline", benchmark)):
        lines += [
            f"{label}.total_volume = {rep.total_volume!r}",
            f"{label}.total_cost = {rep.total_cost!r}",
            f"{label}.weighted_average = {rep.weighted_average!r}",
            f"{label}.unweighted_average = {rep.unweighted_average!r}",
        ]
    lines.append(f"savings_vs_baseline = {benchmark.total_cost - ours.total_cost!r}")
    _write_text(out_dir / "backtest_report.txt", "\n".join(lines) + "\n")

    purchase_dates = {p.date for p in ledger.purchases}
    plot_rows = ["date,price,purchased_volume"]
    volume_on = {}
    for p in ledger.purchases:
        volume_on[p.date] = volume_on.get(p.date, 0.0) + p.volume
    for day, price in prices:
        plot_rows.append(f"{day},{price!r},{volume_on.get(day, 0.0)!r}")
    _write_text(out_dir / "purchases_plot.csv", "\n".join(plot_rows) + "\n")
    _write_text(
        out_dir / "purchases_plot.svg",
        svg_line_plot([d for d, _ in prices], [p for _, p in prices], purchase_dates),
    )
    return {
        "purchases": len(ledger.purchases),
        "strategy_cost": ours.total_cost,
        "baseline_cost": benchmark.total_cost,
    }


def run_tfidf(corpus_path, events_path, ledger_path, lookahead, top_n, out_dir) -> dict:
    out_dir = Path(out_dir)
    corpus = load_corpus(Path(corpus_path))
    events = load_events(Path(events_path))
    trading_dates = corpus.dates
    raw_docs, raw_days = [], []
    for day in corpus.days:
        text = " ".join(h.title for h in day.headlines)
        raw_docs.append(normalize(text))
        raw_days.append(day.date)
    grouped_text: dict[Date, list[str]] = {}
    for event in events:
        if not event.get("date"):
            continue
        day = Date.fromisoformat(event["date"])
        grouped_text.setdefault(day, []).extend(normalize(event["span_text"]))
    event_docs = [grouped_text.get(day, []) for day in trading_dates]
    date_range = (trading_dates[0], trading_dates[-1]) if trading_dates else None
    rankings = {
        "raw": rank_tfidf(raw_docs, top_n, view=View.RAW, date_range=date_range),
        "events": rank_tfidf(event_docs, top_n, view=View.EVENTS, date_range=date_range),
    }
    if ledger_path:
        ledger = _load_ledger_csv(Path(ledger_path))
        view_docs = pre_purchase_view(grouped_text, trading_dates, ledger, window=lookahead)
        documents = [doc for _, doc in view_docs]
        if documents:
            rankings["pre_purchase"] = rank_tfidf(
                documents,
                top_n,
                view=View.PRE_PURCHASE,
                date_range=(view_docs[0][0], view_docs[-1][0]),
            )
    for name, ranking in rankings.items():
        _write_text(out_dir / f"tfidf_{name}.csv", serialize_ranking(ranking))
    return {name: len(r.entries) for name, r in rankings.items()}


def _load_ledger_csv(path: Path) -> PurchaseLedger:
    try:
        lines = path.read_text().splitlines()
    except FileNotFoundError as exc:
        raise InputError(f"ledger file not found: {path}") from exc
    purchases = []
    for lineno, line in enumerate(lines, start=1):
        if lineno == 1 and line.startswith("date,"):
            continue
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) < 3:
            raise InputError(f"ledger line {lineno}: expected date,volume,price[,cost]")
        purchases.append(
            Purchase(date=Date.fromisoformat(parts[0]), volume=float(parts[1]), price=float(parts[2]))
        )
    return PurchaseLedger(purchases=tuple(purchases), debt_by_day=())


# ----------------------------------------------------------------- click UI


@click.group()
@click.version_option(__version__)
def main():
    """Headline events, 3D-conv price forecasts and a purchasing backtest."""


def _execute(ctx, command: str, arguments: dict, inputs: list, body):
    out_dir = Path(arguments["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        summary = body()
        write_manifest(out_dir, command, arguments, [Path(p) for p in inputs if p])
    except InvariantError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(1)
    except (GasflowError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(2)
    for key, value in summary.items():
        click.echo(f"{key}: {value}")


@main.command("ingest")
@click.option("--prices", "prices_path", required=True, type=click.Path())
@click.option("--headlines", "headlines_path", required=True, type=click.Path())
@click.option("--market", type=click.Choice(["future", "spot"]), default="future", show_default=True)
@click.option("--keyword", default=None, help="Case-insensitive body/title filter, e.g. 'gas'.")
@click.option("--split", type=float, default=0.6, show_default=True, help="Train fraction (chronological).")
@click.option("--out-dir", required=True, type=click.Path())
@click.pass_context
def ingest_cmd(ctx, prices_path, headlines_path, market, keyword, split, out_dir):
    """Parse prices and headlines, align them, and cache the corpus."""
    arguments = {
        "prices": str(Path(prices_path).resolve()),
        "headlines": str(Path(headlines_path).resolve()),
        "market": market,
        "keyword": keyword,
        "split": split,
        "out_dir": str(out_dir),
    }
    _execute(
        ctx,
        "ingest",
        arguments,
        [prices_path, headlines_path],
        lambda: run_ingest(prices_path, headlines_path, market, keyword, split, out_dir),
    )


@main.command("extract")
@click.option("--conllu", "conllu_path", required=True, type=click.Path())
@click.option("--wordnet-dir", required=True, type=click.Path())
@click.option("--mode", type=click.Choice(["full", "verb-only"]), default="full", show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
@click.pass_context
def extract_cmd(ctx, conllu_path, wordnet_dir, mode, out_dir):
    """Extract events from annotated sentences; print coverage for both modes."""
    arguments = {
        "conllu": str(Path(conllu_path).resolve()),
        "wordnet_dir": str(Path(wordnet_dir).resolve()),
        "mode": mode,
        "out_dir": str(out_dir),
    }
    inputs = [conllu_path]
    for name in ("index.sense", "lexnames"):
        candidate = Path(wordnet_dir) / name
        if candidate.exists():
            inputs.append(candidate)
    _execute(
        ctx,
        "extract",
        arguments,
        inputs,
        lambda: run_extract(conllu_path, wordnet_dir, mode, out_dir),
    )


@main.command("train")
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--events", "events_path", required=True, type=click.Path())
@click.option("--embeddings", "embeddings_path", required=True, type=click.Path())
@click.option("--k", type=int, default=300, show_default=True, help="Word-embedding dimension.")
@click.option("--m", type=int, default=10, show_default=True, help="Input window length in days.")
@click.option("--h", type=int, default=5, show_default=True, help="Prediction horizon in days.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--epochs", type=int, default=10, show_default=True)
@click.option("--batch-size", type=int, default=16, show_default=True)
@click.option("--learning-rate", type=float, default=1e-7, show_default=True)
@click.option("--momentum", type=float, default=0.9, show_default=True)
@click.option("--decay", type=float, default=1e-6, show_default=True)
@click.option("--filters", type=int, default=8, show_default=True)
@click.option("--hidden", type=int, default=64, show_default=True)
@click.option("--kernel", default="3,3,3", show_default=True, help="day,word,event kernel extents.")
@click.option("--pool", default="2,2,2", show_default=True, help="day,word,event max-pool extents.")
@click.option("--out-dir", required=True, type=click.Path())
@click.pass_context
def train_cmd(ctx, corpus_path, events_path, embeddings_path, k, m, h, seed, epochs, batch_size, learning_rate, momentum, decay, filters, hidden, kernel, pool, out_dir):
    """Train the 3D-conv model; write checkpoint, vocabulary, scaler and loss curve."""
    arguments = {
        "corpus": str(Path(corpus_path).resolve()),
        "events": str(Path(events_path).resolve()),
        "embeddings": str(Path(embeddings_path).resolve()),
        "k": k,
        "m": m,
        "h": h,
        "seed": seed,
        "epochs": epochs,
        "batch_size": batch_size,
        "learning_rate": learning_rate,
        "momentum": momentum,
        "decay": decay,
        "filters": filters,
        "hidden": hidden,
        "kernel": kernel,
        "pool": pool,
        "out_dir": str(out_dir),
    }
    _execute(
        ctx,
        "train",
        arguments,
        [corpus_path, events_path, embeddings_path],
        lambda: run_train(
            corpus_path, events_path, embeddings_path, k, m, h, seed, epochs, batch_size,
            learning_rate, momentum, decay, filters, hidden, kernel, pool, out_dir,
        ),
    )


@main.command("report")
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--events", "events_path", required=True, type=click.Path())
@click.option("--embeddings", "embeddings_path", required=True, type=click.Path())
@click.option("--model-dir", required=True, type=click.Path())
@click.option("--ridge", type=float, default=1e-6, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
@click.pass_context
def report_cmd(ctx, corpus_path, events_path, embeddings_path, model_dir, ridge, out_dir):
    """Side-by-side test MSE for the 3D-conv model and both baselines."""
    arguments = {
        "corpus": str(Path(corpus_path).resolve()),
        "events": str(Path(events_path).resolve()),
        "embeddings": str(Path(embeddings_path).resolve()),
        "model_dir": str(Path(model_dir).resolve()),
        "ridge": ridge,
        "out_dir": str(out_dir),
    }
    _execute(
        ctx,
        "report",
        arguments,
        [corpus_path, events_path, embeddings_path, Path(model_dir) / "checkpoint.bin"],
        lambda: run_report(corpus_path, events_path, embeddings_path, model_dir, ridge, out_dir),
    )


@main.command("backtest")
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--model", type=click.Choice(["c3d", "persistence", "linear-ar", "always-fire"]), default="persistence", show_default=True)
@click.option("--model-dir", default=None, type=click.Path())
@click.option("--events", "events_path", default=None, type=click.Path())
@click.option("--embeddings", "embeddings_path", default=None, type=click.Path())
@click.option("--total-volume", type=float, default=1200.0, show_default=True)
@click.option("--days", type=int, default=None, help="Backtest length; defaults to the whole test split.")
@click.option("--lookahead", type=int, default=10, show_default=True)
@click.option("--force-final", is_flag=True, default=False)
@click.option("--ridge", type=float, default=1e-6, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
@click.pass_context
def backtest_cmd(ctx, corpus_path, model, model_dir, events_path, embeddings_path, total_volume, days, lookahead, force_final, ridge, out_dir):
    """Run the mock purchasing simulation on the test split."""
    arguments = {
        "corpus": str(Path(corpus_path).resolve()),
        "model": model,
        "model_dir": str(Path(model_dir).resolve()) if model_dir else None,
        "events": str(Path(events_path).resolve()) if events_path else None,
        "embeddings": str(Path(embeddings_path).resolve()) if embeddings_path else None,
        "total_volume": total_volume,
        "days": days,
        "lookahead": lookahead,
        "force_final": force_final,
        "ridge": ridge,
        "out_dir": str(out_dir),
    }
    inputs = [p for p in (corpus_path, events_path, embeddings_path) if p]
    _execute(
        ctx,
        "backtest",
        arguments,
        inputs,
        lambda: run_backtest_cmd(
            corpus_path, model, model_dir, events_path, embeddings_path, total_volume, days,
            lookahead, force_final, ridge, out_dir,
        ),
    )


@main.command("tfidf")
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--events", "events_path", required=True, type=click.Path())
@click.option("--ledger", "ledger_path", default=None, type=click.Path())
@click.option("--lookahead", type=int, default=10, show_default=True)
@click.option("--top-n", type=int, default=10, show_default=True)
@click.option("--out-dir", required=True, type=click.Path())
@click.pass_context
def tfidf_cmd(ctx, corpus_path, events_path, ledger_path, lookahead, top_n, out_dir):
    """Rank words by TF-IDF over raw, event and pre-purchase views."""
    arguments = {
        "corpus": str(Path(corpus_path).resolve()),
        "events": str(Path(events_path).resolve()),
        "ledger": str(Path(ledger_path).resolve()) if ledger_path else None,
        "lookahead": lookahead,
        "top_n": top_n,
        "out_dir": str(out_dir),
    }
    inputs = [p for p in (corpus_path, events_path, ledger_path) if p]
    _execute(
        ctx,
        "tfidf",
        arguments,
        inputs,
        lambda: run_tfidf(corpus_path, events_path, ledger_path, lookahead, top_n, out_dir),
    )


def _dispatch(command: str, arguments: dict) -> None:
    if command == "ingest":
        run_ingest(
            arguments["prices"], arguments["headlines"], arguments["market"],
            arguments["keyword"], arguments["split"], arguments["out_dir"],
        )
    elif command == "extract":
        run_extract(arguments["conllu"], arguments["wordnet_dir"], arguments["mode"], arguments["out_dir"])
    elif command == "train":
        run_train(
            arguments["corpus"], arguments["events"], arguments["embeddings"], arguments["k"],
            arguments["m"], arguments["h"], arguments["seed"], arguments["epochs"],
            arguments["batch_size"], arguments["learning_rate"], arguments["momentum"],
            arguments["decay"], arguments["filters"], arguments["hidden"],
            arguments.get("kernel", "3,3,3"), arguments.get("pool", "2,2,2"), arguments["out_dir"],
        )
    elif command == "report":
        run_report(
            arguments["corpus"], arguments["events"], arguments["embeddings"],
            arguments["model_dir"], arguments["ridge"], arguments["out_dir"],
        )
    elif command == "backtest":
        run_backtest_cmd(
            arguments["corpus"], arguments["model"], arguments["model_dir"], arguments["events"],
            arguments["embeddings"], arguments["total_volume"], arguments["days"],
            arguments["lookahead"], arguments["force_final"], arguments["ridge"], arguments["out_dir"],
        )
    elif command == "tfidf":
        run_tfidf(
            arguments["corpus"], arguments["events"], arguments["ledger"],
            arguments["lookahead"], arguments["top_n"], arguments["out_dir"],
        )
    else:
        raise InputError(f"manifest names unknown command {command!r}")


@main.command("rerun")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--out-dir", default=None, type=click.Path(), help="Override the recorded output directory.")
@click.pass_context
def rerun_cmd(ctx, manifest_path, out_dir):
    """Re-execute a recorded run; identical inputs give identical outputs."""
    try:
        manifest = json.loads(Path(manifest_path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: cannot read manifest: {exc}", err=True)
        ctx.exit(2)
    arguments = dict(manifest["arguments"])
    if out_dir:
        arguments["out_dir"] = str(out_dir)
    for path, recorded in manifest.get("input_checksums", {}).items():
        try:
            actual = _sha256(Path(path))
        except FileNotFoundError:
            click.echo(f"error: recorded input missing: {path}", err=True)
            ctx.exit(2)
        if actual != recorded:
            click.echo(f"error: input changed since the recorded run: {path}", err=True)
            ctx.exit(2)
    command = manifest["command"]
    target = Path(arguments["out_dir"])
    target.mkdir(parents=True, exist_ok=True)
    try:
        _dispatch(command, arguments)
        write_manifest(target, command, arguments, [Path(p) for p in manifest.get("input_checksums", {})])
    except InvariantError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(1)
    except (GasflowError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(2)
    click.echo(f"reran {command} into {arguments['out_dir']}")


if __name__ == "__main__":
    main()
