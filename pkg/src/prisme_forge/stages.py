"""Pipeline stages behind the CLI subcommands.

Each stage reads its inputs, writes its outputs plus a run manifest, and
is restartable: when the config hash, input digests, and output digests
all match the previous run, the stage is a no-op whose manifest notes
"skipped". A failing stage removes the files it wrote before the error so
no partial outputs survive.
"""

from __future__ import annotations

import logging
import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from datetime import date
from pathlib import Path

from . import dataset as dataset_mod
from . import extractor, harvest, langid, registry, store, termlab
from .config import PipelineConfig
from .crawler import (
    CrawlPolicy,
    CrawlStats,
    crawl_domain,
    is_annual_report,
    load_url_filters,
)
from .csvio import read_rows, write_rows_atomic
from .errors import PrismeError, ValidationError
from .fetch import DirectoryFetcher, HttpFetcher, PoliteFetcher
from .kernels import fnv1a64
from .manifest import (
    STATUS_OK,
    STATUS_SKIPPED,
    RunManifest,
    digest_map,
    load_manifest,
    should_skip,
    write_manifest,
)

logger = logging.getLogger(__name__)

STAGE_NAMES = (
    "prepare", "crawl", "harvest-pdf", "structure",
    "terms", "dataset", "vectorize", "report",
)

CRAWL_INDEX_HEADER = ["domain", "url", "path", "fetch_order"]
CRAWL_STATS_HEADER = [
    "domain", "pages_fetched", "robots_denied", "filtered", "fetch_errors", "robots_failed",
]
PDF_CANDIDATES_HEADER = ["company", "url"]
TERMS_HEADER = ["sector", "term", "weight", "rank"]
REPORT_HEADER = ["language", "url_count", "sectors_covered", "token_count"]


class _OutputTracker:
    """Records files written by the running stage; deletes them on failure."""

    def __init__(self) -> None:
        self.paths: list[Path] = []

    def add(self, path: Path) -> Path:
        self.paths.append(Path(path))
        return Path(path)

    def discard_all(self) -> None:
        for path in self.paths:
            try:
                path.unlink()
            except OSError:
                pass


def _run_date(cfg: PipelineConfig) -> str:
    return cfg.run_date or date.today().isoformat()


def _require(cfg_value, message: str):
    if cfg_value is None:
        raise ValidationError(message)
    return cfg_value


def _require_file(path: Path | None, message: str) -> Path:
    path = _require(path, message)
    if not Path(path).is_file():
        raise ValidationError(f"{message}: missing file {path}")
    return Path(path)


def _fetcher_for(cfg: PipelineConfig, entries):
    spec = cfg.fetcher_spec
    if spec == "http":
        return HttpFetcher()
    if spec.startswith("directory:"):
        root = Path(spec.split(":", 1)[1])
        if not root.is_absolute():
            root = cfg.config_dir / root
        if not root.is_dir():
            raise ValidationError(f"fetcher directory does not exist: {root}")
        return DirectoryFetcher({entry.domain: root / entry.domain for entry in entries})
    raise ValidationError(f"unknown fetcher {spec!r}; use 'http' or 'directory:<root>'")


def _stage_runner(cfg: PipelineConfig, stage: str, inputs: dict[str, str], body) -> RunManifest:
    """Shared skip/fail/manifest protocol around one stage body."""
    cfg.output_root.mkdir(parents=True, exist_ok=True)
    config_hash = cfg.config_hash()
    previous = load_manifest(cfg.output_root, stage)
    if should_skip(previous, config_hash, inputs, cfg.output_root):
        manifest = RunManifest(
            stage=stage,
            config_hash=config_hash,
            inputs=inputs,
            outputs=previous.outputs,
            counters=previous.counters,
            status=STATUS_SKIPPED,
        )
        write_manifest(manifest, cfg.output_root)
        return manifest

    tracker = _OutputTracker()
    try:
        outputs, counters = body(tracker)
    except BaseException:
        tracker.discard_all()
        raise
    manifest = RunManifest(
        stage=stage,
        config_hash=config_hash,
        inputs=inputs,
        outputs=digest_map(outputs, cfg.output_root),
        counters=counters,
        status=STATUS_OK,
    )
    write_manifest(manifest, cfg.output_root)
    return manifest


def _registry_inputs(cfg: PipelineConfig) -> dict[str, str]:
    paths = [path for path in (
        cfg.registry, cfg.sectors_path, cfg.keywords_path, cfg.targets_path,
        cfg.category_lexicon, cfg.filters_path, cfg.blocked_hosts_path, cfg.urls_path,
    ) if path is not None]
    return digest_map(paths, cfg.output_root)


def _load_entries(cfg: PipelineConfig):
    registry_path = _require_file(cfg.registry, "stage needs a company registry CSV")
    sectors = registry.load_sectors(cfg.sectors_path) if cfg.sectors_path else registry.load_sectors()
    return registry.load_registry(registry_path, sectors)


# -- prepare ---------------------------------------------------------------


def stage_prepare(cfg: PipelineConfig) -> RunManifest:
    inputs = _registry_inputs(cfg)

    def body(tracker):
        entries = _load_entries(cfg)
        lexicon = store.load_lexicon(cfg.keywords_path or store.DEFAULT_LEXICON_PATH)
        if cfg.category_lexicon is not None:
            dataset_mod.load_category_lexicon(cfg.category_lexicon)
        if cfg.filters_path is not None:
            CrawlPolicy(url_exclude_patterns=load_url_filters(cfg.filters_path))
        out = tracker.add(cfg.output_root / "prepare" / "registry.csv")
        write_rows_atomic(
            out, registry.REGISTRY_HEADER,
            [[e.name, e.domain, e.sector] for e in entries],
        )
        counters = {
            "companies": len(entries),
            "sectors": len({e.sector for e in entries}),
            "lexicon_languages": len(lexicon.languages()),
        }
        return [out], counters

    return _stage_runner(cfg, "prepare", inputs, body)


# -- crawl -----------------------------------------------------------------


def _page_filename(url: str) -> str:
    return f"{fnv1a64(url.encode('utf-8')):016x}.html"


def stage_crawl(cfg: PipelineConfig) -> RunManifest:
    inputs = _registry_inputs(cfg)

    def body(tracker):
        entries = _load_entries(cfg)
        patterns = load_url_filters(cfg.filters_path) if cfg.filters_path else load_url_filters()
        policy = CrawlPolicy(
            per_domain_delay=cfg.crawl_delay,
            max_pages_per_domain=cfg.crawl_max_pages,
            min_pages_for_inclusion=cfg.min_pages_per_domain,
            url_exclude_patterns=patterns,
        )
        fetcher = _fetcher_for(cfg, entries)
        pages_root = cfg.output_root / "crawl" / "pages"

        def crawl_one(entry):
            stats = CrawlStats()
            saved = []
            for page in crawl_domain(
                entry, policy, fetcher,
                seed_scheme=cfg.seed_scheme, stats=stats, collect_pdfs=True,
            ):
                target = pages_root / entry.domain / _page_filename(page.url)
                target.parent.mkdir(parents=True, exist_ok=True)
                target.write_text(page.html, encoding="utf-8")
                saved.append((page.url, target))
            pdf_candidates = [
                (entry.name, link)
                for link, text in stats.pdf_links
                if is_annual_report(link, text)
            ]
            return entry, stats, saved, pdf_candidates

        workers = min(8, max(1, len(entries)))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(crawl_one, entries))

        index_rows = []
        stats_rows = []
        candidate_rows = []
        seen_candidates = set()
        outputs = []
        for entry, stats, saved, pdf_candidates in results:
            for order, (url, target) in enumerate(saved):
                relative = target.relative_to(cfg.output_root)
                index_rows.append([entry.domain, url, str(relative), str(order)])
                outputs.append(tracker.add(target))
            stats_rows.append([
                entry.domain, str(stats.pages_fetched), str(stats.robots_denied),
                str(stats.filtered), str(stats.fetch_errors), str(stats.robots_failed).lower(),
            ])
            for company, url in pdf_candidates:
                if url not in seen_candidates:
                    seen_candidates.add(url)
                    candidate_rows.append([company, url])

        index_path = tracker.add(cfg.output_root / "crawl" / "index.csv")
        write_rows_atomic(index_path, CRAWL_INDEX_HEADER, index_rows)
        stats_path = tracker.add(cfg.output_root / "crawl" / "stats.csv")
        write_rows_atomic(stats_path, CRAWL_STATS_HEADER, stats_rows)
        candidates_path = tracker.add(cfg.output_root / "crawl" / "pdf_candidates.csv")
        write_rows_atomic(candidates_path, PDF_CANDIDATES_HEADER, candidate_rows)
        outputs += [index_path, stats_path, candidates_path]
        counters = {
            "domains": len(entries),
            "pages_fetched": sum(int(row[1]) for row in stats_rows),
            "robots_denied": sum(int(row[2]) for row in stats_rows),
            "fetch_errors": sum(int(row[4]) for row in stats_rows),
            "domains_robots_failed": sum(1 for row in stats_rows if row[5] == "true"),
            "pdf_candidates": len(candidate_rows),
        }
        return outputs, counters

    return _stage_runner(cfg, "crawl", inputs, body)


def domain_inclusion_filter(
    stats_rows: list[tuple[str, int]], min_pages: int
) -> tuple[list[str], list[tuple[str, str]]]:
    """Split domains into included and excluded-with-reason by page count."""
    included = []
    excluded = []
    for domain, pages in stats_rows:
        if pages >= min_pages:
            included.append(domain)
        else:
            excluded.append((domain, "below_min_pages"))
    return included, excluded


# -- harvest-pdf -------------------------------------------------------------


def stage_harvest(cfg: PipelineConfig) -> RunManifest:
    inputs = _registry_inputs(cfg)
    crawl_candidates = cfg.output_root / "crawl" / "pdf_candidates.csv"
    if cfg.urls_path is None and crawl_candidates.is_file():
        inputs = dict(inputs)
        inputs.update(digest_map([crawl_candidates], cfg.output_root))

    def body(tracker):
        entries = _load_entries(cfg)
        if cfg.urls_path is not None:
            backend = harvest.UrlListBackend(cfg.urls_path)
        elif crawl_candidates.is_file():
            backend = harvest.UrlListBackend(crawl_candidates)
        elif cfg.search_endpoint:
            backend = harvest.SearchApiBackend(cfg.search_endpoint, HttpFetcher())
        else:
            raise ValidationError(
                "harvest-pdf needs a url list: set [harvest] urls, run the crawl "
                "stage first, or configure [harvest] search_endpoint"
            )
        fetcher = PoliteFetcher(_fetcher_for(cfg, entries), cfg.crawl_delay)
        converter = (
            harvest.SubprocessConverter(cfg.converter_command)
            if cfg.converter_command
            else None
        )
        blocked = (
            harvest.load_blocked_hosts(cfg.blocked_hosts_path)
            if cfg.blocked_hosts_path
            else harvest.load_blocked_hosts()
        )
        out_dir = cfg.output_root / "harvest"
        docs = harvest.harvest_reports(
            entries, backend, fetcher, out_dir,
            min_year=cfg.min_year, min_tokens=cfg.min_tokens_report,
            blocked_hosts=blocked, converter=converter, accent_mode=cfg.accent_mode,
        )
        for doc in docs:
            if doc.status == harvest.STATUS_ACCEPTED:
                assert doc.year is not None and doc.year >= cfg.min_year
                assert doc.token_count >= cfg.min_tokens_report
                assert doc.url.lower().split("?")[0].endswith(".pdf")
        manifest_csv = tracker.add(out_dir / "reports.csv")
        harvest.write_harvest_manifest(docs, manifest_csv, base=cfg.output_root)
        outputs = [manifest_csv]
        for doc in docs:
            if doc.local_path:
                outputs.append(tracker.add(Path(doc.local_path)))
        reasons: dict[str, int] = {}
        for doc in docs:
            if doc.status == harvest.STATUS_REJECTED:
                reasons[f"rejected_{doc.reason}"] = reasons.get(f"rejected_{doc.reason}", 0) + 1
        counters = {
            "candidates": len(docs),
            "accepted": sum(1 for d in docs if d.status == harvest.STATUS_ACCEPTED),
            **dict(sorted(reasons.items())),
        }
        return outputs, counters

    return _stage_runner(cfg, "harvest-pdf", inputs, body)


# -- structure ---------------------------------------------------------------


def _read_crawl_outputs(cfg: PipelineConfig):
    index_path = cfg.output_root / "crawl" / "index.csv"
    stats_path = cfg.output_root / "crawl" / "stats.csv"
    if not index_path.is_file() or not stats_path.is_file():
        raise ValidationError(
            f"structure needs crawl outputs; missing {index_path} - run the crawl stage first"
        )
    _, index_rows = read_rows(index_path)
    _, stats_rows = read_rows(stats_path)
    return index_path, stats_path, index_rows, stats_rows


def stage_structure(cfg: PipelineConfig) -> RunManifest:
    index_path, stats_path, index_rows, stats_rows = _read_crawl_outputs(cfg)
    page_paths = [cfg.output_root / row[2] for row in index_rows]
    input_paths = [index_path, stats_path, *page_paths]
    for path in (cfg.registry, cfg.keywords_path, cfg.sectors_path):
        if path is not None:
            input_paths.append(path)
    inputs = digest_map(input_paths, cfg.output_root)

    def body(tracker):
        entries = _load_entries(cfg)
        sector_by_domain = registry.sector_of(entries)
        lexicon = store.load_lexicon(cfg.keywords_path or store.DEFAULT_LEXICON_PATH)
        detector = langid.LanguageDetector.from_dir(cfg.profiles_dir or langid.default_profile_dir())
        run_date = _run_date(cfg)

        included, excluded = domain_inclusion_filter(
            [(row[0], int(row[1])) for row in stats_rows], cfg.min_pages_per_domain
        )
        included_set = set(included)

        variant_cache: dict[str, dict[str, frozenset[str]]] = {}

        def variants_for(lang: str) -> dict[str, frozenset[str]]:
            table = variant_cache.get(lang)
            if table is None:
                table = store.fold_variant_table(
                    store.expand_variants(lexicon, lang), accent_mode=cfg.accent_mode
                )
                variant_cache[lang] = table
            return table

        records: list[store.SnippetRecord] = []
        pages_seen = 0
        pages_short = 0
        pages_no_keyword = 0
        for domain, url, relative, _order in index_rows:
            if domain not in included_set:
                continue
            pages_seen += 1
            html = (cfg.output_root / relative).read_text(encoding="utf-8")
            extracted = extractor.extract_page(html, accent_mode=cfg.accent_mode)
            if not extractor.passes_min_tokens(extracted.tokens, cfg.min_tokens_page):
                pages_short += 1
                continue
            verdict = detector.detect(extracted.text)
            lang = langid.validate(
                extracted.declared_lang, verdict, threshold=cfg.lang_threshold
            )
            variants = variants_for(lang)
            all_forms = frozenset().union(*variants.values()) if variants else frozenset()
            if not store.contains_any(extracted.tokens, all_forms):
                pages_no_keyword += 1
                continue
            counts = store.count_occurrences(extracted.tokens, variants)
            sector = sector_by_domain.get(domain, "")
            for lemma, _span, snippet in store.snippets_by_lemma(
                extracted.tokens, variants, cfg.snippet_window
            ):
                records.append(
                    store.SnippetRecord(
                        domain=domain, url=url, lang=lang, sector=sector,
                        token_count=extracted.token_count, date_seen=run_date,
                        keyword=lemma, counts=counts, snippet=snippet,
                    )
                )

        records = store.deduplicate_records(records)
        corpus_csv = tracker.add(cfg.output_root / "corpus" / "corpus.csv")
        store.aggregate_results_to_csv(records, corpus_csv)
        text_files = store.export_plain_text(records, cfg.output_root / "corpus" / "text")
        outputs = [corpus_csv] + [tracker.add(path) for path in text_files]
        counters = {
            "domains_included": len(included),
            "domains_excluded": {domain: reason for domain, reason in excluded},
            "pages_seen": pages_seen,
            "pages_below_min_tokens": pages_short,
            "pages_without_keywords": pages_no_keyword,
            "records": len(records),
        }
        return outputs, counters

    return _stage_runner(cfg, "structure", inputs, body)


# -- terms -------------------------------------------------------------------


def _corpus_documents(cfg: PipelineConfig) -> dict[str, Path]:
    root = cfg.corpus_dir or cfg.output_root / "corpus"
    text_dir = root / "text" if (root / "text").is_dir() else root
    documents = {path.stem: path for path in sorted(text_dir.glob("*.txt"))}
    if not documents:
        raise ValidationError(
            f"no corpus text exports under {text_dir} - run the structure stage first"
        )
    return documents


def stage_terms(cfg: PipelineConfig) -> RunManifest:
    documents = _corpus_documents(cfg)
    input_paths = list(documents.values())
    for path in (cfg.registry, cfg.targets_path, cfg.sectors_path):
        if path is not None:
            input_paths.append(path)
    inputs = digest_map(input_paths, cfg.output_root)

    def body(tracker):
        entries = _load_entries(cfg)
        sector_by_domain = registry.sector_of(entries)
        targets = (
            termlab.load_targets(cfg.targets_path)
            if cfg.targets_path
            else termlab.load_targets()
        )
        company_tokens = set()
        for entry in entries:
            normalized = extractor.normalize_text(entry.name, accent_mode=cfg.accent_mode)
            company_tokens.update(extractor.tokenize(normalized))

        wanted = {
            label.strip() for label in cfg.sectors_filter.split(",") if label.strip()
        }
        sector_docs: dict[str, dict[str, list[str]]] = {}
        for domain, path in documents.items():
            sector = sector_by_domain.get(domain)
            if sector is None or (wanted and sector not in wanted):
                continue
            normalized = extractor.normalize_text(
                path.read_text(encoding="utf-8"), accent_mode=cfg.accent_mode
            )
            tokens = extractor.tokenize(normalized)
            sector_docs.setdefault(sector, {})[domain] = tokens

        rows = []
        for sector in sorted(sector_docs):
            docs = sector_docs[sector]
            freqs: dict[termlab.Ngram, int] = {}
            stats: list[termlab.NgramStat] = []
            for domain, tokens in docs.items():
                for ngram, count in termlab.generate_ngrams(tokens).items():
                    freqs[ngram] = freqs.get(ngram, 0) + count
                    stats.append(termlab.NgramStat(ngram, count, domain, sector))
            filtered = termlab.filter_ngrams(stats, company_tokens, targets)
            allowed = {stat.ngram for stat in filtered}
            candidate_freqs = {ngram: n for ngram, n in freqs.items() if ngram in allowed}
            selected = termlab.frequency_threshold(candidate_freqs)
            weights = termlab.compute_tfidf(sector, docs, selected)
            weights = termlab.quantile_filter(weights, cfg.tfidf_quantile)
            for rank, weight in enumerate(termlab.top_terms(weights, cfg.top_k), start=1):
                rows.append([
                    sector, " ".join(weight.term), repr(weight.weight), str(rank),
                ])

        terms_csv = tracker.add(cfg.terms_out or cfg.output_root / "terms" / "terms.csv")
        write_rows_atomic(terms_csv, TERMS_HEADER, rows)
        counters = {"sectors": len(sector_docs), "terms": len(rows)}
        return [terms_csv], counters

    return _stage_runner(cfg, "terms", inputs, body)


# -- dataset -----------------------------------------------------------------


def stage_dataset(cfg: PipelineConfig) -> RunManifest:
    documents = _corpus_documents(cfg)
    lexicon_path = _require_file(
        cfg.category_lexicon,
        "dataset stage needs [prepare] category_lexicon (term,category CSV)",
    )
    input_paths = list(documents.values()) + [lexicon_path]
    if cfg.registry is not None:
        input_paths.append(cfg.registry)
    inputs = digest_map(input_paths, cfg.output_root)

    def body(tracker):
        entries = _load_entries(cfg)
        lexicon = dataset_mod.load_category_lexicon(lexicon_path)
        company_names = {entry.name for entry in entries} | {
            entry.domain for entry in entries
        }
        warnings: dict[str, int] = {}
        examples: list[dataset_mod.ContextExample] = []
        for domain in sorted(documents):
            lines = documents[domain].read_text(encoding="utf-8").splitlines()
            for lineno, line in enumerate(lines, start=1):
                if not line.strip():
                    continue
                examples.extend(
                    dataset_mod.build_examples(
                        f"{domain}:{lineno}", line, lexicon,
                        mode=cfg.dataset_mode, width=cfg.token_width,
                        warnings=warnings,
                    )
                )
        rows = dataset_mod.rows_from_examples(examples, company_names)
        for row in rows:
            leak = dataset_mod.scrub_leak(row.sentence_anonymized)
            if leak is not None:
                raise PrismeError(f"unscrubbed {leak} in row for {row.source}")
        dataset_csv = tracker.add(
            cfg.dataset_out or cfg.output_root / "dataset" / "dataset.csv"
        )
        dataset_mod.emit_dataset(rows, dataset_csv)
        counters = {
            "examples": len(rows),
            "documents": len(documents),
            "unknown_terms": sum(warnings.values()),
        }
        return [dataset_csv], counters

    return _stage_runner(cfg, "dataset", inputs, body)


# -- vectorize ---------------------------------------------------------------


def stage_vectorize(cfg: PipelineConfig) -> RunManifest:
    dataset_csv = cfg.dataset_in or cfg.output_root / "dataset" / "dataset.csv"
    if not dataset_csv.is_file():
        raise ValidationError(
            f"vectorize needs {dataset_csv} - run the dataset stage first"
        )
    inputs = digest_map([dataset_csv], cfg.output_root)

    def body(tracker):
        if not cfg.vectorize_command:
            raise ValidationError(
                "vectorize is delegated to an external tool; set [vectorize] command "
                "to a template like: node frontend/dist/cli.js --dataset {dataset} "
                "--out {out} --pca-max {pca_max} --umap-dims {umap_dims} "
                "--seed {seed} --backend {backend}"
            )
        out_dir = cfg.output_root / "vectors"
        out_dir.mkdir(parents=True, exist_ok=True)
        expected = [
            out_dir / "sentence_embeddings_pca_128.npy",
            out_dir / "sentence_embeddings_umap_64.npy",
            out_dir / "metadata.csv",
        ]
        # stale files from an earlier run must not pass for this run's work
        for path in expected:
            path.unlink(missing_ok=True)
        argv = [
            part.format(
                dataset=dataset_csv, out=out_dir, pca_max=cfg.pca_max,
                umap_dims=cfg.umap_dims, seed=cfg.vector_seed,
                backend=cfg.vector_backend,
            )
            for part in shlex.split(cfg.vectorize_command)
        ]
        proc = subprocess.run(argv, capture_output=True, text=True)
        if proc.returncode != 0:
            raise PrismeError(
                f"vectorize command failed ({proc.returncode}): {proc.stderr.strip()}"
            )
        missing = [str(path) for path in expected if not path.is_file()]
        if missing:
            raise PrismeError(f"vectorize command left outputs missing: {missing}")
        outputs = [tracker.add(path) for path in expected]
        counters = {"command": argv[0]}
        return outputs, counters

    return _stage_runner(cfg, "vectorize", inputs, body)


# -- report ------------------------------------------------------------------


def report_rows(cfg: PipelineConfig) -> list[list[str]]:
    corpus_csv = cfg.output_root / "corpus" / "corpus.csv"
    if not corpus_csv.is_file():
        raise ValidationError(f"report needs {corpus_csv} - run the structure stage first")
    records = store.parse_corpus_csv(corpus_csv)
    by_lang: dict[str, dict[str, object]] = {}
    for record in records:
        bucket = by_lang.setdefault(
            record.lang, {"urls": {}, "sectors": set()}
        )
        bucket["urls"][record.url] = record.token_count
        bucket["sectors"].add(record.sector)
    rows = []
    for lang, bucket in by_lang.items():
        rows.append([
            lang,
            str(len(bucket["urls"])),
            str(len(bucket["sectors"])),
            str(sum(bucket["urls"].values())),
        ])
    rows.sort(key=lambda row: (-int(row[1]), row[0]))
    return rows


def render_report(rows: list[list[str]]) -> str:
    labels = ["Language", "URL count", "Sectors covered", "Token count"]
    table = [labels] + rows
    widths = [max(len(row[i]) for row in table) for i in range(len(labels))]
    lines = []
    for index, row in enumerate(table):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if index == 0:
            lines.append("  ".join("-" * widths[i] for i in range(len(labels))))
    return "\n".join(lines)


def stage_report(cfg: PipelineConfig) -> RunManifest:
    corpus_csv = cfg.output_root / "corpus" / "corpus.csv"
    rows = report_rows(cfg)
    inputs = digest_map([corpus_csv], cfg.output_root)

    def body(tracker):
        stats_csv = tracker.add(cfg.output_root / "report" / "stats.csv")
        write_rows_atomic(stats_csv, REPORT_HEADER, rows)
        counters = {"languages": len(rows)}
        return [stats_csv], counters

    return _stage_runner(cfg, "report", inputs, body)


STAGES = {
    "prepare": stage_prepare,
    "crawl": stage_crawl,
    "harvest-pdf": stage_harvest,
    "structure": stage_structure,
    "terms": stage_terms,
    "dataset": stage_dataset,
    "vectorize": stage_vectorize,
    "report": stage_report,
}


def run_stage(cfg: PipelineConfig, stage: str) -> RunManifest:
    if stage not in STAGES:
        raise ValidationError(f"unknown stage {stage!r}; choose from {', '.join(STAGE_NAMES)}")
    return STAGES[stage](cfg)
