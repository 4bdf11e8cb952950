"""Command-line entry point: one subcommand per pipeline stage.

    prisme-forge <stage> --config pipeline.ini [overrides]

Overrides come in two flavours: typed per-stage flags (the common knobs)
and the generic --set section.key=value escape hatch. Exit codes: 0 on
success, 2 when inputs or settings are invalid, 1 on runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import PipelineConfig, apply_setting, load_config
from .errors import ConfigurationError, PrismeError, ValidationError
from .manifest import STATUS_SKIPPED
from .stages import render_report, report_rows, run_stage

# flag dest -> (config attribute, treat value as path)
_FLAG_MAP = {
    "registry": ("registry", True),
    "sectors_file": ("sectors_path", True),
    "keywords": ("keywords_path", True),
    "targets": ("targets_path", True),
    "category_lexicon": ("category_lexicon", True),
    "lexicon": ("category_lexicon", True),
    "out_dir": ("output_root", True),
    "run_date": ("run_date", False),
    "delay_ms": ("crawl_delay", False),
    "max_pages": ("crawl_max_pages", False),
    "min_pages": ("min_pages_per_domain", False),
    "filters": ("filters_path", True),
    "fetcher": ("fetcher_spec", False),
    "seed_scheme": ("seed_scheme", False),
    "urls": ("urls_path", True),
    "min_year": ("min_year", False),
    "min_tokens": ("min_tokens_report", False),
    "blocked_hosts": ("blocked_hosts_path", True),
    "converter": ("converter_command", False),
    "min_tokens_page": ("min_tokens_page", False),
    "window": ("snippet_window", False),
    "profiles": ("profiles_dir", True),
    "lang_threshold": ("lang_threshold", False),
    "corpus": ("corpus_dir", True),
    "sectors": ("sectors_filter", False),
    "top_k": ("top_k", False),
    "tfidf_quantile": ("tfidf_quantile", False),
    "terms_out": ("terms_out", True),
    "mode": ("dataset_mode", False),
    "width": ("token_width", False),
    "dataset_out": ("dataset_out", True),
    "dataset": ("dataset_in", True),
    "command": ("vectorize_command", False),
    "pca_max": ("pca_max", False),
    "umap_dims": ("umap_dims", False),
    "seed": ("vector_seed", False),
    "backend": ("vector_backend", False),
}


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="FILE", help="pipeline INI file")
    sub.add_argument(
        "--set", dest="overrides", action="append", default=[],
        metavar="SECTION.KEY=VALUE", help="override any config setting",
    )
    sub.add_argument("--out-dir", metavar="DIR", help="output root (default: out)")
    sub.add_argument("--run-date", metavar="YYYY-MM-DD", help="date stamped on records")
    sub.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prisme-forge",
        description="Build multilingual keyword-in-context corpora from company sites.",
    )
    subs = parser.add_subparsers(dest="stage", required=True, metavar="stage")

    sub = subs.add_parser("prepare", help="validate registry and lexicons")
    _add_common(sub)
    sub.add_argument("--registry", metavar="CSV")
    sub.add_argument("--sectors-file", metavar="FILE", help="allowed sector labels")
    sub.add_argument("--keywords", metavar="TSV", help="keyword variant lexicon")
    sub.add_argument("--targets", metavar="FILE", help="target words for term mining")
    sub.add_argument("--category-lexicon", metavar="CSV", help="term,category mapping")

    sub = subs.add_parser("crawl", help="polite same-domain crawl of registry sites")
    _add_common(sub)
    sub.add_argument("--registry", metavar="CSV")
    sub.add_argument("--delay-ms", metavar="N", help="per-domain politeness delay")
    sub.add_argument("--max-pages", metavar="N", help="page budget per domain")
    sub.add_argument("--min-pages", metavar="N", help="inclusion threshold")
    sub.add_argument("--filters", metavar="FILE", help="url exclusion patterns")
    sub.add_argument("--fetcher", metavar="SPEC", help="http or directory:<root>")
    sub.add_argument("--seed-scheme", metavar="SCHEME", help="https (default) or http")

    sub = subs.add_parser("harvest-pdf", help="collect and filter annual-report PDFs")
    _add_common(sub)
    sub.add_argument("--registry", metavar="CSV")
    sub.add_argument("--urls", metavar="CSV", help="candidate url list (company,url)")
    sub.add_argument("--min-year", metavar="N", help="oldest accepted report year")
    sub.add_argument("--min-tokens", metavar="N", help="minimum tokens per report")
    sub.add_argument("--blocked-hosts", metavar="FILE")
    sub.add_argument("--converter", metavar="CMD", help="pdf-to-text command")
    sub.add_argument("--fetcher", metavar="SPEC", help="http or directory:<root>")

    sub = subs.add_parser("structure", help="extract, language-check, and snippet pages")
    _add_common(sub)
    sub.add_argument("--registry", metavar="CSV")
    sub.add_argument("--keywords", metavar="TSV")
    sub.add_argument("--min-tokens-page", metavar="N")
    sub.add_argument("--window", metavar="N", help="snippet context tokens per side")
    sub.add_argument("--profiles", metavar="DIR", help="language profile directory")
    sub.add_argument("--lang-threshold", metavar="X", help="detector confidence floor")
    sub.add_argument("--min-pages", metavar="N", help="domain inclusion threshold")

    sub = subs.add_parser("terms", help="sector term extraction (n-grams + tf-idf)")
    _add_common(sub)
    sub.add_argument("--registry", metavar="CSV")
    sub.add_argument("--corpus", metavar="DIR", help="corpus text directory")
    sub.add_argument("--sectors", metavar="LIST", help="comma-separated sector labels")
    sub.add_argument("--targets", metavar="FILE")
    sub.add_argument("--top-k", metavar="N")
    sub.add_argument("--tfidf-quantile", metavar="X")
    sub.add_argument("--out", dest="terms_out", metavar="CSV", help="terms CSV path")

    sub = subs.add_parser("dataset", help="cut context blocks into a training CSV")
    _add_common(sub)
    sub.add_argument("--registry", metavar="CSV")
    sub.add_argument("--corpus", metavar="DIR", help="corpus text directory")
    sub.add_argument("--lexicon", metavar="CSV", help="term,category mapping")
    sub.add_argument("--mode", choices=["sentence5", "token500"])
    sub.add_argument("--width", metavar="N", help="token window half-width")
    sub.add_argument("--out", dest="dataset_out", metavar="CSV", help="dataset CSV path")

    sub = subs.add_parser("vectorize", help="run the embedding tool on the dataset")
    _add_common(sub)
    sub.add_argument("--dataset", metavar="CSV", help="dataset CSV to embed")
    sub.add_argument("--command", metavar="CMD", help="external vectorizer template")
    sub.add_argument("--pca-max", metavar="N")
    sub.add_argument("--umap-dims", metavar="N")
    sub.add_argument("--seed", metavar="N")
    sub.add_argument("--backend", metavar="NAME", help="default or stub")

    sub = subs.add_parser("report", help="corpus statistics per language")
    _add_common(sub)

    return parser


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    invocation_dir = Path.cwd()
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = PipelineConfig(config_dir=invocation_dir)

    for pair in args.overrides:
        if "=" not in pair or "." not in pair.split("=", 1)[0]:
            raise ConfigurationError(f"--set expects section.key=value, got {pair!r}")
        target, value = pair.split("=", 1)
        section, key = target.split(".", 1)
        apply_setting(cfg, section.strip(), key.strip(), value, invocation_dir)

    for dest, (attribute, is_path) in _FLAG_MAP.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        if is_path:
            setattr(cfg, attribute, (invocation_dir / value).resolve())
        else:
            current = getattr(cfg, attribute)
            try:
                if dest == "delay_ms":
                    setattr(cfg, attribute, int(value) / 1000.0)
                elif isinstance(current, int) and not isinstance(current, bool):
                    setattr(cfg, attribute, int(value))
                elif isinstance(current, float):
                    setattr(cfg, attribute, float(value))
                else:
                    setattr(cfg, attribute, value)
            except ValueError as exc:
                raise ConfigurationError(f"--{dest.replace('_', '-')}: {exc}") from exc

    if not cfg.output_root.is_absolute():
        cfg.output_root = (invocation_dir / cfg.output_root).resolve()
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _config_from_args(args)
        manifest = run_stage(cfg, args.stage)
    except (ValidationError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PrismeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if manifest.status == STATUS_SKIPPED:
        print(f"{args.stage}: skipped (inputs unchanged)")
    else:
        print(f"{args.stage}: ok ({len(manifest.outputs)} output files)")
    if args.stage == "report":
        print(render_report(report_rows(cfg)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
