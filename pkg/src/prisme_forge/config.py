"""Pipeline configuration: one INI-style file, flat sections per stage.

Paths are resolved relative to the config file's directory. The config
hash covers the parsed, canonicalized content, so formatting changes do
not invalidate previous runs but any value change does.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigurationError, ValidationError

ACCENT_MODES = ("fold", "strip", "keep")
DATASET_MODES = ("sentence5", "token500")


@dataclass
class PipelineConfig:
    """Resolved settings for every stage; unset paths mean shipped defaults."""

    config_dir: Path = field(default_factory=Path.cwd)
    output_root: Path = Path("out")
    run_date: str = ""  # YYYY-MM-DD stamped on records; empty = today
    accent_mode: str = "fold"

    registry: Path | None = None
    sectors_path: Path | None = None
    keywords_path: Path | None = None
    targets_path: Path | None = None
    category_lexicon: Path | None = None

    crawl_delay: float = 0.1
    crawl_max_pages: int = 100
    min_pages_per_domain: int = 1
    filters_path: Path | None = None
    seed_scheme: str = "https"
    fetcher_spec: str = "http"

    urls_path: Path | None = None
    search_endpoint: str = ""
    converter_command: str = ""
    min_year: int = 2017
    min_tokens_report: int = 1000
    blocked_hosts_path: Path | None = None

    min_tokens_page: int = 30
    snippet_window: int = 50
    profiles_dir: Path | None = None
    lang_threshold: float = 0.5

    corpus_dir: Path | None = None  # overrides <output_root>/corpus as terms/dataset input

    top_k: int = 50
    tfidf_quantile: float = 0.95
    sectors_filter: str = ""  # comma list; empty = every sector in the registry
    terms_out: Path | None = None

    dataset_mode: str = "sentence5"
    token_width: int = 500
    dataset_out: Path | None = None

    dataset_in: Path | None = None  # vectorize input override

    vectorize_command: str = ""
    pca_max: int = 128
    umap_dims: int = 64
    vector_seed: int = 42
    vector_backend: str = "stub"

    def validate(self) -> None:
        if self.accent_mode not in ACCENT_MODES:
            raise ValidationError(f"accent_mode must be one of {ACCENT_MODES}")
        if self.dataset_mode not in DATASET_MODES:
            raise ValidationError(f"dataset mode must be one of {DATASET_MODES}")
        positive = {
            "crawl_max_pages": self.crawl_max_pages,
            "min_pages_per_domain": self.min_pages_per_domain,
            "min_tokens_report": self.min_tokens_report,
            "min_tokens_page": self.min_tokens_page,
            "top_k": self.top_k,
            "pca_max": self.pca_max,
            "umap_dims": self.umap_dims,
        }
        for name, value in positive.items():
            if value < 1:
                raise ValidationError(f"{name} must be >= 1, got {value}")
        if self.crawl_delay < 0:
            raise ValidationError("crawl delay must be >= 0")
        if self.snippet_window < 0 or self.token_width < 0:
            raise ValidationError("window sizes must be >= 0")
        if not 0.0 <= self.lang_threshold <= 1.0:
            raise ValidationError("lang_threshold must be in [0, 1]")
        if not 0.0 <= self.tfidf_quantile <= 1.0:
            raise ValidationError("tfidf_quantile must be in [0, 1]")
        for name in (
            "registry", "sectors_path", "keywords_path", "targets_path",
            "category_lexicon", "filters_path", "urls_path",
            "blocked_hosts_path", "profiles_dir", "corpus_dir", "dataset_in",
        ):
            value: Path | None = getattr(self, name)
            if value is not None and not value.exists():
                raise ValidationError(f"{name} does not exist: {value}")

    def config_hash(self) -> str:
        lines = []
        for spec in fields(self):
            value = getattr(self, spec.name)
            if spec.name == "config_dir":
                continue
            lines.append(f"{spec.name}={value}")
        digest = hashlib.sha256("\n".join(sorted(lines)).encode("utf-8"))
        return digest.hexdigest()


_SCHEMA: dict[tuple[str, str], tuple[str, str]] = {
    # (section, key) -> (attribute, kind)
    ("pipeline", "output_root"): ("output_root", "path"),
    ("pipeline", "run_date"): ("run_date", "str"),
    ("pipeline", "accent_mode"): ("accent_mode", "str"),
    ("prepare", "registry"): ("registry", "path"),
    ("prepare", "sectors"): ("sectors_path", "path"),
    ("prepare", "keywords"): ("keywords_path", "path"),
    ("prepare", "targets"): ("targets_path", "path"),
    ("prepare", "category_lexicon"): ("category_lexicon", "path"),
    ("crawl", "delay_ms"): ("crawl_delay", "ms"),
    ("crawl", "max_pages"): ("crawl_max_pages", "int"),
    ("crawl", "min_pages_per_domain"): ("min_pages_per_domain", "int"),
    ("crawl", "filters"): ("filters_path", "path"),
    ("crawl", "seed_scheme"): ("seed_scheme", "str"),
    ("crawl", "fetcher"): ("fetcher_spec", "str"),
    ("harvest", "urls"): ("urls_path", "path"),
    ("harvest", "search_endpoint"): ("search_endpoint", "str"),
    ("harvest", "converter"): ("converter_command", "str"),
    ("harvest", "min_year"): ("min_year", "int"),
    ("harvest", "min_tokens"): ("min_tokens_report", "int"),
    ("harvest", "blocked_hosts"): ("blocked_hosts_path", "path"),
    ("structure", "min_tokens_page"): ("min_tokens_page", "int"),
    ("structure", "window"): ("snippet_window", "int"),
    ("structure", "profiles"): ("profiles_dir", "path"),
    ("structure", "lang_threshold"): ("lang_threshold", "float"),
    ("pipeline", "corpus_dir"): ("corpus_dir", "path"),
    ("terms", "top_k"): ("top_k", "int"),
    ("terms", "tfidf_quantile"): ("tfidf_quantile", "float"),
    ("terms", "sectors"): ("sectors_filter", "str"),
    ("terms", "out"): ("terms_out", "path"),
    ("dataset", "mode"): ("dataset_mode", "str"),
    ("dataset", "token_width"): ("token_width", "int"),
    ("dataset", "out"): ("dataset_out", "path"),
    ("vectorize", "dataset"): ("dataset_in", "path"),
    ("vectorize", "command"): ("vectorize_command", "str"),
    ("vectorize", "pca_max"): ("pca_max", "int"),
    ("vectorize", "umap_dims"): ("umap_dims", "int"),
    ("vectorize", "seed"): ("vector_seed", "int"),
    ("vectorize", "backend"): ("vector_backend", "str"),
}


def apply_setting(
    cfg: PipelineConfig, section: str, key: str, value: str, base_dir: Path
) -> None:
    """Set one `[section] key = value` pair on cfg, with path resolution."""
    spec = _SCHEMA.get((section, key))
    if spec is None:
        raise ConfigurationError(f"unknown setting [{section}] {key}")
    attribute, kind = spec
    value = value.strip()
    if not value:
        return
    try:
        if kind == "path":
            setattr(cfg, attribute, (base_dir / value).resolve())
        elif kind == "int":
            setattr(cfg, attribute, int(value))
        elif kind == "float":
            setattr(cfg, attribute, float(value))
        elif kind == "ms":
            setattr(cfg, attribute, int(value) / 1000.0)
        else:
            setattr(cfg, attribute, value)
    except ValueError as exc:
        raise ConfigurationError(f"[{section}] {key}: {exc}") from exc


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc

    cfg = PipelineConfig(config_dir=path.parent.resolve())
    for section in parser.sections():
        for key, value in parser.items(section):
            try:
                apply_setting(cfg, section, key, value, cfg.config_dir)
            except ConfigurationError as exc:
                raise ConfigurationError(f"{path}: {exc}") from exc
    # output_root resolves against the config location too
    if not cfg.output_root.is_absolute():
        cfg.output_root = (cfg.config_dir / cfg.output_root).resolve()
    cfg.validate()
    return cfg
