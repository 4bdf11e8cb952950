from __future__ import annotations

from pathlib import Path

import pytest

from prisme_forge.cli import main
from prisme_forge.config import PipelineConfig
from prisme_forge.errors import ValidationError
from prisme_forge.manifest import STATUS_OK, STATUS_SKIPPED, load_manifest
from prisme_forge.stages import (
    _stage_runner,
    domain_inclusion_filter,
    render_report,
    run_stage,
)

PIPELINE = Path(__file__).parent / "fixtures" / "pipeline"
INI = str(PIPELINE / "pipeline.ini")

RUN_STAGES = ["prepare", "crawl", "harvest-pdf", "structure", "terms", "dataset", "report"]

GOLDEN_MAP = {
    "crawl/stats.csv": "crawl_stats.csv",
    "harvest/reports.csv": "harvest_reports.csv",
    "corpus/corpus.csv": "corpus.csv",
    "terms/terms.csv": "terms.csv",
    "dataset/dataset.csv": "dataset.csv",
    "report/stats.csv": "report_stats.csv",
}


def run_pipeline(out_dir: Path) -> None:
    for stage in RUN_STAGES:
        code = main([stage, "--config", INI, "--out-dir", str(out_dir)])
        assert code == 0, f"stage {stage} failed"


@pytest.fixture(scope="module")
def pipeline_out(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("pipeline-run")
    run_pipeline(out)
    return out


class TestPipelineGoldens:
    @pytest.mark.parametrize("produced,golden", sorted(GOLDEN_MAP.items()))
    def test_outputs_match_goldens_byte_for_byte(self, pipeline_out, produced, golden):
        got = (pipeline_out / produced).read_bytes()
        want = (PIPELINE / "golden" / golden).read_bytes()
        assert got == want, f"{produced} diverged from golden/{golden}"

    def test_prepare_echoes_registry(self, pipeline_out):
        lines = (pipeline_out / "prepare" / "registry.csv").read_text(
            encoding="utf-8"
        ).strip().splitlines()
        assert len(lines) == 1 + 3  # header + three companies

    def test_text_export_one_file_per_domain(self, pipeline_out):
        names = sorted(p.name for p in (pipeline_out / "corpus" / "text").glob("*.txt"))
        assert names == ["alpha.test.txt", "beta.test.txt", "gamma.test.txt"]

    def test_disallowed_page_never_fetched(self, pipeline_out):
        # the page exists on disk in the fixture site; robots.txt forbids it
        for page in (pipeline_out / "crawl" / "pages").rglob("*.html"):
            assert "Confidential strategy notes" not in page.read_text(encoding="utf-8")
        index = (pipeline_out / "crawl" / "index.csv").read_text(encoding="utf-8")
        assert "/private/" not in index

    def test_crawl_counts_robots_denial(self, pipeline_out):
        manifest = load_manifest(pipeline_out, "crawl")
        assert manifest.counters["robots_denied"] == 1

    def test_every_stage_wrote_a_manifest(self, pipeline_out):
        for stage in RUN_STAGES:
            manifest = load_manifest(pipeline_out, stage)
            assert manifest is not None and manifest.status == STATUS_OK
            assert manifest.config_hash and manifest.outputs


class TestRestart:
    def test_second_run_skips_every_stage(self, pipeline_out):
        for stage in RUN_STAGES:
            assert main([stage, "--config", INI, "--out-dir", str(pipeline_out)]) == 0
            manifest = load_manifest(pipeline_out, stage)
            assert manifest.status == STATUS_SKIPPED, stage

    def test_fresh_runs_are_byte_identical(self, pipeline_out, tmp_path):
        second = tmp_path / "second"
        run_pipeline(second)

        def data_files(root: Path) -> dict[str, bytes]:
            return {
                str(path.relative_to(root)): path.read_bytes()
                for path in sorted(root.rglob("*"))
                if path.is_file() and "manifests" not in path.parts
            }

        first = data_files(pipeline_out)
        assert first  # sanity: the tree is non-trivial
        assert data_files(second) == first

    def test_config_change_defeats_skip_and_rerun_restores(self, pipeline_out, capsys):
        target = pipeline_out / "corpus" / "corpus.csv"
        golden = (PIPELINE / "golden" / "corpus.csv").read_bytes()
        assert main([
            "structure", "--config", INI, "--out-dir", str(pipeline_out),
            "--run-date", "2026-02-02",
        ]) == 0
        assert "ok" in capsys.readouterr().out
        changed = target.read_bytes()
        assert changed != golden and b"2026-02-02" in changed
        # original settings hash differently than the last manifest: runs again
        assert main(["structure", "--config", INI, "--out-dir", str(pipeline_out)]) == 0
        assert load_manifest(pipeline_out, "structure").status == STATUS_OK
        assert target.read_bytes() == golden


class TestExitCodes:
    def test_missing_corpus_dir_is_validation(self, tmp_path, capsys):
        code = main(["terms", "--config", INI, "--out-dir", str(tmp_path),
                     "--corpus", str(tmp_path / "nowhere")])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_unknown_set_key(self, tmp_path, capsys):
        code = main(["crawl", "--config", INI, "--out-dir", str(tmp_path),
                     "--set", "crawl.warp=9"])
        assert code == 2

    def test_malformed_set_pair(self, tmp_path, capsys):
        code = main(["crawl", "--config", INI, "--out-dir", str(tmp_path),
                     "--set", "nonsense"])
        assert code == 2

    def test_bad_numeric_flag(self, tmp_path, capsys):
        code = main(["crawl", "--config", INI, "--out-dir", str(tmp_path),
                     "--max-pages", "many"])
        assert code == 2

    def test_structure_before_crawl(self, tmp_path, capsys):
        code = main(["structure", "--config", INI, "--out-dir", str(tmp_path)])
        assert code == 2
        assert "crawl" in capsys.readouterr().err

    def test_vectorize_without_command(self, pipeline_out, capsys):
        code = main(["vectorize", "--config", INI, "--out-dir", str(pipeline_out)])
        assert code == 2
        assert "[vectorize] command" in capsys.readouterr().err


FAKE_VECTORIZER = """\
import sys
from pathlib import Path

out = Path(sys.argv[sys.argv.index("--out") + 1])
out.mkdir(parents=True, exist_ok=True)
for name in (
    "sentence_embeddings_pca_128.npy",
    "sentence_embeddings_umap_64.npy",
    "metadata.csv",
):
    (out / name).write_text("stub", encoding="utf-8")
"""


class TestVectorizeDelegation:
    def command(self, tmp_path, script_body: str) -> str:
        script = tmp_path / "vectorizer.py"
        script.write_text(script_body, encoding="utf-8")
        return f"python3 {script} --dataset {{dataset}} --out {{out}} --seed {{seed}}"

    def test_successful_command(self, pipeline_out, tmp_path):
        code = main([
            "vectorize", "--config", INI, "--out-dir", str(pipeline_out),
            "--command", self.command(tmp_path, FAKE_VECTORIZER),
        ])
        assert code == 0
        manifest = load_manifest(pipeline_out, "vectorize")
        assert sorted(manifest.outputs) == [
            "vectors/metadata.csv",
            "vectors/sentence_embeddings_pca_128.npy",
            "vectors/sentence_embeddings_umap_64.npy",
        ]

    def test_failing_command(self, pipeline_out, tmp_path, capsys):
        code = main([
            "vectorize", "--config", INI, "--out-dir", str(pipeline_out),
            "--command", self.command(tmp_path, "import sys; sys.exit(3)"),
        ])
        assert code == 1
        assert "vectorize command failed" in capsys.readouterr().err

    def test_command_leaving_outputs_missing(self, pipeline_out, tmp_path, capsys):
        code = main([
            "vectorize", "--config", INI, "--out-dir", str(pipeline_out),
            "--command", self.command(tmp_path, "pass"),
        ])
        assert code == 1
        assert "missing" in capsys.readouterr().err


class TestInclusionFilter:
    def test_threshold_boundary(self):
        included, excluded = domain_inclusion_filter(
            [("a.example", 999), ("b.example", 1000)], 1000,
        )
        assert included == ["b.example"]
        assert excluded == [("a.example", "below_min_pages")]

    def test_threshold_one_drops_empty_domains(self):
        included, excluded = domain_inclusion_filter(
            [("a.example", 0), ("b.example", 1)], 1,
        )
        assert included == ["b.example"]
        assert excluded == [("a.example", "below_min_pages")]

    def test_order_preserved(self):
        included, _ = domain_inclusion_filter(
            [("c.example", 5), ("a.example", 5)], 1,
        )
        assert included == ["c.example", "a.example"]


class TestReportRendering:
    def test_exact_table(self):
        rows = [
            ["en", "3", "1", "170"],
            ["fr", "2", "1", "99"],
            ["de", "1", "1", "52"],
        ]
        assert render_report(rows) == (
            "Language  URL count  Sectors covered  Token count\n"
            "--------  ---------  ---------------  -----------\n"
            "en        3          1                170\n"
            "fr        2          1                99\n"
            "de        1          1                52"
        )

    def test_cli_prints_table(self, pipeline_out, capsys):
        assert main(["report", "--config", INI, "--out-dir", str(pipeline_out)]) == 0
        out = capsys.readouterr().out
        assert "Language  URL count  Sectors covered  Token count" in out
        assert "en        3" in out

    def test_wide_values_stretch_columns(self):
        rows = [["portuguese-br", "12345", "7", "9999999"]]
        lines = render_report(rows).splitlines()
        assert lines[0].startswith("Language       ")
        assert lines[2].startswith("portuguese-br  12345")


class TestStageRunner:
    def test_unknown_stage_rejected(self, tmp_path):
        cfg = PipelineConfig(output_root=tmp_path)
        with pytest.raises(ValidationError):
            run_stage(cfg, "polish")

    def test_partial_outputs_removed_on_failure(self, tmp_path):
        cfg = PipelineConfig(output_root=tmp_path)

        def body(tracker):
            partial = tracker.add(tmp_path / "stage" / "partial.csv")
            partial.parent.mkdir(parents=True, exist_ok=True)
            partial.write_text("half-written", encoding="utf-8")
            raise RuntimeError("simulated failure")

        with pytest.raises(RuntimeError):
            _stage_runner(cfg, "report", {}, body)
        assert not (tmp_path / "stage" / "partial.csv").exists()
        assert load_manifest(tmp_path, "report") is None

    def test_successful_body_writes_manifest(self, tmp_path):
        cfg = PipelineConfig(output_root=tmp_path)

        def body(tracker):
            out = tracker.add(tmp_path / "stage" / "data.csv")
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text("payload", encoding="utf-8")
            return [out], {"rows": 1}

        manifest = _stage_runner(cfg, "report", {}, body)
        assert manifest.status == STATUS_OK
        assert list(manifest.outputs) == ["stage/data.csv"]
        assert manifest.counters == {"rows": 1}
