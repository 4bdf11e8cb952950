from __future__ import annotations

import csv
from datetime import date
from pathlib import Path
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prisme_forge.errors import ConfigurationError, ValidationError
from prisme_forge.harvest import (
    MANIFEST_HEADER,
    STATUS_ACCEPTED,
    STATUS_REJECTED,
    ReportDoc,
    SearchApiBackend,
    UrlListBackend,
    apply_report_filters,
    build_search_query,
    dedupe_reports,
    extract_report_year,
    filename_of,
    filter_candidate_url,
    first_page,
    load_blocked_hosts,
    write_harvest_manifest,
)

BLOCKED = ("linkedin.com", "facebook.com", "amazon.com")


class TestSearchQuery:
    def test_exact_shape(self):
        assert (
            build_search_query("Acme Corp", "acme.example")
            == 'Acme Corp intext:"Annual Report" AND inurl:acme.example'
        )

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            build_search_query("", "acme.example")
        with pytest.raises(ValueError):
            build_search_query("Acme", "")


class TestCandidateFilter:
    def test_pdf_on_plain_host_passes(self):
        assert filter_candidate_url("https://acme.example/r/2020.pdf", BLOCKED) is None

    @pytest.mark.parametrize("url", [
        "https://acme.example/report.docx",
        "https://acme.example/report.doc",
        "https://acme.example/report",
        "https://acme.example/report.pdf.html",
    ])
    def test_non_pdf_is_format(self, url):
        assert filter_candidate_url(url, BLOCKED) == "format"

    def test_blocked_host_and_subdomains(self):
        assert filter_candidate_url("https://linkedin.com/x.pdf", BLOCKED) == "host"
        assert filter_candidate_url("https://www.linkedin.com/x.pdf", BLOCKED) == "host"
        assert filter_candidate_url("https://notlinkedin.com/x.pdf", BLOCKED) is None

    def test_format_checked_before_host(self):
        # a blocked host serving a non-pdf is still a format rejection
        assert filter_candidate_url("https://linkedin.com/profile", BLOCKED) == "format"

    def test_host_match_ignores_port_and_case(self):
        assert filter_candidate_url("https://LinkedIn.com:8443/x.pdf", BLOCKED) == "host"

    def test_default_blocklist_loads(self):
        hosts = load_blocked_hosts()
        assert hosts and all(host == host.lower() for host in hosts)


class TestReportYear:
    def test_largest_year_in_filename(self):
        assert extract_report_year("annual-report-2019-2021.pdf", "") == 2021

    def test_filename_beats_body(self):
        assert extract_report_year("report-2018.pdf", "2022 2022 2022") == 2018

    def test_most_frequent_in_body(self):
        assert extract_report_year("report.pdf", "2019 2020 2020 2019 2020") == 2020

    def test_body_tie_takes_more_recent(self):
        assert extract_report_year("report.pdf", "2019 2021 2021 2019") == 2021

    def test_no_year_anywhere(self):
        assert extract_report_year("report.pdf", "no year here") is None

    def test_long_digit_runs_ignored(self):
        assert extract_report_year("doc-120190.pdf", "ISBN 9782019001234") is None

    def test_implausible_years_ignored(self):
        assert extract_report_year("report-1850.pdf", "copyright 2099") is None


class TestReportFilters:
    def doc(self, **kw) -> ReportDoc:
        base = dict(company="A", domain="a.example", url="https://a.example/r.pdf",
                    year=2020, token_count=2000)
        base.update(kw)
        return ReportDoc(**base)

    def test_accept(self):
        out = apply_report_filters(self.doc())
        assert out.status == STATUS_ACCEPTED and out.reason == ""

    def test_year_boundary(self):
        assert apply_report_filters(self.doc(year=2017)).status == STATUS_ACCEPTED
        assert apply_report_filters(self.doc(year=2016)).reason == "year"
        assert apply_report_filters(self.doc(year=None)).reason == "year"

    def test_token_boundary(self):
        assert apply_report_filters(self.doc(token_count=1000)).status == STATUS_ACCEPTED
        assert apply_report_filters(self.doc(token_count=999)).reason == "too_short"

    def test_year_checked_before_tokens(self):
        assert apply_report_filters(self.doc(year=2000, token_count=1)).reason == "year"

    def test_custom_thresholds(self):
        out = apply_report_filters(self.doc(year=2015, token_count=50),
                                   min_year=2015, min_tokens=50)
        assert out.status == STATUS_ACCEPTED


def load_candidates(path: Path) -> list[ReportDoc]:
    docs = []
    with path.open(encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            docs.append(ReportDoc(
                company=row["company"],
                domain=row["domain"],
                url=row["url"],
                year=int(row["year"]) if row["year"] else None,
                token_count=int(row["token_count"]),
                published_date=(
                    date.fromisoformat(row["published_date"])
                    if row["published_date"] else None
                ),
            ))
    return docs


class TestDedupe:
    def test_twelve_candidate_fixture(self, fixtures_dir):
        docs = load_candidates(fixtures_dir / "reports" / "candidates.csv")
        assert len(docs) == 12
        filtered = [apply_report_filters(doc) for doc in docs]
        rejected = {d.url.rsplit("/", 1)[-1]: d.reason
                    for d in filtered if d.status == STATUS_REJECTED}
        assert rejected == {
            "2016.pdf": "year",
            "2021-small.pdf": "too_short",
            "2017.pdf": "too_short",   # bravo's 999-token report
            "2022.pdf": "year",        # charlie's report with no detectable year
        }
        kept = dedupe_reports([d for d in filtered if d.status == STATUS_ACCEPTED])
        expected = (fixtures_dir / "reports" / "expected_kept.txt").read_text(
            encoding="utf-8"
        ).split()
        assert [doc.url for doc in kept] == expected

    def test_idempotent_and_order_insensitive(self, fixtures_dir):
        docs = load_candidates(fixtures_dir / "reports" / "candidates.csv")
        accepted = [d for d in (apply_report_filters(doc) for doc in docs)
                    if d.status == STATUS_ACCEPTED]
        kept = dedupe_reports(accepted)
        assert dedupe_reports(kept) == kept
        shuffled = accepted[:]
        Random(7).shuffle(shuffled)
        assert dedupe_reports(shuffled) == kept

    def test_later_date_wins(self):
        a = ReportDoc("A", "a.example", "https://a.example/1.pdf", year=2020,
                      published_date=date(2020, 1, 1))
        b = ReportDoc("A", "a.example", "https://a.example/2.pdf", year=2020,
                      published_date=date(2020, 6, 1))
        assert dedupe_reports([a, b]) == [b]
        assert dedupe_reports([b, a]) == [b]

    def test_date_tie_smaller_url_wins(self):
        a = ReportDoc("A", "a.example", "https://a.example/b.pdf", year=2020)
        b = ReportDoc("A", "a.example", "https://a.example/a.pdf", year=2020)
        assert dedupe_reports([a, b])[0].url.endswith("/a.pdf")

    def test_missing_date_loses_to_any_date(self):
        dated = ReportDoc("A", "a.example", "https://a.example/z.pdf", year=2020,
                          published_date=date(2018, 1, 1))
        undated = ReportDoc("A", "a.example", "https://a.example/a.pdf", year=2020)
        assert dedupe_reports([undated, dated]) == [dated]

    def test_output_sorted_by_company_then_year(self):
        docs = [
            ReportDoc("B", "b.example", "https://b.example/1.pdf", year=2019),
            ReportDoc("A", "a.example", "https://a.example/1.pdf", year=2021),
            ReportDoc("A", "a.example", "https://a.example/2.pdf", year=2018),
        ]
        kept = dedupe_reports(docs)
        assert [(d.company, d.year) for d in kept] == [("A", 2018), ("A", 2021), ("B", 2019)]

    @given(st.lists(st.builds(
        ReportDoc,
        company=st.sampled_from(["A", "B"]),
        domain=st.just("x.example"),
        url=st.sampled_from([f"https://x.example/{i}.pdf" for i in range(6)]),
        year=st.sampled_from([2018, 2019, None]),
        published_date=st.one_of(st.none(), st.dates(date(2018, 1, 1), date(2022, 1, 1))),
    ), max_size=12))
    @settings(max_examples=60, deadline=None)
    def test_one_survivor_per_company_year(self, docs):
        kept = dedupe_reports(docs)
        keys = [(d.company, d.year) for d in kept]
        assert len(keys) == len(set(keys))
        assert keys == sorted(keys, key=lambda k: (k[0], k[1] if k[1] is not None else -1))
        assert dedupe_reports(kept) == kept


class TestBackends:
    def test_url_list_backend(self, tmp_path):
        path = tmp_path / "urls.csv"
        path.write_text(
            "company,url\nAcme,https://a.example/1.pdf\nAcme,https://a.example/2.pdf\n"
            "Bravo,https://b.example/1.pdf\n,,\n",
            encoding="utf-8",
        )
        backend = UrlListBackend(path)
        assert backend.candidate_urls("Acme", "a.example") == [
            "https://a.example/1.pdf", "https://a.example/2.pdf",
        ]
        assert backend.candidate_urls("Missing", "m.example") == []

    def test_url_list_backend_header_enforced(self, tmp_path):
        path = tmp_path / "urls.csv"
        path.write_text("company,link\nAcme,https://a.example/1.pdf\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            UrlListBackend(path)

    def test_search_backend_requires_placeholder(self):
        with pytest.raises(ConfigurationError):
            SearchApiBackend("https://search.example/api", fetcher=None)

    def test_search_backend_quotes_query(self):
        calls = []

        class _Fetcher:
            def fetch(self, url):
                calls.append(url)

                class R:
                    ok = True
                    text = "https://a.example/1.pdf\n\nhttps://a.example/2.pdf\n"

                return R()

        backend = SearchApiBackend("https://search.example/api?q={query}", _Fetcher())
        urls = backend.candidate_urls("Acme Corp", "acme.example")
        assert urls == ["https://a.example/1.pdf", "https://a.example/2.pdf"]
        assert "%22Annual%20Report%22" in calls[0]
        assert " " not in calls[0]


class TestTextHelpers:
    def test_first_page_stops_at_form_feed(self):
        assert first_page("page one\ftwo\fthree") == "page one"

    def test_first_page_fallback_without_form_feed(self):
        text = "x" * 5000
        assert first_page(text) == "x" * 2000

    def test_filename_of_unquotes(self):
        assert filename_of("https://a.example/docs/Rapport%20Annuel%202020.pdf") == (
            "Rapport Annuel 2020.pdf"
        )

    def test_filename_of_bare_root(self):
        assert filename_of("https://a.example/") == ""


class TestManifest:
    def test_paths_relativized_against_base(self, tmp_path):
        doc = ReportDoc(
            "A", "a.example", "https://a.example/r2020.pdf",
            local_path=str(tmp_path / "run" / "harvest" / "pdfs" / "a.example" / "r2020.pdf"),
            year=2020, token_count=1500, status=STATUS_ACCEPTED,
        )
        out = tmp_path / "reports.csv"
        write_harvest_manifest([doc], out, base=tmp_path / "run")
        rows = list(csv.reader(out.read_text(encoding="utf-8").splitlines()))
        assert rows[0] == MANIFEST_HEADER
        assert rows[1][-1] == "harvest/pdfs/a.example/r2020.pdf"

    def test_paths_outside_base_left_alone(self, tmp_path):
        doc = ReportDoc("A", "a.example", "https://a.example/r.pdf",
                        local_path="/elsewhere/r.pdf", year=2020, token_count=1500)
        out = tmp_path / "reports.csv"
        write_harvest_manifest([doc], out, base=tmp_path / "run")
        rows = list(csv.reader(out.read_text(encoding="utf-8").splitlines()))
        assert rows[1][-1] == "/elsewhere/r.pdf"

    def test_none_year_serialized_empty(self, tmp_path):
        doc = ReportDoc("A", "a.example", "https://a.example/r.pdf",
                        status=STATUS_REJECTED, reason="year")
        out = tmp_path / "reports.csv"
        write_harvest_manifest([doc], out)
        rows = list(csv.reader(out.read_text(encoding="utf-8").splitlines()))
        assert rows[1][3] == "" and rows[1][6] == "year"
