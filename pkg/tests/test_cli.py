"""Command-line surface: subcommands, output formats and exit codes."""

import json
from types import SimpleNamespace

import pytest

from medsearch.api import create_platform_app
from medsearch.bench import parse_machine
from medsearch.cli import TOKEN_ENV, build_parser, parse_assignments, run_cli
from medsearch.sites import SiteServer, save_corpus
from medsearch.taxonomy import CATEGORIES

from conftest import IMMUNE, RESPIRATORY, SKIN, USER


@pytest.fixture
def corpus_dir(corpus, tmp_path):
    save_corpus(corpus, tmp_path / "corpus")
    return str(tmp_path / "corpus")


@pytest.fixture
def home(tmp_path, monkeypatch):
    path = tmp_path / "home"
    monkeypatch.setenv("MEDSEARCH_HOME", str(path))
    monkeypatch.delenv(TOKEN_ENV, raising=False)
    return path


def run(capsys, *argv):
    code = run_cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_flags_work_before_and_after_the_subcommand():
    parser = build_parser()
    before = parser.parse_args(["--format", "machine", "--seed", "4", "corpus", "out"])
    after = parser.parse_args(["corpus", "out", "--format", "machine", "--seed", "4"])
    assert (before.format, before.seed) == (after.format, after.seed) == ("machine", 4)


def test_parse_assignments():
    form = parse_assignments(
        ["common_info.city=Kyoto", "preferences.respiratory=0.8", "health_conditions=asthma, gout"]
    )
    assert form == {
        "common_info": {"city": "Kyoto"},
        "preferences": {"respiratory": 0.8},
        "health_conditions": ["asthma", "gout"],
    }
    with pytest.raises(ValueError):
        parse_assignments(["nonsense"])
    with pytest.raises(ValueError):
        parse_assignments(["shoe_size.left=9"])


def test_corpus_command(capsys, home, tmp_path):
    code, out, _ = run(
        capsys, "--seed", "3", "corpus", str(tmp_path / "gen"), "--records-per-site", "4"
    )
    assert code == 0
    assert out.startswith(f"wrote {len(CATEGORIES)} sites, {4 * len(CATEGORIES)} records")
    assert (tmp_path / "gen").is_dir()


def test_user_add_persists(capsys, home):
    code, out, _ = run(capsys, "user-add", USER, "10.0.0.7", "10.0.0.8")
    assert code == 0
    assert out.strip() == f"registered {USER}"
    data = json.loads((home / "users.json").read_text())
    assert data["users"][USER]["allowed_ips"] == ["10.0.0.7", "10.0.0.8"]

    code, _, err = run(capsys, "user-add", USER, "not-an-ip")
    assert code == 2
    assert err.startswith("error:")


def test_missing_corpus_is_a_config_error(capsys, home, tmp_path):
    code, _, err = run(capsys, "--corpus", str(tmp_path / "absent"), "bench", "--query", "fever")
    assert code == 2
    assert "corpus_path does not exist" in err


def test_empty_query_exit_code(capsys, home, corpus_dir, tmp_path):
    code, _, err = run(
        capsys,
        "trace",
        "--corpus",
        corpus_dir,
        "--query",
        "between do on",
        "--out",
        str(tmp_path / "t.jsonl"),
    )
    assert code == 3
    assert err.strip() == "error: empty query after stopword removal"


def test_trace_command(capsys, home, corpus_dir, tmp_path):
    out_file = tmp_path / "t.jsonl"
    code, out, _ = run(
        capsys,
        "--corpus",
        corpus_dir,
        "--topology",
        "mobile",
        "trace",
        "--query",
        "fevr",
        "--out",
        str(out_file),
    )
    assert code == 0
    records = [json.loads(line) for line in out_file.read_text().splitlines()]
    assert out.strip() == f"wrote {len(records)} messages to {out_file}"
    collect = [r for r in records if r["conversation"].endswith("/collect")]
    assert [r["performative"] for r in collect] == ["REQUEST", "INFORM"]


def test_bench_machine_output_parses(capsys, home, corpus_dir):
    code, out, _ = run(
        capsys,
        "--corpus",
        corpus_dir,
        "bench",
        "--query",
        "fevr",
        "--repetitions",
        "2",
        "--format",
        "machine",
    )
    assert code == 0
    records = parse_machine(out)
    assert [r["topology"] for r in records] == ["static", "mobile"]
    assert all(len(r["measured_ms"]) == 2 for r in records)
    assert [r["messages_sent"] for r in records] == [6, 2]


def write_oracle(tmp_path):
    suite = tmp_path / "suite.tsv"
    suite.write_text(f"q1\t{SKIN}\teczema\nq2\t{IMMUNE}\tanemia\nq3\t{RESPIRATORY}\tasthma\n")
    judgments = tmp_path / "judgments.tsv"
    judgments.write_text(
        "q1\tskin-01-r001\t1\nq2\timmune-01-r002\t1\nq3\trespiratory-01-r003\t1\n"
    )
    return str(suite), str(judgments)


def test_eval_on_a_perfect_oracle(capsys, home, corpus_dir, tmp_path):
    suite, judgments = write_oracle(tmp_path)
    code, out, _ = run(
        capsys,
        "--corpus",
        corpus_dir,
        "--format",
        "machine",
        "eval",
        "--suite",
        suite,
        "--judgments",
        judgments,
    )
    assert code == 0
    overall = parse_machine(out)[0]
    assert overall["scope"] == "overall"
    assert overall["f_measure"] == 1.0
    assert overall["queries"] == 3


def test_eval_is_deterministic(capsys, home, corpus_dir, tmp_path):
    argv = ["--corpus", corpus_dir, "--seed", "9", "eval", "--size", "15"]
    first = run(capsys, *argv, "--save", str(tmp_path / "saved"))
    second = run(capsys, *argv)
    assert first[0] == second[0] == 0
    assert first[1] == second[1]
    assert "overall" in first[1]
    assert (tmp_path / "saved" / "suite.tsv").read_text().count("\n") == 15


def test_client_commands_against_a_server(capsys, home, system, sessions):
    sessions.directory.register(USER, ["127.0.0.1"])
    app = SimpleNamespace(system=system, corpus=system.corpus, site_service=system.site_service)
    server = SiteServer(create_platform_app(app), "127.0.0.1", 0).start()
    try:
        base = ["--server", server.base_url]
        code, out, _ = run(capsys, *base, "login", USER)
        assert code == 0
        token = out.strip()

        code, _, _ = run(capsys, *base, "query", "fever")
        assert code == 5

        code, out, _ = run(capsys, *base, "--token", token, "--format", "machine", "query", "fevr")
        assert code == 0
        records = parse_machine(out)
        assert [r["record_id"] for r in records if r["kind"] == "result"] == [
            "respiratory-01-r001",
            "immune-01-r001",
        ]
        assert records[-1]["kind"] == "outcome"

        code, out, _ = run(capsys, *base, "--token", token, "profile", "health_conditions=asthma")
        assert code == 0
        assert "asthma" in out

        code, _, _ = run(capsys, *base, "--token", token, "feedback", "elsewhere-r001")
        assert code == 9

        code, out, _ = run(capsys, *base, "--token", token, "logout")
        assert (code, out.strip()) == (0, "logged out")
    finally:
        server.stop()
