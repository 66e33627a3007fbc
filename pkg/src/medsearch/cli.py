"""
Command-line interface.

One binary with subcommands. ``serve`` hosts the platform; ``login``,
``query``, ``profile`` and ``feedback`` talk to a running server;
``corpus``, ``bench``, ``eval`` and ``trace`` run locally.

Exit codes come from the error hierarchy (see medsearch.errors):
0 ok, 1 unexpected, 2 config or usage, 3 empty query, 4 login rejected,
5 no session, 6 sanitization, 7 transport, 8 parse, 9 unknown result,
10 platform.
"""

import argparse
import logging
import os
import secrets
import sys
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, Optional

from . import __version__
from .api.client import PlatformClient
from .app import MedSearchApp, open_user_directory
from .bench import (
    BenchmarkConfig,
    calibrated_config,
    derive_judgments,
    generate_suite,
    load_judgments,
    load_suite,
    render_benchmarks,
    render_metrics,
    run_benchmark,
    run_suite,
    save_judgments,
    save_suite,
)
from .bench.report import FORMATS, machine_lines, render_table
from .config.settings import TOPOLOGIES, Settings, configure, load_settings
from .errors import ConfigError, MedSearchError
from .personalization.profile import ProfileStore, UserProfile
from .platform import make_scheduler
from .query.dictionary import Dictionary, load_dictionary
from .search.system import SearchResult, SearchSystem
from .search.topologies import TopologyKind
from .security.gate import Credential, SessionManager
from .security.users import UserDirectory
from .sites.corpus import Corpus, generate_corpus, load_corpus, save_corpus

logger = logging.getLogger(__name__)

TOKEN_ENV = "MEDSEARCH_TOKEN"
LOCAL_USER = "local-user"
LOCAL_IP = "127.0.0.1"

RESULT_COLUMNS = ("rank", "record_id", "disease", "score", "sources")


# ============================================================================
# Argument parsing
# ============================================================================


def _common_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """Flags accepted both before and after the subcommand."""

    def default(value: Any) -> Any:
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--config", default=default(None), help="flat key = value config file")
    parser.add_argument("--corpus", default=default(None), help="corpus directory")
    parser.add_argument("--topology", choices=TOPOLOGIES, default=default(None))
    parser.add_argument("--seed", type=int, default=default(None))
    parser.add_argument("--format", choices=FORMATS, default=default("table"))
    parser.add_argument("--repetitions", type=int, default=default(None))
    parser.add_argument("--server", default=default(None), help="base URL of a running server")
    parser.add_argument("--token", default=default(None), help=f"session token (or ${TOKEN_ENV})")
    parser.add_argument("-v", "--verbose", action="store_true", default=default(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medsearch", description="Multi-agent medical information search"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _common_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Any, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _common_flags(p, suppress=True)
        p.set_defaults(handler=handler)
        return p

    command("serve", cmd_serve, "boot the platform and serve the site pages")

    p = command("user-add", cmd_user_add, "register a user and the IPs they may log in from")
    p.add_argument("user_id")
    p.add_argument("ips", nargs="+")

    p = command("login", cmd_login, "open a session and print its token")
    p.add_argument("user_id")
    p.add_argument("--ip", default=None, help="source address to claim")

    command("logout", cmd_logout, "close the session")

    p = command("query", cmd_query, "run a search")
    p.add_argument("text", nargs="+")

    p = command("profile", cmd_profile, "show or change the profile")
    p.add_argument(
        "assignments",
        nargs="*",
        metavar="FIELD=VALUE",
        help="e.g. common_info.city=Kyoto health_conditions=asthma preferences.Allergy=0.8",
    )

    p = command("feedback", cmd_feedback, "rate a delivered result, or click it")
    p.add_argument("record_id")
    p.add_argument("--rating", type=int, choices=(-1, 0, 1), default=None)

    p = command("corpus", cmd_corpus, "generate a synthetic corpus")
    p.add_argument("out", help="output directory")
    p.add_argument("--sites-per-category", type=int, default=1)
    p.add_argument("--records-per-site", type=int, default=20)

    p = command("bench", cmd_bench, "measure static and mobile collection times")
    p.add_argument("--query", required=True)
    p.add_argument(
        "--calibrate", action="store_true", help="solve kappa for the mobile/static target ratio"
    )

    p = command("eval", cmd_eval, "precision, recall and F-measure over a query suite")
    p.add_argument("--suite", default=None, help="suite file; generated from --seed when omitted")
    p.add_argument("--judgments", default=None, help="judgments file; derived when omitted")
    p.add_argument("--size", type=int, default=None, help="size of a generated suite")
    p.add_argument("--save", default=None, help="directory to write the suite and judgments to")

    p = command("trace", cmd_trace, "export the message trace of one search")
    p.add_argument("--query", required=True)
    p.add_argument("--out", required=True, help="JSON lines file")

    return parser


def setup_logging(verbose: bool) -> None:
    """Logs go to stderr so stdout stays parseable."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def resolve_settings(args: argparse.Namespace) -> Settings:
    """Config file first, then command-line overrides."""
    settings = load_settings(args.config)
    if args.corpus is not None:
        settings.corpus_path = args.corpus
    if args.topology is not None:
        settings.topology = args.topology
    if args.seed is not None:
        settings.seed = args.seed
    if args.repetitions is not None:
        settings.repetitions = args.repetitions
    if args.server is not None:
        settings.server_url = args.server
    return configure(settings)


def resolve_token(args: argparse.Namespace) -> Optional[str]:
    return args.token or os.environ.get(TOKEN_ENV) or None


def run_cli(argv: Optional[list[str]] = None) -> int:
    """Parse arguments, run the subcommand and map errors to exit codes."""
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        settings = resolve_settings(args)
        return args.handler(args, settings)
    except MedSearchError as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return ConfigError.exit_code
    except KeyboardInterrupt:
        return 130


# ============================================================================
# Helpers
# ============================================================================


def _client(args: argparse.Namespace, settings: Settings) -> PlatformClient:
    return PlatformClient(settings.resolved_server_url(), token=resolve_token(args))


def _inputs(settings: Settings) -> tuple[Corpus, Dictionary]:
    settings.validate()
    return load_corpus(settings.corpus_path), load_dictionary(settings.dictionary_path or None)


@contextmanager
def local_system(
    settings: Settings,
    corpus: Corpus,
    dictionary: Dictionary,
    topologies: tuple[TopologyKind, ...] = (TopologyKind.STATIC, TopologyKind.MOBILE),
) -> Iterator[tuple[SearchSystem, str]]:
    """
    A deterministic in-process system with one throwaway user and its token.

    Profiles live in a temporary directory so runs never depend on earlier ones.
    """
    with tempfile.TemporaryDirectory(prefix="medsearch-") as tmp:
        users = UserDirectory()
        users.register(LOCAL_USER, [LOCAL_IP])
        sessions = SessionManager(users, ttl_s=settings.session_ttl_s)
        system = SearchSystem(
            corpus,
            dictionary,
            sessions,
            ProfileStore(Path(tmp) / "profiles"),
            secrets.token_bytes(32),
            topologies=topologies,
            default_topology=settings.topology,
            scheduler=make_scheduler("deterministic"),
            required_assurance=settings.required_assurance,
            c_msg=settings.c_msg,
            c_move=settings.c_move,
            kappa=settings.kappa,
        )
        with system:
            token = sessions.login(Credential(LOCAL_USER, LOCAL_IP)).token
            yield system, token


def render_result(result: SearchResult, fmt: str) -> str:
    if fmt == "machine":
        records = [
            {"kind": "result", "rank": i, **item.to_dict()}
            for i, item in enumerate(result.results, 1)
        ]
        records.append({"kind": "outcome", **result.outcome.to_dict()})
        return machine_lines(records)
    if not result.results:
        return "no results"
    rows = [
        [i, item.record_id, item.record.disease, item.score, ",".join(item.sources)]
        for i, item in enumerate(result.results, 1)
    ]
    outcome = result.outcome
    return (
        render_table(RESULT_COLUMNS, rows)
        + f"\n\n{outcome.topology.value}: {outcome.total_ms:.1f} ms,"
        + f" {outcome.messages_sent} messages, {len(outcome.failures)} failures"
    )


def render_profile(profile: UserProfile, fmt: str) -> str:
    data = profile.to_dict()
    if fmt == "machine":
        return machine_lines([{"kind": "profile", **data}])
    rows = []
    for section in ("common_info", "medical_info", "preferences"):
        rows += [[f"{section}.{k}", v] for k, v in data[section].items()]
    rows.append(["health_conditions", ",".join(data["health_conditions"])])
    rows.append(["feedback_events", len(data["feedback_history"])])
    return render_table(("field", "value"), rows)


def parse_assignments(assignments: list[str]) -> dict[str, Any]:
    """
    Turn ``section.key=value`` and ``health_conditions=a,b`` into a profile form.

    Raises:
        ValueError: malformed assignment or unknown section
    """
    form: dict[str, Any] = {}
    for item in assignments:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise ValueError(f"expected FIELD=VALUE, got {item!r}")
        if name == "health_conditions":
            form[name] = [c.strip() for c in value.split(",") if c.strip()]
            continue
        section, dot, key = name.partition(".")
        if not dot or section not in ("common_info", "medical_info", "preferences"):
            raise ValueError(f"unknown profile field: {name!r}")
        form.setdefault(section, {})[key] = float(value) if section == "preferences" else value
    return form


# ============================================================================
# Commands
# ============================================================================


def cmd_serve(args: argparse.Namespace, settings: Settings) -> int:
    app = MedSearchApp(settings).start()
    print(f"platform ready: {len(app.corpus or ())} locations", flush=True)
    app.wait()
    return 0


def cmd_user_add(args: argparse.Namespace, settings: Settings) -> int:
    settings.resolved_data_dir().mkdir(parents=True, exist_ok=True)
    open_user_directory(settings).register(args.user_id, args.ips)
    print(f"registered {args.user_id}")
    return 0


def cmd_login(args: argparse.Namespace, settings: Settings) -> int:
    with _client(args, settings) as client:
        print(client.login(args.user_id, args.ip))
    return 0


def cmd_logout(args: argparse.Namespace, settings: Settings) -> int:
    with _client(args, settings) as client:
        print("logged out" if client.logout() else "no such session")
    return 0


def cmd_query(args: argparse.Namespace, settings: Settings) -> int:
    with _client(args, settings) as client:
        result = client.query(" ".join(args.text), args.topology)
    print(render_result(result, args.format))
    return 0


def cmd_profile(args: argparse.Namespace, settings: Settings) -> int:
    form = parse_assignments(args.assignments)
    with _client(args, settings) as client:
        profile = client.update_profile(form) if form else client.profile()
    print(render_profile(profile, args.format))
    return 0


def cmd_feedback(args: argparse.Namespace, settings: Settings) -> int:
    with _client(args, settings) as client:
        profile = client.feedback(args.record_id, args.rating)
    print(render_profile(profile, args.format))
    return 0


def cmd_corpus(args: argparse.Namespace, settings: Settings) -> int:
    corpus = generate_corpus(settings.seed, args.sites_per_category, args.records_per_site)
    index = save_corpus(corpus, args.out)
    print(f"wrote {len(corpus)} sites, {corpus.record_count()} records to {index.parent}")
    return 0


def cmd_bench(args: argparse.Namespace, settings: Settings) -> int:
    corpus, dictionary = _inputs(settings)
    cfg = BenchmarkConfig(
        c_msg=settings.c_msg,
        c_move=settings.c_move,
        kappa=settings.kappa,
        repetitions=settings.repetitions,
    )
    if args.calibrate:
        cfg = calibrated_config(cfg, corpus, args.query, dictionary)
    kinds = [TopologyKind.parse(args.topology)] if args.topology else list(TopologyKind)
    reports = [
        run_benchmark(
            kind,
            cfg,
            corpus,
            args.query,
            dictionary,
            required_assurance=settings.required_assurance,
        )
        for kind in kinds
    ]
    print(render_benchmarks(reports, args.format))
    return 0


def cmd_eval(args: argparse.Namespace, settings: Settings) -> int:
    corpus, dictionary = _inputs(settings)
    if args.suite:
        suite = load_suite(args.suite)
    else:
        kwargs = {"size": args.size} if args.size else {}
        suite = generate_suite(settings.seed, corpus, dictionary, **kwargs)
    if args.judgments:
        judgments = load_judgments(args.judgments)
    else:
        judgments = derive_judgments(suite, corpus)
    if args.save:
        out = Path(args.save)
        out.mkdir(parents=True, exist_ok=True)
        save_suite(suite, out / "suite.tsv")
        save_judgments(judgments, out / "judgments.tsv")

    with local_system(settings, corpus, dictionary) as (system, token):
        run = run_suite(suite, judgments, system, token, settings.topology)
    print(render_metrics(run.report, args.format))
    return 0


def cmd_trace(args: argparse.Namespace, settings: Settings) -> int:
    corpus, dictionary = _inputs(settings)
    with local_system(settings, corpus, dictionary) as (system, token):
        system.platform.enable_trace()
        system.search(token, args.query, settings.topology)
        count = system.platform.export_trace(args.out)
    print(f"wrote {count} messages to {args.out}")
    return 0
