"""Command-line front end.

Settings come from three places, later ones winning: built-in defaults, a
flat ``key=value`` config file (``--config``, or the path in $T20CAST_CONFIG),
then command-line flags. Every command writes ``<command>.cfg`` into its
output directory; passing that file back via ``--config`` reruns it.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .backtest import (
    FeatureConfig,
    SplitError,
    build_feature_matrix,
    compare,
    cumulative_series,
    odds_benchmark,
    rolling_splits,
    run_backtest,
    write_series,
    BacktestReport,
)
from .corpus import CorpusError, exclusion_report, load_corpus, validate_corpus
from .learn import KINDS, ModelSpec, PCAConfig, fit
from .playerfeat import PlayerConfig, write_registry
from .selection import UndefinedScore, rfe, score_by_year, shortlist, write_rfe_trace, write_scores
from .synthgen import GeneratorConfig, bayes_ceiling, write_synthetic
from .teamfeat import InsufficientHistory

log = logging.getLogger("t20cast")

CONFIG_ENV = "T20CAST_CONFIG"
EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3
METRICS = ("pearson", "mutual_information", "chi_square_p")
EXTRA_METRICS = ("chi_square",)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


# ---------------------------------------------------------------------------
# argument types


def _team_set(text: str) -> str:
    if text == "all":
        return text
    try:
        n = int(text)
    except ValueError:
        n = None
    if n is None or not 1 <= n <= 6:
        raise argparse.ArgumentTypeError(f"feature set must be 1-6 or 'all', got {text!r}")
    return str(n)


def _window(text: str) -> str:
    if text == "all":
        return text
    try:
        if int(text) >= 1:
            return str(int(text))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"window must be a positive integer or 'all', got {text!r}")


def _features(text: str) -> str:
    kind, _, rest = text.partition(":")
    if kind == "player" and not rest:
        return text
    if kind in ("team", "combined"):
        if not rest:
            return f"{kind}:set6"
        _team_set(rest[3:] if rest.startswith("set") else rest)
        return text
    raise argparse.ArgumentTypeError(
        f"features must be team:setN, team:all, player or combined:setN, got {text!r}")


def _int_list(text: str) -> list[int]:
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected comma-separated integers or ranges, got {text!r}")
    return out


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _hyper_value(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", "null"):
        return None
    return text


# ---------------------------------------------------------------------------
# parser


def _add_common(p, out_default="out"):
    p.add_argument("--config", help=f"key=value config file (default: ${CONFIG_ENV})")
    p.add_argument("--corpus", default="corpus", help="corpus directory (default: corpus)")
    p.add_argument("--out", default=out_default, help=f"output directory (default: {out_default})")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")


def _add_features(p):
    g = p.add_argument_group("features")
    g.add_argument("--features", type=_features, default="team:set6",
                   help="team:setN | team:all | player | combined:setN (default team:set6)")
    g.add_argument("--set", dest="team_set", type=_team_set, help="team feature set 1-6 or all (overrides --features)")
    g.add_argument("--columns", help="comma-separated column subset, e.g. two team features for a combined model")
    g.add_argument("--window", type=_window, default="all", help="prior games per team, or all")
    g.add_argument("--min-history", type=int, default=4)
    g.add_argument("--impute", choices=("league_mean", "drop"), default="league_mean")
    g.add_argument("--new-player-games", type=int, default=4)
    g.add_argument("--min-balls", type=int, default=24)
    g.add_argument("--diff-mode", choices=("batting_average", "all_level1"), default="batting_average")
    g.add_argument("--bins", type=int, default=5, help="quantile buckets for discrete scores/models")


def _add_model(p):
    g = p.add_argument_group("model")
    g.add_argument("--model", choices=KINDS, default="naive_bayes")
    g.add_argument("--hp", action="append", default=[], metavar="KEY=VALUE",
                   help="model hyperparameter (repeatable)")
    g.add_argument("--pca", type=_bool, nargs="?", const=True, default=False, help="project onto principal components")
    g.add_argument("--pca-components", type=int)
    g.add_argument("--pca-variance", type=float, default=0.95)


def _add_split(p):
    g = p.add_argument_group("splits")
    g.add_argument("--test-seasons", type=_int_list, help="e.g. 2009-2014 (default: last 6 seasons)")
    g.add_argument("--window-policy", type=_window, default="all", help="training seasons per split, or all")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="t20cast", description="Twenty20 match outcome prediction pipeline.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    p = sub.add_parser("ingest", help="load and validate a corpus")
    _add_common(p)
    p.add_argument("--strict", type=_bool, nargs="?", const=True, default=False,
                   help="fail (exit 2) on any validation finding")

    p = sub.add_parser("features", help="write the feature matrix CSV")
    _add_common(p)
    _add_features(p)

    p = sub.add_parser("score", help="per-season feature scores")
    _add_common(p)
    _add_features(p)
    p.add_argument("--metrics", default=",".join(METRICS), help=f"comma-separated subset of {', '.join(METRICS)}")
    p.add_argument("--top", type=int, default=10, help="shortlist length printed")

    p = sub.add_parser("select", help="recursive feature elimination")
    _add_common(p)
    _add_features(p)
    _add_model(p)
    p.add_argument("--protocol", choices=("loso", "rolling"), default="loso")
    p.add_argument("--top", type=int, help="start from the top-N Pearson shortlist instead of all columns")

    p = sub.add_parser("train", help="fit a model and save it as JSON")
    _add_common(p)
    _add_features(p)
    _add_model(p)
    p.add_argument("--train-seasons", type=_int_list, help="default: every season")

    p = sub.add_parser("backtest", help="rolling-season backtest")
    _add_common(p)
    _add_features(p)
    _add_model(p)
    _add_split(p)

    p = sub.add_parser("benchmark", help="bookmaker-favourite accuracy per season")
    _add_common(p)

    p = sub.add_parser("compare", help="model vs favourite per season")
    _add_common(p)
    p.add_argument("--report", help="report.json to compare (default: <out>/report.json)")

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    _add_common(p)
    p.add_argument("--seasons", type=_int_list, default="2003-2014")
    p.add_argument("--n-teams", type=int, default=18)
    p.add_argument("--matches-per-team", type=int, default=14)
    p.add_argument("--team-skill-spread", type=float, default=GeneratorConfig.team_skill_spread)
    p.add_argument("--home-advantage", type=float, default=GeneratorConfig.home_advantage)
    p.add_argument("--odds-noise", type=float, default=GeneratorConfig.odds_noise)
    p.add_argument("--flip-seasons", type=_int_list, default="")
    p.add_argument("--anomaly-seasons", type=_int_list, default="")

    p = sub.add_parser("report", help="plot-ready series CSVs from a backtest report")
    _add_common(p)
    p.add_argument("--report", help="report.json (default: <out>/report.json)")
    p.add_argument("--top", type=int, default=5, help="features in the per-season score series")
    return parser


# ---------------------------------------------------------------------------
# config file


def read_config_file(path) -> dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment. Keys may use - or _."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _parse(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError(parser.format_help())
    config_path = args.config or os.environ.get(CONFIG_ENV)
    if not config_path:
        return args
    if not Path(config_path).is_file():
        raise UsageError(f"config file not found: {config_path}")
    values = read_config_file(config_path)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    for a in sub._actions:  # long flag names work as keys too ("set" for team_set)
        for opt in a.option_strings:
            if opt.startswith("--"):
                known.setdefault(opt[2:].replace("-", "_"), a)
    unknown = sorted(k for k in values if k not in known or k in ("help", "config"))
    if unknown:
        raise UsageError(f"{config_path}: unknown key(s) for '{args.command}': {', '.join(unknown)}")
    file_defaults = {}
    for k, v in values.items():
        action = known[k]
        if action.nargs == "?" or action.const is not None:
            v = _bool(v)
        elif isinstance(action, argparse._AppendAction):
            v = [s for s in v.split(";") if s]
        file_defaults[action.dest] = v
    sub.set_defaults(**file_defaults)
    args = parser.parse_args(argv)
    args.config = config_path
    return args


_NOT_ECHOED = {"config", "verbose", "command", "out"}


def write_echo(args, out_dir: Path) -> Path:
    """Write the resolved settings as a re-usable key=value file."""
    lines = [f"# t20cast {args.command}"]
    for k, v in sorted(vars(args).items()):
        if k in _NOT_ECHOED or v is None:
            continue
        if isinstance(v, list):
            v = ";".join(map(str, v)) if k == "hp" else ",".join(map(str, v))
        lines.append(f"{k} = {v}")
    path = out_dir / f"{args.command}.cfg"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _resolved(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}


# ---------------------------------------------------------------------------
# config objects


def feature_config(args) -> FeatureConfig:
    kind, _, rest = args.features.partition(":")
    team_set = rest[3:] if rest.startswith("set") else (rest or "6")
    if args.team_set is not None:
        team_set = args.team_set
        if kind == "player":
            kind = "combined"
    columns = tuple(c.strip() for c in args.columns.split(",") if c.strip()) if args.columns else None
    return FeatureConfig(
        kind=kind,
        team_set=team_set if team_set == "all" else int(team_set),
        window=args.window if args.window == "all" else int(args.window),
        min_history=args.min_history,
        impute=args.impute,
        columns=columns,
        player=PlayerConfig(new_player_games=args.new_player_games, min_balls=args.min_balls,
                            diff_mode=args.diff_mode),
    )


def model_spec(args) -> ModelSpec:
    hp = {}
    for item in args.hp:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--hp expects KEY=VALUE, got {item!r}")
        hp[key.strip()] = _hyper_value(value.strip())
    if args.model == "naive_bayes" and "bins" not in hp and hp.get("event_model") == "bucketed":
        hp["bins"] = args.bins
    try:
        return ModelSpec(args.model, hp, use_pca=bool(args.pca),
                         pca_config=PCAConfig(args.pca_components, args.pca_variance), seed=args.seed)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args):
    corpus = load_corpus(args.corpus)
    if not corpus.included.matches:
        raise CorpusError(f"{args.corpus}: no included matches")
    return corpus


def _matrix(corpus, args, config: FeatureConfig | None = None):
    try:
        return build_feature_matrix(corpus, config or feature_config(args))
    except KeyError as exc:
        raise UsageError(f"--columns: {exc.args[0]}") from exc


def _fmt(v) -> str:
    return "-" if v is None else f"{v:.3f}"


# ---------------------------------------------------------------------------
# commands


def cmd_ingest(args) -> int:
    corpus = load_corpus(args.corpus)
    findings = validate_corpus(corpus)
    out = _out_dir(args)
    table = exclusion_report(corpus)
    print(f"{'season':>6} {'games':>6} {'finals':>6} {'tied':>5} {'no_res':>6} {'incl':>5}")
    for s, row in table.items():
        print(f"{s:>6} {row.games:>6} {row.finals_day:>6} {row.tied:>5} {row.no_result:>6} {row.included:>5}")
    total = sum(r.included for r in table.values())
    print(f"included matches: {total}; validation findings: {len(findings)}")
    for f in findings[:20]:
        print(f"  {f}")
    doc = {
        "config": _resolved(args),
        "exclusions": {str(s): {"games": r.games, "finals_day": r.finals_day, "tied": r.tied,
                                "no_result": r.no_result, "included": r.included} for s, r in table.items()},
        "included": total,
        "findings": findings,
    }
    (out / "ingest.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    write_echo(args, out)
    if args.strict and findings:
        print(f"strict mode: {len(findings)} validation finding(s)", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_features(args) -> int:
    corpus = _load(args)
    fc = feature_config(args)
    out = _out_dir(args)
    if fc.kind in ("team", "combined"):
        m = _matrix(corpus, args, FeatureConfig("team", fc.team_set, fc.window, fc.min_history, fc.impute,
                                                       fc.columns if fc.kind == "team" else None, fc.player))
        m.to_csv(out / "features.csv")
        print(f"features.csv: {len(m)} rows x {m.n_features} team features")
    if fc.kind in ("player", "combined"):
        m = _matrix(corpus, args, FeatureConfig("player", player=fc.player,
                                                       columns=fc.columns if fc.kind == "player" else None))
        m.to_csv(out / "player_features.csv")
        write_registry(out / "player_features.registry.json", fc.player.diff_mode)
        print(f"player_features.csv: {len(m)} rows x {m.n_features} player features")
    write_echo(args, out)
    return EXIT_OK


def cmd_score(args) -> int:
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    bad = [m for m in metrics if m not in METRICS + EXTRA_METRICS]
    if bad:
        raise UsageError(f"unknown metric(s) {', '.join(bad)}; choose from {', '.join(METRICS + EXTRA_METRICS)}")
    corpus = _load(args)
    matrix = _matrix(corpus, args)
    out = _out_dir(args)
    for metric in metrics:
        scores = score_by_year(matrix, metric, args.bins)
        write_scores(list(scores.values()), out / f"scores_{metric}.csv")
        print(f"{metric}: top {args.top}")
        for name in shortlist(scores, args.top):
            s = scores[name]
            print(f"  {name:<32} mean {_fmt(s.mean)}  var {_fmt(s.variance)}")
    write_echo(args, out)
    return EXIT_OK


def cmd_select(args) -> int:
    spec = model_spec(args)
    corpus = _load(args)
    matrix = _matrix(corpus, args)
    if args.top:
        matrix = matrix.select(shortlist(score_by_year(matrix, "pearson", args.bins), args.top))
    trace = rfe(matrix, spec, args.protocol)
    out = _out_dir(args)
    write_rfe_trace(trace, out / "rfe_trace.json", extra={"config": _resolved(args)})
    for n, acc in zip(trace.sizes, trace.accuracies):
        print(f"  {n:>4} features: accuracy {acc:.4f}")
    print(f"selected ({len(trace.selected)}): {', '.join(trace.selected)}")
    write_echo(args, out)
    return EXIT_OK


def cmd_train(args) -> int:
    spec = model_spec(args)
    corpus = _load(args)
    matrix = _matrix(corpus, args)
    if args.train_seasons:
        matrix = matrix.where_season(args.train_seasons)
        if len(matrix) == 0:
            raise SplitError(f"no rows in training seasons {args.train_seasons}")
    model = fit(spec, matrix)
    out = _out_dir(args)
    doc = model.to_dict()
    doc["config"] = _resolved(args)
    (out / "model.json").write_text(json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")
    print(f"model.json: {args.model} on {len(matrix)} rows x {matrix.n_features} features")
    write_echo(args, out)
    return EXIT_OK


def _test_seasons(args, corpus) -> list[int]:
    if args.test_seasons:
        return args.test_seasons
    # the last six seasons, never the first (it has nothing to train on)
    return sorted({m.season for m in corpus.included.matches})[1:][-6:]


def cmd_backtest(args) -> int:
    spec = model_spec(args)
    corpus = _load(args)
    plan = rolling_splits(corpus, _test_seasons(args, corpus),
                          args.window_policy if args.window_policy == "all" else int(args.window_policy))
    fc = feature_config(args)
    report = run_backtest(corpus, fc, spec, plan, matrix=_matrix(corpus, args, fc))
    out = _out_dir(args)
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    report.write_csv(out / "report.csv")
    write_series(out / "cumulative.csv", cumulative_series(report, report.benchmark),
                 header=("season", "match", "model_accuracy", "favourite_accuracy"))
    print(f"{'season':>6} {'n':>4} {'accuracy':>8}")
    for s, acc in report.season_accuracy().items():
        n = sum(1 for p in report.predictions if p.season == s)
        print(f"{s:>6} {n:>4} {acc:>8.3f}")
    print(f"overall {report.overall_accuracy():.3f} over {len(report.predictions)} matches")
    write_echo(args, out)
    return EXIT_OK


def cmd_benchmark(args) -> int:
    corpus = _load(args)
    bench = odds_benchmark(corpus, corpus.odds)
    out = _out_dir(args)
    rows = [(s, b.included, b.scored, b.coverage, b.accuracy if b.accuracy is not None else "")
            for s, b in bench.seasons.items()]
    write_series(out / "benchmark.csv", rows, header=("season", "included", "scored", "coverage", "accuracy"))
    print(f"{'season':>6} {'incl':>5} {'scored':>6} {'cover':>6} {'fav_acc':>7}")
    for s, b in bench.seasons.items():
        print(f"{s:>6} {b.included:>5} {b.scored:>6} {b.coverage:>6.2f} {_fmt(b.accuracy):>7}")
    print(f"overall favourite accuracy {_fmt(bench.overall())}")
    write_echo(args, out)
    return EXIT_OK


def _read_report(args) -> BacktestReport:
    path = Path(args.report) if args.report else Path(args.out) / "report.json"
    if not path.is_file():
        raise FileNotFoundError(f"{path}: no backtest report (run 'backtest' first)")
    return BacktestReport.from_dict(json.loads(path.read_text(encoding="utf-8")))


def cmd_compare(args) -> int:
    corpus = _load(args)
    report = _read_report(args)
    bench = odds_benchmark([m for m in corpus.included.matches
                            if m.match_id in {p.match_id for p in report.predictions}], corpus.odds)
    comp = compare(report, bench)
    out = _out_dir(args)
    rows = []
    for view, items in (("paired", comp.paired), ("all_matches", comp.all_matches)):
        for r in items:
            rows.append((view, r.season, r.n, r.model_accuracy,
                         "" if r.favourite_accuracy is None else r.favourite_accuracy,
                         "" if r.difference is None else r.difference))
    write_series(out / "compare.csv", rows,
                 header=("view", "season", "n", "model_accuracy", "favourite_accuracy", "difference"))
    print(f"{'season':>6} {'n':>4} {'model':>6} {'fav':>6} {'diff':>7}   (paired on odds-covered matches)")
    for r in comp.paired:
        print(f"{r.season:>6} {r.n:>4} {r.model_accuracy:>6.3f} {_fmt(r.favourite_accuracy):>6} {r.difference:>+7.3f}")
    write_echo(args, out)
    return EXIT_OK


def cmd_synth(args) -> int:
    config = GeneratorConfig(
        seed=args.seed, n_teams=args.n_teams, seasons=tuple(args.seasons),
        matches_per_team=args.matches_per_team, home_advantage=args.home_advantage,
        team_skill_spread=args.team_skill_spread, odds_noise=args.odds_noise,
        flip_seasons=frozenset(args.flip_seasons), anomaly_seasons=frozenset(args.anomaly_seasons),
    )
    corpus, truth = write_synthetic(config, args.corpus)
    ids = [m.match_id for m in corpus.included.matches]
    print(f"wrote {len(corpus.matches)} matches ({len(ids)} included) to {args.corpus}; "
          f"bayes ceiling {bayes_ceiling(truth, ids):.3f}")
    write_echo(args, _out_dir(args))
    return EXIT_OK


def cmd_report(args) -> int:
    corpus = _load(args)
    report = _read_report(args)
    out = _out_dir(args)
    tested = {p.match_id for p in report.predictions}
    bench = odds_benchmark([m for m in corpus.included.matches if m.match_id in tested], corpus.odds)

    write_series(out / "series_cumulative.csv", cumulative_series(report, bench),
                 header=("season", "match", "model_accuracy", "favourite_accuracy"))
    comp = compare(report, bench, strict=False)
    write_series(out / "series_compare.csv",
                 [(r.season, r.model_accuracy, "" if r.favourite_accuracy is None else r.favourite_accuracy)
                  for r in comp.all_matches],
                 header=("season", "model_accuracy", "favourite_accuracy"))

    feats = report.config.get("features", {})
    fc = FeatureConfig(kind=feats.get("kind", "team"), team_set=feats.get("team_set", 6),
                       window=feats.get("window", "all"), min_history=feats.get("min_history", 4),
                       impute=feats.get("impute", "league_mean"),
                       columns=tuple(feats["columns"]) if feats.get("columns") else None,
                       player=PlayerConfig(**feats["player"]) if feats.get("player") else PlayerConfig())
    matrix = _matrix(corpus, args, fc)
    rows = []
    try:
        scores = score_by_year(matrix, "pearson")
    except (UndefinedScore, ValueError) as exc:
        log.warning("per-season scores skipped: %s", exc)
        scores = {}
    for name in shortlist(scores, args.top) if scores else []:
        for season, v in sorted(scores[name].per_year.items()):
            rows.append((name, season, "" if v is None else v))
    write_series(out / "series_scores.csv", rows, header=("feature", "season", "pearson"))
    print("wrote series_cumulative.csv, series_compare.csv, series_scores.csv")
    write_echo(args, out)
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest, "features": cmd_features, "score": cmd_score, "select": cmd_select,
    "train": cmd_train, "backtest": cmd_backtest, "benchmark": cmd_benchmark, "compare": cmd_compare,
    "synth": cmd_synth, "report": cmd_report,
}


def run(argv=None) -> int:
    try:
        args = _parse(sys.argv[1:] if argv is None else list(argv))
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return EXIT_OK if not exc.code else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"t20cast {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusError, SplitError, InsufficientHistory, FileNotFoundError, UndefinedScore) as exc:
        print(f"t20cast {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.debug("runtime failure", exc_info=True)
        print(f"t20cast {args.command}: failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run())
