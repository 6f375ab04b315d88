"""Pipeline driver: ingest -> stats -> gen -> train/score -> eval -> analyze -> report.

Every subcommand reads and writes the textual formats defined by the
library modules, so each stage can be replaced by an external tool.  All
outputs are byte-deterministic for fixed inputs and seed.  Configuration
comes from an INI file (``[syntaxprobe]`` section), overridden by
``SP_``-prefixed environment variables, overridden by flags.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import beamsearch, corpus, ngram, scoring, stats, suites, toydata
from .errors import SyntaxProbeError, UsageError


@dataclass
class RunConfig:
    corpus: str = ""
    dependencies: str = ""
    suite_defs: str = ""
    transitivity: str = ""
    irregular: str = ""
    out: str = "out"
    seed: str = ""
    jobs: str = "1"
    lowercase: str = "false"
    filler_min_count: str = "50"
    punct_exempt: str = "true"
    transitive_hi: str = "0.9"
    intransitive_lo: str = "0.1"
    eps_tie: str = "1e-9"
    words_per_category: str = "20"
    frames_per_word: str = "20"
    order: str = "5"
    map_singletons: str = "false"
    model: str = ""
    buckets: str = ""
    reference_model: str = ""

    # -- typed accessors ---------------------------------------------------

    def _bool(self, name: str) -> bool:
        value = getattr(self, name).strip().lower()
        if value in ("true", "1", "yes", "on"):
            return True
        if value in ("false", "0", "no", "off", ""):
            return False
        raise UsageError(f"config key {name} must be boolean, got {value!r}")

    def corpus_paths(self) -> list:
        paths = [p.strip() for p in self.corpus.split(",") if p.strip()]
        if not paths:
            raise UsageError("no corpus configured (config key 'corpus')")
        return paths

    def seed_value(self) -> int:
        if not self.seed.strip():
            raise UsageError("a seed is required (config key 'seed' or --seed)")
        return int(self.seed)

    def bucket_table(self):
        if not self.buckets.strip():
            return corpus.DEFAULT_BUCKETS
        return corpus.parse_bucket_table(self.buckets)

    def suite_defs_path(self) -> str:
        return self.suite_defs or str(toydata.default_suites_path())

    def transitivity_path(self) -> str:
        return self.transitivity or str(toydata.default_transitivity_path())

    def irregular_path(self) -> str:
        return self.irregular or str(toydata.default_irregular_path())


_CONFIG_KEYS = tuple(f.name for f in fields(RunConfig))


def load_config(path: str | None, env: dict, overrides: dict) -> RunConfig:
    cfg = RunConfig()
    if path:
        if not os.path.exists(path):
            raise UsageError(f"config file {path!r} does not exist")
        parser = configparser.ConfigParser(interpolation=None)
        parser.read(path)
        section = parser["syntaxprobe"] if parser.has_section("syntaxprobe") \
            else parser["DEFAULT"]
        for key in section:
            if key not in _CONFIG_KEYS:
                raise UsageError(f"unknown config key {key!r} in {path}")
            setattr(cfg, key, section[key])
    for key in _CONFIG_KEYS:
        env_key = "SP_" + key.upper()
        if env_key in env:
            setattr(cfg, key, env[env_key])
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, str(value))
    return cfg


def _ensure_dir(cfg: RunConfig, *parts) -> str:
    path = os.path.join(cfg.out, *parts)
    os.makedirs(path, exist_ok=True)
    return path


def _outdir(cfg: RunConfig, *parts) -> str:
    _ensure_dir(cfg, *parts[:-1])
    return os.path.join(cfg.out, *parts)


def _require(path: str, what: str) -> str:
    if not os.path.exists(path):
        raise UsageError(f"missing upstream artifact: {what} ({path})")
    return path


def _read_corpus(cfg: RunConfig) -> list:
    trees = []
    for path in cfg.corpus_paths():
        trees.extend(corpus.read_treebank(_require(path, "treebank")))
    return trees


# ---------------------------------------------------------------------------
# Subcommands


def cmd_ingest(cfg: RunConfig, args) -> int:
    trees = _read_corpus(cfg)
    deps = None
    if cfg.dependencies.strip():
        deps = corpus.read_dependency_sidecar(_require(cfg.dependencies, "sidecar"))
    lex = corpus.build_lexicon(trees, lowercase=cfg._bool("lowercase"),
                               dependencies=deps)
    out = _outdir(cfg, "lexicon.tsv")
    corpus.write_lexicon(lex, out)
    print(f"ingest: {len(trees)} trees, {len(lex)} word forms -> {out}")
    return 0


def _load_lexicon(cfg: RunConfig, args) -> corpus.LexiconStats:
    path = getattr(args, "lexicon", None) or os.path.join(cfg.out, "lexicon.tsv")
    return corpus.read_lexicon(_require(path, "lexicon table (run ingest)"))


def _resources(cfg: RunConfig, lex) -> suites.SuiteResources:
    marks = corpus.read_transitivity_lexicon(cfg.transitivity_path())
    irregular = corpus.read_irregular_verbs(cfg.irregular_path())
    calls = corpus.classify_transitivity(
        lex, marks, hi=float(cfg.transitive_hi), lo=float(cfg.intransitive_lo))
    return suites.SuiteResources(marks, calls, irregular)


def cmd_stats(cfg: RunConfig, args) -> int:
    lex = _load_lexicon(cfg, args)
    res = _resources(cfg, lex)
    base = _ensure_dir(cfg, "wordstats")

    with open(os.path.join(base, "transitivity.tsv"), "w", encoding="utf-8") as fh:
        fh.write("#word\tmarked\tclass\treason\tobj_fraction\n")
        for word in sorted(res.transitivity_calls):
            c = res.transitivity_calls[word]
            frac = "" if c.obj_fraction is None else f"{c.obj_fraction:.4f}"
            fh.write(f"{word}\t{c.marked}\t{c.klass.value}\t{c.reason}\t{frac}\n")

    active = corpus.active_only_verbs(lex, res.irregular)
    with open(os.path.join(base, "active_only.txt"), "w", encoding="utf-8") as fh:
        for w in active:
            fh.write(w + "\n")

    nouns = [w for w in lex.words()
             if suites._majority_tag(lex.stats(w)) in ("NN", "NNS")]
    kept, removed = corpus.filter_polar_overlap(nouns, lex)
    with open(os.path.join(base, "polar_overlap.tsv"), "w", encoding="utf-8") as fh:
        fh.write(f"#nouns\t{len(nouns)}\tremoved\t{len(removed)}\n")
        for w in removed:
            fh.write(f"{w}\tremoved\n")

    with open(os.path.join(base, "vbn_fractions.tsv"), "w", encoding="utf-8") as fh:
        fh.write("#word\ttotal\tvbn\tfraction\n")
        for word in sorted(res.transitivity_calls):
            if lex.count(word) == 0:
                continue
            frac = corpus.vbn_fraction(lex, word)
            s = lex.stats(word)
            fh.write(f"{word}\t{s.total}\t{s.vbn}\t{frac:.4f}\n")
    print(f"stats: {len(active)} active-only verbs, "
          f"{len(removed)} polar-overlap nouns -> {base}")
    return 0


def cmd_gen(cfg: RunConfig, args) -> int:
    lex = _load_lexicon(cfg, args)
    defs = suites.read_suite_defs(cfg.suite_defs_path())
    res = _resources(cfg, lex)
    ids = defs.ids() if args.suite == "all" else [args.suite]
    for suite_id in ids:
        suite = suites.generate_suite(
            suite_id, defs, lex, cfg.seed_value(),
            resources=res,
            words_per_category=int(cfg.words_per_category),
            frames_per_word=int(cfg.frames_per_word),
            filler_min_count=int(cfg.filler_min_count),
            punct_exempt=cfg._bool("punct_exempt"),
            bucket_table=cfg.bucket_table(),
        )
        out = _outdir(cfg, "suites", f"{suite_id}.suite")
        suites.write_suite(suite, out)
        note = f" ({len(suite.shortfalls)} shortfalls)" if suite.shortfalls else ""
        print(f"gen: {suite_id}: {len(suite.items)} items, "
              f"{suite.sentence_count()} sentences{note} -> {out}")
    return 0


def cmd_train_ngram(cfg: RunConfig, args) -> int:
    trees = _read_corpus(cfg)
    sentences = [[w for w, _ in t.terminals()] for t in trees]
    model = ngram.train(sentences, order=int(cfg.order),
                        map_singletons=cfg._bool("map_singletons"))
    out = args.model_out or _outdir(cfg, "ngram.model")
    ngram.write_model(model, out)
    print(f"train-ngram: order {model.order}, |V|={len(model.support)} -> {out}")
    return 0


def _model_spec(cfg: RunConfig, args):
    spec = getattr(args, "model", None) or cfg.model
    if not spec:
        default_path = os.path.join(cfg.out, "ngram.model")
        if os.path.exists(default_path):
            spec = f"ngram:{default_path}"
        else:
            raise UsageError("no model configured (config key 'model' or --model)")
    kind, _, arg = spec.partition(":")
    if kind not in ("ngram", "adapter", "pcfg", "subprocess") or not arg:
        raise UsageError(f"bad model spec {spec!r} "
                         "(expected kind:path with kind ngram|adapter|pcfg|subprocess)")
    return kind, arg


def cmd_score(cfg: RunConfig, args) -> int:
    suite = suites.read_suite(_require(args.suite_file, "suite file"))
    kind, arg = _model_spec(cfg, args)
    name = args.model_name or kind
    sentences = []
    for item in suite.items:
        for condition in ("gram", "ungram"):
            sentences.append((scoring.sentence_id(item.item_id, condition),
                              item.tokens(condition)))

    if kind == "adapter":
        records = scoring.read_surprisal_file(_require(arg, "adapter surprisal file"))
        scoring.align(suite, records)
    elif kind == "ngram":
        model = ngram.read_model(_require(arg, "ngram model (run train-ngram)"))

        def score_one(pair):
            sid, tokens = pair
            return scoring.SurprisalRecord(sid, tuple(tokens),
                                           tuple(model.surprisals(tokens)))

        jobs = max(1, int(cfg.jobs))
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                records = list(pool.map(score_one, sentences))
        else:
            records = [score_one(p) for p in sentences]
    else:
        if kind == "pcfg":
            model = beamsearch.PCFGActionModel(
                beamsearch.read_grammar(_require(arg, "grammar file")))
            closer = None
        else:
            model = beamsearch.SubprocessActionModel(shlex.split(arg))
            closer = model
        try:
            records = []
            for sid, tokens in sentences:
                result = beamsearch.word_sync_beam(model, tokens)
                records.append(scoring.SurprisalRecord(
                    sid, tuple(tokens), tuple(result.surprisals)))
        finally:
            if closer is not None:
                closer.close()

    out = _outdir(cfg, "surprisals", f"{suite.suite_id}.{name}.surp")
    scoring.write_surprisal_file(records, out)
    print(f"score: {len(records)} sentences with {name} -> {out}")
    return 0


def cmd_eval(cfg: RunConfig, args) -> int:
    suite = suites.read_suite(_require(args.suite_file, "suite file"))
    records = scoring.read_surprisal_file(
        _require(args.surprisal_file, "surprisal file"))
    results, agg = scoring.evaluate_suite(suite, records,
                                          eps_tie=float(cfg.eps_tie))
    name = args.model_name or "model"
    items_out = _outdir(cfg, "eval", f"{suite.suite_id}.{name}.items.csv")
    scoring.write_items_csv(results, items_out, suite.suite_id, name)
    eval_out = _outdir(cfg, "eval", f"{suite.suite_id}.{name}.eval.csv")
    scoring.write_eval_csv(agg, eval_out, name)
    pooled = sum(r.correct for r in results) / len(results)
    print(f"eval: {suite.suite_id} x {name}: accuracy {pooled:.3f} "
          f"({len(results)} items) -> {eval_out}")
    return 0


def _items_by_group(paths):
    groups: dict = {}
    for path in paths:
        for row in scoring.read_items_csv(_require(path, "items csv")):
            key = (row["suite"], row["model"])
            groups.setdefault(key, []).append(row)
    return groups


def cmd_analyze(cfg: RunConfig, args) -> int:
    lex = _load_lexicon(cfg, args)
    groups = _items_by_group(args.items)
    fits_rows = []
    curve_rows = []
    charts = []

    for (suite_id, model), rows in sorted(groups.items()):
        counts = np.array([max(1, lex.count(r["target"])) for r in rows], float)
        correct = np.array([int(r["correct"]) for r in rows])
        targets = [r["target"] for r in rows]

        # Exposure effect on accuracy, raw occurrence counts as predictor,
        # cluster-robust by target word.
        try:
            fit = stats.fit_logistic(counts[:, None], correct,
                                     labels=["occurrences"], clusters=targets)
            for i, label in enumerate(fit.labels):
                fits_rows.append((suite_id, model, "exposure", label,
                                  fit.coef[i], fit.se[i], fit.z[i], fit.p[i]))
        except (stats.SeparationError, stats.RankError) as exc:
            fits_rows.append((suite_id, model, "exposure",
                              f"error:{exc.category}", math.nan, math.nan,
                              math.nan, math.nan))

        curve = stats.accuracy_curve(list(zip(counts, correct)))
        for x, p, lo, hi in curve.samples:
            curve_rows.append((suite_id, model, x, p, lo, hi))

        buckets = sorted({int(r["bucket"]) for r in rows})
        points = []
        for b in buckets:
            sub = [int(r["correct"]) for r in rows if int(r["bucket"]) == b]
            summ = stats.BinomialSummary.from_counts(sum(sub), len(sub))
            points.append({"bucket": b, "log10_exposure": math.log10(b),
                           "accuracy": summ.accuracy, "ci_lo": summ.ci_lo,
                           "ci_hi": summ.ci_hi, "n": summ.n})
        charts.append({
            "title": f"{suite_id} / {model}",
            "suite": suite_id,
            "model": model,
            "encoding": {
                "x": {"field": "log10_exposure",
                      "title": "training exposures (log10)"},
                "y": {"field": "accuracy", "domain": [0.0, 1.0]},
                "error": {"lo": "ci_lo", "hi": "ci_hi"},
                "chance": 0.5,
            },
            "points": points,
            "curve": [{"log10_exposure": float(x), "accuracy": float(p),
                       "band_lo": float(lo), "band_hi": float(hi)}
                      for x, p, lo, hi in curve.samples],
            "curve_separated": curve.separated,
        })

    # Structural-supervision contrast: accuracy ~ model + bucket, fit over
    # all models per suite, cluster-robust by item id.
    by_suite: dict = {}
    for (suite_id, model), rows in groups.items():
        by_suite.setdefault(suite_id, {})[model] = rows
    for suite_id, models in sorted(by_suite.items()):
        if len(models) < 2:
            continue
        names = sorted(models)
        reference = cfg.reference_model if cfg.reference_model in names else names[0]
        contrasts = [m for m in names if m != reference]
        X, y, clusters = [], [], []
        for m in names:
            for r in models[m]:
                dummies = [1.0 if m == c else 0.0 for c in contrasts]
                X.append(dummies + [math.log10(int(r["bucket"]))])
                y.append(int(r["correct"]))
                clusters.append(r["item_id"])
        labels = [f"model:{m}" for m in contrasts] + ["bucket_log10"]
        try:
            fit = stats.fit_logistic(np.array(X), np.array(y), labels=labels,
                                     clusters=clusters)
            for i, label in enumerate(fit.labels):
                fits_rows.append((suite_id, "*", "supervision", label,
                                  fit.coef[i], fit.se[i], fit.z[i], fit.p[i]))
        except (stats.SeparationError, stats.RankError) as exc:
            fits_rows.append((suite_id, "*", "supervision",
                              f"error:{exc.category}", math.nan, math.nan,
                              math.nan, math.nan))

    fits_out = _outdir(cfg, "analysis", "fits.csv")
    with open(fits_out, "w", encoding="utf-8") as fh:
        fh.write("suite,model,analysis,term,estimate,se,z,p,stars\n")
        for suite_id, model, analysis, term, est, se, z, p in fits_rows:
            star = stats.stars(p) if not math.isnan(p) else ""
            fh.write(f"{suite_id},{model},{analysis},{term},{est:.6f},"
                     f"{se:.6f},{z:.4f},{p:.6g},{star}\n")
    curves_out = _outdir(cfg, "analysis", "curves.csv")
    with open(curves_out, "w", encoding="utf-8") as fh:
        fh.write("suite,model,log10_exposure,p_hat,band_lo,band_hi\n")
        for suite_id, model, x, p, lo, hi in curve_rows:
            fh.write(f"{suite_id},{model},{x:.6f},{p:.6f},{lo:.6f},{hi:.6f}\n")
    charts_out = _outdir(cfg, "analysis", "charts.json")
    with open(charts_out, "w", encoding="utf-8") as fh:
        json.dump({"version": 1, "charts": charts}, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"analyze: {len(groups)} suite/model groups -> {fits_out}")
    return 0


def cmd_report(cfg: RunConfig, args) -> int:
    cells: dict = {}
    models: list = []
    suites_seen: list = []
    for path in args.eval:
        for row in scoring.read_eval_csv(_require(path, "eval csv")):
            if row["category"] != "all":
                continue
            key = (row["suite"], row["model"])
            if row["model"] not in models:
                models.append(row["model"])
            if row["suite"] not in suites_seen:
                suites_seen.append(row["suite"])
            above = float(row["p_above_chance"]) < 0.05
            got = cells.setdefault(key, [0, 0])
            got[0] += int(above)
            got[1] += 1
    models.sort()

    star_cols: dict = {}
    if args.fits:
        for row in scoring.read_items_csv(_require(args.fits, "fits csv")):
            if row["analysis"] == "supervision" and row["term"].startswith("model:"):
                star_cols[(row["suite"], row["term"][len("model:"):])] = row["stars"]

    table_csv = _outdir(cfg, "report", "table.csv")
    with open(table_csv, "w", encoding="utf-8") as fh:
        header = ["suite"] + [f"{m}_above_chance" for m in models]
        if star_cols:
            header += [f"{m}_vs_reference" for m in models]
        fh.write(",".join(header) + "\n")
        for suite_id in suites_seen:
            row = [suite_id]
            for m in models:
                above, total = cells.get((suite_id, m), (0, 0))
                row.append(f"{above}/{total}" if total else "-")
            if star_cols:
                for m in models:
                    row.append(star_cols.get((suite_id, m), "n.s.")
                               if (suite_id, m) in star_cols else "")
            fh.write(",".join(row) + "\n")

    table_txt = _outdir(cfg, "report", "table.txt")
    with open(table_txt, "w", encoding="utf-8") as fh:
        width = max([len(s) for s in suites_seen] + [5])
        cols = [f"{m}" for m in models]
        fh.write("suite".ljust(width) + "  " +
                 "  ".join(c.rjust(12) for c in cols) + "\n")
        for suite_id in suites_seen:
            row = [suite_id.ljust(width)]
            for m in models:
                above, total = cells.get((suite_id, m), (0, 0))
                mark = star_cols.get((suite_id, m), "")
                cell = (f"{above}/{total}" if total else "-") + \
                       (f" {mark}" if mark else "")
                row.append(cell.rjust(12))
            fh.write("  ".join(row) + "\n")
    print(f"report: {len(suites_seen)} suites x {len(models)} models -> {table_txt}")
    return 0


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="syntaxprobe",
        description="Exposure-controlled grammaticality suites and "
                    "surprisal-based evaluation.",
    )
    parser.add_argument("--config", help="INI config file ([syntaxprobe] section)")
    parser.add_argument("--seed", type=int, help="generation seed")
    parser.add_argument("--jobs", type=int, help="worker cap for scoring")
    parser.add_argument("--out", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("ingest", help="read treebank(s), write the lexicon table")

    p = sub.add_parser("stats", help="word classifications from the lexicon")
    p.add_argument("--lexicon")

    p = sub.add_parser("gen", help="generate a test suite")
    p.add_argument("--suite", required=True, help="suite id or 'all'")
    p.add_argument("--lexicon")

    p = sub.add_parser("train-ngram", help="train the n-gram baseline")
    p.add_argument("--model-out")

    p = sub.add_parser("score", help="surprisals for a suite under a model")
    p.add_argument("--suite-file", required=True)
    p.add_argument("--model", help="ngram:PATH | adapter:PATH | pcfg:PATH | "
                                   "subprocess:CMD")
    p.add_argument("--model-name")

    p = sub.add_parser("eval", help="accuracy per bucket and category")
    p.add_argument("--suite-file", required=True)
    p.add_argument("--surprisal-file", required=True)
    p.add_argument("--model-name")

    p = sub.add_parser("analyze", help="exposure and supervision fits")
    p.add_argument("--items", nargs="+", required=True)
    p.add_argument("--lexicon")

    p = sub.add_parser("report", help="buckets-above-chance summary grid")
    p.add_argument("--eval", nargs="+", required=True)
    p.add_argument("--fits")
    return parser


_COMMANDS = {
    "ingest": cmd_ingest,
    "stats": cmd_stats,
    "gen": cmd_gen,
    "train-ngram": cmd_train_ngram,
    "score": cmd_score,
    "eval": cmd_eval,
    "analyze": cmd_analyze,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, os.environ,
                          {"seed": args.seed, "jobs": args.jobs, "out": args.out})
        return _COMMANDS[args.command](cfg, args)
    except SyntaxProbeError as exc:
        print(f"error:{exc.category}: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, UsageError) else 1


if __name__ == "__main__":
    raise SystemExit(main())
