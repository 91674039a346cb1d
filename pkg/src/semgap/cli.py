"""Command-line pipeline: prep, gap, drift, stats, synth, run-all.

Configuration lives in a single TOML file; command-line flags override it.
Every run writes a manifest with the config snapshot, stage timings,
record/skip counts, the compressor identity and a checksum for every
artifact, which is enough to reproduce the run bit for bit.

Exit codes: 0 success, 1 usage error, 2 data error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import drift as drift_mod
from . import embed, ingest, mixer, stats, synth, textprep
from ._util import derive_seed, sha256_file
from .compressgap import CompressorSpec, GapMeasurement, InvariantViolation, fit_gap_scores, measure_gap

log = logging.getLogger("semgap")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


@dataclass
class DomainPaths:
    reviews: Path
    meta: Path


@dataclass
class SynthConfig:
    spec: synth.SynthSpec
    drift_levels: list
    rating_jitter: float = 0.0


@dataclass
class RunConfig:
    out: Path
    seed: int = 0
    jobs: int = 1
    force: bool = False
    no_trend: bool = False
    keep_labeled: bool = True
    domains: dict = field(default_factory=dict)
    targets: mixer.TargetSelectionParams = field(
        default_factory=mixer.TargetSelectionParams
    )
    swap_probability: float = 0.5
    trials: int = 5
    compressor: CompressorSpec = field(default_factory=CompressorSpec)
    embed_reviews: embed.TrainParams = field(default_factory=embed.review_defaults)
    embed_descriptions: embed.TrainParams = field(
        default_factory=embed.description_defaults
    )
    drift_params: drift_mod.DriftParams = field(default_factory=drift_mod.DriftParams)
    ground_truth: Optional[Path] = None
    synth_config: Optional[SynthConfig] = None
    config_snapshot: dict = field(default_factory=dict)


def load_config(path: Path, overrides: argparse.Namespace) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"bad config {path}: {exc}")

    seed = overrides.seed if overrides.seed is not None else int(raw.get("seed", 0))
    out = Path(overrides.out) if overrides.out else Path(raw.get("out", "semgap-out"))
    jobs = overrides.jobs if overrides.jobs is not None else int(raw.get("jobs", 1))

    domains = {}
    for name, block in raw.get("domains", {}).items():
        try:
            domains[name] = DomainPaths(Path(block["reviews"]), Path(block["meta"]))
        except (KeyError, TypeError):
            raise UsageError(f"domain {name!r} needs 'reviews' and 'meta' paths")

    targets_raw = raw.get("targets", {})
    rand_raw = raw.get("random", {})
    comp_raw = raw.get("compressor", {})
    drift_raw = raw.get("drift", {})
    gap_raw = raw.get("gap", {})

    def train_params(block: dict, defaults: embed.TrainParams) -> embed.TrainParams:
        allowed = {
            "dim", "window", "epochs", "min_count", "negative",
            "subsample_threshold", "lr_start", "lr_end",
        }
        unknown = set(block) - allowed
        if unknown:
            raise UsageError(f"unknown embed options: {sorted(unknown)}")
        return replace(defaults, **block)

    embed_raw = raw.get("embed", {})
    try:
        cfg = RunConfig(
            out=out,
            seed=seed,
            jobs=jobs,
            force=overrides.force,
            no_trend=getattr(overrides, "no_trend", False),
            keep_labeled=bool(gap_raw.get("keep_labeled", True)),
            domains=domains,
            targets=mixer.TargetSelectionParams(
                top_exclude=int(targets_raw.get("top_exclude", 500)),
                min_count=int(targets_raw.get("min_count", 50)),
            ),
            swap_probability=float(rand_raw.get("swap_probability", 0.5)),
            trials=int(rand_raw.get("trials", 5)),
            compressor=CompressorSpec(level=int(comp_raw.get("level", 9))),
            embed_reviews=train_params(
                embed_raw.get("reviews", {}), embed.review_defaults()
            ),
            embed_descriptions=train_params(
                embed_raw.get("descriptions", {}), embed.description_defaults()
            ),
            drift_params=drift_mod.DriftParams(
                k=int(drift_raw.get("k", 30)), p=int(drift_raw.get("p", 5))
            ),
            ground_truth=Path(drift_raw["ground_truth"])
            if "ground_truth" in drift_raw
            else None,
            config_snapshot=raw,
        )
    except (ValueError, mixer.ConfigurationError) as exc:
        raise UsageError(str(exc))

    if "synth" in raw:
        s = dict(raw["synth"])
        levels = s.pop("drift_levels", [0.0])
        jitter = float(s.pop("rating_jitter", 0.0))
        window = s.pop("planted_rank_window", None)
        try:
            spec = synth.SynthSpec(
                seed=seed,
                planted_rank_window=tuple(window) if window else None,
                **s,
            )
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad [synth] block: {exc}")
        cfg.synth_config = SynthConfig(spec, list(levels), jitter)
    return cfg


# ---------------------------------------------------------------------------
# Manifest


def _load_manifest(cfg: RunConfig) -> dict:
    path = cfg.out / "manifest.json"
    if path.exists():
        return json.loads(path.read_text(encoding="utf-8"))
    return {
        "seed": cfg.seed,
        "compressor": cfg.compressor.identity,
        "config": cfg.config_snapshot,
        "stages": {},
        "counts": {},
    }


def _write_manifest(cfg: RunConfig, manifest: dict) -> None:
    outputs = {}
    for file in sorted(cfg.out.rglob("*")):
        if file.is_file() and file.name != "manifest.json":
            outputs[str(file.relative_to(cfg.out))] = sha256_file(file)
    manifest["outputs"] = outputs
    path = cfg.out / "manifest.json"
    path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _stage(cfg: RunConfig, manifest: dict, name: str, seconds: float, **extra):
    manifest["stages"][name] = {"seconds": round(seconds, 3), **extra}


def _fmt(x: float) -> str:
    return format(x, ".10g")


# ---------------------------------------------------------------------------
# prep


def cmd_prep(cfg: RunConfig) -> int:
    if not cfg.domains:
        raise UsageError("prep needs a [domains] section in the config")
    t0 = time.monotonic()
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / "corpora").mkdir(exist_ok=True)
    (cfg.out / "vocab").mkdir(exist_ok=True)
    manifest = _load_manifest(cfg)
    ratings_rows = []
    for name in sorted(cfg.domains):
        paths = cfg.domains[name]
        for p in (paths.reviews, paths.meta):
            if not p.exists():
                raise DataError(f"domain {name!r}: input file missing: {p}")
        corpus_path = cfg.out / "corpora" / f"{name}.sentences.txt"
        vocab_path = cfg.out / "vocab" / f"{name}.vocab.tsv"
        newest_input = max(paths.reviews.stat().st_mtime, paths.meta.stat().st_mtime)
        if (
            not cfg.force
            and corpus_path.exists()
            and vocab_path.exists()
            and min(corpus_path.stat().st_mtime, vocab_path.stat().st_mtime)
            >= newest_input
            and name in manifest["counts"]
        ):
            log.info("prep %s: up to date, skipping", name)
            summary = manifest["counts"][name]["rating_summary"]
            ratings_rows.append(
                (name, summary["n_verified"], summary["mean"], summary["std"])
            )
            continue
        log.info("prep %s", name)
        review_counts = ingest.ParseCounts()
        meta_counts = ingest.ParseCounts()
        acc = ingest.RatingAccumulator()

        def review_sentences():
            for record in ingest.iter_reviews(paths.reviews, name, review_counts):
                if record.verified:
                    acc.add(record.rating)
                yield from textprep.sentence_records(
                    record.text, textprep.REVIEW, name, tabular=False
                )

        def desc_sentences():
            for record in ingest.iter_descriptions(paths.meta, name, meta_counts):
                yield from textprep.sentence_records(
                    record.text, textprep.DESCRIPTION, name, tabular=True
                )

        vocab = textprep.VocabStats()

        def counted(records):
            for rec in records:
                vocab.add(rec)
                yield rec

        def all_sentences():
            yield from counted(review_sentences())
            yield from counted(desc_sentences())

        n_sentences = textprep.write_corpus(corpus_path, all_sentences())
        _write_vocab_tsv(vocab_path, vocab)
        summary = acc.summary()
        ratings_rows.append((name, summary.n_verified, summary.mean, summary.std))
        manifest["counts"][name] = {
            "reviews": asdict(review_counts),
            "meta": asdict(meta_counts),
            "sentences": n_sentences,
            "rating_summary": {
                "n_verified": summary.n_verified,
                "mean": None if math.isnan(summary.mean) else summary.mean,
                "std": None if math.isnan(summary.std) else summary.std,
            },
        }
    _write_ratings_csv(cfg.out / "ratings.csv", ratings_rows)
    _stage(cfg, manifest, "prep", time.monotonic() - t0)
    _write_manifest(cfg, manifest)
    return 0


def _write_vocab_tsv(path: Path, vocab: textprep.VocabStats) -> None:
    words = set(vocab.freq_reviews) | set(vocab.freq_descriptions)
    rows = sorted(
        ((w, vocab.freq_reviews[w], vocab.freq_descriptions[w]) for w in words),
        key=lambda r: (-(r[1] + r[2]), r[0]),
    )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t")
        writer.writerow(["word", "freq_reviews", "freq_descriptions"])
        writer.writerows(rows)


def _write_ratings_csv(path: Path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["domain", "n_verified", "mean_rating", "std_rating"])
        for name, n, mean, std in sorted(rows):
            writer.writerow(
                [
                    name,
                    n,
                    "" if mean is None or math.isnan(mean) else _fmt(mean),
                    "" if std is None or math.isnan(std) else _fmt(std),
                ]
            )


# ---------------------------------------------------------------------------
# gap


def _discover_domains(cfg: RunConfig) -> list[str]:
    corpora = cfg.out / "corpora"
    if not corpora.is_dir():
        raise DataError(f"no corpora at {corpora}; run 'prep' or 'synth' first")
    names = sorted(p.name[: -len(".sentences.txt")] for p in corpora.glob("*.sentences.txt"))
    if not names:
        raise DataError(f"no corpora at {corpora}; run 'prep' or 'synth' first")
    return names


def _mixed_factory(corpus_path: Path):
    descriptions = [
        r
        for r in textprep.read_corpus(corpus_path)
        if r.source == textprep.DESCRIPTION
    ]

    def factory():
        reviews = (
            r
            for r in textprep.read_corpus(corpus_path)
            if r.source == textprep.REVIEW
        )
        return mixer.build_mixed(reviews, descriptions)

    return factory


def _gap_one(args) -> tuple[str, GapMeasurement, dict]:
    name, corpus_path, labeled_dir, cfg_tuple = args
    targets_params, swap_p, trials, seed, spec, keep_labeled = cfg_tuple
    factory = _mixed_factory(corpus_path)
    balanced = textprep.count_vocab(factory())
    targets = mixer.select_targets(balanced, targets_params)
    rand = mixer.RandomizationParams(
        swap_probability=swap_p, seed=derive_seed(seed, "gap", name), trials=trials
    )
    keep: list | None = [] if keep_labeled else None
    measurement = measure_gap(name, factory, targets, rand, spec, keep_corpora=keep)
    if keep:
        for corpus in keep:
            mixer.write_labeled(labeled_dir / f"{name}.{corpus.variant}.txt", corpus)
    _write_vocab_tsv(labeled_dir.parent / "vocab" / f"{name}.mixed_vocab.tsv", balanced)
    info = {"targets": len(targets), "labels": int(keep[0].n_labels) if keep else None}
    return name, measurement, info


def cmd_gap(cfg: RunConfig) -> int:
    t0 = time.monotonic()
    names = sorted(cfg.domains) if cfg.domains else _discover_domains(cfg)
    if len(names) < 3 and not cfg.no_trend:
        raise DataError(
            f"gap trend fit needs >= 3 domains, got {len(names)}; "
            "pass --no-trend to emit rel_delta only"
        )
    (cfg.out / "labeled").mkdir(parents=True, exist_ok=True)
    (cfg.out / "vocab").mkdir(exist_ok=True)
    manifest = _load_manifest(cfg)
    jobs = []
    for name in names:
        corpus_path = cfg.out / "corpora" / f"{name}.sentences.txt"
        if not corpus_path.exists():
            raise DataError(f"domain {name!r}: missing corpus {corpus_path}")
        jobs.append(
            (
                name,
                corpus_path,
                cfg.out / "labeled",
                (
                    cfg.targets,
                    cfg.swap_probability,
                    cfg.trials,
                    cfg.seed,
                    cfg.compressor,
                    cfg.keep_labeled,
                ),
            )
        )
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_gap_one, jobs))
    else:
        results = [_gap_one(job) for job in jobs]
    results.sort(key=lambda item: item[0])
    measurements = [m for _, m, _ in results]
    for name, m, info in results:
        log.info(
            "gap %s: delta=%.1f rel=%.5f ratio=%.4f (%s targets)",
            name, m.delta, m.rel_delta, m.compression_ratio, info["targets"],
        )

    if cfg.no_trend and len(measurements) < 3:
        table = None
    else:
        table = fit_gap_scores(measurements)
    _write_gap_csvs(cfg.out, measurements, table)
    _stage(cfg, manifest, "gap", time.monotonic() - t0, domains=len(names))
    _write_manifest(cfg, manifest)
    return 0


def _write_gap_csvs(out: Path, measurements, table) -> None:
    scores = {}
    ranks = {}
    if table is not None:
        for row in table.rows:
            scores[row.domain] = row.gap_score
            ranks[row.domain] = row.gap_rank
    with open(out / "gap_measurements.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "domain", "raw_size", "c_true", "c_rand_mean", "c_rand_std",
                "delta", "rel_delta", "compression_ratio", "gap_score", "gap_rank",
            ]
        )
        for m in sorted(measurements, key=lambda m: m.domain):
            writer.writerow(
                [
                    m.domain, m.raw_size, m.c_true, _fmt(m.c_rand_mean),
                    _fmt(m.c_rand_std), _fmt(m.delta), _fmt(m.rel_delta),
                    _fmt(m.compression_ratio),
                    _fmt(scores[m.domain]) if m.domain in scores else "",
                    ranks.get(m.domain, ""),
                ]
            )
    with open(out / "fig2.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["domain", "compression_ratio", "rel_delta", "gap_score"])
        for m in sorted(measurements, key=lambda m: m.domain):
            writer.writerow(
                [
                    m.domain,
                    _fmt(m.compression_ratio),
                    _fmt(m.rel_delta),
                    _fmt(scores[m.domain]) if m.domain in scores else "",
                ]
            )


# ---------------------------------------------------------------------------
# drift


def _drift_one(args):
    name, corpus_path, emb_dir, params_r, params_d, drift_params, seed = args
    reviews = []
    descriptions = []
    for record in textprep.read_corpus(corpus_path):
        (reviews if record.source == textprep.REVIEW else descriptions).append(
            record.tokens
        )
    params_r = replace(params_r, seed=derive_seed(seed, "embed", name, "reviews"))
    params_d = replace(params_d, seed=derive_seed(seed, "embed", name, "descriptions"))
    space_r = embed.train_cbow(reviews, params_r)
    space_d = embed.train_cbow(descriptions, params_d)
    shared = sum(1 for w in space_r.words if w in space_d)
    if shared <= drift_params.k:
        raise UsageError(
            f"domain {name!r}: k={drift_params.k} needs more than {shared} shared words"
        )
    factory = _mixed_factory(corpus_path)
    balanced = textprep.count_vocab(factory())
    ranking = drift_mod.rank_words(space_r, space_d, balanced, drift_params)
    embed.save_embeddings(space_r, emb_dir / f"{name}.reviews.emb")
    embed.save_embeddings(space_d, emb_dir / f"{name}.descriptions.emb")
    return name, ranking


def cmd_drift(cfg: RunConfig) -> int:
    t0 = time.monotonic()
    names = sorted(cfg.domains) if cfg.domains else _discover_domains(cfg)
    emb_dir = cfg.out / "embeddings"
    emb_dir.mkdir(parents=True, exist_ok=True)
    manifest = _load_manifest(cfg)
    gt = (
        drift_mod.load_ground_truth(cfg.ground_truth)
        if cfg.ground_truth is not None
        else None
    )
    jobs = []
    for name in names:
        corpus_path = cfg.out / "corpora" / f"{name}.sentences.txt"
        if not corpus_path.exists():
            raise DataError(f"domain {name!r}: missing corpus {corpus_path}")
        jobs.append(
            (
                name,
                corpus_path,
                emb_dir,
                cfg.embed_reviews,
                cfg.embed_descriptions,
                cfg.drift_params,
                cfg.seed,
            )
        )
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_drift_one, jobs))
    else:
        results = [_drift_one(job) for job in jobs]
    results.sort(key=lambda item: item[0])

    avgj_rows = []
    for name, ranking in results:
        drift_mod.write_ranking_csv(cfg.out / f"drift_{name}.csv", ranking)
        log.info("drift %s: %d words ranked", name, len(ranking))
        if gt and name in gt:
            try:
                ev = drift_mod.avg_score_at_gt(ranking, gt[name])
            except ValueError as exc:
                raise DataError(f"domain {name!r}: {exc}")
            avgj_rows.append((name, ev))
    if gt is not None and avgj_rows:
        with open(cfg.out / "avgj.csv", "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["domain", "n_truth", "prefix_len", "avg_score", "avg_jaccard"]
            )
            for name, ev in avgj_rows:
                writer.writerow(
                    [name, ev.n_truth, ev.prefix_len, _fmt(ev.avg_score), _fmt(ev.avg_jaccard)]
                )
    _stage(cfg, manifest, "drift", time.monotonic() - t0, domains=len(names))
    _write_manifest(cfg, manifest)
    return 0


# ---------------------------------------------------------------------------
# stats


def _read_csv_map(path: Path, key: str) -> dict[str, dict]:
    if not path.exists():
        raise DataError(f"missing table: {path}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return {row[key]: row for row in reader}


def cmd_stats(cfg: RunConfig) -> int:
    t0 = time.monotonic()
    manifest = _load_manifest(cfg)
    gap_table = _read_csv_map(cfg.out / "gap_measurements.csv", "domain")
    ratings_table = _read_csv_map(cfg.out / "ratings.csv", "domain")
    missing = sorted(set(gap_table) ^ set(ratings_table))
    aligned = sorted(set(gap_table) & set(ratings_table))
    if missing:
        raise DataError(
            f"domain keys differ between gap and ratings tables: {missing}"
        )
    if len(aligned) < 3:
        raise DataError(f"stats needs >= 3 aligned domains, got {len(aligned)}")
    rows = [(gap_table[d], ratings_table[d]) for d in aligned]
    if any(g["gap_score"] == "" for g, _ in rows):
        raise DataError("gap table has empty gap scores (was gap run with --no-trend?)")
    gap_scores = [float(g["gap_score"]) for g, _ in rows]
    gap_ranks = [float(g["gap_rank"]) for g, _ in rows]
    ratings = [float(r["mean_rating"]) for _, r in rows]

    report = {"n_domains": len(aligned), "domains": aligned, "tests": {}}

    def put(label, result: stats.StatResult):
        report["tests"][label] = {
            "statistic": result.statistic,
            "n": result.n,
            "p_value": result.p_value,
        }

    def battery(label, x, y):
        try:
            put(f"pearson:{label}", stats.pearson(x, y))
            put(f"spearman:{label}", stats.spearman(x, y))
        except ValueError as exc:
            report["tests"][f"pearson:{label}"] = {"error": str(exc)}

    battery("gap_score-vs-rating", gap_scores, ratings)
    battery("gap_rank-vs-rating", gap_ranks, ratings)

    avgj_path = cfg.out / "avgj.csv"
    if avgj_path.exists():
        avgj_table = _read_csv_map(avgj_path, "domain")
        shared = sorted(set(avgj_table) & set(gap_table))
        if len(shared) >= 3:
            x = [float(gap_table[d]["gap_score"]) for d in shared]
            for column in ("avg_score", "avg_jaccard"):
                y = [float(avgj_table[d][column]) for d in shared]
                battery(f"gap_score-vs-{column}", x, y)
            for column in ("avg_score", "avg_jaccard"):
                y = [float(avgj_table[d][column]) for d in shared]
                put(f"normality:{column}", stats.dagostino_k2(y))

    for label, values in (("gap_score", gap_scores), ("rating", ratings)):
        try:
            put(f"normality:{label}", stats.dagostino_k2(values))
        except ValueError as exc:
            report["tests"][f"normality:{label}"] = {"error": str(exc)}

    path = cfg.out / "stats_report.json"
    path.write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    log.info("stats: %d tests over %d domains", len(report["tests"]), len(aligned))
    _stage(cfg, manifest, "stats", time.monotonic() - t0)
    _write_manifest(cfg, manifest)
    return 0


# ---------------------------------------------------------------------------
# synth


def cmd_synth(cfg: RunConfig) -> int:
    if cfg.synth_config is None:
        raise UsageError("synth needs a [synth] section in the config")
    t0 = time.monotonic()
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / "corpora").mkdir(exist_ok=True)
    manifest = _load_manifest(cfg)
    sc = cfg.synth_config
    spec = replace(sc.spec, seed=cfg.seed)
    try:
        domains = synth.generate_suite(
            spec, sc.drift_levels, rating_jitter=sc.rating_jitter
        )
    except ValueError as exc:
        raise DataError(str(exc))
    ratings_rows = []
    truth = {"seed": cfg.seed, "domains": []}
    for dom in domains:
        corpus_path = cfg.out / "corpora" / f"{dom.name}.sentences.txt"
        n = textprep.write_corpus(corpus_path, dom.reviews + dom.descriptions)
        summary = ingest.summarize_ratings(
            (
                ingest.ReviewRecord("x", int(r), True, dom.name)
                for r in dom.ratings
            ),
            verified_only=True,
        )
        ratings_rows.append((dom.name, summary.n_verified, summary.mean, summary.std))
        truth["domains"].append(
            {
                "name": dom.name,
                "drift_strength": dom.truth.drift_strength,
                "planted": dom.truth.planted,
                "mean_rating": dom.truth.mean_rating,
                "rating_target": dom.truth.rating_target,
            }
        )
        log.info("synth %s: %d sentences, drift=%.2f", dom.name, n, dom.truth.drift_strength)
    _write_ratings_csv(cfg.out / "ratings.csv", ratings_rows)
    (cfg.out / "truth.json").write_text(
        json.dumps(truth, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _stage(cfg, manifest, "synth", time.monotonic() - t0, domains=len(domains))
    _write_manifest(cfg, manifest)
    return 0


def cmd_run_all(cfg: RunConfig) -> int:
    if cfg.synth_config is not None:
        cmd_synth(cfg)
    else:
        cmd_prep(cfg)
    cmd_gap(cfg)
    cmd_drift(cfg)
    cmd_stats(cfg)
    return 0


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # Shared between the top-level parser and every subparser so flags may
    # appear on either side of the subcommand. The subparser copies default
    # to SUPPRESS, otherwise they would overwrite already-parsed values.
    d = argparse.SUPPRESS if suppress else None
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=d, help="TOML configuration file")
    common.add_argument("--out", default=d, help="output directory (overrides config)")
    common.add_argument("--seed", type=int, default=d, help="global seed (overrides config)")
    common.add_argument("--jobs", type=int, default=d, help="parallel domain workers")
    common.add_argument(
        "--force",
        action="store_true",
        default=argparse.SUPPRESS if suppress else False,
        help="recompute even if outputs are fresh",
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        default=argparse.SUPPRESS if suppress else False,
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="semgap",
        description=__doc__,
        parents=[_global_flags(suppress=False)],
    )
    sub = parser.add_subparsers(dest="command", required=True)
    child = [_global_flags(suppress=True)]
    sub.add_parser("prep", parents=child, help="parse inputs into intermediate corpora")
    gap = sub.add_parser("gap", parents=child, help="True/Rand compression differential")
    gap.add_argument(
        "--no-trend",
        action="store_true",
        help="skip the cross-domain trend fit (emit rel_delta only)",
    )
    sub.add_parser("drift", parents=child, help="train embeddings and rank drifted words")
    sub.add_parser("stats", parents=child, help="correlate gap scores with ratings")
    sub.add_parser("synth", parents=child, help="generate synthetic domains with planted drift")
    run_all = sub.add_parser("run-all", parents=child, help="full pipeline")
    run_all.add_argument("--no-trend", action="store_true", help=argparse.SUPPRESS)
    return parser


_COMMANDS = {
    "prep": cmd_prep,
    "gap": cmd_gap,
    "drift": cmd_drift,
    "stats": cmd_stats,
    "synth": cmd_synth,
    "run-all": cmd_run_all,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        if args.config is None:
            raise UsageError("--config is required")
        cfg = load_config(Path(args.config), args)
        return _COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, ingest.LineParseError, mixer.ConfigurationError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
