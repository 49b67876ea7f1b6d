"""Command line interface.

Four subcommands over a directory of project archives:

* ``analyze``  - parse everything, write metric and smell tables
* ``topics``   - token extraction, topic model, optional 2-d embedding
* ``compare``  - group statistics over the analyze/topics outputs
* ``inspect``  - dump one project (AST, metrics, smells) or its call graph

Exit codes: 0 success, 1 fatal ingest problem, 2 empty corpus, 3 empty
vocabulary, 4 missing upstream artifact.

Reruns with the same inputs, seed and configuration produce byte-identical
outputs; iteration orders are fixed and no timestamps are written.  The
topic model consumes the configured seed directly, the embedding uses
seed + 1 so the two stages stay independently reproducible.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from collections import Counter
from dataclasses import dataclass, fields, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import ingest, lda, metrics, report, smells, topics
from .model import iter_project_blocks, project_to_dict
from .controlflow import build_interprocedural_cfg, to_dot
from .tsne import EmbeddingConfig, tsne as fit_tsne

EXIT_OK = 0
EXIT_INGEST = 1
EXIT_EMPTY_CORPUS = 2
EXIT_EMPTY_VOCABULARY = 3
EXIT_MISSING_UPSTREAM = 4


@dataclass(frozen=True)
class RunConfig:
    """Effective settings after merging defaults, config file and flags."""

    input: str = "."
    metadata: str | None = None
    out: str = "out"
    seed: int = 100
    jobs: int = 1
    strict: bool = False
    embed: bool = False
    k: int = 10
    lda_iterations: int = 10
    alpha: float | None = None
    beta: float | None = None
    min_count: int = 10
    perplexity: float = 15.0
    tsne_iterations: int = 1000
    long_script_threshold: int = 12
    clone_min_length: int = 6
    clone_type3_max_gap: int = 2
    extra_stopwords: tuple[str, ...] = ()


_CONFIG_SECTIONS = {
    "lda": {
        "k": "k",
        "max_iterations": "lda_iterations",
        "alpha": "alpha",
        "beta": "beta",
        "min_count": "min_count",
    },
    "tsne": {"perplexity": "perplexity", "iterations": "tsne_iterations"},
    "smells": {
        "long_script_threshold": "long_script_threshold",
        "clone_min_length": "clone_min_length",
        "clone_type3_max_gap": "clone_type3_max_gap",
    },
    "topics": {"extra_stopwords": "extra_stopwords"},
}

_CONFIG_TOPLEVEL = {"seed": "seed", "jobs": "jobs", "strict": "strict"}


def load_config_file(path: str | Path) -> dict:
    """Flat dict of RunConfig field overrides from a TOML file."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    overrides: dict = {}
    for key, dest in _CONFIG_TOPLEVEL.items():
        if key in data:
            overrides[dest] = data[key]
    for section, mapping in _CONFIG_SECTIONS.items():
        body = data.get(section, {})
        if not isinstance(body, dict):
            raise ValueError(f"config section [{section}] must be a table")
        for key, dest in mapping.items():
            if key in body:
                value = body[key]
                if dest == "extra_stopwords":
                    value = tuple(str(v) for v in value)
                overrides[dest] = value
    known = {s for m in _CONFIG_SECTIONS.values() for s in m} | set(_CONFIG_TOPLEVEL)
    for section, body in data.items():
        if section in _CONFIG_SECTIONS:
            unknown = set(body) - set(_CONFIG_SECTIONS[section])
            if unknown:
                raise ValueError(f"unknown keys in [{section}]: {sorted(unknown)}")
        elif section not in _CONFIG_TOPLEVEL:
            raise ValueError(f"unknown config key {section!r}")
    return overrides


_INT_FIELDS = {
    "seed": 0,
    "jobs": 1,
    "k": 1,
    "lda_iterations": 1,
    "min_count": 1,
    "tsne_iterations": 1,
    "long_script_threshold": 1,
    "clone_min_length": 1,
    "clone_type3_max_gap": 0,
}
_FLOAT_FIELDS = {"alpha", "beta", "perplexity"}


def _validate_config(cfg: RunConfig) -> RunConfig:
    for name, floor in _INT_FIELDS.items():
        value = getattr(cfg, name)
        if not isinstance(value, int) or isinstance(value, bool):
            raise ValueError(f"{name} must be an integer, got {value!r}")
        if value < floor:
            raise ValueError(f"{name} must be >= {floor}, got {value}")
    for name in _FLOAT_FIELDS:
        value = getattr(cfg, name)
        if value is None:
            continue
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"{name} must be a number, got {value!r}")
        if value <= 0:
            raise ValueError(f"{name} must be positive, got {value}")
    if not isinstance(cfg.strict, bool):
        raise ValueError(f"strict must be a boolean, got {cfg.strict!r}")
    return cfg


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = replace(cfg, **load_config_file(args.config))
    # explicit flags beat the config file; argparse stores None when absent
    flag_names = {f.name for f in fields(RunConfig)}
    overrides = {}
    for name in flag_names:
        value = getattr(args, name, None)
        if value is not None and value is not False:
            overrides[name] = value
    return _validate_config(replace(cfg, **overrides))


def _smell_config(cfg: RunConfig) -> smells.SmellConfig:
    return smells.SmellConfig(
        long_script_threshold=cfg.long_script_threshold,
        clone_min_length=cfg.clone_min_length,
        clone_type3_max_gap=cfg.clone_type3_max_gap,
    )


def _write_diagnostics(
    out_dir: Path, command: str, cfg: RunConfig, corpus: ingest.Corpus
) -> None:
    """One JSON object per line: a run record, then every ingest warning."""
    lines = [
        json.dumps(
            {
                "event": "run",
                "command": command,
                "input": cfg.input,
                "seed": cfg.seed,
                "projects": len(corpus.projects),
                "warnings": len(corpus.warnings),
            },
            sort_keys=True,
        )
    ]
    for w in corpus.warnings:
        lines.append(
            json.dumps(
                {"event": "warning", "code": w.code, "path": w.path, "detail": w.detail},
                sort_keys=True,
            )
        )
    (out_dir / f"diagnostics_{command}.jsonl").write_text(
        "\n".join(lines) + "\n", encoding="utf-8"
    )


def _load(cfg: RunConfig) -> ingest.Corpus:
    return ingest.load_corpus(
        cfg.input, metadata_path=cfg.metadata, strict=cfg.strict, jobs=cfg.jobs
    )


# ---------------------------------------------------------------------------
# analyze


def cmd_analyze(cfg: RunConfig) -> int:
    corpus = _load(cfg)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    records = [
        metrics.compute_metric_record(
            p, group=corpus.group_of(p.project_id), age=corpus.age_of(p.project_id)
        )
        for p in corpus.projects
    ]
    metrics.write_metrics_csv(records, out_dir / "metrics.csv")

    with (out_dir / "opcodes.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["project_id", "opcode", "count"])
        for p in corpus.projects:
            counts = Counter(b.opcode for b in iter_project_blocks(p))
            for opcode in sorted(counts):
                writer.writerow([p.project_id, opcode, counts[opcode]])

    smell_cfg = _smell_config(cfg)
    per_project = [
        (p.project_id, smells.detect_smells(p, smell_cfg)) for p in corpus.projects
    ]
    smells.write_smells_csv(per_project, out_dir / "smells.csv")
    with_groups = [
        (pid, corpus.group_of(pid), findings) for pid, findings in per_project
    ]
    smells.write_smells_summary_csv(
        smells.summarize_smells(with_groups), out_dir / "smells_summary.csv"
    )

    _write_diagnostics(out_dir, "analyze", cfg, corpus)
    excluded = sum(1 for w in corpus.warnings if w.excludes_archive)
    print(
        f"analyzed {len(corpus.projects)} projects "
        f"({excluded} archives excluded, {len(corpus.warnings)} warnings) -> {out_dir}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# topics


def cmd_topics(cfg: RunConfig) -> int:
    corpus = _load(cfg)
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    stopword_cfg = topics.StopwordConfig(extra=cfg.extra_stopwords)
    documents = [
        topics.preprocess(topics.extract_tokens(p), stopword_cfg)
        for p in corpus.projects
    ]
    dtm = topics.build_dtm(documents, min_count=cfg.min_count)
    model = lda.fit_lda(
        dtm.counts,
        k=cfg.k,
        seed=cfg.seed,
        max_iterations=cfg.lda_iterations,
        alpha=cfg.alpha,
        beta=cfg.beta,
    )

    (out_dir / "vocabulary.txt").write_text(
        "\n".join(dtm.vocabulary) + "\n", encoding="utf-8"
    )

    empty_rows = lda.empty_document_rows(dtm.counts)
    topics_payload = {
        "k": model.k,
        "seed": model.seed,
        "alpha": model.alpha,
        "beta": model.beta,
        "iterations": len(model.elbo),
        "elbo": [round(v, 6) for v in model.elbo],
        "vocabulary_size": len(dtm.vocabulary),
        "documents": len(dtm.doc_ids),
        "empty_documents": [dtm.doc_ids[i] for i in empty_rows],
        "topics": [
            {
                "id": t,
                "top_terms": [
                    [term, round(weight, 6)]
                    for term, weight in lda.top_terms(model, dtm.vocabulary, t)
                ],
            }
            for t in range(model.k)
        ],
    }
    (out_dir / "topics.json").write_text(
        json.dumps(topics_payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )

    coords = None
    if cfg.embed:
        result = fit_tsne(
            model.doc_topic,
            EmbeddingConfig(
                perplexity=cfg.perplexity,
                iterations=cfg.tsne_iterations,
                seed=cfg.seed + 1,
            ),
        )
        coords = result.coordinates
        with (out_dir / "embedding.csv").open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["project_id", "x", "y"])
            for i, pid in enumerate(dtm.doc_ids):
                writer.writerow([pid, f"{coords[i, 0]:.6f}", f"{coords[i, 1]:.6f}"])

    dominant = model.dominant_topics()
    header = ["project_id", "group", "dominant_topic", "probability"]
    header += [f"topic_{t}" for t in range(model.k)]
    if coords is not None:
        header += ["x", "y"]
    with (out_dir / "assignments.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, pid in enumerate(dtm.doc_ids):
            row = [
                pid,
                corpus.group_of(pid),
                int(dominant[i]),
                f"{model.doc_topic[i, dominant[i]]:.6f}",
            ]
            row += [f"{v:.6f}" for v in model.doc_topic[i]]
            if coords is not None:
                row += [f"{coords[i, 0]:.6f}", f"{coords[i, 1]:.6f}"]
            writer.writerow(row)

    _write_diagnostics(out_dir, "topics", cfg, corpus)
    print(
        f"modeled {len(dtm.doc_ids)} documents, k={model.k}, "
        f"vocabulary={len(dtm.vocabulary)} -> {out_dir}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# compare


def _require(path: Path) -> Path:
    if not path.exists():
        raise report.MissingUpstreamError(
            f"{path} not found; run the earlier pipeline stages first"
        )
    return path


def _read_csv_rows(path: Path) -> list[dict]:
    with path.open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def cmd_compare(cfg: RunConfig) -> int:
    out_dir = Path(cfg.out)
    metric_rows = _read_csv_rows(_require(out_dir / "metrics.csv"))
    smell_rows = _read_csv_rows(_require(out_dir / "smells.csv"))
    assign_rows = _read_csv_rows(_require(out_dir / "assignments.csv"))
    opcode_rows = _read_csv_rows(_require(out_dir / "opcodes.csv"))
    topics_meta = json.loads(_require(out_dir / "topics.json").read_text("utf-8"))

    group_of = {r["project_id"]: r["group"] for r in metric_rows}
    values: dict[str, dict[str, float]] = {}
    for r in metric_rows:
        row_values = {
            c: float(r[c]) for c in metrics.NUMERIC_METRIC_COLUMNS if r.get(c, "") != ""
        }
        values[r["project_id"]] = row_values
    for r in smell_rows:
        pid = r["project_id"]
        if pid in values:
            values[pid][f"smell_{r['detector']}"] = float(r["count"])

    projects = [
        report.ProjectValues(pid, group_of.get(pid, "unknown"), vals)
        for pid, vals in sorted(values.items())
    ]
    comparisons = report.compare_groups(projects)
    assignments = [
        (r["project_id"], r["group"], int(r["dominant_topic"])) for r in assign_rows
    ]
    shares = report.topic_shares(assignments, k=int(topics_meta["k"]))
    opcode_tables = report.top_opcodes(
        [(r["project_id"], r["opcode"], int(r["count"])) for r in opcode_rows],
        group_of,
    )

    payload = report.build_report(projects, comparisons, shares, opcode_tables)
    report.write_report_json(payload, out_dir / "report.json")
    report.write_comparisons_csv(comparisons, out_dir / "comparisons.csv")
    report.write_plotdata(projects, out_dir / "plotdata")

    significant = [c for c in comparisons if c.p_value < 0.05]
    print(
        f"compared {len(projects)} projects across "
        f"{len({p.group for p in projects})} groups: "
        f"{len(comparisons)} tests, {len(significant)} with p < 0.05 -> {out_dir}"
    )
    for c in significant[:10]:
        print(
            f"  {c.metric}: {c.group_a} vs {c.group_b} "
            f"U={c.u_statistic:g} p={c.p_value:.4f} ({c.method})"
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# inspect


def cmd_inspect(path: str, show_cfg: bool, out: str | None, cfg: RunConfig) -> int:
    project, warnings = ingest.load_project(path)
    if show_cfg:
        text = to_dot(build_interprocedural_cfg(project))
    else:
        findings = smells.detect_smells(project, _smell_config(cfg))
        row = metrics.record_to_row(metrics.compute_metric_record(project))
        tokens = topics.extract_tokens(project)
        payload = {
            "project": project_to_dict(project),
            "metrics": {
                c: row[c]
                for c in metrics.METRICS_COLUMNS
                if c not in ("project_id", "group", "age")
            },
            "smells": [
                {
                    "detector": f.detector,
                    "sprite": f.location.sprite,
                    "message": f.message,
                }
                for f in findings
            ],
            "tokens": list(tokens.tokens),
            "warnings": [
                {"code": w.code, "detail": w.detail} for w in warnings
            ],
        }
        text = json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser: argparse.ArgumentParser, with_embed: bool = False) -> None:
    parser.add_argument("--input", help="directory of .sb2/.sb3 archives")
    parser.add_argument("--metadata", help="CSV with project_id,group,age")
    parser.add_argument("--out", help="output directory (default: out)")
    parser.add_argument("--seed", type=int, help="random seed (default: 100)")
    parser.add_argument("--jobs", type=int, help="parallel archive parsing")
    parser.add_argument(
        "--strict", action="store_true", default=None,
        help="escalate ingest warnings to errors",
    )
    parser.add_argument("--config", help="TOML configuration file")
    if with_embed:
        parser.add_argument(
            "--embed", action="store_true", default=None,
            help="attach a 2-d embedding of the topic mixtures",
        )


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scratchstats",
        description="Corpus analysis for Scratch project archives",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="metrics and smell tables")
    _add_common(p_analyze)

    p_topics = sub.add_parser("topics", help="topic model over project text")
    _add_common(p_topics, with_embed=True)

    p_compare = sub.add_parser("compare", help="group statistics and report")
    p_compare.add_argument("--out", help="directory holding earlier outputs")
    p_compare.add_argument("--config", help="TOML configuration file")

    p_inspect = sub.add_parser("inspect", help="dump one project")
    p_inspect.add_argument("archive", help="path to one .sb2/.sb3 file")
    p_inspect.add_argument(
        "--cfg", action="store_true", help="print the call graph in DOT form"
    )
    p_inspect.add_argument("--out", help="write to a file instead of stdout")
    p_inspect.add_argument("--config", help="TOML configuration file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
    except (ValueError, OSError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_INGEST
    try:
        if args.command == "analyze":
            return cmd_analyze(cfg)
        if args.command == "topics":
            return cmd_topics(cfg)
        if args.command == "compare":
            return cmd_compare(cfg)
        if args.command == "inspect":
            return cmd_inspect(args.archive, args.cfg, args.out, cfg)
        raise AssertionError(f"unhandled command {args.command!r}")
    except ingest.EmptyCorpusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY_CORPUS
    except topics.EmptyVocabularyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY_VOCABULARY
    except report.MissingUpstreamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_UPSTREAM
    except ingest.IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INGEST


if __name__ == "__main__":
    sys.exit(main())
