"""Acceptance checks, one numbered criterion per test group.

Each criterion keeps its own oracle code so a check never validates the
implementation against itself; the summary hook in conftest prints one
PASS/FAIL line per criterion number.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import time
from collections import Counter

import numpy as np
import pytest

from paired_fixtures import FIXTURES, write_archive_payload
from test_controlflow import _icc_cases
from test_smells import CASES as SMELL_CASES

from scratchstats.cli import EXIT_OK, main
from scratchstats.controlflow import build_script_cfg, cyclomatic_complexity
from scratchstats.ingest import load_project
from scratchstats.lda import fit_lda
from scratchstats.metrics import (
    CONCEPT_TABLE,
    CONCEPTS,
    category_histogram,
    classify_concepts,
    count_blocks,
    halstead,
    interprocedural_complexity,
    wmc,
)
from scratchstats.model import (
    CATEGORIES,
    Block,
    BlockRef,
    Literal,
    MenuSelection,
    Project,
    Script,
    Sprite,
    block_category,
)
from scratchstats.projectgen import (
    build_demo_corpus,
    random_control_script,
    random_project,
)
from scratchstats.smells import (
    DETECTORS,
    SmellConfig,
    classify_clone_pair,
    count_by_detector,
    detect_smells,
    script_signature,
)
from scratchstats.stats import filter_outliers_iqr, rank_sum_test
from scratchstats.tsne import EmbeddingConfig, joint_probabilities, kl_divergence, kl_gradient, tsne


# --- criterion 1 -------------------------------------------------------------


@pytest.mark.criterion(1, "hand-built archives parse to hand counts, dialects agree")
def test_fixture_archives_parse_to_hand_counts(tmp_path):
    assert len(FIXTURES) >= 10
    started = time.perf_counter()
    for fixture in FIXTURES:
        sb2_path = write_archive_payload(tmp_path / f"{fixture.name}.sb2", fixture.sb2)
        sb3_path = write_archive_payload(tmp_path / f"{fixture.name}.sb3", fixture.sb3)
        from_sb2, _ = load_project(sb2_path)
        from_sb3, _ = load_project(sb3_path)
        for parsed in (from_sb2, from_sb3):
            label = f"{fixture.name} ({parsed.dialect})"
            assert count_blocks(parsed) == fixture.blocks, label
            assert sum(len(t.scripts) for t in parsed.targets()) == fixture.scripts, label
            assert len(parsed.sprites) == fixture.sprites, label
            assert (
                sum(len(t.orphan_stacks) for t in parsed.targets()) == fixture.orphans
            ), label
        assert (from_sb2.stage, from_sb2.sprites) == (from_sb3.stage, from_sb3.sprites), (
            f"{fixture.name}: dialects disagree"
        )
    assert time.perf_counter() - started < 5.0


# --- criterion 2 -------------------------------------------------------------


def _walk(blk: Block):
    yield blk
    for inp in blk.inputs:
        if isinstance(inp, BlockRef):
            yield from _walk(inp.block)
    for stack in blk.substacks:
        for child in stack:
            yield from _walk(child)


def _all_blocks(project: Project) -> list[Block]:
    out: list[Block] = []
    for target in (project.stage,) + project.sprites:
        for s in target.scripts:
            out.extend(_walk(s.hat))
            for blk in s.body:
                out.extend(_walk(blk))
        for stack in target.orphan_stacks:
            for blk in stack:
                out.extend(_walk(blk))
    return out


def _close(actual: float, expected: float, rel: float = 1e-12) -> bool:
    return abs(actual - expected) <= rel * max(1.0, abs(expected))


@pytest.fixture(scope="module")
def thousand_projects() -> list[Project]:
    rng = random.Random(20260814)
    return [random_project(f"acc{i:04d}", rng) for i in range(1000)]


@pytest.mark.criterion(2, "counts and Halstead identities vs brute-force oracle")
def test_counts_match_recursive_oracle(thousand_projects):
    for project in thousand_projects:
        blocks = _all_blocks(project)
        assert count_blocks(project) == len(blocks), project.project_id

        expected_hist = Counter(block_category(b.opcode) for b in blocks)
        assert category_histogram(project) == {
            c: expected_hist.get(c, 0) for c in CATEGORIES
        }, project.project_id

        expected_concepts: Counter = Counter()
        for blk in blocks:
            for concept, opcodes in CONCEPT_TABLE.items():
                if blk.opcode in opcodes:
                    expected_concepts[concept] += 1
        assert classify_concepts(project) == {
            c: expected_concepts.get(c, 0) for c in CONCEPTS
        }, project.project_id


@pytest.mark.criterion(2, "counts and Halstead identities vs brute-force oracle")
def test_halstead_counters_and_identities(thousand_projects):
    nontrivial = 0
    for project in thousand_projects:
        blocks = _all_blocks(project)
        operators = [b.opcode for b in blocks]
        operands = [
            str(inp.value)
            for b in blocks
            for inp in b.inputs
            if isinstance(inp, (Literal, MenuSelection))
        ]
        h = halstead(project)
        assert (h.N1, h.N2, h.n1, h.n2) == (
            len(operators), len(operands), len(set(operators)), len(set(operands))
        ), project.project_id

        assert h.length == h.N1 + h.N2
        assert h.vocabulary == h.n1 + h.n2
        if h.vocabulary > 1:
            assert _close(h.volume, h.length * math.log2(h.vocabulary))
            assert _close(h.effort, h.difficulty * h.volume)
            if h.n2 > 0:
                assert _close(h.difficulty, (h.n1 / 2.0) * (h.N2 / h.n2))
            nontrivial += 1
    assert nontrivial >= 900


# --- criterion 3 -------------------------------------------------------------

# restated by hand: the branch/loop statements that add a decision each
_BRANCHING = frozenset(
    {
        "control_if",
        "control_if_else",
        "control_repeat",
        "control_repeat_until",
        "control_wait_until",
        "control_forever",
    }
)


def _decision_tally(blocks) -> int:
    total = 0
    for blk in blocks:
        if blk.opcode in _BRANCHING:
            total += 1
        for stack in blk.substacks:
            total += _decision_tally(stack)
    return total


@pytest.mark.criterion(3, "CC identity, hand-tallied ICC, WMC additivity")
def test_cc_is_decisions_plus_one_on_generator_scripts():
    rng = random.Random(31415)
    deep = 0
    for _ in range(1000):
        s = random_control_script(rng, max_depth=4)
        cc = cyclomatic_complexity(build_script_cfg(s))
        assert cc == _decision_tally((s.hat,) + s.body) + 1
        deep += _decision_tally((s.hat,) + s.body) >= 4
    assert deep >= 50  # the generator must actually exercise deep nesting


@pytest.mark.criterion(3, "CC identity, hand-tallied ICC, WMC additivity")
def test_hand_tallied_icc_fixtures():
    cases = _icc_cases()
    assert len(cases) >= 10
    assert sum("broadcast" in name or "send" in name for name, _, _ in cases) >= 3
    for name, project, expected in cases:
        assert interprocedural_complexity(project) == expected, name


@pytest.mark.criterion(3, "CC identity, hand-tallied ICC, WMC additivity")
def test_wmc_adds_up_under_sprite_duplication():
    from dataclasses import replace

    rng = random.Random(424242)
    checked = 0
    for i in range(60):
        project = random_project(f"dup{i:02d}", rng)
        if not project.sprites:
            continue
        original = project.sprites[0]
        copy = replace(original, name=f"{original.name} copy")
        duplicated = replace(project, sprites=project.sprites + (copy,))
        contribution = sum(
            cyclomatic_complexity(build_script_cfg(s)) for s in original.scripts
        )
        assert wmc(duplicated) == wmc(project) + contribution
        checked += 1
    assert checked >= 50


# --- criterion 4 -------------------------------------------------------------


@pytest.mark.criterion(4, "labeled smell corpus and clone-pair properties")
def test_smell_corpus_agreement_is_total():
    config = SmellConfig()
    positives: Counter = Counter()
    negatives: Counter = Counter()
    for name, project, expected in SMELL_CASES:
        found = count_by_detector(detect_smells(project, config))
        for detector in DETECTORS:
            want = expected.get(detector, 0)
            assert found.get(detector, 0) == want, (name, detector)
            if want > 0:
                positives[detector] += 1
            else:
                negatives[detector] += 1
    assert len(DETECTORS) == 12
    for detector in DETECTORS:
        assert positives[detector] >= 3, detector
        assert negatives[detector] >= 3, detector


def _opcode_seq(s: Script) -> tuple[str, ...]:
    return tuple(b.opcode for b in _walk_script(s))


def _walk_script(s: Script):
    def inner(blk: Block):
        yield blk
        for stack in blk.substacks:
            for child in stack:
                yield from inner(child)

    yield from inner(s.hat)
    for blk in s.body:
        yield from inner(blk)


@pytest.mark.criterion(4, "labeled smell corpus and clone-pair properties")
def test_clone_types_are_symmetric_and_disjoint():
    config = SmellConfig(long_script_threshold=12, clone_min_length=2,
                         clone_type3_max_gap=2)
    rng = random.Random(77)
    scripts = [random_control_script(rng, max_depth=2) for _ in range(40)]
    labeled = 0
    for a, b in itertools.combinations(scripts, 2):
        label_ab = classify_clone_pair(a, b, config)
        assert label_ab == classify_clone_pair(b, a, config)
        if label_ab is None:
            continue
        labeled += 1
        # each type excludes the stricter ones by its defining predicate
        if label_ab == "CloneType1":
            assert script_signature(a) == script_signature(b)
        elif label_ab == "CloneType2":
            assert script_signature(a) != script_signature(b)
            assert _opcode_seq(a) == _opcode_seq(b)
        else:
            assert label_ab == "CloneType3"
            assert _opcode_seq(a) != _opcode_seq(b)
    assert labeled >= 20


# --- criterion 5 -------------------------------------------------------------


@pytest.mark.criterion(5, "LDA bound, stochasticity, separation, determinism")
def test_topic_model_properties():
    started = time.perf_counter()

    # bound is non-decreasing on 50 random corpora
    rng = np.random.default_rng(5050)
    for trial in range(50):
        docs = int(rng.integers(3, 12))
        terms = int(rng.integers(2, 10))
        counts = (rng.integers(0, 5, size=(docs, terms))
                  * (rng.random((docs, terms)) < 0.6)).astype(float)
        if counts.sum() == 0:
            counts[0, 0] = 1.0
        model = fit_lda(counts, k=int(rng.integers(1, 5)),
                        seed=int(rng.integers(0, 10_000)), max_iterations=6)
        for earlier, later in zip(model.elbo, model.elbo[1:]):
            assert later >= earlier - 1e-8 * max(1.0, abs(earlier)), (
                f"corpus {trial}: bound fell from {earlier} to {later}"
            )

    # rows are stochastic within 1e-9
    counts = (rng.integers(0, 6, size=(15, 12))).astype(float)
    model = fit_lda(counts, k=4, seed=9, max_iterations=10)
    assert np.max(np.abs(model.doc_topic.sum(axis=1) - 1.0)) < 1e-9
    assert np.max(np.abs(model.topic_word.sum(axis=1) - 1.0)) < 1e-9

    # 20 documents over two disjoint two-term vocabularies separate
    toy = np.zeros((20, 4))
    toy_rng = np.random.default_rng(11)
    toy[:10, 0:2] = toy_rng.integers(3, 8, size=(10, 2))
    toy[10:, 2:4] = toy_rng.integers(3, 8, size=(10, 2))
    toy_model = fit_lda(toy, k=2, seed=21, max_iterations=30)
    dominant = toy_model.dominant_topics()
    assert len(set(dominant[:10].tolist())) == 1
    assert len(set(dominant[10:].tolist())) == 1
    assert dominant[0] != dominant[10]
    assert float(toy_model.doc_topic.max(axis=1).min()) > 0.9

    # fixed seed reproduces bytes
    again = fit_lda(toy, k=2, seed=21, max_iterations=30)
    assert again.doc_topic.tobytes() == toy_model.doc_topic.tobytes()
    assert again.topic_word.tobytes() == toy_model.topic_word.tobytes()

    assert time.perf_counter() - started < 30.0


# --- criterion 6 -------------------------------------------------------------


@pytest.mark.criterion(6, "t-SNE gradient, blob separation, determinism")
def test_analytic_gradient_against_central_differences():
    rng = np.random.default_rng(606)
    step = 1e-5
    for trial in range(20):
        points = rng.normal(size=(5, 3))
        p = joint_probabilities(points, perplexity=2.0)
        embedding = rng.normal(size=(5, 2))
        analytic = kl_gradient(p, embedding)
        numeric = np.zeros_like(embedding)
        for i in range(5):
            for d in range(2):
                plus = embedding.copy()
                plus[i, d] += step
                minus = embedding.copy()
                minus[i, d] -= step
                numeric[i, d] = (
                    kl_divergence(p, plus) - kl_divergence(p, minus)
                ) / (2 * step)
        error = np.linalg.norm(analytic - numeric) / np.linalg.norm(numeric)
        assert error <= 1e-4, f"instance {trial}: relative error {error}"


@pytest.mark.criterion(6, "t-SNE gradient, blob separation, determinism")
def test_two_gaussian_blobs_separate_by_factor_three():
    rng = np.random.default_rng(607)
    blob_a = rng.normal(0.0, 0.5, size=(10, 5))
    blob_b = rng.normal(0.0, 0.5, size=(10, 5)) + 12.0
    points = np.vstack([blob_a, blob_b])
    result = tsne(points, EmbeddingConfig(perplexity=5.0, iterations=600))
    coords = result.coordinates
    centroid_a = coords[:10].mean(axis=0)
    centroid_b = coords[10:].mean(axis=0)
    between = float(np.linalg.norm(centroid_a - centroid_b))
    within = float(np.mean(np.concatenate([
        np.linalg.norm(coords[:10] - centroid_a, axis=1),
        np.linalg.norm(coords[10:] - centroid_b, axis=1),
    ])))
    assert between > 3.0 * within, f"between {between}, within {within}"


@pytest.mark.criterion(6, "t-SNE gradient, blob separation, determinism")
def test_embedding_reruns_bit_identical():
    rng = np.random.default_rng(608)
    points = rng.normal(size=(12, 6))
    config = EmbeddingConfig(perplexity=3.0, iterations=250)
    first = tsne(points, config)
    second = tsne(points.copy(), config)
    assert first.coordinates.tobytes() == second.coordinates.tobytes()
    assert first.kl_checkpoints == second.kl_checkpoints


# --- criterion 7 -------------------------------------------------------------


def _enumerated_p(a: list[float], b: list[float]) -> float:
    """Independent exact p: walk every split of the pooled ranks."""
    pooled = a + b
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    ranks = [0] * len(pooled)
    for position, index in enumerate(order):
        ranks[index] = position + 1  # tie-free by construction
    n_a = len(a)
    mu2 = n_a * len(b)  # 2 * mean of U
    offset = n_a * (n_a + 1)
    observed = abs(2 * sum(ranks[:n_a]) - offset - mu2)
    extreme = total = 0
    for combo in itertools.combinations(ranks, n_a):
        total += 1
        if abs(2 * sum(combo) - offset - mu2) >= observed:
            extreme += 1
    return extreme / total


@pytest.mark.criterion(7, "rank-sum oracle, invariance, IQR filter")
def test_exact_p_for_every_tiefree_sample_up_to_eight():
    for n in range(2, 9):
        for n_a in range(1, n):
            for combo in itertools.combinations(range(1, n + 1), n_a):
                a = [float(v) for v in combo]
                b = [float(v) for v in range(1, n + 1) if v not in combo]
                result = rank_sum_test(a, b)
                assert result.method == "exact"
                assert result.p_value == pytest.approx(
                    _enumerated_p(a, b), abs=1e-15
                ), (n_a, n - n_a, combo)


@pytest.mark.criterion(7, "rank-sum oracle, invariance, IQR filter")
def test_textbook_example_gives_point_one():
    result = rank_sum_test([1, 2, 3], [4, 5, 6])
    assert result.u_statistic == 0.0
    assert result.p_value == pytest.approx(0.1, abs=1e-15)


@pytest.mark.criterion(7, "rank-sum oracle, invariance, IQR filter")
def test_monotone_transform_invariance_on_100_pairs():
    rng = random.Random(714)
    transforms = (lambda x: math.exp(x / 5.0), lambda x: 10.0 * x - 3.0,
                  lambda x: x ** 3, math.atan)
    for trial in range(100):
        a = [float(rng.randint(-9, 9)) for _ in range(rng.randint(2, 7))]
        b = [float(rng.randint(-9, 9)) for _ in range(rng.randint(2, 7))]
        base = rank_sum_test(a, b)
        transform = transforms[trial % len(transforms)]
        mapped = rank_sum_test([transform(v) for v in a], [transform(v) for v in b])
        assert mapped.u_statistic == base.u_statistic
        assert mapped.p_value == base.p_value


@pytest.mark.criterion(7, "rank-sum oracle, invariance, IQR filter")
def test_iqr_filter_hand_example_and_idempotence():
    assert filter_outliers_iqr([1, 2, 3, 4, 100]) == [1.0, 2.0, 3.0, 4.0]
    rng = random.Random(715)
    for _ in range(200):
        values = [rng.gauss(0, 10) for _ in range(rng.randint(0, 25))]
        if rng.random() < 0.5 and values:
            values.append(rng.choice((1e6, -1e6)))
        once = filter_outliers_iqr(values)
        assert filter_outliers_iqr(once) == once


# --- criterion 8 -------------------------------------------------------------


@pytest.mark.criterion(8, "end-to-end direction on planted groups, byte-stable")
def test_pipeline_reports_planted_direction_and_reproduces(tmp_path):
    started = time.perf_counter()
    corpus = tmp_path / "corpus"
    build_demo_corpus(corpus, seed=7)
    config = tmp_path / "run.toml"
    config.write_text(
        "[lda]\nk = 4\nmin_count = 3\n\n[tsne]\nperplexity = 5.0\niterations = 400\n",
        encoding="utf-8",
    )

    outputs = []
    for run in ("one", "two"):
        out = tmp_path / run
        base = ["--input", str(corpus), "--metadata", str(corpus / "metadata.csv"),
                "--out", str(out), "--config", str(config)]
        assert main(["analyze", *base]) == EXIT_OK
        assert main(["topics", *base, "--embed"]) == EXIT_OK
        assert main(["compare", "--out", str(out), "--config", str(config)]) == EXIT_OK
        outputs.append(out)

    payload = json.loads((outputs[0] / "report.json").read_text(encoding="utf-8"))
    games = payload["groups"]["game"]["metrics"]
    stories = payload["groups"]["story"]["metrics"]
    for metric in ("conditional", "icc", "halstead_difficulty"):
        assert games[metric]["mean"] > stories[metric]["mean"], metric

    first = {
        str(p.relative_to(outputs[0])): p.read_bytes()
        for p in sorted(outputs[0].rglob("*")) if p.is_file()
    }
    second = {
        str(p.relative_to(outputs[1])): p.read_bytes()
        for p in sorted(outputs[1].rglob("*")) if p.is_file()
    }
    assert first.keys() == second.keys()
    for name in first:
        assert first[name] == second[name], f"{name} differs between runs"

    assert time.perf_counter() - started < 60.0
