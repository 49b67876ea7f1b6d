"""Latent Dirichlet allocation via batch variational Bayes.

Mean-field factorization q(theta, z, beta) with Dirichlet variational
parameters gamma (documents) and lambda (topics).  Each outer iteration
runs a per-document E-step to convergence, then a closed-form M-step.
Document gammas are warm-started across outer iterations, which makes the
evidence lower bound non-decreasing; fit() asserts that property.

Determinism: the only random draw is the Gamma initialization of lambda,
taken from a seeded generator.  Document-side initialization is a fixed
function of the document's own counts (alpha + n_d / k), so shuffling the
corpus and unshuffling the result reproduces the same rows up to float
reduction order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, psi

# Per-document E-step: fixed cap, early exit on mean absolute change.
_INNER_ITERATIONS = 100
_INNER_TOL = 1e-4
_ELBO_SLACK = 1e-8


@dataclass(frozen=True)
class TopicModel:
    doc_topic: np.ndarray  # (documents, k), rows sum to 1
    topic_word: np.ndarray  # (k, terms), rows sum to 1
    elbo: tuple[float, ...]  # one value per outer iteration
    k: int
    alpha: float
    beta: float
    seed: int

    def dominant_topics(self) -> np.ndarray:
        """Argmax per row; ties resolve to the lowest topic id."""
        return np.argmax(self.doc_topic, axis=1)


def _dirichlet_expectation(param: np.ndarray) -> np.ndarray:
    """E[log X] for X ~ Dirichlet(param), rows independent."""
    if param.ndim == 1:
        return psi(param) - psi(np.sum(param))
    return psi(param) - psi(np.sum(param, axis=1))[:, np.newaxis]


def _elbo(
    counts: np.ndarray,
    gamma: np.ndarray,
    lam: np.ndarray,
    alpha: float,
    beta: float,
) -> float:
    """Evidence lower bound of the full corpus under (gamma, lambda)."""
    n_docs, n_terms = counts.shape
    k = lam.shape[0]
    elog_theta = _dirichlet_expectation(gamma)
    elog_beta = _dirichlet_expectation(lam)

    # E_q[log p(w | theta, beta, z)] with z marginalized inside the bound:
    # sum_dv n_dv * log sum_k exp(Elog theta_dk + Elog beta_kv).
    score = 0.0
    for d in range(n_docs):
        ids = np.nonzero(counts[d])[0]
        if ids.size == 0:
            continue
        combined = elog_theta[d][:, np.newaxis] + elog_beta[:, ids]
        peak = np.max(combined, axis=0)
        log_phi_norm = peak + np.log(np.sum(np.exp(combined - peak), axis=0))
        score += float(np.dot(counts[d, ids], log_phi_norm))

    # E_q[log p(theta | alpha)] - E_q[log q(theta | gamma)]
    score += float(np.sum((alpha - gamma) * elog_theta))
    score += float(np.sum(gammaln(gamma) - gammaln(alpha)))
    score += float(np.sum(gammaln(alpha * k) - gammaln(np.sum(gamma, axis=1))))

    # E_q[log p(beta | eta)] - E_q[log q(beta | lambda)]
    score += float(np.sum((beta - lam) * elog_beta))
    score += float(np.sum(gammaln(lam) - gammaln(beta)))
    score += float(np.sum(gammaln(beta * n_terms) - gammaln(np.sum(lam, axis=1))))
    return score


def fit_lda(
    counts: np.ndarray,
    k: int = 10,
    seed: int = 100,
    max_iterations: int = 10,
    alpha: float | None = None,
    beta: float | None = None,
) -> TopicModel:
    """Fit the topic model on a document-term count matrix.

    Empty documents are legal: their gamma never moves off the prior, so
    the returned row is exactly uniform.
    """
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim != 2:
        raise ValueError("counts must be a 2-d matrix")
    if np.any(counts < 0):
        raise ValueError("counts must be non-negative")
    if k < 1:
        raise ValueError("k must be at least 1")
    n_docs, n_terms = counts.shape
    if n_terms == 0:
        raise ValueError("vocabulary is empty")
    if alpha is None:
        alpha = 1.0 / k
    if beta is None:
        beta = 1.0 / k

    rng = np.random.default_rng(seed)
    lam = rng.gamma(100.0, 0.01, (k, n_terms))
    # Content-keyed start: depends on the document, not its position.
    gamma = np.broadcast_to(
        alpha + counts.sum(axis=1)[:, np.newaxis] / k, (n_docs, k)
    ).copy()

    doc_ids_nonzero = [np.nonzero(counts[d])[0] for d in range(n_docs)]
    elbo_trace: list[float] = []

    for _ in range(max_iterations):
        elog_beta = _dirichlet_expectation(lam)
        exp_elog_beta = np.exp(elog_beta)
        sstats = np.zeros_like(lam)

        for d in range(n_docs):
            ids = doc_ids_nonzero[d]
            if ids.size == 0:
                continue
            cts = counts[d, ids]
            gamma_d = gamma[d]
            exp_elog_theta_d = np.exp(_dirichlet_expectation(gamma_d))
            beta_slice = exp_elog_beta[:, ids]
            phi_norm = exp_elog_theta_d @ beta_slice + 1e-100
            for _inner in range(_INNER_ITERATIONS):
                previous = gamma_d
                gamma_d = alpha + exp_elog_theta_d * ((cts / phi_norm) @ beta_slice.T)
                exp_elog_theta_d = np.exp(_dirichlet_expectation(gamma_d))
                phi_norm = exp_elog_theta_d @ beta_slice + 1e-100
                if float(np.mean(np.abs(gamma_d - previous))) < _INNER_TOL:
                    break
            gamma[d] = gamma_d
            sstats[:, ids] += np.outer(exp_elog_theta_d, cts / phi_norm)

        lam = beta + sstats * exp_elog_beta
        bound = _elbo(counts, gamma, lam, alpha, beta)
        if elbo_trace:
            previous_bound = elbo_trace[-1]
            slack = _ELBO_SLACK * max(1.0, abs(previous_bound))
            if bound < previous_bound - slack:
                raise AssertionError(
                    f"ELBO decreased: {previous_bound} -> {bound}"
                )
        elbo_trace.append(bound)

    doc_topic = gamma / gamma.sum(axis=1, keepdims=True)
    topic_word = lam / lam.sum(axis=1, keepdims=True)
    return TopicModel(
        doc_topic=doc_topic,
        topic_word=topic_word,
        elbo=tuple(elbo_trace),
        k=k,
        alpha=alpha,
        beta=beta,
        seed=seed,
    )


def top_terms(
    model: TopicModel, vocabulary: tuple[str, ...], topic: int, n: int = 10
) -> list[tuple[str, float]]:
    """Highest-weight terms of one topic; weight ties break alphabetically."""
    weights = model.topic_word[topic]
    ranked = sorted(zip(vocabulary, weights), key=lambda tw: (-tw[1], tw[0]))
    return [(term, float(weight)) for term, weight in ranked[:n]]


def empty_document_rows(counts: np.ndarray) -> list[int]:
    """Indices of all-zero rows; these keep a uniform topic mixture."""
    return [int(d) for d in np.nonzero(np.asarray(counts).sum(axis=1) == 0)[0]]
