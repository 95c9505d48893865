"""Summary-quality metrics: smoothed corpus BLEU-4, LCS-based ROUGE-L F1,
and exact-match rate.

BLEU uses clipped n-gram precisions with add-one smoothing on the counts
for n >= 2 and the standard brevity penalty. Aggregation sums counts
before taking ratios, so corpus order is irrelevant.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import math

from topicsum.errors import MetricError

TokenSeq = Sequence[str]


@dataclass
class EvalReport:
    corpus_bleu4: float
    rouge_l_f1: float
    exact_match_rate: float
    n: int
    per_sentence_bleu: list[float] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "corpus_bleu4": self.corpus_bleu4,
            "rouge_l_f1": self.rouge_l_f1,
            "exact_match_rate": self.exact_match_rate,
            "n": self.n,
            "per_sentence_bleu": self.per_sentence_bleu,
        }


def _ngram_counts(tokens: TokenSeq, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(
    candidates: Sequence[TokenSeq],
    references: Sequence[TokenSeq],
    max_n: int = 4,
) -> float:
    """Corpus BLEU with brevity penalty, one reference per candidate."""
    if len(candidates) != len(references):
        raise MetricError(
            f"{len(candidates)} candidates vs {len(references)} references"
        )
    if not candidates:
        raise MetricError("nothing to evaluate")
    for ref in references:
        if not ref:
            raise MetricError("empty reference")
    matches = [0] * max_n
    totals = [0] * max_n
    cand_len = 0
    ref_len = 0
    for cand, ref in zip(candidates, references):
        cand_len += len(cand)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            cand_counts = _ngram_counts(cand, n)
            ref_counts = _ngram_counts(ref, n)
            matches[n - 1] += sum(
                min(count, ref_counts[gram]) for gram, count in cand_counts.items()
            )
            totals[n - 1] += sum(cand_counts.values())
    if cand_len == 0:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        m, t = matches[n - 1], totals[n - 1]
        if n >= 2:
            m, t = m + 1, t + 1
        if m == 0 or t == 0:
            return 0.0
        log_sum += math.log(m / t)
    brevity = 1.0 if cand_len > ref_len else math.exp(1.0 - ref_len / cand_len)
    return brevity * math.exp(log_sum / max_n)


def sentence_bleu(candidate: TokenSeq, reference: TokenSeq, max_n: int = 4) -> float:
    return bleu([candidate], [reference], max_n=max_n)


def _lcs_length(a: TokenSeq, b: TokenSeq) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            curr[j] = prev[j - 1] + 1 if x == y else max(prev[j], curr[j - 1])
        prev = curr
    return prev[-1]


def rouge_l(candidate: TokenSeq, reference: TokenSeq) -> float:
    """F1 over the longest common subsequence; zero when either side is empty."""
    if not candidate or not reference:
        return 0.0
    lcs = _lcs_length(candidate, reference)
    if lcs == 0:
        return 0.0
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    return 2.0 * precision * recall / (precision + recall)


def evaluate_pairs(
    candidates: Sequence[TokenSeq], references: Sequence[TokenSeq]
) -> EvalReport:
    """Full report over aligned candidate/reference token lists."""
    if len(candidates) != len(references):
        raise MetricError(
            f"{len(candidates)} candidates vs {len(references)} references"
        )
    if not candidates:
        raise MetricError("nothing to evaluate")
    per_sentence = [
        sentence_bleu(cand, ref) for cand, ref in zip(candidates, references)
    ]
    rouge_mean = sum(
        rouge_l(cand, ref) for cand, ref in zip(candidates, references)
    ) / len(candidates)
    exact = sum(
        1 for cand, ref in zip(candidates, references) if list(cand) == list(ref)
    ) / len(candidates)
    return EvalReport(
        corpus_bleu4=bleu(candidates, references),
        rouge_l_f1=rouge_mean,
        exact_match_rate=exact,
        n=len(candidates),
        per_sentence_bleu=per_sentence,
    )
