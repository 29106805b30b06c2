"""Training-set membership probe via compression degradation.

A document the model was trained on compresses far better under the
best predictor settings than under crippled ones, while unseen text is
nearly indifferent to the settings, so the worst/best size ratio
separates members from non-members.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import codec
from .predictor import MarkovModel, PredictorConfig

WORST_WINDOW = 16
BEST_WINDOW = 2048
WORST_QUANT = 4
BEST_QUANT = 16

LIKELY_MEMBER = "likely-member"
LIKELY_NON_MEMBER = "likely-non-member"


@dataclass(frozen=True)
class MembershipReport:
    """Worst-vs-best compression outcome for one document."""

    worst_size: int
    best_size: int
    degradation_ratio: float
    baseline_ratio: float
    threshold: float
    verdict: str
    worst_config: PredictorConfig
    best_config: PredictorConfig


def probe_configs(order: int) -> tuple[PredictorConfig, PredictorConfig]:
    """Worst and best predictor extremes for an order-k model.

    Windows beyond order + 1 cannot change an order-k context, so when
    the sweep minimum 16 is already inert the worst window drops to 1
    (prediction from an empty context), and the best window caps at
    order + 1. The configs actually used are recorded in the report.
    """
    worst_window = WORST_WINDOW if order + 1 > WORST_WINDOW else 1
    best_window = min(BEST_WINDOW, order + 1)
    return (
        PredictorConfig(worst_window, WORST_QUANT),
        PredictorConfig(best_window, BEST_QUANT),
    )


def _sizes(text: bytes, tokenizer, model: MarkovModel):
    worst_cfg, best_cfg = probe_configs(model.order)
    worst = len(codec.compress(text, tokenizer, model, worst_cfg))
    best = len(codec.compress(text, tokenizer, model, best_cfg))
    return worst, best, worst_cfg, best_cfg


def degradation_ratio(text: bytes, tokenizer, model: MarkovModel) -> float:
    worst, best, _, _ = _sizes(text, tokenizer, model)
    return worst / best


def membership_probe(
    text: bytes, tokenizer, model: MarkovModel, threshold: float
) -> MembershipReport:
    """Compress under both extremes and compare against the threshold."""
    if threshold <= 1:
        raise ValueError("threshold must exceed 1")
    worst, best, worst_cfg, best_cfg = _sizes(text, tokenizer, model)
    deflated = len(codec.deflate_bytes(text))
    degradation = worst / best
    return MembershipReport(
        worst_size=worst,
        best_size=best,
        degradation_ratio=degradation,
        baseline_ratio=deflated / best,
        threshold=threshold,
        verdict=LIKELY_MEMBER if degradation > threshold else LIKELY_NON_MEMBER,
        worst_config=worst_cfg,
        best_config=best_cfg,
    )


def calibrate_threshold(member_docs, nonmember_docs, tokenizer, model) -> float:
    """Decision threshold from labeled examples.

    Separated classes get the midpoint between the highest non-member
    and the lowest member ratio; overlapping classes get the cut with
    the fewest misclassifications, ties resolved toward fewer false
    members, then toward the smaller cut.
    """
    if not member_docs or not nonmember_docs:
        raise ValueError("both document lists must be non-empty")
    members = [degradation_ratio(d, tokenizer, model) for d in member_docs]
    nonmembers = [degradation_ratio(d, tokenizer, model) for d in nonmember_docs]
    if min(members) > max(nonmembers):
        return (max(nonmembers) + min(members)) / 2
    candidates = sorted(set(members + nonmembers))
    candidates.insert(0, candidates[0] - 1.0)
    best = None
    for cut in candidates:
        errors = sum(1 for m in members if m <= cut) + sum(
            1 for n in nonmembers if n > cut
        )
        false_members = sum(1 for n in nonmembers if n > cut)
        key = (errors, false_members, cut)
        if best is None or key < best:
            best = key
    return best[2]
