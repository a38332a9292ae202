"""Online preference feedback: edits become pairwise tuples, tuples drive
model updates, and deterministic simulated users stand in for study
participants when measuring how well a model tracks a preference."""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

import numpy as np

from .design import LegendSpec
from .errors import InadmissibleSpec, NoChange
from .metrics import MetricVector
from .model import FeedbackTuple, QualityModel, init_model, update
from .pipeline import Document
from .search import Chromosome

PROFILES = ("right_edge", "bottom_center", "low_obstruction", "vertical_lover")


def profile_utility(profile: str, spec: LegendSpec, mv: MetricVector) -> float:
    if profile == "right_edge":
        return mv.pref_horizontal
    if profile == "bottom_center":
        return -abs(mv.pref_horizontal - 0.5) + mv.pref_vertical
    if profile == "low_obstruction":
        return -mv.obstruction
    if profile == "vertical_lover":
        return 1.0 if spec.direction == "vertical" else 0.0
    raise ValueError(f"unknown profile {profile!r}")


def record_edit(
    document: Document,
    prev: LegendSpec,
    edited: LegendSpec,
    session_id: str = "default",
    timestamp: float | None = None,
) -> FeedbackTuple:
    """The edited spec is preferred over what it replaced."""
    if prev == edited:
        raise NoChange("edit left the spec unchanged")
    for spec in (prev, edited):
        if not document.constraints.admits(spec):
            raise InadmissibleSpec(f"spec outside the design space: {spec.to_record()}")
    return FeedbackTuple(
        x0=document.metrics_for(edited),
        x1=document.metrics_for(prev),
        preferred=0,
        timestamp=_time.time() if timestamp is None else timestamp,
        session_id=session_id,
    )


def simulate_user(
    profile: str,
    candidates: list[tuple[LegendSpec, MetricVector]],
) -> tuple[LegendSpec, LegendSpec] | None:
    """Pick the candidate maximizing the profile's utility. Returns
    (prev, edited) where prev is the model's top pick, or None when the top
    pick already maximizes the profile. Utility ties break toward the
    lowest-ranked candidate: the edit that corrects the model the most."""
    if len(candidates) < 2:
        return None
    utilities = [profile_utility(profile, spec, mv) for spec, mv in candidates]
    best = max(range(len(candidates)), key=lambda i: (utilities[i], i))
    if utilities[best] <= utilities[0]:
        return None
    return (candidates[0][0], candidates[best][0])


def sample_specs(document: Document, n: int, rng: np.random.Generator) -> list[LegendSpec]:
    """Uniform random admissible specs (decoded random chromosomes)."""
    space = document.search_space()
    sizes = space.dimension_sizes()
    out = []
    for _ in range(n):
        chrom = Chromosome(
            tuple(int(rng.integers(0, s)) for s in sizes),
            (float(rng.random()), float(rng.random())),
        )
        out.append(space.decode(chrom))
    return out


def evaluate_alignment(
    model: QualityModel,
    profile: str,
    heldout: list[Document],
    pairs_per_chart: int = 20,
    seed: int = 1234,
) -> float:
    """Pairwise accuracy of the model against the profile's utility ordering
    over random candidate pairs on held-out charts. Equal-utility pairs are
    skipped."""
    rng = np.random.default_rng(seed)
    hits = total = 0
    for doc in heldout:
        specs = sample_specs(doc, 2 * pairs_per_chart, rng)
        for k in range(pairs_per_chart):
            a, b = specs[2 * k], specs[2 * k + 1]
            mva, mvb = doc.metrics_for(a), doc.metrics_for(b)
            ua = profile_utility(profile, a, mva)
            ub = profile_utility(profile, b, mvb)
            if ua == ub:
                continue
            sa, sb = model.score(mva), model.score(mvb)
            if (sa > sb) == (ua > ub) and sa != sb:
                hits += 1
            total += 1
    return hits / total if total else 0.0


@dataclass
class SessionResult:
    profile: str
    model: QualityModel
    tuples: list[FeedbackTuple] = field(default_factory=list)
    accuracy_at: dict[int, float] = field(default_factory=dict)
    rounds: int = 0


def run_session(
    profile: str,
    training: list[Document],
    heldout: list[Document],
    model: QualityModel | None = None,
    target_tuples: int = 50,
    seed: int = 0,
    pool_size: int = 12,
    top_k: int = 12,
    eval_at: tuple[int, ...] = (0, 10, 25, 50),
    lr: float | None = None,
    epochs: int | None = None,
) -> SessionResult:
    """Drive a simulated editing session: each round ranks a random candidate
    pool with the current model, the simulated user edits the top pick, and
    the model retrains on the full replay buffer.

    Small pools matter: the user's corrections then carry moderate contrasts,
    which teach the scorer mid-range distinctions instead of only extremes."""
    model = model if model is not None else init_model(seed)
    rng = np.random.default_rng(seed)
    result = SessionResult(profile=profile, model=model)
    if 0 in eval_at:
        result.accuracy_at[0] = evaluate_alignment(model, profile, heldout, seed=seed + 99)
    kwargs = {}
    if lr is not None:
        kwargs["lr"] = lr
    if epochs is not None:
        kwargs["epochs"] = epochs

    max_rounds = target_tuples * 24
    while len(result.tuples) < target_tuples and result.rounds < max_rounds:
        doc = training[result.rounds % len(training)]
        result.rounds += 1
        pool = sample_specs(doc, pool_size, rng)
        scored = [(spec, doc.metrics_for(spec)) for spec in pool]
        scored.sort(key=lambda pair: -model.score(pair[1]))
        edit = simulate_user(profile, scored[:top_k])
        if edit is None:
            continue
        prev, edited = edit
        tup = record_edit(doc, prev, edited, session_id=profile,
                          timestamp=float(len(result.tuples)))
        result.tuples.append(tup)
        model = update(model, result.tuples, **kwargs)
        n = len(result.tuples)
        if n in eval_at:
            result.accuracy_at[n] = evaluate_alignment(model, profile, heldout, seed=seed + 99)
    result.model = model
    # a session can saturate early: once the top pick always satisfies the
    # profile there are no more edits, so later checkpoints equal the final
    final_acc = None
    for n in sorted(eval_at):
        if n > len(result.tuples):
            if final_acc is None:
                final_acc = evaluate_alignment(model, profile, heldout, seed=seed + 99)
            result.accuracy_at[n] = final_acc
    return result


def replay_log(tuples: list[FeedbackTuple], seed: int = 0,
               lr: float | None = None, epochs: int | None = None) -> QualityModel:
    """Rebuild the final model by replaying the append-only feedback log from
    the initial model; reproduces parameters exactly."""
    model = init_model(seed)
    kwargs = {}
    if lr is not None:
        kwargs["lr"] = lr
    if epochs is not None:
        kwargs["epochs"] = epochs
    for n in range(1, len(tuples) + 1):
        model = update(model, tuples[:n], **kwargs)
    return model
