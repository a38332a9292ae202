"""Quality assessment model: a small two-layer perceptron over metric vectors.

Scoring is w2 . tanh(w1 x + b1) + b2. Online adaptation minimizes the
pairwise negative log-likelihood -E[log sigmoid(r(x_pref) - r(x_other))]
by full-batch gradient descent over the replay buffer. Models are immutable
values; every update returns a new instance with version + 1.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DivergedUpdate, NonFiniteInput
from .metrics import FIELD_ORDER, MetricVector

INPUT_DIM = len(FIELD_ORDER)
HIDDEN = 16
PRETRAIN_SAMPLES = 10_000
PRETRAIN_TARGET_MSE = 1e-3
# tuned so a 50-edit session moves the scorer decisively; pairwise gradients
# on [0,1] features are tiny, so classic 0.01-scale rates stall
UPDATE_LR = 0.4
UPDATE_EPOCHS = 40

# default linear preference: low obstruction, balanced ink, readable text,
# small growth, high correspondence, near the center; no horizontal or
# vertical bias out of the box
DEFAULT_WEIGHTS = np.array([-1.0, -1.0, 1.0, -1.0, 1.0, 0.0, 0.0, -1.0])


def default_linear_score(features: np.ndarray) -> np.ndarray:
    return features @ DEFAULT_WEIGHTS


@dataclass(frozen=True)
class QualityModel:
    w1: np.ndarray  # (hidden, 8)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden,)
    b2: float
    hidden: int = HIDDEN
    version: int = 0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        # own private frozen copies; never freeze caller-owned arrays
        for name in ("w1", "b1", "w2"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def score_features(self, feats: np.ndarray) -> np.ndarray:
        feats = np.asarray(feats, dtype=np.float64)
        single = feats.ndim == 1
        x = feats[None, :] if single else feats
        if not np.isfinite(x).all():
            raise NonFiniteInput("model input must be finite")
        out = np.tanh(x @ self.w1.T + self.b1) @ self.w2 + self.b2
        return out[0] if single else out

    def score(self, x: MetricVector) -> float:
        return float(self.score_features(x.features()))


@dataclass(frozen=True)
class FeedbackTuple:
    x0: MetricVector
    x1: MetricVector
    preferred: int  # 0 or 1
    timestamp: float = 0.0
    session_id: str = "default"

    def __post_init__(self) -> None:
        assert self.preferred in (0, 1)
        assert self.x0 != self.x1, "feedback needs two distinct vectors"

    def to_record(self) -> dict:
        return {
            "x0": self.x0.to_record(),
            "x1": self.x1.to_record(),
            "preferred": self.preferred,
            "timestamp": self.timestamp,
            "session_id": self.session_id,
        }

    @staticmethod
    def from_record(rec: dict) -> "FeedbackTuple":
        return FeedbackTuple(
            MetricVector.from_record(rec["x0"]),
            MetricVector.from_record(rec["x1"]),
            int(rec["preferred"]),
            float(rec.get("timestamp", 0.0)),
            rec.get("session_id", "default"),
        )


# --------------------------------------------------------------------------
# initialization

_default_cache: dict[int, QualityModel] = {}


def init_model(seed: int = 0) -> QualityModel:
    """Small-random init, then regression onto the default linear score so the
    untrained model already behaves like the stock weighted metric sum."""
    if seed in _default_cache:
        return _default_cache[seed]
    rng = np.random.default_rng(seed)
    w1 = rng.uniform(-0.1, 0.1, (HIDDEN, INPUT_DIM))
    b1 = rng.uniform(-0.1, 0.1, HIDDEN)
    w2 = rng.uniform(-0.1, 0.1, HIDDEN)
    b2 = float(rng.uniform(-0.1, 0.1))

    x = rng.uniform(0.0, 1.0, (PRETRAIN_SAMPLES, INPUT_DIM))
    t = default_linear_score(x)

    # Adam on MSE
    params = [w1, b1, w2, np.array([b2])]
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    lr, beta1, beta2, eps = 0.02, 0.9, 0.999, 1e-8
    for step in range(1, 3001):
        h = np.tanh(x @ params[0].T + params[1])
        y = h @ params[2] + params[3][0]
        err = y - t
        mse = float((err**2).mean())
        if mse < PRETRAIN_TARGET_MSE:
            break
        n = len(x)
        gy = 2.0 * err / n
        g_w2 = gy @ h
        g_b2 = np.array([gy.sum()])
        gh = gy[:, None] * params[2][None, :] * (1 - h * h)
        g_w1 = gh.T @ x
        g_b1 = gh.sum(axis=0)
        grads = [g_w1, g_b1, g_w2, g_b2]
        for k in range(4):
            m[k] = beta1 * m[k] + (1 - beta1) * grads[k]
            v[k] = beta2 * v[k] + (1 - beta2) * grads[k] ** 2
            mh = m[k] / (1 - beta1**step)
            vh = v[k] / (1 - beta2**step)
            params[k] = params[k] - lr * mh / (np.sqrt(vh) + eps)

    model = QualityModel(
        w1=params[0], b1=params[1], w2=params[2], b2=float(params[3][0]),
        hidden=HIDDEN, version=0, rng_seed=seed,
    )
    _default_cache[seed] = model
    return model


# --------------------------------------------------------------------------
# pairwise preference loss


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _batch_features(tuples: list[FeedbackTuple]) -> tuple[np.ndarray, np.ndarray]:
    pref = np.array([
        t.x0.features() if t.preferred == 0 else t.x1.features() for t in tuples
    ])
    other = np.array([
        t.x1.features() if t.preferred == 0 else t.x0.features() for t in tuples
    ])
    return pref, other


def pairwise_probability(model: QualityModel, tup: FeedbackTuple) -> float:
    """sigmoid(r(x_i) - r(x_{1-i})) for the preferred index i."""
    pref, other = _batch_features([tup])
    gap = model.score_features(pref) - model.score_features(other)
    return float(_sigmoid(gap)[0])


def pairwise_loss(model: QualityModel, tuples: list[FeedbackTuple]) -> float:
    """-mean log sigmoid(score gap); ln 2 when every pair scores equal."""
    if not tuples:
        raise ValueError("empty batch")
    pref, other = _batch_features(tuples)
    gap = model.score_features(pref) - model.score_features(other)
    p = np.clip(_sigmoid(gap), 1e-12, None)
    return float(-np.log(p).mean())


def _loss_gradients(model: QualityModel, tuples: list[FeedbackTuple]):
    """Analytic gradient of the pairwise loss w.r.t. (w1, b1, w2, b2)."""
    pref, other = _batch_features(tuples)
    n = len(tuples)

    def forward(x):
        z = x @ model.w1.T + model.b1
        h = np.tanh(z)
        return h, h @ model.w2 + model.b2

    hp, sp = forward(pref)
    ho, so = forward(other)
    gap = sp - so
    coeff = -(1.0 - _sigmoid(gap)) / n  # d loss / d gap

    def backward(h, x, sign):
        gy = coeff * sign
        g_w2 = gy @ h
        g_b2 = gy.sum()
        gh = gy[:, None] * model.w2[None, :] * (1 - h * h)
        g_w1 = gh.T @ x
        g_b1 = gh.sum(axis=0)
        return g_w1, g_b1, g_w2, g_b2

    gp = backward(hp, pref, +1.0)
    go = backward(ho, other, -1.0)
    return tuple(a + b for a, b in zip(gp, go))


def update(
    model: QualityModel,
    tuples: list[FeedbackTuple],
    lr: float = UPDATE_LR,
    epochs: int = UPDATE_EPOCHS,
) -> QualityModel:
    """Full-batch descent over the replay buffer; returns a new model value."""
    if not tuples:
        raise ValueError("empty replay buffer")
    w1, b1 = model.w1.copy(), model.b1.copy()
    w2, b2 = model.w2.copy(), float(model.b2)
    work = replace(model, w1=w1, b1=b1, w2=w2, b2=b2)
    for _ in range(epochs):
        g_w1, g_b1, g_w2, g_b2 = _loss_gradients(work, tuples)
        w1 = w1 - lr * g_w1
        b1 = b1 - lr * g_b1
        w2 = w2 - lr * g_w2
        b2 = b2 - lr * g_b2
        work = replace(model, w1=w1, b1=b1, w2=w2, b2=b2)
        if not all(np.isfinite(a).all() for a in (w1, b1, w2)) or not math.isfinite(b2):
            raise DivergedUpdate("non-finite parameters during update")
    if not math.isfinite(pairwise_loss(work, tuples)):
        raise DivergedUpdate("non-finite loss after update")
    return replace(work, version=model.version + 1)


def gradient_check(model: QualityModel, tup: FeedbackTuple, eps: float = 1e-5) -> float:
    """Max relative error of analytic vs central-difference gradients."""
    tuples = [tup]
    analytic = _loss_gradients(model, tuples)
    worst = 0.0

    def loss_with(params) -> float:
        w1, b1, w2, b2 = params
        probe = replace(model, w1=w1, b1=b1, w2=w2, b2=float(b2))
        return pairwise_loss(probe, tuples)

    base = [model.w1.copy(), model.b1.copy(), model.w2.copy(), np.array([model.b2])]
    grads = [analytic[0], analytic[1], analytic[2], np.array([analytic[3]])]
    for k, arr in enumerate(base):
        flat = arr.reshape(-1)
        gflat = grads[k].reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + eps
            hi = loss_with([base[0], base[1], base[2], base[3][0]])
            flat[idx] = orig - eps
            lo = loss_with([base[0], base[1], base[2], base[3][0]])
            flat[idx] = orig
            numeric = (hi - lo) / (2 * eps)
            denom = max(abs(numeric), abs(gflat[idx]), 1e-8)
            worst = max(worst, abs(numeric - gflat[idx]) / denom)
    return worst


# --------------------------------------------------------------------------
# persistence


def dump_model(model: QualityModel) -> str:
    """Flat text record: dimensions, then row-major parameters (full precision)."""
    out = io.StringIO()
    out.write(f"legendgen-model 1\n")
    out.write(f"hidden {model.hidden}\n")
    out.write(f"inputs {INPUT_DIM}\n")
    out.write(f"version {model.version}\n")
    out.write(f"seed {model.rng_seed}\n")
    for name, arr in (("w1", model.w1.reshape(-1)), ("b1", model.b1), ("w2", model.w2)):
        out.write(name + " " + " ".join(repr(float(v)) for v in arr) + "\n")
    out.write("b2 " + repr(float(model.b2)) + "\n")
    return out.getvalue()


def load_model(text: str) -> QualityModel:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    header = lines[0].split()
    if header[0] != "legendgen-model":
        raise ValueError("not a model record")
    meta: dict[str, str] = {}
    arrays: dict[str, np.ndarray] = {}
    for ln in lines[1:]:
        name, rest = ln.split(" ", 1)
        if name in ("hidden", "inputs", "version", "seed"):
            meta[name] = rest.strip()
        else:
            arrays[name] = np.array([float(v) for v in rest.split()])
    hidden = int(meta["hidden"])
    inputs = int(meta["inputs"])
    return QualityModel(
        w1=arrays["w1"].reshape(hidden, inputs),
        b1=arrays["b1"],
        w2=arrays["w2"],
        b2=float(arrays["b2"][0]),
        hidden=hidden,
        version=int(meta["version"]),
        rng_seed=int(meta["seed"]),
    )
