"""Variational autoencoder over individual poses, trained from scratch in numpy.

Encoder and decoder are 4-hidden-layer ReLU MLPs with linear heads; the
bottleneck is fixed at 2 so that every pose lands on a 2D map and every 2D
point decodes back to a pose. The per-batch objective is

    mean[ MSE(reconstruction, x) + beta(epoch) * KL(q(z|x) || N(0, I)) ]

with the reparameterization z = mu + exp(logvar / 2) * eps and
KL = -0.5 * sum(1 + logvar - mu^2 - exp(logvar)) per sample. beta ramps
linearly from 0 to 1 over the first ``kl_warmup_fraction`` of the epochs,
then stays at 1. The optimizer is Adam (0.9, 0.999, 1e-8).

Everything is deterministic given ``rng_seed``: weight init, batch
shuffling, and the reparameterization noise all draw from one Generator.

Inference is noise-free: ``encode`` returns the posterior mean and
``decode`` is total on finite 2D inputs, including points far from data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError, TrainingError
from .ingest import Corpus, GestureSequence
from .skeleton import POSE_DIM, flatten, unflatten

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class VAEConfig:
    input_dim: int = POSE_DIM
    hidden_layers: int = 4
    hidden_units: int = 64
    latent_dim: int = 2
    epochs: int = 200
    learning_rate: float = 1e-3
    kl_warmup_fraction: float = 0.25
    batch_size: int = 64
    rng_seed: int = 0

    def __post_init__(self):
        if self.latent_dim != 2:
            raise DomainError("latent_dim is fixed at 2 (the map is two-dimensional)")
        for name in ("input_dim", "hidden_layers", "hidden_units", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be positive")
        if self.learning_rate <= 0:
            raise DomainError("learning_rate must be positive")
        if not 0.0 <= self.kl_warmup_fraction <= 1.0:
            raise DomainError("kl_warmup_fraction must lie in [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)


def full_scale_config(**overrides) -> VAEConfig:
    """The published training recipe: wide layers, long schedule, small lr.

    Too slow for test runs; the desk-scale defaults in VAEConfig are used
    everywhere results must arrive in minutes.
    """
    values = dict(hidden_units=512, epochs=2000, learning_rate=3e-5)
    values.update(overrides)
    return VAEConfig(**values)


def beta_schedule(config: VAEConfig, epoch: int) -> float:
    """KL weight for a 0-based epoch index: linear 0 -> 1 warm-up, then 1."""
    warm = int(round(config.kl_warmup_fraction * config.epochs))
    if warm <= 0:
        return 1.0
    return min(1.0, epoch / warm)


def _param_layout(config: VAEConfig) -> list[tuple[str, tuple[int, int]]]:
    layout = []
    size = config.input_dim
    for l in range(config.hidden_layers):
        layout.append((f"enc{l}.W", (size, config.hidden_units)))
        layout.append((f"enc{l}.b", (1, config.hidden_units)))
        size = config.hidden_units
    layout.append(("mu.W", (size, 2)))
    layout.append(("mu.b", (1, 2)))
    layout.append(("logvar.W", (size, 2)))
    layout.append(("logvar.b", (1, 2)))
    size = 2
    for l in range(config.hidden_layers):
        layout.append((f"dec{l}.W", (size, config.hidden_units)))
        layout.append((f"dec{l}.b", (1, config.hidden_units)))
        size = config.hidden_units
    layout.append(("out.W", (size, config.input_dim)))
    layout.append(("out.b", (1, config.input_dim)))
    return layout


def init_params(config: VAEConfig, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Uniform fan-in init for weights, zeros for biases."""
    params = {}
    for name, shape in _param_layout(config):
        if name.endswith(".W"):
            bound = 1.0 / np.sqrt(shape[0])
            params[name] = rng.uniform(-bound, bound, size=shape)
        else:
            params[name] = np.zeros(shape)
    return params


def kl_divergence(mu: np.ndarray, logvar: np.ndarray) -> np.ndarray:
    """Per-sample KL(q(z|x) || N(0, I)) = -0.5 * sum(1 + logvar - mu^2 - e^logvar).

    Nonnegative everywhere; zero exactly at mu = 0, logvar = 0.
    """
    mu = np.atleast_2d(np.asarray(mu, dtype=np.float64))
    logvar = np.atleast_2d(np.asarray(logvar, dtype=np.float64))
    return -0.5 * (1.0 + logvar - mu ** 2 - np.exp(logvar)).sum(axis=1)


@dataclass
class LatentPath:
    """A gesture as the ordered 2D codes of its frames."""

    sequence_id: str
    points: np.ndarray  # (T, 2)

    def to_dict(self) -> dict:
        return {"id": self.sequence_id, "points": self.points.tolist()}


@dataclass
class VAEModel:
    config: VAEConfig
    params: dict[str, np.ndarray]
    training_trace: dict[str, list[float]] = field(
        default_factory=lambda: {"reconstruction": [], "kl": [], "beta": []})

    def to_dict(self) -> dict:
        return {
            "format": "posemap-vae",
            "version": 1,
            "config": self.config.to_dict(),
            "params": {k: v.tolist() for k, v in self.params.items()},
            "training_trace": {k: list(v) for k, v in self.training_trace.items()},
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def from_dict(cls, doc: dict) -> "VAEModel":
        if doc.get("format") != "posemap-vae":
            raise DomainError("not a posemap model document")
        config = VAEConfig(**doc["config"])
        params = {k: np.asarray(v, dtype=np.float64) for k, v in doc["params"].items()}
        expected = {name: shape for name, shape in _param_layout(config)}
        if set(params) != set(expected):
            raise DomainError("model parameters do not match the config layout")
        for name, arr in params.items():
            if arr.shape != expected[name]:
                raise DomainError(f"parameter {name} has shape {arr.shape}, expected {expected[name]}")
        return cls(config=config, params=params, training_trace=doc.get("training_trace", {}))

    @classmethod
    def load(cls, path: str | Path) -> "VAEModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# -- forward / backward -------------------------------------------------------

def _mlp_forward(params, prefix: str, layers: int, x: np.ndarray):
    """ReLU stack; returns the final activation and per-layer caches."""
    caches = []
    a = x
    for l in range(layers):
        pre = a @ params[f"{prefix}{l}.W"] + params[f"{prefix}{l}.b"]
        post = np.maximum(pre, 0.0)
        caches.append((a, pre))
        a = post
    return a, caches


def _mlp_backward(params, grads, prefix: str, layers: int, caches, da: np.ndarray):
    for l in reversed(range(layers)):
        a_in, pre = caches[l]
        dpre = da * (pre > 0)
        grads[f"{prefix}{l}.W"] += a_in.T @ dpre
        grads[f"{prefix}{l}.b"] += dpre.sum(axis=0, keepdims=True)
        da = dpre @ params[f"{prefix}{l}.W"].T
    return da


def _encode_forward(params, config: VAEConfig, x: np.ndarray):
    h, caches = _mlp_forward(params, "enc", config.hidden_layers, x)
    mu = h @ params["mu.W"] + params["mu.b"]
    logvar = h @ params["logvar.W"] + params["logvar.b"]
    return mu, logvar, h, caches


def _decode_forward(params, config: VAEConfig, z: np.ndarray):
    h, caches = _mlp_forward(params, "dec", config.hidden_layers, z)
    out = h @ params["out.W"] + params["out.b"]
    return out, h, caches


def loss_and_grads(params, config: VAEConfig, x: np.ndarray, noise: np.ndarray,
                   beta: float, recon_scale: float = 1.0):
    """Full-loss value and analytic gradients for one batch.

    ``noise`` is the reparameterization draw, passed in so callers (training,
    the gradient check) control it explicitly. ``recon_scale`` scales only
    the reconstruction term.
    """
    batch = x.shape[0]
    mu, logvar, enc_h, enc_caches = _encode_forward(params, config, x)
    sigma = np.exp(0.5 * logvar)
    z = mu + sigma * noise
    out, dec_h, dec_caches = _decode_forward(params, config, z)

    diff = out - x
    recon = float((diff ** 2).sum() / (batch * config.input_dim))
    kl = float(kl_divergence(mu, logvar).sum() / batch)
    loss = recon_scale * recon + beta * kl

    grads = {name: np.zeros_like(p) for name, p in params.items()}

    dout = recon_scale * 2.0 * diff / (batch * config.input_dim)
    grads["out.W"] += dec_h.T @ dout
    grads["out.b"] += dout.sum(axis=0, keepdims=True)
    ddec_h = dout @ params["out.W"].T
    dz = _mlp_backward(params, grads, "dec", config.hidden_layers, dec_caches, ddec_h)

    dmu = dz + beta * mu / batch
    dlogvar = dz * noise * 0.5 * sigma + beta * (np.exp(logvar) - 1.0) / (2.0 * batch)

    grads["mu.W"] += enc_h.T @ dmu
    grads["mu.b"] += dmu.sum(axis=0, keepdims=True)
    grads["logvar.W"] += enc_h.T @ dlogvar
    grads["logvar.b"] += dlogvar.sum(axis=0, keepdims=True)
    denc_h = dmu @ params["mu.W"].T + dlogvar @ params["logvar.W"].T
    _mlp_backward(params, grads, "enc", config.hidden_layers, enc_caches, denc_h)

    return loss, recon, kl, grads


# -- training -----------------------------------------------------------------

def _as_pose_matrix(data) -> np.ndarray:
    if isinstance(data, Corpus):
        return data.pose_matrix()
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise DomainError(f"training data must be (N, D), got shape {arr.shape}")
    return arr


def train(data, config: VAEConfig | None = None, on_epoch=None) -> VAEModel:
    """Fit the model on every pose of a corpus (or a raw (N, D) matrix).

    ``on_epoch(epoch_index, total_epochs)`` is called after each epoch,
    letting callers surface progress for long runs.
    """
    config = config or VAEConfig()
    x_all = _as_pose_matrix(data)
    if x_all.shape[0] == 0:
        raise DomainError("training data is empty")
    if x_all.shape[1] != config.input_dim:
        raise DomainError(f"pose dimension {x_all.shape[1]} does not match config input_dim {config.input_dim}")

    rng = np.random.default_rng(config.rng_seed)
    params = init_params(config, rng)
    adam_m = {k: np.zeros_like(v) for k, v in params.items()}
    adam_v = {k: np.zeros_like(v) for k, v in params.items()}
    step = 0
    trace = {"reconstruction": [], "kl": [], "beta": []}

    n = x_all.shape[0]
    for epoch in range(config.epochs):
        beta = beta_schedule(config, epoch)
        order = rng.permutation(n)
        epoch_recon, epoch_kl, batches = 0.0, 0.0, 0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            x = x_all[idx]
            noise = rng.standard_normal((len(idx), 2))
            loss, recon, kl, grads = loss_and_grads(params, config, x, noise, beta)
            if not np.isfinite(loss):
                raise TrainingError(f"loss became non-finite ({loss})", epoch=epoch, batch=batches)
            step += 1
            corr1 = 1.0 - ADAM_BETA1 ** step
            corr2 = 1.0 - ADAM_BETA2 ** step
            for name in params:
                g = grads[name]
                adam_m[name] = ADAM_BETA1 * adam_m[name] + (1 - ADAM_BETA1) * g
                adam_v[name] = ADAM_BETA2 * adam_v[name] + (1 - ADAM_BETA2) * g * g
                update = (adam_m[name] / corr1) / (np.sqrt(adam_v[name] / corr2) + ADAM_EPS)
                params[name] = params[name] - config.learning_rate * update
                if not np.isfinite(params[name]).all():
                    raise TrainingError(f"parameter {name} became non-finite",
                                        epoch=epoch, batch=batches)
            epoch_recon += recon
            epoch_kl += kl
            batches += 1
        trace["reconstruction"].append(epoch_recon / batches)
        trace["kl"].append(epoch_kl / batches)
        trace["beta"].append(beta)
        if on_epoch is not None:
            on_epoch(epoch, config.epochs)

    return VAEModel(config=config, params=params, training_trace=trace)


# -- inference ----------------------------------------------------------------

def _as_flat_pose(model: VAEModel, pose) -> np.ndarray:
    arr = np.asarray(pose, dtype=np.float64)
    if arr.ndim == 2:
        arr = flatten(arr)
    if arr.shape != (model.config.input_dim,):
        raise DomainError(
            f"pose has dimension {arr.shape}, model expects ({model.config.input_dim},)")
    return arr


def encode(model: VAEModel, pose) -> np.ndarray:
    """Posterior mean of one pose: a deterministic 2D map coordinate."""
    x = _as_flat_pose(model, pose).reshape(1, -1)
    mu, _, _, _ = _encode_forward(model.params, model.config, x)
    return mu[0].copy()


def encode_batch(model: VAEModel, x: np.ndarray) -> np.ndarray:
    """(N, D) poses -> (N, 2) posterior means."""
    mu, _, _, _ = _encode_forward(model.params, model.config, np.asarray(x, dtype=np.float64))
    return mu


def encode_sequence(model: VAEModel, sequence: GestureSequence) -> LatentPath:
    points = encode_batch(model, sequence.flattened())
    return LatentPath(sequence_id=sequence.id, points=points)


def decode(model: VAEModel, z) -> np.ndarray:
    """Decode any finite 2D point into a (20, 3) pose."""
    arr = np.asarray(z, dtype=np.float64).reshape(-1)
    if arr.shape != (2,):
        raise DomainError(f"latent point must be 2D, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise DomainError("latent point must be finite")
    out, _, _ = _decode_forward(model.params, model.config, arr.reshape(1, 2))
    return unflatten(out[0])


def decode_batch(model: VAEModel, z: np.ndarray) -> np.ndarray:
    """(N, 2) latent points -> (N, D) flattened poses."""
    z = np.asarray(z, dtype=np.float64)
    if not np.isfinite(z).all():
        raise DomainError("latent points must be finite")
    out, _, _ = _decode_forward(model.params, model.config, z)
    return out


# -- verification ---------------------------------------------------------------

def _forward_loss(params, config: VAEConfig, x, noise, beta, recon_scale=1.0):
    """Loss value plus the ReLU on/off pattern of every hidden layer."""
    batch = x.shape[0]
    mu, logvar, _, enc_caches = _encode_forward(params, config, x)
    z = mu + np.exp(0.5 * logvar) * noise
    out, _, dec_caches = _decode_forward(params, config, z)
    recon = float(((out - x) ** 2).sum() / (batch * config.input_dim))
    kl = float(kl_divergence(mu, logvar).sum() / batch)
    masks = tuple((pre > 0).tobytes() for _, pre in enc_caches + dec_caches)
    return recon_scale * recon + beta * kl, masks


def gradient_check(config: VAEConfig, batch: np.ndarray, rng_seed: int = 0,
                   step: float = 1e-5, beta: float = 1.0,
                   params: dict[str, np.ndarray] | None = None) -> float:
    """Max relative error of analytic vs central-finite-difference gradients.

    Requires a small model (hidden_units <= 8) so the full parameter sweep
    stays cheap. The reparameterization noise is drawn once and reused by
    every evaluation, making the loss a deterministic function of the
    parameters. ``params`` overrides the seeded random init.

    Coordinates where the two probe points land on different sides of a
    ReLU kink are excluded: the loss is not differentiable there, so a
    central difference estimates nothing.
    """
    if config.hidden_units > 8:
        raise DomainError("gradient_check requires hidden_units <= 8")
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != config.input_dim:
        raise DomainError(f"batch must be (B, {config.input_dim})")
    rng = np.random.default_rng(rng_seed)
    if params is None:
        params = init_params(config, rng)
    else:
        params = {k: np.array(v, dtype=np.float64) for k, v in params.items()}
    noise = rng.standard_normal((x.shape[0], 2))

    _, _, _, analytic = loss_and_grads(params, config, x, noise, beta)

    worst = 0.0
    for name in params:
        flat = params[name].reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + step
            plus, masks_plus = _forward_loss(params, config, x, noise, beta)
            flat[i] = original - step
            minus, masks_minus = _forward_loss(params, config, x, noise, beta)
            flat[i] = original
            if masks_plus != masks_minus:
                continue
            numeric = (plus - minus) / (2 * step)
            a = analytic[name].reshape(-1)[i]
            err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-6)
            if err > worst:
                worst = err
    return worst
