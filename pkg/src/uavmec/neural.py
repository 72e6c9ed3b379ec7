"""Small numpy neural networks with hand-written reverse-mode gradients.

Networks are rectifier MLPs. A parameter set may carry a leading ensemble
dimension, in which case one forward pass evaluates every member: weights are
(E, in, out), biases (E, 1, out), and numpy matmul broadcasting does the rest.
"""

import json
import logging
import zipfile
from dataclasses import dataclass, field
from itertools import count
from pathlib import Path
from typing import List, NamedTuple, Optional, Tuple

import numpy

from uavmec.exceptions import CheckpointException, DomainException

CHECKPOINT_FORMAT = "uavmec-redq"
CHECKPOINT_VERSION = 1
HALF_LOG_2PI = 0.5 * numpy.log(2 * numpy.pi)
# Largest float below 1, so squashed actions stay inside (-1, 1).
_BELOW_ONE = numpy.nextafter(1.0, 0.0)

_tokens = count()


@dataclass(frozen=True)
class MlpSpec:
    """Shape of a rectifier MLP.

    **Attributes:**

    Attributes:
        input_dim (int): Input width.
        hidden (tuple): Hidden layer widths.
        output_dim (int): Output width.
    """

    input_dim: int
    hidden: Tuple[int, ...]
    output_dim: int

    def __post_init__(self):
        widths = (self.input_dim,) + tuple(self.hidden) + (self.output_dim,)
        if any(int(width) < 1 for width in widths):
            raise DomainException(f"All layer widths must be at least 1, got {widths}.")

    @property
    def widths(self):
        return (self.input_dim,) + tuple(self.hidden) + (self.output_dim,)


class ParamSet:
    """Weights and biases of an MLP, optionally for a whole ensemble.

    Every in-place change must be followed by `bump`, which invalidates
    caches of earlier forward passes.

    **Attributes:**

    Attributes:
        spec (MlpSpec): The network shape.
        weights (list): One (..., in, out) array per layer.
        biases (list): One (..., 1, out) array per layer.
        token (int): Changes whenever the values change.
    """

    def __init__(self, spec, weights, biases):
        """
        Args:
            spec (MlpSpec): The network shape.
            weights (list): One (..., in, out) array per layer.
            biases (list): One (..., 1, out) array per layer.

        Raises:
            DomainException: if the shapes do not match the spec.

        **Methods:**
        """
        widths = spec.widths
        if len(weights) != len(widths) - 1 or len(biases) != len(weights):
            raise DomainException(
                f"Expected {len(widths) - 1} layers, got {len(weights)} weights "
                f"and {len(biases)} biases."
            )
        lead = weights[0].shape[:-2]
        for i, (w, b) in enumerate(zip(weights, biases)):
            if w.shape != lead + (widths[i], widths[i + 1]) or b.shape != lead + (
                1,
                widths[i + 1],
            ):
                raise DomainException(
                    f"Layer {i} has shapes {w.shape} and {b.shape}, which do not "
                    f"match widths {widths[i]} -> {widths[i + 1]}."
                )
        self.spec = spec
        self.weights = [numpy.asarray(w, dtype=float) for w in weights]
        self.biases = [numpy.asarray(b, dtype=float) for b in biases]
        self.token = next(_tokens)

    def __len__(self):
        return len(self.weights)

    @property
    def ensemble_size(self) -> Optional[int]:
        """int: Number of ensemble members, None for a single network."""
        lead = self.weights[0].shape[:-2]
        return lead[0] if lead else None

    def bump(self):
        self.token = next(_tokens)

    def arrays(self) -> List[numpy.ndarray]:
        """The parameter arrays themselves (not copies), layer by layer."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    @classmethod
    def from_arrays(cls, spec, arrays):
        return cls(spec, list(arrays[0::2]), list(arrays[1::2]))

    def copy(self):
        return ParamSet.from_arrays(self.spec, [a.copy() for a in self.arrays()])

    def zeros_like(self):
        zeros = [numpy.zeros_like(a) for a in self.arrays()]
        return ParamSet.from_arrays(self.spec, zeros)

    def select(self, indices):
        """Return a copy holding only some ensemble members."""
        if self.ensemble_size is None:
            raise DomainException("Cannot select members of a single network.")
        return ParamSet.from_arrays(self.spec, [a[indices] for a in self.arrays()])

    def is_finite(self):
        return all(numpy.all(numpy.isfinite(a)) for a in self.arrays())


def init_params(spec, rng, ensemble=None):
    """Draw parameters uniformly in +-1/sqrt(fan_in), layer by layer.

    Args:
        spec (MlpSpec): The network shape.
        rng (numpy.random.Generator): The random stream.
        ensemble (int): If given, the number of independent members.

    Returns:
        ParamSet: the new parameters.
    """
    lead = () if ensemble is None else (ensemble,)
    weights, biases = [], []
    for fan_in, fan_out in zip(spec.widths[:-1], spec.widths[1:]):
        bound = 1.0 / numpy.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=lead + (fan_in, fan_out)))
        biases.append(rng.uniform(-bound, bound, size=lead + (1, fan_out)))
    return ParamSet(spec, weights, biases)


class ForwardCache(NamedTuple):
    token: int
    input_shape: tuple
    inputs: list
    preacts: list


def forward(params, x):
    """Evaluate the network.

    Args:
        params (ParamSet): The parameters.
        x (numpy.ndarray): A (B, in) batch, or (E, B, in) for per-member
                           inputs to an ensemble.

    Returns:
        tuple: (output, ForwardCache). The output is (B, out), or (E, B, out)
        for an ensemble.

    Raises:
        DomainException: if the input width does not match the network.
    """
    x = numpy.asarray(x, dtype=float)
    if x.ndim < 1 or x.shape[-1] != params.spec.input_dim:
        raise DomainException(
            f"Input width {x.shape[-1] if x.ndim else None} does not match "
            f"the network input {params.spec.input_dim}."
        )
    inputs, preacts = [], []
    h = x
    last = len(params) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        inputs.append(h)
        z = h @ w + b
        preacts.append(z)
        h = z if i == last else numpy.maximum(z, 0.0)
    return h, ForwardCache(params.token, x.shape, inputs, preacts)


def _reduce_to(grad, shape):
    """Sum out the dimensions broadcasting added to an array of some shape."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    return grad


def backward(params, cache, output_grad):
    """Reverse-mode gradients of a scalar with respect to the parameters.

    Args:
        params (ParamSet): The parameters used by the forward pass.
        cache (ForwardCache): The cache of that forward pass.
        output_grad (numpy.ndarray): Gradient of the scalar with respect to
                                     the network output.

    Returns:
        tuple: (ParamSet of gradients, gradient with respect to the input).

    Raises:
        DomainException: if the parameters changed since the forward pass.
    """
    if cache.token != params.token:
        raise DomainException("Stale forward cache: the parameters have changed.")
    delta = numpy.asarray(output_grad, dtype=float)
    n_layers = len(params)
    grad_w: List[numpy.ndarray] = [numpy.empty(0)] * n_layers
    grad_b: List[numpy.ndarray] = [numpy.empty(0)] * n_layers
    for i in reversed(range(n_layers)):
        if i != n_layers - 1:
            delta = delta * (cache.preacts[i] > 0)
        a = cache.inputs[i]
        grad_w[i] = numpy.swapaxes(a, -1, -2) @ delta
        grad_b[i] = delta.sum(axis=-2, keepdims=True)
        delta = delta @ numpy.swapaxes(params.weights[i], -1, -2)
    grads = ParamSet(params.spec, grad_w, grad_b)
    return grads, _reduce_to(delta, cache.input_shape)


class SquashedSample(NamedTuple):
    action: numpy.ndarray
    log_prob: numpy.ndarray
    pre_tanh: numpy.ndarray
    noise: numpy.ndarray
    std: numpy.ndarray


def squashed_gaussian(mean, log_std, noise):
    """Reparameterised tanh-Gaussian sample for given standard normal noise.

    The log-probability is the density of the squashed action, with the
    change of variables written as 2(log 2 - u - softplus(-2u)), which equals
    log(1 - tanh(u)^2) without its loss of precision.

    Returns:
        SquashedSample: actions (..., d) and log-probabilities (...,).
    """
    std = numpy.exp(log_std)
    pre_tanh = mean + std * noise
    log_det = 2 * (numpy.log(2.0) - pre_tanh - numpy.logaddexp(0.0, -2 * pre_tanh))
    log_prob = numpy.sum(-0.5 * noise**2 - log_std - HALF_LOG_2PI - log_det, axis=-1)
    action = numpy.clip(numpy.tanh(pre_tanh), -_BELOW_ONE, _BELOW_ONE)
    return SquashedSample(action, log_prob, pre_tanh, noise, std)


def policy_sample(mean, log_std, rng, deterministic=False):
    """Sample a squashed Gaussian action.

    Args:
        mean (numpy.ndarray): Gaussian means, (..., d).
        log_std (numpy.ndarray): Clamped log standard deviations, (..., d).
        rng (numpy.random.Generator): The random stream.
        deterministic (bool): Return tanh(mean) instead of a sample.

    Returns:
        tuple: (action in (-1, 1), log-probability of the action).
    """
    mean = numpy.asarray(mean, dtype=float)
    if deterministic:
        noise = numpy.zeros_like(mean)
    else:
        noise = rng.standard_normal(mean.shape)
    sample = squashed_gaussian(mean, log_std, noise)
    return sample.action, sample.log_prob


def squashed_gradients(sample, action_grad, log_prob_grad):
    """Gradients of a loss with respect to the mean and log std of a sample.

    Args:
        sample (SquashedSample): The reparameterised sample.
        action_grad (numpy.ndarray): dL/d(action), (..., d).
        log_prob_grad (numpy.ndarray): dL/d(log_prob), (...,).

    Returns:
        tuple: (dL/d(mean), dL/d(log_std)) before any clamp mask.
    """
    log_prob_grad = numpy.asarray(log_prob_grad, dtype=float)[..., None]
    tanh_u = numpy.tanh(sample.pre_tanh)
    pre_tanh_grad = action_grad * (1 - tanh_u**2) + log_prob_grad * 2 * tanh_u
    log_std_grad = pre_tanh_grad * sample.std * sample.noise - log_prob_grad
    return pre_tanh_grad, log_std_grad


@dataclass
class AdamState:
    """Moments and settings of an Adam optimiser.

    **Attributes:**

    Attributes:
        lr (float): Learning rate.
        beta1, beta2 (float): Moment decay rates.
        eps (float): Numerical epsilon.
        step (int): Number of updates applied.
        skipped (int): Number of updates skipped for non-finite gradients.
        m, v (list): First and second moments, shaped like the parameters.
    """

    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    skipped: int = 0
    m: List[numpy.ndarray] = field(default_factory=list)
    v: List[numpy.ndarray] = field(default_factory=list)

    @classmethod
    def for_params(cls, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        arrays = _as_arrays(params)
        return cls(
            lr=lr,
            beta1=beta1,
            beta2=beta2,
            eps=eps,
            m=[numpy.zeros_like(a) for a in arrays],
            v=[numpy.zeros_like(a) for a in arrays],
        )


def _as_arrays(params):
    return params.arrays() if isinstance(params, ParamSet) else list(params)


def adam_step(state, params, grads):
    """Apply one bias-corrected Adam update in place.

    A non-finite gradient skips the update: nothing changes except the
    `skipped` counter, and a warning is logged.

    Args:
        state (AdamState): The optimiser state.
        params (ParamSet or list): The parameters, updated in place.
        grads (ParamSet or list): Gradients shaped like the parameters.

    Returns:
        tuple: (params, state, applied) where applied is False if skipped.

    Raises:
        DomainException: if shapes do not match.
    """
    arrays = _as_arrays(params)
    grad_arrays = _as_arrays(grads)
    if len(arrays) != len(grad_arrays) or len(arrays) != len(state.m):
        raise DomainException("Parameter, gradient and moment counts differ.")
    for a, g in zip(arrays, grad_arrays):
        if a.shape != g.shape:
            raise DomainException(f"Gradient shape {g.shape} != parameter {a.shape}.")
    if not all(numpy.all(numpy.isfinite(g)) for g in grad_arrays):
        state.skipped += 1
        logging.warning(
            f"Skipped optimiser step {state.step + 1}: non-finite gradient."
        )
        return params, state, False
    state.step += 1
    correction1 = 1 - state.beta1**state.step
    correction2 = 1 - state.beta2**state.step
    for a, g, m, v in zip(arrays, grad_arrays, state.m, state.v):
        m *= state.beta1
        m += (1 - state.beta1) * g
        v *= state.beta2
        v += (1 - state.beta2) * g**2
        a -= state.lr * (m / correction1) / (numpy.sqrt(v / correction2) + state.eps)
    if isinstance(params, ParamSet):
        params.bump()
    return params, state, True


def soft_update(target, online, tau):
    """Move target parameters towards online ones, in place.

    target <- tau * target + (1 - tau) * online, so tau weights the old target.

    Raises:
        DomainException: if tau is outside [0, 1] or shapes differ.

    >>> spec = MlpSpec(1, (), 1)
    >>> target = ParamSet(spec, [numpy.ones((1, 1))], [numpy.zeros((1, 1))])
    >>> online = ParamSet(spec, [numpy.zeros((1, 1))], [numpy.zeros((1, 1))])
    >>> float(soft_update(target, online, 0.995).weights[0][0, 0])
    0.995
    """
    if not 0 <= tau <= 1:
        raise DomainException(f"Soft update tau must be in [0, 1], got {tau}.")
    target_arrays = target.arrays()
    online_arrays = online.arrays()
    if [a.shape for a in target_arrays] != [a.shape for a in online_arrays]:
        raise DomainException("Target and online parameter shapes differ.")
    for t, o in zip(target_arrays, online_arrays):
        t *= tau
        t += (1 - tau) * o
    target.bump()
    return target


def finite_difference_gradient(fn, arrays, h=1e-5):
    """Central finite-difference gradient of a scalar function.

    Args:
        fn (callable): Takes no arguments and returns a float computed from
                       the current values of `arrays`.
        arrays (list): Arrays perturbed in place, one element at a time, and
                       restored afterwards.
        h (float): Step size.

    Returns:
        list: One gradient array per input array.
    """
    grads = []
    for a in arrays:
        grad = numpy.zeros_like(a)
        flat = a.reshape(-1)
        flat_grad = grad.reshape(-1)
        for j in range(flat.size):
            original = flat[j]
            flat[j] = original + h
            upper = fn()
            flat[j] = original - h
            lower = fn()
            flat[j] = original
            flat_grad[j] = (upper - lower) / (2 * h)
        grads.append(grad)
    return grads


def relative_error(a, b, floor=1e-8):
    """Largest elementwise |a - b| / max(|a|, |b|, floor)."""
    a = numpy.asarray(a, dtype=float)
    b = numpy.asarray(b, dtype=float)
    scale = numpy.maximum(numpy.maximum(numpy.abs(a), numpy.abs(b)), floor)
    return float(numpy.max(numpy.abs(a - b) / scale)) if a.size else 0.0


def flatten(prefix, params):
    """Name the arrays of a parameter set ``<prefix>_<i>``."""
    return {f"{prefix}_{i}": a for i, a in enumerate(params.arrays())}


def unflatten(prefix, spec, arrays):
    n_arrays = 2 * (len(spec.widths) - 1)
    try:
        named = [arrays[f"{prefix}_{i}"] for i in range(n_arrays)]
        return ParamSet.from_arrays(spec, named)
    except KeyError as exc:
        raise CheckpointException(f"Checkpoint is missing array {exc}.")
    except DomainException as exc:
        raise CheckpointException(f"Checkpoint arrays for {prefix} do not fit: {exc}")


def save_checkpoint(filepath, header, arrays):
    """Write a versioned checkpoint.

    Args:
        filepath (str or Path): The ``.npz`` file to write.
        header (dict): JSON-serialisable metadata.
        arrays (dict): Named arrays.

    Returns:
        Path: the written file.
    """
    filepath = Path(filepath)
    full_header = {"format": CHECKPOINT_FORMAT, "version": CHECKPOINT_VERSION}
    full_header.update(header)
    with open(filepath, "wb") as f:
        numpy.savez(f, header=numpy.array(json.dumps(full_header)), **arrays)
    logging.info(f"Wrote checkpoint {filepath}.")
    return filepath


def load_checkpoint(filepath):
    """Read a checkpoint written by `save_checkpoint`.

    Returns:
        tuple: (header dict, dict of arrays).

    Raises:
        CheckpointException: if the file is missing, unreadable or of another
                             format or version.
    """
    filepath = Path(filepath)
    if not filepath.is_file():
        raise CheckpointException(f"Checkpoint {filepath} not found.")
    try:
        with numpy.load(filepath, allow_pickle=False) as data:
            arrays = {name: data[name] for name in data.files}
    except (OSError, ValueError, zipfile.BadZipFile) as exc:
        raise CheckpointException(f"Cannot read checkpoint {filepath}: {exc}")
    if "header" not in arrays:
        raise CheckpointException(f"Checkpoint {filepath} has no header.")
    header = json.loads(str(arrays.pop("header")))
    if header.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointException(
            f"{filepath} is not a {CHECKPOINT_FORMAT} checkpoint."
        )
    if header.get("version") != CHECKPOINT_VERSION:
        raise CheckpointException(
            f"Checkpoint version {header.get('version')} is not supported "
            f"(expected {CHECKPOINT_VERSION})."
        )
    return header, arrays
