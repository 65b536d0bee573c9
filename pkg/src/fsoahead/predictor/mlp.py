"""Fully connected ReLU regressor trained with mini-batch SGD on squared error."""

import json
import struct

import numpy as np


# Weight variance per unit fan-in. "he" keeps the activation energy of a ReLU
# stack constant with depth; "lecun" halves it at every hidden layer, which
# keeps the curvature seen by the output layer small for wide layers.
_INIT_GAIN = {"lecun": 1.0, "he": 2.0}


class Mlp:
    """Affine-ReLU chain with a linear scalar output.

    ``weights[l]`` has shape (fan_in, fan_out); ``biases[l]`` shape (fan_out,).
    """

    def __init__(self, sizes, rng=None, dtype=np.float64, zero_output=False, init="lecun"):
        if len(sizes) < 2 or sizes[-1] != 1:
            raise ValueError(f"layer sizes must end in a single output, got {sizes}")
        self.sizes = tuple(int(s) for s in sizes)
        self.dtype = np.dtype(dtype)
        if init not in _INIT_GAIN:
            raise ValueError(f"unknown init {init!r}; choose from {sorted(_INIT_GAIN)}")
        rng = rng if rng is not None else np.random.default_rng(0)
        self.weights = []
        self.biases = []
        for l, (n_in, n_out) in enumerate(zip(self.sizes[:-1], self.sizes[1:])):
            # uniform with variance gain / fan_in; the linear head always uses gain 1
            last = l == len(self.sizes) - 2
            limit = np.sqrt(3.0 * (1.0 if last else _INIT_GAIN[init]) / n_in)
            w = rng.uniform(-limit, limit, (n_in, n_out))
            if last and zero_output:
                w[:] = 0.0
            self.weights.append(w.astype(self.dtype))
            self.biases.append(np.zeros(n_out, dtype=self.dtype))

    @property
    def n_params(self):
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def forward(self, X, keep=False):
        X = np.asarray(X, dtype=self.dtype)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.sizes[0]:
            raise ValueError(f"expected {self.sizes[0]} features, got {X.shape[1]}")
        acts = [X]
        h = X
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w + b
            h = z if l == len(self.weights) - 1 else np.maximum(z, 0)
            acts.append(h)
        out = h[:, 0]
        return (out, acts) if keep else out

    def loss_and_grads(self, X, y):
        """Mean squared error over the batch and its gradient per parameter."""
        y = np.asarray(y, dtype=self.dtype)
        out, acts = self.forward(X, keep=True)
        err = out - y
        loss = float(np.mean(err.astype(np.float64) ** 2))
        delta = (2.0 / len(y)) * err[:, None]
        gw = [None] * len(self.weights)
        gb = [None] * len(self.weights)
        for l in range(len(self.weights) - 1, -1, -1):
            gw[l] = acts[l].T @ delta
            gb[l] = delta.sum(axis=0)
            if l:
                delta = (delta @ self.weights[l].T) * (acts[l] > 0)
        return loss, gw, gb

    def sgd_step(self, X, y, learning_rate):
        """One averaged-gradient step; returns the batch loss before the update."""
        with np.errstate(over="ignore", invalid="ignore"):
            loss, gw, gb = self.loss_and_grads(X, y)
        if not np.isfinite(loss) or not all(np.all(np.isfinite(g)) for g in gw):
            raise FloatingPointError(
                f"non-finite loss/gradient (loss={loss}); lower the learning rate or check features"
            )
        for w, b, dw, db in zip(self.weights, self.biases, gw, gb):
            w -= learning_rate * dw
            b -= learning_rate * db
        return loss

    def get_flat(self):
        return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in zip(self.weights, self.biases)]).astype(np.float64)

    def set_flat(self, flat):
        flat = np.asarray(flat, dtype=np.float64)
        if flat.size != self.n_params:
            raise ValueError(f"expected {self.n_params} parameters, got {flat.size}")
        pos = 0
        for w, b in zip(self.weights, self.biases):
            w[...] = flat[pos : pos + w.size].reshape(w.shape)
            pos += w.size
            b[...] = flat[pos : pos + b.size]
            pos += b.size


def mlp_forward(model, features_normalized):
    return model.forward(features_normalized)


def sgd_step(model, X, y, learning_rate):
    return model.sgd_step(X, y, learning_rate)


_MAGIC = b"FSOMLP\x00\x01"


def save_checkpoint(path, model, meta=None):
    """Checkpoint layout: 8-byte magic, uint32 LE header length, UTF-8 JSON
    header, then every weight matrix (row-major) and bias vector as float64 LE.
    """
    header = {
        "version": 1,
        "layer_sizes": list(model.sizes),
        "dtype": model.dtype.name,
        "param_order": "W0,b0,W1,b1,...; W row-major (fan_in, fan_out)",
        "byte_order": "little",
        "n_params": model.n_params,
    }
    header.update(meta or {})
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(model.get_flat().astype("<f8").tobytes())


def load_checkpoint(path):
    with open(path, "rb") as fh:
        if fh.read(8) != _MAGIC:
            raise ValueError(f"{path} is not a model checkpoint")
        (n,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(n))
        flat = np.frombuffer(fh.read(), dtype="<f8")
    if header.get("version") != 1:
        raise ValueError(f"unsupported checkpoint version {header.get('version')}")
    model = Mlp(header["layer_sizes"], dtype=header["dtype"])
    model.set_flat(flat)
    return model, header
