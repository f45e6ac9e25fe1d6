# Copyright 2026 The TLNS Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""NumPy reader for sgtw-1 weights files and a reference forward pass."""

import json

import numpy as np

FORMAT_VERSION = "sgtw-1"


def read_sgtw(path):
    """Returns (header dict, {tensor name: float64 array})."""
    with open(path, "rb") as f:
        data = f.read()
    end = data.index(b"\n")
    header = json.loads(data[:end].decode("utf-8"))
    if header.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"{path}: not an {FORMAT_VERSION} file")
    blob = np.frombuffer(data[end + 1 :], dtype="<f4")
    tensors = {}
    for t in header["tensors"]:
        size = int(np.prod(t["shape"]))
        chunk = blob[t["offset"] : t["offset"] + size]
        if chunk.size != size:
            raise ValueError(f"{path}: tensor {t['name']} runs past the blob")
        tensors[t["name"]] = chunk.astype(np.float64).reshape(t["shape"])
    return header, tensors


def write_sgtw(path, d, alpha, beta, tensors):
    """Writes tensors (in the given order) as an sgtw-1 file."""
    entries, chunks, offset = [], [], 0
    for name, value in tensors.items():
        arr = np.asarray(value, dtype="<f4")
        entries.append({"name": name, "shape": list(arr.shape), "offset": offset})
        chunks.append(arr.ravel())
        offset += arr.size
    header = {"format_version": FORMAT_VERSION, "d": d, "alpha": alpha, "beta": beta,
              "tensors": entries}
    with open(path, "wb") as f:
        f.write(json.dumps(header).encode("utf-8") + b"\n")
        for c in chunks:
            f.write(c.tobytes())


def _linear(t, name, x):
    return x @ t[name + ".weight"].T + t[name + ".bias"]


def _mlp(t, name, x):
    return _linear(t, name + ".fc2", np.maximum(_linear(t, name + ".fc1", x), 0.0))


def _half_conv(t, name, self_rows, other, to_idx, from_idx, edge_emb):
    agg = np.zeros_like(self_rows)
    np.add.at(agg, to_idx, other[from_idx] * edge_emb)
    return _mlp(t, name, np.concatenate([self_rows, agg], axis=1))


def dense_attention(t, h0, beta):
    """Attention with the full N x N similarity matrix."""
    n = h0.shape[0]
    q = _linear(t, "attn_q", h0)
    k = _linear(t, "attn_k", h0)
    v = _linear(t, "attn_v", h0)
    qn, kn = np.linalg.norm(q), np.linalg.norm(k)
    q = q / qn if qn > 0 else q
    k = k / kn if kn > 0 else k
    sim = np.eye(n) + (q @ k.T) / n
    out = (sim @ v) / sim.sum(axis=1, keepdims=True)
    return beta * out + (1.0 - beta) * h0


def forward(features, header, tensors):
    """Scores for the variables of a state from tlns.extract_features."""
    alpha, beta = header["alpha"], header["beta"]
    var = np.asarray(features["var_feats"])
    con = np.asarray(features["con_feats"])
    ev = np.asarray(features["edge_var"], dtype=np.int64)
    ec = np.asarray(features["edge_con"], dtype=np.int64)
    ef = np.asarray(features["edge_feats"], dtype=np.float64).reshape(-1, 1)
    n = var.shape[0]
    h0 = np.concatenate([_linear(tensors, "embed_var", var),
                         _linear(tensors, "embed_con", con)], axis=0)
    edge_emb = _linear(tensors, "embed_edge", ef)
    h = dense_attention(tensors, h0, beta)
    vars0, cons0 = h0[:n], h0[n:]
    cons1 = _half_conv(tensors, "conv_con", cons0, vars0, ec, ev, edge_emb)
    vars1 = _half_conv(tensors, "conv_var", vars0, cons1, ev, ec, edge_emb)
    out = (1.0 - alpha) * h[:n] + alpha * vars1
    logits = _mlp(tensors, "head", out)[:, 0]
    return 1.0 / (1.0 + np.exp(-logits))
