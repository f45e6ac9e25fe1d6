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

import numpy as np
import pytest

import tlns
from tlns import reference


@pytest.fixture
def cover():
    return tlns.generate("sc", items=60, subsets=40, density=0.1, seed=3)


def test_instance_roundtrip(tmp_path, cover):
    path = str(tmp_path / "sc.json")
    tlns.write_instance(cover, path)
    back = tlns.read_instance(path)
    assert back == cover
    assert (back.n, back.m) == (40, 60)
    assert tlns.Instance.from_json(cover.to_json()) == cover


def test_solve_and_searches_agree(cover):
    exact = tlns.solve(cover, time_limit=30)
    assert exact["status"] == "optimal"
    ones = [1.0] * cover.n
    lns = tlns.run_lns(cover, r=cover.n, max_subsolves=3, start=ones)
    assert lns["objective"] == exact["objective"]
    assert cover.is_feasible(lns["x"])
    tl = tlns.run_tlns(cover, r1=20, r2=6, max_subsolves=60, sub_node_limit=100, seed=2,
                       start=ones)
    objs = [e["objective"] for e in tl["log"]["events"] if e["kind"] == "incumbent"]
    assert objs[0] == cover.n
    assert all(a > b for a, b in zip(objs, objs[1:]))
    assert tl["log"]["presolve_calls"] == tl["log"]["iterations"]
    again = tlns.run_tlns(cover, r1=20, r2=6, max_subsolves=60, sub_node_limit=100, seed=2,
                          start=ones)
    assert [e["objective"] for e in again["log"]["events"]] == \
        [e["objective"] for e in tl["log"]["events"]]
    work = tlns.run_tlns(cover, r1=20, r2=6, max_lp_iterations=500, count_limit=50,
                         sub_node_limit=100, start=ones)
    assert work["log"]["lp_iterations"] >= 500
    assert work["log"]["events"][-1]["work"] == work["log"]["lp_iterations"]


def test_infeasible_start_raises(cover):
    with pytest.raises(tlns.InfeasibleInputError):
        tlns.run_lns(cover, start=[0.0] * cover.n)


def test_primal_integral_examples():
    assert tlns.primal_integral([(0.0, 100.0)], 100.0, 10.0) == 0.0
    assert tlns.primal_integral([], 100.0, 10.0) == 10.0
    assert abs(tlns.primal_integral([(2.0, 200.0), (6.0, 100.0)], 100.0, 10.0) - 4.0) <= 1e-12
    assert tlns.primal_gap(-1.0, 1.0) == 1.0
    with pytest.raises(tlns.ContractError):
        tlns.primal_integral([], float("nan"), 1.0)


def test_forward_matches_numpy_reference(tmp_path, cover):
    w = tlns.SgtWeights.random(7, d=32, scale=0.3, alpha=0.3, beta=0.7)
    path = str(tmp_path / "w.sgtw")
    tlns.save_weights(w, path)
    assert tlns.load_weights(path) == w
    header, tensors = reference.read_sgtw(path)
    assert header["d"] == 32 and len(tensors) == 24
    x = tlns.solve(cover, solution_limit=1)["x"]
    feats = tlns.extract_features(cover, x)
    ours = tlns.sgt_forward(cover, x, w)
    ref = reference.forward(feats, header, tensors)
    assert ours.shape == (cover.n,)
    np.testing.assert_allclose(ours, ref, rtol=1e-9, atol=1e-12)


def test_zero_weights_give_half(cover):
    scores = tlns.sgt_forward(cover, [1.0] * cover.n, tlns.SgtWeights.zeros())
    assert np.all(scores == 0.5)


def test_weights_written_by_numpy_load(tmp_path, cover):
    rng = np.random.default_rng(0)
    d = 8
    shapes = {
        "embed_var": (d, 7), "embed_con": (d, 6), "embed_edge": (d, 1),
        "attn_q": (d, d), "attn_k": (d, d), "attn_v": (d, d),
        "conv_con.fc1": (d, 2 * d), "conv_con.fc2": (d, d),
        "conv_var.fc1": (d, 2 * d), "conv_var.fc2": (d, d),
        "head.fc1": (d, d), "head.fc2": (1, d),
    }
    tensors = {}
    for name, shape in shapes.items():
        tensors[name + ".weight"] = rng.uniform(-0.3, 0.3, shape)
        tensors[name + ".bias"] = rng.uniform(-0.3, 0.3, shape[0])
    path = str(tmp_path / "np.sgtw")
    reference.write_sgtw(path, d, 0.5, 0.5, tensors)
    w = tlns.load_weights(path)
    assert w.d == d
    x = [1.0] * cover.n
    header, loaded = reference.read_sgtw(path)
    np.testing.assert_allclose(tlns.sgt_forward(cover, x, w),
                               reference.forward(tlns.extract_features(cover, x), header, loaded),
                               rtol=1e-9, atol=1e-12)
    reference.write_sgtw(path, d + 1, 0.5, 0.5, tensors)
    with pytest.raises(tlns.ParseError):
        tlns.load_weights(path)


def test_dataset_roundtrip(tmp_path):
    recs = [{"instance": "a.json", "incumbent": [1.0, 0.0, 1.0], "lb_k": 2,
             "positives": [[0, 2], [2]], "negatives": [[0, 1]]}]
    path = str(tmp_path / "d.jsonl")
    tlns.write_dataset(recs, path)
    assert tlns.read_dataset(path) == recs
    with open(path, "w") as f:
        f.write('{"instance":"a","incumbent":[1],"lb_k":1,"positives":[],"negatives":[]}\n')
    with pytest.raises(tlns.ParseError, match="record 0"):
        tlns.read_dataset(path)
