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

"""Large neighborhood search for mixed-integer programs."""

from ._tlns import (
    ContractError,
    Error,
    InfeasibleInputError,
    Instance,
    NumericalError,
    ParseError,
    SgtWeights,
    UnsupportedModelError,
    extract_features,
    generate,
    load_weights,
    primal_gap,
    primal_integral,
    read_dataset,
    read_instance,
    run_lns,
    run_tlns,
    save_weights,
    sgt_forward,
    solve,
    write_dataset,
    write_instance,
)

__all__ = [
    "ContractError",
    "Error",
    "InfeasibleInputError",
    "Instance",
    "NumericalError",
    "ParseError",
    "SgtWeights",
    "UnsupportedModelError",
    "extract_features",
    "generate",
    "load_weights",
    "primal_gap",
    "primal_integral",
    "read_dataset",
    "read_instance",
    "run_lns",
    "run_tlns",
    "save_weights",
    "sgt_forward",
    "solve",
    "write_dataset",
    "write_instance",
]
