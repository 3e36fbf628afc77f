# Copyright 2026 The approxml Authors
#
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

"""Approximate maximum-likelihood training with accuracy contracts."""

from ._approxml import (
    Dataset,
    InvalidArgument,
    Model,
    NumericalError,
    UnsupportedOperation,
    encode_classes,
    estimate_accuracy,
    estimate_size,
    generalization_bound,
    load_dataset,
    make_synthetic,
    split,
    train_with_contract,
)

__all__ = [
    "Dataset",
    "InvalidArgument",
    "Model",
    "NumericalError",
    "UnsupportedOperation",
    "encode_classes",
    "estimate_accuracy",
    "estimate_size",
    "generalization_bound",
    "load_dataset",
    "make_synthetic",
    "split",
    "train_with_contract",
]
