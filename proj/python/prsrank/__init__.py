# Copyright 2026 The prsrank Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Unbiased learning to rank from position-biased clicks."""

import json as _json

from ._prsrank import *  # noqa: F401,F403
from ._prsrank import default_config_json, run_experiment as _run_experiment

__version__ = "0.1.0"


def run_sweep(config=None, **overrides):
    """Runs an experiment grid and returns (rows, errors).

    `config` is a dict in the JSON config layout; keyword arguments
    override top-level keys.
    """
    merged = dict(config or {})
    merged.update(overrides)
    rows, errors = _run_experiment(_json.dumps(merged))
    return rows, errors


def default_config():
    return _json.loads(default_config_json())
