# Copyright 2026 The dcsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Event-by-event simulation of a delayed-choice interferometer."""

from ._core import (
    ConfigError,
    DegenerateState,
    DlmPbs,
    InsufficientData,
    InvalidArgument,
    Message,
    RngStream,
    TopologyError,
    apply_eom,
    apply_hwp,
    apply_phase_shift,
    d_theory,
    fit_visibility,
    from_jones,
    make_message,
    reflectivity_from_voltage,
    run_cli,
    run_distinguishability,
    run_phase_sweep,
    run_point,
    to_jones,
    v_theory,
)

__version__ = "0.1.0"
