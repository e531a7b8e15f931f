# Copyright 2026 The qiter Authors
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

"""Traced iteration on contractions, LSI systems and kappa-measured loops.

Thin wrapper over the compiled ``_qiter`` extension. Matrices are numpy
arrays; partitions are lists of ``(name, size)`` pairs; FIR kernels are dicts
in the same layout as the CLI's kernel JSON files.
"""

from ._qiter import (
    ConvergenceError,
    DivergenceError,
    Error,
    FrequencyResponse,
    InternalConsistencyError,
    NotKiTraceableError,
    ParseError,
    PartitionError,
    Program,
    build_E,
    check_axioms,
    check_program,
    cnu_decompose,
    convolve,
    dtft,
    ex,
    grover_montecarlo,
    grover_recurrence,
    halmos_dilation,
    inverse_dtft,
    parse_program,
    runtime_bound,
    theta,
    theta_bound,
    vanishing_ii_counterexample,
    verify_guarantee,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
