// Copyright 2026 The mfdim Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON forms of construction parameters and validation reports.

#include <string>

#include "mfdim/construction.hpp"

namespace mfdim {

// Keys: beta1, gamma1, beta2, gamma2, p0, p1, n0, growth, and optionally
// generations, selection_policy, order_cap. Unknown keys are a UsageError.
ConstructionParams params_from_json(const std::string& text);
std::string params_to_json(const ConstructionParams& params);

std::string report_to_json(const ValidationReport& report);

}  // namespace mfdim
