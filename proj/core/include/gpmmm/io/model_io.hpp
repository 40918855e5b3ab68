// Copyright 2026 The gpmmm Authors
//
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

// Saved models: spec, training data and hyperparameter draws. Loading
// rebuilds the posterior without refitting.

#ifndef GPMMM_IO_MODEL_IO_HPP_
#define GPMMM_IO_MODEL_IO_HPP_

#include <string>

#include "gpmmm/dataset.hpp"
#include "gpmmm/io/json.hpp"
#include "gpmmm/mmm_models.hpp"

namespace gpmmm::io {

Json ToJson(const Dataset& d);
Dataset DatasetFromJson(ObjectReader r);

Json ModelToJson(const mmm::FittedModel& m);
mmm::FittedModel ModelFromJson(const Json& j, const std::string& source = "<model>");

void SaveModel(const mmm::FittedModel& m, const std::string& path);
mmm::FittedModel LoadModel(const std::string& path);

}  // namespace gpmmm::io

#endif  // GPMMM_IO_MODEL_IO_HPP_
