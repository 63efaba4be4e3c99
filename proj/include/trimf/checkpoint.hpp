// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "trimf/model.hpp"

namespace trimf {

// Canonical JSON serialization of the whole model (config, vocabulary, type
// lists, parameters sorted by name, memory slots). save(load(x)) is
// byte-identical to x.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace trimf
