#pragma once

#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "wildwarn/model.hpp"

namespace wildwarn {

/// One JSON document holding configuration, raw counts and every derived
/// table. Loading rebuilds the tables from the counts, so a saved model
/// reloads bit-identically.
nlohmann::json model_to_json(const FittedModel& model);
FittedModel model_from_json(const nlohmann::json& doc);

void save_model(std::ostream& out, const FittedModel& model);
FittedModel load_model(std::istream& in);

}  // namespace wildwarn
