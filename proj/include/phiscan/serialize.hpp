#pragma once

#include <json.hpp>

#include "phiscan/sieve.hpp"

namespace phiscan {

nlohmann::json to_json(const Histogram& h);
Histogram histogram_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SegmentAccumulator& acc);
SegmentAccumulator accumulator_from_json(const nlohmann::json& j);

}  // namespace phiscan
