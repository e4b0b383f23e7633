#pragma once

#include <nlohmann/json.hpp>

#include "brailleband/emulator.hpp"
#include "brailleband/link.hpp"
#include "brailleband/timing.hpp"

// nlohmann::json conversions for the structured export formats.
namespace brailleband {

void to_json(nlohmann::json& j, const VibrationEvent& e);
void to_json(nlohmann::json& j, const Schedule& s);
void to_json(nlohmann::json& j, const MotorTimeline& t);
void from_json(const nlohmann::json& j, MotorTimeline& t);
void to_json(nlohmann::json& j, const TimelineSummary& s);

}  // namespace brailleband
