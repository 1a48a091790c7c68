#pragma once

#include <json.hpp>

#include "levelgauss/config.hpp"
#include "levelgauss/spectral_measure.hpp"

namespace levelgauss::detail {

nlohmann::json measure_spec_json(const MeasureSpec& spec);
MeasureSpec measure_spec_from(const nlohmann::json& j);
nlohmann::json measure_json(const SpectralMeasure& m);

}  // namespace levelgauss::detail
