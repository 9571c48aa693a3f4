#pragma once

#include "avcert/kinematics.hpp"
#include "avcert/world.hpp"
#include "json_util.hpp"

namespace avcert::detail {

Json to_json(const kinematics::LongitudinalParams& p);
Json to_json(const kinematics::LateralParams& p);
Json to_json(const VehicleState& a);

kinematics::LongitudinalParams lon_params_from(const ObjectReader& r);
kinematics::LateralParams lat_params_from(const ObjectReader& r);
VehicleState vehicle_from(const ObjectReader& r, double lane_width);

}  // namespace avcert::detail
