#include "ecodrive/world/vehicle.hpp"

#include <stdexcept>

namespace ecodrive {

std::string_view to_string(VehicleType type) {
  switch (type) {
    case VehicleType::A: return "A";
    case VehicleType::B: return "B";
    case VehicleType::C: return "C";
    case VehicleType::D: return "D";
    case VehicleType::F: return "F";
    case VehicleType::Ego: return "Ego";
  }
  return "?";
}

bool is_valid(const VehicleParams& p) {
  return p.a_max > 0.0 && p.b_max > 0.0 && p.s0 > 0.0 && p.headway > 0.0 && p.v_tar > 0.0 &&
         p.r_lat >= 0.0 && p.r_lat <= 1.0;
}

const VehicleParams& background_params(VehicleType type) {
  static const VehicleParams kA{6.0, 6.0, 3.0, 1.5, 13.8, 0.3};
  static const VehicleParams kB{5.0, 4.5, 3.0, 1.5, 12.5, 0.2};
  static const VehicleParams kC{3.0, 5.0, 2.0, 1.2, 11.1, 0.2};
  static const VehicleParams kD{3.0, 3.0, 3.0, 1.5, 9.72, 0.1};
  static const VehicleParams kF{2.0, 1.5, 5.0, 1.5, 8.33, 0.1};
  switch (type) {
    case VehicleType::A: return kA;
    case VehicleType::B: return kB;
    case VehicleType::C: return kC;
    case VehicleType::D: return kD;
    case VehicleType::F: return kF;
    case VehicleType::Ego: break;
  }
  throw std::invalid_argument("background_params: the ego has no background class");
}

VehicleParams ego_params(double speed_limit) { return {3.0, 3.0, 2.0, 1.5, speed_limit, 0.0}; }

}  // namespace ecodrive
