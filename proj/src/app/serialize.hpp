#pragma once

#include <json.hpp>

#include "henon/diagnostics.hpp"
#include "henon/instanton.hpp"
#include "henon/nehari.hpp"
#include "henon/spectral.hpp"

namespace henon::app {

nlohmann::json grid_json(const Grid& grid);
nlohmann::json spectrum_json(const Spectrum& spectrum);
nlohmann::json split_json(const SubspaceSplit& split);
nlohmann::json ground_state_json(const GroundStateReport& report);
nlohmann::json morse_json(const MorseResult& morse);
nlohmann::json symmetry_json(const SymmetryReport& report);
nlohmann::json sign_json(const SignChange& sign);
nlohmann::json instanton_json(const InstantonReport& report);

}  // namespace henon::app
