// config_io.hpp: JSON form of ModelConfig.
//
// Keys: J, delta, kappa_a, kappa_b, Delta, Omega, g, x1, alpha, x2, beta,
// omega_e. alpha/beta are the strings "A" or "B". Missing keys keep the
// ModelConfig defaults (J = 1, omega_e = 1, everything else 0 / "A").

#pragma once

#include <string>

#include "json.hpp"
#include "topobatt/model.hpp"

namespace topobatt {

/// Throws ConfigError naming the offending key on type or range problems.
ModelConfig config_from_json(const nlohmann::json& j);
ModelConfig parse_config(const std::string& text);
ModelConfig load_config(const std::string& path);

nlohmann::json to_json(const ModelConfig& config);

} // namespace topobatt
