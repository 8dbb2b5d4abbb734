// model.cpp: parameter validation, band edges and JSON config parsing.

#include "topobatt/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "topobatt/config_io.hpp"
#include "topobatt/errors.hpp"

namespace topobatt {

std::string to_string(Sublattice s)
{
    return s == Sublattice::A ? "A" : "B";
}

Sublattice sublattice_from_string(const std::string& s)
{
    if (s == "A" || s == "a") {
        return Sublattice::A;
    }
    if (s == "B" || s == "b") {
        return Sublattice::B;
    }
    throw ConfigError("sublattice must be \"A\" or \"B\", got \"" + s + "\"");
}

bool ModelConfig::decoupled_limit() const
{
    return std::abs(bath.delta) == 1.0;
}

namespace {

void require_finite(double value, const char* name)
{
    if (!std::isfinite(value)) {
        throw ConfigError(std::string(name) + " is not finite");
    }
}

} // namespace

ModelConfig validate(const ModelConfig& raw)
{
    const auto& b = raw.bath;
    const auto& e = raw.emitters;
    require_finite(b.J, "J");
    require_finite(b.delta, "delta");
    require_finite(b.kappa_a, "kappa_a");
    require_finite(b.kappa_b, "kappa_b");
    require_finite(e.Delta, "Delta");
    require_finite(e.Omega, "Omega");
    require_finite(e.g, "g");
    require_finite(e.omega_e, "omega_e");

    if (!(b.J > 0.0)) {
        throw ConfigError("J must be positive");
    }
    if (std::abs(b.delta) > 1.0) {
        throw ConfigError("delta out of [-1,1]");
    }
    if (b.kappa_a < 0.0) {
        throw ConfigError("kappa_a negative");
    }
    if (b.kappa_b < 0.0) {
        throw ConfigError("kappa_b negative");
    }
    if (!(e.omega_e > 0.0)) {
        throw ConfigError("omega_e must be positive");
    }
    return raw;
}

double effective_direct_coupling(const ModelConfig& config)
{
    return config.emitters.same_site() ? config.emitters.Omega : 0.0;
}

double BandEdges::distance(double x) const
{
    auto dist = [x](const Interval& i) {
        if (i.contains(x)) {
            return 0.0;
        }
        return x < i.lo ? i.lo - x : x - i.hi;
    };
    return std::min(dist(lower), dist(upper));
}

BandEdges band_edges(const BathParams& bath)
{
    const double inner = 2.0 * bath.J * std::abs(bath.delta);
    const double outer = 2.0 * bath.J;
    return {{-outer, -inner}, {inner, outer}};
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

double get_number(const nlohmann::json& j, const char* key, double fallback)
{
    auto it = j.find(key);
    if (it == j.end()) {
        return fallback;
    }
    if (!it->is_number()) {
        throw ConfigError(std::string("key \"") + key + "\" must be a number");
    }
    return it->get<double>();
}

int get_int(const nlohmann::json& j, const char* key, int fallback)
{
    auto it = j.find(key);
    if (it == j.end()) {
        return fallback;
    }
    if (!it->is_number_integer()) {
        throw ConfigError(std::string("key \"") + key + "\" must be an integer");
    }
    return it->get<int>();
}

Sublattice get_sublattice(const nlohmann::json& j, const char* key, Sublattice fallback)
{
    auto it = j.find(key);
    if (it == j.end()) {
        return fallback;
    }
    if (!it->is_string()) {
        throw ConfigError(std::string("key \"") + key + "\" must be \"A\" or \"B\"");
    }
    try {
        return sublattice_from_string(it->get<std::string>());
    } catch (const ConfigError&) {
        throw ConfigError(std::string("key \"") + key + "\" must be \"A\" or \"B\"");
    }
}

const char* const kKnownKeys[] = {"J", "delta", "kappa_a", "kappa_b", "Delta", "Omega",
                                  "g", "x1", "alpha", "x2", "beta", "omega_e"};

} // namespace

ModelConfig config_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : kKnownKeys) {
            known = known || item.key() == k;
        }
        if (!known) {
            throw ConfigError("unknown key \"" + item.key() + "\"");
        }
    }

    ModelConfig c;
    c.bath.J = get_number(j, "J", c.bath.J);
    c.bath.delta = get_number(j, "delta", c.bath.delta);
    c.bath.kappa_a = get_number(j, "kappa_a", c.bath.kappa_a);
    c.bath.kappa_b = get_number(j, "kappa_b", c.bath.kappa_b);
    c.emitters.Delta = get_number(j, "Delta", c.emitters.Delta);
    c.emitters.Omega = get_number(j, "Omega", c.emitters.Omega);
    c.emitters.g = get_number(j, "g", c.emitters.g);
    c.emitters.x1 = get_int(j, "x1", c.emitters.x1);
    c.emitters.alpha = get_sublattice(j, "alpha", c.emitters.alpha);
    c.emitters.x2 = get_int(j, "x2", c.emitters.x2);
    c.emitters.beta = get_sublattice(j, "beta", c.emitters.beta);
    c.emitters.omega_e = get_number(j, "omega_e", c.emitters.omega_e);
    return validate(c);
}

ModelConfig parse_config(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

ModelConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

nlohmann::json to_json(const ModelConfig& c)
{
    return {
        {"J", c.bath.J},
        {"delta", c.bath.delta},
        {"kappa_a", c.bath.kappa_a},
        {"kappa_b", c.bath.kappa_b},
        {"Delta", c.emitters.Delta},
        {"Omega", c.emitters.Omega},
        {"g", c.emitters.g},
        {"x1", c.emitters.x1},
        {"alpha", to_string(c.emitters.alpha)},
        {"x2", c.emitters.x2},
        {"beta", to_string(c.emitters.beta)},
        {"omega_e", c.emitters.omega_e},
    };
}

} // namespace topobatt
