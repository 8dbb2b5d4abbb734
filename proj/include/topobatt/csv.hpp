// csv.hpp: CSV and manifest output shared by the CLI. Numbers are written
// with 17 significant digits in the C locale so reruns are byte-identical.

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "topobatt/dynamics.hpp"
#include "topobatt/phases.hpp"
#include "topobatt/resolvent.hpp"
#include "topobatt/thermo.hpp"
#include "topobatt/zeno.hpp"

namespace topobatt {

/// %.17g; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double x);

/// Empty field for an absent value.
std::string format_number(const std::optional<double>& x);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
    std::size_t columns_;
};

/// Quotes a field containing ',', '"' or a newline.
std::string csv_field(const std::string& s);

void write_bound_states_csv(std::ostream& out, const std::vector<BoundState>& poles);
void write_dynamics_csv(std::ostream& out, const AmplitudeTrace& trace, const IndicatorSeries& indicators);
void write_sweep_csv(std::ostream& out, const PhaseGrid& grid);
void write_overlay_csv(std::ostream& out, const PhaseGrid& grid);
void write_zeno_csv(std::ostream& out, const ZenoReport& report);

/// Writes JSON to path with two-space indentation and a trailing newline.
void write_json_file(const std::string& path, const nlohmann::json& j);

} // namespace topobatt
