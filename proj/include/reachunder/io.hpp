#ifndef REACHUNDER_IO_HPP
#define REACHUNDER_IO_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "reachunder/dynamics.hpp"
#include "reachunder/reach.hpp"
#include "reachunder/validate.hpp"
#include "reachunder/zonotope.hpp"

namespace reachunder {

/// Malformed or inconsistent system description, anchored to a line and
/// column of the source text (both 1-based; 0 when unknown).
class SpecError : public std::runtime_error {
public:
    SpecError(const std::string& message, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

nlohmann::json zonotope_to_json(const Zonotope& z);
Zonotope zonotope_from_json(const nlohmann::json& j);

/// Builds and validates a system from the JSON schema
/// {"n", "m", "t": [lo, hi], "A": provider, "B": provider, "X0": zonotope, "U": zonotope}.
/// Errors carry a JSON pointer in the message.
SystemSpec system_from_json(const nlohmann::json& j);

/// Parses `text`; every failure is reported as a SpecError with a position.
SystemSpec parse_system(const std::string& text);
SystemSpec load_system_file(const std::string& path);

/// {"grid": [...], "sets": [...], "accuracy_class": ..., "fingerprint": ..., "steps": N}
nlohmann::json reach_result_to_json(const ReachResult& result);
/// Restores grid, sets and metadata; per-step maps are not stored.
ReachResult reach_result_from_json(const nlohmann::json& j);

/// One polygon per set: rows "set_index,t,x1,x2".
void write_outline_csv(std::ostream& out, const ReachResult& result, int directions);

nlohmann::json certification_to_json(const CertificationReport& report);
nlohmann::json convergence_to_json(const ConvergenceReport& report);

/// %.17g formatting used for every number written as text.
std::string format_number(double value);

/// Writes `text` to `path`, throwing on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace reachunder

#endif
