#ifndef GAUSSDIV_IO_HPP
#define GAUSSDIV_IO_HPP

// JSON input schemas (channels, processes) and report serialization.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaussdiv/divisibility.hpp"
#include "gaussdiv/models.hpp"

namespace gaussdiv::io {

/// {"n": int, "X": row-major 2n x 2n (flat or nested), "Y": ...}
GaussianMap<double> parse_channel(const nlohmann::json & doc);

struct ProcessSpec {
    std::string type; ///< tabulated | rates | qbm | damping
    GaussianProcess process;
    std::optional<RateProfile> rates; ///< set for rate-generated types
};

ProcessSpec parse_process(const nlohmann::json & doc);

nlohmann::json read_json_file(const std::string & path);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

std::string region_token(Region r);

nlohmann::json verdict_json(const PositivityVerdict & verdict);
nlohmann::json report_json(const DivisibilityReport & report);
nlohmann::json physicality_json(const PhysicalityReport & report);
nlohmann::json windows_json(const std::vector<AmplificationWindow> & windows);

/// Header t,eps,mu,delta,kappa,region; one row per sample.
std::string trajectory_csv(const std::vector<RateSample> & samples);
/// Header t,lambda_plus,lambda_minus,integral_plus,integral_minus.
std::string physicality_csv(const PhysicalityReport & report);
/// Header t_start,t_end,max_gap.
std::string windows_csv(const std::vector<AmplificationWindow> & windows);

/// Write through a temporary file in the same directory, then rename.
void write_atomically(const std::string & path, const std::string & content);

} // namespace gaussdiv::io

#endif // GAUSSDIV_IO_HPP
