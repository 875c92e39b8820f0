#pragma once

#include "hypofp/entropy.hpp"
#include "hypofp/kinetic.hpp"
#include "hypofp/linalg.hpp"
#include "hypofp/system.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypofp {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitConditionA = 3,
    kExitCertificate = 4,
    kExitIo = 5,
};

struct ComponentConfig {
    double weight = 1.0;
    Vec mean;
    std::optional<Mat> cov;  // defaults to the steady covariance K
    Vec affine;
};

struct KineticConfig {
    KineticSpec spec;
    PhaseGrid grid;
    FdOptions fd;
    bool simulate = true;
    Vec initial_mean = Vec::Zero(2);
    std::optional<Mat> initial_cov;
};

struct RunConfig {
    std::string subcommand;
    std::optional<Mat> D;
    std::optional<Mat> C;
    EntropyGenerator entropy;
    std::vector<ComponentConfig> initial;
    double t_end = 8.0;
    int samples = 400;
    int quadrature_order = kDefaultQuadratureOrder;
    std::optional<double> epsilon;
    std::vector<double> weights;
    bool optimize_weights = false;
    double cluster_tolerance = kDefectTolerance;
    int m_max = 4;
    std::optional<KineticConfig> kinetic;
    std::string output_path = ".";
    std::string format = "csv";
    std::string plot = "none";

    SystemSpec system() const;
};

// Parses a JSON document; throws ConfigError.
RunConfig parse_config(const std::string& json_text);

// Executes one subcommand, writing artifacts under cfg.output_path.
// Returns an exit code; messages go to `log` and `err`.
int run(const RunConfig& cfg, std::ostream& log, std::ostream& err);

// Full command line entry point.
int run_cli(int argc, const char* const* argv, std::ostream& log, std::ostream& err);

}  // namespace hypofp
