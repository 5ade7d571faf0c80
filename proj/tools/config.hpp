// config.hpp — run configuration for the tavis command-line tool.
//
// A run is described by one JSON object:
//
//   {
//     "command": "response",
//     "params": { "n_atoms": 3, "omega_r": 0, "omega": [0, 0, 0],
//                 "gamma": [1, 1, 1], "kappa": 1, "max_cavity_photons": 1 },
//     "pulse": { "kind": "rising-exp", "gamma": 1 },
//     "initial": "egg0",
//     "drive": "vacuum",
//     "grid": { "t_start": -50, "t_max": 50, "dt": 0.005,
//               "omega_min": -8.66, "omega_max": 8.66, "d_omega": 0.001,
//               "sample_every": 10 },
//     "multiphoton": { "step": 0.01, "plot_step": 0.1, "plot_t_max": 25,
//                      "coarse_step": 0.5 },
//     "output": "out"
//   }
//
// Only "command", "params.n_atoms", "params.kappa" and "params.gamma" are
// required; every other key has a documented default (see RunConfig).

#pragma once

#include "tavis/core_model.hpp"
#include "tavis/errors.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tavis::cli {

// Malformed JSON or a value of the wrong type. `line` is 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::string field)
        : Error(ErrorClass::Config, what), line_(line), field_(std::move(field)) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

// Well-formed input that violates one or more invariants; all are reported at once.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

enum class Command { Model, Transfer, Decompose, Response, AnalyticState, Master, MultiPhoton };

const char* command_name(Command c);
std::optional<Command> command_from_name(const std::string& name);

struct PulseSpec {
    enum class Kind { RisingExp, Gaussian } kind = Kind::RisingExp;
    double gamma = 0.0;        // rising-exp rate; default kappa
    double omega_width = 3.0;  // gaussian Omega
    double t_peak = 3.0;       // gaussian t_p
};

enum class Drive { Vacuum, SinglePhoton };

struct GridSpec {
    double t_start = 0.0;     // default -t_max for a rising-exp response, else 0
    double t_max = 0.0;       // default 50 / kappa
    double dt = 0.0;          // default 0.005 / kappa
    double omega_min = 0.0;   // default -5 sqrt(N) Gamma_bar
    double omega_max = 0.0;   // default +5 sqrt(N) Gamma_bar
    double d_omega = 1e-3;
    int sample_every = 10;    // master / analytic-state output stride in steps of dt
};

struct MultiPhotonSpec {
    double step = 0.0;         // norms and amplitudes; default 0.01 / kappa
    double plot_step = 0.0;    // k = 1, 2 pulses; default 0.1 / kappa
    double plot_t_max = 0.0;   // default 25 / kappa
    double coarse_step = 0.0;  // k = 3 density; default 0.5 / kappa
};

struct RunConfig {
    Command command = Command::Model;
    SystemParams params;
    int max_cavity_photons = 1;
    PulseSpec pulse;
    std::string initial;       // default "e" followed by N-1 "g" and "0"
    Drive drive = Drive::Vacuum;
    GridSpec grid;
    MultiPhotonSpec multiphoton;
    std::string output = "out";
};

// Command-line values that replace the corresponding config keys before
// defaults are derived, so for example t_start still follows an overridden t_max.
struct Overrides {
    std::optional<std::string> command;
    std::optional<double> dt;
    std::optional<double> t_max;
};

// Parses and validates; every default is filled in on return.
RunConfig parse_config_text(const std::string& text, const Overrides& overrides = {});
RunConfig parse_config(const std::string& path, const Overrides& overrides = {});

// Canonical JSON with every field explicit. parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

// Checks the invariants of a fully defaulted config; throws ValidationError.
void validate_config(const RunConfig& config);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace tavis::cli
