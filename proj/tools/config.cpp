// config.cpp — JSON run configuration: parsing, defaults, validation and the
// canonical serialization used for the manifest hash.

#include "config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tavis::cli {

using nlohmann::json;

namespace {

const std::pair<Command, const char*> kCommands[] = {
    {Command::Model, "model"},         {Command::Transfer, "transfer"},
    {Command::Decompose, "decompose"}, {Command::Response, "response"},
    {Command::AnalyticState, "analytic-state"}, {Command::Master, "master"},
    {Command::MultiPhoton, "multiphoton"},
};

// Line of the first occurrence of "key" in the text, for error messages.
std::size_t line_of_key(const std::string& text, const std::string& key) {
    const auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos) return 0;
    return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n')) + 1;
}

// Typed access with path-aware errors.
class Reader {
public:
    Reader(const std::string& text, std::vector<std::string>& problems) : text_(text), problems_(problems) {}

    template <class T>
    std::optional<T> get(const json& obj, const std::string& key, const std::string& path) const {
        const auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) return std::nullopt;
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!it->is_number()) throw std::invalid_argument("expected a number");
            } else if constexpr (std::is_same_v<T, int>) {
                if (!it->is_number_integer()) throw std::invalid_argument("expected an integer");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!it->is_string()) throw std::invalid_argument("expected a string");
            } else if constexpr (std::is_same_v<T, std::vector<double>>) {
                if (!it->is_array()) throw std::invalid_argument("expected an array of numbers");
                for (const auto& v : *it)
                    if (!v.is_number()) throw std::invalid_argument("expected an array of numbers");
            }
            return it->get<T>();
        } catch (const std::exception& e) {
            throw ParseError("line " + std::to_string(line_of_key(text_, key)) + ", field '" + path + "': " + e.what(),
                             line_of_key(text_, key), path);
        }
    }

    const json* object(const json& obj, const std::string& key, const std::string& path) const {
        const auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) return nullptr;
        if (!it->is_object())
            throw ParseError("line " + std::to_string(line_of_key(text_, key)) + ", field '" + path +
                                 "': expected an object",
                             line_of_key(text_, key), path);
        return &*it;
    }

    void known_keys(const json& obj, const std::set<std::string>& keys, const std::string& prefix) const {
        for (const auto& [k, v] : obj.items())
            if (!keys.count(k)) problems_.push_back("unknown field '" + prefix + k + "'");
    }

    void missing(const std::string& path) const { problems_.push_back("missing required field '" + path + "'"); }

private:
    const std::string& text_;
    std::vector<std::string>& problems_;
};

std::string default_ket(int n_atoms) {
    std::string k = n_atoms > 0 ? "e" : "";
    for (int i = 1; i < n_atoms; ++i) k += 'g';
    return k + "0";
}

void resolve_defaults(RunConfig& c, bool t_start_given) {
    const double kappa = c.params.kappa > 0.0 ? c.params.kappa : 1.0;
    if (c.pulse.gamma == 0.0) c.pulse.gamma = kappa;
    if (c.grid.t_max == 0.0) c.grid.t_max = 50.0 / kappa;
    if (c.grid.dt == 0.0) c.grid.dt = 0.005 / kappa;
    if (!t_start_given)
        c.grid.t_start =
            (c.command == Command::Response && c.pulse.kind == PulseSpec::Kind::RisingExp) ? -c.grid.t_max : 0.0;
    if (c.grid.omega_min == 0.0 && c.grid.omega_max == 0.0) {
        const double half = 5.0 * std::sqrt(std::max(c.params.n_atoms, 1)) *
                            (c.params.gamma_bar() > 0.0 ? c.params.gamma_bar() : 1.0);
        c.grid.omega_min = -half;
        c.grid.omega_max = half;
    }
    if (c.multiphoton.step == 0.0) c.multiphoton.step = 0.01 / kappa;
    if (c.multiphoton.plot_step == 0.0) c.multiphoton.plot_step = 0.1 / kappa;
    if (c.multiphoton.plot_t_max == 0.0) c.multiphoton.plot_t_max = 25.0 / kappa;
    if (c.multiphoton.coarse_step == 0.0) c.multiphoton.coarse_step = 0.5 / kappa;
    if (c.initial.empty()) c.initial = default_ket(c.params.n_atoms);
}

bool is_multiple(double t, double step) {
    const double x = t / step;
    return std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, x);
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : Error(ErrorClass::Config,
            [&] {
                std::ostringstream os;
                os << "invalid configuration:";
                for (const auto& p : problems) os << "\n  - " << p;
                return os.str();
            }()),
      problems_(std::move(problems)) {}

const char* command_name(Command c) {
    for (const auto& [cmd, name] : kCommands)
        if (cmd == c) return name;
    return "?";
}

std::optional<Command> command_from_name(const std::string& name) {
    for (const auto& [cmd, n] : kCommands)
        if (name == n) return cmd;
    return std::nullopt;
}

RunConfig parse_config_text(const std::string& text, const Overrides& overrides) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n')) + 1;
        throw ParseError("line " + std::to_string(line) + ": malformed JSON: " + e.what(), line, "");
    }
    if (!root.is_object()) throw ParseError("line 1: the configuration must be a JSON object", 1, "");

    std::vector<std::string> problems;
    const Reader r(text, problems);
    r.known_keys(root, {"command", "params", "pulse", "initial", "drive", "grid", "multiphoton", "output"}, "");

    RunConfig c;
    auto cmd = overrides.command ? overrides.command : r.get<std::string>(root, "command", "command");
    if (cmd) {
        if (auto parsed = command_from_name(*cmd)) c.command = *parsed;
        else problems.push_back("unknown command '" + *cmd + "'");
    } else {
        r.missing("command");
    }

    if (const json* p = r.object(root, "params", "params")) {
        r.known_keys(*p, {"n_atoms", "omega_r", "omega", "gamma", "kappa", "max_cavity_photons"}, "params.");
        if (auto n = r.get<int>(*p, "n_atoms", "params.n_atoms")) c.params.n_atoms = *n;
        else r.missing("params.n_atoms");
        if (auto k = r.get<double>(*p, "kappa", "params.kappa")) c.params.kappa = *k;
        else r.missing("params.kappa");
        if (auto g = r.get<std::vector<double>>(*p, "gamma", "params.gamma")) c.params.gamma = *g;
        else r.missing("params.gamma");
        c.params.omega_r = r.get<double>(*p, "omega_r", "params.omega_r").value_or(0.0);
        c.params.omega = r.get<std::vector<double>>(*p, "omega", "params.omega")
                             .value_or(std::vector<double>(static_cast<std::size_t>(std::max(c.params.n_atoms, 0)), 0.0));
        c.max_cavity_photons = r.get<int>(*p, "max_cavity_photons", "params.max_cavity_photons").value_or(1);
    } else {
        r.missing("params");
    }

    if (const json* p = r.object(root, "pulse", "pulse")) {
        r.known_keys(*p, {"kind", "gamma", "omega", "t_peak"}, "pulse.");
        const auto kind = r.get<std::string>(*p, "kind", "pulse.kind").value_or("rising-exp");
        if (kind == "rising-exp") c.pulse.kind = PulseSpec::Kind::RisingExp;
        else if (kind == "gaussian") c.pulse.kind = PulseSpec::Kind::Gaussian;
        else problems.push_back("pulse.kind must be 'rising-exp' or 'gaussian', got '" + kind + "'");
        c.pulse.gamma = r.get<double>(*p, "gamma", "pulse.gamma").value_or(0.0);
        c.pulse.omega_width = r.get<double>(*p, "omega", "pulse.omega").value_or(3.0);
        c.pulse.t_peak = r.get<double>(*p, "t_peak", "pulse.t_peak").value_or(3.0);
    }

    c.initial = r.get<std::string>(root, "initial", "initial").value_or("");
    const auto drive = r.get<std::string>(root, "drive", "drive").value_or("vacuum");
    if (drive == "vacuum") c.drive = Drive::Vacuum;
    else if (drive == "single-photon") c.drive = Drive::SinglePhoton;
    else problems.push_back("drive must be 'vacuum' or 'single-photon', got '" + drive + "'");

    bool t_start_given = false;
    if (const json* g = r.object(root, "grid", "grid")) {
        r.known_keys(*g, {"t_start", "t_max", "dt", "omega_min", "omega_max", "d_omega", "sample_every"}, "grid.");
        if (auto v = r.get<double>(*g, "t_start", "grid.t_start")) {
            c.grid.t_start = *v;
            t_start_given = true;
        }
        c.grid.t_max = r.get<double>(*g, "t_max", "grid.t_max").value_or(0.0);
        c.grid.dt = r.get<double>(*g, "dt", "grid.dt").value_or(0.0);
        c.grid.omega_min = r.get<double>(*g, "omega_min", "grid.omega_min").value_or(0.0);
        c.grid.omega_max = r.get<double>(*g, "omega_max", "grid.omega_max").value_or(0.0);
        c.grid.d_omega = r.get<double>(*g, "d_omega", "grid.d_omega").value_or(1e-3);
        c.grid.sample_every = r.get<int>(*g, "sample_every", "grid.sample_every").value_or(10);
    }
    if (const json* m = r.object(root, "multiphoton", "multiphoton")) {
        r.known_keys(*m, {"step", "plot_step", "plot_t_max", "coarse_step"}, "multiphoton.");
        c.multiphoton.step = r.get<double>(*m, "step", "multiphoton.step").value_or(0.0);
        c.multiphoton.plot_step = r.get<double>(*m, "plot_step", "multiphoton.plot_step").value_or(0.0);
        c.multiphoton.plot_t_max = r.get<double>(*m, "plot_t_max", "multiphoton.plot_t_max").value_or(0.0);
        c.multiphoton.coarse_step = r.get<double>(*m, "coarse_step", "multiphoton.coarse_step").value_or(0.0);
    }
    c.output = r.get<std::string>(root, "output", "output").value_or("out");

    if (overrides.dt) c.grid.dt = *overrides.dt;
    if (overrides.t_max) c.grid.t_max = *overrides.t_max;

    // Defaults derive from the required fields, so the invariants can only be
    // checked once those are present; otherwise report what was found so far.
    const bool complete = std::none_of(problems.begin(), problems.end(), [](const std::string& p) {
        return p.rfind("missing required field", 0) == 0 || p.rfind("unknown command", 0) == 0;
    });
    if (complete) {
        resolve_defaults(c, t_start_given);
        try {
            validate_config(c);
        } catch (const ValidationError& e) {
            problems.insert(problems.end(), e.problems().begin(), e.problems().end());
        }
    }
    if (!problems.empty()) throw ValidationError(problems);
    return c;
}

RunConfig parse_config(const std::string& path, const Overrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open configuration file '" + path + "'", 0, "");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), overrides);
}

void validate_config(const RunConfig& c) {
    std::vector<std::string> problems;
    try {
        c.params.validate();
    } catch (const InvalidArgument& e) {
        std::istringstream lines(e.what());
        std::string line;
        std::getline(lines, line);  // header
        while (std::getline(lines, line)) problems.push_back("params: " + line.substr(line.find('-') + 2));
    }
    if (c.params.n_atoms > 20) problems.push_back("params.n_atoms above 20 is not supported by the dense basis");
    if (c.params.n_atoms < 1 && c.command != Command::Transfer && c.command != Command::Response)
        problems.push_back("params.n_atoms must be at least 1 for '" + std::string(command_name(c.command)) + "'");
    if (c.max_cavity_photons < 0) problems.push_back("params.max_cavity_photons must be >= 0");

    // Ket: n_atoms symbols from {e, g} followed by one photon digit.
    const auto& k = c.initial;
    if (static_cast<int>(k.size()) != c.params.n_atoms + 1) {
        problems.push_back("initial ket '" + k + "' must have n_atoms + 1 = " + std::to_string(c.params.n_atoms + 1) +
                           " symbols");
    } else {
        for (std::size_t i = 0; i + 1 < k.size(); ++i)
            if (k[i] != 'e' && k[i] != 'g') problems.push_back("initial ket '" + k + "': atom symbols must be 'e' or 'g'");
        const char last = k.back();
        if (last < '0' || last > '9' || last - '0' > c.max_cavity_photons)
            problems.push_back("initial ket '" + k + "': photon digit must lie in 0.." +
                               std::to_string(c.max_cavity_photons));
    }
    const auto excited = static_cast<int>(std::count(k.begin(), k.end(), 'e'));
    const int photons = (!k.empty() && k.back() >= '0' && k.back() <= '9') ? k.back() - '0' : 0;

    if (!(c.params.kappa > 0.0) && c.command != Command::Model && c.command != Command::Decompose)
        problems.push_back("params.kappa must be positive for '" + std::string(command_name(c.command)) + "'");
    if (!(c.grid.t_max > 0.0)) problems.push_back("grid.t_max must be positive");
    if (!(c.grid.dt > 0.0)) problems.push_back("grid.dt must be positive");
    if (c.grid.dt > 0.0 && c.grid.t_max > 0.0 && c.grid.dt > c.grid.t_max)
        problems.push_back("grid.dt must not exceed grid.t_max");
    if (!(c.grid.t_start < c.grid.t_max)) problems.push_back("grid.t_start must be below grid.t_max");
    if (!(c.grid.omega_min < c.grid.omega_max)) problems.push_back("grid.omega_min must be below grid.omega_max");
    if (!(c.grid.d_omega > 0.0)) problems.push_back("grid.d_omega must be positive");
    if (c.grid.sample_every < 1) problems.push_back("grid.sample_every must be at least 1");
    if (c.pulse.kind == PulseSpec::Kind::RisingExp && !(c.pulse.gamma > 0.0))
        problems.push_back("pulse.gamma must be positive");
    if (c.pulse.kind == PulseSpec::Kind::Gaussian && !(c.pulse.omega_width > 0.0))
        problems.push_back("pulse.omega must be positive");
    if (c.output.empty()) problems.push_back("output must be a directory name");

    switch (c.command) {
    case Command::AnalyticState:
        if (excited != 1 || photons != 0)
            problems.push_back("analytic-state needs exactly one excited atom and an empty cavity in 'initial'");
        break;
    case Command::Master: {
        // The truncation is exact only if every reachable photon number fits.
        const int needed = excited + photons + (c.drive == Drive::SinglePhoton ? 1 : 0);
        if (needed > c.max_cavity_photons)
            problems.push_back("master needs params.max_cavity_photons >= " + std::to_string(needed) +
                               " for this initial state and drive");
        break;
    }
    case Command::MultiPhoton: {
        const auto& m = c.multiphoton;
        if (!(m.step > 0.0) || !(m.plot_step > 0.0) || !(m.coarse_step > 0.0) || !(m.plot_t_max > 0.0))
            problems.push_back("multiphoton steps and plot_t_max must be positive");
        else {
            if (!is_multiple(c.grid.t_max, m.step)) problems.push_back("grid.t_max must be a multiple of multiphoton.step");
            if (!is_multiple(m.plot_t_max, m.plot_step) || !is_multiple(m.plot_t_max, m.coarse_step))
                problems.push_back("multiphoton.plot_t_max must be a multiple of plot_step and coarse_step");
        }
        if (excited + photons > c.max_cavity_photons)
            problems.push_back("multiphoton needs params.max_cavity_photons >= the excitation of 'initial' (" +
                               std::to_string(excited + photons) + ")");
        break;
    }
    default:
        break;
    }
    if (!problems.empty()) throw ValidationError(problems);
}

std::string serialize_config(const RunConfig& c) {
    json j;
    j["command"] = command_name(c.command);
    j["params"] = {{"n_atoms", c.params.n_atoms},   {"omega_r", c.params.omega_r}, {"omega", c.params.omega},
                   {"gamma", c.params.gamma},       {"kappa", c.params.kappa},
                   {"max_cavity_photons", c.max_cavity_photons}};
    j["pulse"] = {{"kind", c.pulse.kind == PulseSpec::Kind::RisingExp ? "rising-exp" : "gaussian"},
                  {"gamma", c.pulse.gamma},
                  {"omega", c.pulse.omega_width},
                  {"t_peak", c.pulse.t_peak}};
    j["initial"] = c.initial;
    j["drive"] = c.drive == Drive::Vacuum ? "vacuum" : "single-photon";
    j["grid"] = {{"t_start", c.grid.t_start},     {"t_max", c.grid.t_max},         {"dt", c.grid.dt},
                 {"omega_min", c.grid.omega_min}, {"omega_max", c.grid.omega_max}, {"d_omega", c.grid.d_omega},
                 {"sample_every", c.grid.sample_every}};
    j["multiphoton"] = {{"step", c.multiphoton.step},
                        {"plot_step", c.multiphoton.plot_step},
                        {"plot_t_max", c.multiphoton.plot_t_max},
                        {"coarse_step", c.multiphoton.coarse_step}};
    j["output"] = c.output;
    return j.dump(2) + "\n";
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    const auto& p = a.params;
    const auto& q = b.params;
    return a.command == b.command && p.n_atoms == q.n_atoms && p.omega_r == q.omega_r && p.omega == q.omega &&
           p.gamma == q.gamma && p.kappa == q.kappa && a.max_cavity_photons == b.max_cavity_photons &&
           a.pulse.kind == b.pulse.kind && a.pulse.gamma == b.pulse.gamma &&
           a.pulse.omega_width == b.pulse.omega_width && a.pulse.t_peak == b.pulse.t_peak && a.initial == b.initial &&
           a.drive == b.drive && a.grid.t_start == b.grid.t_start && a.grid.t_max == b.grid.t_max &&
           a.grid.dt == b.grid.dt && a.grid.omega_min == b.grid.omega_min && a.grid.omega_max == b.grid.omega_max &&
           a.grid.d_omega == b.grid.d_omega && a.grid.sample_every == b.grid.sample_every &&
           a.multiphoton.step == b.multiphoton.step && a.multiphoton.plot_step == b.multiphoton.plot_step &&
           a.multiphoton.plot_t_max == b.multiphoton.plot_t_max &&
           a.multiphoton.coarse_step == b.multiphoton.coarse_step && a.output == b.output;
}

}  // namespace tavis::cli
