// runner.cpp — one function per subcommand, plus CSV and manifest output.

#include "runner.hpp"

#include "tavis/kernels.hpp"
#include "tavis/linear_analysis.hpp"
#include "tavis/master_equation.hpp"
#include "tavis/multiphoton.hpp"
#include "tavis/single_excitation.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tavis::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

std::string num(std::size_t x) { return std::to_string(x); }
std::string num(int x) { return std::to_string(x); }

// Collects rows in memory and writes them in one go.
class Csv {
public:
    explicit Csv(std::vector<std::string> header) : columns_(header.size()) { line(header); }

    template <class... Cells>
    void row(const Cells&... cells) {
        std::vector<std::string> v{cell(cells)...};
        if (v.size() != columns_) throw InvalidArgument("Csv: row width does not match the header");
        line(v);
    }
    void row(const std::vector<std::string>& v) {
        if (v.size() != columns_) throw InvalidArgument("Csv: row width does not match the header");
        line(v);
    }
    const std::string& text() const { return text_; }

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    template <class T>
    static std::string cell(const T& x) {
        return num(x);
    }
    void line(const std::vector<std::string>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) text_ += ',';
            text_ += v[i];
        }
        text_ += '\n';
    }
    std::size_t columns_;
    std::string text_;
};

// The destination is not part of what was computed, so the hashed copy points
// at the directory that holds it.
RunConfig portable(RunConfig c) {
    c.output = ".";
    return c;
}

class Output {
public:
    explicit Output(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

    void write(const std::string& name, const std::string& content) {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
        out << content;
        if (!out) throw InvalidArgument("write failed for '" + path.string() + "'");
        files_.push_back({name, sha256_hex(content), content.size()});
    }
    void write(const std::string& name, const Csv& csv) { write(name, csv.text()); }

    RunResult finish(const RunConfig& config) {
        std::sort(files_.begin(), files_.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
        nlohmann::json m;
        m["tool"] = "tavis";
        m["version"] = kToolVersion;
        m["command"] = command_name(config.command);
        const std::string canonical = serialize_config(portable(config));
        m["config_sha256"] = sha256_hex(canonical);
        m["config"] = nlohmann::json::parse(canonical);
        m["files"] = nlohmann::json::array();
        for (const auto& f : files_) m["files"].push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << m.dump(2) << "\n";
        if (!out) throw InvalidArgument("cannot write the manifest");
        return {dir_.string(), files_};
    }

private:
    fs::path dir_;
    std::vector<WrittenFile> files_;
};

void write_matrix(Csv& csv, const std::string& label, const CMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            csv.row(label, static_cast<std::size_t>(i), static_cast<std::size_t>(j), m(i, j).real(), m(i, j).imag());
}

Csv matrix_csv() { return Csv({"block [-]", "row [-]", "col [-]", "re [-]", "im [-]"}); }

PulseShape make_pulse(const PulseSpec& spec, const TimeGrid& grid) {
    if (spec.kind == PulseSpec::Kind::Gaussian) return gaussian_pulse(spec.omega_width, spec.t_peak, grid);
    return rising_exponential(spec.gamma, grid);
}

// --------------------------------------------------------------- commands

void run_model(const RunConfig& c, Output& out) {
    const TruncatedBasis basis(c.params.n_atoms, c.max_cavity_photons);
    Csv b({"index [-]", "ket [-]", "excitation [-]", "photons [-]"});
    for (std::size_t i = 0; i < basis.dimension(); ++i)
        b.row(i, basis.ket_of(i), basis.excitation(i), basis.photons(i));
    out.write("basis.csv", b);

    Csv ops({"operator [-]", "row [-]", "col [-]", "re [frequency]", "im [frequency]"});
    auto sparse = [&](const std::string& label, const CMatrix& m) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                if (m(i, j) != cplx(0.0))
                    ops.row(label, static_cast<std::size_t>(i), static_cast<std::size_t>(j), m(i, j).real(),
                            m(i, j).imag());
    };
    sparse("H", build_hamiltonian(c.params, basis).matrix());
    sparse("L", build_coupling(c.params, basis).matrix());
    sparse("H_eff", build_effective_hamiltonian(c.params, basis).matrix());
    out.write("operators.csv", ops);

    const auto lm = build_linear_model(c.params);
    Csv lin = matrix_csv();
    write_matrix(lin, "A", lm.a_matrix);
    write_matrix(lin, "B", lm.b_vector);
    write_matrix(lin, "C", lm.c_vector);
    out.write("linear_model.csv", lin);

    Csv s({"property [-]", "value [-]"});
    s.row("controllable", num(static_cast<int>(is_controllable(lm).controllable)));
    s.row("observable", num(static_cast<int>(is_observable(lm))));
    s.row("hurwitz", num(static_cast<int>(is_hurwitz(lm))));
    s.row("passivity_residual", lm.passivity_residual());
    s.row("gamma_bar", c.params.gamma_bar());
    out.write("model_summary.csv", s);
}

void run_transfer(const RunConfig& c, const RunOptions& o, Output& out) {
    // Dark modes put poles on the imaginary axis; the controllable/observable
    // block has the same transfer function without them.
    const auto lm = c.params.n_atoms > 0 ? co_subsystem(structural_decompose(c.params), c.params)
                                         : build_linear_model(c.params);
    const auto n = static_cast<std::size_t>(std::floor((c.grid.omega_max - c.grid.omega_min) / c.grid.d_omega + 1e-9)) + 1;
    std::vector<double> omegas(n);
    for (std::size_t i = 0; i < n; ++i) omegas[i] = c.grid.omega_min + static_cast<double>(i) * c.grid.d_omega;
    const auto g = kernels::transfer_sweep(lm, omegas, o.threads);
    Csv csv({"omega [frequency]", "re_G [-]", "im_G [-]", "abs_T_sq [-]"});
    for (std::size_t i = 0; i < n; ++i) csv.row(omegas[i], g[i].real(), g[i].imag(), std::norm(g[i] - 1.0));
    out.write("transfer.csv", csv);
}

void run_decompose(const RunConfig& c, Output& out) {
    const auto d = structural_decompose(c.params);
    Csv m = matrix_csv();
    write_matrix(m, "T", d.transform.cast<cplx>());
    write_matrix(m, "A_hat", d.a_hat);
    const auto co = co_subsystem(d, c.params);
    write_matrix(m, "A_co", co.a_matrix);
    write_matrix(m, "B_co", co.b_vector);
    write_matrix(m, "C_co", co.c_vector);
    out.write("decomposition.csv", m);

    Csv g({"group [-]", "frequency [frequency]", "atoms [-]", "effective_coupling [frequency^2]", "dfs_dimension [-]",
           "has_bright_mode [-]", "first_column [-]"});
    for (std::size_t i = 0; i < d.groups.size(); ++i) {
        const auto& gr = d.groups[i];
        std::string atoms;
        for (std::size_t a = 0; a < gr.atoms.size(); ++a) atoms += (a ? ";" : "") + std::to_string(gr.atoms[a] + 1);
        g.row(i, gr.frequency, atoms, gr.effective_coupling, gr.dfs_dimension, static_cast<int>(gr.has_bright_mode),
              gr.first_column);
    }
    out.write("groups.csv", g);
}

void run_response(const RunConfig& c, const RunOptions& o, Output& out) {
    const auto xi = make_pulse(c.pulse, TimeGrid::spanning(c.grid.t_start, c.grid.t_max, c.grid.dt));
    ResponseOptions ro;
    ro.threads = o.threads;
    const auto eta = single_photon_response(c.params, xi, ro);
    Csv csv({"t [time]", "abs_xi_sq [1/time]", "abs_eta_sq [1/time]", "re_eta [1/sqrt(time)]", "im_eta [1/sqrt(time)]"});
    for (std::size_t i = 0; i < xi.size(); ++i)
        csv.row(xi.time(i), std::norm(xi.values[i]), std::norm(eta.values[i]), eta.values[i].real(),
                eta.values[i].imag());
    out.write("response.csv", csv);
}

void run_analytic(const RunConfig& c, Output& out) {
    const int k = static_cast<int>(c.initial.find('e'));
    const int n = c.params.n_atoms;
    std::vector<std::string> header{"t [time]"};
    for (int j = 1; j <= n; ++j) header.push_back("abs_c" + std::to_string(j) + " [-]");
    header.insert(header.end(), {"abs_c_cavity [-]", "field_probability [-]"});
    Csv csv(header);
    const auto grid = TimeGrid::spanning(0.0, c.grid.t_max, c.grid.dt * c.grid.sample_every);
    for (std::size_t i = 0; i < grid.n_points; ++i) {
        const auto s = analytic_single_excitation_state(c.params, k, grid.time(i));
        std::vector<std::string> row{num(grid.time(i))};
        for (const auto& a : s.c) row.push_back(num(std::abs(a)));
        row.push_back(num(std::abs(s.c_cavity)));
        row.push_back(num(std::norm(s.c_field) * s.phi_norm));
        csv.row(row);
    }
    out.write("analytic_state.csv", csv);

    const auto st = steady_single_excitation_state(c.params, k);
    Csv steady({"quantity [-]", "modulus_sq [-]"});
    for (int j = 0; j < n; ++j) steady.row("c" + std::to_string(j + 1), std::norm(st.c[static_cast<std::size_t>(j)]));
    steady.row("field", std::norm(st.c_field) * st.phi_norm);
    out.write("analytic_steady.csv", steady);
}

void run_master(const RunConfig& c, Output& out) {
    const TruncatedBasis basis(c.params.n_atoms, c.max_cavity_photons);
    const CVector psi0 = basis_ket(basis, c.initial);
    const DensityMatrix rho0 = psi0 * psi0.adjoint();
    IntegrationOptions opt;
    opt.t_start = 0.0;
    opt.t_end = c.grid.t_max;
    opt.dt = c.grid.dt;
    opt.sample_stride = static_cast<std::size_t>(c.grid.sample_every);
    const auto ground = static_cast<Eigen::Index>(basis.index_of(std::string(static_cast<std::size_t>(c.params.n_atoms), 'g') + "0"));

    std::vector<double> times;
    std::vector<DensityMatrix> states;
    if (c.drive == Drive::Vacuum) {
        auto traj = integrate_vacuum_master(c.params, basis, rho0, opt);
        times = std::move(traj.times);
        states = std::move(traj.states);
    } else {
        // A rising exponential is shifted so that it ends at t_peak.
        PulseShape xi;
        if (c.pulse.kind == PulseSpec::Kind::Gaussian) {
            xi = make_pulse(c.pulse, TimeGrid::spanning(0.0, c.grid.t_max, c.grid.dt));
        } else {
            xi = make_pulse(c.pulse, TimeGrid::spanning(-c.pulse.t_peak, c.grid.t_max - c.pulse.t_peak, c.grid.dt));
            xi.t_start += c.pulse.t_peak;
        }
        auto traj = integrate_fock_master(c.params, basis, xi, rho0, opt);
        times = std::move(traj.times);
        for (auto& s : traj.states) states.push_back(std::move(s.rho11));
    }
    Csv csv({"t [time]", "P_TLS1 [-]", "trace [-]", "ground_fidelity [-]"});
    for (std::size_t i = 0; i < times.size(); ++i)
        csv.row(times[i], atom_excitation(states[i], basis, 0), states[i].trace().real(), states[i](ground, ground).real());
    out.write("master.csv", csv);
}

void run_multiphoton(const RunConfig& c, const RunOptions& o, Output& out) {
    const TruncatedBasis basis(c.params.n_atoms, c.max_cavity_photons);
    const CVector eta0 = basis_ket(basis, c.initial);
    const auto& mp = c.multiphoton;
    const int top = initial_excitation(eta0, basis);

    const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(c.grid.dt * c.grid.sample_every / mp.step)));
    const auto hist = sector_norm_history(c.params, basis, eta0, c.grid.t_max, mp.step, stride);
    std::vector<std::string> header{"t [time]"};
    for (int k = 0; k <= top; ++k) header.push_back("norm_k" + std::to_string(k) + " [-]");
    header.push_back("total [-]");
    Csv norms(header);
    for (std::size_t i = 0; i < hist.times.size(); ++i) {
        std::vector<std::string> row{num(hist.times[i])};
        for (int k = 0; k <= top; ++k) row.push_back(num(hist.norms[static_cast<std::size_t>(k)][i]));
        row.push_back(num(hist.total(i)));
        norms.row(row);
    }
    out.write("sector_norms.csv", norms);

    SteadyOutputOptions so;
    so.t_max = c.grid.t_max;
    so.step = mp.step;
    so.pulse_photons_max = 0;
    so.multiphoton.threads = o.threads;
    const auto steady = steady_output_state(c.params, basis, eta0, so);
    Csv amp({"photons [-]", "basis_index [-]", "ket [-]", "amplitude [-]", "re_value [-]", "im_value [-]"});
    for (const auto& br : steady.branches)
        amp.row(br.photons, br.basis_index, basis.ket_of(br.basis_index), br.amplitude, br.system_value.real(),
                br.system_value.imag());
    out.write("steady_amplitudes.csv", amp);

    MultiPhotonOptions mo;
    mo.threads = o.threads;
    if (top >= 1) {
        // One column per photon-empty branch, each normalized on the plot grid.
        const auto sec = sector_wavefunctions(c.params, basis, eta0, mp.plot_t_max, mp.plot_step, 1, mo)[1];
        const std::size_t d = sec.support.size();
        std::vector<std::size_t> cols;
        std::vector<double> weight;
        for (std::size_t s = 0; s < d; ++s) {
            if (basis.photons(sec.support[s]) > 0) continue;
            double p = 0.0;
            for (std::size_t node = 0; node < sec.nodes(); ++node) p += std::norm(sec.values[node * d + s]) * mp.plot_step;
            if (p > 1e-12) {
                cols.push_back(s);
                weight.push_back(p);
            }
        }
        std::vector<std::string> h{"t [time]"};
        for (auto s : cols) h.push_back("abs_eta_sq[" + basis.ket_of(sec.support[s]) + "] [1/time]");
        Csv pulse(h);
        for (std::size_t node = 0; node < sec.nodes(); ++node) {
            std::vector<std::string> row{num((static_cast<double>(node) + 0.5) * mp.plot_step)};
            for (std::size_t j = 0; j < cols.size(); ++j)
                row.push_back(num(std::norm(sec.values[node * d + cols[j]]) / weight[j]));
            pulse.row(row);
        }
        out.write("pulse_k1.csv", pulse);
    }
    auto write_density = [&](int k, double step, const std::string& name) {
        const auto sec = sector_wavefunctions(c.params, basis, eta0, mp.plot_t_max, step, k, mo)[static_cast<std::size_t>(k)];
        const auto dens = symmetrize_for_plot(sec);
        std::vector<std::string> h;
        for (int j = 1; j <= k; ++j) h.push_back("t" + std::to_string(j) + " [time]");
        h.push_back("density [1/time^" + std::to_string(k) + "]");
        Csv csv(h);
        std::vector<std::size_t> cube(static_cast<std::size_t>(k));
        for (std::size_t flat = 0; flat < dens.density.size(); ++flat) {
            std::size_t rest = flat;
            for (int p = k - 1; p >= 0; --p) {
                cube[static_cast<std::size_t>(p)] = rest % dens.cells;
                rest /= dens.cells;
            }
            std::vector<std::string> row;
            for (auto i : cube) row.push_back(num((static_cast<double>(i) + 0.5) * step));
            row.push_back(num(dens.density[flat]));
            csv.row(row);
        }
        out.write(name, csv);
    };
    if (top >= 2) write_density(2, mp.plot_step, "density_k2.csv");
    if (top >= 3) write_density(3, mp.coarse_step, "density_k3.csv");
}

}  // namespace

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw InvalidArgument("SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) {
        s += hex[digest[i] >> 4];
        s += hex[digest[i] & 15];
    }
    return s;
}

int exit_code_for(const Error& e) {
    switch (e.error_class()) {
    case ErrorClass::Config: return 2;
    case ErrorClass::Numerical: return 3;
    case ErrorClass::Regime: return 4;
    }
    return 1;
}

RunResult run(const RunConfig& config, const RunOptions& options) {
    validate_config(config);
    Output out(config.output);
    out.write("config.json", serialize_config(portable(config)));
    switch (config.command) {
    case Command::Model: run_model(config, out); break;
    case Command::Transfer: run_transfer(config, options, out); break;
    case Command::Decompose: run_decompose(config, out); break;
    case Command::Response: run_response(config, options, out); break;
    case Command::AnalyticState: run_analytic(config, out); break;
    case Command::Master: run_master(config, out); break;
    case Command::MultiPhoton: run_multiphoton(config, options, out); break;
    }
    return out.finish(config);
}

}  // namespace tavis::cli
