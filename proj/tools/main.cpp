// main.cpp — tavis command-line entry point.
//
//   tavis --config run.json [--out DIR] [--threads N] [--dt X] [--tmax X] [command]
//
// The command comes from the config unless given on the command line. Exit
// codes: 0 success, 1 unexpected failure, 2 configuration error, 3 numerical
// error, 4 regime violation.

#include "config.hpp"
#include "runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace tavis::cli;
    CLI::App app{"Tavis-Cummings system-theoretic simulations"};
    std::string config_path, out_dir, command;
    int threads = 1;
    std::optional<double> dt, tmax;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "Output directory (overrides the config)");
    app.add_option("--threads", threads, "Worker threads for the parallel kernels")->check(CLI::PositiveNumber);
    app.add_option("--dt", dt, "Time step override");
    app.add_option("--tmax", tmax, "Final time override");
    app.add_option("command", command,
                   "model | transfer | decompose | response | analytic-state | master | multiphoton");
    app.set_version_flag("--version", kToolVersion);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Overrides ov;
        ov.dt = dt;
        ov.t_max = tmax;
        if (!command.empty()) ov.command = command;
        RunConfig config = parse_config(config_path, ov);
        if (!out_dir.empty()) config.output = out_dir;
        const auto result = run(config, {threads});
        std::cout << "wrote " << result.files.size() << " files and manifest.json to " << result.directory << "\n";
        return 0;
    } catch (const tavis::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
