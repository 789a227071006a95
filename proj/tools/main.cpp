// qubitless - command-line front end: spectrum, cnot-sweep, shor, compile.
//
// Exit codes: 0 success, 1 file I/O failure, 2 configuration error,
// 3 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qubitless/config.hpp"
#include "qubitless/experiments.hpp"
#include "qubitless/gates.hpp"
#include "qubitless/shor.hpp"

namespace fs = std::filesystem;
using namespace qubitless;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flag values are kept as strings and applied through the same setter as
// config-file keys, so a flag and a file line mean exactly the same thing.
struct Overrides {
    std::string config_path;
    std::map<std::string, std::string> storage;

    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        storage[key];
        app->add_option(flag, storage[key], help);
        keys.emplace_back(flag, key);
    }

    ExperimentConfig resolve(CLI::App* app, ExperimentConfig base) const {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
            base = read_config(in, std::move(base));
        }
        for (const auto& [flag, key] : keys)
            if (app->count(flag) > 0) set_key(base, key, storage.at(key));
        validate(base);
        return base;
    }

    std::vector<std::pair<std::string, std::string>> keys;
};

void add_common(CLI::App* app, Overrides& o, bool chain_flags) {
    app->add_option("--config", o.config_path, "key=value configuration file");
    o.add(app, "--out", "out", "output directory");
    o.add(app, "--units", "units", "frequency units in CSV output: J or absolute");
    o.add(app, "--engine", "engine", "rwa, exact or oracle");
    o.add(app, "--threads", "threads", "worker threads (0 = all cores)");
    if (!chain_flags) return;
    o.add(app, "--length", "length", "number of spins");
    o.add(app, "--J", "coupling", "exchange coupling J");
    o.add(app, "--omega0", "omega0", "Larmor frequency of spin 0");
    o.add(app, "--delta-omega", "delta_omega", "Larmor increment between neighbors");
    o.add(app, "--larmor", "larmor", "explicit comma-separated Larmor frequencies");
    o.add(app, "--rabi", "rabi", "Rabi frequency Omega");
}

std::ofstream open_output(const ExperimentConfig& cfg, const std::string& name) {
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.out + "': " + ec.message());
    const fs::path path = fs::path(cfg.out) / name;
    std::ofstream os(path);
    if (!os) throw IoError("cannot write '" + path.string() + "'");
    return os;
}

void finish(std::ofstream& os, const std::string& name) {
    os.flush();
    if (!os) throw IoError("write to '" + name + "' failed");
    std::cout << "wrote " << name << '\n';
}

void cmd_spectrum(const ExperimentConfig& cfg) {
    const ChainConfig chain = cfg.chain();
    validate(chain);
    const Spectrum spec = solve_chain(chain);
    const TransitionTable table = transition_table(spec, chain);
    {
        auto os = open_output(cfg, "spectrum.csv");
        write_spectrum_csv(os, spec, chain, cfg.units);
        finish(os, "spectrum.csv");
    }
    {
        auto os = open_output(cfg, "transitions.csv");
        write_transitions_csv(os, table, chain, cfg.units);
        finish(os, "transitions.csv");
    }
    auto os = open_output(cfg, "reachability.txt");
    write_reachability(os, spec, chain);
    write_reachability(std::cout, spec, chain);
    finish(os, "reachability.txt");
}

void cmd_cnot_sweep(const ExperimentConfig& cfg) {
    const auto rows = cnot_error_sweep(cfg);
    {
        auto os = open_output(cfg, "cnot_sweep.csv");
        write_cnot_csv(os, rows);
        finish(os, "cnot_sweep.csv");
    }
    auto os = open_output(cfg, "two_pi_k.csv");
    os << "delta_omega,k,rabi,detuning,residual\n";
    for (double dw : cfg.sweep_delta_omega.expand()) {
        const ChainConfig chain = cnot_chain(cfg.coupling, cfg.omega0, dw, 1.0);
        const Spectrum spec = solve_chain(chain);
        const double scale = frequency_scale(chain, cfg.units);
        try {
            const auto sol = two_pi_k_rabi(spec, transition_table(spec, chain), cfg.k);
            os << format_double(dw) << ',' << sol.k << ',' << format_double(sol.rabi * scale) << ','
               << format_double(sol.detuning * scale) << ',' << format_double(sol.residual) << '\n';
        } catch (const NoSolution&) {
            os << format_double(dw) << ',' << cfg.k << ",,,\n";
        }
    }
    finish(os, "two_pi_k.csv");
}

void cmd_shor(const ExperimentConfig& cfg) {
    const ShorResult r = run_shor(cfg.chain(), cfg.engine);
    {
        auto os = open_output(cfg, "shor.csv");
        write_shor_csv(os, r);
        finish(os, "shor.csv");
    }
    {
        auto os = open_output(cfg, "shor_summary.txt");
        write_shor_summary(os, r, cfg.engine);
        finish(os, "shor_summary.txt");
    }
    auto os = open_output(cfg, "shor_pulses.txt");
    os << "# stage 1: superposition\n";
    write_sequence(os, r.program.stage1);
    os << "# stage 2: modular exponentiation\n";
    write_sequence(os, r.program.stage2);
    os << "# stage 3: DFT\n";
    write_sequence(os, r.program.stage3);
    finish(os, "shor_pulses.txt");
    write_shor_summary(std::cout, r, cfg.engine);
}

void cmd_compile(const ExperimentConfig& cfg, const std::string& gates_path) {
    std::ifstream in(gates_path);
    if (!in) throw IoError("cannot open gate list '" + gates_path + "'");
    const auto gates = read_gates(in);
    const ChainConfig chain = cfg.chain();
    const Spectrum spec = solve_chain(chain);
    const PulseSequence seq = compile(spec, transition_table(spec, chain), gates, chain.rabi);
    auto os = open_output(cfg, "pulses.txt");
    write_sequence(os, seq);
    finish(os, "pulses.txt");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heisenberg spin chain quantum computer simulator"};
    app.require_subcommand(1);

    Overrides spectrum_o, sweep_o, shor_o, compile_o;
    auto* spectrum = app.add_subcommand("spectrum", "energy levels, transitions and reachability");
    add_common(spectrum, spectrum_o, true);
    auto* sweep = app.add_subcommand("cnot-sweep", "two-spin CNOT error versus Rabi frequency");
    add_common(sweep, sweep_o, false);
    sweep_o.add(sweep, "--J", "coupling", "exchange coupling J");
    sweep_o.add(sweep, "--omega0", "omega0", "Larmor frequency of spin 0");
    sweep_o.add(sweep, "--rabi-grid", "sweep_rabi", "Rabi grid in units of J: start:stop:step or a list");
    sweep_o.add(sweep, "--delta-omega-grid", "sweep_delta_omega", "delta omega list in units of J");
    sweep_o.add(sweep, "--k", "k", "2 pi k index reported alongside the sweep");
    auto* shor = app.add_subcommand("shor", "41-pulse factoring program for N = 4");
    add_common(shor, shor_o, true);
    auto* comp = app.add_subcommand("compile", "compile a gate list into a pulse sequence");
    add_common(comp, compile_o, true);
    std::string gates_path;
    comp->add_option("gates", gates_path, "gate list file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*spectrum) cmd_spectrum(spectrum_o.resolve(spectrum, {}));
        else if (*sweep) cmd_cnot_sweep(sweep_o.resolve(sweep, {}));
        else if (*shor) cmd_shor(shor_o.resolve(shor, shor_defaults()));
        else if (*comp) cmd_compile(compile_o.resolve(comp, {}), gates_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 1;
    } catch (const qubitless::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
