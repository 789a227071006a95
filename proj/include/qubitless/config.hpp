// config.hpp - flat key=value experiment configuration

#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qubitless/chain.hpp"
#include "qubitless/dynamics.hpp"
#include "qubitless/errors.hpp"
#include "qubitless/pulse.hpp"

namespace qubitless {

enum class Units { J, absolute };

inline std::string to_string(Units u) { return u == Units::J ? "J" : "absolute"; }

inline Units parse_units(const std::string& s) {
    if (s == "J") return Units::J;
    if (s == "absolute") return Units::absolute;
    throw ConfigError("unknown units '" + s + "' (expected J or absolute)");
}

// Either an explicit list or start:stop:step with stop included when it
// lands on the grid.
struct Grid {
    std::vector<double> values{};
    std::optional<double> start{}, stop{}, step{};

    static Grid range(double start, double stop, double step) { return Grid{{}, start, stop, step}; }
    static Grid list(std::vector<double> v) { return Grid{std::move(v), {}, {}, {}}; }

    bool is_range() const { return step.has_value(); }

    // Points are start + i * step, computed by multiplication so the grid
    // does not drift.
    std::vector<double> expand() const {
        if (!is_range()) return values;
        std::vector<double> out;
        const double n = std::floor((*stop - *start) / *step + 1e-9);
        for (long i = 0; i <= static_cast<long>(n); ++i) out.push_back(*start + static_cast<double>(i) * *step);
        return out;
    }

    bool operator==(const Grid&) const = default;
};

inline void validate(const Grid& g, const char* name) {
    if (g.is_range()) {
        if (!(*g.step > 0.0) || !std::isfinite(*g.step)) throw ConfigError(std::string(name) + ": step must be positive");
        if (!(*g.stop >= *g.start)) throw ConfigError(std::string(name) + ": stop must not be below start");
    } else if (g.values.empty()) {
        throw ConfigError(std::string(name) + ": grid must not be empty");
    }
}

inline std::string format_grid(const Grid& g) {
    if (g.is_range()) return format_double(*g.start) + ":" + format_double(*g.stop) + ":" + format_double(*g.step);
    std::string out;
    for (std::size_t i = 0; i < g.values.size(); ++i) out += (i ? "," : "") + format_double(g.values[i]);
    return out;
}

inline std::vector<double> parse_list(std::string_view text) {
    std::vector<double> out;
    while (true) {
        const auto comma = text.find(',');
        out.push_back(parse_double(text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

inline Grid parse_grid(std::string_view text) {
    if (text.find(':') == std::string_view::npos) return Grid::list(parse_list(text));
    const auto a = text.find(':'), b = text.find(':', a + 1);
    if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos)
        throw ParseError("range must be start:stop:step");
    return Grid::range(parse_double(text.substr(0, a)), parse_double(text.substr(a + 1, b - a - 1)),
                       parse_double(text.substr(b + 1)));
}

// Chain frequencies are stored in absolute units; sweep grids are in units
// of J.
struct ExperimentConfig {
    std::size_t length{2};
    double coupling{1.0};
    double omega0{100.0};
    double delta_omega{50.0};
    std::vector<double> larmor{};  // overrides omega0 / delta_omega when non-empty
    double rabi{0.1};
    Grid sweep_rabi{Grid::range(0.02, 0.5, 0.002)};
    Grid sweep_delta_omega{Grid::list({10.0, 50.0, 250.0})};
    int k{1};
    Engine engine{Engine::exact};
    Units units{Units::J};
    std::string out{"."};
    std::size_t threads{0};  // 0 = hardware concurrency

    ChainConfig chain() const {
        ChainConfig c = linear_gradient(length, coupling, omega0, delta_omega, rabi);
        if (!larmor.empty()) c.larmor = larmor;
        return c;
    }

    bool operator==(const ExperimentConfig&) const = default;
};

// Defaults for the four-spin factoring run.
inline ExperimentConfig shor_defaults() {
    ExperimentConfig c;
    c.length = 4;
    c.coupling = 30.0;
    c.omega0 = 100.0;
    c.delta_omega = 30.0;
    c.rabi = 0.5;
    return c;
}

inline void validate(const ExperimentConfig& c) {
    validate(c.chain(), kDefaultMaxLength, nullptr);
    validate(c.sweep_rabi, "sweep_rabi");
    validate(c.sweep_delta_omega, "sweep_delta_omega");
    for (double r : c.sweep_rabi.expand())
        if (!(r > 0.0)) throw ConfigError("sweep_rabi values must be positive");
    if (c.k < 1) throw ConfigError("k must be a positive integer");
    if (c.out.empty()) throw ConfigError("out must not be empty");
}

inline void set_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
    auto as_size = [&](const std::string& v) {
        const double x = parse_double(v);
        if (x < 0 || x != std::floor(x)) throw ParseError(key + " must be a non-negative integer");
        return static_cast<std::size_t>(x);
    };
    if (key == "length") c.length = as_size(value);
    else if (key == "coupling" || key == "J") c.coupling = parse_double(value);
    else if (key == "omega0") c.omega0 = parse_double(value);
    else if (key == "delta_omega") c.delta_omega = parse_double(value);
    else if (key == "larmor") c.larmor = value.empty() ? std::vector<double>{} : parse_list(value);
    else if (key == "rabi") c.rabi = parse_double(value);
    else if (key == "sweep_rabi") c.sweep_rabi = parse_grid(value);
    else if (key == "sweep_delta_omega") c.sweep_delta_omega = parse_grid(value);
    else if (key == "k") c.k = static_cast<int>(as_size(value));
    else if (key == "engine") c.engine = parse_engine(value);
    else if (key == "units") c.units = parse_units(value);
    else if (key == "out") c.out = value;
    else if (key == "threads") c.threads = as_size(value);
    else throw ParseError("unknown config key '" + key + "'");
}

inline std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Applies the file on top of `base`; later keys win.
inline ExperimentConfig read_config(std::istream& is, ExperimentConfig base = {}) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        try {
            if (eq == std::string::npos) throw ParseError("expected key=value");
            set_key(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ParseError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

inline ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {}) {
    std::istringstream in(text);
    return read_config(in, std::move(base));
}

inline std::string serialize(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "length=" << c.length << '\n'
       << "coupling=" << format_double(c.coupling) << '\n'
       << "omega0=" << format_double(c.omega0) << '\n'
       << "delta_omega=" << format_double(c.delta_omega) << '\n';
    os << "larmor=";
    for (std::size_t i = 0; i < c.larmor.size(); ++i) os << (i ? "," : "") << format_double(c.larmor[i]);
    os << '\n'
       << "rabi=" << format_double(c.rabi) << '\n'
       << "sweep_rabi=" << format_grid(c.sweep_rabi) << '\n'
       << "sweep_delta_omega=" << format_grid(c.sweep_delta_omega) << '\n'
       << "k=" << c.k << '\n'
       << "engine=" << to_string(c.engine) << '\n'
       << "units=" << to_string(c.units) << '\n'
       << "out=" << c.out << '\n'
       << "threads=" << c.threads << '\n';
    return os.str();
}

} // namespace qubitless
