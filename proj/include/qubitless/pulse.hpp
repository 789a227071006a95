// pulse.hpp - rectangular RF pulses, schedules, and their text format

#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "qubitless/errors.hpp"
#include "qubitless/spectrum.hpp"

namespace qubitless {

// Pair of logical labels a pulse is meant to drive, in (from, to) order:
// `from` has the larger spin projection.
struct TargetTransition {
    Label from{0};
    Label to{0};
    std::size_t width{0};  // number of logical qubits, for printing

    bool operator==(const TargetTransition&) const = default;
};

struct Pulse {
    double frequency{0.0};  // nu
    double phase{0.0};      // phi, radians
    double rabi{0.0};       // Omega
    double duration{0.0};   // tau
    double start_time{0.0};
    std::optional<TargetTransition> target{};

    double end_time() const { return start_time + duration; }

    bool operator==(const Pulse&) const = default;
};

inline void validate(const Pulse& p) {
    if (!std::isfinite(p.frequency) || !(p.frequency > 0.0)) throw ConfigError("pulse frequency must be positive");
    if (!std::isfinite(p.phase)) throw ConfigError("pulse phase must be finite");
    if (!std::isfinite(p.rabi) || p.rabi < 0.0) throw ConfigError("pulse Rabi frequency must be non-negative");
    if (!std::isfinite(p.duration) || p.duration < 0.0) throw ConfigError("pulse duration must be non-negative");
}

class PulseSequence {
public:
    PulseSequence() = default;

    // Appends back-to-back with the previous pulse.
    void append(Pulse p) {
        p.start_time = end_time();
        pulses_.push_back(std::move(p));
    }

    // Keeps the pulse's own start time; gaps are fine, overlaps are not.
    void schedule(Pulse p) {
        if (p.start_time < end_time() - 1e-12 * std::max(1.0, end_time()))
            throw ConfigError("pulse starts before the previous pulse has finished");
        pulses_.push_back(std::move(p));
    }

    void extend(const PulseSequence& other) {
        for (const auto& p : other.pulses_) append(p);
    }

    const std::vector<Pulse>& pulses() const { return pulses_; }
    std::size_t size() const { return pulses_.size(); }
    bool empty() const { return pulses_.empty(); }
    double end_time() const { return pulses_.empty() ? 0.0 : pulses_.back().end_time(); }
    double total_duration() const { return pulses_.empty() ? 0.0 : end_time() - pulses_.front().start_time; }

    auto begin() const { return pulses_.begin(); }
    auto end() const { return pulses_.end(); }
    const Pulse& operator[](std::size_t i) const { return pulses_[i]; }

    bool operator==(const PulseSequence&) const = default;

private:
    std::vector<Pulse> pulses_;
};

// Shortest decimal string that parses back to the same double.
inline std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw Error("cannot format floating-point value");
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ParseError("invalid number '" + std::string(text) + "'");
    return value;
}

inline Label parse_binary_label(std::string_view text) {
    if (text.empty() || text.size() > 63) throw ParseError("invalid label '" + std::string(text) + "'");
    Label out = 0;
    for (char c : text) {
        if (c != '0' && c != '1') throw ParseError("invalid label '" + std::string(text) + "'");
        out = (out << 1) | static_cast<Label>(c - '0');
    }
    return out;
}

// pulse ν=<float> phi=<float> omega=<float> tau=<float> [target=<label>-<label>]
inline std::string format_pulse(const Pulse& p) {
    std::string line = "pulse ν=" + format_double(p.frequency) + " phi=" + format_double(p.phase) +
                       " omega=" + format_double(p.rabi) + " tau=" + format_double(p.duration);
    if (p.target)
        line += " target=" + label_string(p.target->from, p.target->width) + "-" +
                label_string(p.target->to, p.target->width);
    return line;
}

inline void write_sequence(std::ostream& os, const PulseSequence& seq) {
    for (const auto& p : seq) os << format_pulse(p) << '\n';
}

inline std::string format_sequence(const PulseSequence& seq) {
    std::ostringstream os;
    write_sequence(os, seq);
    return os.str();
}

inline Pulse parse_pulse(std::string_view line) {
    std::istringstream in{std::string(line)};
    std::string word;
    if (!(in >> word) || word != "pulse") throw ParseError("expected 'pulse' at start of line");
    Pulse p;
    bool have_nu = false, have_phi = false, have_omega = false, have_tau = false;
    while (in >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value, got '" + word + "'");
        const std::string key = word.substr(0, eq);
        const std::string_view value = std::string_view(word).substr(eq + 1);
        if (key == "ν" || key == "nu") {
            p.frequency = parse_double(value);
            have_nu = true;
        } else if (key == "phi") {
            p.phase = parse_double(value);
            have_phi = true;
        } else if (key == "omega") {
            p.rabi = parse_double(value);
            have_omega = true;
        } else if (key == "tau") {
            p.duration = parse_double(value);
            have_tau = true;
        } else if (key == "target") {
            const auto dash = value.find('-');
            if (dash == std::string_view::npos) throw ParseError("target must be <label>-<label>");
            const auto a = value.substr(0, dash), b = value.substr(dash + 1);
            if (a.size() != b.size()) throw ParseError("target labels must have equal width");
            p.target = TargetTransition{parse_binary_label(a), parse_binary_label(b), a.size()};
        } else {
            throw ParseError("unknown pulse field '" + key + "'");
        }
    }
    if (!(have_nu && have_phi && have_omega && have_tau)) throw ParseError("pulse line is missing a field");
    validate(p);
    return p;
}

// Comments start with '#'; blank lines are ignored. Pulses are laid out
// back to back from t = 0.
inline PulseSequence read_sequence(std::istream& is) {
    PulseSequence seq;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            seq.append(parse_pulse(line));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return seq;
}

inline PulseSequence parse_sequence(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_sequence(in);
}

} // namespace qubitless
