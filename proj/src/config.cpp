#include "pointing/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <string_view>

namespace pointing::config {
namespace {

using harness::ReferenceKind;
using model::DisturbanceKind;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

struct Parser {
    std::size_t line = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("line " + std::to_string(line) + ": " + msg, line);
    }

    double real(std::string_view text) const {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
            fail("expected a number, got '" + std::string(text) + "'");
        }
        return v;
    }

    template <typename Int>
    Int integer(std::string_view text) const {
        Int v{};
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            fail("expected an integer, got '" + std::string(text) + "'");
        }
        return v;
    }

    std::vector<double> reals(std::string_view text) const {
        std::vector<double> out;
        for (const auto item : split_list(text)) out.push_back(real(item));
        return out;
    }

    model::PlantParams plant(std::string_view text) const {
        const auto v = reals(text);
        if (v.size() != 3) fail("plant needs three values: b0, a1, a2");
        return {v[0], v[1], v[2]};
    }
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += num(values[i]);
    }
    return out;
}

}  // namespace

std::vector<harness::ScenarioConfig> Manifest::scenarios() const {
    std::vector<harness::ScenarioConfig> out;
    for (const auto kind : controllers) {
        harness::ScenarioConfig c = base;
        c.controller = kind;
        out.push_back(std::move(c));
    }
    return out;
}

Manifest parse_manifest(std::istream& in) {
    Manifest m;
    auto& c = m.base;
    Parser p;

    using Handler = std::function<void(std::string_view)>;
    const std::map<std::string, Handler, std::less<>> handlers{
        {"name", [&](auto v) { c.name = std::string(v); }},
        {"controller",
         [&](auto v) {
             m.controllers.clear();
             for (const auto item : split_list(v)) {
                 try {
                     m.controllers.push_back(harness::parse_controller(std::string(item)));
                 } catch (const std::invalid_argument& e) {
                     p.fail(e.what());
                 }
             }
         }},
        {"reference",
         [&](auto v) {
             if (v == "step") c.reference.kind = ReferenceKind::Step;
             else if (v == "sine") c.reference.kind = ReferenceKind::Sinusoid;
             else if (v == "custom") c.reference.kind = ReferenceKind::Custom;
             else p.fail("reference must be step, sine or custom");
         }},
        {"reference.amplitude", [&](auto v) { c.reference.amplitude = p.real(v); }},
        {"reference.start", [&](auto v) { c.reference.start = p.real(v); }},
        {"reference.frequency", [&](auto v) { c.reference.frequency = p.real(v); }},
        {"reference.series", [&](auto v) { c.reference.series = p.reals(v); }},
        {"disturbance",
         [&](auto v) {
             if (v == "none") c.disturbance.kind = DisturbanceKind::None;
             else if (v == "constant") c.disturbance.kind = DisturbanceKind::Constant;
             else if (v == "uniform") c.disturbance.kind = DisturbanceKind::UniformRandom;
             else if (v == "series") c.disturbance.kind = DisturbanceKind::CustomSeries;
             else p.fail("disturbance must be none, constant, uniform or series");
         }},
        {"disturbance.magnitude", [&](auto v) { c.disturbance.magnitude = p.real(v); }},
        {"disturbance.series", [&](auto v) { c.disturbance.series = p.reals(v); }},
        {"duration", [&](auto v) { c.duration = p.real(v); }},
        {"T", [&](auto v) { c.T = p.real(v); }},
        {"seed", [&](auto v) { c.seed = p.integer<std::uint64_t>(v); }},
        {"gains.alpha", [&](auto v) { c.gains.alpha = p.real(v); }},
        {"gains.beta", [&](auto v) { c.gains.beta = p.real(v); }},
        {"gains.q1", [&](auto v) { c.gains.q1 = p.integer<int>(v); }},
        {"gains.p1", [&](auto v) { c.gains.p1 = p.integer<int>(v); }},
        {"gains.K", [&](auto v) { c.gains.K = p.real(v); }},
        {"gains.Phi", [&](auto v) { c.gains.Phi = p.real(v); }},
        {"mpc.horizon", [&](auto v) { c.mpc.horizon = p.integer<int>(v); }},
        {"mpc.Q", [&](auto v) { c.mpc.Q = p.real(v); }},
        {"mpc.R", [&](auto v) { c.mpc.R = p.real(v); }},
        {"plant.elevation", [&](auto v) { c.elevation = p.plant(v); }},
        {"plant.azimuth", [&](auto v) { c.azimuth = p.plant(v); }},
        {"initial.x1", [&](auto v) { c.initial.x1 = p.real(v); }},
        {"initial.x2", [&](auto v) { c.initial.x2 = p.real(v); }},
    };

    std::string raw;
    while (std::getline(in, raw)) {
        ++p.line;
        std::string_view text = raw;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) {
            text = text.substr(0, hash);
        }
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) p.fail("expected 'key = value'");
        const auto key = trim(text.substr(0, eq));
        const auto value = trim(text.substr(eq + 1));
        const auto it = handlers.find(key);
        if (it == handlers.end()) p.fail("unknown key '" + std::string(key) + "'");
        if (value.empty()) p.fail("empty value for '" + std::string(key) + "'");
        it->second(value);
    }
    if (m.controllers.empty()) throw ConfigError("no controller listed", p.line);

    c.gains.T = c.T;
    c.mpc.T = c.T;
    return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    return parse_manifest(in);
}

void write_manifest(std::ostream& out, const Manifest& m) {
    const auto& c = m.base;
    out << "name = " << c.name << '\n';
    out << "controller = ";
    for (std::size_t i = 0; i < m.controllers.size(); ++i) {
        out << (i ? ", " : "") << harness::to_string(m.controllers[i]);
    }
    out << '\n';

    switch (c.reference.kind) {
        case ReferenceKind::Step: out << "reference = step\n"; break;
        case ReferenceKind::Sinusoid: out << "reference = sine\n"; break;
        case ReferenceKind::Custom: out << "reference = custom\n"; break;
    }
    out << "reference.amplitude = " << num(c.reference.amplitude) << '\n';
    out << "reference.start = " << num(c.reference.start) << '\n';
    out << "reference.frequency = " << num(c.reference.frequency) << '\n';
    if (!c.reference.series.empty()) {
        out << "reference.series = " << join(c.reference.series) << '\n';
    }

    switch (c.disturbance.kind) {
        case DisturbanceKind::None: out << "disturbance = none\n"; break;
        case DisturbanceKind::Constant: out << "disturbance = constant\n"; break;
        case DisturbanceKind::UniformRandom: out << "disturbance = uniform\n"; break;
        case DisturbanceKind::CustomSeries: out << "disturbance = series\n"; break;
    }
    out << "disturbance.magnitude = " << num(c.disturbance.magnitude) << '\n';
    if (!c.disturbance.series.empty()) {
        out << "disturbance.series = " << join(c.disturbance.series) << '\n';
    }

    out << "duration = " << num(c.duration) << '\n';
    out << "T = " << num(c.T) << '\n';
    out << "seed = " << c.seed << '\n';
    out << "gains.alpha = " << num(c.gains.alpha) << '\n';
    out << "gains.beta = " << num(c.gains.beta) << '\n';
    out << "gains.q1 = " << c.gains.q1 << '\n';
    out << "gains.p1 = " << c.gains.p1 << '\n';
    out << "gains.K = " << num(c.gains.K) << '\n';
    out << "gains.Phi = " << num(c.gains.Phi) << '\n';
    out << "mpc.horizon = " << c.mpc.horizon << '\n';
    out << "mpc.Q = " << num(c.mpc.Q) << '\n';
    out << "mpc.R = " << num(c.mpc.R) << '\n';
    out << "plant.elevation = " << join({c.elevation.b0, c.elevation.a1, c.elevation.a2}) << '\n';
    out << "plant.azimuth = " << join({c.azimuth.b0, c.azimuth.a1, c.azimuth.a2}) << '\n';
    out << "initial.x1 = " << num(c.initial.x1) << '\n';
    out << "initial.x2 = " << num(c.initial.x2) << '\n';
}

}  // namespace pointing::config
