#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "parosc/classical.hpp"
#include "parosc/factorization.hpp"

namespace parosc {

using Json = nlohmann::json;

struct GridSpec {
    double x_min = -6.0;
    double x_max = 6.0;
    int samples = 121;
};

struct TimeSpec {
    double t_min = 0.0;
    double t_max = M_PI;
    int samples = 129;
    double dt = 2.5e-4;  // integrator step; only propagation reads it
};

// One fully-specified run: profile, trajectory constants, chain seed, and the
// sampling window. Everything needed to reproduce an output file byte for
// byte is either here or a documented default.
struct RunConfig {
    FrequencyProfile profile = CosineDrive{};
    double a = 1.0;
    double c = 1.0;
    std::optional<double> b;  // branch override; must match the Wronskian constraint
    int level = 0;
    std::optional<SeedSpec> seed;
    int n = 0;
    GridSpec grid;
    TimeSpec time;
    std::string format = "csv";
};

inline ErmakovParams ermakov_params(const RunConfig& cfg) {
    bool negative = cfg.b.has_value() && *cfg.b < 0.0;
    ErmakovParams params = ErmakovParams::make(cfg.profile, cfg.a, cfg.c, negative);
    if (cfg.b && std::abs(*cfg.b - params.b) > 1e-9 * (1.0 + std::abs(params.b)))
        throw DomainError("config: b override violates the Wronskian constraint 4ac - b^2");
    return params;
}

inline void validate_run_config(const RunConfig& cfg) {
    if (cfg.level < 0 || cfg.level > 2) throw DomainError("config: level must be 0, 1 or 2");
    if (cfg.level >= 1) {
        if (!cfg.seed) throw DomainError("config: level >= 1 requires a seed");
        if (cfg.seed->order != cfg.level)
            throw DomainError("config: seed order does not match the level");
    }
    if (cfg.n < 0) throw DomainError("config: state index n must be non-negative");
    if (!(cfg.grid.x_max > cfg.grid.x_min)) throw DomainError("config: empty x range");
    if (cfg.grid.samples < 2) throw DomainError("config: grid needs at least two samples");
    if (!(cfg.time.t_max >= cfg.time.t_min)) throw DomainError("config: empty time range");
    if (cfg.time.samples < 1) throw DomainError("config: time spec needs at least one sample");
    if (!(cfg.time.dt > 0.0)) throw DomainError("config: dt must be positive");
    if (cfg.format != "csv" && cfg.format != "json")
        throw DomainError("config: format must be csv or json");
    ermakov_params(cfg);  // enforces a, c > 0 and the b constraint up front
}

// ---------------------------------------------------------------------------
// JSON round trip.
// ---------------------------------------------------------------------------

inline Json profile_to_json(const FrequencyProfile& profile) {
    if (const auto* p = std::get_if<CosineDrive>(&profile))
        return {{"type", "cosine"}, {"omega0", p->omega0}, {"F0", p->F0},
                {"alpha", p->alpha}, {"A", p->A},          {"phi", p->phi}};
    if (const auto* p = std::get_if<SechPulse>(&profile))
        return {{"type", "sech"}, {"omega1", p->omega1}, {"omega2", p->omega2},
                {"rate", p->k},   {"t0", p->t0},         {"g1", p->g1},
                {"g2", p->g2}};
    throw DomainError("config: custom profiles cannot be serialized");
}

inline FrequencyProfile profile_from_json(const Json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "cosine") {
        CosineDrive p;
        p.omega0 = j.value("omega0", p.omega0);
        p.F0 = j.value("F0", p.F0);
        p.alpha = j.value("alpha", p.alpha);
        p.A = j.value("A", p.A);
        p.phi = j.value("phi", p.phi);
        return p;
    }
    if (type == "sech") {
        SechPulse p;
        p.omega1 = j.value("omega1", p.omega1);
        p.omega2 = j.value("omega2", p.omega2);
        p.k = j.value("rate", p.k);
        p.t0 = j.value("t0", p.t0);
        p.g1 = j.value("g1", p.g1);
        p.g2 = j.value("g2", p.g2);
        return p;
    }
    throw DomainError("config: unknown profile type " + type);
}

inline Json seed_to_json(const SeedSpec& seed) {
    if (seed.family == SeedFamily::GaussianGround) return {{"type", "gaussian"}};
    if (seed.order == 1) return {{"type", "one-step"}, {"m", seed.m1}};
    return {{"type", "two-step"}, {"m1", seed.m1}, {"m2", seed.m2}};
}

// Seed factories enforce the parity rules, so a config with an odd one-step
// index or an equal-parity pair is rejected here, before any computation.
inline SeedSpec seed_from_json(const Json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "gaussian") return SeedSpec::gaussian_ground();
    if (type == "one-step") return SeedSpec::one_step(j.at("m").get<int>());
    if (type == "two-step")
        return SeedSpec::two_step(j.at("m1").get<int>(), j.at("m2").get<int>());
    throw DomainError("config: unknown seed type " + type);
}

inline Json config_to_json(const RunConfig& cfg) {
    Json j;
    j["profile"] = profile_to_json(cfg.profile);
    j["ermakov"] = {{"a", cfg.a}, {"c", cfg.c}};
    if (cfg.b) j["ermakov"]["b"] = *cfg.b;
    j["level"] = cfg.level;
    if (cfg.seed) j["seed"] = seed_to_json(*cfg.seed);
    j["n"] = cfg.n;
    j["grid"] = {{"x_min", cfg.grid.x_min}, {"x_max", cfg.grid.x_max},
                 {"samples", cfg.grid.samples}};
    j["time"] = {{"t_min", cfg.time.t_min}, {"t_max", cfg.time.t_max},
                 {"samples", cfg.time.samples}, {"dt", cfg.time.dt}};
    j["format"] = cfg.format;
    return j;
}

inline RunConfig config_from_json(const Json& j) {
    try {
        RunConfig cfg;
        cfg.profile = profile_from_json(j.at("profile"));
        if (j.contains("ermakov")) {
            const Json& e = j.at("ermakov");
            cfg.a = e.value("a", cfg.a);
            cfg.c = e.value("c", cfg.c);
            if (e.contains("b")) cfg.b = e.at("b").get<double>();
        }
        cfg.level = j.value("level", cfg.level);
        if (j.contains("seed")) cfg.seed = seed_from_json(j.at("seed"));
        cfg.n = j.value("n", cfg.n);
        if (j.contains("grid")) {
            const Json& g = j.at("grid");
            cfg.grid.x_min = g.value("x_min", cfg.grid.x_min);
            cfg.grid.x_max = g.value("x_max", cfg.grid.x_max);
            cfg.grid.samples = g.value("samples", cfg.grid.samples);
        }
        if (j.contains("time")) {
            const Json& t = j.at("time");
            cfg.time.t_min = t.value("t_min", cfg.time.t_min);
            cfg.time.t_max = t.value("t_max", cfg.time.t_max);
            cfg.time.samples = t.value("samples", cfg.time.samples);
            cfg.time.dt = t.value("dt", cfg.time.dt);
        }
        cfg.format = j.value("format", cfg.format);
        validate_run_config(cfg);
        return cfg;
    } catch (const Json::exception& e) {
        throw DomainError(std::string("config: ") + e.what());
    }
}

inline RunConfig parse_config(const std::string& text) {
    try {
        return config_from_json(Json::parse(text));
    } catch (const Json::exception& e) {
        throw DomainError(std::string("config: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Tabular output. CSV carries the full config as a '#'-prefixed metadata
// line, then a header row, then rows in the order they were produced
// (t-major for surfaces). JSON mirrors the same field names.
// ---------------------------------------------------------------------------

struct DataTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Fixed 17-significant-digit formatting: enough to round-trip any double,
// and stable across runs so identical configs give identical bytes.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_csv(std::ostream& os, const RunConfig& cfg, const DataTable& table) {
    os << "# config: " << config_to_json(cfg).dump() << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        os << (i ? "," : "") << table.columns[i];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_number(row[i]);
        os << "\n";
    }
}

inline void write_json(std::ostream& os, const RunConfig& cfg, const DataTable& table) {
    Json j;
    j["config"] = config_to_json(cfg);
    j["columns"] = table.columns;
    j["rows"] = Json::array();
    for (const auto& row : table.rows) j["rows"].push_back(row);
    os << j.dump(2) << "\n";
}

inline void write_table(std::ostream& os, const RunConfig& cfg, const DataTable& table) {
    if (cfg.format == "json")
        write_json(os, cfg, table);
    else
        write_csv(os, cfg, table);
}

// Recover the RunConfig echoed into an output file, either the CSV metadata
// line or the "config" object of the JSON form.
inline RunConfig read_embedded_config(std::istream& is) {
    std::string first;
    if (!std::getline(is, first)) throw DomainError("config: empty input");
    const std::string tag = "# config: ";
    if (first.rfind(tag, 0) == 0) return parse_config(first.substr(tag.size()));
    std::string rest(first);
    for (std::string line; std::getline(is, line);) rest += "\n" + line;
    try {
        Json j = Json::parse(rest);
        return config_from_json(j.at("config"));
    } catch (const Json::exception& e) {
        throw DomainError(std::string("config: ") + e.what());
    }
}

}  // namespace parosc
