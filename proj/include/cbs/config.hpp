#pragma once

// Line-oriented run configuration: `key = value`, `#` comments, lists as
// comma-separated values. Later assignments override earlier ones, so presets
// can be layered under user files and command-line overrides. Parsing
// collects every error with its line number instead of stopping at the first.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cbs/atom.hpp"

namespace cbs {

enum class RunMode { Scalar, Vectorial, Classical, Spectrum };

inline std::string to_string(RunMode m)
{
    switch (m) {
    case RunMode::Scalar: return "scalar";
    case RunMode::Vectorial: return "vectorial";
    case RunMode::Classical: return "classical";
    default: return "spectrum";
    }
}

enum class SweepAxis { B, Delta, DeltaP, S };

inline std::string to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::B: return "b";
    case SweepAxis::Delta: return "delta";
    case SweepAxis::DeltaP: return "delta_p";
    default: return "s";
    }
}

struct RunConfig {
    RunMode mode = RunMode::Scalar;
    SweepAxis sweep = SweepAxis::Delta;
    std::vector<double> values;     // swept values
    MediumParams medium;            // defaults for the non-swept parameters
    std::vector<double> b_values;   // spectrum mode: family of thicknesses
    std::size_t n_samples = 200000; // per Monte-Carlo estimator
    std::uint64_t seed = 1;
    int workers = 1;
    std::size_t grid_n = 512;
    std::string out_dir;
    std::string name = "run";
    // classical mode
    std::size_t atoms = 400;
    std::size_t realizations = 1000;
    double kl = 20.0;

    bool stochastic() const { return mode != RunMode::Scalar; }

    // normalized text used for provenance hashing
    std::string canonical() const
    {
        std::ostringstream os;
        os.precision(17);
        os << "mode=" << to_string(mode) << ";sweep=" << to_string(sweep) << ";values=";
        for (double v : values)
            os << v << ",";
        os << ";b=" << medium.b << ";delta=" << medium.detuning.v << ";s0=" << medium.s0
           << ";channel=" << to_string(medium.channel) << ";klf=" << medium.klf
           << ";b_values=";
        for (double v : b_values)
            os << v << ",";
        os << ";samples=" << n_samples << ";seed=" << seed << ";grid_n=" << grid_n
           << ";atoms=" << atoms << ";realizations=" << realizations << ";kl=" << kl
           << ";name=" << name;
        return os.str();
    }
};

struct ConfigParse {
    std::optional<RunConfig> config;
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
};

namespace cfgdetail {

inline std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline bool parse_double(const std::string& s, double& out)
{
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size() && std::isfinite(out);
    } catch (...) {
        return false;
    }
}

inline bool parse_u64(const std::string& s, std::uint64_t& out)
{
    try {
        std::size_t pos = 0;
        out = std::stoull(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

inline bool parse_list(const std::string& s, std::vector<double>& out)
{
    out.clear();
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
        double v;
        if (!parse_double(trim(item), v))
            return false;
        out.push_back(v);
    }
    return !out.empty();
}

} // namespace cfgdetail

inline ConfigParse parse_config(const std::string& text)
{
    using namespace cfgdetail;
    ConfigParse result;
    RunConfig cfg;
    bool have_mode = false, have_values = false, have_seed = false;

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    auto err = [&](const std::string& msg) {
        result.errors.push_back("line " + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            err("expected `key = value`, got `" + line + "`");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        double d;
        std::uint64_t u;

        if (key == "mode") {
            if (val == "scalar")
                cfg.mode = RunMode::Scalar;
            else if (val == "vectorial")
                cfg.mode = RunMode::Vectorial;
            else if (val == "classical")
                cfg.mode = RunMode::Classical;
            else if (val == "spectrum")
                cfg.mode = RunMode::Spectrum;
            else {
                err("unknown mode `" + val +
                    "` (allowed: scalar, vectorial, classical, spectrum)");
                continue;
            }
            have_mode = true;
        } else if (key == "sweep") {
            if (val == "b")
                cfg.sweep = SweepAxis::B;
            else if (val == "delta")
                cfg.sweep = SweepAxis::Delta;
            else if (val == "delta_p")
                cfg.sweep = SweepAxis::DeltaP;
            else if (val == "s")
                cfg.sweep = SweepAxis::S;
            else
                err("unknown sweep axis `" + val + "` (allowed: b, delta, delta_p, s)");
        } else if (key == "values") {
            if (!parse_list(val, cfg.values))
                err("cannot parse list `" + val + "`");
            else
                have_values = true;
        } else if (key == "b_values") {
            if (!parse_list(val, cfg.b_values))
                err("cannot parse list `" + val + "`");
        } else if (key == "b") {
            if (parse_double(val, d) && d > 0)
                cfg.medium.b = d;
            else
                err("optical thickness must be a positive number, got `" + val + "`");
        } else if (key == "delta") {
            if (parse_double(val, d))
                cfg.medium.detuning.v = d;
            else
                err("cannot parse detuning `" + val + "`");
        } else if (key == "s0") {
            if (parse_double(val, d) && d >= 0)
                cfg.medium.s0 = d;
            else
                err("saturation must be a number >= 0, got `" + val + "`");
        } else if (key == "channel") {
            if (val == "scalar")
                cfg.medium.channel = Channel::Scalar;
            else if (val == "hparh")
                cfg.medium.channel = Channel::HParallelH;
            else
                err("unknown channel `" + val + "` (allowed: scalar, hparh)");
        } else if (key == "klf") {
            if (parse_double(val, d) && d > 1)
                cfg.medium.klf = d;
            else
                err("k*ell must exceed 1, got `" + val + "`");
        } else if (key == "samples") {
            if (parse_u64(val, u) && u > 0)
                cfg.n_samples = u;
            else
                err("cannot parse sample count `" + val + "`");
        } else if (key == "seed") {
            if (parse_u64(val, u)) {
                cfg.seed = u;
                have_seed = true;
            } else
                err("cannot parse seed `" + val + "`");
        } else if (key == "workers") {
            if (parse_u64(val, u) && u >= 1)
                cfg.workers = int(u);
            else
                err("cannot parse worker count `" + val + "`");
        } else if (key == "grid_n") {
            if (parse_u64(val, u) && u >= 16)
                cfg.grid_n = u;
            else
                err("grid_n must be an integer >= 16, got `" + val + "`");
        } else if (key == "out") {
            cfg.out_dir = val;
        } else if (key == "name") {
            cfg.name = val;
        } else if (key == "atoms") {
            if (parse_u64(val, u) && u >= 1)
                cfg.atoms = u;
            else
                err("cannot parse atom count `" + val + "`");
        } else if (key == "realizations") {
            if (parse_u64(val, u) && u >= 2)
                cfg.realizations = u;
            else
                err("realizations must be an integer >= 2, got `" + val + "`");
        } else if (key == "kl") {
            if (parse_double(val, d) && d > 1)
                cfg.kl = d;
            else
                err("kl must exceed 1, got `" + val + "`");
        } else {
            err("unknown key `" + key + "`");
        }
    }

    lineno = 0; // whole-file errors
    if (!have_mode)
        result.errors.push_back("missing required key `mode`");
    if (!have_values)
        result.errors.push_back("missing required key `values` (sweep list)");
    else if (cfg.values.empty())
        result.errors.push_back("sweep list must not be empty");
    if (have_mode && cfg.stochastic() && !have_seed)
        result.errors.push_back("missing required key `seed` (stochastic mode)");
    if (have_mode && cfg.mode == RunMode::Spectrum)
        for (double v : cfg.values)
            if (v == cfg.medium.detuning.v)
                result.errors.push_back(
                    "spectrum sweep must exclude the elastic peak delta_p = delta");

    if (result.errors.empty())
        result.config = cfg;
    return result;
}

} // namespace cbs
