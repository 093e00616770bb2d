#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>

#include <boost/crc.hpp>

#include "poroflow/errors.hpp"

namespace poroflow::cli {

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
    std::ostringstream os;
    for (std::size_t i = 0; i < issues.size(); ++i) {
        if (i > 0) os << "; ";
        if (issues[i].line > 0) os << "line " << issues[i].line << ": ";
        os << issues[i].message;
    }
    return os.str();
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw std::invalid_argument("expected a finite number, got '" + s + "'");
    }
    return v;
}

std::size_t parse_count(const std::string& s) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("expected a non-negative integer, got '" + s + "'");
    }
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("expected true or false, got '" + s + "'");
}

template <typename E>
E parse_choice(const std::string& s, const std::vector<std::pair<std::string, E>>& choices) {
    for (const auto& [name, value] : choices) {
        if (s == name) return value;
    }
    std::string names;
    for (const auto& [name, value] : choices) names += (names.empty() ? "" : " | ") + name;
    throw std::invalid_argument("expected one of " + names + ", got '" + s + "'");
}

const std::vector<std::pair<std::string, ProblemType>> kProblems{
    {"reservoir", ProblemType::Reservoir},
    {"strip-1d", ProblemType::Strip1d},
    {"custom-rectangle", ProblemType::CustomRectangle},
};
const std::vector<std::pair<std::string, SolverPath>> kPaths{
    {"hopf-cole", SolverPath::HopfCole},
    {"direct", SolverPath::Direct},
    {"both", SolverPath::Both},
};
const std::vector<std::pair<std::string, TriangulationPattern>> kPatterns{
    {"diagonal", TriangulationPattern::Diagonal},
    {"crossed", TriangulationPattern::Crossed},
};
const std::vector<std::pair<std::string, Preconditioner>> kPreconditioners{
    {"diagonal", Preconditioner::Diagonal},
    {"none", Preconditioner::None},
};

template <typename E>
std::string choice_name(E value, const std::vector<std::pair<std::string, E>>& choices) {
    for (const auto& [name, v] : choices) {
        if (v == value) return name;
    }
    return "?";
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
    if (out.empty()) throw std::invalid_argument("expected a comma-separated list of numbers");
    return out;
}

SideCondition parse_side(const std::string& s) {
    std::istringstream is(s);
    std::string kind;
    std::string value;
    is >> kind >> value;
    std::string rest;
    if (!(is >> rest).fail() || value.empty()) {
        throw std::invalid_argument("expected 'pressure <Pa>' or 'velocity <m/s>', got '" + s + "'");
    }
    SideCondition c;
    c.pressure = parse_choice<bool>(kind, {{"pressure", true}, {"velocity", false}});
    c.value = parse_double(value);
    return c;
}

struct Key {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<std::string> kSides{"left", "right", "top", "bottom"};

std::vector<Key> make_keys() {
    std::vector<Key> keys{
        {"problem.type", [](RunConfig& c, const std::string& v) { c.problem = parse_choice(v, kProblems); }},
        {"geometry.L", [](RunConfig& c, const std::string& v) { c.L = parse_double(v); }},
        {"geometry.H", [](RunConfig& c, const std::string& v) { c.H = parse_double(v); }},
        {"geometry.W", [](RunConfig& c, const std::string& v) { c.W = parse_double(v); }},
        {"geometry.nx", [](RunConfig& c, const std::string& v) { c.nx = parse_count(v); }},
        {"geometry.ny", [](RunConfig& c, const std::string& v) { c.ny = parse_count(v); }},
        {"geometry.pattern", [](RunConfig& c, const std::string& v) { c.pattern = parse_choice(v, kPatterns); }},
        {"bcs.well_offset", [](RunConfig& c, const std::string& v) { c.well_offset = parse_double(v); }},
        {"bcs.p_inj", [](RunConfig& c, const std::string& v) { c.p_inj = parse_double(v); }},
        {"bcs.p_atm", [](RunConfig& c, const std::string& v) { c.p_atm = parse_double(v); }},
        {"bcs.v0", [](RunConfig& c, const std::string& v) { c.v0 = parse_double(v); }},
        {"bcs.p_out", [](RunConfig& c, const std::string& v) { c.p_out = parse_double(v); }},
        {"fluid.mu0", [](RunConfig& c, const std::string& v) { c.fluid.mu0 = parse_double(v); }},
        {"fluid.beta", [](RunConfig& c, const std::string& v) { c.fluid.beta = parse_double(v); }},
        {"fluid.p0", [](RunConfig& c, const std::string& v) { c.fluid.p0 = parse_double(v); }},
        {"permeability.k",
         [](RunConfig& c, const std::string& v) { c.permeability = Tensor2::isotropic(parse_double(v)); }},
        {"permeability.kxx", [](RunConfig& c, const std::string& v) { c.permeability.xx = parse_double(v); }},
        {"permeability.kxy", [](RunConfig& c, const std::string& v) { c.permeability.xy = parse_double(v); }},
        {"permeability.kyy", [](RunConfig& c, const std::string& v) { c.permeability.yy = parse_double(v); }},
        {"solver.path", [](RunConfig& c, const std::string& v) { c.path = parse_choice(v, kPaths); }},
        {"solver.cg_tol", [](RunConfig& c, const std::string& v) { c.linear.cg_tol = parse_double(v); }},
        {"solver.cg_max_iter",
         [](RunConfig& c, const std::string& v) {
             if (v == "auto") {
                 c.linear.cg_max_iter.reset();
             } else {
                 c.linear.cg_max_iter = parse_count(v);
             }
         }},
        {"solver.preconditioner",
         [](RunConfig& c, const std::string& v) { c.linear.preconditioner = parse_choice(v, kPreconditioners); }},
        {"solver.picard_tol", [](RunConfig& c, const std::string& v) { c.picard_tol = parse_double(v); }},
        {"solver.picard_max_iter", [](RunConfig& c, const std::string& v) { c.picard_max_iter = parse_count(v); }},
        {"solver.relaxation", [](RunConfig& c, const std::string& v) { c.relaxation = parse_double(v); }},
        {"ceiling.factors", [](RunConfig& c, const std::string& v) { c.ceiling_factors = parse_list(v); }},
        {"ceiling.calibration_factor",
         [](RunConfig& c, const std::string& v) { c.calibration_factor = parse_double(v); }},
        {"bench.repetitions", [](RunConfig& c, const std::string& v) { c.bench_repetitions = parse_count(v); }},
        {"solve1d.samples", [](RunConfig& c, const std::string& v) { c.samples_1d = parse_count(v); }},
        {"verify.corrupt", [](RunConfig& c, const std::string& v) { c.verify_corrupt = parse_bool(v); }},
        {"output.dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
    };
    for (const auto& side : kSides) {
        keys.push_back({"bcs." + side, [side](RunConfig& c, const std::string& v) { c.sides[side] = parse_side(v); }});
    }
    return keys;
}

// Sections whose keys only make sense together.
const std::vector<std::vector<std::string>> kAllOrNothing{
    {"fluid.mu0", "fluid.beta", "fluid.p0"},
    {"permeability.kxx", "permeability.kxy", "permeability.kyy"},
};

void validate(const RunConfig& c, const std::map<std::string, std::size_t>& lines, std::vector<ConfigIssue>& issues) {
    auto line_of = [&](const std::string& key) {
        const auto it = lines.find(key);
        return it == lines.end() ? std::size_t{0} : it->second;
    };
    auto check = [&](bool ok, const std::string& key, const std::string& message) {
        if (!ok) issues.push_back({line_of(key), key + ": " + message});
    };
    auto guarded = [&](const std::string& key, const std::function<void()>& f) {
        try {
            f();
        } catch (const Error& e) {
            issues.push_back({line_of(key), key + ": " + e.what()});
        }
    };

    guarded("fluid.beta", [&] { c.fluid.validate(); });
    guarded("solver.cg_tol", [&] { c.linear.validate(); });
    guarded("solver.picard_tol", [&] { c.picard().validate(); });
    check(c.L > 0.0, "geometry.L", "must be positive");
    check(c.H > 0.0, "geometry.H", "must be positive");
    check(c.nx >= 1, "geometry.nx", "must be at least 1");
    check(c.ny >= 1, "geometry.ny", "must be at least 1");
    check(c.permeability.positive_definite(), "permeability.k", "tensor must be positive definite");
    check(c.p_atm > 0.0, "bcs.p_atm", "must be positive");
    check(c.samples_1d >= 2, "solve1d.samples", "must be at least 2");
    check(c.bench_repetitions >= 1, "bench.repetitions", "must be at least 1");
    check(c.calibration_factor != 1.0, "ceiling.calibration_factor", "must differ from 1 (p_inj = p_atm carries no flux)");
    for (double f : c.ceiling_factors) check(f >= 1.0, "ceiling.factors", "factors must be >= 1");

    if (c.problem == ProblemType::Reservoir) {
        check(c.W > 0.0 && c.W < c.H, "geometry.W", "must satisfy 0 < W < H");
    }
    if (c.problem == ProblemType::CustomRectangle) {
        for (const auto& side : kSides) {
            if (c.sides.count(side) == 0) issues.push_back({0, "missing key bcs." + side + " for custom-rectangle"});
        }
    } else {
        for (const auto& [side, cond] : c.sides) {
            issues.push_back({line_of("bcs." + side), "bcs." + side + ": only used with problem.type = custom-rectangle"});
        }
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::string to_string(ProblemType problem) { return choice_name(problem, kProblems); }
std::string to_string(SolverPath path) { return choice_name(path, kPaths); }

PicardConfig RunConfig::picard() const {
    PicardConfig p;
    p.tol = picard_tol;
    p.max_iter = picard_max_iter;
    p.relaxation = relaxation;
    p.linear = linear;
    return p;
}

std::vector<std::string> RunConfig::resolved_lines() const {
    std::vector<std::pair<std::string, std::string>> kv{
        {"problem.type", to_string(problem)},
        {"geometry.L", format_double(L)},
        {"geometry.H", format_double(H)},
        {"geometry.W", format_double(W)},
        {"geometry.nx", std::to_string(nx)},
        {"geometry.ny", std::to_string(ny)},
        {"geometry.pattern", choice_name(pattern, kPatterns)},
        {"bcs.well_offset", format_double(well_offset)},
        {"bcs.p_inj", format_double(p_inj)},
        {"bcs.p_atm", format_double(p_atm)},
        {"bcs.v0", format_double(v0)},
        {"bcs.p_out", format_double(outlet_pressure())},
        {"fluid.mu0", format_double(fluid.mu0)},
        {"fluid.beta", format_double(fluid.beta)},
        {"fluid.p0", format_double(fluid.p0)},
        {"permeability.kxx", format_double(permeability.xx)},
        {"permeability.kxy", format_double(permeability.xy)},
        {"permeability.kyy", format_double(permeability.yy)},
        {"solver.path", to_string(path)},
        {"solver.cg_tol", format_double(linear.cg_tol)},
        {"solver.cg_max_iter", linear.cg_max_iter ? std::to_string(*linear.cg_max_iter) : "auto"},
        {"solver.preconditioner", choice_name(linear.preconditioner, kPreconditioners)},
        {"solver.picard_tol", format_double(picard_tol)},
        {"solver.picard_max_iter", std::to_string(picard_max_iter)},
        {"solver.relaxation", format_double(relaxation)},
        {"ceiling.calibration_factor", format_double(calibration_factor)},
        {"bench.repetitions", std::to_string(bench_repetitions)},
        {"solve1d.samples", std::to_string(samples_1d)},
        {"verify.corrupt", verify_corrupt ? "true" : "false"},
        {"output.dir", out_dir},
    };
    std::string factors;
    for (double f : ceiling_factors) factors += (factors.empty() ? "" : ",") + format_double(f);
    kv.emplace_back("ceiling.factors", factors);
    for (const auto& [side, cond] : sides) {
        kv.emplace_back("bcs." + side, std::string(cond.pressure ? "pressure " : "velocity ") + format_double(cond.value));
    }
    std::sort(kv.begin(), kv.end());
    std::vector<std::string> out;
    for (const auto& [k, v] : kv) out.push_back(k + " = " + v);
    return out;
}

std::string RunConfig::digest() const {
    boost::crc_32_type crc;
    for (const auto& line : resolved_lines()) {
        // The output directory does not change any result.
        if (line.rfind("output.dir", 0) == 0) continue;
        crc.process_bytes(line.data(), line.size());
        crc.process_byte('\n');
    }
    char buf[9];
    std::snprintf(buf, sizeof(buf), "%08x", crc.checksum());
    return buf;
}

RunConfig parse_config(std::istream& in) {
    static const std::vector<Key> keys = make_keys();
    RunConfig config;
    std::vector<ConfigIssue> issues;
    std::map<std::string, std::size_t> seen;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back({line_no, "expected 'key = value', got '" + line + "'"});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) { return k.name == key; });
        if (it == keys.end()) {
            issues.push_back({line_no, "unknown key '" + key + "'"});
            continue;
        }
        if (const auto prev = seen.find(key); prev != seen.end()) {
            issues.push_back({line_no, "duplicate key '" + key + "' (first set on line " +
                                           std::to_string(prev->second) + ")"});
            continue;
        }
        seen.emplace(key, line_no);
        if (value.empty()) {
            issues.push_back({line_no, key + ": missing value"});
            continue;
        }
        try {
            it->set(config, value);
        } catch (const std::invalid_argument& e) {
            issues.push_back({line_no, key + ": " + e.what()});
        }
    }

    for (const auto& group : kAllOrNothing) {
        const auto present = std::count_if(group.begin(), group.end(), [&](const auto& k) { return seen.count(k) > 0; });
        if (present == 0 || present == static_cast<long>(group.size())) continue;
        for (const auto& k : group) {
            if (seen.count(k) == 0) issues.push_back({0, "missing key " + k + " (its section is partially set)"});
        }
    }
    if (seen.count("permeability.k") && seen.count("permeability.kxx")) {
        issues.push_back({seen.at("permeability.kxx"), "permeability: give either k or kxx/kxy/kyy, not both"});
    }

    if (issues.empty()) validate(config, seen, issues);
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{0, "cannot open config file '" + path + "'"}});
    return parse_config(in);
}

}  // namespace poroflow::cli
