#include "nrbc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "nrbc/errors.hpp"

namespace nrbc {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Accepts plain numbers, "pi" and "<number>*pi".
double parse_double(const std::string& key, const std::string& raw) {
    std::string s = trim(raw);
    double scale = 1.0;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        scale = std::numbers::pi;
        s = trim(s.substr(0, s.size() - 2));
        if (!s.empty() && s.back() == '*') s = trim(s.substr(0, s.size() - 1));
        if (s.empty()) return scale;
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError("config: key '" + key + "' expects a number, got '" + raw + "'");
    return v * scale;
}

int parse_int(const std::string& key, const std::string& raw) {
    std::string s = trim(raw);
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < -1000000000L || v > 1000000000L)
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + raw + "'");
    return int(v);
}

bool parse_bool(const std::string& key, const std::string& raw) {
    std::string s = trim(raw);
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ConfigError("config: key '" + key + "' expects a boolean, got '" + raw + "'");
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty()) out.push_back(trim(item));
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        if constexpr (std::is_same_v<T, double>)
            s += fmt(v[i]);
        else
            s += std::to_string(v[i]);
    }
    return s;
}

struct Field {
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field scalar(T RunConfig::*m) {
    return {[m](RunConfig& c, const std::string& k, const std::string& v) {
                if constexpr (std::is_same_v<T, double>)
                    c.*m = parse_double(k, v);
                else if constexpr (std::is_same_v<T, int>)
                    c.*m = parse_int(k, v);
                else
                    c.*m = trim(v);
            },
            [m](const RunConfig& c) {
                if constexpr (std::is_same_v<T, double>)
                    return fmt(c.*m);
                else if constexpr (std::is_same_v<T, int>)
                    return std::to_string(c.*m);
                else
                    return c.*m;
            }};
}

template <class T>
Field list(std::vector<T> RunConfig::*m) {
    return {[m](RunConfig& c, const std::string& k, const std::string& v) {
                std::vector<T> out;
                for (const auto& item : split_list(v)) {
                    if constexpr (std::is_same_v<T, double>)
                        out.push_back(parse_double(k, item));
                    else
                        out.push_back(parse_int(k, item));
                }
                c.*m = std::move(out);
            },
            [m](const RunConfig& c) { return join(c.*m); }};
}

template <class S, class T>
Field nested(S RunConfig::*outer, T S::*inner) {
    return {[outer, inner](RunConfig& c, const std::string& k, const std::string& v) {
                if constexpr (std::is_same_v<T, double>)
                    (c.*outer).*inner = parse_double(k, v);
                else if constexpr (std::is_same_v<T, int>)
                    (c.*outer).*inner = parse_int(k, v);
                else
                    (c.*outer).*inner = parse_bool(k, v);
            },
            [outer, inner](const RunConfig& c) {
                if constexpr (std::is_same_v<T, double>)
                    return fmt((c.*outer).*inner);
                else if constexpr (std::is_same_v<T, int>)
                    return std::to_string((c.*outer).*inner);
                else
                    return std::string((c.*outer).*inner ? "true" : "false");
            }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> f = {
        {"experiment", scalar(&RunConfig::experiment)},
        {"d", scalar(&RunConfig::d)},
        {"b0", scalar(&RunConfig::b0)},
        {"b", scalar(&RunConfig::b)},
        {"c", scalar(&RunConfig::c)},
        {"A1", nested(&RunConfig::data, &DirichletData::A1)},
        {"iota", nested(&RunConfig::data, &DirichletData::iota)},
        {"xs", nested(&RunConfig::data, &DirichletData::xs)},
        {"ys", nested(&RunConfig::data, &DirichletData::ys)},
        {"omega", nested(&RunConfig::data, &DirichletData::omega)},
        {"p", nested(&RunConfig::data, &DirichletData::p)},
        {"M", scalar(&RunConfig::M)},
        {"N", scalar(&RunConfig::N)},
        {"dt", scalar(&RunConfig::dt)},
        {"T", scalar(&RunConfig::T)},
        {"theta", nested(&RunConfig::newmark, &NewmarkParams::theta)},
        {"vartheta", nested(&RunConfig::newmark, &NewmarkParams::vartheta)},
        {"allow-unstable", nested(&RunConfig::newmark, &NewmarkParams::allow_unconditional_violation)},
        {"grid", scalar(&RunConfig::grid)},
        {"times", list(&RunConfig::times)},
        {"dt-list", list(&RunConfig::dt_list)},
        {"N-list", list(&RunConfig::N_list)},
        {"omega-list", list(&RunConfig::omega_list)},
        {"b-list", list(&RunConfig::b_list)},
        {"orders", list(&RunConfig::orders)},
        {"dims", list(&RunConfig::dims)},
        {"n-max", scalar(&RunConfig::n_max)},
        {"steps-list", list(&RunConfig::steps_list)},
        {"direct-max-steps", scalar(&RunConfig::direct_max_steps)},
        {"r-points", scalar(&RunConfig::r_points)},
        {"phi-points", scalar(&RunConfig::phi_points)},
        {"quad-panels", nested(&RunConfig::quad, &QuadratureConfig::panels)},
        {"quad-nodes", nested(&RunConfig::quad, &QuadratureConfig::nodes_per_panel)},
        {"quad-tail", nested(&RunConfig::quad, &QuadratureConfig::tail_length)},
        {"quad-small-order", nested(&RunConfig::quad, &QuadratureConfig::small_order)},
        {"quad-small-length", nested(&RunConfig::quad, &QuadratureConfig::small_order_length)},
        {"quad-log-decades", nested(&RunConfig::quad, &QuadratureConfig::log_decades)},
        {"quad-verify", nested(&RunConfig::quad, &QuadratureConfig::verify)},
        {"quad-verify-tol", nested(&RunConfig::quad, &QuadratureConfig::verify_tol)},
        {"out", scalar(&RunConfig::out)},
        {"threads", scalar(&RunConfig::threads)},
        {"gate-scale", scalar(&RunConfig::gate_scale)},
    };
    return f;
}

const Field* find_field(const std::string& key) {
    for (const auto& [k, f] : fields())
        if (k == key) return &f;
    return nullptr;
}

std::vector<double> range(double a, double b, double h) {
    std::vector<double> v;
    for (int k = 0; a + k * h <= b + 1e-12; ++k) v.push_back(a + k * h);
    return v;
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
    static const std::vector<std::string> ids = {"table1",           "zeros",    "wn-profile", "nrbc-accuracy",
                                                 "time-convergence", "space-convergence", "simulate", "conv-bench"};
    return ids;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) k.push_back(f.first);
        return k;
    }();
    return keys;
}

RunConfig default_config(const std::string& experiment) {
    const auto& ids = experiment_ids();
    if (std::find(ids.begin(), ids.end(), experiment) == ids.end())
        throw ConfigError("config: unknown experiment '" + experiment + "'");
    RunConfig c;
    c.experiment = experiment;
    c.out = "out/" + experiment;
    const double pi = std::numbers::pi;
    if (experiment == "table1") {
        c.b = 3.0;
        c.orders = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
        c.times = {0.1, 2.0};
    } else if (experiment == "zeros") {
        c.n_max = 64;
    } else if (experiment == "wn-profile") {
        c.orders = {5, 15, 30, 45};
        c.r_points = 400;
    } else if (experiment == "nrbc-accuracy") {
        c.M = 32;
        c.data.p = 2;
        c.omega_list = {10 * pi, 10 * pi, 20 * pi, 20 * pi};
        c.b_list = {2.22, 2.75, 2.38, 2.87};
        c.times = {0.5, 1.0, 5.0, 10.0};
    } else if (experiment == "time-convergence") {
        c.M = 15;
        c.b = 5.0;
        c.data.omega = pi;
        c.data.p = 6;
        c.N = 50;
        c.dt_list = {1e-3, 5e-4, 1e-4, 5e-5};
        c.times = {1.0, 2.0, 3.0, 4.0};
    } else if (experiment == "space-convergence") {
        c.M = 15;
        c.b = 5.0;
        c.data.omega = pi;
        c.data.p = 6;
        c.dt = 1e-5;
        c.N_list = {8, 10, 16, 32};
        c.times = range(0.5, 4.0, 0.5);
    } else if (experiment == "simulate") {
        c.M = 32;
        c.b = 4.0;
        c.data.omega = 10 * pi;
        c.data.p = 2;
        c.N = 64;
        c.dt = 2e-5;
        c.times = {0.0, 0.1, 0.2, 0.4, 0.8};
        c.r_points = 25;
        c.phi_points = 64;
    } else if (experiment == "conv-bench") {
        c.b = 3.0;
        c.orders = {0, 3, 9};
        c.dims = {2, 3};
        c.steps_list = {1000, 10000, 100000};
        c.direct_max_steps = 10000;
    }
    return c;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    const Field* f = find_field(key);
    if (!f) throw ConfigError("config: unknown key '" + key + "'");
    f->set(cfg, key, value);
}

void parse_config_text(RunConfig& cfg, const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    parse_config_text(cfg, ss.str());
}

void validate(const RunConfig& c) {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError("config: " + what);
    };
    const auto& ids = experiment_ids();
    need(std::find(ids.begin(), ids.end(), c.experiment) != ids.end(), "unknown experiment '" + c.experiment + "'");
    need(c.d == 2 || c.d == 3, "d must be 2 or 3");
    need(c.b0 > 0 && c.b > c.b0, "need b > b0 > 0");
    need(c.c > 0, "c must be positive");
    need(c.data.p >= 1, "p must be at least 1");
    need(c.data.iota > 0, "iota must be positive");
    need(c.M >= 0, "M must be non-negative");
    need(c.N >= 4, "N must be at least 4");
    need(c.dt > 0, "dt must be positive");
    need(c.T > 0, "T must be positive");
    need(c.grid >= 4 && (c.grid & (c.grid - 1)) == 0, "grid must be a power of two");
    need(c.grid >= 4 * c.M, "grid must be at least 4 M");
    for (double t : c.times) need(t >= 0, "times must be non-negative");
    for (double h : c.dt_list) need(h > 0, "dt-list entries must be positive");
    for (int n : c.N_list) need(n >= 4, "N-list entries must be at least 4");
    for (int n : c.orders) need(n >= 0 && n <= 128, "orders must lie in 0..128");
    for (int d : c.dims) need(d == 2 || d == 3, "dims entries must be 2 or 3");
    need(c.omega_list.size() == c.b_list.size(), "omega-list and b-list must pair up");
    for (double b : c.b_list) need(b > c.b0, "b-list entries must exceed b0");
    need(c.n_max >= 0 && c.n_max <= 128, "n-max must lie in 0..128");
    for (int s : c.steps_list) need(s >= 10, "steps-list entries must be at least 10");
    need(c.direct_max_steps >= 10, "direct-max-steps must be at least 10");
    need(c.r_points >= 2 && c.phi_points >= 1, "snapshot grid too small");
    need(c.quad.panels >= 2 && c.quad.nodes_per_panel >= 2, "quadrature panels and nodes must be at least 2");
    need(c.quad.tail_length > 0 && c.quad.small_order_length > 0, "quadrature lengths must be positive");
    need(c.threads >= 1, "threads must be at least 1");
    need(c.gate_scale >= 1.0, "gate-scale must be at least 1");
    check_stability_region(c.newmark);
}

std::string to_text(const RunConfig& cfg) {
    std::string s;
    for (const auto& [k, f] : fields()) s += k + " = " + f.get(cfg) + "\n";
    return s;
}

int effective_threads(int requested) {
    int n = std::max(1, requested);
    if (const char* env = std::getenv("NRBC_MAX_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    unsigned hw = std::thread::hardware_concurrency();
    if (hw > 0) n = std::min<int>(n, int(hw));
    return n;
}

}  // namespace nrbc
