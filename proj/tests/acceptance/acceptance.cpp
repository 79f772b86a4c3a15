// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "checks.hpp"
#include "nrbc/config.hpp"
#include "nrbc/experiments.hpp"
#include "nrbc/kernel.hpp"
#include "nrbc/solver.hpp"
#include "nrbc/specfun.hpp"

using namespace nrbc;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [fail]");
    }
};

std::string out_root = "acceptance_out";

RunConfig config_for(const std::string& id) {
    RunConfig c = default_config(id);
    c.out = (std::filesystem::path(out_root) / id).string();
    return c;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void add_gates(Outcome& o, const ExperimentReport& r) {
    for (const Gate& g : r.gates) o.require(g.pass, g.name + "=" + sci(g.value) + " " + g.relation + " " + sci(g.limit));
}

void c1(Outcome& o) { add_gates(o, run_table1(config_for("table1"))); }

void c2(Outcome& o) {
    RunConfig cfg = config_for("zeros");
    add_gates(o, run_zeros(cfg));
    ZeroSet z = find_zeros({OrderKind::HalfInteger, 1});
    o.require(z.zeros.size() == 1 && std::abs(z.zeros[0] - cplx(-1, 0)) < 1e-12, "K_{3/2} zero at -1");
    for (int n : {10, 30, 60}) {
        ZeroSet s = find_zeros({OrderKind::Integer, n});
        double top = 0;
        for (const cplx& w : s.zeros) top = std::max(top, w.imag());
        double ratio = top / (kEyeRealRoot * n);
        o.require(std::abs(ratio - 1) <= 0.05, "imag_endpoint_ratio_n" + std::to_string(n) + "=" + sci(ratio));
    }
}

void c3(Outcome& o) { add_gates(o, run_nrbc_accuracy(config_for("nrbc-accuracy"))); }
void c4(Outcome& o) { add_gates(o, run_time_convergence(config_for("time-convergence"))); }

void c5(Outcome& o) {
    ExperimentReport r = run_space_convergence(config_for("space-convergence"));
    add_gates(o, r);
    for (const auto& [k, v] : r.metrics)
        if (k.rfind("drop_8_to_16_t", 0) == 0) o.detail << "; " << k << "=" << v;
}

void c6(Outcome& o) { add_gates(o, run_conv_bench(config_for("conv-bench"))); }

KernelDecomposition kernel(int d, int n) {
    KernelParams p;
    p.d = d;
    p.n = n;
    p.b = 3;
    p.c = 5;
    return build_kernel(p);
}

void c7(Outcome& o) {
    double worst = 0;
    for (int n : {0, 1, 5}) {
        KernelDecomposition k = kernel(2, n);
        for (double t : {0.1, 0.25, 0.5, 1.0, 1.5, 2.0}) {
            double expect = checks::talbot_sigma(2, n, 3, 5, t);
            worst = std::max(worst, std::abs(eval_sigma(k, t) - expect) / std::abs(expect));
        }
    }
    o.require(worst <= 1e-6, "max_rel_dev=" + sci(worst) + " <= 1e-06");
}

void c8(Outcome& o) {
    double worst = 0;
    std::vector<double> times;
    for (double t = 0.05; t <= 4.0; t += 0.25) times.push_back(t);
    for (int d : {2, 3})
        for (int n : {0, 1, 5, 9}) worst = std::max(worst, checks::omega_sigma_deviation(kernel(d, n), times));
    o.require(worst <= 1e-8, "max_dev=" + sci(worst) + " <= 1e-08");
}

void c9(Outcome& o) {
    double om = INFINITY, sg = INFINITY;
    for (int d : {2, 3})
        for (int n : {0, 1, 5, 9}) {
            checks::DissipativitySlack s = checks::dissipativity(kernel(d, n), 100, 1000 + 10 * d + n);
            om = std::min(om, s.omega);
            sg = std::min(sg, s.sigma);
        }
    o.require(om >= -1e-8, "min_omega_slack=" + sci(om) + " >= -1e-08");
    o.require(sg >= -1e-8, "min_sigma_slack=" + sci(sg) + " >= -1e-08");
}

void c10(Outcome& o) {
    double worst = 0, worst_big = 0;
    bool finite = true, finite_big = true;
    for (int d : {2, 3}) {
        auto op = std::make_shared<const SpectralOperator>(assemble(d, 2, 5, 5, 32));
        for (int n : {0, 3, 10}) {
            checks::EnergyRun r = checks::energy_run(op, n, 1e-3, 10000, 77 + n);
            worst = std::max(worst, r.max_ratio);
            finite = finite && r.finite;
        }
        double dt = 100 * checks::explicit_cfl_dt(*op);
        for (int n : {0, 3, 10}) {
            checks::EnergyRun big = checks::energy_run(op, n, dt, 10000, 91 + n);
            finite_big = finite_big && big.finite;
            worst_big = std::max(worst_big, big.max_ratio);
        }
    }
    o.require(finite, "dt=1e-3 finite");
    o.require(worst <= 1 + 1e-6, "dt=1e-3 max_energy_ratio-1=" + sci(worst - 1) + " <= 1e-06");
    o.require(finite_big, "100x explicit CFL finite");
    o.require(worst_big <= 1 + 1e-6, "100x explicit CFL max_energy_ratio-1=" + sci(worst_big - 1) + " <= 1e-06");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) out_root = argv[1];
    std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"published kernel table", c1},
        {"zero sets", c2},
        {"boundary residual accuracy", c3},
        {"temporal order", c4},
        {"spectral convergence", c5},
        {"recursive convolution", c6},
        {"Laplace inversion agreement", c7},
        {"omega-sigma consistency", c8},
        {"dissipativity", c9},
        {"energy stability", c10},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("error: ") + e.what());
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::printf("criterion %zu %s: %s (%.1f s) %s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                    s, o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed ? 1 : 0;
}
