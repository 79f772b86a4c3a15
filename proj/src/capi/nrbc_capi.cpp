#include "nrbc/nrbc.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "nrbc/config.hpp"
#include "nrbc/convolution.hpp"
#include "nrbc/errors.hpp"
#include "nrbc/experiments.hpp"
#include "nrbc/kernel.hpp"
#include "nrbc/specfun.hpp"

struct nrbc_zeroset {
    nrbc::ZeroSet set;
};
struct nrbc_kernel {
    nrbc::KernelDecomposition k;
};
struct nrbc_convolver {
    std::unique_ptr<nrbc::KernelConvolver> conv;
};
struct nrbc_config {
    nrbc::RunConfig cfg;
};
struct nrbc_report {
    nrbc::ExperimentReport rep;
};

namespace {

thread_local std::string last_error;

nrbc_status fail(nrbc_status s, const std::string& msg) {
    last_error = msg;
    return s;
}

template <class F>
nrbc_status guarded(F&& f) {
    try {
        last_error.clear();
        return f();
    } catch (const nrbc::Error& e) {
        return fail(static_cast<nrbc_status>(static_cast<int>(e.kind())), e.what());
    } catch (const std::bad_alloc&) {
        return fail(NRBC_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(NRBC_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(NRBC_ERR_INTERNAL, "unknown failure");
    }
}

nrbc_status null_arg(const char* what) { return fail(NRBC_ERR_INVALID_ARGUMENT, std::string(what) + " is null"); }

nrbc::BesselOrder order_of(int half_order, int n) {
    return {half_order ? nrbc::OrderKind::HalfInteger : nrbc::OrderKind::Integer, n};
}

}  // namespace

extern "C" {

const char* nrbc_last_error(void) { return last_error.c_str(); }

const char* nrbc_status_string(nrbc_status s) {
    switch (s) {
        case NRBC_OK: return "ok";
        case NRBC_ERR_DOMAIN: return "domain error";
        case NRBC_ERR_ACCURACY: return "accuracy failure";
        case NRBC_ERR_CONVERGENCE: return "convergence failure";
        case NRBC_ERR_CONFIG: return "configuration error";
        case NRBC_ERR_INTEGRATION: return "integration failure";
        case NRBC_ERR_IO: return "i/o error";
        case NRBC_ERR_RESOLUTION: return "resolution failure";
        case NRBC_ERR_INVALID_ARGUMENT: return "invalid argument";
        case NRBC_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* nrbc_version(void) {
    static const std::string v = nrbc::library_version();
    return v.c_str();
}

int nrbc_zero_count(int half_order, int n) {
    if (n < 0) return -1;
    return nrbc::zero_count(order_of(half_order, n));
}

nrbc_status nrbc_zeros_find(int half_order, int n, double tol, nrbc_zeroset** out) {
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        if (n < 0) return fail(NRBC_ERR_DOMAIN, "order must be non-negative");
        if (!(tol > 0)) return fail(NRBC_ERR_DOMAIN, "tolerance must be positive");
        auto z = std::make_unique<nrbc_zeroset>();
        z->set = nrbc::find_zeros(order_of(half_order, n), tol);
        *out = z.release();
        return NRBC_OK;
    });
}

size_t nrbc_zeros_size(const nrbc_zeroset* z) { return z ? z->set.zeros.size() : 0; }

nrbc_status nrbc_zeros_get(const nrbc_zeroset* z, size_t j, double* re, double* im, double* residual) {
    if (!z) return null_arg("zero set");
    if (j >= z->set.zeros.size()) return fail(NRBC_ERR_INVALID_ARGUMENT, "zero index out of range");
    if (re) *re = z->set.zeros[j].real();
    if (im) *im = z->set.zeros[j].imag();
    if (residual) *residual = z->set.residual[j];
    last_error.clear();
    return NRBC_OK;
}

void nrbc_zeros_free(nrbc_zeroset* z) { delete z; }

nrbc_status nrbc_kernel_build(int d, int n, double b, double c, nrbc_kernel** out) {
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        if (d != 2 && d != 3) return fail(NRBC_ERR_DOMAIN, "d must be 2 or 3");
        if (n < 0) return fail(NRBC_ERR_DOMAIN, "mode index must be non-negative");
        if (!(b > 0) || !(c > 0)) return fail(NRBC_ERR_DOMAIN, "b and c must be positive");
        nrbc::KernelParams p;
        p.d = d;
        p.n = n;
        p.b = b;
        p.c = c;
        auto k = std::make_unique<nrbc_kernel>();
        k->k = nrbc::build_kernel(p);
        *out = k.release();
        return NRBC_OK;
    });
}

nrbc_status nrbc_kernel_sigma(const nrbc_kernel* k, double t, double* out) {
    if (!k) return null_arg("kernel");
    if (!out) return null_arg("out");
    return guarded([&] {
        if (!(t >= 0)) return fail(NRBC_ERR_DOMAIN, "time must be non-negative");
        *out = nrbc::eval_sigma(k->k, t);
        return NRBC_OK;
    });
}

nrbc_status nrbc_kernel_omega(const nrbc_kernel* k, double t, double* out) {
    if (!k) return null_arg("kernel");
    if (!out) return null_arg("out");
    return guarded([&] {
        if (!(t >= 0)) return fail(NRBC_ERR_DOMAIN, "time must be non-negative");
        *out = nrbc::eval_omega(k->k, t);
        return NRBC_OK;
    });
}

size_t nrbc_kernel_pole_count(const nrbc_kernel* k) { return k ? k->k.pole_rate.size() : 0; }

size_t nrbc_kernel_node_count(const nrbc_kernel* k) { return k ? k->k.node_rate.size() : 0; }

nrbc_status nrbc_kernel_write_csv(const nrbc_kernel* k, const double* times, size_t count, const char* path) {
    if (!k) return null_arg("kernel");
    if (!path) return null_arg("path");
    if (count > 0 && !times) return null_arg("times");
    return guarded([&] {
        nrbc::write_kernel_csv(k->k, std::vector<double>(times, times + count), path);
        return NRBC_OK;
    });
}

void nrbc_kernel_free(nrbc_kernel* k) { delete k; }

nrbc_status nrbc_convolver_create(const nrbc_kernel* k, nrbc_convolver** out) {
    if (!out) return null_arg("out");
    *out = nullptr;
    if (!k) return null_arg("kernel");
    return guarded([&] {
        auto c = std::make_unique<nrbc_convolver>();
        c->conv = std::make_unique<nrbc::KernelConvolver>(k->k);
        *out = c.release();
        return NRBC_OK;
    });
}

nrbc_status nrbc_convolver_step(nrbc_convolver* cv, double g_left, double g_right, double dt, double* out) {
    if (!cv) return null_arg("convolver");
    return guarded([&] {
        double v = cv->conv->step(g_left, g_right, dt);
        if (out) *out = v;
        return NRBC_OK;
    });
}

nrbc_status nrbc_convolver_history(const nrbc_convolver* cv, double dt, double* out) {
    if (!cv) return null_arg("convolver");
    if (!out) return null_arg("out");
    return guarded([&] {
        if (!(dt > 0)) return fail(NRBC_ERR_DOMAIN, "step must be positive");
        *out = cv->conv->history(dt);
        return NRBC_OK;
    });
}

double nrbc_convolver_time(const nrbc_convolver* cv) { return cv ? cv->conv->time() : 0.0; }

size_t nrbc_convolver_state_count(const nrbc_convolver* cv) { return cv ? cv->conv->state_count() : 0; }

void nrbc_convolver_reset(nrbc_convolver* cv) {
    if (cv) cv->conv->reset();
}

void nrbc_convolver_free(nrbc_convolver* cv) { delete cv; }

size_t nrbc_experiment_count(void) { return nrbc::experiment_ids().size(); }

const char* nrbc_experiment_id(size_t i) {
    const auto& ids = nrbc::experiment_ids();
    return i < ids.size() ? ids[i].c_str() : nullptr;
}

size_t nrbc_config_key_count(void) { return nrbc::config_keys().size(); }

const char* nrbc_config_key(size_t i) {
    const auto& keys = nrbc::config_keys();
    return i < keys.size() ? keys[i].c_str() : nullptr;
}

nrbc_status nrbc_config_create(const char* experiment, nrbc_config** out) {
    if (!out) return null_arg("out");
    *out = nullptr;
    if (!experiment) return null_arg("experiment");
    return guarded([&] {
        auto c = std::make_unique<nrbc_config>();
        c->cfg = nrbc::default_config(experiment);
        *out = c.release();
        return NRBC_OK;
    });
}

nrbc_status nrbc_config_load_file(nrbc_config* cfg, const char* path) {
    if (!cfg) return null_arg("config");
    if (!path) return null_arg("path");
    return guarded([&] {
        nrbc::RunConfig copy = cfg->cfg;
        nrbc::load_config_file(copy, path);
        cfg->cfg = std::move(copy);
        return NRBC_OK;
    });
}

nrbc_status nrbc_config_set(nrbc_config* cfg, const char* key, const char* value) {
    if (!cfg) return null_arg("config");
    if (!key) return null_arg("key");
    if (!value) return null_arg("value");
    return guarded([&] {
        nrbc::set_config_value(cfg->cfg, key, value);
        return NRBC_OK;
    });
}

nrbc_status nrbc_config_validate(const nrbc_config* cfg) {
    if (!cfg) return null_arg("config");
    return guarded([&] {
        nrbc::validate(cfg->cfg);
        return NRBC_OK;
    });
}

nrbc_status nrbc_config_text(const nrbc_config* cfg, char* buf, size_t cap, size_t* needed) {
    if (!cfg) return null_arg("config");
    return guarded([&] {
        std::string s = nrbc::to_text(cfg->cfg);
        if (needed) *needed = s.size() + 1;
        if (buf && cap > 0) {
            size_t n = std::min(cap - 1, s.size());
            std::memcpy(buf, s.data(), n);
            buf[n] = '\0';
            if (n < s.size()) return fail(NRBC_ERR_INVALID_ARGUMENT, "buffer too small");
        }
        return NRBC_OK;
    });
}

void nrbc_config_free(nrbc_config* cfg) { delete cfg; }

nrbc_status nrbc_run_experiment(const nrbc_config* cfg, nrbc_report** out) {
    if (!out) return null_arg("out");
    *out = nullptr;
    if (!cfg) return null_arg("config");
    return guarded([&] {
        auto r = std::make_unique<nrbc_report>();
        r->rep = nrbc::run_experiment(cfg->cfg);
        *out = r.release();
        return NRBC_OK;
    });
}

int nrbc_report_passed(const nrbc_report* r) { return r && r->rep.passed() ? 1 : 0; }

double nrbc_report_seconds(const nrbc_report* r) { return r ? r->rep.seconds : 0.0; }

size_t nrbc_report_gate_count(const nrbc_report* r) { return r ? r->rep.gates.size() : 0; }

nrbc_status nrbc_report_gate(const nrbc_report* r, size_t i, const char** name, double* value, const char** relation,
                             double* limit, int* pass) {
    if (!r) return null_arg("report");
    if (i >= r->rep.gates.size()) return fail(NRBC_ERR_INVALID_ARGUMENT, "gate index out of range");
    const nrbc::Gate& g = r->rep.gates[i];
    if (name) *name = g.name.c_str();
    if (value) *value = g.value;
    if (relation) *relation = g.relation.c_str();
    if (limit) *limit = g.limit;
    if (pass) *pass = g.pass ? 1 : 0;
    last_error.clear();
    return NRBC_OK;
}

size_t nrbc_report_metric_count(const nrbc_report* r) { return r ? r->rep.metrics.size() : 0; }

nrbc_status nrbc_report_metric(const nrbc_report* r, size_t i, const char** key, const char** value) {
    if (!r) return null_arg("report");
    if (i >= r->rep.metrics.size()) return fail(NRBC_ERR_INVALID_ARGUMENT, "metric index out of range");
    if (key) *key = r->rep.metrics[i].first.c_str();
    if (value) *value = r->rep.metrics[i].second.c_str();
    last_error.clear();
    return NRBC_OK;
}

size_t nrbc_report_file_count(const nrbc_report* r) { return r ? r->rep.files.size() : 0; }

const char* nrbc_report_file(const nrbc_report* r, size_t i) {
    return r && i < r->rep.files.size() ? r->rep.files[i].c_str() : nullptr;
}

void nrbc_report_free(nrbc_report* r) { delete r; }

}  // extern "C"
