#include "nrbc/convolution.hpp"

#include <cmath>

#include "nrbc/errors.hpp"

namespace nrbc {

namespace {

constexpr double kSeriesSwitch = 0.2;

// sum_k x^k / (k! (k+2)) and sum_k x^k / (k! (k+1)(k+2))
template <class T>
void weights_series(T x, T& wl, T& wr) {
    T p = 1.0, a = 0.0, b = 0.0;
    double fact = 1.0;
    for (int k = 0; k < 14; ++k) {
        if (k > 0) fact *= k;
        a += p / (fact * (k + 2.0));
        b += p / (fact * (k + 1.0) * (k + 2.0));
        p *= x;
    }
    wl = a;
    wr = b;
}

}  // namespace

void panel_weights(cplx x, cplx& wl, cplx& wr) {
    if (std::abs(x) < kSeriesSwitch) {
        weights_series(x, wl, wr);
        return;
    }
    cplx e = std::exp(x), x2 = x * x;
    wl = (e * (x - 1.0) + 1.0) / x2;
    wr = (e - 1.0 - x) / x2;
}

void panel_weights(double x, double& wl, double& wr) {
    if (std::abs(x) < kSeriesSwitch) {
        weights_series(x, wl, wr);
        return;
    }
    double em1 = std::expm1(x), x2 = x * x;
    wl = (em1 * (x - 1.0) + x) / x2;
    wr = (em1 - x) / x2;
}

void advance(ExpState& s, cplx g_left, cplx g_right, double dt) {
    if (!(dt > 0) || !std::isfinite(dt)) throw DomainError("advance: step must be positive");
    cplx x = s.rate * dt, wl, wr;
    panel_weights(x, wl, wr);
    s.value = std::exp(x) * s.value + dt * (wl * g_left + wr * g_right);
    s.time += dt;
}

ExpSum exp_sum(const KernelDecomposition& k) {
    ExpSum s;
    s.coeff = k.pole_coeff;
    s.rate = k.pole_rate;
    s.real_coeff = k.node_coeff;
    s.real_rate = k.node_rate;
    return s;
}

KernelConvolver::KernelConvolver(const KernelDecomposition& k) : KernelConvolver(exp_sum(k)) {}

KernelConvolver::KernelConvolver(ExpSum terms) : sum_(std::move(terms)) {
    if (sum_.coeff.size() != sum_.rate.size() || sum_.real_coeff.size() != sum_.real_rate.size())
        throw DomainError("KernelConvolver: coefficient and rate lists differ in length");
    reset();
}

void KernelConvolver::reset() {
    f_.assign(sum_.rate.size(), 0.0);
    fr_.assign(sum_.real_rate.size(), 0.0);
    time_ = 0.0;
}

void KernelConvolver::prepare(double dt) const {
    if (dt == cached_dt_) return;
    size_t m = sum_.rate.size(), r = sum_.real_rate.size();
    e_.resize(m);
    wl_.resize(m);
    wr_.resize(m);
    for (size_t j = 0; j < m; ++j) {
        cplx x = sum_.rate[j] * dt;
        e_[j] = std::exp(x);
        panel_weights(x, wl_[j], wr_[j]);
        wl_[j] *= dt;
        wr_[j] *= dt;
    }
    er_.resize(r);
    wlr_.resize(r);
    wrr_.resize(r);
    for (size_t i = 0; i < r; ++i) {
        double x = sum_.real_rate[i] * dt;
        er_[i] = std::exp(x);
        panel_weights(x, wlr_[i], wrr_[i]);
        wlr_[i] *= dt;
        wrr_[i] *= dt;
    }
    cached_dt_ = dt;
}

double KernelConvolver::step(double g_left, double g_right, double dt) {
    if (!(dt > 0) || !std::isfinite(dt)) throw DomainError("convolve_step: step must be positive");
    prepare(dt);
    cplx acc = 0.0;
    for (size_t j = 0; j < f_.size(); ++j) {
        f_[j] = e_[j] * f_[j] + wl_[j] * g_left + wr_[j] * g_right;
        acc += sum_.coeff[j] * f_[j];
    }
    double accr = 0.0;
    const double* er = er_.data();
    const double* wl = wlr_.data();
    const double* wr = wrr_.data();
    const double* cr = sum_.real_coeff.data();
    double* fr = fr_.data();
    for (size_t i = 0, n = fr_.size(); i < n; ++i) {
        fr[i] = er[i] * fr[i] + wl[i] * g_left + wr[i] * g_right;
        accr += cr[i] * fr[i];
    }
    time_ += dt;
    return acc.real() + accr;
}

double KernelConvolver::history(double dt) const {
    if (!(dt > 0) || !std::isfinite(dt)) throw DomainError("deferred_history: step must be positive");
    prepare(dt);
    cplx acc = 0.0;
    for (size_t j = 0; j < f_.size(); ++j) acc += sum_.coeff[j] * e_[j] * f_[j];
    double accr = 0.0;
    for (size_t i = 0; i < fr_.size(); ++i) accr += sum_.real_coeff[i] * er_[i] * fr_[i];
    return acc.real() + accr;
}

}  // namespace nrbc
