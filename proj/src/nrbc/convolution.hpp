#pragma once

#include <vector>

#include "nrbc/kernel.hpp"

namespace nrbc {

// f(t) = int_0^t e^{rate (t - s)} g(s) ds, advanced panel by panel.
struct ExpState {
    cplx rate{0.0, 0.0};
    cplx value{0.0, 0.0};
    double time = 0.0;
};

// Exact panel weights for g linear on [t, t+dt]: new f = e^x f + dt (wl g_left + wr g_right), x = rate dt.
void panel_weights(cplx x, cplx& wl, cplx& wr);
void panel_weights(double x, double& wl, double& wr);

void advance(ExpState& s, cplx g_left, cplx g_right, double dt);

// Kernel written as an exponential sum; complex terms appear in conjugate pairs.
struct ExpSum {
    std::vector<cplx> coeff, rate;
    std::vector<double> real_coeff, real_rate;
};

ExpSum exp_sum(const KernelDecomposition& k);

class KernelConvolver {
public:
    explicit KernelConvolver(const KernelDecomposition& k);
    explicit KernelConvolver(ExpSum terms);

    // Advances all states over [t, t+dt] and returns (kernel * g)(t + dt).
    double step(double g_left, double g_right, double dt);

    // int_0^t kernel(t + dt - s) g(s) ds from the current states, states untouched.
    double history(double dt) const;

    double time() const { return time_; }
    size_t state_count() const { return sum_.rate.size() + sum_.real_rate.size(); }
    void reset();

private:
    void prepare(double dt) const;

    ExpSum sum_;
    std::vector<cplx> f_;
    std::vector<double> fr_;
    double time_ = 0.0;

    mutable double cached_dt_ = -1.0;
    mutable std::vector<cplx> e_, wl_, wr_;
    mutable std::vector<double> er_, wlr_, wrr_;
};

}  // namespace nrbc
