#include "nrbc/solver.hpp"

#include <cmath>
#include <string>

#include "nrbc/errors.hpp"
#include "nrbc/quadrature.hpp"

namespace nrbc {

namespace {

// phi_k(x) and phi_k'(x), k = 0..N-1
void basis_table(int N, double x, Vec& phi, Vec& dphi) {
    std::vector<double> p, dp;
    legendre_table(N, x, p, dp);
    phi.resize(N);
    dphi.resize(N);
    for (int k = 0; k < N; ++k) {
        phi[k] = p[k] + p[k + 1];
        dphi[k] = dp[k] + dp[k + 1];
    }
}

// (phi_j (x+c0)^{-2}, phi_i) with weight (x+c0)^{d-1}, Q Gauss nodes
Mat weighted_mass(int N, int d, double c0, int Q) {
    QuadRule q = gauss_legendre(Q);
    Mat out = Mat::Zero(N, N);
    Vec phi, dphi;
    for (int k = 0; k < Q; ++k) {
        basis_table(N, q.x[k], phi, dphi);
        double w = q.w[k] * std::pow(q.x[k] + c0, d - 3);
        out.noalias() += w * phi * phi.transpose();
    }
    return out;
}

std::vector<double> barycentric_weights(const std::vector<double>& x) {
    size_t n = x.size();
    std::vector<double> lam(n, 1.0);
    for (size_t j = 0; j < n; ++j)
        for (size_t k = 0; k < n; ++k)
            if (k != j) lam[j] /= (x[j] - x[k]);
    return lam;
}

// Lagrange cardinal functions of the nodes x at point t
Vec lagrange_at(const std::vector<double>& x, const std::vector<double>& lam, double t) {
    size_t n = x.size();
    Vec out = Vec::Zero(n);
    for (size_t j = 0; j < n; ++j) {
        if (t == x[j]) {
            out[j] = 1.0;
            return out;
        }
    }
    double den = 0;
    for (size_t j = 0; j < n; ++j) {
        out[j] = lam[j] / (t - x[j]);
        den += out[j];
    }
    return out / den;
}

double lift(double x) { return 0.5 * (1.0 - x); }

}  // namespace

void validate(const ModalProblem& p) {
    if (p.d != 2 && p.d != 3) throw ConfigError("modal problem: d must be 2 or 3");
    if (p.n < 0) throw ConfigError("modal problem: mode index must be non-negative");
    if (!(p.b0 > 0) || !(p.b > p.b0)) throw ConfigError("modal problem: need b > b0 > 0");
    if (!(p.c > 0)) throw ConfigError("modal problem: wave speed must be positive");
}

SpectralOperator assemble(int d, double b0, double b, double c, int N) {
    if (N < 4) throw DomainError("assemble: polynomial degree must be at least 4");
    if (d != 2 && d != 3) throw DomainError("assemble: d must be 2 or 3");
    if (!(b0 > 0) || !(b > b0) || !(c > 0)) throw DomainError("assemble: need b > b0 > 0 and c > 0");

    SpectralOperator op;
    op.N = N;
    op.d = d;
    op.b0 = b0;
    op.b = b;
    op.c = c;
    op.c0 = (b + b0) / (b - b0);
    op.ctilde = 2.0 * c / (b - b0);
    double wb = std::pow(1.0 + op.c0, d - 1);
    op.alpha = 8.0 * c * wb / (b - b0);
    op.mu = 4.0 * c * c * (d - 1) * wb / (b * (b - b0));

    // polynomial integrands of degree <= 2N + 1
    QuadRule q = gauss_legendre(N + 3);
    op.M = Mat::Zero(N, N);
    op.S = Mat::Zero(N, N);
    op.lift_mass = Vec::Zero(N);
    op.lift_stiff = Vec::Zero(N);
    op.lift_mt = Vec::Zero(N);
    Vec phi, dphi;
    for (size_t k = 0; k < q.x.size(); ++k) {
        double x = q.x[k];
        basis_table(N, x, phi, dphi);
        double w = q.w[k] * std::pow(x + op.c0, d - 1);
        op.M.noalias() += w * phi * phi.transpose();
        op.S.noalias() += w * dphi * dphi.transpose();
        op.lift_mass += (w * lift(x)) * phi;
        op.lift_stiff += (w * -0.5) * dphi;
    }

    if (d == 3) {
        op.Mt = weighted_mass(N, d, op.c0, N + 3);
    } else {
        int Q = 2 * N + 16;
        op.Mt = weighted_mass(N, d, op.c0, Q);
        Mat fine = weighted_mass(N, d, op.c0, 2 * Q);
        double diff = (op.Mt - fine).cwiseAbs().maxCoeff();
        if (diff > 1e-12 * std::max(1.0, fine.cwiseAbs().maxCoeff()))
            throw IntegrationError("assemble: weighted mass matrix under-resolved (node doubling changed it by " +
                                   std::to_string(diff) + ")");
    }
    QuadRule qm = gauss_legendre(d == 3 ? N + 3 : 2 * N + 16);
    for (size_t k = 0; k < qm.x.size(); ++k) {
        double x = qm.x[k];
        basis_table(N, x, phi, dphi);
        double w = qm.w[k] * std::pow(x + op.c0, d - 3);
        op.lift_mt += (w * lift(x)) * phi;
    }
    op.M = 0.5 * (op.M + op.M.transpose()).eval();
    op.S = 0.5 * (op.S + op.S.transpose()).eval();
    op.Mt = 0.5 * (op.Mt + op.Mt.transpose()).eval();

    QuadRule lgl = gauss_lobatto(N);
    op.lgl = lgl.x;
    op.lgl_weight = lgl.w;
    std::vector<double> lam = barycentric_weights(op.lgl);
    op.load_from_lgl = Mat::Zero(N, N + 1);
    for (size_t k = 0; k < q.x.size(); ++k) {
        double x = q.x[k];
        basis_table(N, x, phi, dphi);
        double w = q.w[k] * std::pow(x + op.c0, d - 1);
        op.load_from_lgl.noalias() += w * phi * lagrange_at(op.lgl, lam, x).transpose();
    }
    op.interp = Mat::Zero(N + 1, N);
    for (int j = 0; j <= N; ++j) {
        basis_table(N, op.lgl[j], phi, dphi);
        op.interp.row(j) = phi.transpose();
    }
    return op;
}

double to_radius(const SpectralOperator& op, double x) { return 0.5 * (op.b - op.b0) * x + 0.5 * (op.b + op.b0); }

double to_reference(const SpectralOperator& op, double r) { return (2.0 * r - op.b - op.b0) / (op.b - op.b0); }

double eval_basis_sum(const Vec& coef, double x) {
    int N = int(coef.size());
    if (N == 0) return 0.0;
    std::vector<double> p, dp;
    legendre_table(N, x, p, dp);
    double s = 0;
    for (int k = 0; k < N; ++k) s += coef[k] * (p[k] + p[k + 1]);
    return s;
}

void check_stability_region(const NewmarkParams& p) {
    if (p.allow_unconditional_violation) return;
    double need = 0.25 * (0.5 + p.vartheta) * (0.5 + p.vartheta);
    if (p.vartheta < 0.5 || p.theta < need)
        throw ConfigError("newmark: (theta=" + std::to_string(p.theta) + ", vartheta=" + std::to_string(p.vartheta) +
                          ") is outside the unconditional stability region");
}

NewmarkCore::NewmarkCore(Mat A, Mat B, Mat C, double dt, NewmarkParams params, std::optional<Coupling> coupling,
                         std::function<Vec(double)> rhs, Vec v0, Vec v1)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), dt_(dt), prm_(params), cpl_(std::move(coupling)),
      rhs_(std::move(rhs)), v_(std::move(v0)), vd_(std::move(v1)) {
    if (!(dt_ > 0)) throw ConfigError("newmark: time step must be positive");
    check_stability_region(prm_);
    Eigen::Index n = A_.rows();
    if (A_.cols() != n || B_.rows() != n || B_.cols() != n || C_.rows() != n || C_.cols() != n || v_.size() != n ||
        vd_.size() != n)
        throw ConfigError("newmark: inconsistent system dimensions");
    if (cpl_ && !cpl_->conv) throw ConfigError("newmark: coupling without a convolver");

    Eigen::PartialPivLU<Mat> mass(A_);
    if (!(mass.rcond() > 1e-14)) throw ConfigError("newmark: singular mass matrix");
    vdd_ = mass.solve(rhs_(0.0) - B_ * vd_ - C_ * v_);

    if (cpl_) C_.array() -= cpl_->coef * 0.5 * dt_ * cpl_->sigma0;
    lu_.compute(A_ + prm_.vartheta * dt_ * B_ + prm_.theta * dt_ * dt_ * C_);
    if (!(lu_.rcond() > 1e-14)) throw ConfigError("newmark: singular system matrix");
    if (cpl_) cpl_->conv->reset();
}

void NewmarkCore::step() {
    double t1 = (m_ + 1) * dt_;
    Vec f = rhs_(t1);
    double s_old = v_.sum();
    if (cpl_) f.array() += cpl_->coef * (cpl_->conv->history(dt_) + 0.5 * dt_ * cpl_->sigma_dt * s_old);

    Vec vp = v_ + dt_ * vd_ + (0.5 - prm_.theta) * dt_ * dt_ * vdd_;
    Vec vdp = vd_ + (1.0 - prm_.vartheta) * dt_ * vdd_;
    Vec acc = lu_.solve(f - B_ * vdp - C_ * vp);
    v_ = vp + prm_.theta * dt_ * dt_ * acc;
    vd_ = vdp + prm_.vartheta * dt_ * acc;
    vdd_ = std::move(acc);
    ++m_;
    if (!v_.allFinite() || !vd_.allFinite())
        throw IntegrationError("newmark: non-finite state at step " + std::to_string(m_));
    if (cpl_) cpl_->conv->step(s_old, v_.sum(), dt_);
}

ModalSolver::ModalSolver(const ModalProblem& prob, std::shared_ptr<const SpectralOperator> op, double dt,
                         SolverOptions opts)
    : prob_(prob), op_(std::move(op)) {
    validate(prob_);
    if (!op_) throw ConfigError("modal solver: missing spectral operator");
    if (op_->d != prob_.d || op_->b0 != prob_.b0 || op_->b != prob_.b || op_->c != prob_.c)
        throw ConfigError("modal solver: operator does not match the problem geometry");
    const SpectralOperator& S = *op_;
    int N = S.N;
    double ct2 = S.ctilde * S.ctilde;
    double beta = prob_.beta();

    Mat E = Mat::Ones(N, N);
    Mat A = S.M;
    Mat B = Mat::Zero(N, N);
    Mat C = ct2 * (S.S + beta * S.Mt);
    std::optional<NewmarkCore::Coupling> cpl;
    if (opts.nrbc) {
        B = S.alpha * E;
        C += S.mu * E;
        std::shared_ptr<const KernelDecomposition> k = opts.kernel;
        if (!k) {
            KernelParams kp;
            kp.d = prob_.d;
            kp.n = prob_.n;
            kp.b = prob_.b;
            kp.c = prob_.c;
            kp.quad = opts.quad;
            k = std::make_shared<KernelDecomposition>(build_kernel(kp));
        }
        const KernelParams& kp = k->params;
        if (kp.d != prob_.d || kp.n != prob_.n || kp.b != prob_.b || kp.c != prob_.c)
            throw ConfigError("modal solver: kernel does not match the problem");
        NewmarkCore::Coupling c;
        c.coef = prob_.c * S.alpha;
        c.conv = std::make_shared<KernelConvolver>(*k);
        c.sigma0 = eval_sigma(*k, 0.0);
        c.sigma_dt = eval_sigma(*k, dt);
        cpl = c;
    }
    if (prob_.forcing) forcing_load_ = S.load_from_lgl;

    auto project = [&](const std::function<double(double)>& u, double g) {
        Vec vals(N + 1);
        for (int j = 0; j <= N; ++j) vals[j] = (u ? u(to_radius(S, S.lgl[j])) : 0.0) - g * lift(S.lgl[j]);
        return Vec(S.interp.colPivHouseholderQr().solve(vals));
    };
    Vec v0 = project(prob_.u0, G(0.0));
    Vec v1 = project(prob_.u1, prob_.dG ? prob_.dG(0.0) : 0.0);

    core_ = std::make_unique<NewmarkCore>(std::move(A), std::move(B), std::move(C), dt, opts.newmark, cpl,
                                          [this](double t) { return rhs(t); }, std::move(v0), std::move(v1));
}

Vec ModalSolver::rhs(double t) const {
    const SpectralOperator& S = *op_;
    Vec f = Vec::Zero(S.N);
    if (prob_.forcing) {
        Vec h(S.N + 1);
        for (int j = 0; j <= S.N; ++j) h[j] = prob_.forcing(to_radius(S, S.lgl[j]), t);
        f += forcing_load_ * h;
    }
    double g = G(t);
    double ddg = prob_.ddG ? prob_.ddG(t) : 0.0;
    if (ddg != 0.0) f -= ddg * S.lift_mass;
    if (g != 0.0) f -= (S.ctilde * S.ctilde * g) * (S.lift_stiff + prob_.beta() * S.lift_mt);
    return f;
}

void ModalSolver::step() { core_->step(); }

void ModalSolver::advance_to(double t) {
    int target = int(std::llround(t / core_->dt()));
    if (std::abs(target * core_->dt() - t) > 1e-9 * std::max(1.0, t))
        throw ConfigError("modal solver: time " + std::to_string(t) + " is not a multiple of the step");
    while (core_->step_index() < target) core_->step();
}

double ModalSolver::value_at(double x) const { return eval_basis_sum(core_->v(), x) + G(time()) * lift(x); }

std::vector<double> ModalSolver::values_at_lgl() const {
    Vec w = op_->interp * core_->v();
    double g = G(time());
    std::vector<double> out(w.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) out[j] = w[j] + g * lift(op_->lgl[j]);
    return out;
}

double ModalSolver::energy() const {
    const SpectralOperator& S = *op_;
    const Vec& v = core_->v();
    const Vec& vd = core_->vd();
    double kin = vd.dot(S.M * vd);
    double pot = v.dot(S.S * v) + prob_.beta() * v.dot(S.Mt * v);
    return kin + S.ctilde * S.ctilde * pot;
}

double lgl_l2_norm(const SpectralOperator& op, const std::vector<double>& values) {
    if (values.size() != op.lgl_weight.size()) throw DomainError("lgl_l2_norm: size mismatch");
    double s = 0;
    for (size_t j = 0; j < values.size(); ++j) s += op.lgl_weight[j] * values[j] * values[j];
    return std::sqrt(s);
}

double max_norm(const std::vector<double>& values) {
    double m = 0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace nrbc
