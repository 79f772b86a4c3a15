#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "nrbc/convolution.hpp"
#include "nrbc/kernel.hpp"

namespace nrbc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One Fourier (d=2) or spherical-harmonic (d=3) mode on the annulus b0 < r < b.
struct ModalProblem {
    int n = 0;
    int d = 2;
    double b0 = 2.0, b = 5.0, c = 5.0;
    // Dirichlet data at r = b0 and its first two time derivatives; empty means zero.
    std::function<double(double)> G, dG, ddG;
    std::function<double(double r, double t)> forcing;
    std::function<double(double r)> u0, u1;

    double beta() const { return d == 2 ? double(n) * n : double(n) * (n + 1); }
};

void validate(const ModalProblem& p);

// Galerkin matrices in the basis phi_k = L_k + L_{k+1}, k = 0..N-1.
struct SpectralOperator {
    int N = 0, d = 2;
    double b0 = 0, b = 0, c = 0;
    double c0 = 0, ctilde = 0, alpha = 0, mu = 0;
    Mat M, S, Mt;
    // weighted inner products of the lifting function (1-x)/2 with each phi_i
    Vec lift_mass, lift_stiff, lift_mt;
    // LGL nodes x_0..x_N and the map from values there to (I_N h, phi_i)
    std::vector<double> lgl;
    Mat load_from_lgl;
    // phi_k(x_j) for LGL nodes j = 0..N, and the LGL weights
    Mat interp;
    std::vector<double> lgl_weight;
};

SpectralOperator assemble(int d, double b0, double b, double c, int N);

// r as a function of the reference coordinate and back
double to_radius(const SpectralOperator& op, double x);
double to_reference(const SpectralOperator& op, double r);

// sum_k coef_k phi_k(x)
double eval_basis_sum(const Vec& coef, double x);

struct NewmarkParams {
    double theta = 0.25;
    double vartheta = 0.5;
    bool allow_unconditional_violation = false;
};

void check_stability_region(const NewmarkParams& p);

// A v'' + B v' + C v = rhs(t) + coupling, integrated with Newmark's scheme.
// The optional coupling adds coef * (kernel * (1^T v))(t) * 1 with the
// current panel handled by the trapezoidal rule.
class NewmarkCore {
public:
    struct Coupling {
        double coef = 0;
        std::shared_ptr<KernelConvolver> conv;
        double sigma0 = 0, sigma_dt = 0;
    };

    NewmarkCore(Mat A, Mat B, Mat C, double dt, NewmarkParams params, std::optional<Coupling> coupling,
                std::function<Vec(double)> rhs, Vec v0, Vec v1);

    void step();
    int step_index() const { return m_; }
    double time() const { return m_ * dt_; }
    double dt() const { return dt_; }
    const Vec& v() const { return v_; }
    const Vec& vd() const { return vd_; }
    const Vec& vdd() const { return vdd_; }
    const Mat& system_c() const { return C_; }

private:
    Mat A_, B_, C_;
    double dt_;
    NewmarkParams prm_;
    std::optional<Coupling> cpl_;
    std::function<Vec(double)> rhs_;
    Vec v_, vd_, vdd_;
    int m_ = 0;
    Eigen::PartialPivLU<Mat> lu_;
};

struct SolverOptions {
    NewmarkParams newmark;
    bool nrbc = true;  // false: homogeneous Neumann at r = b instead of the exact condition
    std::shared_ptr<const KernelDecomposition> kernel;  // built on demand when empty
    QuadratureConfig quad;
};

// Time march of one mode with Dirichlet lifting and the exact boundary condition at r = b.
class ModalSolver {
public:
    ModalSolver(const ModalProblem& prob, std::shared_ptr<const SpectralOperator> op, double dt,
                SolverOptions opts = {});
    ModalSolver(const ModalSolver&) = delete;
    ModalSolver& operator=(const ModalSolver&) = delete;

    void step();
    void advance_to(double t);
    double time() const { return core_->time(); }
    int step_index() const { return core_->step_index(); }

    // coefficients of the homogeneous part w; u = w + G(t)(1-x)/2
    const Vec& coefficients() const { return core_->v(); }
    double value_at(double x) const;
    std::vector<double> values_at_lgl() const;
    // |v'|^2_M + ctilde^2 v^T (S + beta Mt) v for the homogeneous part
    double energy() const;
    const SpectralOperator& op() const { return *op_; }
    const NewmarkCore& core() const { return *core_; }

private:
    Vec rhs(double t) const;
    double G(double t) const { return prob_.G ? prob_.G(t) : 0.0; }

    ModalProblem prob_;
    std::shared_ptr<const SpectralOperator> op_;
    std::unique_ptr<NewmarkCore> core_;
    Mat forcing_load_;
};

// Discrete norms on the LGL grid of the reference interval.
double lgl_l2_norm(const SpectralOperator& op, const std::vector<double>& values);
double max_norm(const std::vector<double>& values);

}  // namespace nrbc
