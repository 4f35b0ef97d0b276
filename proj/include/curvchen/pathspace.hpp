#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvchen/bar.hpp"
#include "curvchen/cdga.hpp"
#include "curvchen/zigzag.hpp"

namespace curvchen {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ArityMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A vector field along a path: t -> X(t) with its t-derivative. `breaks` lists times where X
// is only piecewise smooth.
struct TangentField {
  std::function<Vec(double)> value;
  std::function<Vec(double)> derivative;
  std::vector<double> breaks;

  Vec operator()(double t) const { return value(t); }
  static TangentField constant(const Vec& v);
  // v * (t - t0)^k
  static TangentField monomial(const Vec& v, double t0, int k);
  // compactly supported C^3 bump centred at c with half-width w
  static TangentField bump(const Vec& v, double c, double w);
  // v * sin(freq * t + phase)
  static TangentField wave(const Vec& v, double freq, double phase);
  TangentField operator+(const TangentField& o) const;
  TangentField scaled(double s) const;
};

// A smooth curve [0,1] -> R^d with analytic velocity (or a spline through samples).
class Path {
 public:
  Path(int d, std::function<Vec(double)> pos, std::function<Vec(double)> vel, std::vector<double> breaks = {});
  int dim() const { return d_; }
  Vec operator()(double t) const { return pos_(t); }
  Vec velocity(double t) const { return vel_(t); }
  Vec basepoint() const { return pos_(0.0); }
  const std::vector<double>& breaks() const { return breaks_; }

  static Path line(const Vec& x0, const Vec& v);
  static Path constant(const Vec& x0);
  // centre + radius (cos θ, sin θ, 0...) with θ from th0 to th1
  static Path circle_arc(const Vec& centre, double radius, double th0, double th1);
  // sum_k c_k t^k, coefficients as columns
  static Path polynomial(const std::vector<Vec>& coeffs);
  // cubic B-spline through equally spaced samples on [0,1]
  static Path from_samples(const std::vector<Vec>& samples);

  // γ + s X
  Path perturbed(const TangentField& X, double s) const;
  // t -> γ(min(t, s)): the path stopped at time s
  Path stopped(double s) const;
  // max |finite difference of γ - γ̇| on a grid, relative to max |γ̇|
  double consistency_error(double h = 1e-5) const;

 private:
  int d_;
  std::function<Vec(double)> pos_, vel_;
  std::vector<double> breaks_;
};

// A(x)(u) and R(x; u, v) for a polynomial matrix connection on R^d
class ConnectionData {
 public:
  explicit ConnectionData(const QForm& A);
  static ConnectionData flat(int d, int r) { return ConnectionData(QForm(d, r)); }
  int dim() const { return d_; }
  int rank() const { return r_; }
  const QForm& form() const { return A_; }
  const QForm& curvature_form() const { return R_; }
  bool is_flat() const { return R_.is_zero() && A_.is_zero(); }
  Mat A(const Vec& x, const Vec& u) const;
  Mat R(const Vec& x, const Vec& u, const Vec& v) const;

 private:
  int d_, r_;
  QForm A_, R_;
  std::vector<MatrixPoly<double>> Ad_;  // A = Σ A_a dx_a
  std::vector<std::pair<std::pair<int, int>, MatrixPoly<double>>> Rd_;
};

// evaluate a polynomial matrix as an Eigen matrix
Mat eval_matrix(const MatrixPoly<double>& M, const Vec& x);

// U(t) on a fixed RK4 grid with P' = -A(γ̇)P, P(0) = I; cubic Hermite in between.
class Transport {
 public:
  Transport(const ConnectionData& conn, const Path& path, double step = 1e-3);
  Mat U(double t) const;
  // P_{a->b} = U(b) U(a)^{-1}
  Mat P(double a, double b) const;

 private:
  struct Segment {
    double t0, h;
    std::vector<Mat> U, dU;
  };
  const ConnectionData* conn_;
  std::vector<Segment> segs_;
  int r_;
};

// direct RK4 solve from a to b (backwards when a > b)
Mat parallel_transport(const ConnectionData& conn, const Path& path, double a, double b, double step = 1e-3);

// ∫_a^b P_{t->b} R(γ̇(t), X(t)) P_{a->t} dt by composite Gauss–Legendre
Mat transport_derivative(const ConnectionData& conn, const Path& path, const TangentField& X, double a, double b,
                         double step = 1e-3, int order = 8, int panels = 16);

// finite-difference covariant derivative of P_{a->b} along the family γ + sX, conjugated back to γ
Mat transport_derivative_fd(const ConnectionData& conn, const Path& path, const TangentField& X, double a, double b,
                            double h = 1e-4, double step = 1e-3);

// Gauss–Legendre nodes/weights on [0,1]
const std::vector<std::pair<double, double>>& gauss_legendre(int order);

// ∫ over 0 <= t_1 <= ... <= t_n <= 1 by iterated Gauss–Legendre; each 1-D range is split at `breaks`
Mat simplex_quadrature(int n, const std::function<Mat(const std::vector<double>&)>& f, int order,
                       const std::vector<double>& breaks = {});

struct PathSpaceFormEvaluator {
  int arity = 0;
  int rank = 1;
  std::function<Mat(const Path&, const std::vector<TangentField>&)> eval;
  Mat operator()(const Path& g, const std::vector<TangentField>& X) const;
};

struct NumericOptions {
  double ode_step = 1e-3;
  int order = 8;
  double fd_step = 1e-4;
  int s_order = 12;  // quadrature in the homotopy parameter
};

// evaluates bundle-valued forms on (path, tangent fields) in the fibre at γ(0)
class ChenEvaluator {
 public:
  ChenEvaluator(std::shared_ptr<const FormCarrier> carrier, NumericOptions opt = {});
  const ConnectionData& connection() const { return conn_; }
  const FormCarrier& carrier() const { return *C_; }
  const NumericOptions& options() const { return opt_; }
  int rank() const { return conn_.rank(); }

  // It(x)(X_1..X_q)
  Mat It(const ZigzagElement& x, const Path& g, const std::vector<TangentField>& X) const;
  PathSpaceFormEvaluator It_form(const ZigzagElement& x, int q) const;
  // ev_0^* ω evaluated directly
  Mat ev0(const QForm& omega, const Path& g, const std::vector<TangentField>& X) const;
  PathSpaceFormEvaluator ev0_form(const QForm& omega) const;
  // classical iterated integral of a bar element; scalar flat carriers only
  double scalar_bar_It(const BarElement& x, const Path& g, const std::vector<TangentField>& X) const;

 private:
  std::shared_ptr<const FormCarrier> C_;
  ConnectionData conn_;
  NumericOptions opt_;
  mutable std::mutex mu_;
  mutable std::map<int, FormElement<double>> forms_;
  const FormElement<double>& form(int key) const;
  // all words share n, so one quadrature pass serves them
  Mat words_integral(int n, const std::vector<std::pair<const ZWord*, double>>& words, const Transport* T,
                     const Path& g, const std::vector<TangentField>& X) const;
};

// ∇̃_X F(rest) at γ by central differences with basepoint conjugation
Mat covariant_derivative_fd(const ConnectionData& conn, const PathSpaceFormEvaluator& F, const Path& g,
                            const TangentField& X, const std::vector<TangentField>& rest, double h = 1e-4,
                            double step = 1e-3);
// (∇̃F)(X_0..X_q) = Σ (-1)^i ∇̃_{X_i} F(.. X̂_i ..), tangent fields extended as constant fields
Mat nabla_tilde_fd(const ConnectionData& conn, const PathSpaceFormEvaluator& F, const Path& g,
                   const std::vector<TangentField>& X, double h = 1e-4, double step = 1e-3);

struct NumericCheck {
  std::string name;
  double error = 0;  // relative unless noted
  double tolerance = 0;
  bool passed = false;
  std::string detail;
};

double relative_error(const Mat& a, const Mat& b, double floor = 1e-12);

NumericCheck check_chain_map(const ChenEvaluator& ev, const ZigzagElement& x, const Path& g,
                             const std::vector<TangentField>& X, double tol = 1e-2);
NumericCheck check_algebra_map(const ChenEvaluator& ev, const ZigzagElement& x, const ZigzagElement& y,
                               const Path& g, const std::vector<TangentField>& X, double tol = 1e-3);
NumericCheck check_eta_triangle(const ChenEvaluator& ev, const QForm& omega, const Path& g,
                                const std::vector<TangentField>& X, double tol = 1e-6);
NumericCheck check_transport_derivative(const ConnectionData& conn, const Path& g, const TangentField& X, double a,
                                        double b, double tol = 1e-4, double h = 1e-4, double step = 1e-3);
NumericCheck triangle_check(const ChenEvaluator& ev, const ZigzagElement& x, const Path& g,
                            const std::vector<TangentField>& X, double tol = 1e-3);

// Stokes on [0,1] x R^d -> R^d: ω is a form in d+1 variables, variable 0 being the fibre coordinate t.
struct StokesSides {
  FormElement<double> lhs, rhs;  // (-1) ∇ ∫_F ω  and  ∫_F (p*∇)ω - ∫_∂F ω
};
StokesSides fiber_integration_stokes(const QForm& A, const QForm& omega, int order = 8);
NumericCheck fiber_integration_stokes_check(const QForm& A, const QForm& omega, double tol = 1e-8);
// ∫_F over the fibre [0,1] with the fibre generator dt placed first
FormElement<double> fiber_integrate(const QForm& omega, int order = 8);

// h F = ∫_0^1 F*(stopped family); arity drops by one
PathSpaceFormEvaluator shrink_homotopy(const PathSpaceFormEvaluator& F, const NumericOptions& opt);
NumericCheck shrink_homotopy_check(const ConnectionData& conn, const PathSpaceFormEvaluator& F, const Path& g,
                                   const std::vector<TangentField>& X, const NumericOptions& opt = {},
                                   double tol = 1e-2);

// Liouville: det P_{0->t} = exp(-∫_0^t tr A(γ̇))
NumericCheck check_liouville(const ConnectionData& conn, const Path& g, double t, double tol = 1e-6,
                             double step = 1e-3);

}  // namespace curvchen
