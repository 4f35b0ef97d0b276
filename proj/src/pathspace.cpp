#include "curvchen/pathspace.hpp"

#include <algorithm>
#include <bit>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>

#include "curvchen/shuffle.hpp"

namespace curvchen {

namespace {

// coefficient matrices stay on the stack for rank <= 4
using SMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

std::vector<double> to_std(const Vec& x) { return {x.data(), x.data() + x.size()}; }

std::vector<double> merge_breaks(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// the pieces of [lo, hi] cut at interior breaks
std::vector<std::pair<double, double>> pieces(double lo, double hi, const std::vector<double>& breaks) {
  std::vector<std::pair<double, double>> out;
  double a = lo;
  for (double b : breaks)
    if (b > a + 1e-14 && b < hi - 1e-14) {
      out.emplace_back(a, b);
      a = b;
    }
  out.emplace_back(a, hi);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- fields and paths

TangentField TangentField::constant(const Vec& v) {
  return {[v](double) { return v; }, [v](double) { return Vec(Vec::Zero(v.size())); }, {}};
}

TangentField TangentField::monomial(const Vec& v, double t0, int k) {
  return {[=](double t) { return Vec(v * std::pow(t - t0, k)); },
          [=](double t) { return Vec(k == 0 ? Vec::Zero(v.size()) : Vec(v * (k * std::pow(t - t0, k - 1)))); },
          {}};
}

TangentField TangentField::bump(const Vec& v, double c, double w) {
  // (1 - u^2)^4 on |u| < 1: C^3 and polynomial between the breaks, so Gauss rules stay exact
  auto b = [=](double t) {
    double u = (t - c) / w;
    return std::abs(u) < 1 ? std::pow(1 - u * u, 4) : 0.0;
  };
  auto db = [=](double t) {
    double u = (t - c) / w;
    return std::abs(u) < 1 ? -8 * u * std::pow(1 - u * u, 3) / w : 0.0;
  };
  std::vector<double> br;
  for (double e : {c - w, c + w})
    if (e > 0 && e < 1) br.push_back(e);
  return {[=](double t) { return Vec(v * b(t)); }, [=](double t) { return Vec(v * db(t)); }, br};
}

TangentField TangentField::wave(const Vec& v, double freq, double phase) {
  return {[=](double t) { return Vec(v * std::sin(freq * t + phase)); },
          [=](double t) { return Vec(v * (freq * std::cos(freq * t + phase))); },
          {}};
}

TangentField TangentField::operator+(const TangentField& o) const {
  auto a = *this;
  return {[a, o](double t) { return Vec(a.value(t) + o.value(t)); },
          [a, o](double t) { return Vec(a.derivative(t) + o.derivative(t)); }, merge_breaks(breaks, o.breaks)};
}

TangentField TangentField::scaled(double s) const {
  auto a = *this;
  return {[a, s](double t) { return Vec(s * a.value(t)); }, [a, s](double t) { return Vec(s * a.derivative(t)); },
          breaks};
}

Path::Path(int d, std::function<Vec(double)> pos, std::function<Vec(double)> vel, std::vector<double> breaks)
    : d_(d), pos_(std::move(pos)), vel_(std::move(vel)), breaks_(std::move(breaks)) {}

Path Path::line(const Vec& x0, const Vec& v) {
  return Path(static_cast<int>(x0.size()), [=](double t) { return Vec(x0 + t * v); }, [=](double) { return v; });
}

Path Path::constant(const Vec& x0) { return line(x0, Vec::Zero(x0.size())); }

Path Path::circle_arc(const Vec& centre, double radius, double th0, double th1) {
  const double w = th1 - th0;
  return Path(
      static_cast<int>(centre.size()),
      [=](double t) {
        Vec x = centre;
        x(0) += radius * std::cos(th0 + w * t);
        x(1) += radius * std::sin(th0 + w * t);
        return x;
      },
      [=](double t) {
        Vec v = Vec::Zero(centre.size());
        v(0) = -radius * w * std::sin(th0 + w * t);
        v(1) = radius * w * std::cos(th0 + w * t);
        return v;
      });
}

Path Path::polynomial(const std::vector<Vec>& c) {
  if (c.empty()) throw std::invalid_argument("polynomial path: no coefficients");
  return Path(
      static_cast<int>(c[0].size()),
      [=](double t) {
        Vec x = Vec::Zero(c[0].size());
        for (size_t k = c.size(); k-- > 0;) x = x * t + c[k];
        return x;
      },
      [=](double t) {
        Vec v = Vec::Zero(c[0].size());
        for (size_t k = c.size(); k-- > 1;) v = v * t + static_cast<double>(k) * c[k];
        return v;
      });
}

Path Path::from_samples(const std::vector<Vec>& samples) {
  if (samples.size() < 4) throw std::invalid_argument("sampled path: need at least 4 samples");
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  const int d = static_cast<int>(samples[0].size());
  const double h = 1.0 / static_cast<double>(samples.size() - 1);
  auto splines = std::make_shared<std::vector<Spline>>();
  // the spline is cubic between knots only; quadrature must split there
  std::vector<double> knots;
  for (size_t i = 1; i + 1 < samples.size(); ++i) knots.push_back(static_cast<double>(i) * h);
  for (int a = 0; a < d; ++a) {
    std::vector<double> ys;
    for (auto& s : samples) ys.push_back(s(a));
    splines->emplace_back(ys.begin(), ys.end(), 0.0, h);
  }
  return Path(
      d,
      [=](double t) {
        Vec x(d);
        for (int a = 0; a < d; ++a) x(a) = (*splines)[a](t);
        return x;
      },
      [=](double t) {
        Vec x(d);
        for (int a = 0; a < d; ++a) x(a) = (*splines)[a].prime(t);
        return x;
      },
      knots);
}

Path Path::perturbed(const TangentField& X, double s) const {
  auto pos = pos_;
  auto vel = vel_;
  return Path(
      d_, [=](double t) { return Vec(pos(t) + s * X.value(t)); },
      [=](double t) { return Vec(vel(t) + s * X.derivative(t)); }, merge_breaks(breaks_, X.breaks));
}

Path Path::stopped(double s) const {
  auto pos = pos_;
  auto vel = vel_;
  std::vector<double> br;
  for (double b : breaks_)
    if (b < s) br.push_back(b);
  br.push_back(s);
  const int d = d_;
  return Path(
      d_, [=](double t) { return pos(std::min(t, s)); },
      [=](double t) { return t <= s ? vel(t) : Vec(Vec::Zero(d)); }, br);
}

double Path::consistency_error(double h) const {
  double worst = 0, scale = 1e-300;
  for (int k = 1; k < 100; ++k) {
    double t = k / 100.0;
    Vec fd = (pos_(t + h) - pos_(t - h)) / (2 * h);
    worst = std::max(worst, (fd - vel_(t)).norm());
    scale = std::max(scale, vel_(t).norm());
  }
  return worst / std::max(scale, 1.0);
}

// ---------------------------------------------------------------- connection

Mat eval_matrix(const MatrixPoly<double>& M, const Vec& x) {
  const int r = M.rank();
  Mat out(r, r);
  auto xs = to_std(x);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) out(i, j) = M(i, j).is_zero() ? 0.0 : M(i, j).eval(xs);
  return out;
}

ConnectionData::ConnectionData(const QForm& A) : d_(A.dim()), r_(A.rank()), A_(A) {
  for (auto& [m, c] : A.terms())
    if (std::popcount(m) != 1) throw InvalidConnection("connection form must have degree 1");
  R_ = exterior_derivative(A) + A * A;
  for (int a = 0; a < d_; ++a) Ad_.push_back(A.coefficient(Mask(1) << a).to_double());
  for (auto& [m, c] : R_.terms()) {
    int a = std::countr_zero(m);
    int b = std::countr_zero(m & (m - 1));
    Rd_.push_back({{a, b}, c.to_double()});
  }
}

Mat ConnectionData::A(const Vec& x, const Vec& u) const {
  Mat out = Mat::Zero(r_, r_);
  for (int a = 0; a < d_; ++a)
    if (u(a) != 0.0 && !Ad_[a].is_zero()) out += u(a) * eval_matrix(Ad_[a], x);
  if (!out.allFinite()) throw IntegrationError("connection produced a non-finite value");
  return out;
}

Mat ConnectionData::R(const Vec& x, const Vec& u, const Vec& v) const {
  Mat out = Mat::Zero(r_, r_);
  for (auto& [ab, M] : Rd_) {
    double w = u(ab.first) * v(ab.second) - u(ab.second) * v(ab.first);
    if (w != 0.0) out += w * eval_matrix(M, x);
  }
  return out;
}

// ---------------------------------------------------------------- transport

namespace {

// generator of P' = -A(γ̇)P, sampled strictly inside [lo, hi] so one-sided velocities are used at breaks
Mat generator(const ConnectionData& conn, const Path& g, double t, double lo, double hi) {
  const double eps = 1e-12;
  t = std::clamp(t, std::min(lo, hi) + eps, std::max(lo, hi) - eps);
  return -conn.A(g(t), g.velocity(t));
}

Mat rk4(const ConnectionData& conn, const Path& g, double a, double b, double step, Mat P) {
  const double len = std::abs(b - a);
  if (len == 0) return P;
  const int N = std::max(1, static_cast<int>(std::ceil(len / step - 1e-9)));
  const double h = (b - a) / N;
  for (int k = 0; k < N; ++k) {
    double t = a + k * h;
    Mat k1 = generator(conn, g, t, a, b) * P;
    Mat k2 = generator(conn, g, t + h / 2, a, b) * (P + h / 2 * k1);
    Mat k3 = generator(conn, g, t + h / 2, a, b) * (P + h / 2 * k2);
    Mat k4 = generator(conn, g, t + h, a, b) * (P + h * k3);
    P += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  if (!P.allFinite()) throw IntegrationError("transport diverged");
  return P;
}

}  // namespace

Transport::Transport(const ConnectionData& conn, const Path& g, double step) : conn_(&conn), r_(conn.rank()) {
  if (step <= 0) throw std::invalid_argument("transport: step must be positive");
  Mat P = Mat::Identity(r_, r_);
  for (auto [lo, hi] : pieces(0, 1, g.breaks())) {
    Segment s;
    const int N = std::max(1, static_cast<int>(std::ceil((hi - lo) / step - 1e-9)));
    s.t0 = lo;
    s.h = (hi - lo) / N;
    s.U.push_back(P);
    s.dU.push_back(generator(conn, g, lo, lo, hi) * P);
    for (int k = 0; k < N; ++k) {
      double a = lo + k * s.h;
      P = rk4(conn, g, a, a + s.h, s.h * 1.0000001, P);
      s.U.push_back(P);
      s.dU.push_back(generator(conn, g, a + s.h, lo, hi) * P);
    }
    segs_.push_back(std::move(s));
  }
}

Mat Transport::U(double t) const {
  size_t i = 0;
  while (i + 1 < segs_.size() && t >= segs_[i + 1].t0) ++i;
  const Segment& s = segs_[i];
  const int N = static_cast<int>(s.U.size()) - 1;
  double x = (t - s.t0) / s.h;
  int k = std::clamp(static_cast<int>(std::floor(x)), 0, N - 1);
  double u = std::clamp(x - k, 0.0, 1.0);
  double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
  double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
  return h00 * s.U[k] + h10 * s.h * s.dU[k] + h01 * s.U[k + 1] + h11 * s.h * s.dU[k + 1];
}

Mat Transport::P(double a, double b) const {
  if (a == b) return Mat::Identity(r_, r_);
  return U(b) * U(a).inverse();
}

Mat parallel_transport(const ConnectionData& conn, const Path& g, double a, double b, double step) {
  if (step <= 0) throw std::invalid_argument("transport: step must be positive");
  Mat P = Mat::Identity(conn.rank(), conn.rank());
  auto segs = pieces(std::min(a, b), std::max(a, b), g.breaks());
  if (a > b) {
    std::reverse(segs.begin(), segs.end());
    for (auto& s : segs) std::swap(s.first, s.second);
  }
  for (auto [lo, hi] : segs) P = rk4(conn, g, lo, hi, step, P);
  return P;
}

// ---------------------------------------------------------------- quadrature

const std::vector<std::pair<double, double>>& gauss_legendre(int order) {
  if (order < 1 || order > 64) throw std::invalid_argument("gauss_legendre: order out of range");
  static std::mutex mu;
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  std::lock_guard lk(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  std::vector<std::pair<double, double>> nodes;
  for (double x : boost::math::legendre_p_zeros<double>(order)) {
    double dp = boost::math::legendre_p_prime(order, x);
    double w = 2 / ((1 - x * x) * dp * dp);
    nodes.emplace_back((1 + x) / 2, w / 2);
    if (x != 0) nodes.emplace_back((1 - x) / 2, w / 2);
  }
  std::sort(nodes.begin(), nodes.end());
  return cache.emplace(order, std::move(nodes)).first->second;
}

namespace {

void simplex_rec(int k, double upper, double w, std::vector<double>& t,
                 const std::function<Mat(const std::vector<double>&)>& f, int order,
                 const std::vector<double>& breaks, Mat& acc) {
  if (k == 0) {
    Mat v = f(t);
    if (acc.size() == 0)
      acc = w * v;
    else
      acc += w * v;
    return;
  }
  const auto& gl = gauss_legendre(order);
  for (auto [lo, hi] : pieces(0, upper, breaks))
    for (auto [x, wx] : gl) {
      t[k - 1] = lo + (hi - lo) * x;
      simplex_rec(k - 1, t[k - 1], w * wx * (hi - lo), t, f, order, breaks, acc);
    }
}

}  // namespace

Mat simplex_quadrature(int n, const std::function<Mat(const std::vector<double>&)>& f, int order,
                       const std::vector<double>& breaks) {
  if (n < 0 || n > 6) throw std::invalid_argument("simplex_quadrature: unsupported dimension");
  std::vector<double> t(static_cast<size_t>(n));
  Mat acc;
  simplex_rec(n, 1.0, 1.0, t, f, order, breaks, acc);
  return acc;
}

Mat PathSpaceFormEvaluator::operator()(const Path& g, const std::vector<TangentField>& X) const {
  if (static_cast<int>(X.size()) != arity)
    throw ArityMismatch("form of arity " + std::to_string(arity) + " given " + std::to_string(X.size()) + " vectors");
  return eval(g, X);
}

// ---------------------------------------------------------------- exterior algebra with matrix coefficients

namespace {

struct Ext {
  std::vector<std::pair<Mask, SMat>> terms;
};

Ext ext_unit(int r) { return {{{0u, SMat::Identity(r, r)}}}; }

Ext ext_mul(const Ext& a, const Ext& b) {
  Ext out;
  for (auto& [ma, ca] : a.terms)
    for (auto& [mb, cb] : b.terms) {
      int s = wedge_sign(ma, mb);
      if (!s) continue;
      SMat c = ca * cb;
      if (s < 0) c = -c;
      Mask m = ma | mb;
      auto it = std::find_if(out.terms.begin(), out.terms.end(), [m](auto& p) { return p.first == m; });
      if (it == out.terms.end())
        out.terms.emplace_back(m, c);
      else
        it->second += c;
    }
  return out;
}

void ext_right_matrix(Ext& e, const SMat& P) {
  for (auto& [m, c] : e.terms) c = c * P;
}

// pull a form back to the generators: dx_a -> Σ_g coeff[a][g] e_g
Ext pull_form(const FormElement<double>& w, const Vec& x, const std::vector<std::vector<std::pair<Mask, double>>>& dx) {
  Ext out;
  for (auto& [m, M] : w.terms()) {
    // scalar wedge of the pulled dx_a, a ∈ m ascending
    std::vector<std::pair<Mask, double>> acc{{0u, 1.0}};
    for (Mask mm = m; mm && !acc.empty(); mm &= mm - 1) {
      int a = std::countr_zero(mm);
      std::vector<std::pair<Mask, double>> next;
      for (auto& [ma, ca] : acc)
        for (auto& [mg, cg] : dx[a]) {
          int s = wedge_sign(ma, mg);
          if (!s) continue;
          Mask u = ma | mg;
          auto it = std::find_if(next.begin(), next.end(), [u](auto& p) { return p.first == u; });
          if (it == next.end())
            next.emplace_back(u, s * ca * cg);
          else
            it->second += s * ca * cg;
        }
      acc = std::move(next);
    }
    if (acc.empty()) continue;
    SMat C = eval_matrix(M, x);
    for (auto& [mg, c] : acc) {
      if (c == 0.0) continue;
      auto it = std::find_if(out.terms.begin(), out.terms.end(), [mg](auto& p) { return p.first == mg; });
      if (it == out.terms.end())
        out.terms.emplace_back(mg, c * C);
      else
        it->second += c * C;
    }
  }
  return out;
}

SMat top_coefficient(const Ext& e, Mask top, int r) {
  for (auto& [m, c] : e.terms)
    if (m == top) return c;
  return SMat::Zero(r, r);
}

}  // namespace

// ---------------------------------------------------------------- Chen evaluator

ChenEvaluator::ChenEvaluator(std::shared_ptr<const FormCarrier> carrier, NumericOptions opt)
    : C_(std::move(carrier)),
      conn_([&] {
        auto* m = dynamic_cast<const MatrixFormCDGA*>(&C_->instance());
        if (!m) throw std::invalid_argument("Chen evaluator needs a matrix-form carrier");
        return ConnectionData(m->connection());
      }()),
      opt_(opt) {
  if (conn_.rank() > 4) throw std::invalid_argument("Chen evaluator supports rank <= 4");
}

const FormElement<double>& ChenEvaluator::form(int key) const {
  std::lock_guard lk(mu_);
  auto it = forms_.find(key);
  if (it != forms_.end()) return it->second;
  return forms_.emplace(key, C_->element(key).to_double()).first->second;
}

Mat ChenEvaluator::words_integral(int n, const std::vector<std::pair<const ZWord*, double>>& words,
                                  const Transport* T, const Path& g, const std::vector<TangentField>& X) const {
  const int q = static_cast<int>(X.size()), r = rank(), d = conn_.dim();
  if (n + q > 16) throw std::invalid_argument("too many generators");
  const Mask top = (Mask(1) << (n + q)) - 1;
  // a word missing some interior column never produces that dt
  std::vector<std::pair<const ZWord*, double>> live;
  for (auto& [w, c] : words) {
    Mask seen = 0;
    for (auto& z : w->e)
      if (z.col >= 1 && z.col <= n) seen |= Mask(1) << (z.col - 1);
    if (seen == (Mask(1) << n) - 1) live.emplace_back(w, c);
  }
  if (live.empty()) return Mat::Zero(r, r);

  auto integrand = [&](const std::vector<double>& t) -> Mat {
    std::vector<double> time(static_cast<size_t>(n + 2));
    time[0] = 0.0;
    time[n + 1] = 1.0;
    for (int c = 1; c <= n; ++c) time[c] = t[c - 1];
    std::vector<SMat> U, Uinv;
    if (T)
      for (int c = 0; c <= n + 1; ++c) {
        U.push_back(T->U(time[c]));
        Uinv.push_back(U.back().inverse());
      }
    std::map<std::pair<int, int>, Ext> pulled;
    auto slot = [&](int key, int col) -> const Ext& {
      auto it = pulled.find({key, col});
      if (it != pulled.end()) return it->second;
      const double tc = time[col];
      const bool interior = col >= 1 && col <= n;
      Vec v = interior ? g.velocity(tc) : Vec::Zero(d);
      std::vector<Vec> xs;
      for (auto& f : X) xs.push_back(f(tc));
      std::vector<std::vector<std::pair<Mask, double>>> dx(static_cast<size_t>(d));
      for (int a = 0; a < d; ++a) {
        if (interior && v(a) != 0.0) dx[a].emplace_back(Mask(1) << (col - 1), v(a));
        for (int j = 0; j < q; ++j)
          if (xs[j](a) != 0.0) dx[a].emplace_back(Mask(1) << (n + j), xs[j](a));
      }
      return pulled.emplace(std::make_pair(key, col), pull_form(form(key), g(tc), dx)).first->second;
    };
    Mat acc = Mat::Zero(r, r);
    for (auto& [w, coeff] : live) {
      Ext cur = ext_unit(r);
      int prev = 0;
      for (auto& z : w->e) {
        // P_{t_c -> t_prev} = U(t_prev) U(t_c)^{-1}
        if (T && time[z.col] != time[prev]) ext_right_matrix(cur, U[prev] * Uinv[z.col]);
        cur = ext_mul(cur, slot(z.key, z.col));
        if (cur.terms.empty()) break;
        prev = z.col;
      }
      if (cur.terms.empty()) continue;
      if (T && time[prev] != 0.0) ext_right_matrix(cur, U[prev] * Uinv[0]);
      acc += coeff * Mat(top_coefficient(cur, top, r));
    }
    return acc;
  };

  std::vector<double> br = g.breaks();
  for (auto& f : X) br = merge_breaks(br, f.breaks);
  return simplex_quadrature(n, integrand, opt_.order, br);
}

Mat ChenEvaluator::It(const ZigzagElement& x, const Path& g, const std::vector<TangentField>& X) const {
  const int q = static_cast<int>(X.size());
  Mat out = Mat::Zero(rank(), rank());
  if (x.is_zero()) return out;
  std::map<int, std::vector<std::pair<const ZWord*, double>>> by_n;
  for (auto& [w, c] : x.terms()) {
    if (shifted_degree(*C_, w) != q)
      throw ArityMismatch("zigzag term of degree " + std::to_string(shifted_degree(*C_, w)) + " evaluated on " +
                          std::to_string(q) + " vectors");
    by_n[w.n].emplace_back(&w, c.get_d());
  }
  std::unique_ptr<Transport> T;
  if (!conn_.form().is_zero()) T = std::make_unique<Transport>(conn_, g, opt_.ode_step);
  for (auto& [n, words] : by_n) out += words_integral(n, words, T.get(), g, X);
  return out;
}

PathSpaceFormEvaluator ChenEvaluator::It_form(const ZigzagElement& x, int q) const {
  return {q, rank(), [this, x](const Path& g, const std::vector<TangentField>& X) { return It(x, g, X); }};
}

Mat ChenEvaluator::ev0(const QForm& omega, const Path& g, const std::vector<TangentField>& X) const {
  const int q = static_cast<int>(X.size()), d = conn_.dim(), r = rank();
  std::vector<std::vector<std::pair<Mask, double>>> dx(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a)
    for (int j = 0; j < q; ++j) {
      double c = X[j](0.0)(a);
      if (c != 0.0) dx[a].emplace_back(Mask(1) << j, c);
    }
  Ext e = pull_form(omega.to_double(), g(0.0), dx);
  return Mat(top_coefficient(e, (Mask(1) << q) - 1, r));
}

PathSpaceFormEvaluator ChenEvaluator::ev0_form(const QForm& omega) const {
  int q = omega.is_zero() ? 0 : omega.degree();
  return {q, rank(), [this, omega](const Path& g, const std::vector<TangentField>& X) { return ev0(omega, g, X); }};
}

double ChenEvaluator::scalar_bar_It(const BarElement& x, const Path& g, const std::vector<TangentField>& X) const {
  if (rank() != 1 || !C_->commutative()) throw NotCommutative("scalar Chen map needs a scalar carrier");
  if (!conn_.form().is_zero()) throw std::invalid_argument("scalar Chen map needs a flat carrier");
  std::vector<ZWord> ws;
  std::vector<double> cs;
  for (auto& [m, c] : x.terms()) {
    if (bar_degree(*C_, m) != static_cast<int>(X.size())) throw ArityMismatch("bar term degree does not match");
    ZWord w{m.n(), {}};
    for (int s = 0; s < static_cast<int>(m.slots.size()); ++s) w.e.push_back({s, m.slots[s]});
    ws.push_back(std::move(w));
    cs.push_back(c.get_d());
  }
  std::map<int, std::vector<std::pair<const ZWord*, double>>> by_n;
  for (size_t i = 0; i < ws.size(); ++i) by_n[ws[i].n].emplace_back(&ws[i], cs[i]);
  double out = 0;
  for (auto& [n, words] : by_n) out += words_integral(n, words, nullptr, g, X)(0, 0);
  return out;
}

// ---------------------------------------------------------------- covariant derivatives on path space

Mat covariant_derivative_fd(const ConnectionData& conn, const PathSpaceFormEvaluator& F, const Path& g,
                            const TangentField& X, const std::vector<TangentField>& rest, double h, double step) {
  if (h <= 0) throw std::invalid_argument("finite-difference step must be positive");
  const Vec x0 = X(0.0);
  const bool moves = x0.norm() > 0 && !conn.form().is_zero();
  Path base = Path::line(g(0.0), x0);
  auto at = [&](double s) {
    Mat v = F(g.perturbed(X, s), rest);
    if (!moves) return v;
    // bring End(E) at γ_s(0) back to γ(0)
    Mat back = parallel_transport(conn, base, s, 0.0, step);
    return Mat(back * v * back.inverse());
  };
  return (at(h) - at(-h)) / (2 * h);
}

Mat nabla_tilde_fd(const ConnectionData& conn, const PathSpaceFormEvaluator& F, const Path& g,
                   const std::vector<TangentField>& X, double h, double step) {
  if (static_cast<int>(X.size()) != F.arity + 1) throw ArityMismatch("nabla: need arity + 1 vectors");
  Mat out = Mat::Zero(F.rank, F.rank);
  for (size_t i = 0; i < X.size(); ++i) {
    std::vector<TangentField> rest;
    for (size_t j = 0; j < X.size(); ++j)
      if (j != i) rest.push_back(X[j]);
    Mat term = covariant_derivative_fd(conn, F, g, X[i], rest, h, step);
    out += (i % 2 ? -1.0 : 1.0) * term;
  }
  return out;
}

// ---------------------------------------------------------------- transport derivative (curvature integral)

Mat transport_derivative(const ConnectionData& conn, const Path& g, const TangentField& X, double a, double b,
                         double step, int order, int panels) {
  const int r = conn.rank();
  if (a == b) return Mat::Zero(r, r);
  Transport T(conn, g, step);
  const double lo = std::min(a, b), hi = std::max(a, b);
  std::vector<double> br = merge_breaks(g.breaks(), X.breaks);
  for (int k = 1; k < panels; ++k) br.push_back(lo + (hi - lo) * k / panels);
  std::sort(br.begin(), br.end());
  Mat acc = Mat::Zero(r, r);
  for (auto [p0, p1] : pieces(lo, hi, br))
    for (auto [x, w] : gauss_legendre(order)) {
      double t = p0 + (p1 - p0) * x;
      Mat Rt = conn.R(g(t), g.velocity(t), X(t));
      acc += w * (p1 - p0) * (T.P(t, b) * Rt * T.P(a, t));
    }
  return a < b ? acc : Mat(-acc);
}

Mat transport_derivative_fd(const ConnectionData& conn, const Path& g, const TangentField& X, double a, double b,
                            double h, double step) {
  Path phi_a = Path::line(g(a), X(a)), phi_b = Path::line(g(b), X(b));
  auto at = [&](double s) {
    return Mat(parallel_transport(conn, phi_b, s, 0.0, step) * parallel_transport(conn, g.perturbed(X, s), a, b, step) *
               parallel_transport(conn, phi_a, 0.0, s, step));
  };
  return (at(h) - at(-h)) / (2 * h);
}

// ---------------------------------------------------------------- checks

double relative_error(const Mat& a, const Mat& b, double floor) {
  double scale = std::max(a.norm(), b.norm());
  double diff = (a - b).norm();
  return scale < floor ? diff : diff / scale;
}

namespace {

NumericCheck verdict(std::string name, double err, double tol, std::string detail = {}) {
  return {std::move(name), err, tol, std::isfinite(err) && err <= tol, std::move(detail)};
}

std::string mat_str(const Mat& m) {
  std::string s = "[";
  for (int i = 0; i < m.rows(); ++i) {
    s += i ? "; " : "";
    for (int j = 0; j < m.cols(); ++j) s += (j ? " " : "") + std::to_string(m(i, j));
  }
  return s + "]";
}

}  // namespace

NumericCheck check_chain_map(const ChenEvaluator& ev, const ZigzagElement& x, const Path& g,
                             const std::vector<TangentField>& X, double tol) {
  const int q = static_cast<int>(X.size()) - 1;
  if (q < 0) throw ArityMismatch("chain map check needs at least one vector");
  const auto& opt = ev.options();
  Mat lhs = nabla_tilde_fd(ev.connection(), ev.It_form(x, q), g, X, opt.fd_step, opt.ode_step);
  Mat rhs = ev.It(D_z(ev.carrier(), x), g, X);
  return verdict("chain-map", relative_error(lhs, rhs, 1e-9), tol, "fd " + mat_str(lhs) + " It(Dz) " + mat_str(rhs));
}

NumericCheck check_algebra_map(const ChenEvaluator& ev, const ZigzagElement& x, const ZigzagElement& y,
                               const Path& g, const std::vector<TangentField>& X, double tol) {
  const auto& C = ev.carrier();
  auto dx = degree(C, x), dy = degree(C, y);
  if (!dx || !dy) throw ArityMismatch("algebra map check needs homogeneous nonzero elements");
  const int p = *dx, m = *dy;
  if (p + m != static_cast<int>(X.size())) throw ArityMismatch("algebra map check: wrong vector count");
  Mat lhs = ev.It(shuffle(C, x, y), g, X);
  Mat rhs = Mat::Zero(ev.rank(), ev.rank());
  for (const Shuffle& s : enumerate_shuffles(p, m)) {
    std::vector<TangentField> a, b;
    for (int i = 0; i < p; ++i) a.push_back(X[s.image[i] - 1]);
    for (int j = 0; j < m; ++j) b.push_back(X[s.image[p + j] - 1]);
    rhs += (s.parity ? -1.0 : 1.0) * (ev.It(x, g, a) * ev.It(y, g, b));
  }
  return verdict("algebra-map", relative_error(lhs, rhs, 1e-9), tol, "It(x⊙y) " + mat_str(lhs) + " wedge " + mat_str(rhs));
}

NumericCheck check_eta_triangle(const ChenEvaluator& ev, const QForm& omega, const Path& g,
                                const std::vector<TangentField>& X, double tol) {
  Mat lhs = ev.It(eta(ev.carrier(), omega), g, X);
  Mat rhs = ev.ev0(omega, g, X);
  return verdict("It∘η = ev0*", relative_error(lhs, rhs, 1e-9), tol);
}

NumericCheck check_transport_derivative(const ConnectionData& conn, const Path& g, const TangentField& X, double a,
                                        double b, double tol, double h, double step) {
  Mat fd = transport_derivative_fd(conn, g, X, a, b, h, step);
  Mat quad = transport_derivative(conn, g, X, a, b, step);
  return verdict("transport-derivative", relative_error(fd, quad, 1e-9), tol,
                 "fd " + mat_str(fd) + " integral " + mat_str(quad));
}

NumericCheck triangle_check(const ChenEvaluator& ev, const ZigzagElement& x, const Path& g,
                            const std::vector<TangentField>& X, double tol) {
  double lhs = ev.It(x, g, X)(0, 0);
  double rhs = ev.scalar_bar_It(col_collapse(ev.carrier(), x), g, X);
  double scale = std::max(std::abs(lhs), std::abs(rhs));
  double err = scale < 1e-9 ? std::abs(lhs - rhs) : std::abs(lhs - rhs) / scale;
  return verdict("It∘Col = It", err, tol, std::to_string(lhs) + " vs " + std::to_string(rhs));
}

NumericCheck check_liouville(const ConnectionData& conn, const Path& g, double t, double tol, double step) {
  Mat P = parallel_transport(conn, g, 0.0, t, step);
  double integral = 0;
  for (auto [lo, hi] : pieces(0, t, g.breaks()))
    for (int k = 0; k < 32; ++k) {
      double a = lo + (hi - lo) * k / 32, b = lo + (hi - lo) * (k + 1) / 32;
      for (auto [x, w] : gauss_legendre(8)) {
        double s = a + (b - a) * x;
        integral += w * (b - a) * conn.A(g(s), g.velocity(s)).trace();
      }
    }
  double expect = std::exp(-integral);
  return verdict("liouville", std::abs(P.determinant() - expect) / std::max(1.0, std::abs(expect)), tol);
}

// ---------------------------------------------------------------- Stokes on the toy bundle [0,1] x R^d

namespace {

// substitute t = value for variable 0, leaving a polynomial in the remaining variables
Polynomial<double> substitute_first(const Polynomial<Q>& p, double value) {
  Polynomial<double> out(p.dim() - 1);
  for (auto& [e, c] : p.terms()) {
    Exponent rest(e.begin() + 1, e.end());
    out.add_term(rest, c.get_d() * std::pow(value, e[0]));
  }
  return out;
}

MatrixPoly<double> substitute_first(const MatrixPoly<Q>& M, double value) {
  MatrixPoly<double> out(M.dim() - 1, M.rank());
  for (int i = 0; i < M.rank(); ++i)
    for (int j = 0; j < M.rank(); ++j) out(i, j) = substitute_first(M(i, j), value);
  return out;
}

// restriction of the dt-free part to the slice t = value
FormElement<double> slice(const QForm& w, double value) {
  FormElement<double> out(w.dim() - 1, w.rank());
  for (auto& [m, M] : w.terms())
    if (!(m & 1u)) out.add_term(m >> 1, substitute_first(M, value));
  return out;
}

QForm lift(const QForm& A) {
  QForm out(A.dim() + 1, A.rank());
  for (auto& [m, M] : A.terms()) {
    MatrixPoly<Q> L(A.dim() + 1, A.rank());
    for (int i = 0; i < A.rank(); ++i)
      for (int j = 0; j < A.rank(); ++j)
        for (auto& [e, c] : M(i, j).terms()) {
          Exponent f{0};
          f.insert(f.end(), e.begin(), e.end());
          L(i, j).add_term(f, c);
        }
    out.add_term(m << 1, L);
  }
  return out;
}

double max_coefficient(const FormElement<double>& f) {
  double best = 0;
  for (auto& [m, M] : f.terms())
    for (int i = 0; i < f.rank(); ++i)
      for (int j = 0; j < f.rank(); ++j)
        for (auto& [e, c] : M(i, j).terms()) best = std::max(best, std::abs(c));
  return best;
}

}  // namespace

FormElement<double> fiber_integrate(const QForm& omega, int order) {
  FormElement<double> out(omega.dim() - 1, omega.rank());
  for (auto& [m, M] : omega.terms()) {
    if (!(m & 1u)) continue;
    for (auto [t, w] : gauss_legendre(order)) out.add_term(m >> 1, substitute_first(M, t).scaled(w));
  }
  return out;
}

StokesSides fiber_integration_stokes(const QForm& A, const QForm& omega, int order) {
  if (omega.dim() != A.dim() + 1 || omega.rank() != A.rank())
    throw DimensionMismatch("stokes: ω must live on [0,1] x R^d with the connection's rank");
  FormElement<double> I = fiber_integrate(omega, order);
  FormElement<double> Ad = A.to_double();
  FormElement<double> lhs = -(exterior_derivative(I) + graded_commutator(Ad, I));
  QForm pA = lift(A);
  QForm dw = exterior_derivative(omega) + graded_commutator(pA, omega);
  FormElement<double> rhs = fiber_integrate(dw, order) - (slice(omega, 1.0) - slice(omega, 0.0));
  return {lhs, rhs};
}

NumericCheck fiber_integration_stokes_check(const QForm& A, const QForm& omega, double tol) {
  auto [lhs, rhs] = fiber_integration_stokes(A, omega);
  double scale = std::max({1.0, max_coefficient(lhs), max_coefficient(rhs)});
  return verdict("stokes", max_coefficient(lhs - rhs) / scale, tol);
}

// ---------------------------------------------------------------- homotopy PM ≃ M

namespace {

// X pushed forward by the stopping map at time s: t -> X(min(t, s))
TangentField stop_field(const TangentField& X, double s) {
  auto v = X.value;
  auto dv = X.derivative;
  const int d = static_cast<int>(X(0.0).size());
  auto br = X.breaks;
  br.push_back(s);
  return {[=](double t) { return v(std::min(t, s)); }, [=](double t) { return t < s ? dv(t) : Vec(Vec::Zero(d)); },
          br};
}

// ∂_s of the stopped family: γ̇(s) on t > s, zero before
TangentField stop_velocity(const Path& g, double s) {
  Vec v = g.velocity(s);
  const int d = g.dim();
  return {[=](double t) { return t > s ? v : Vec(Vec::Zero(d)); }, [=](double) { return Vec(Vec::Zero(d)); }, {s}};
}

// F*β evaluated at (s, γ) on (∂_s, X_1..) when with_ds, else on (X_1..)
Mat pulled(const PathSpaceFormEvaluator& F, const Path& g, double s, const std::vector<TangentField>& X, bool with_ds) {
  std::vector<TangentField> Y;
  if (with_ds) Y.push_back(stop_velocity(g, s));
  for (auto& x : X) Y.push_back(stop_field(x, s));
  return F(g.stopped(s), Y);
}

}  // namespace

PathSpaceFormEvaluator shrink_homotopy(const PathSpaceFormEvaluator& F, const NumericOptions& opt) {
  if (F.arity < 1) throw ArityMismatch("homotopy needs a form of positive degree");
  return {F.arity - 1, F.rank, [F, opt](const Path& g, const std::vector<TangentField>& X) {
            Mat acc = Mat::Zero(F.rank, F.rank);
            for (auto [s, w] : gauss_legendre(opt.s_order)) acc += w * pulled(F, g, s, X, true);
            return acc;
          }};
}

NumericCheck shrink_homotopy_check(const ConnectionData& conn, const PathSpaceFormEvaluator& F, const Path& g,
                                   const std::vector<TangentField>& X, const NumericOptions& opt, double tol) {
  const int q = F.arity;
  if (static_cast<int>(X.size()) != q) throw ArityMismatch("homotopy check: wrong vector count");
  std::vector<TangentField> X0;
  for (auto& x : X) X0.push_back(TangentField::constant(x(0.0)));
  Mat lhs = F(g, X) - F(Path::constant(g(0.0)), X0);

  Mat rhs = Mat::Zero(F.rank, F.rank);
  if (q >= 1) rhs += nabla_tilde_fd(conn, shrink_homotopy(F, opt), g, X, opt.fd_step, opt.ode_step);
  // h(∇̃F) = ∫ ds (∇̃ F*β)(∂_s, X_1..X_q), expanded with the fields held constant on [0,1] x PM
  const double h = opt.fd_step;
  for (auto [s, w] : gauss_legendre(opt.s_order)) {
    Mat term = (pulled(F, g, s + h, X, false) - pulled(F, g, s - h, X, false)) / (2 * h);
    for (int i = 0; i < q; ++i) {
      std::vector<TangentField> rest;
      for (int j = 0; j < q; ++j)
        if (j != i) rest.push_back(X[j]);
      PathSpaceFormEvaluator G{q - 1, F.rank, [&, s](const Path& gg, const std::vector<TangentField>& R) {
                                 return pulled(F, gg, s, R, true);
                               }};
      term += ((i + 1) % 2 ? -1.0 : 1.0) * covariant_derivative_fd(conn, G, g, X[i], rest, h, opt.ode_step);
    }
    rhs += w * term;
  }
  return verdict("shrink-homotopy", relative_error(lhs, rhs, 1e-9), tol, "lhs " + mat_str(lhs) + " rhs " + mat_str(rhs));
}

}  // namespace curvchen
