// One PASS/FAIL line per acceptance criterion. Tolerances and sample counts are pinned here,
// independently of the suite defaults, so loosening a config cannot turn a line green.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "curvchen/fixtures.hpp"
#include "curvchen/suites.hpp"

using namespace curvchen;
using Clock = std::chrono::steady_clock;

namespace {

struct Line {
  std::string name;
  bool ok = true;
  std::string detail;
  double seconds = 0;
  double limit = 0;
};

std::vector<Line> lines;

struct Timed {
  Report rep;
  double seconds;
};

Timed timed(const std::function<Report()>& f) {
  auto t0 = Clock::now();
  Report r = f();
  return {std::move(r), std::chrono::duration<double>(Clock::now() - t0).count()};
}

std::vector<const CheckResult*> find(const Report& r, const std::string& needle) {
  std::vector<const CheckResult*> out;
  for (auto& c : r.checks)
    if (c.name.find(needle) != std::string::npos) out.push_back(&c);
  return out;
}

void need(Line& l, bool cond, const std::string& why) {
  if (cond) return;
  l.ok = false;
  l.detail += (l.detail.empty() ? "" : "; ") + why;
}

// every matching check passed with enough samples and (when numeric) an error under tol
Line from_checks(const std::string& name, const Report& r, const std::string& needle, size_t expect_checks,
                 int min_trials, double tol, double seconds, double limit) {
  Line l{name, true, "", seconds, limit};
  auto cs = find(r, needle);
  need(l, cs.size() == expect_checks,
       "expected " + std::to_string(expect_checks) + " checks, found " + std::to_string(cs.size()));
  double worst = 0;
  int fewest = 1 << 30;
  for (auto* c : cs) {
    need(l, c->passed, c->name + " failed" + (c->counterexample.empty() ? "" : ": " + c->counterexample));
    fewest = std::min(fewest, c->trials);
    if (c->max_error) worst = std::max(worst, *c->max_error);
  }
  need(l, cs.empty() || fewest >= min_trials, "only " + std::to_string(fewest) + " samples");
  if (tol > 0) need(l, worst <= tol, "error " + std::to_string(worst));
  if (l.ok) {
    char buf[160];
    if (tol > 0)
      std::snprintf(buf, sizeof buf, "%zu checks, >= %d samples each, max error %.2e <= %.0e", cs.size(), fewest, worst,
                    tol);
    else
      std::snprintf(buf, sizeof buf, "%zu checks, >= %d samples each, exact", cs.size(), fewest);
    l.detail = buf;
  }
  return l;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

int dim_H(const nlohmann::json& table, int p) {
  for (auto& d : table.at("degrees"))
    if (d.at("p") == p) return d.at("dim_H");
  return -1;
}

}  // namespace

int main() {
  SuiteConfig cfg;  // seed 1, default sample counts
  cfg.threads = 0;

  // 1. exact curvature of the R^2 example
  {
    auto t0 = Clock::now();
    auto B = make_example_R2_cdga();
    QForm want = QForm::from_term(0b11, MatrixPoly<Q>::constant(2, 2, {Q(2), Q(0), Q(0), Q(-2)}));
    Line l{"curvature of the R^2 example is 2 diag(1,-1) dx^dy exactly", B->curvature() == want, "", 0, 1};
    l.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    l.detail = l.ok ? "rational equality" : "got something else";
    lines.push_back(l);
  }

  auto zz = timed([&] { return run_verify_zigzag(cfg); });
  auto ps = timed([&] { return run_verify_pathspace(cfg); });
  auto co = timed([&] { return run_cohomology(cfg); });

  // Suites run their checks concurrently, so each line reports the whole suite's wall time:
  // an upper bound for the criterion's own cost.
  lines.push_back(from_checks("curved dga axioms, >= 200 samples per instance", zz.rep, "axioms [", 2, 200, 0,
                              zz.seconds, 30));
  lines.push_back(from_checks("D_z^2 = [R_z, -] on {2,4}x{0,1,2}, both carriers, >= 50 per cell", zz.rep,
                              "D_z^2 = [R_z,-]", 12, 50, 0, zz.seconds, 300));
  {
    Line a = from_checks("", zz.rep, "Leibniz of D_z over shuffle", 2, 50, 0, 0, 0);
    Line b = from_checks("", zz.rep, "shuffle associativity", 2, 50, 0, 0, 0);
    Line l{"Leibniz of D_z over shuffle and associativity, >= 50 each", a.ok && b.ok, a.detail + " / " + b.detail,
           zz.seconds, 300};
    lines.push_back(l);
  }
  lines.push_back(from_checks("alpha.eta = id and the homotopy identity, >= 100 monomials", zz.rep,
                              "homotopy id - eta.alpha", 2, 100, 0, zz.seconds, 120));
  {
    Line l{"normalisation confluence, 500 (monomial, move sequence) pairs per carrier", true, "", zz.seconds, 60};
    for (std::string inst : {"matrix-form", "tensor"}) {
      int total = 0;
      for (auto* c : find(zz.rep, "normalisation confluence [" + inst)) {
        total += c->trials;
        need(l, c->passed, c->name + " failed");
      }
      need(l, total >= 500, inst + ": only " + std::to_string(total));
      if (l.ok) l.detail += (l.detail.empty() ? "" : ", ") + inst + " " + std::to_string(total);
    }
    lines.push_back(l);
  }
  {
    Line l{"curved cohomology: H^0(T(V)) = 1, dim H^k < 2^k, E10(dx+dy) closed not exact, sub-dga agreement",
           true, "", co.seconds, 120};
    auto& t = co.rep.tables;
    need(l, dim_H(t["tensor"]["curved"], 0) == 1, "H^0 != 1");
    for (int k = 1; k <= 4; ++k) need(l, dim_H(t["tensor"]["curved"], k) < (1 << k), "H^" + std::to_string(k) + " too big");
    need(l, dim_H(t["example_R2"]["curved"], 1) >= 1, "H^1 of the R^2 example is 0");
    for (const char* inst : {"tensor", "example_R2"})
      for (auto& d : t[inst]["curved"]["degrees"]) {
        int p = d.at("p");
        need(l, d.at("dim_H") == dim_H(t[inst]["maximal_subdga"], p),
             std::string(inst) + " disagrees with the maximal sub-dga in degree " + std::to_string(p));
      }
    auto w = find(co.rep, "E10(dx+dy)");
    need(l, w.size() == 1 && w[0]->passed, "E10(dx+dy) check failed");
    for (auto& c : co.rep.checks) need(l, c.passed, c.name + " failed");
    if (l.ok) {
      l.detail = "tensor H = ";
      for (int k = 0; k <= 4; ++k) l.detail += std::to_string(dim_H(t["tensor"]["curved"], k)) + (k < 4 ? "," : "");
      l.detail += "; R^2 H^1 = " + std::to_string(dim_H(t["example_R2"]["curved"], 1)) + " (D=3)";
    }
    lines.push_back(l);
  }
  lines.push_back(from_checks("transport derivative vs curvature integral, rel. error <= 1e-4, >= 10 fixtures", ps.rep,
                              "transport derivative", 1, 10, 1e-4, ps.seconds, 60));
  lines.push_back(from_checks("fibre integration Stokes, <= 1e-8, >= 10 fixtures", ps.rep, "fibre integration Stokes",
                              1, 10, 1e-8, ps.seconds, 60));
  lines.push_back(from_checks("It(eta(w)) = ev0* w, <= 1e-6, >= 10 fixtures", ps.rep, "It(eta(w))", 1, 10, 1e-6,
                              ps.seconds, 60));
  {
    Line l = from_checks("chain map, rel. error <= 1e-2, nonzero c_z term, convergence gate", ps.rep,
                         "chain map It.D_z", 2, 1, 1e-2, ps.seconds, 600);
    for (auto* c : find(ps.rep, "chain map It.D_z")) need(l, c->note.find("gate ok") != std::string::npos, "gate: " + c->note);
    // direct fixture with an interior matrix 1-form, where c_z contributes
    auto C = std::make_shared<FormCarrier>(make_example_R2_cdga());
    ChenEvaluator ev(C);
    const QForm one = QForm::unit(2, 2);
    QForm a = form_from_json(nlohmann::json::parse(R"([{"gens": "dx", "matrix": [["0", "y"], ["1", "0"]]}])"), 2, 2);
    auto x = make_zigzag(*C, 2, 1, std::vector<QForm>{one, a, one, one, one});
    Path g = Path::circle_arc(v2(0, 0), 0.8, 0.2, 1.9);
    std::vector<TangentField> X{TangentField::bump(v2(1, -0.5), 0.5, 0.3)};
    double cz = ev.It(c_z(*C, x), g, X).norm();
    auto direct = check_chain_map(ev, x, g, X, 1e-2);
    need(l, cz > 1e-3, "c_z term vanished on the direct fixture");
    need(l, direct.passed, "direct fixture: " + direct.detail);
    char buf[120];
    std::snprintf(buf, sizeof buf, "; direct fixture |It(c_z x)| = %.2e, error %.2e", cz, direct.error);
    l.detail += buf;
    lines.push_back(l);
  }
  {
    Line l = from_checks("algebra map It(x.y) = It(x) It(y), <= 1e-3, >= 10 fixtures", ps.rep, "algebra map It(x.y)", 1,
                         10, 1e-3, ps.seconds, 600);
    // the classical pair dx, dy on t -> (t, t^2): It(dx) = It(dy) = 1
    auto C = std::make_shared<FormCarrier>(make_matrix_form_cdga(2, 1, QForm(2, 1)));
    ChenEvaluator ev(C);
    const QForm one = QForm::unit(2, 1);
    auto ax = make_zigzag(*C, 2, 1, std::vector<QForm>{one, QForm::dx(2, 1, 0), one, one, one});
    auto by = make_zigzag(*C, 2, 1, std::vector<QForm>{one, QForm::dx(2, 1, 1), one, one, one});
    Path g = Path::polynomial({v2(0, 0), v2(1, 0), v2(0, 1)});
    double prod = ev.It(shuffle(*C, ax, by), g, {})(0, 0);
    need(l, std::abs(prod - 1.0) <= 1e-3, "classical pair gives " + std::to_string(prod));
    need(l, check_algebra_map(ev, ax, by, g, {}, 1e-3).passed, "classical pair check failed");
    char buf[80];
    std::snprintf(buf, sizeof buf, "; classical pair It(a.b) = %.12f (oracle 1)", prod);
    l.detail += buf;
    lines.push_back(l);
  }
  {
    Line a = from_checks("", ps.rep, "triangle It = It.Col", 1, 20, 1e-3, 0, 0);
    Line b = from_checks("", zz.rep, "Col chain map and algebra map", 1, 1, 0, 0, 0);
    lines.push_back(Line{"triangle It = It.Col (>= 20 scalar flat fixtures, <= 1e-3); Col identities exact",
                         a.ok && b.ok, a.detail + " / " + b.detail, ps.seconds + zz.seconds, 300});
  }
  {
    auto t0 = Clock::now();
    Line l{"determinism: same seed, identical reports (1 vs 4 threads)", true, "", 0, 0};
    for (auto* run : {&run_verify_zigzag, &run_verify_pathspace, &run_cohomology}) {
      SuiteConfig one = cfg, four = cfg;
      one.threads = 1;
      four.threads = 4;
      auto a = report_to_json((*run)(one), false).dump(), b = report_to_json((*run)(four), false).dump();
      need(l, a == b, "reports differ");
    }
    // and against the first, default-threaded run
    need(l, report_to_json(zz.rep, false).dump() == report_to_json(run_verify_zigzag(cfg), false).dump(),
         "zigzag rerun differs");
    l.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (l.ok) l.detail = "byte-identical JSON for all three suites";
    lines.push_back(l);
  }

  int failed = 0;
  for (auto& l : lines) {
    bool slow = l.limit > 0 && l.seconds > l.limit;
    bool ok = l.ok && !slow;
    failed += !ok;
    std::printf("%s  %s  [%.2fs%s]  %s%s\n", ok ? "PASS" : "FAIL", l.name.c_str(), l.seconds,
                l.limit > 0 ? (" / " + std::to_string(static_cast<int>(l.limit)) + "s").c_str() : "",
                l.detail.c_str(), slow ? " (over time budget)" : "");
  }
  std::printf("%zu criteria, %d failed\n", lines.size(), failed);
  return failed ? 1 : 0;
}
