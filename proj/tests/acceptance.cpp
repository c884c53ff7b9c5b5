#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <tkoszul/tkoszul.hpp>

using namespace tkoszul;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  int checks = 0;

  void absorb(const Report& r, const std::string& where) {
    checks += static_cast<int>(r.checks.size());
    for (auto* c : r.failures()) fail(where + ": " + c->name + (c->detail.empty() ? "" : " " + c->detail.dump()));
  }
  void require(bool ok, const std::string& what) {
    ++checks;
    if (!ok) fail(what);
  }
  void fail(const std::string& why) {
    pass = false;
    notes.push_back(why);
  }
};

int failures = 0;

template <class F>
void criterion(int id, const std::string& title, double budget_s, F&& body) {
  Outcome o;
  auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("error: ") + e.what());
  }
  double s = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget_s > 0 && s > budget_s) o.fail("runtime " + std::to_string(s) + " s over the " + std::to_string(budget_s) + " s budget");
  char time[32];
  std::snprintf(time, sizeof time, "%.2f s", s);
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << title << "): " << o.checks << " checks, "
            << time << "\n";
  for (auto& n : o.notes) std::cout << "    " << n.substr(0, 400) << "\n";
  std::cout.flush();
  if (!o.pass) ++failures;
}

bool has_witness(const Report& r) {
  for (auto* c : r.failures())
    if (c->detail.contains("nonzero_components") && !c->detail["nonzero_components"].empty()) return true;
  return false;
}

long binom(long n, long k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
// polyvectors f d_J with deg f - |J| = w, forms f dz^I with deg f + |I| = w
long polyvectors(int n, int q, int w) { return w + q < 0 ? 0 : binom(n, q) * binom(w + q + n - 1, n - 1); }
long forms(int n, int i, int w) { return w - i < 0 ? 0 : binom(n, i) * binom(w - i + n - 1, n - 1); }

}  // namespace

int main() {
  std::cout << "acceptance suite\n";

  criterion(1, "homotopy identities on K and K-check", 30, [](Outcome& o) {
    SuiteOptions opt;
    opt.cases = 100;
    opt.max_degree = 4;
    for (auto& f : list_fixtures()) {
      Atlas at = fixture(f.name);
      Rng rng(100 + f.charts);
      Report r{"homotopy", {}};
      for (auto& c : at.charts) homotopy_chart_checks(r, c, opt, rng);
      o.absorb(r, f.name);
    }
    Rng rng(103);
    Report r{"homotopy", {}};
    homotopy_chart_checks(r, Chart::diagonal("u3", 3), opt, rng);
    homotopy_chart_checks(r, Chart::offdiagonal("v3", 3), opt, rng);
    o.absorb(r, "n=3");
  });

  criterion(2, "Hom homotopy d_Hom P_H + P_H d_Hom = 1 - r", 60, [](Outcome& o) {
    SuiteOptions opt;
    for (auto name : {"line", "plane"}) {
      Atlas at = fixture(name);
      Rng rng(200);
      Report r{"hom homotopy", {}};
      hom_homotopy_checks(r, at.charts[0], opt, rng);
      o.absorb(r, name);
    }
  });

  criterion(3, "twisting equation and rejected mutations", 120, [](Outcome& o) {
    for (auto name : {"shear2", "shear3", "trans3", "offdiag"}) {
      Atlas at = fixture(name);
      o.absorb(verify_twist(build_twist(at), at), name);
      o.absorb(verify_twist_dual(build_twist_dual(at), at), name);
    }
    auto muts = shipped_mutations();
    o.require(muts.size() >= 6, "fewer than 6 shipped mutations");
    for (auto& m : muts) {
      Atlas at = fixture(m.fixture);
      Report r = verify_twist(mutated_twist(m, at), at);
      o.require(!r.pass(), "mutation " + m.name + " was accepted");
      o.require(has_witness(r), "mutation " + m.name + " rejected without a witness");
    }
  });

  criterion(4, "twist restricted to the diagonal", 0, [](Outcome& o) {
    for (auto name : {"shear2", "shear3"}) {
      Atlas at = fixture(name);
      o.absorb(restrict_twist_diagonal(build_twist(at), at), name);
    }
    Atlas sh = fixture("shear2");
    int al = sh.index("alpha"), be = sh.index("beta");
    auto jac = sh.jacobian(al, be);
    auto p = [](const std::string& s) { return parse_coeff(s, 2).numerator(); };
    o.require(jac == std::vector<std::vector<Polynomial>>{{p("1"), p("0")}, {p("2*z1"), p("1")}},
              "shear2 Jacobian is not [[1,0],[2z1,1]]");
    HomElement r = restrict_diagonal(*build_twist(sh).at({al, be}));
    auto c = [](const std::string& s) { return parse_coeff(s, 2); };
    // by hand: Lambda^1 J^T on e^i (x) ech^j, Lambda^2 J = det = 1
    o.require(r.coeff(0, 0) == c("1"), "a^{1,0}|diag on 1(x)1");
    o.require(r.coeff(bit(1), bit(1)) == c("1"), "a^{1,0}|diag on e^1(x)ech^1");
    o.require(r.coeff(bit(2), bit(2)) == c("1"), "a^{1,0}|diag on e^2(x)ech^2");
    o.require(r.coeff(bit(1), bit(2)) == c("2*z1"), "a^{1,0}|diag on e^1(x)ech^2");
    o.require(r.coeff(bit(2), bit(1)).is_zero(), "a^{1,0}|diag on e^2(x)ech^1");
    o.require(r.coeff(bit(1) | bit(2), bit(1) | bit(2)) == c("1"), "a^{1,0}|diag on e^12(x)ech^12");
    o.require(r.terms.size() == 5, "a^{1,0}|diag has extra components");
  });

  criterion(5, "Phi chain map, closed form, vanishing above n", 0, [](Outcome& o) {
    SuiteOptions opt;
    opt.cases = 100;
    for (int n = 1; n <= 3; ++n) {
      Rng rng(500 + n);
      Report r{"phi", {}};
      phi_checks(r, n, opt, rng);
      o.absorb(r, "n=" + std::to_string(n));
    }
  });

  criterion(6, "shuffle compatibility, Psi = HKR o R, R preserves cups", 0, [](Outcome& o) {
    SuiteOptions opt;
    opt.cases = 50;
    for (int n = 1; n <= 3; ++n) {
      Rng rng(600 + n);
      Report r{"shuffle", {}};
      shuffle_checks(r, n, opt, rng);
      o.absorb(r, "n=" + std::to_string(n));
    }
    SuiteOptions deg3;
    deg3.max_degree = 3;
    for (int n = 1; n <= 2; ++n) {
      Rng rng(610 + n);
      Report r{"diagram", {}};
      diagram_checks(r, n, deg3, rng);
      o.absorb(r, "n=" + std::to_string(n));
    }
    SuiteOptions pairs;
    pairs.cases = 20;
    for (auto name : {"plane", "shear2", "shear3", "trans3"}) {
      Rng rng(620);
      Report r{"R", {}};
      r_checks(r, fixture(name), pairs, rng);
      o.absorb(r, name);
    }
  });

  criterion(7, "Leibniz, action associativity, contraction correspondence", 0, [](Outcome& o) {
    SuiteOptions opt;
    opt.cases = 10;
    opt.seed = 700;
    bool worked = false;
    for (auto name : {"line", "plane", "shear2"}) {
      Report r = tor_suite(fixture(name), opt);
      o.absorb(r, name);
      for (auto& c : r.checks)
        if (c.name.rfind("worked case", 0) == 0 && c.pass) worked = true;
    }
    o.require(worked, "worked case f = 1(x)ech^1, c = e(x)1 - 1(x)e did not give 1 on both sides");
  });

  criterion(8, "weight-graded cohomology against monomial counts", 120, [](Outcome& o) {
    for (auto name : {"line", "plane"}) {
      Atlas at = fixture(name);
      int n = at.dimension();
      OperatorContext ctx(at);
      for (int w = -n; w <= 4; ++w) {
        std::map<int, int> hom, tensor;
        for (int q = 0; q <= n; ++q) {
          if (long d = polyvectors(n, q, w)) hom[q] = static_cast<int>(d);
          if (long d = forms(n, q, w)) tensor[-q] = static_cast<int>(d);
        }
        std::string at_w = std::string(name) + " weight " + std::to_string(w);
        o.require(cohomology_dims(ctx, ComplexKind::Hom, w).dims == hom, "H(hom) on " + at_w);
        o.require(cohomology_dims(ctx, ComplexKind::Tensor, w).dims == tensor, "H(tensor) on " + at_w);
      }
    }
  });

  criterion(9, "identical seeds give identical reports", 0, [](Outcome& o) {
    for (auto& suite : suite_names())
      for (auto name : {"line", "shear2"}) {
        Atlas at = fixture(name);
        SuiteOptions opt;
        opt.cases = 8;
        opt.seed = 900;
        if (suite == "cohomology" && std::string(name) == "shear2") continue;
        std::string a = without_timing(report_document(suite, at, opt, run_suite(suite, at, opt), 0.0)).dump();
        std::string b = without_timing(report_document(suite, at, opt, run_suite(suite, at, opt), 1.0)).dump();
        o.require(a == b, suite + " on " + name + " differs between runs");
      }
  });

  std::cout << (failures ? "FAIL" : "PASS") << " acceptance: " << 9 - failures << "/9 criteria\n";
  return failures ? 1 : 0;
}
