#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include <tkoszul/tkoszul.hpp>

using namespace tkoszul;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::pair<int, int> parse_weights(const std::string& s) {
  static const std::regex range(R"(\s*(-?\d+)\s*(?:\.\.\s*(-?\d+))?\s*)");
  std::smatch m;
  if (!std::regex_match(s, m, range)) throw UsageError("--weights expects a..b, got '" + s + "'");
  int a = std::stoi(m[1]);
  int b = m[2].matched ? std::stoi(m[2]) : a;
  if (b < a) throw UsageError("empty weight range '" + s + "'");
  return {a, b};
}

void emit(const json& doc, const std::string& out) {
  std::string text = doc.dump(2) + "\n";
  std::cout << text;
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw UsageError("cannot write '" + out + "'");
    f << text;
  }
}

int finish(const std::string& suite, const Atlas& atlas, const SuiteOptions& opt, const Report& r, double ms,
           const std::string& out) {
  emit(report_document(suite, atlas, opt, r, ms), out);
  auto bad = r.failures();
  std::cerr << (bad.empty() ? "PASS" : "FAIL") << " " << suite << " on " << atlas.id << ": "
            << r.checks.size() - bad.size() << "/" << r.checks.size() << " checks\n";
  for (auto* c : bad) std::cerr << "  failed: " << c->name << "\n";
  return bad.empty() ? 0 : 1;
}

int run_report(const std::string& suite, const std::string& atlas_arg, const SuiteOptions& opt, const std::string& out,
               const std::function<Report(const Atlas&)>& body) {
  Atlas atlas = resolve_atlas(atlas_arg);
  double ms = 0;
  Report r = timed([&] { return body(atlas); }, ms);
  return finish(suite, atlas, opt, r, ms, out);
}

std::string cohomology_text(const Atlas& atlas, ComplexKind kind, const std::vector<CohomologyRow>& rows) {
  int lo = 0, hi = 0;
  for (auto& r : rows)
    for (auto& [q, d] : r.dims) {
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
  int n = atlas.dimension();
  if (kind == ComplexKind::Hom) hi = std::max(hi, n);
  if (kind == ComplexKind::Tensor) lo = std::min(lo, -n);
  std::ostringstream os;
  os << "H(" << to_string(kind) << ") on " << atlas.id << ", dimension by weight (rows) and degree (columns)\n";
  os << std::setw(7) << "weight" << " |";
  for (int q = lo; q <= hi; ++q) os << std::setw(6) << q;
  os << "\n" << std::string(9 + 6 * (hi - lo + 1), '-') << "\n";
  for (auto& r : rows) {
    os << std::setw(7) << r.weight << " |";
    for (int q = lo; q <= hi; ++q) {
      auto it = r.dims.find(q);
      os << std::setw(6) << (it == r.dims.end() ? 0 : it->second);
    }
    os << "\n";
  }
  return os.str();
}

json cohomology_json(const Atlas& atlas, ComplexKind kind, std::pair<int, int> w, const std::vector<CohomologyRow>& rows) {
  json j = json::object();
  j["tool"] = "twisted-koszul";
  j["report_version"] = kReportVersion;
  j["atlas"] = atlas.id;
  j["kind"] = to_string(kind);
  j["weights"] = json::array({w.first, w.second});
  json t = json::array();
  for (auto& r : rows) t.push_back(json{{"weight", r.weight}, {"dims", dims_json(r.dims)}});
  j["table"] = t;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twisted Koszul resolutions: verification suites and reports"};
  app.require_subcommand(1);

  SuiteOptions opt;
  std::string atlas_arg, out, suite, kind_text = "hom", weights_text, mutation;
  std::optional<int> fixture_n;
  bool as_json = false;

  auto add_common = [&](CLI::App* c, bool sampling) {
    c->add_option("atlas", atlas_arg, "Fixture name or atlas JSON file")->required();
    c->add_option("--out", out, "Also write the JSON report to this file");
    if (sampling) {
      c->add_option("--cases", opt.cases, "Random cases per identity")->check(CLI::PositiveNumber);
      c->add_option("--seed", opt.seed, "Random seed");
      c->add_option("--max-degree", opt.max_degree, "Coefficient degree cap")->check(CLI::NonNegativeNumber);
    }
  };

  auto* atlas_cmd = app.add_subcommand("atlas", "Atlas files");
  atlas_cmd->require_subcommand(1);
  auto* validate_cmd = atlas_cmd->add_subcommand("validate", "Check an atlas file");
  validate_cmd->add_option("file", atlas_arg, "Atlas JSON file or fixture name")->required();

  auto* twist_cmd = app.add_subcommand("twist", "Twisting cochains");
  twist_cmd->require_subcommand(1);
  auto* tb = twist_cmd->add_subcommand("build", "Build the twisting cochain and print its components");
  auto* tv = twist_cmd->add_subcommand("verify", "Check the twisting equation");
  auto* tr = twist_cmd->add_subcommand("restrict", "Check the restriction to the diagonal");
  for (auto* c : {tb, tv, tr}) add_common(c, false);
  for (auto* c : {tv, tr}) c->add_option("--mutation", mutation, "Apply a shipped mutation first");

  auto* hkr_cmd = app.add_subcommand("hkr", "Hochschild-Kostant-Rosenberg comparison");
  hkr_cmd->require_subcommand(1);
  auto* hc = hkr_cmd->add_subcommand("check", "Run the HKR checks");
  add_common(hc, true);

  auto* tor_cmd = app.add_subcommand("tor", "Tor action and contraction");
  tor_cmd->require_subcommand(1);
  auto* tc = tor_cmd->add_subcommand("check", "Run the Tor checks");
  add_common(tc, true);

  auto* coh = app.add_subcommand("cohomology", "Weight-graded cohomology tables");
  coh->add_option("atlas", atlas_arg, "Fixture name or atlas JSON file")->required();
  coh->add_option("--kind", kind_text, "hom, tensor, K or Kcheck");
  coh->add_option("--weights", weights_text, "Weight range a..b");
  coh->add_option("--out", out, "Write the JSON table to this file");
  coh->add_flag("--json", as_json, "Print JSON instead of the aligned table");

  auto* run = app.add_subcommand("run", "Run a named suite");
  run->add_option("suite", suite, "homotopy, twist, hkr, tor or cohomology")->required();
  add_common(run, true);
  run->add_option("--mutation", mutation, "Twist suite: apply a shipped mutation");
  run->add_option("--weights", weights_text, "Cohomology suite: weight range a..b");
  run->add_option("--kind", kind_text, "Cohomology suite: hom or tensor");

  auto* fx = app.add_subcommand("fixtures", "List shipped fixtures");
  fx->add_option("--n", fixture_n, "Only fixtures of this dimension");
  fx->add_flag("--json", as_json, "Print JSON");

  auto* muts = app.add_subcommand("mutations", "List shipped twist mutations");

  CLI11_PARSE(app, argc, argv);

  try {
    if (atlas_cmd->parsed()) {
      json j = json::object();
      j["file"] = atlas_arg;
      try {
        Atlas a = is_fixture(atlas_arg) ? fixture(atlas_arg) : atlas_from_json(read_json_file(atlas_arg));
        ValidationReport rep = validate(a);
        j["valid"] = rep.valid;
        j["id"] = a.id;
        j["violations"] = rep.violations;
        if (rep.valid) {
          a.build();
          j["n"] = a.dimension();
          j["charts"] = a.charts.size();
          j["nerve_dimension"] = a.nerve_dimension();
        }
      } catch (const InvalidAtlas& e) {
        j["valid"] = false;
        j["violations"] = json::array({e.what()});
      }
      std::cout << j.dump(2) << "\n";
      return j["valid"].get<bool>() ? 0 : 1;
    }
    opt.mutation = mutation;
    if (twist_cmd->parsed()) {
      if (tb->parsed()) {
        Atlas atlas = resolve_atlas(atlas_arg);
        json j = json::object();
        j["tool"] = "twisted-koszul";
        j["report_version"] = kReportVersion;
        j["atlas"] = atlas.id;
        j["twist"] = twist_components(atlas, build_twist(atlas));
        json dual = json::array();
        for (auto& [s, v] : build_twist_dual(atlas).values)
          if (!v.is_zero()) dual.push_back(json{{"simplex", atlas.simplex_name(s)}, {"element", to_string(v)}});
        j["dual_twist"] = dual;
        emit(j, out);
        return 0;
      }
      if (tv->parsed())
        return run_report("twist verify", atlas_arg, opt, out, [&](const Atlas& a) {
          Report r = verify_twist(suite_twist(a, opt), a);
          if (opt.mutation.empty()) r.merge(verify_twist_dual(build_twist_dual(a), a), "dual");
          return r;
        });
      return run_report("twist restrict", atlas_arg, opt, out,
                        [&](const Atlas& a) { return restrict_twist_diagonal(suite_twist(a, opt), a); });
    }
    if (hkr_cmd->parsed()) return run_report("hkr", atlas_arg, opt, out, [&](const Atlas& a) { return hkr_suite(a, opt); });
    if (tor_cmd->parsed()) return run_report("tor", atlas_arg, opt, out, [&](const Atlas& a) { return tor_suite(a, opt); });
    if (coh->parsed()) {
      Atlas atlas = resolve_atlas(atlas_arg);
      ComplexKind kind = parse_complex_kind(kind_text);
      int n = atlas.dimension();
      auto w = weights_text.empty() ? std::pair<int, int>{-n, 4} : parse_weights(weights_text);
      auto rows = cohomology_table(atlas, kind, w.first, w.second);
      json j = cohomology_json(atlas, kind, w, rows);
      if (as_json)
        std::cout << j.dump(2) << "\n";
      else
        std::cout << cohomology_text(atlas, kind, rows);
      if (!out.empty()) std::ofstream(out) << j.dump(2) << "\n";
      return 0;
    }
    if (run->parsed()) {
      if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
        throw UnknownSuite("unknown suite '" + suite + "'");
      if (!weights_text.empty()) opt.weights = parse_weights(weights_text);
      if (run->count("--kind")) opt.kind = parse_complex_kind(kind_text);
      return run_report(suite, atlas_arg, opt, out, [&](const Atlas& a) { return run_suite(suite, a, opt); });
    }
    if (fx->parsed()) {
      auto list = list_fixtures(fixture_n);
      if (as_json) {
        json j = json::array();
        for (auto& f : list)
          j.push_back(json{{"name", f.name}, {"n", f.n}, {"charts", f.charts}, {"nerve_dimension", f.nerve_dimension}});
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << std::left << std::setw(10) << "name" << std::right << std::setw(4) << "n" << std::setw(8) << "charts"
                  << std::setw(7) << "nerve" << "\n";
        for (auto& f : list)
          std::cout << std::left << std::setw(10) << f.name << std::right << std::setw(4) << f.n << std::setw(8) << f.charts
                    << std::setw(7) << f.nerve_dimension << "\n";
      }
      return 0;
    }
    if (muts->parsed()) {
      for (auto& m : shipped_mutations()) std::cout << m.name << "  (" << m.fixture << ")  " << m.description << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
