#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "wcells/afun.hpp"
#include "wcells/cells.hpp"
#include "wcells/dihedral.hpp"
#include "wcells/error.hpp"
#include "wcells/hecke.hpp"
#include "wcells/params.hpp"
#include "wcells/quotient.hpp"

namespace wcells::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Every flag of every subcommand; each subcommand registers the ones it reads.
struct Opts {
  std::string system = "2,4,5";
  std::string weights = "1,1,1";
  int radius = 4;
  std::optional<int> horizon;
  std::optional<int> reach;
  std::string cache_dir = ".wcells-cache";
  bool no_cache = false;
  int threads = 1;
  bool json = false;
  std::string output;

  std::string w, y, x;
  std::string basis = "T";
  std::optional<long long> level;
  std::string d;
  std::vector<std::string> checks;
  std::string case_id;
  bool mirrored = false, transposed = false;
  int samples = 32;
  std::string m_label, lemma;
  std::optional<long long> ls, lt;
  std::string mode = "1d";
  int m = 2, k = 5, n = 3;
  std::string what = "arrangement";
  std::string format = "svg";

  bool system_given = false;  // set after parsing
};

struct Outcome {
  Json result;
  std::string text;
  bool pass = true;
};

// Groups and algebras built on demand, with the KL cache attached.
class Context {
public:
  explicit Context(const Opts& o, std::ostream& err) : o_(o), err_(err) {}

  CoxeterSystem system() const { return CoxeterSystem::parse(o_.system); }
  Weights weights() const {
    const Weights L = Weights::parse(o_.weights);
    L.validate(system());
    return L;
  }
  const CoxeterGroup& group(int horizon) {
    if (!W_) {
      if (horizon > 255) throw Error(Errc::HorizonExceeded, "horizon " + std::to_string(horizon) + " above 255");
      W_ = std::make_unique<CoxeterGroup>(system(), o_.horizon.value_or(horizon));
    }
    return *W_;
  }
  HeckeAlgebra& algebra(int horizon) {
    if (!H_) {
      H_ = std::make_unique<HeckeAlgebra>(group(horizon), weights());
      if (!o_.no_cache) {
        cache_file_ = fs::path(o_.cache_dir) / cache_name(H_->fingerprint());
        if (fs::exists(*cache_file_)) {
          cache_state_ = H_->load_cache(*cache_file_) ? "warm" : "rebuilt";
          if (cache_state_ == "rebuilt") err_ << "cache " << cache_file_->string() << " ignored: " << H_->last_cache_error() << '\n';
        } else {
          cache_state_ = "cold";
        }
      }
    }
    return *H_;
  }
  const Cells& cells(int horizon) {
    if (!C_) C_ = std::make_unique<Cells>(group(horizon), weights());
    return *C_;
  }

  // Persists new KL columns and returns the counters for the report.
  Json finish() {
    if (!H_) return Json();
    if (cache_file_ && H_->kl_solves() > 0) {
      std::error_code ec;
      fs::create_directories(cache_file_->parent_path(), ec);
      if (ec) throw Error(Errc::IoError, "cannot create cache dir " + cache_file_->parent_path().string());
      H_->save_cache(*cache_file_);
    }
    err_ << "kl_solves: " << H_->kl_solves() << " (cache " << cache_state_ << ")\n";
    return Json{{"kl_solves", H_->kl_solves()}, {"cache", cache_state_}};
  }

private:
  static std::string cache_name(const std::string& fingerprint) {
    std::string out = "kl-";
    for (char c : fingerprint) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out + ".jsonl";
  }

  const Opts& o_;
  std::ostream& err_;
  std::unique_ptr<CoxeterGroup> W_;
  std::unique_ptr<HeckeAlgebra> H_;
  std::unique_ptr<Cells> C_;
  std::optional<fs::path> cache_file_;
  std::string cache_state_ = "off";
};

// Results are stored by index, so the order does not depend on scheduling.
template <class T>
std::vector<T> parallel_map(std::size_t n, int threads, const std::function<T(std::size_t)>& f) {
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < std::max(1, threads); ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

int max_finite_bond(const CoxeterSystem& sys) {
  int best = 2;
  for (int m : {sys.m_rt(), sys.m_rs(), sys.m_st()})
    if (m != kInfinity) best = std::max(best, m);
  return best;
}

// Cells needs every candidate d inside the group.
int cells_horizon(const CoxeterSystem& sys, int need) { return std::max({need, max_finite_bond(sys), 12}); }

Element parse_element(const CoxeterGroup& W, const std::string& word, const char* what) {
  if (word.empty()) throw Error(Errc::Usage, std::string("--") + what + " is required");
  return W.normal_form(word == "e" ? "" : word);
}

int word_length_bound(const std::string& word) { return word == "e" ? 0 : static_cast<int>(word.size()); }

// A D element given as a symbol ("w_rs", "rt") or as a word.
Element parse_d(const CoxeterGroup& W, const Cells& C, const std::string& text) {
  try {
    return C.element(DSymbol::parse(text)).elem;
  } catch (const Error&) {
    const Element d = parse_element(W, text, "d");
    if (!C.find(d)) throw Error(Errc::NotInD, W.name(d) + " is not in D");
    return d;
  }
}

std::string join(const std::vector<std::string>& xs, const char* sep = " ") {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : sep) + x;
  return out;
}

// ---------------------------------------------------------------------------------------------

Outcome cmd_ball(const Opts& o, Context& ctx) {
  const auto& W = ctx.group(o.radius);
  Outcome out;
  Json elems = Json::array();
  for (Element w : W.ball(o.radius)) {
    elems.push_back({{"word", W.name(w)}, {"length", W.length(w)}});
    out.text += std::to_string(W.length(w)) + ' ' + W.name(w) + '\n';
  }
  out.result = {{"size", W.ball_size(o.radius)}, {"elements", elems}};
  out.text += "size " + std::to_string(W.ball_size(o.radius)) + '\n';
  return out;
}

Outcome cmd_kl(const Opts& o, Context& ctx) {
  auto& H = ctx.algebra(std::max(word_length_bound(o.w), word_length_bound(o.y)));
  const auto& W = H.group();
  const Element w = parse_element(W, o.w, "w");
  Outcome out;
  Json polys = Json::array();
  auto emit = [&](Element y) {
    const Laurent p = H.kl_poly(y, w);
    polys.push_back({{"y", W.name(y)}, {"p", p.str()}});
    out.text += "p(" + W.name(y) + ", " + W.name(w) + ") = " + p.str() + '\n';
  };
  if (!o.y.empty()) {
    emit(parse_element(W, o.y, "y"));
  } else {
    for (const auto& [y, p] : H.c_basis(w).coords()) emit(y);
  }
  out.result = {{"w", W.name(w)}, {"polynomials", polys}};
  return out;
}

Outcome cmd_cbasis(const Opts& o, Context& ctx) {
  auto& H = ctx.algebra(word_length_bound(o.w));
  const auto& W = H.group();
  const Element w = parse_element(W, o.w, "w");
  const auto& c = H.c_basis(w);
  Json terms = Json::array();
  for (const auto& [y, p] : c.coords()) terms.push_back({{"T", W.name(y)}, {"coeff", p.str()}});
  return {{{"w", W.name(w)}, {"terms", terms}}, "C_" + W.name(w) + " = " + c.str(W) + '\n', true};
}

Outcome cmd_mult(const Opts& o, Context& ctx) {
  if (o.basis != "T" && o.basis != "C") throw Error(Errc::Usage, "--basis must be T or C");
  auto& H = ctx.algebra(word_length_bound(o.x) + word_length_bound(o.y));
  const auto& W = H.group();
  const Element x = parse_element(W, o.x, "x"), y = parse_element(W, o.y, "y");
  const HeckeElt prod = o.basis == "T" ? H.t_mult(x, y) : H.c_product(x, y);
  Json terms = Json::array();
  for (const auto& [z, c] : prod.coords()) terms.push_back({{o.basis, W.name(z)}, {"coeff", c.str()}});
  const std::string lhs = o.basis + "_" + W.name(x) + " " + o.basis + "_" + W.name(y);
  return {{{"x", W.name(x)}, {"y", W.name(y)}, {"basis", o.basis}, {"terms", terms}},
          lhs + " = " + prod.str(W, o.basis.c_str()) + '\n', true};
}

Outcome cmd_afun(const Opts& o, Context& ctx) {
  auto& H = ctx.algebra(std::max(2 * o.radius, max_finite_bond(ctx.system())));
  const auto& W = H.group();
  const HProducts P(H, o.radius);
  std::unique_ptr<Cells> cells;
  if (in_hyperbolic_family(W.system())) cells = std::make_unique<Cells>(W, ctx.weights());
  std::vector<Element> targets;
  if (!o.w.empty()) {
    const Element w = parse_element(W, o.w, "w");
    if (!P.in_ball(w)) throw Error(Errc::HorizonExceeded, W.name(w) + " is outside ball(" + std::to_string(o.radius) + ")");
    targets.push_back(w);
  } else {
    targets = P.ball();
  }
  Outcome out;
  Json rows = Json::array();
  for (Element w : targets) {
    const auto prof = a_profile(P, cells.get(), w);
    Json row{{"w", W.name(w)},
             {"a_ball", prof.a_ball.value},
             {"witness", {W.name(prof.a_ball.witness.first), W.name(prof.a_ball.witness.second)}}};
    row["a_pred"] = prof.a_pred ? Json(*prof.a_pred) : Json();
    row["delta"] = prof.dn.delta;
    row["n"] = prof.dn.n;
    rows.push_back(row);
    out.text += W.name(w) + " a_ball=" + std::to_string(prof.a_ball.value) + " witness=(" +
                W.name(prof.a_ball.witness.first) + ", " + W.name(prof.a_ball.witness.second) + ")" +
                (prof.a_pred ? " a_pred=" + std::to_string(*prof.a_pred) : "") + " delta=" + std::to_string(prof.dn.delta) +
                " n=" + std::to_string(prof.dn.n) + '\n';
    if (prof.a_pred && prof.a_ball.value > *prof.a_pred) out.pass = false;
  }
  out.result = {{"radius", o.radius}, {"profiles", rows}};
  return out;
}

Outcome cmd_dset(const Opts& o, Context& ctx) {
  const auto& C = ctx.cells(cells_horizon(ctx.system(), 0));
  const auto& W = C.group();
  Outcome out;
  Json levels = Json::array();
  for (const auto& [N, ds] : C.d_levels()) {
    std::vector<std::string> words, symbols;
    for (const auto& d : ds) {
      words.push_back(W.name(d.elem));
      symbols.push_back(d.symbol.str());
    }
    levels.push_back({{"N", N}, {"elements", words}, {"symbols", symbols}});
    out.text += "D_" + std::to_string(N) + " = {" + join(words, ", ") + "}\n";
  }
  (void)o;
  out.result = {{"levels", levels}};
  return out;
}

Json decomposition_json(const CoxeterGroup& W, Element w, const Decomposition& dec) {
  return {{"w", W.name(w)}, {"b", W.name(dec.b)}, {"d", W.name(dec.d)}, {"y", W.name(dec.y)}};
}

Outcome cmd_decompose(const Opts& o, Context& ctx) {
  const auto& C = ctx.cells(cells_horizon(ctx.system(), word_length_bound(o.w)));
  const auto& W = C.group();
  const Element w = parse_element(W, o.w, "w");
  const auto dec = C.decompose(w);
  return {decomposition_json(W, w, dec),
          W.name(w) + " = " + W.name(dec.b) + " . " + W.name(dec.d) + " . " + W.name(dec.y) + '\n', true};
}

Outcome cmd_cells(const Opts& o, Context& ctx) {
  const auto& C = ctx.cells(cells_horizon(ctx.system(), 2 * o.radius));
  const std::string csv = C.cell_table_csv(o.radius);
  Json rows = Json::array();
  std::stringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
    rows.push_back({{"word", f[0]}, {"length", std::stoi(f[1])}, {"a_pred", std::stoll(f[2])}, {"d", f[3]},
                    {"b", f[4]}, {"y", f[5]}, {"cell_id", std::stoi(f[6])}});
  }
  return {{{"radius", o.radius}, {"rows", rows}}, csv, true};
}

// ---------------------------------------------------------------------------------------------

std::string report_text(const PReport& r) {
  std::string out = "P" + std::to_string(r.k) + ' ' + (r.pass ? "pass" : "FAIL") + " radius=" + std::to_string(r.radius) +
                    " instances=" + std::to_string(r.instances) + "  " + r.statement + '\n';
  if (r.counterexample) out += "  counterexample: " + *r.counterexample + '\n';
  for (const auto& c : r.caveats) out += "  caveat: " + c + '\n';
  return out;
}

Outcome verify_p(const Opts& o, Context& ctx, const std::vector<int>& ks) {
  auto& H = ctx.algebra(std::max(2 * o.radius + 2, max_finite_bond(ctx.system())));
  const auto& W = H.group();
  std::unique_ptr<HProducts> exact_table;
  std::unique_ptr<Cells> cells;
  ASource a;
  if (W.system().finite()) {
    exact_table = std::make_unique<HProducts>(H, o.radius);
    a = exact_a(*exact_table);
  } else if (in_hyperbolic_family(W.system())) {
    cells = std::make_unique<Cells>(W, ctx.weights());
    a = predicted_a(*cells);
  }
  const PChecker checker(H, o.radius, a, o.reach);
  Outcome out;
  Json reports = Json::array();
  for (int k : ks) {
    const auto rep = checker.check(k);
    reports.push_back(to_json(rep));
    out.text += report_text(rep);
    out.pass = out.pass && rep.pass;
  }
  out.result = {{"check", "P"}, {"reach", checker.reach()}, {"reports", reports}};
  return out;
}

Outcome verify_bound(const Opts& o, Context& ctx) {
  const auto& C = ctx.cells(cells_horizon(ctx.system(), 2 * o.radius));
  auto& H = ctx.algebra(0);
  long long N;
  if (o.level) N = *o.level;
  else if (!o.d.empty()) N = C.find(parse_d(C.group(), C, o.d))->aprime;
  else throw Error(Errc::Usage, "bound needs --level or --d");
  const Quotient Q(H, C, N);
  const auto rep = check_bound(Q, o.radius);
  std::string text = std::string("bound ") + (rep.pass ? "pass" : "FAIL") + " N=" + std::to_string(N) +
                     " radius=" + std::to_string(o.radius) + " pairs=" + std::to_string(rep.pairs_checked) +
                     " equality=" + std::to_string(rep.equality_cases) + '\n';
  if (!rep.reason.empty()) text += "  " + rep.reason + '\n';
  return {to_json(rep, C.group()), text, rep.pass};
}

Outcome verify_strict(const Opts& o, Context& ctx) {
  const auto sys = ctx.system();
  const auto& C = ctx.cells(cells_horizon(sys, 2 * o.radius + 2 * max_finite_bond(sys)));
  auto& H = ctx.algebra(0);
  const Element d = parse_d(C.group(), C, o.d);
  const Quotient Q(H, C, C.find(d)->aprime);
  const auto rep = check_strict(Q, d, o.radius);
  std::string text = std::string("strict ") + (rep.pass ? "pass" : "FAIL") + " d=" + C.group().name(d) +
                     " N=" + std::to_string(rep.level) + " radius=" + std::to_string(o.radius) +
                     " triples=" + std::to_string(rep.triples_checked) + " strict=" + std::to_string(rep.strict_checked) + '\n';
  if (!rep.reason.empty()) text += "  " + rep.reason + '\n';
  return {to_json(rep, C.group()), text, rep.pass};
}

Outcome verify_length(const Opts& o, Context& ctx) {
  const auto sys = ctx.system();
  const auto& C = ctx.cells(cells_horizon(sys, 2 * o.radius + 2 * max_finite_bond(sys)));
  const auto& W = C.group();
  std::vector<Element> ds;
  if (!o.d.empty()) ds.push_back(parse_d(W, C, o.d));
  else
    for (const auto& d : C.d_set()) ds.push_back(d.elem);
  Outcome out;
  Json reps = Json::array();
  for (Element d : ds) {
    const auto rep = C.length_additivity_check(d, o.radius);
    Json j{{"d", W.name(d)}, {"result", rep.pass ? "pass" : "fail"}, {"pairs_checked", rep.pairs_checked},
           {"pairs_beyond_horizon", rep.pairs_beyond_horizon}};
    if (rep.counterexample) j["counterexample"] = {W.name(rep.counterexample->first), W.name(rep.counterexample->second)};
    reps.push_back(j);
    out.text += "length " + std::string(rep.pass ? "pass" : "FAIL") + " d=" + W.name(d) +
                " pairs=" + std::to_string(rep.pairs_checked) + '\n';
    out.pass = out.pass && rep.pass;
  }
  out.result = {{"check", "length"}, {"radius", o.radius}, {"reports", reps}};
  return out;
}

Outcome verify_expansion_cmd(const Opts& o, Context& ctx) {
  std::vector<ExpansionReport> reps;
  if (o.case_id.empty()) {
    reps = verify_all_expansions(o.samples);
  } else {
    // on the given system, or on every default system of the case
    const auto systems = o.system_given ? std::vector<CoxeterSystem>{ctx.system()} : expansion_default_systems(o.case_id);
    for (const auto& sys : systems) {
      ExpansionParams p;
      p.system = sys;
      if (o.weights != "1,1,1") p.weights = ctx.weights();
      p.mirrored = o.mirrored;
      p.transposed = o.transposed;
      p.max_samples = o.samples;
      reps.push_back(verify_expansion(o.case_id, p));
    }
  }
  Outcome out;
  Json js = Json::array();
  for (const auto& r : reps) {
    js.push_back(to_json(r));
    out.text += r.case_id + ' ' + (r.pass() ? "pass" : "FAIL") + " system=" + r.params.system.label() +
                (r.params.mirrored ? " mirrored" : "") + (r.params.transposed ? " transposed" : "") +
                " samples=" + std::to_string(r.samples_run) + '\n';
    for (const auto& f : r.failures) out.text += "  " + f.sample + ": " + f.reason + '\n';
    out.pass = out.pass && r.pass();
  }
  out.result = {{"check", "expansion"}, {"reports", js}};
  return out;
}

Outcome verify_dihedral_cmd(const Opts& o) {
  std::vector<DihedralCase> jobs;
  if (o.m_label.empty()) {
    jobs = dihedral_grid();
  } else {
    const int m = o.m_label == "inf" ? kInfinity : std::stoi(o.m_label);
    const long long Ls = o.ls.value_or(1), Lt = o.lt.value_or(1);
    if (!o.lemma.empty()) jobs.push_back({m, Ls, Lt, o.lemma});
    else
      for (const auto& id : dihedral_lemma_ids())
        if (dihedral_applies(id, m)) jobs.push_back({m, Ls, Lt, id});
  }
  const auto reps = parallel_map<DihedralReport>(jobs.size(), o.threads, [&](std::size_t i) {
    return dihedral_sweep(jobs[i].m, jobs[i].Ls, jobs[i].Lt, jobs[i].lemma);
  });
  Outcome out;
  Json js = Json::array();
  for (const auto& r : reps) {
    js.push_back(to_json(r));
    out.text += r.lemma + " m=" + (r.m == kInfinity ? std::string("inf") : std::to_string(r.m)) + " L=(" +
                std::to_string(r.Ls) + "," + std::to_string(r.Lt) + ") " +
                (r.vacuous ? "vacuous" : r.pass ? "pass" : "FAIL") + " cases=" + std::to_string(r.cases_checked) + '\n';
    if (!r.pass) out.text += "  " + r.counterexample + '\n';
    out.pass = out.pass && r.pass;
  }
  out.result = {{"check", "dihedral"}, {"reports", js}};
  return out;
}

Outcome cmd_verify(const Opts& o, Context& ctx) {
  if (o.checks.empty()) throw Error(Errc::Usage, "--check is required");
  std::vector<int> ks;
  for (const auto& c : o.checks) {
    if (c.size() >= 2 && c[0] == 'P' && std::all_of(c.begin() + 1, c.end(), ::isdigit)) {
      const int k = std::stoi(c.substr(1));
      if (k < 1 || k > 15) throw Error(Errc::Usage, "no statement " + c);
      ks.push_back(k);
    }
  }
  if (!ks.empty()) {
    if (ks.size() != o.checks.size()) throw Error(Errc::Usage, "P checks cannot be mixed with other checks");
    return verify_p(o, ctx, ks);
  }
  if (o.checks.size() != 1) throw Error(Errc::Usage, "one non-P check per run");
  const auto& c = o.checks.front();
  if (c == "bound") return verify_bound(o, ctx);
  if (c == "strict") return verify_strict(o, ctx);
  if (c == "length") return verify_length(o, ctx);
  if (c == "expansion") return verify_expansion_cmd(o, ctx);
  if (c == "dihedral") return verify_dihedral_cmd(o);
  throw Error(Errc::Usage, "unknown check '" + c + "'");
}

// ---------------------------------------------------------------------------------------------

std::string point_str(const Point2& p) { return "(" + to_string(p.x) + ", " + to_string(p.y) + ")"; }

Outcome cmd_critical(const Opts& o) {
  Outcome out;
  if (o.mode == "1d") {
    std::vector<std::string> vals;
    for (const auto& v : critical_values_1d(o.m, o.k)) vals.push_back(to_string(v));
    out.result = {{"mode", "1d"}, {"m", o.m}, {"k", o.k}, {"values", vals}};
    out.text = join(vals) + '\n';
  } else if (o.mode == "2d") {
    out.result = Json::parse(render_arrangement(critical_lines_2d(o.m, o.n), {}, ExportFormat::json));
    for (const auto& l : critical_lines_2d(o.m, o.n))
      out.text += l.d1.str() + " ~ " + l.d2.str() + ": " + l.form.str() + " = 0 on " + l.chamber + " from " +
                  point_str(l.from) + (l.to ? " to " + point_str(*l.to) : std::string(" (ray)")) + " " +
                  std::string(l.critical() ? "critical" : "non-critical") + '\n';
  } else if (o.mode == "triples") {
    Json pts = Json::array();
    for (const auto& t : triple_points(o.m, o.n)) {
      std::vector<std::string> members;
      for (const auto& d : t.members) members.push_back(d.str());
      pts.push_back({{"x", to_string(t.at.x)}, {"y", to_string(t.at.y)}, {"N", t.level},
                     {"weights", t.weights.label()}, {"members", members}});
      out.text += point_str(t.at) + " N=" + std::to_string(t.level) + " L=(" + t.weights.label() + ") {" +
                  join(members, ", ") + "}\n";
    }
    out.result = {{"mode", "triples"}, {"m", o.m}, {"n", o.n}, {"points", pts}};
  } else {
    throw Error(Errc::Usage, "--mode must be 1d, 2d or triples");
  }
  return out;
}

Outcome cmd_export(const Opts& o, Context& ctx) {
  Outcome out;
  if (o.what == "arrangement") {
    out.text = render_arrangement(critical_lines_2d(o.m, o.n), triple_points(o.m, o.n), parse_export_format(o.format));
  } else if (o.what == "cells") {
    if (o.format != "csv") throw Error(Errc::Usage, "the cell table exports as csv");
    out.text = ctx.cells(cells_horizon(ctx.system(), 2 * o.radius)).cell_table_csv(o.radius);
  } else {
    throw Error(Errc::Usage, "--what must be arrangement or cells");
  }
  out.result = {{"what", o.what}, {"format", o.format}, {"content", out.text}};
  return out;
}

// ---------------------------------------------------------------------------------------------

void add_common(CLI::App* sub, Opts& o, bool algebra) {
  sub->add_option("--system", o.system, "bonds m_rt,m_rs,m_st (inf allowed)")->capture_default_str();
  sub->add_option("--weights", o.weights, "L(r),L(s),L(t)")->capture_default_str();
  if (algebra) {
    sub->add_option("--horizon", o.horizon, "length bound of the enumerated group");
    sub->add_option("--cache-dir", o.cache_dir, "KL cache directory")->envname(kCacheDirEnv)->capture_default_str();
    sub->add_flag("--no-cache", o.no_cache, "do not read or write the KL cache");
  }
  sub->add_option("--threads", o.threads, "worker threads")->capture_default_str()->check(CLI::Range(1, 256));
  sub->add_flag("--json", o.json, "JSON report instead of text");
  sub->add_option("--output", o.output, "write the report to a file");
}

void add_radius(CLI::App* sub, Opts& o) { sub->add_option("--radius", o.radius, "ball radius")->capture_default_str()->check(CLI::Range(0, 127)); }

// Config file values become flags unless given on the command line; an environment
// override of the cache dir beats the file.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) throw Error(Errc::Usage, "--config needs a file");
  const std::string file = *(it + 1);
  args.erase(it, it + 2);
  std::ifstream in(file);
  if (!in) throw Error(Errc::IoError, "cannot read config " + file);
  Json cfg;
  try {
    cfg = Json::parse(in);
  } catch (const std::exception& e) {
    throw Error(Errc::Usage, "config " + file + ": " + e.what());
  }
  if (!cfg.is_object()) throw Error(Errc::Usage, "config " + file + " must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    if (key == "cache-dir" && std::getenv(kCacheDirEnv)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) args.insert(args.end(), {flag, v.is_string() ? v.get<std::string>() : v.dump()});
    } else {
      args.insert(args.end(), {flag, value.is_string() ? value.get<std::string>() : value.dump()});
    }
  }
  return args;
}

// Integers echo as numbers, everything else as given.
Json config_value(const std::string& v) {
  if (!v.empty() && std::all_of(v.begin() + (v[0] == '-'), v.end(), ::isdigit) && v != "-") return std::stoll(v);
  return v;
}

// The resolved value of every flag of the subcommand.
Json resolved_config(const CLI::App* sub) {
  Json cfg{{"command", sub->get_name()}};
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "help-all") continue;
    if (opt->get_expected_max() == 0) {
      cfg[name] = opt->count() > 0;
    } else if (opt->count() > 0) {
      const auto& res = opt->results();
      if (res.size() == 1) {
        cfg[name] = config_value(res.front());
      } else {
        Json arr = Json::array();
        for (const auto& r : res) arr.push_back(config_value(r));
        cfg[name] = arr;
      }
    } else {
      cfg[name] = opt->get_default_str().empty() ? Json() : config_value(opt->get_default_str());
    }
  }
  return cfg;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Opts o;
  CLI::App app{"Kazhdan-Lusztig cells of rank-three Coxeter groups with unequal parameters", "wcells"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::map<std::string, std::function<Outcome(Context&)>> handlers;
  auto sub = [&](const char* name, const char* desc, bool algebra, std::function<Outcome(Context&)> f) {
    CLI::App* s = app.add_subcommand(name, desc);
    add_common(s, o, algebra);
    handlers[name] = std::move(f);
    return s;
  };

  auto* ball = sub("ball", "elements of ball(R) in (length, ShortLex) order", false, [&](Context& c) { return cmd_ball(o, c); });
  add_radius(ball, o);
  ball->add_option("--horizon", o.horizon, "length bound of the enumerated group");

  auto* kl = sub("kl", "Kazhdan-Lusztig polynomials p_{y,w}", true, [&](Context& c) { return cmd_kl(o, c); });
  kl->add_option("--w", o.w, "element w")->required();
  kl->add_option("--y", o.y, "element y (all y <= w when omitted)");

  auto* cb = sub("cbasis", "C_w in the T basis", true, [&](Context& c) { return cmd_cbasis(o, c); });
  cb->add_option("--w", o.w, "element w")->required();

  auto* mult = sub("mult", "T_x T_y, or C_x C_y in C coordinates", true, [&](Context& c) { return cmd_mult(o, c); });
  mult->add_option("--x", o.x, "left factor")->required();
  mult->add_option("--y", o.y, "right factor")->required();
  mult->add_option("--basis", o.basis, "T or C")->capture_default_str();

  auto* afun = sub("afun", "a_ball, a_pred, Delta and n_w", true, [&](Context& c) { return cmd_afun(o, c); });
  add_radius(afun, o);
  afun->add_option("--w", o.w, "single element (whole ball when omitted)");

  auto* dset = sub("dset", "levels D_N of distinguished elements", false, [&](Context& c) { return cmd_dset(o, c); });
  dset->add_option("--horizon", o.horizon, "length bound of the enumerated group");

  auto* dec = sub("decompose", "w = b.d.y with d in D", false, [&](Context& c) { return cmd_decompose(o, c); });
  dec->add_option("--w", o.w, "element w")->required();
  dec->add_option("--horizon", o.horizon, "length bound of the enumerated group");

  auto* cells = sub("cells", "element to cell table of ball(R) as CSV", false, [&](Context& c) { return cmd_cells(o, c); });
  add_radius(cells, o);
  cells->add_option("--horizon", o.horizon, "length bound of the enumerated group");

  auto* verify = sub("verify", "run a checker; exit 2 on a counterexample", true, [&](Context& c) { return cmd_verify(o, c); });
  add_radius(verify, o);
  verify->add_option("--check", o.checks, "P1..P15, bound, strict, expansion, dihedral or length")->required()->delimiter(',');
  verify->add_option("--reach", o.reach, "ball the preorder paths may pass through (P checks)");
  verify->add_option("--level", o.level, "truncation level N (bound)");
  verify->add_option("--d", o.d, "distinguished element, symbol or word (bound, strict, length)");
  verify->add_option("--case", o.case_id, "expansion case id (all when omitted)");
  verify->add_flag("--mirrored", o.mirrored, "exchange r and t (expansion)");
  verify->add_flag("--transposed", o.transposed, "transpose the product (expansion)");
  verify->add_option("--samples", o.samples, "samples per case (expansion)")->capture_default_str();
  verify->add_option("--m", o.m_label, "dihedral bond, integer or inf (whole grid when omitted)");
  verify->add_option("--ls", o.ls, "dihedral L(s)");
  verify->add_option("--lt", o.lt, "dihedral L(t)");
  verify->add_option("--lemma", o.lemma, "dihedral lemma id");

  auto* crit = sub("critical", "critical values, lines and triple points", false, [&](Context&) { return cmd_critical(o); });
  crit->add_option("--mode", o.mode, "1d, 2d or triples")->capture_default_str();
  crit->add_option("--m", o.m, "m_rs = 2m")->capture_default_str();
  crit->add_option("--k", o.k, "m_st in 1d mode")->capture_default_str();
  crit->add_option("--n", o.n, "m_st = 2n in 2d and triples modes")->capture_default_str();

  auto* exp = sub("export", "arrangement (svg, csv, json) or cell table (csv)", false, [&](Context& c) { return cmd_export(o, c); });
  exp->add_option("--what", o.what, "arrangement or cells")->capture_default_str();
  exp->add_option("--format", o.format, "svg, csv or json")->capture_default_str();
  exp->add_option("--m", o.m, "m_rs = 2m")->capture_default_str();
  exp->add_option("--n", o.n, "m_st = 2n")->capture_default_str();
  add_radius(exp, o);

  try {
    auto args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  CLI::App* chosen = app.get_subcommands().front();
  o.system_given = chosen->get_option("--system")->count() > 0;
  try {
    Context ctx(o, err);
    Outcome res = handlers.at(chosen->get_name())(ctx);
    const Json stats = ctx.finish();
    std::string rendered;
    if (o.json) {
      Json doc{{"config", resolved_config(chosen)}, {"result", res.pass ? "pass" : "fail"}, {"report", res.result}};
      if (!stats.is_null()) doc["stats"] = stats;
      rendered = doc.dump(2) + '\n';
    } else if (chosen->get_name() == "cells" || chosen->get_name() == "export") {
      rendered = res.text;  // file formats stay bare
    } else {
      rendered = "# config " + resolved_config(chosen).dump() + '\n' + res.text;
    }
    if (o.output.empty()) {
      out << rendered;
    } else {
      std::ofstream f(o.output, std::ios::binary | std::ios::trunc);
      if (!f) throw Error(Errc::IoError, "cannot write " + o.output);
      f << rendered;
    }
    return res.pass ? kExitOk : kExitCounterexample;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace wcells::cli
