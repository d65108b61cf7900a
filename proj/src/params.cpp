#include "wcells/params.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "wcells/error.hpp"

namespace wcells {

namespace {

using Json = nlohmann::ordered_json;

const GenSet kRS{Gen::r, Gen::s}, kST{Gen::s, Gen::t}, kRT{Gen::r, Gen::t};

int sign(const Rational& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

// Every symbol that can occur in the family, in output order.
std::vector<DSymbol> all_symbols() {
  return {DSymbol::longest({}),
          DSymbol::longest({Gen::r}),
          DSymbol::longest({Gen::s}),
          DSymbol::longest({Gen::t}),
          DSymbol::longest(kRS),
          DSymbol::longest(kRT),
          DSymbol::longest(kST),
          DSymbol::light_longest(Gen::r, kRS),
          DSymbol::light_longest(Gen::s, kRS),
          DSymbol::light_longest(Gen::s, kST),
          DSymbol::light_longest(Gen::t, kST)};
}

[[noreturn]] void undefined(const DSymbol& d, Chamber ch) {
  throw Error(Errc::UndefinedInChamber, d.str() + " is not in D where " + ch.str());
}

// L(w_J) for a dihedral pair (x, y) with bond M, as a form in (x, y) coefficients.
std::pair<Rational, Rational> longest_coeffs(int M, bool equal_weights, const DSymbol& d, Chamber ch) {
  if (M == kInfinity) undefined(d, ch);
  if (M % 2 == 0) return {M / 2, M / 2};
  if (!equal_weights) undefined(d, ch);
  return {(M + 1) / 2, (M - 1) / 2};
}

// A x + B y + C = 0 in the (a/b, c/b) plane.
struct Line {
  Rational A, B, C;
};

Line line_of(const LinearForm& f) { return {f.alpha, f.gamma, f.beta}; }

std::optional<Point2> intersect(const Line& p, const Line& q) {
  const Rational det = p.A * q.B - q.A * p.B;
  if (det == 0) return std::nullopt;
  return Point2{(p.B * q.C - q.B * p.C) / det, (q.A * p.C - p.A * q.C) / det};
}

// Points of a line indexed by x, or by y when the line is vertical.
struct Param {
  Line l;
  bool by_x() const { return l.B != 0; }
  Point2 at(const Rational& t) const {
    if (by_x()) return {t, -(l.A * t + l.C) / l.B};
    return {-l.C / l.A, t};
  }
  Rational of(const Point2& p) const { return by_x() ? p.x : p.y; }
};

std::string sign_text(int s, const char* lhs, const char* rhs) {
  return std::string(lhs) + (s > 0 ? ">" : (s < 0 ? "<" : "=")) + rhs;
}

Json rational_json(const Rational& x) { return to_string(x); }

Rational parse_rational(const std::string& s) {
  using boost::multiprecision::cpp_int;
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(cpp_int(s));
  return Rational(cpp_int(s.substr(0, slash)), cpp_int(s.substr(slash + 1)));
}

double to_double(const Rational& x) { return x.convert_to<double>(); }

Json point_json(const Point2& p) { return Json{{"x", to_string(p.x)}, {"y", to_string(p.y)}}; }

Point2 point_from(const Json& j) { return {parse_rational(j.at("x")), parse_rational(j.at("y"))}; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string to_string(const Rational& x) { return x.str(); }

LinearForm LinearForm::normalized() const {
  if (is_zero()) return *this;
  using boost::multiprecision::cpp_int;
  cpp_int den = 1, g = 0;
  for (const auto& v : {alpha, beta, gamma}) den = boost::multiprecision::lcm(den, denominator(v));
  for (const auto& v : {alpha, beta, gamma}) g = boost::multiprecision::gcd(g, cpp_int(numerator(v) * den / denominator(v)));
  LinearForm out{alpha * den / g, beta * den / g, gamma * den / g};
  const Rational lead = out.alpha != 0 ? out.alpha : (out.beta != 0 ? out.beta : out.gamma);
  if (lead < 0) out = {-out.alpha, -out.beta, -out.gamma};
  return out;
}

std::string LinearForm::str() const {
  std::string out;
  for (auto [v, name] : {std::pair{alpha, "a"}, std::pair{beta, "b"}, std::pair{gamma, "c"}}) {
    if (v == 0) continue;
    const Rational mag = v < 0 ? -v : v;
    if (out.empty()) out += v < 0 ? "-" : "";
    else out += v < 0 ? " - " : " + ";
    if (mag != 1) out += to_string(mag);
    out += name;
  }
  return out.empty() ? "0" : out;
}

Chamber Chamber::at(const Rational& a, const Rational& b, const Rational& c) { return {sign(a - b), sign(c - b)}; }

std::string Chamber::str() const { return sign_text(ab, "a", "b") + " & " + sign_text(cb, "c", "b"); }

LinearForm aprime_form(const DSymbol& d, Bonds bonds, Chamber ch) {
  if (d.J.empty()) return {};
  if (d.J.size() == 1) {
    const Gen g = d.J.members()[0];
    return {int(g == Gen::r), int(g == Gen::s), int(g == Gen::t)};
  }
  if (d.J == kRT) {
    if (d.light) undefined(d, ch);
    return {1, 0, 1};
  }
  const bool rs = d.J == kRS;
  const int M = rs ? bonds.m_rs : bonds.m_st;
  if (!d.light) {
    auto [hi, lo] = longest_coeffs(M, (rs ? ch.ab : ch.cb) == 0, d, ch);
    // the odd case starts and ends with the outer generator; equal weights make the order moot
    return rs ? LinearForm{hi, lo, 0} : LinearForm{0, hi, lo};
  }
  if (M == kInfinity || M % 2 != 0 || M < 4) undefined(d, ch);
  const Rational k = M / 2;
  // a'(x w_J) = L(y) + (k - 1)(L(y) - L(x)) = k L(y) - (k - 1) L(x), with x the lighter generator
  if (rs && *d.light == Gen::r && ch.ab < 0) return {-(k - 1), k, 0};
  if (rs && *d.light == Gen::s && ch.ab > 0) return {k, -(k - 1), 0};
  if (!rs && *d.light == Gen::s && ch.cb > 0) return {0, -(k - 1), k};
  if (!rs && *d.light == Gen::t && ch.cb < 0) return {0, k, -(k - 1)};
  undefined(d, ch);
}

std::vector<DSymbol> chamber_symbols(Bonds bonds, Chamber chamber) {
  std::vector<DSymbol> out;
  for (const auto& d : all_symbols()) {
    try {
      aprime_form(d, bonds, chamber);
      out.push_back(d);
    } catch (const Error& e) {
      if (e.code() != Errc::UndefinedInChamber) throw;
    }
  }
  return out;
}

Weights scaled_weights(const Rational& a, const Rational& b, const Rational& c) {
  if (a <= 0 || b <= 0 || c <= 0) throw Error(Errc::InvalidWeights, "weights must be positive");
  using boost::multiprecision::cpp_int;
  cpp_int den = 1, g = 0;
  for (const auto& v : {a, b, c}) den = boost::multiprecision::lcm(den, denominator(v));
  std::array<cpp_int, 3> n;
  for (int i = 0; i < 3; ++i) {
    const Rational& v = i == 0 ? a : (i == 1 ? b : c);
    n[i] = numerator(v) * den / denominator(v);
    g = boost::multiprecision::gcd(g, n[i]);
  }
  return {static_cast<long long>(n[0] / g), static_cast<long long>(n[1] / g), static_cast<long long>(n[2] / g)};
}

std::map<long long, std::vector<DSymbol>> d_levels(const CoxeterSystem& sys, const Weights& L) {
  L.validate(sys);
  std::map<long long, std::vector<DSymbol>> out;
  for (const auto& d : d_symbols(sys, L)) out[*aprime(d, sys, L)].push_back(d);
  return out;
}

std::vector<Rational> critical_values_1d(int m, int k) {
  const Bonds bonds{2 * m, k};
  std::set<Rational> out;
  for (int ab : {-1, 0, 1}) {
    const Chamber ch{ab, 0};
    const auto ds = chamber_symbols(bonds, ch);
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (std::size_t j = i + 1; j < ds.size(); ++j) {
        const auto diff = aprime_form(ds[i], bonds, ch) - aprime_form(ds[j], bonds, ch);
        const Rational slope = diff.alpha, offset = diff.beta + diff.gamma;  // b = c = 1
        if (slope == 0) continue;
        const Rational x = -offset / slope;
        if (x <= 0 || !(Chamber::at(x, 1, 1) == ch)) continue;
        if (classify_pair(ds[i], ds[j], bonds.system(), scaled_weights(x, 1, 1)) == CellVerdict::same) out.insert(x);
      }
  }
  return {out.begin(), out.end()};
}

std::vector<CriticalLocus> critical_lines_2d(int m, int n) {
  const Bonds bonds{2 * m, 2 * n};
  const auto syms = all_symbols();
  std::vector<CriticalLocus> out;
  auto form_anywhere = [&](const DSymbol& d) -> std::optional<LinearForm> {
    for (int ab : {-1, 0, 1})
      for (int cb : {-1, 0, 1}) try {
          return aprime_form(d, bonds, {ab, cb});
        } catch (const Error&) {
        }
    return std::nullopt;
  };
  for (std::size_t i = 0; i < syms.size(); ++i)
    for (std::size_t j = i + 1; j < syms.size(); ++j) {
      const auto f1 = form_anywhere(syms[i]), f2 = form_anywhere(syms[j]);
      if (!f1 || !f2) continue;
      const LinearForm diff = *f1 - *f2;
      if (diff.alpha == 0 && diff.gamma == 0) continue;
      const Param P{line_of(diff)};

      // open parameter interval inside the quadrant x > 0, y > 0
      Rational lo = 0;
      std::optional<Rational> hi;
      if (P.by_x()) {
        const Rational slope = -P.l.A / P.l.B, y0 = -P.l.C / P.l.B;  // y = slope x + y0
        if (slope == 0) {
          if (y0 <= 0) continue;
        } else {
          const Rational root = -y0 / slope;
          if (slope > 0) lo = std::max(lo, root);
          else if (root <= 0) continue;
          else hi = root;
        }
      } else if (-P.l.C / P.l.A <= 0) {
        continue;
      }

      // breakpoints: a = b, c = b and a + c = a'(d1)
      std::vector<Rational> cuts;
      const LinearForm sum_minus_n = LinearForm{1, 0, 1} - *f1;
      for (const Line& other : {Line{1, 0, -1}, Line{0, 1, -1}, line_of(sum_minus_n)})
        if (auto p = intersect(P.l, other)) {
          const Rational t = P.of(*p);
          if (t > lo && (!hi || t < *hi)) cuts.push_back(t);
        }
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

      std::vector<Rational> ends{lo};
      ends.insert(ends.end(), cuts.begin(), cuts.end());
      for (std::size_t s = 0; s < ends.size(); ++s) {
        const bool last = s + 1 == ends.size();
        std::optional<Rational> end = last ? hi : std::optional<Rational>(ends[s + 1]);
        const Rational t = end ? Rational((ends[s] + *end) / 2) : Rational(ends[s] + 1);
        const Point2 p = P.at(t);
        const Chamber ch = Chamber::at(p.x, 1, p.y);
        LinearForm g1, g2;
        try {
          g1 = aprime_form(syms[i], bonds, ch);
          g2 = aprime_form(syms[j], bonds, ch);
        } catch (const Error&) {
          continue;  // one of the pair is absent on this segment
        }
        CriticalLocus loc{syms[i], syms[j], diff.normalized(), P.at(ends[s]), std::nullopt, p, "", {}, ""};
        if (end) loc.to = P.at(*end);
        const Rational N = g1.eval(p.x, 1, p.y);
        loc.chamber = ch.str() + " & " + sign_text(sign(p.x + p.y - N), "a+c", "N");
        loc.verdict = classify_pair(syms[i], syms[j], bonds.system(), scaled_weights(p.x, 1, p.y), &loc.rule);
        out.push_back(std::move(loc));
      }
    }
  return out;
}

std::vector<TriplePoint> triple_points(int m, int n) {
  const Bonds bonds{2 * m, 2 * n};
  std::vector<Line> lines;
  const auto syms = all_symbols();
  std::set<std::tuple<Rational, Rational, Rational>> seen_forms;
  for (int ab : {-1, 0, 1})
    for (int cb : {-1, 0, 1}) {
      const auto ds = chamber_symbols(bonds, {ab, cb});
      for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t j = i + 1; j < ds.size(); ++j) {
          const auto f = (aprime_form(ds[i], bonds, {ab, cb}) - aprime_form(ds[j], bonds, {ab, cb})).normalized();
          if ((f.alpha != 0 || f.gamma != 0) && seen_forms.insert({f.alpha, f.beta, f.gamma}).second)
            lines.push_back(line_of(f));
        }
    }
  std::set<Point2> points;
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j)
      if (auto p = intersect(lines[i], lines[j]); p && p->x > 0 && p->y > 0) points.insert(*p);

  std::vector<TriplePoint> out;
  const CoxeterSystem sys = bonds.system();
  for (const auto& p : points) {
    const Weights L = scaled_weights(p.x, 1, p.y);
    for (const auto& [level, ds] : d_levels(sys, L))
      if (ds.size() >= 3) out.push_back({p, level, L, ds});
  }
  return out;
}

ExportFormat parse_export_format(std::string_view name) {
  if (name == "svg") return ExportFormat::svg;
  if (name == "csv") return ExportFormat::csv;
  if (name == "json") return ExportFormat::json;
  throw Error(Errc::Usage, "unknown export format '" + std::string(name) + "'");
}

std::string render_arrangement(const std::vector<CriticalLocus>& loci, const std::vector<TriplePoint>& points,
                               ExportFormat format) {
  std::ostringstream os;
  if (format == ExportFormat::csv) {
    os << "d1,d2,alpha,beta,gamma,chamber,critical\n";
    for (const auto& l : loci)
      os << l.d1.str() << ',' << l.d2.str() << ',' << to_string(l.form.alpha) << ',' << to_string(l.form.beta) << ','
         << to_string(l.form.gamma) << ',' << l.chamber << ',' << (l.critical() ? "true" : "false") << '\n';
    return os.str();
  }
  if (format == ExportFormat::json) {
    Json jl = Json::array(), jp = Json::array();
    for (const auto& l : loci)
      jl.push_back(Json{{"d1", l.d1.str()},
                        {"d2", l.d2.str()},
                        {"form", {{"alpha", rational_json(l.form.alpha)},
                                  {"beta", rational_json(l.form.beta)},
                                  {"gamma", rational_json(l.form.gamma)}}},
                        {"from", point_json(l.from)},
                        {"to", l.to ? point_json(*l.to) : Json(nullptr)},
                        {"sample", point_json(l.sample)},
                        {"chamber", l.chamber},
                        {"verdict", verdict_name(l.verdict)},
                        {"rule", l.rule}});
    for (const auto& p : points) {
      Json members = Json::array();
      for (const auto& d : p.members) members.push_back(d.str());
      jp.push_back(Json{{"at", point_json(p.at)}, {"level", p.level}, {"weights", p.weights.label()}, {"members", members}});
    }
    return Json{{"loci", jl}, {"points", jp}}.dump(2) + "\n";
  }

  // SVG: view box [0, span]^2 in (a/b, c/b) coordinates
  double span = 5;
  for (const auto& p : points) span = std::max({span, std::ceil(to_double(p.at.x)) + 1,
                                                std::ceil(to_double(p.at.y)) + 1});
  const double px = 500, margin = 40, scale = px / span;
  auto X = [&](double x) { return fmt(margin + x * scale); };
  auto Y = [&](double y) { return fmt(margin + px - y * scale); };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px + 2 * margin << "\" height=\"" << px + 2 * margin
     << "\">\n";
  os << "  <line x1=\"" << X(0) << "\" y1=\"" << Y(0) << "\" x2=\"" << X(span) << "\" y2=\"" << Y(0)
     << "\" stroke=\"black\"/>\n";
  os << "  <line x1=\"" << X(0) << "\" y1=\"" << Y(0) << "\" x2=\"" << X(0) << "\" y2=\"" << Y(span)
     << "\" stroke=\"black\"/>\n";
  os << "  <text x=\"" << X(span) << "\" y=\"" << fmt(margin + px + 20) << "\">a/b</text>\n";
  os << "  <text x=\"" << fmt(margin - 30) << "\" y=\"" << Y(span) << "\">c/b</text>\n";
  for (const auto& l : loci) {
    double x0 = to_double(l.from.x), y0 = to_double(l.from.y), x1, y1;
    if (l.to) {
      x1 = to_double(l.to->x);
      y1 = to_double(l.to->y);
    } else {
      // ray through the sample point, long enough to leave the view
      const double sx = to_double(l.sample.x), sy = to_double(l.sample.y);
      const double dx = sx - x0, dy = sy - y0, len = std::hypot(dx, dy);
      x1 = x0 + dx / len * 4 * span;
      y1 = y0 + dy / len * 4 * span;
    }
    // clip to the view box (Liang-Barsky)
    double t0 = 0, t1 = 1;
    const double dx = x1 - x0, dy = y1 - y0;
    bool visible = true;
    for (auto [p, q] : {std::pair{-dx, x0}, std::pair{dx, span - x0}, std::pair{-dy, y0}, std::pair{dy, span - y0}}) {
      if (p == 0) {
        if (q < 0) visible = false;
        continue;
      }
      const double r = q / p;
      if (p < 0) t0 = std::max(t0, r);
      else t1 = std::min(t1, r);
    }
    if (!visible || t0 >= t1) continue;
    os << "  <line x1=\"" << X(x0 + t0 * dx) << "\" y1=\"" << Y(y0 + t0 * dy) << "\" x2=\"" << X(x0 + t1 * dx)
       << "\" y2=\"" << Y(y0 + t1 * dy) << "\" stroke=\"" << (l.critical() ? "black" : "gray") << "\""
       << (l.critical() ? "" : " stroke-dasharray=\"4 3\"") << "><title>" << l.d1.str() << " = " << l.d2.str()
       << "</title></line>\n";
  }
  for (const auto& p : points) {
    const double x = to_double(p.at.x), y = to_double(p.at.y);
    os << "  <circle cx=\"" << X(x) << "\" cy=\"" << Y(y) << "\" r=\"3\"/>\n";
    os << "  <text x=\"" << fmt(margin + x * scale + 5) << "\" y=\"" << fmt(margin + px - y * scale - 5) << "\">("
       << to_string(p.at.x) << "," << to_string(p.at.y) << ")</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void export_arrangement(const std::vector<CriticalLocus>& loci, const std::vector<TriplePoint>& points,
                        ExportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << render_arrangement(loci, points, format);
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

std::vector<CriticalLocus> loci_from_json(const std::string& text) {
  std::vector<CriticalLocus> out;
  try {
    const auto j = Json::parse(text);
    for (const auto& l : j.at("loci")) {
      CriticalLocus loc{DSymbol::parse(l.at("d1").get<std::string>()),
                        DSymbol::parse(l.at("d2").get<std::string>()),
                        {parse_rational(l.at("form").at("alpha")), parse_rational(l.at("form").at("beta")),
                         parse_rational(l.at("form").at("gamma"))},
                        point_from(l.at("from")),
                        std::nullopt,
                        point_from(l.at("sample")),
                        l.at("chamber"),
                        l.at("verdict") == "same" ? CellVerdict::same : CellVerdict::different,
                        l.at("rule")};
      if (!l.at("to").is_null()) loc.to = point_from(l.at("to"));
      out.push_back(std::move(loc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::CacheParse, std::string("arrangement JSON: ") + e.what());
  }
  return out;
}

}  // namespace wcells
