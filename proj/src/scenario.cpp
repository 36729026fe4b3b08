#include "epilab/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "epilab/csv.hpp"
#include "epilab/slope.hpp"

namespace epilab {

namespace {

using json = nlohmann::json;

struct CheckName {
  CheckKind kind;
  const char* name;
  std::vector<const char*> rows;
};

const std::vector<CheckName>& check_names() {
  static const std::vector<CheckName> names = {
      {CheckKind::Epi, "epi", {"epi"}},
      {CheckKind::SlopeEpi, "slope-epi", {"slope-epi"}},
      {CheckKind::NC, "nc", {"nc"}},
      {CheckKind::NCWeak, "nc-weak", {"nc-weak"}},
      {CheckKind::Attouch, "attouch", {"attouch.i", "attouch.ii", "attouch.iii", "attouch"}},
      {CheckKind::Main,
       "main",
       {"main.i", "main.ii", "main.iii", "main.slope-epi", "main.nc", "main.inf", "main"}},
      {CheckKind::Comparison, "comparison", {"comparison"}},
      {CheckKind::Flow, "flow", {"flow"}},
      {CheckKind::Energy, "energy", {"energy"}},
      {CheckKind::Infimizing, "infimizing", {"infimizing"}},
      {CheckKind::Tightness, "tightness", {"tightness"}},
      {CheckKind::Sandwich, "sandwich", {"sandwich"}},
  };
  return names;
}

std::optional<VerdictStatus> status_from(const std::string& s) {
  for (VerdictStatus v : {VerdictStatus::Holds, VerdictStatus::Fails, VerdictStatus::Inconclusive,
                          VerdictStatus::PreconditionFailed}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

// Strict reader for one JSON object; errors are "path.field: message".
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::Schema, path_ + ": expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& [key, _] : j_.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
        schema(key, "unknown field");
      }
    }
  }

  bool has(const char* name) const { return j_.contains(name); }
  const json& at(const char* name) const {
    if (!j_.contains(name)) schema(name, "missing field");
    return j_[name];
  }
  std::string where(const std::string& name) const { return path_.empty() ? name : path_ + "." + name; }

  [[noreturn]] void schema(const std::string& name, const std::string& what) const {
    fail(ErrorCode::Schema, where(name) + ": " + what);
  }

  std::string string(const char* name) const {
    const json& v = at(name);
    if (!v.is_string()) schema(name, "expected a string");
    return v.get<std::string>();
  }

  double number(const char* name, const ExprVars& vars = {}) const {
    return number_at(at(name), where(name), vars);
  }
  double number_or(const char* name, double dflt) const { return has(name) ? number(name) : dflt; }

  double positive(const char* name, double dflt) const {
    const double v = number_or(name, dflt);
    if (!(v > 0.0)) schema(name, "must be > 0");
    return v;
  }

  static double number_at(const json& v, const std::string& where, const ExprVars& vars = {}) {
    double x = 0.0;
    if (v.is_number()) {
      x = v.get<double>();
    } else if (v.is_string()) {
      try {
        x = eval_expression(v.get<std::string>(), vars);
      } catch (const Error& e) {
        fail(ErrorCode::Schema, where + ": " + e.what());
      }
    } else {
      fail(ErrorCode::Schema, where + ": expected a number or expression string");
    }
    if (!std::isfinite(x)) fail(ErrorCode::Schema, where + ": value is not finite");
    return x;
  }

  static Point point_at(const json& v, int dim, const std::string& where, const ExprVars& vars = {}) {
    Point p(dim);
    if (!v.is_array()) {
      if (dim != 1) fail(ErrorCode::Schema, where + ": expected an array of length " + std::to_string(dim));
      p(0) = number_at(v, where, vars);
      return p;
    }
    if (static_cast<int>(v.size()) != dim) {
      fail(ErrorCode::Schema, where + ": expected an array of length " + std::to_string(dim));
    }
    for (int k = 0; k < dim; ++k) {
      p(k) = number_at(v[static_cast<std::size_t>(k)], where + "[" + std::to_string(k) + "]", vars);
    }
    return p;
  }

  Point point(const char* name, int dim) const { return point_at(at(name), dim, where(name)); }

 private:
  const json& j_;
  std::string path_;
};

std::vector<Index> parse_index_ladder(const json& v, const std::string& where) {
  std::vector<Index> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double x = Reader::number_at(v[i], where + "[" + std::to_string(i) + "]");
      if (x < 1 || x != std::floor(x) || x > 9.0e15) {
        fail(ErrorCode::Schema, where + "[" + std::to_string(i) + "]: expected an integer >= 1");
      }
      out.push_back(static_cast<Index>(x));
    }
  } else if (v.is_object()) {
    const Reader r(v, where);
    if (r.has("geometric")) {
      r.allow({"geometric"});
      const Reader g(v["geometric"], where + ".geometric");
      g.allow({"start", "ratio", "count"});
      const double start = g.number("start");
      const double ratio = g.number("ratio");
      const double count = g.number("count");
      if (start < 1 || ratio <= 1 || count < 1 || count > 64) {
        fail(ErrorCode::Schema, where + ".geometric: need start >= 1, ratio > 1, 1 <= count <= 64");
      }
      for (int k = 0; k < static_cast<int>(count); ++k) {
        out.push_back(static_cast<Index>(std::llround(start * std::pow(ratio, k))));
      }
    } else if (r.has("linear")) {
      r.allow({"linear"});
      const Reader l(v["linear"], where + ".linear");
      l.allow({"from", "to", "step"});
      const auto from = static_cast<Index>(l.number("from"));
      const auto to = static_cast<Index>(l.number("to"));
      const auto step = static_cast<Index>(l.number_or("step", 1));
      if (from < 1 || to < from || step < 1 || (to - from) / step > 100000) {
        fail(ErrorCode::Schema, where + ".linear: need 1 <= from <= to and step >= 1");
      }
      for (Index n = from; n <= to; n += step) out.push_back(n);
    } else {
      fail(ErrorCode::Schema, where + ": expected an array, {\"geometric\": ...} or {\"linear\": ...}");
    }
  } else {
    fail(ErrorCode::Schema, where + ": expected an index ladder");
  }
  if (out.empty()) fail(ErrorCode::Schema, where + ": ladder is empty");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] <= out[i - 1]) fail(ErrorCode::Schema, where + ": ladder must be strictly increasing");
  }
  return out;
}

std::vector<double> parse_eps_ladder(const json& v, const std::string& where) {
  std::vector<double> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double x = Reader::number_at(v[i], where + "[" + std::to_string(i) + "]");
      if (!(x > 0.0)) fail(ErrorCode::Schema, where + "[" + std::to_string(i) + "]: entries must be > 0");
      out.push_back(x);
    }
  } else if (v.is_object()) {
    const Reader r(v, where);
    r.allow({"geometric"});
    const Reader g(r.at("geometric"), where + ".geometric");
    g.allow({"start", "ratio", "count"});
    const double start = g.number("start");
    const double ratio = g.number("ratio");
    const double count = g.number("count");
    if (!(start > 0) || !(ratio > 0 && ratio < 1) || count < 1 || count > 200) {
      fail(ErrorCode::Schema, where + ".geometric: need start > 0, 0 < ratio < 1, 1 <= count <= 200");
    }
    for (int k = 0; k < static_cast<int>(count); ++k) out.push_back(start * std::pow(ratio, k));
  } else {
    fail(ErrorCode::Schema, where + ": expected an epsilon ladder");
  }
  if (out.empty()) fail(ErrorCode::Schema, where + ": ladder is empty");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] < out[i - 1])) fail(ErrorCode::Schema, where + ": ladder must be strictly decreasing");
  }
  return out;
}

std::vector<Point> parse_points(const json& v, int dim, const std::string& where, std::uint64_t seed) {
  std::vector<Point> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(Reader::point_at(v[i], dim, where + "[" + std::to_string(i) + "]"));
    }
  } else {
    const Reader r(v, where);
    if (r.has("grid")) {
      r.allow({"grid"});
      const Reader g(v["grid"], where + ".grid");
      g.allow({"lo", "hi", "count"});
      const Point lo = g.point("lo", dim);
      const Point hi = g.point("hi", dim);
      std::vector<int> counts(dim);
      const json& c = g.at("count");
      for (int k = 0; k < dim; ++k) {
        const json& ck = c.is_array() ? c.at(static_cast<std::size_t>(std::min<int>(k, static_cast<int>(c.size()) - 1))) : c;
        const double n = Reader::number_at(ck, where + ".grid.count");
        if (n < 1 || n > 10000) fail(ErrorCode::Schema, where + ".grid.count: expected 1..10000");
        counts[k] = static_cast<int>(n);
      }
      std::vector<int> k(dim, 0);
      while (true) {
        Point p(dim);
        for (int i = 0; i < dim; ++i) {
          p(i) = counts[i] == 1 ? lo(i) : lo(i) + (hi(i) - lo(i)) * k[i] / (counts[i] - 1);
        }
        out.push_back(std::move(p));
        int i = 0;
        while (i < dim && ++k[i] == counts[i]) k[i++] = 0;
        if (i == dim) break;
      }
    } else if (r.has("random")) {
      r.allow({"random"});
      const Reader g(v["random"], where + ".random");
      g.allow({"lo", "hi", "count"});
      const Point lo = g.point("lo", dim);
      const Point hi = g.point("hi", dim);
      const double n = g.number("count");
      if (n < 1 || n > 100000) fail(ErrorCode::Schema, where + ".random.count: expected 1..100000");
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int i = 0; i < static_cast<int>(n); ++i) {
        Point p(dim);
        for (int k = 0; k < dim; ++k) p(k) = lo(k) + (hi(k) - lo(k)) * u(rng);
        out.push_back(std::move(p));
      }
    } else {
      r.schema("", "expected an array of points, {\"grid\": ...} or {\"random\": ...}");
    }
  }
  if (out.empty()) fail(ErrorCode::Schema, where + ": no points");
  return out;
}

std::vector<Point> default_points(int dim) {
  json grid = {{"grid", {{"lo", std::vector<double>(dim, -1.0)},
                         {"hi", std::vector<double>(dim, 1.0)},
                         {"count", dim == 1 ? 21 : 5}}}};
  return parse_points(grid, dim, "test_points", 0);
}

Box bounding_box(const std::vector<Point>& pts) {
  Box b{pts.front(), pts.front()};
  for (const Point& p : pts) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

ExprVars vars_for(Index n) { return {{"n", static_cast<double>(n)}}; }

NCWitness nc_witness_for(const Scenario& s) {
  if (!s.nc_witness) return argmin_witness(s.seq);
  const NCTemplate& t = *s.nc_witness;
  NCWitness w;
  for (Index n : s.seq.ladder) {
    const ExprVars vars = vars_for(n);
    NCTriple tr{n, Reader::point_at(t.x, s.dimension, "witness.x", vars),
                t.xstar.is_null() ? Point::Zero(s.dimension)
                                  : Reader::point_at(t.xstar, s.dimension, "witness.xstar", vars),
                0.0};
    tr.value = t.value.is_null() ? s.seq.member(n).evaluate(tr.x).value()
                                 : Reader::number_at(t.value, "witness.value", vars);
    w.triples.push_back(std::move(tr));
  }
  w.x = t.limit_x;
  w.xstar = t.limit_xstar;
  w.value = t.limit_value;
  return w;
}

std::pair<std::vector<WitnessPoint>, Point> weak_witness_for(const Scenario& s) {
  std::vector<WitnessPoint> pts;
  if (s.weak_witness) {
    for (Index n : s.seq.ladder) {
      pts.push_back({n, Reader::point_at(s.weak_witness->x, s.dimension, "weak_witness.x", vars_for(n))});
    }
    return {pts, s.weak_witness->limit};
  }
  const NCWitness w = argmin_witness(s.seq);
  for (const auto& t : w.triples) pts.push_back({t.n, t.x});
  return {pts, w.x};
}

std::string point_text(const Point& p) {
  std::string out;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i > 0) out += ';';
    out += format_number(p(i));
  }
  return out;
}

struct Collector {
  const Scenario& s;
  ScenarioResult& r;
  CsvWriter epi_csv{{"scenario", "check", "point", "f_l", "f_u", "f", "verdict"}};
  CsvWriter plot_csv{{"series", "x", "y"}};

  void add(const std::string& check, const Verdict& v, bool red_alert = false) {
    CheckRow row{check, v.status, std::nullopt, red_alert, v.note};
    if (auto it = s.expected.find(check); it != s.expected.end()) row.expected = it->second;
    r.rows.push_back(std::move(row));
  }

  void epi_rows(const std::string& check, const EpiReport& rep, double tol) {
    for (std::size_t i = 0; i < rep.estimates.size(); ++i) {
      const EpiLimitEstimate& e = rep.estimates[i];
      const ExtReal& f = rep.limit_values[i];
      const bool match = matches(e.lower, f, tol) && matches(e.upper, f, tol);
      const VerdictStatus st = match ? VerdictStatus::Holds
                               : (e.lower_stable && e.upper_stable) ? VerdictStatus::Fails
                                                                    : VerdictStatus::Inconclusive;
      epi_csv.row({s.id, check, point_text(e.x), format_number(e.lower), format_number(e.upper),
                   format_number(f), to_string(st)});
      const std::string x = s.dimension == 1 ? format_number(e.x(0)) : std::to_string(i);
      plot_csv.row({check + ".f_l", x, format_number(e.lower)});
      plot_csv.row({check + ".f_u", x, format_number(e.upper)});
      plot_csv.row({check + ".f", x, format_number(f)});
    }
  }
};

TheoremConfig theorem_config(const Scenario& s, const RunOptions& o) {
  TheoremConfig c = s.settings.theorem;
  if (o.tol) {
    c.tol = *o.tol;
    c.epi.tol = *o.tol;
  }
  return c;
}

LemmaConfig lemma_config(const Scenario& s, const TheoremConfig& t) {
  LemmaConfig c;
  c.epi = t.epi;
  c.tol = t.tol;
  c.slope_bound = t.slope_bound;
  c.domain_radius = s.settings.domain_radius;
  return c;
}

GraphWindow graph_window(const Scenario& s) {
  if (s.settings.graph) return *s.settings.graph;
  const Box b = bounding_box(s.test_points);
  const Point four = Point::Constant(s.dimension, 4.0);
  return {b, {-four, four}, s.dimension == 1 ? 0.02 : 0.1};
}

void run_checks(const Scenario& s, const RunOptions& o, Collector& out) {
  const TheoremConfig cfg = theorem_config(s, o);
  EpiConfig epi = cfg.epi;
  epi.tol = cfg.tol;
  std::optional<DescentTrajectory> traj;
  auto trajectory = [&]() -> const DescentTrajectory& {
    if (!traj) traj = descend(s.flow->f, s.flow->x0, s.flow->h, s.flow->T);
    return *traj;
  };

  for (CheckKind kind : s.checks) {
    switch (kind) {
      case CheckKind::Epi: {
        const EpiReport rep = epi_report(value_family(s.seq), s.test_points, epi);
        out.epi_rows("epi", rep, epi.tol);
        out.add("epi", rep.verdict);
        break;
      }
      case CheckKind::SlopeEpi: {
        const EpiReport rep = epi_report(slope_family(s.seq), s.test_points, epi);
        out.epi_rows("slope-epi", rep, epi.tol);
        out.add("slope-epi", rep.verdict);
        break;
      }
      case CheckKind::NC:
        out.add("nc", nc_check(s.seq, nc_witness_for(s), cfg));
        break;
      case CheckKind::NCWeak: {
        const auto [w, xbar] = weak_witness_for(s);
        out.add("nc-weak", nc_weak_check(s.seq, w, xbar, cfg));
        break;
      }
      case CheckKind::Attouch: {
        const GraphWindow win = graph_window(s);
        std::vector<GraphSample> graphs;
        for (Index n : s.seq.ladder) graphs.push_back(graph_sample(s.seq.member(n), win));
        const AttouchReport a = attouch_check(s.seq, graphs, graph_sample(s.seq.limit, win),
                                              nc_witness_for(s), s.test_points, cfg);
        out.add("attouch.i", a.epi);
        out.add("attouch.ii", a.subdiff_nc);
        out.add("attouch.iii", a.full_graph);
        out.add("attouch", a.overall);
        out.r.attouch_consistent = a.consistent;
        break;
      }
      case CheckKind::Main: {
        const MainReport m = main_theorem_check(s.seq, nc_witness_for(s), s.test_points, cfg);
        out.epi_rows("main.i", m.epi_details, epi.tol);
        out.epi_rows("main.slope-epi", m.slope_details, epi.tol);
        out.add("main.i", m.epi);
        out.add("main.ii", m.slope_nc);
        out.add("main.iii", m.slope_inf);
        out.add("main.slope-epi", m.slope_epi);
        out.add("main.nc", m.nc);
        out.add("main.inf", m.inf_condition);
        out.add("main", m.overall, m.red_alert);
        out.r.main_consistent = m.consistent;
        break;
      }
      case CheckKind::Comparison: {
        const Verdict v = comparison_check(s.comparison->f, s.comparison->g, s.comparison->grid, cfg.tol);
        out.add("comparison", v, v.fails());
        break;
      }
      case CheckKind::Flow:
        out.add("flow", flow_limit_check(trajectory(), cfg.tol));
        break;
      case CheckKind::Energy: {
        const double defect = energy_identity_defect(trajectory());
        const bool ok = defect <= s.settings.energy_tol;
        out.add("energy", make_verdict(ok ? VerdictStatus::Holds : VerdictStatus::Fails,
                                       {{"trajectory", trajectory().points.back(), {{"defect", defect}}}},
                                       {{"energy_tol", s.settings.energy_tol}}));
        break;
      }
      case CheckKind::Infimizing: {
        const Verdict v = infimizing_check(trajectory(), s.flow->g.value_or(s.flow->f), cfg.tol);
        out.add("infimizing", v, v.fails());
        break;
      }
      case CheckKind::Tightness: {
        const auto [w, xbar] = weak_witness_for(s);
        out.add("tightness", tightness_check(s.seq, w, xbar, lemma_config(s, cfg)));
        break;
      }
      case CheckKind::Sandwich: {
        const auto [w, xbar] = weak_witness_for(s);
        out.add("sandwich", domain_sandwich_check(s.seq, w, xbar, s.test_points, lemma_config(s, cfg)));
        break;
      }
    }
  }
  if (traj) {
    out.r.files["trajectory.csv"] = trajectory_csv(*traj);
    for (std::size_t k = 0; k < traj->points.size(); ++k) {
      out.plot_csv.row({"flow.f", format_number(traj->times[k]), format_number(traj->values[k])});
    }
  }
}

std::string outcome(const CheckRow& row) {
  if (!row.expected) return "";
  if (row.mismatch()) return "mismatch";
  return row.status == VerdictStatus::Fails ? "fails-as-expected" : "as-expected";
}

}  // namespace

const char* to_string(CheckKind kind) {
  for (const auto& c : check_names()) {
    if (c.kind == kind) return c.name;
  }
  return "?";
}

Scenario parse_scenario(const json& doc, const std::string& origin, std::uint64_t seed) {
  const Reader r(doc, "");
  r.allow({"schema", "id", "description", "dimension", "family", "test_points", "checks", "settings",
           "witness", "weak_witness", "comparison", "flow", "expected"});
  if (!r.has("schema") || !doc["schema"].is_number_integer() || doc["schema"].get<int>() != 1) {
    r.schema("schema", "expected schema version 1");
  }
  Scenario s;
  s.origin = origin;
  s.source = doc;
  s.id = r.string("id");
  if (s.id.empty() || s.id.find_first_of("/\\ \t\n,\"") != std::string::npos) {
    r.schema("id", "must be nonempty without spaces, commas, quotes or slashes");
  }
  if (r.has("description")) s.description = r.string("description");
  const double dim = r.number_or("dimension", 1);
  if (dim < 1 || dim > 8 || dim != std::floor(dim)) r.schema("dimension", "expected an integer 1..8");
  s.dimension = static_cast<int>(dim);
  const int d = s.dimension;

  const Reader fam(r.at("family"), "family");
  fam.allow({"member", "limit", "ladder"});
  const json member = fam.at("member");
  s.seq.dimension = d;
  s.seq.ladder = fam.has("ladder") ? parse_index_ladder(doc["family"]["ladder"], "family.ladder")
                                   : default_index_ladder();
  s.seq.member = [member, d](Index n) { return parse_spec_node(member, d, vars_for(n), "family.member"); };
  s.seq.limit = parse_spec_node(fam.at("limit"), d, {}, "family.limit");
  for (Index n : s.seq.ladder) s.seq.member(n);

  s.test_points = r.has("test_points") ? parse_points(doc["test_points"], d, "test_points", seed)
                                       : default_points(d);

  const json& checks = r.at("checks");
  if (!checks.is_array()) r.schema("checks", "expected an array of check names");
  std::set<std::string> rows;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string where = "checks[" + std::to_string(i) + "]";
    if (!checks[i].is_string()) fail(ErrorCode::Schema, where + ": expected a string");
    const std::string name = checks[i].get<std::string>();
    const auto it = std::find_if(check_names().begin(), check_names().end(),
                                 [&](const CheckName& c) { return name == c.name; });
    if (it == check_names().end()) fail(ErrorCode::Schema, where + ": unknown check '" + name + "'");
    if (std::find(s.checks.begin(), s.checks.end(), it->kind) != s.checks.end()) {
      fail(ErrorCode::Schema, where + ": duplicate check '" + name + "'");
    }
    s.checks.push_back(it->kind);
    rows.insert(it->rows.begin(), it->rows.end());
  }

  if (r.has("settings")) {
    const Reader st(doc["settings"], "settings");
    st.allow({"tol", "inf_tol", "feasibility_tol", "slope_bound", "eps_ladder", "blowup", "growth",
              "domain_radius", "energy_tol", "graph"});
    TheoremConfig& t = s.settings.theorem;
    t.tol = st.positive("tol", t.tol);
    t.epi.tol = t.tol;
    t.inf_tol = st.positive("inf_tol", t.inf_tol);
    t.feasibility_tol = st.positive("feasibility_tol", t.feasibility_tol);
    t.slope_bound = st.positive("slope_bound", t.slope_bound);
    t.epi.tail.blowup = st.positive("blowup", t.epi.tail.blowup);
    t.epi.tail.growth = st.positive("growth", t.epi.tail.growth);
    if (st.has("eps_ladder")) t.epi.eps_ladder = parse_eps_ladder(doc["settings"]["eps_ladder"], "settings.eps_ladder");
    s.settings.domain_radius = st.positive("domain_radius", s.settings.domain_radius);
    s.settings.energy_tol = st.positive("energy_tol", s.settings.energy_tol);
    if (st.has("graph")) {
      const Reader g(doc["settings"]["graph"], "settings.graph");
      g.allow({"x_lo", "x_hi", "xstar_lo", "xstar_hi", "spacing"});
      s.settings.graph = GraphWindow{{g.point("x_lo", d), g.point("x_hi", d)},
                                     {g.point("xstar_lo", d), g.point("xstar_hi", d)},
                                     g.positive("spacing", 0.02)};
    }
  }

  if (r.has("witness")) {
    const Reader w(doc["witness"], "witness");
    w.allow({"x", "xstar", "value", "limit"});
    NCTemplate t;
    t.x = w.at("x");
    t.xstar = w.has("xstar") ? doc["witness"]["xstar"] : json();
    t.value = w.has("value") ? doc["witness"]["value"] : json();
    const Reader lim(w.at("limit"), "witness.limit");
    lim.allow({"x", "xstar", "value"});
    t.limit_x = lim.point("x", d);
    t.limit_xstar = lim.has("xstar") ? lim.point("xstar", d) : Point::Zero(d);
    t.limit_value = lim.has("value") ? lim.number("value") : s.seq.limit.evaluate(t.limit_x).value();
    for (Index n : {s.seq.ladder.front(), s.seq.ladder.back()}) {
      Reader::point_at(t.x, d, "witness.x", vars_for(n));
      if (!t.xstar.is_null()) Reader::point_at(t.xstar, d, "witness.xstar", vars_for(n));
      if (!t.value.is_null()) Reader::number_at(t.value, "witness.value", vars_for(n));
    }
    s.nc_witness = std::move(t);
  }
  if (r.has("weak_witness")) {
    const Reader w(doc["weak_witness"], "weak_witness");
    w.allow({"x", "limit"});
    WeakWitnessTemplate t{w.at("x"), w.point("limit", d)};
    Reader::point_at(t.x, d, "weak_witness.x", vars_for(s.seq.ladder.front()));
    s.weak_witness = std::move(t);
  }
  if (r.has("comparison")) {
    const Reader c(doc["comparison"], "comparison");
    c.allow({"f", "g", "grid"});
    s.comparison = ComparisonSetup{parse_spec_node(c.at("f"), d, {}, "comparison.f"),
                                   parse_spec_node(c.at("g"), d, {}, "comparison.g"),
                                   c.has("grid") ? parse_points(doc["comparison"]["grid"], d, "comparison.grid", seed)
                                                 : s.test_points};
  }
  if (r.has("flow")) {
    const Reader f(doc["flow"], "flow");
    f.allow({"x0", "h", "T", "of", "g"});
    ConvexSpec fs = s.seq.limit;
    if (f.has("of")) {
      const json& of = doc["flow"]["of"];
      if (of.is_string() && of.get<std::string>() == "limit") {
        fs = s.seq.limit;
      } else if (of.is_object()) {
        fs = parse_spec_node(of, d, {}, "flow.of");
      } else {
        const double n = Reader::number_at(of, "flow.of");
        if (n < 1 || n != std::floor(n)) f.schema("of", "expected \"limit\", a spec or an index n >= 1");
        fs = s.seq.member(static_cast<Index>(n));
      }
    }
    FlowSetup fl{fs, std::nullopt, f.point("x0", d), f.positive("h", 1e-3), f.positive("T", 20.0)};
    if (f.has("g")) fl.g = parse_spec_node(f.at("g"), d, {}, "flow.g");
    s.flow = std::move(fl);
  }

  for (CheckKind k : s.checks) {
    if (k == CheckKind::Comparison && !s.comparison) r.schema("comparison", "required by check 'comparison'");
    if ((k == CheckKind::Flow || k == CheckKind::Energy || k == CheckKind::Infimizing) && !s.flow) {
      r.schema("flow", std::string("required by check '") + to_string(k) + "'");
    }
  }

  if (r.has("expected")) {
    const json& e = doc["expected"];
    if (!e.is_object()) r.schema("expected", "expected an object");
    for (const auto& [key, val] : e.items()) {
      const std::string where = "expected." + key;
      if (!rows.count(key)) fail(ErrorCode::Schema, where + ": not produced by the listed checks");
      if (!val.is_string() || !status_from(val.get<std::string>())) {
        fail(ErrorCode::Schema, where + ": expected holds, fails, inconclusive or precondition-failed");
      }
      s.expected[key] = *status_from(val.get<std::string>());
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, std::uint64_t seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Parse, path.string() + ": " + e.what());
  }
  try {
    return parse_scenario(doc, path.string(), seed);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

json describe(const Scenario& s) {
  auto pts = [](const std::vector<Point>& v) {
    json a = json::array();
    for (const Point& p : v) a.push_back(to_vector(p));
    return a;
  };
  json checks = json::array();
  for (CheckKind k : s.checks) checks.push_back(to_string(k));
  json expected = json::object();
  for (const auto& [k, v] : s.expected) expected[k] = to_string(v);
  const TheoremConfig& t = s.settings.theorem;
  json out = {
      {"schema", 1},
      {"id", s.id},
      {"description", s.description},
      {"dimension", s.dimension},
      {"family",
       {{"member", s.source.at("family").at("member")},
        {"limit", s.seq.limit.to_json()},
        {"ladder", s.seq.ladder}}},
      {"test_points", pts(s.test_points)},
      {"checks", checks},
      {"settings",
       {{"tol", t.tol},
        {"inf_tol", t.inf_tol},
        {"feasibility_tol", t.feasibility_tol},
        {"slope_bound", t.slope_bound},
        {"eps_ladder", t.epi.eps_ladder},
        {"blowup", t.epi.tail.blowup},
        {"growth", t.epi.tail.growth},
        {"domain_radius", s.settings.domain_radius},
        {"energy_tol", s.settings.energy_tol}}},
      {"witness", s.nc_witness ? s.source.at("witness") : json("argmin")},
      {"expected", expected},
  };
  if (s.flow) {
    out["flow"] = {{"x0", to_vector(s.flow->x0)}, {"h", s.flow->h}, {"T", s.flow->T},
                   {"of", s.flow->f.to_json()}};
  }
  if (s.comparison) {
    out["comparison"] = {{"f", s.comparison->f.to_json()}, {"g", s.comparison->g.to_json()},
                         {"grid", pts(s.comparison->grid)}};
  }
  return out;
}

bool ScenarioResult::red_alert() const {
  return std::any_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.red_alert; });
}

bool ScenarioResult::inconclusive() const {
  return std::any_of(rows.begin(), rows.end(),
                     [](const CheckRow& r) { return r.status == VerdictStatus::Inconclusive; });
}

bool ScenarioResult::mismatch() const {
  return std::any_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.mismatch(); });
}

ScenarioResult run_scenario(const Scenario& s, const RunOptions& options) {
  ScenarioResult r;
  r.id = s.id;
  Collector out{s, r};
  try {
    run_checks(s, options, out);
  } catch (const Error& e) {
    r.error = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  CsvWriter verdicts({"scenario", "check", "verdict", "expected", "outcome", "red_alert", "note"});
  for (const CheckRow& row : r.rows) {
    verdicts.row({s.id, row.check, to_string(row.status), row.expected ? to_string(*row.expected) : "",
                  outcome(row), row.red_alert ? "1" : "0", row.note});
  }
  r.files["verdicts.csv"] = verdicts.str();
  if (out.epi_csv.rows() > 0) r.files["epi.csv"] = out.epi_csv.str();
  if (options.emit_plots) r.files["plot.csv"] = out.plot_csv.str();
  return r;
}

std::string SuiteReport::report_csv() const {
  CsvWriter w({"scenario", "check", "verdict", "expected", "outcome", "red_alert", "note"});
  for (const auto& s : scenarios) {
    for (const CheckRow& row : s.rows) {
      w.row({s.id, row.check, to_string(row.status), row.expected ? to_string(*row.expected) : "",
             outcome(row), row.red_alert ? "1" : "0", row.note});
    }
    if (!s.error.empty()) w.row({s.id, "error", "", "", "", "0", s.error});
  }
  return w.str();
}

std::string SuiteReport::summary_csv() const {
  CsvWriter w({"scenario", "checks", "main_consistent", "attouch_consistent", "red_alert",
               "inconclusive", "mismatch", "error"});
  auto flag = [](bool b) { return std::string(b ? "1" : "0"); };
  for (const auto& s : scenarios) {
    w.row({s.id, std::to_string(s.rows.size()), flag(s.main_consistent), flag(s.attouch_consistent),
           flag(s.red_alert()), flag(s.inconclusive()), flag(s.mismatch()), s.error});
  }
  return w.str();
}

std::string SuiteReport::summary_text() const {
  std::ostringstream os;
  int alerts = 0, inconclusive = 0, mismatches = 0, errors = 0;
  for (const auto& s : scenarios) {
    std::vector<std::string> states;
    if (!s.error.empty()) {
      states.push_back("error: " + s.error);
      ++errors;
    }
    if (s.red_alert()) {
      states.push_back("RED ALERT");
      ++alerts;
    }
    if (s.mismatch()) {
      states.push_back("expectation mismatch");
      ++mismatches;
    }
    if (s.inconclusive()) {
      states.push_back("inconclusive");
      ++inconclusive;
    }
    std::string state = states.empty() ? "ok" : states.front();
    for (std::size_t i = 1; i < states.size(); ++i) state += ", " + states[i];
    os << s.id << ": " << state;
    for (const CheckRow& row : s.rows) {
      if (row.mismatch() || row.red_alert) {
        os << "\n  " << row.check << " = " << to_string(row.status);
        if (row.expected) os << " (expected " << to_string(*row.expected) << ")";
        if (!row.note.empty()) os << " " << row.note;
      }
    }
    os << '\n';
  }
  os << scenarios.size() << " scenarios, " << alerts << " red alerts, " << mismatches
     << " mismatches, " << inconclusive << " inconclusive, " << errors << " errors; exit " << exit_code
     << '\n';
  return os.str();
}

SuiteReport scenario_suite(const std::vector<Scenario>& scenarios, const RunOptions& options) {
  std::set<std::string> ids;
  for (const auto& s : scenarios) {
    if (!ids.insert(s.id).second) fail(ErrorCode::Schema, "duplicate scenario id '" + s.id + "'");
  }
  SuiteReport rep;
  rep.scenarios.resize(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      rep.scenarios[i] = run_scenario(scenarios[i], options);
    }
  };
  const int jobs = std::clamp(options.jobs, 1, std::max(1, static_cast<int>(scenarios.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool alert = false, inconclusive = false, bad = false;
  for (const auto& s : rep.scenarios) {
    alert = alert || s.red_alert();
    inconclusive = inconclusive || s.inconclusive();
    bad = bad || s.mismatch() || !s.error.empty();
  }
  rep.exit_code = alert ? 2 : inconclusive ? 3 : bad ? 1 : 0;
  return rep;
}

void write_suite(const SuiteReport& report, const std::filesystem::path& dir) {
  write_file_atomic(dir / "report.csv", report.report_csv());
  write_file_atomic(dir / "summary.csv", report.summary_csv());
  for (const auto& s : report.scenarios) {
    for (const auto& [name, contents] : s.files) write_file_atomic(dir / s.id / name, contents);
  }
}

}  // namespace epilab
