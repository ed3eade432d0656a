#include "dyadica/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dyadica/analysis.hpp"
#include "dyadica/errors.hpp"
#include "dyadica/experiments.hpp"
#include "dyadica/fracops.hpp"
#include "dyadica/haar.hpp"
#include "dyadica/paracomm.hpp"
#include "dyadica/weights.hpp"

namespace dyadica {

using nlohmann::json;

namespace {

constexpr const char* kSuiteNames[] = {"haar-verify", "represent", "weights", "norms",
                                       "decompose",   "commutator", "bloom",  "all"};

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigurationError(field + ": " + what);
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json encode_number(double v) {
  if (std::isfinite(v)) return v;
  return number(v);
}

double decode_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw Error("report: bad number '" + s + "'");
}

// Typed field readers that name the field on failure.
double read_double(const json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  return j.get<double>();
}

long long read_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) field_error(field, "expected an integer");
  return j.get<long long>();
}

std::size_t read_count(const json& j, const std::string& field) {
  const long long v = read_int(j, field);
  if (v < 1) field_error(field, "must be positive");
  return static_cast<std::size_t>(v);
}

bool read_bool(const json& j, const std::string& field) {
  if (!j.is_boolean()) field_error(field, "expected true or false");
  return j.get<bool>();
}

std::string read_string(const json& j, const std::string& field) {
  if (!j.is_string()) field_error(field, "expected a string");
  return j.get<std::string>();
}

const json& read_array(const json& j, const std::string& field) {
  if (!j.is_array()) field_error(field, "expected an array");
  return j;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) field_error(where.empty() ? "config" : where, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; })) {
      field_error(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
    }
  }
}

std::vector<int> read_levels(const json& j, const std::string& field) {
  std::vector<int> out;
  for (std::size_t i = 0; i < read_array(j, field).size(); ++i) {
    out.push_back(static_cast<int>(read_int(j[i], field + "[" + std::to_string(i) + "]")));
  }
  return out;
}

const char* format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::json: return "json";
    case OutputFormat::csv: return "csv";
    case OutputFormat::both: return "both";
  }
  return "both";
}

}  // namespace

const char* to_string(Suite suite) { return kSuiteNames[static_cast<int>(suite)]; }

Suite suite_from_string(const std::string& name) {
  for (int i = 0; i < 8; ++i) {
    if (name == kSuiteNames[i]) return static_cast<Suite>(i);
  }
  field_error("suite", "unknown suite '" + name + "'");
}

std::vector<Suite> concrete_suites() {
  return {Suite::haar_verify, Suite::represent, Suite::weights, Suite::norms,
          Suite::decompose,   Suite::commutator, Suite::bloom};
}

const char* to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::hard: return "hard";
    case CheckKind::stability: return "stability";
    case CheckKind::info: return "info";
  }
  return "hard";
}

bool operator==(const CheckRecord& a, const CheckRecord& b) {
  auto same = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
  return a.name == b.name && a.anchor == b.anchor && same(a.value, b.value) && same(a.threshold, b.threshold) &&
         a.pass == b.pass && a.kind == b.kind;
}

void validate_config(const ExperimentConfig& c) {
  auto check_levels = [](const std::vector<int>& levels, const std::string& field, int lo) {
    if (levels.empty()) field_error(field, "must not be empty");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i] < lo || levels[i] > 14) {
        field_error(field + "[" + std::to_string(i) + "]",
                    "level " + std::to_string(levels[i]) + " outside " + std::to_string(lo) + "..14");
      }
    }
  };
  check_levels(c.levels, "levels", 1);
  check_levels(c.stability_levels, "stability_levels", 3);
  check_levels(c.domination_levels, "domination_levels", 1);
  if (c.lambdas.empty()) field_error("lambdas", "must not be empty");
  for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
    if (!(c.lambdas[i] > 0.0 && c.lambdas[i] < 1.0)) field_error("lambdas[" + std::to_string(i) + "]", "must lie in (0, 1)");
  }
  if (c.exponents.empty()) field_error("exponents", "must not be empty");
  for (std::size_t i = 0; i < c.exponents.size(); ++i) {
    const std::string f = "exponents[" + std::to_string(i) + "]";
    if (!(c.exponents[i].lambda > 0.0 && c.exponents[i].lambda < 1.0)) field_error(f, "lambda must lie in (0, 1)");
    if (!(c.exponents[i].p > 1.0)) field_error(f, "p must exceed 1");
    try {
      exponent_solve(c.exponents[i].p, c.exponents[i].lambda);
    } catch (const Error& e) {
      field_error(f, e.what());
    }
  }
  for (std::size_t i = 0; i < c.weights.size(); ++i) {
    if (!(std::abs(c.weights[i].alpha) < 1.0)) field_error("weights[" + std::to_string(i) + "]", "|alpha| must be below 1");
  }
  for (std::size_t i = 0; i < c.quadruples.size(); ++i) {
    const QuadrupleSpec& q = c.quadruples[i];
    for (double a : {q.mu1, q.sigma1, q.mu2, q.sigma2}) {
      if (!(std::abs(a) < 1.0)) field_error("quadruples[" + std::to_string(i) + "]", "|alpha| must be below 1");
    }
  }
  if (c.r < 1) field_error("goodness.r", "must be at least 1");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) field_error("goodness.gamma", "must lie in (0, 1)");
  if (!(c.max_characteristic >= 1.0)) field_error("max_characteristic", "must be at least 1");
  if (c.output_dir.empty()) field_error("output.dir", "must not be empty");
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigurationError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
  check_keys(doc,
             {"suite", "seed", "levels", "stability_levels", "domination_levels", "lambdas", "exponents", "weights",
              "quadruples", "goodness", "ensembles", "max_characteristic", "mean_zero", "output", "strict"},
             "");
  ExperimentConfig c;
  if (!doc.contains("suite")) field_error("suite", "required");
  c.suite = suite_from_string(read_string(doc["suite"], "suite"));
  if (!doc.contains("seed")) field_error("seed", "required");
  const long long seed = read_int(doc["seed"], "seed");
  if (seed < 0) field_error("seed", "must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  if (doc.contains("levels")) c.levels = read_levels(doc["levels"], "levels");
  if (doc.contains("stability_levels")) c.stability_levels = read_levels(doc["stability_levels"], "stability_levels");
  if (doc.contains("domination_levels")) c.domination_levels = read_levels(doc["domination_levels"], "domination_levels");
  if (doc.contains("lambdas")) {
    c.lambdas.clear();
    const json& a = read_array(doc["lambdas"], "lambdas");
    for (std::size_t i = 0; i < a.size(); ++i) c.lambdas.push_back(read_double(a[i], "lambdas[" + std::to_string(i) + "]"));
  }
  if (doc.contains("exponents")) {
    c.exponents.clear();
    const json& a = read_array(doc["exponents"], "exponents");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string f = "exponents[" + std::to_string(i) + "]";
      check_keys(a[i], {"p", "lambda"}, f);
      if (!a[i].contains("p") || !a[i].contains("lambda")) field_error(f, "needs p and lambda");
      c.exponents.push_back({read_double(a[i]["p"], f + ".p"), read_double(a[i]["lambda"], f + ".lambda")});
    }
  }
  if (doc.contains("weights")) {
    c.weights.clear();
    const json& a = read_array(doc["weights"], "weights");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string f = "weights[" + std::to_string(i) + "]";
      check_keys(a[i], {"alpha", "center"}, f);
      if (!a[i].contains("alpha")) field_error(f, "needs alpha");
      WeightSpec w{read_double(a[i]["alpha"], f + ".alpha"), 0.5};
      if (a[i].contains("center")) w.center = read_double(a[i]["center"], f + ".center");
      c.weights.push_back(w);
    }
  }
  if (doc.contains("quadruples")) {
    c.quadruples.clear();
    const json& a = read_array(doc["quadruples"], "quadruples");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string f = "quadruples[" + std::to_string(i) + "]";
      if (!a[i].is_array() || a[i].size() != 4) field_error(f, "expected [mu1, sigma1, mu2, sigma2]");
      c.quadruples.push_back({read_double(a[i][0], f), read_double(a[i][1], f), read_double(a[i][2], f),
                              read_double(a[i][3], f)});
    }
  }
  bool gamma_given = false;
  if (doc.contains("goodness")) {
    const json& g = doc["goodness"];
    check_keys(g, {"r", "gamma"}, "goodness");
    if (g.contains("r")) c.r = static_cast<int>(read_int(g["r"], "goodness.r"));
    if (g.contains("gamma") && !g["gamma"].is_null()) {
      c.gamma = read_double(g["gamma"], "goodness.gamma");
      gamma_given = true;
    }
  }
  if (doc.contains("ensembles")) {
    const json& e = doc["ensembles"];
    check_keys(e, {"samples", "systems", "norm_samples", "bloom_samples"}, "ensembles");
    if (e.contains("samples")) c.ensembles.samples = read_count(e["samples"], "ensembles.samples");
    if (e.contains("systems")) c.ensembles.systems = read_count(e["systems"], "ensembles.systems");
    if (e.contains("norm_samples")) c.ensembles.norm_samples = read_count(e["norm_samples"], "ensembles.norm_samples");
    if (e.contains("bloom_samples")) c.ensembles.bloom_samples = read_count(e["bloom_samples"], "ensembles.bloom_samples");
  }
  if (doc.contains("max_characteristic")) c.max_characteristic = read_double(doc["max_characteristic"], "max_characteristic");
  if (doc.contains("mean_zero")) c.mean_zero = read_bool(doc["mean_zero"], "mean_zero");
  if (doc.contains("output")) {
    const json& o = doc["output"];
    check_keys(o, {"dir", "format"}, "output");
    if (o.contains("dir")) c.output_dir = read_string(o["dir"], "output.dir");
    if (o.contains("format")) {
      const std::string f = read_string(o["format"], "output.format");
      if (f == "json") c.format = OutputFormat::json;
      else if (f == "csv") c.format = OutputFormat::csv;
      else if (f == "both") c.format = OutputFormat::both;
      else field_error("output.format", "expected json, csv or both");
    }
  }
  if (doc.contains("strict")) c.strict = read_bool(doc["strict"], "strict");
  if (!gamma_given && !c.lambdas.empty()) c.gamma = 1.0 / (2.0 * (c.lambdas.front() + 1.0));
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string serialize_config(const ExperimentConfig& c) {
  json doc = json::object();
  doc["suite"] = to_string(c.suite);
  doc["seed"] = c.seed;
  doc["levels"] = c.levels;
  doc["stability_levels"] = c.stability_levels;
  doc["domination_levels"] = c.domination_levels;
  doc["lambdas"] = c.lambdas;
  doc["exponents"] = json::array();
  for (const auto& e : c.exponents) doc["exponents"].push_back({{"p", e.p}, {"lambda", e.lambda}});
  doc["weights"] = json::array();
  for (const auto& w : c.weights) doc["weights"].push_back({{"alpha", w.alpha}, {"center", w.center}});
  doc["quadruples"] = json::array();
  for (const auto& q : c.quadruples) doc["quadruples"].push_back({q.mu1, q.sigma1, q.mu2, q.sigma2});
  doc["goodness"] = {{"r", c.r}, {"gamma", c.gamma}};
  doc["ensembles"] = {{"samples", c.ensembles.samples},
                      {"systems", c.ensembles.systems},
                      {"norm_samples", c.ensembles.norm_samples},
                      {"bloom_samples", c.ensembles.bloom_samples}};
  doc["max_characteristic"] = c.max_characteristic;
  doc["mean_zero"] = c.mean_zero;
  doc["output"] = {{"dir", c.output_dir}, {"format", format_name(c.format)}};
  doc["strict"] = c.strict;
  return doc.dump(2) + "\n";
}

std::string report_json(const Report& report) {
  json doc;
  doc["meta"] = {{"seed", report.seed}, {"levels", report.levels}, {"version", report.version}};
  doc["checks"] = json::array();
  for (const CheckRecord& r : report.checks) {
    json rec = json::object();
    rec["name"] = r.name;
    rec["paper_anchor"] = r.anchor;
    rec["value"] = encode_number(r.value);
    rec["threshold"] = encode_number(r.threshold);
    rec["pass"] = r.pass;
    rec["kind"] = to_string(r.kind);
    doc["checks"].push_back(std::move(rec));
  }
  return doc.dump(2) + "\n";
}

Report parse_report_json(const std::string& text) {
  const json doc = json::parse(text);
  Report r;
  r.seed = doc.at("meta").at("seed").get<std::uint64_t>();
  r.levels = doc.at("meta").at("levels").get<std::vector<int>>();
  r.version = doc.at("meta").at("version").get<std::string>();
  for (const json& c : doc.at("checks")) {
    CheckRecord rec;
    rec.name = c.at("name").get<std::string>();
    rec.anchor = c.at("paper_anchor").get<std::string>();
    rec.value = decode_number(c.at("value"));
    rec.threshold = decode_number(c.at("threshold"));
    rec.pass = c.at("pass").get<bool>();
    const std::string kind = c.at("kind").get<std::string>();
    rec.kind = kind == "stability" ? CheckKind::stability : kind == "info" ? CheckKind::info : CheckKind::hard;
    r.checks.push_back(std::move(rec));
  }
  return r;
}

std::string report_csv(const std::vector<CheckRecord>& checks) {
  std::string out = "check,anchor,value,threshold,pass\n";
  for (const CheckRecord& r : checks) {
    out += csv_field(r.name) + "," + csv_field(r.anchor) + "," + number(r.value) + "," + number(r.threshold) + "," +
           (r.pass ? "true" : "false") + "\n";
  }
  return out;
}

std::string samples_csv(const std::vector<SampleRecord>& samples) {
  std::string out = "series,anchor,level,sample,value\n";
  for (const SampleRecord& s : samples) {
    out += csv_field(s.series) + "," + csv_field(s.anchor) + "," + std::to_string(s.level) + "," +
           std::to_string(s.sample) + "," + number(s.value) + "\n";
  }
  return out;
}

void emit_report(const Report& report, OutputFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << (format == OutputFormat::csv ? report_csv(report.checks) : report_json(report));
  if (!out) throw Error("write failed for " + path.string());
}

namespace {

struct Recorder {
  Report& report;
  std::string suite;

  void check(const std::string& name, const std::string& anchor, double value, double threshold,
             CheckKind kind = CheckKind::hard) {
    const bool pass = std::isfinite(value) && value <= threshold;
    report.checks.push_back({suite + "." + name, anchor, value, threshold, pass, kind});
  }
  void info(const std::string& name, const std::string& anchor, double value) {
    report.checks.push_back({suite + "." + name, anchor, value, std::numeric_limits<double>::quiet_NaN(), true,
                             CheckKind::info});
  }
  void samples(const StabilityReport& s, const std::string& anchor) {
    std::size_t id = 0;
    int last = -1;
    for (std::size_t k = 0; k < s.sample_ratios.size(); ++k) {
      const int level = static_cast<int>(s.sample_levels[k]);
      id = level == last ? id + 1 : 0;
      last = level;
      report.samples.push_back({suite + "/" + s.label, anchor, level, id, s.sample_ratios[k]});
    }
  }
};

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

GridFunction normal_function(const Axis& a, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  GridFunction f(a);
  for (auto& v : f.values()) v = n01(rng);
  return f;
}

GridFunction normal_function(const Axis& a, const Axis& b, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  GridFunction f(a, b);
  for (auto& v : f.values()) v = n01(rng);
  return f;
}

GridFunction minus_mean(GridFunction f) {
  const double m = f.mean();
  for (auto& v : f.values()) v -= m;
  return f;
}

int bi_level(const ExperimentConfig& c) { return std::min(c.levels.front(), 4); }

void suite_haar(const ExperimentConfig& c, Recorder& rec) {
  std::mt19937_64 rng(c.seed);
  const Axis a = build_axis(c.levels.front());
  const Axis b = build_axis(bi_level(c));
  double rec1 = 0.0, pl1 = 0.0, rec2 = 0.0, pl2 = 0.0;
  for (std::size_t s = 0; s < c.ensembles.systems; ++s) {
    const DyadicSystem sys = sample_system(a, rng());
    const DyadicSystem s1 = sample_system(b, rng()), s2 = sample_system(b, rng());
    for (std::size_t i = 0; i < c.ensembles.samples; ++i) {
      const GridFunction f = normal_function(a, rng);
      const HaarCoefficientMap m = haar_expand(f, sys);
      rec1 = std::max(rec1, (m.reconstruct() - f).max_abs());
      const double e = inner_product(f, f);
      pl1 = std::max(pl1, std::abs(m.energy() - e) / e);
      const GridFunction g = normal_function(b, b, rng);
      const HaarCoefficientMap m2 = haar_expand(g, s1, s2);
      rec2 = std::max(rec2, (m2.reconstruct() - g).max_abs());
      const double e2 = inner_product(g, g);
      pl2 = std::max(pl2, std::abs(m2.energy() - e2) / e2);
    }
  }
  rec.check("reconstruct_1d", "Haar expansion reconstructs cell-average functions", rec1, 1e-12);
  rec.check("plancherel_1d", "Plancherel identity for the Haar basis", pl1, 1e-12);
  rec.check("reconstruct_2d", "product Haar expansion reconstructs two-axis functions", rec2, 1e-12);
  rec.check("plancherel_2d", "Plancherel identity for the product Haar basis", pl2, 1e-12);
}

void suite_represent(const ExperimentConfig& c, Recorder& rec) {
  std::mt19937_64 rng(c.seed);
  const Axis a = build_axis(c.levels.front());
  std::vector<DyadicSystem> systems;
  if (a.level() <= 8) {
    systems = all_systems(a);
  } else {
    for (std::size_t s = 0; s < c.ensembles.systems; ++s) systems.push_back(sample_system(a, rng()));
  }
  GridFunction f = normal_function(a, rng), g = normal_function(a, rng);
  if (!c.mean_zero) {
    f = f.map([](double v) { return v + 0.75; });
    g = g.map([](double v) { return v - 0.4; });
    rec.info("mean_subtracted", "inputs carried a mean; it was subtracted before the representation check",
             std::max(std::abs(f.mean()), std::abs(g.mean())));
  }
  f = minus_mean(f);
  g = minus_mean(g);
  for (double lambda : c.lambdas) {
    const RepresentationReport r = verify_representation(f, g, lambda, GoodParams{c.r, c.gamma}, systems);
    rec.check("residual[lambda=" + tag(lambda) + "]", "bilinear Haar representation of the fractional integral",
              r.max_relative_residual, 1e-8);
    rec.check("concentric[lambda=" + tag(lambda) + "]",
              "pairing of a Haar function with a concentric indicator vanishes",
              concentric_pairing_max(DyadicSystem(a, 0), lambda), 1e-10);
  }
}

void suite_weights(const ExperimentConfig& c, Recorder& rec) {
  const Axis a = build_axis(c.levels.front());
  for (const ExponentSpec& e : c.exponents) {
    const ExponentTriple t = exponent_solve(e.p, e.lambda);
    const double p = t.p, q = t.q, pp = t.p_prime(), qp = t.q_prime();
    for (const WeightSpec& ws : c.weights) {
      const std::string key = "[p=" + tag(p) + ",alpha=" + tag(ws.alpha) + "]";
      const Weight w = power_weight(a, ws.alpha, ws.center);
      const double apq = apq_characteristic(w, p, q);
      const double aq = ap_characteristic(w.pow(q), q);
      const double dual_q = ap_characteristic(w.pow(-qp), qp);
      const double dual_pq = apq_characteristic(w.inverse(), qp, pp);
      const double expect_q = std::pow(aq, qp - 1.0);
      const double expect_pq = std::pow(apq, pp / q);
      rec.check("dual_aq" + key, "[w^(-q')]_{A_q'} equals [w^q]_{A_q}^(q'-1)",
                std::abs(dual_q - expect_q) / expect_q, 1e-10);
      rec.check("dual_apq" + key, "[w^(-1)]_{A_{q',p'}} equals [w]_{A_{p,q}}^(p'/q)",
                std::abs(dual_pq - expect_pq) / expect_pq, 1e-10);
      const bool inside = ws.alpha > -1.0 / q && ws.alpha < 1.0 / pp;
      rec.check("apq" + key, inside ? "power weight inside the A_{p,q} range" : "power weight outside the A_{p,q} range",
                apq, inside ? c.max_characteristic : std::numeric_limits<double>::infinity(), CheckKind::stability);
    }
  }
}

void suite_norms(const ExperimentConfig& c, Recorder& rec) {
  DominationConfig dc;
  dc.levels = c.domination_levels;
  dc.lambdas = c.lambdas;
  const DominationReport d = domination_experiment(dc);
  for (const DominationSeries& s : d.series) {
    const std::string key = "[" + s.function + ",lambda=" + tag(s.lambda) + "]";
    rec.check("maximal_domination" + key, "fractional maximal function dominated by I_lambda|f|", s.maximal_variation,
              0.2, CheckKind::stability);
    rec.check("potential_domination" + key, "dyadic potential dominated by I_lambda|f|", s.potential_variation, 0.2,
              CheckKind::stability);
  }
  for (const DominationRow& r : d.rows) {
    rec.report.samples.push_back({rec.suite + "/maximal " + r.function + " lambda=" + tag(r.lambda),
                                  "fractional maximal function dominated by I_lambda|f|", r.level, 0, r.maximal_ratio});
    rec.report.samples.push_back({rec.suite + "/potential " + r.function + " lambda=" + tag(r.lambda),
                                  "dyadic potential dominated by I_lambda|f|", r.level, 0, r.potential_ratio});
  }

  NormConfig nc;
  nc.levels = c.stability_levels;
  nc.p = c.exponents.front().p;
  nc.lambda = c.exponents.front().lambda;
  nc.alphas.clear();
  for (const WeightSpec& w : c.weights) nc.alphas.push_back(w.alpha);
  nc.samples = c.ensembles.norm_samples;
  nc.max_characteristic = c.max_characteristic;
  nc.seed = c.seed;
  for (const NormEnsemble& e : norm_experiment(nc)) {
    const std::string key = "[" + e.stability.label + "]";
    const std::string anchor = std::string("weighted norm ratios of ") + to_string(e.op) + " stay bounded under refinement";
    rec.check("variation" + key, anchor, e.stability.variation, 0.5, CheckKind::stability);
    rec.check("trend" + key, anchor, std::abs(e.stability.spearman), 0.8, CheckKind::stability);
    rec.info("characteristic" + key, "A_{p,q} characteristic of the weight", e.characteristic);
    rec.samples(e.stability, anchor);
  }
}

void suite_decompose(const ExperimentConfig& c, Recorder& rec) {
  std::mt19937_64 rng(c.seed);
  const Axis a = build_axis(bi_level(c));
  double worst = 0.0, bilinear = 0.0;
  for (std::size_t i = 0; i < c.ensembles.samples; ++i) {
    const SystemPair sp{sample_system(a, rng()), sample_system(a, rng())};
    const GridFunction b = normal_function(a, a, rng), f = normal_function(a, a, rng), g = normal_function(a, a, rng);
    const DecompositionReport r = decompose_product(b, f, sp);
    worst = std::max(worst, r.residual / std::max(r.scale, 1e-300));
    const DecompositionReport rg = decompose_product(b, g, sp);
    const DecompositionReport rs = decompose_product(b, f + g, sp);
    for (std::size_t t = 0; t < rs.parts.size(); ++t) {
      const double scale = std::max(1.0, rs.parts[t].max_abs());
      bilinear = std::max(bilinear, (rs.parts[t] - r.parts[t] - rg.parts[t]).max_abs() / scale);
    }
  }
  rec.check("residual", "product decomposition into nine paraproducts and mean terms", worst, 1e-12);
  rec.check("bilinear", "paraproducts are bilinear", bilinear, 1e-12);
}

void suite_commutator(const ExperimentConfig& c, Recorder& rec) {
  std::mt19937_64 rng(c.seed);
  const Axis a = build_axis(bi_level(c));
  const double lambda = c.lambdas.front();
  double worst = 0.0, invariance = 0.0;
  std::uniform_int_distribution<int> depth(0, std::min(2, a.level() - 1));
  for (std::size_t i = 0; i < c.ensembles.samples; ++i) {
    const SystemPair sp{sample_system(a, rng()), sample_system(a, rng())};
    int d[4] = {1, 0, 1, 0};
    if (i > 0) {
      for (int& v : d) v = depth(rng);
    }
    const bool maximal = i % 2 == 0;
    const std::uint64_t s1 = rng(), s2 = rng();
    const ShiftCoefficientTable t1 = maximal ? ShiftCoefficientTable::maximal(sp.first, d[0], d[1], lambda, s1)
                                             : ShiftCoefficientTable::random(sp.first, d[0], d[1], lambda, s1);
    const ShiftCoefficientTable t2 = maximal ? ShiftCoefficientTable::maximal(sp.second, d[2], d[3], lambda, s2)
                                             : ShiftCoefficientTable::random(sp.second, d[2], d[3], lambda, s2);
    const GridFunction b = normal_function(a, a, rng), f = normal_function(a, a, rng);
    const CommutatorExpansion ex = shift_commutator_expand(b, f, t1, t2);
    worst = std::max(worst, ex.residual / ex.scale);
    const GridFunction base = commutator(b, f, CommutatorSpec::iterated(lambda, lambda));
    const GridFunction moved = commutator(b.map([](double v) { return v + 3.0; }), f, CommutatorSpec::iterated(lambda, lambda));
    invariance = std::max(invariance, (moved - base).max_abs() / std::max(1.0, base.max_abs()));
  }
  rec.check("expansion", "shift commutator equals its E-term plus eight paraproduct groups", worst, 1e-10);
  rec.check("constant_invariance", "iterated commutator ignores constants added to b", invariance, 1e-10);
}

void suite_bloom(const ExperimentConfig& c, Recorder& rec) {
  BloomConfig bc;
  bc.levels = c.stability_levels;
  bc.p1 = bc.p2 = c.exponents.front().p;
  bc.lambda1 = bc.lambda2 = c.exponents.front().lambda;
  bc.quadruples.clear();
  for (const QuadrupleSpec& q : c.quadruples) bc.quadruples.push_back({q.mu1, q.sigma1, q.mu2, q.sigma2});
  bc.samples = c.ensembles.bloom_samples;
  bc.seed = c.seed;
  const BloomReport r = bloom_experiment(bc);
  const std::string anchor = "two-weight bound for the iterated commutator (ensemble lower bound)";
  rec.info("baseline", "unit weights, b = f = one Haar rectangle, level 4 per axis", r.baseline);
  for (const BloomEnsemble& e : r.ensembles) {
    const std::string key = "[" + e.stability.label + "]";
    rec.check("variation" + key, anchor, e.stability.variation, 0.5, CheckKind::stability);
    rec.check("finite" + key, anchor, e.stability.finite ? 0.0 : 1.0, 0.0, CheckKind::stability);
    std::size_t skipped = 0;
    for (const StabilityRow& row : e.stability.rows) {
      skipped += row.skipped;
      rec.info("max" + key + "[L=" + std::to_string(row.level) + "]", anchor, row.ensemble_max);
    }
    rec.info("skipped" + key, "samples with vanishing BMO norm", static_cast<double>(skipped));
    const char* names[4] = {"mu1", "sigma1", "mu2", "sigma2"};
    for (int k = 0; k < 4; ++k) {
      rec.info(std::string("characteristic") + key + "[" + names[k] + "]", "A_{p,q} characteristic of the weight",
               e.characteristics[k]);
    }
    rec.samples(e.stability, anchor);
  }
}

void run_one(Suite s, const ExperimentConfig& c, Report& report) {
  Recorder rec{report, to_string(s)};
  try {
    switch (s) {
      case Suite::haar_verify: suite_haar(c, rec); break;
      case Suite::represent: suite_represent(c, rec); break;
      case Suite::weights: suite_weights(c, rec); break;
      case Suite::norms: suite_norms(c, rec); break;
      case Suite::decompose: suite_decompose(c, rec); break;
      case Suite::commutator: suite_commutator(c, rec); break;
      case Suite::bloom: suite_bloom(c, rec); break;
      case Suite::all: break;
    }
  } catch (const Error& e) {
    report.checks.push_back({rec.suite + ".error", e.what(), 1.0, 0.0, false, CheckKind::hard});
  }
}

}  // namespace

Report run_checks(const ExperimentConfig& config) {
  validate_config(config);
  Report report;
  report.seed = config.seed;
  report.levels = config.levels;
  if (config.suite == Suite::all) {
    for (Suite s : concrete_suites()) run_one(s, config, report);
  } else {
    run_one(config.suite, config, report);
  }
  std::stable_sort(report.checks.begin(), report.checks.end(),
                   [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  std::stable_sort(report.samples.begin(), report.samples.end(),
                   [](const SampleRecord& a, const SampleRecord& b) { return a.series < b.series; });
  return report;
}

int exit_status(const Report& report, bool strict) {
  for (const CheckRecord& r : report.checks) {
    if (r.pass) continue;
    if (r.kind == CheckKind::hard || (strict && r.kind == CheckKind::stability)) return 1;
  }
  return 0;
}

int run_suite(const ExperimentConfig& config) {
  const Report report = run_checks(config);
  const std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
  if (config.format != OutputFormat::csv) emit_report(report, OutputFormat::json, dir / "report.json");
  if (config.format != OutputFormat::json) {
    emit_report(report, OutputFormat::csv, dir / "report.csv");
    std::ofstream out(dir / "samples.csv", std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + (dir / "samples.csv").string());
    out << samples_csv(report.samples);
  }
  return exit_status(report, config.strict);
}

}  // namespace dyadica
