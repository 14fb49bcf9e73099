#include "focklab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "focklab/error.hpp"
#include "focklab/format.hpp"
#include "focklab/funcspec.hpp"
#include "focklab/integrate.hpp"
#include "focklab/levelset.hpp"
#include "focklab/verify.hpp"

#ifndef FOCKLAB_VERSION
#define FOCKLAB_VERSION "unknown"
#endif

namespace focklab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void bad(std::string_view key, const std::string& why) {
  throw Error(ErrorKind::InvalidInput, "config key '" + std::string(key) + "': " + why);
}

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    bad(key, "cannot parse '" + std::string(v) + "'");
  }
  return out;
}

std::vector<double> parse_doubles(std::string_view key, std::string_view v) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = v.find(',', start);
    out.push_back(parse_number<double>(key, v.substr(start, comma == std::string_view::npos
                                                                ? std::string_view::npos
                                                                : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::map<std::string, std::string> as_map(const RunConfig& c) {
  return {
      {"command", c.command},
      {"fn", c.fn},
      {"dim", std::to_string(c.params.m)},
      {"p", format_double(c.params.p)},
      {"alpha", format_double(c.params.alpha)},
      {"method", c.method},
      {"nodes", std::to_string(c.nodes)},
      {"radial_nodes", std::to_string(c.radial_nodes)},
      {"angular_nodes", std::to_string(c.angular_nodes)},
      {"samples", std::to_string(c.samples)},
      {"seed", std::to_string(c.seed)},
      {"variant", c.variant},
      {"grid_ratio", format_double(c.grid_ratio)},
      {"grid_count", std::to_string(c.grid_count)},
      {"suite", c.suite},
      {"p_list", join(c.p_list)},
      {"alpha_list", join(c.alpha_list)},
      {"p_ladder", join(c.p_ladder)},
      {"lemma_draws", std::to_string(c.lemma_draws)},
      {"format", c.format},
      {"out", c.out},
      {"plot", c.plot},
  };
}

Method method_of(const RunConfig& c) {
  if (c.method == "gh") return GaussHermite{c.nodes};
  if (c.method == "radial") return Radial{c.radial_nodes, c.angular_nodes};
  return MonteCarlo{c.samples, c.seed};
}

GridSpec grid_of(const RunConfig& c) { return {c.grid_ratio, c.grid_count}; }

// Output assembled in memory; flushed by Writer.
struct Artifact {
  std::string path;  // empty: stdout
  std::string content;
};

std::string csv_header(const RunConfig& c) {
  std::string h = "# focklab " FOCKLAB_VERSION "\n";
  std::istringstream lines(serialize(c));
  for (std::string line; std::getline(lines, line);) h += "# " + line + "\n";
  return h;
}

json json_header(const RunConfig& c) {
  json cfg = json::object();
  for (const auto& [k, v] : as_map(c)) cfg[k] = v;
  return json{{"focklab_version", FOCKLAB_VERSION}, {"config", cfg}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string bool_str(bool b) { return b ? "true" : "false"; }

// The single writer: writes each artifact to a temporary sibling and renames
// it into place, so readers never see a partial file.
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void write(const std::vector<Artifact>& artifacts) {
    for (const auto& a : artifacts) {
      if (a.path.empty()) {
        out_ << a.content;
        continue;
      }
      fs::path path(a.path);
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      fs::path tmp = path;
      tmp += ".tmp";
      {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
        f << a.content;
        f.close();
        if (!f) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
      }
      fs::rename(tmp, path);
    }
    out_.flush();
  }

 private:
  std::ostream& out_;
};

struct Outcome {
  std::vector<Artifact> artifacts;
  bool ok = true;
  std::vector<std::string> notes;  // diagnostics for the error stream
};

Outcome run_norm(const RunConfig& c, const TestFunction& f) {
  const auto est = fock_norm(f, c.params, method_of(c));
  Outcome o;
  std::string body;
  if (c.format == "json") {
    json j = json_header(c);
    j["result"] = {{"value", est.value},
                   {"error_bound", est.error_bound},
                   {"raw_integral", est.raw_integral},
                   {"log_raw", est.log_raw},
                   {"raw_error", est.raw_error},
                   {"method", describe(est.method)}};
    body = dump(j);
  } else {
    body = csv_header(c) + "value,error_bound,raw_integral,raw_error,method\n" +
           format_double(est.value) + ',' + format_double(est.error_bound) + ',' +
           format_double(est.raw_integral) + ',' + format_double(est.raw_error) + ',' +
           describe(est.method) + '\n';
  }
  o.artifacts.push_back({c.out, body});
  return o;
}

Outcome run_profile(const RunConfig& c, const TestFunction& f) {
  const auto variant = parse_variant(c.variant);
  const auto prof = g_diagnostic(f, c.params, grid_of(c), variant, c.samples, c.seed);
  Outcome o;
  o.ok = prof.violations.empty();
  if (!o.ok) {
    std::string note = "g increases at " + std::to_string(prof.violations.size()) +
                       " adjacent level pairs (worst raw increase " +
                       format_double(prof.worst_increase) + ") with the " + c.variant +
                       " isoperimetric constant";
    if (variant == IsoperimetricVariant::PaperLiteral) {
      note += "; the Gamma(m/2) constant exceeds the sharp ball constant Gamma(1+m/2) "
              "for m >= 3, so g is not monotone even for extremal inputs";
    }
    o.notes.push_back(note);
  }
  std::string body;
  if (c.format == "json") {
    json j = json_header(c);
    json viol = json::array();
    for (const auto& v : prof.violations) {
      viol.push_back({{"t_hi", v.t_hi}, {"t_lo", v.t_lo}, {"excess", v.margin}});
    }
    j["result"] = {{"t_max", prof.t_max},         {"t", prof.t},
                   {"mu", prof.mu},               {"mu_stderr", prof.mu_stderr},
                   {"g", prof.g},                 {"g_stderr", prof.g_stderr},
                   {"violations", viol},          {"worst_increase", prof.worst_increase}};
    if (!o.notes.empty()) j["note"] = o.notes.front();
    body = dump(j);
  } else {
    body = csv_header(c);
    body += "# t_max=" + format_double(prof.t_max) + "\n";
    for (const auto& n : o.notes) body += "# note: " + n + "\n";
    body += "t,mu,mu_stderr,g,violation\n";
    for (std::size_t i = 0; i < prof.t.size(); ++i) {
      body += format_double(prof.t[i]) + ',' + format_double(prof.mu[i]) + ',' +
              format_double(prof.mu_stderr[i]) + ',' + format_double(prof.g[i]) + ',' +
              (prof.violated_at(i) ? "1" : "0") + '\n';
    }
  }
  o.artifacts.push_back({c.out, body});
  if (!c.plot.empty()) {
    std::string plot = csv_header(c) + "t,g\n";
    for (std::size_t i = 0; i < prof.t.size(); ++i) {
      plot += format_double(prof.t[i]) + ',' + format_double(prof.g[i]) + '\n';
    }
    o.artifacts.push_back({c.plot, plot});
  }
  return o;
}

SuiteOptions suite_options(const RunConfig& c) {
  SuiteOptions s;
  s.params = c.params;
  s.method = method_of(c);
  s.p_list = c.p_list;
  s.p_ladder = c.p_ladder;
  s.grid = grid_of(c);
  s.variant = parse_variant(c.variant);
  s.samples = c.samples;
  s.seed = c.seed;
  s.lemma_draws = c.lemma_draws;
  return s;
}

Outcome run_verify(const RunConfig& c, const TestFunction& f) {
  const auto reports = run_suite(c.suite, f, suite_options(c));
  Outcome o;
  std::string summary = csv_header(c) + "check_name,pass,margin,tolerance\n";
  json all = json::array();
  for (const auto& r : reports) {
    o.ok = o.ok && r.pass;
    if (!r.pass) o.notes.push_back("check failed: " + r.check_name);
    summary += r.check_name + ',' + bool_str(r.pass) + ',' + format_double(r.margin) + ',' +
               format_double(r.tolerance) + '\n';
    all.push_back(to_json(r));
    if (!c.out.empty()) {
      json doc = json_header(c);
      doc["report"] = to_json(r);
      o.artifacts.push_back(
          {(fs::path(c.out) / (sanitize_filename(r.check_name) + ".json")).string(), dump(doc)});
    }
  }
  if (!c.out.empty()) {
    o.artifacts.push_back({(fs::path(c.out) / "summary.csv").string(), summary});
  }
  if (c.format == "json") {
    json j = json_header(c);
    j["reports"] = all;
    o.artifacts.push_back({"", dump(j)});
  } else {
    o.artifacts.push_back({"", summary});
  }
  return o;
}

Outcome run_sweep(const RunConfig& c) {
  Outcome o;
  std::vector<double> ps = c.p_list;
  std::sort(ps.begin(), ps.end());
  struct Row {
    double alpha;
    VerificationReport report;
  };
  std::vector<Row> rows;
  for (double alpha : c.alpha_list) {
    const auto f = parse_function_spec(c.fn, c.params.m, alpha);
    for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
      rows.push_back({alpha, check_contraction(f, ps[i], ps[i + 1], alpha, method_of(c))});
    }
  }
  std::string body;
  json arr = json::array();
  if (c.format != "json") {
    body = csv_header(c) +
           "alpha,p,q,norm_p,norm_q,margin,tolerance,pass,equality_flagged\n";
  }
  for (const auto& row : rows) {
    const auto& r = row.report;
    o.ok = o.ok && r.pass;
    if (!r.pass) o.notes.push_back("contraction failed at alpha=" + format_double(row.alpha) +
                                   ": " + r.check_name);
    if (c.format == "json") {
      arr.push_back(to_json(r));
    } else {
      body += format_double(row.alpha) + ',' + format_double(r.inputs["p"].get<double>()) + ',' +
              format_double(r.inputs["q"].get<double>()) + ',' +
              format_double(r.details["norm_p"].get<double>()) + ',' +
              format_double(r.details["norm_q"].get<double>()) + ',' + format_double(r.margin) +
              ',' + format_double(r.tolerance) + ',' + bool_str(r.pass) + ',' +
              bool_str(r.details["equality_flagged"].get<bool>()) + '\n';
    }
  }
  if (c.format == "json") {
    json j = json_header(c);
    j["rows"] = arr;
    body = dump(j);
  }
  o.artifacts.push_back({c.out, body});
  return o;
}

Outcome run_limit(const RunConfig& c, const TestFunction& f) {
  const auto r = check_limit_norm(f, c.params.alpha, c.p_ladder);
  Outcome o;
  o.ok = r.pass;
  if (!r.pass) o.notes.push_back("limit check failed with margin " + format_double(r.margin));
  std::string body;
  if (c.format == "json") {
    json j = json_header(c);
    j["report"] = to_json(r);
    body = dump(j);
  } else {
    const auto& d = r.details;
    body = csv_header(c);
    body += "# sup_norm=" + format_double(d["sup_norm"].get<double>()) + "\n";
    body += "# extrapolated_limit=" + format_double(d["extrapolated_limit"].get<double>()) + "\n";
    body += "# extrapolation_gap=" + format_double(d["extrapolation_gap"].get<double>()) + "\n";
    body += "# strictly_decreasing=" + bool_str(d["strictly_decreasing"].get<bool>()) + "\n";
    body += "# pass=" + bool_str(r.pass) + "\n";
    body += "p,norm,error\n";
    for (const auto& row : d["ladder"]) {
      body += format_double(row["p"].get<double>()) + ',' +
              format_double(row["norm"].get<double>()) + ',' +
              format_double(row["error"].get<double>()) + '\n';
    }
  }
  o.artifacts.push_back({c.out, body});
  return o;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "command",   "fn",          "dim",        "p",          "alpha",       "method",
      "nodes",     "radial_nodes", "angular_nodes", "samples", "seed",        "variant",
      "grid_ratio", "grid_count", "suite",      "p_list",     "alpha_list",  "p_ladder",
      "lemma_draws", "format",    "out",        "plot"};
  return keys;
}

RunConfig default_config() {
  RunConfig c;
  if (const char* env = std::getenv("FOCKLAB_SEED")) {
    c.seed = parse_number<std::uint64_t>("FOCKLAB_SEED", env);
  }
  return c;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view v) {
  if (key == "command") c.command = v;
  else if (key == "fn") c.fn = v;
  else if (key == "dim") c.params.m = parse_number<int>(key, v);
  else if (key == "p") c.params.p = parse_number<double>(key, v);
  else if (key == "alpha") c.params.alpha = parse_number<double>(key, v);
  else if (key == "method") c.method = v;
  else if (key == "nodes") c.nodes = parse_number<int>(key, v);
  else if (key == "radial_nodes") c.radial_nodes = parse_number<int>(key, v);
  else if (key == "angular_nodes") c.angular_nodes = parse_number<int>(key, v);
  else if (key == "samples") c.samples = parse_number<std::uint64_t>(key, v);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
  else if (key == "variant") c.variant = v;
  else if (key == "grid_ratio") c.grid_ratio = parse_number<double>(key, v);
  else if (key == "grid_count") c.grid_count = parse_number<int>(key, v);
  else if (key == "suite") c.suite = v;
  else if (key == "p_list") c.p_list = parse_doubles(key, v);
  else if (key == "alpha_list") c.alpha_list = parse_doubles(key, v);
  else if (key == "p_ladder") c.p_ladder = parse_doubles(key, v);
  else if (key == "lemma_draws") c.lemma_draws = parse_number<std::uint64_t>(key, v);
  else if (key == "format") c.format = v;
  else if (key == "out") c.out = v;
  else if (key == "plot") c.plot = v;
  else bad(key, "unknown key");
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line =
        trim(text.substr(start, nl == std::string_view::npos ? std::string_view::npos
                                                              : nl - start));
    ++line_no;
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    if (line.empty() || line.front() == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::InvalidInput,
                  "config line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string serialize(const RunConfig& c) {
  const auto m = as_map(c);
  std::string s;
  for (const auto& k : config_keys()) s += k + "=" + m.at(k) + "\n";
  return s;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorKind::InvalidInput, msg);
  };
  require(c.command == "norm" || c.command == "profile" || c.command == "verify" ||
              c.command == "sweep" || c.command == "limit",
          "unknown command '" + c.command + "'");
  c.params.validate();
  require(c.method == "gh" || c.method == "radial" || c.method == "mc",
          "method must be gh, radial or mc");
  require(c.format == "csv" || c.format == "json", "format must be csv or json");
  require(c.grid_ratio > 0.0 && c.grid_ratio < 1.0, "grid_ratio must be in (0, 1)");
  require(c.grid_count >= 1, "grid_count must be >= 1");
  require(c.samples >= 1, "samples must be >= 1");
  (void)parse_variant(c.variant);
  if (c.command == "verify") {
    const auto& names = suite_names();
    require(std::find(names.begin(), names.end(), c.suite) != names.end(),
            "unknown suite '" + c.suite + "'");
  }
  if (c.command == "sweep") {
    require(c.p_list.size() >= 2, "sweep needs at least two p values");
    require(!c.alpha_list.empty(), "sweep needs at least one alpha");
    for (double p : c.p_list) require(p > 0.0, "p_list entries must be > 0");
    for (double a : c.alpha_list) require(a > 0.0, "alpha_list entries must be > 0");
  }
  if (c.command == "limit") {
    require(c.p_ladder.size() >= 2, "p_ladder needs at least two entries");
  }
}

std::string sanitize_filename(std::string_view name) {
  std::string out;
  for (char ch : name) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '.' || ch == '-' || ch == '_' ||
                      ch == '=' || ch == ',';
    out += keep ? ch : '_';
  }
  return out;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    Outcome o;
    if (config.command == "sweep") {
      o = run_sweep(config);
    } else {
      const auto f = parse_function_spec(config.fn, config.params.m, config.params.alpha);
      if (config.command == "norm") o = run_norm(config, f);
      else if (config.command == "profile") o = run_profile(config, f);
      else if (config.command == "verify") o = run_verify(config, f);
      else o = run_limit(config, f);
    }
    Writer(out).write(o.artifacts);
    for (const auto& n : o.notes) err << "focklab: " << n << '\n';
    return o.ok ? 0 : 1;
  } catch (const Error& e) {
    err << "focklab: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "focklab: error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace focklab::cli
