// dfoq: build quadratic models from samples, sweep error bounds, run the
// verification suites.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dfoq/errors.hpp"
#include "dfoq/io.hpp"
#include "dfoq/models.hpp"
#include "dfoq/sweep.hpp"
#include "dfoq/verify.hpp"

namespace {

using dfoq::ErrorKind;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitCheckFailed = 3;

struct Options {
  std::string config;
  std::string function;
  std::string x0;
  int dim = 0;
  std::string set;
  std::string model;
  std::string deltas;
  long samples = 0;
  std::string out;
  std::string format;
  int jobs = 0;
  long long seed = -1;
  std::string suite = "all";
};

dfoq::Vec parse_vector(const std::string& text) {
  std::string s = text;
  for (char& c : s) {
    if (c == ',' || c == '[' || c == ']') c = ' ';
  }
  std::istringstream in(s);
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    dfoq::require(used == tok.size(), ErrorKind::kInvalidInput, "bad --x0 entry '" + tok + "'");
    vals.push_back(v);
  }
  dfoq::require(!vals.empty(), ErrorKind::kInvalidInput, "--x0 is empty");
  return Eigen::Map<dfoq::Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

// Settings resolved from the optional config file, then overridden by flags.
struct Resolved {
  std::string function = "sphere";
  std::optional<dfoq::Vec> x0;
  Eigen::Index dim = 0;
  std::string set;
  std::string model = "mn";
  std::string deltas = "1:0.5:11";
  Eigen::Index samples = 512;
  std::string out;
  std::string format;
  int jobs = 1;
  std::uint64_t seed = 0;
};

std::string json_string(const json& j, const char* key) {
  dfoq::require(j.at(key).is_string(), ErrorKind::kInvalidInput, std::string("config \"") + key + "\" must be a string");
  return j.at(key).get<std::string>();
}

long long json_int(const json& j, const char* key) {
  dfoq::require(j.at(key).is_number_integer(), ErrorKind::kInvalidInput,
                std::string("config \"") + key + "\" must be an integer");
  return j.at(key).get<long long>();
}

Resolved resolve(const Options& o, const CLI::App& cmd) {
  Resolved r;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    dfoq::require(static_cast<bool>(in), ErrorKind::kInvalidInput, "cannot open config '" + o.config + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      dfoq::fail(ErrorKind::kInvalidInput, "cannot parse config '" + o.config + "': " + e.what());
    }
    dfoq::require(j.is_object(), ErrorKind::kInvalidInput, "config must be a JSON object");
    for (const auto& item : j.items()) {
      const std::string& k = item.key();
      if (k == "function") r.function = json_string(j, "function");
      else if (k == "x0") r.x0 = dfoq::vec_from_json(j.at("x0"), "x0");
      else if (k == "dim") r.dim = json_int(j, "dim");
      else if (k == "set") r.set = json_string(j, "set");
      else if (k == "model") r.model = json_string(j, "model");
      else if (k == "deltas") r.deltas = json_string(j, "deltas");
      else if (k == "samples") r.samples = json_int(j, "samples");
      else if (k == "out") r.out = json_string(j, "out");
      else if (k == "format") r.format = json_string(j, "format");
      else if (k == "jobs") r.jobs = static_cast<int>(json_int(j, "jobs"));
      else if (k == "seed") r.seed = static_cast<std::uint64_t>(json_int(j, "seed"));
      else dfoq::fail(ErrorKind::kInvalidInput, "unknown config key \"" + k + "\"");
    }
  }
  auto given = [&cmd](const char* flag) {
    const CLI::Option* opt = cmd.get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--function")) r.function = o.function;
  if (given("--x0")) r.x0 = parse_vector(o.x0);
  if (given("--dim")) r.dim = o.dim;
  if (given("--set")) r.set = o.set;
  if (given("--model")) r.model = o.model;
  if (given("--deltas")) r.deltas = o.deltas;
  if (given("--samples")) r.samples = o.samples;
  if (given("--out")) r.out = o.out;
  if (given("--format")) r.format = o.format;
  if (given("--jobs")) r.jobs = o.jobs;
  if (given("--seed")) {
    dfoq::require(o.seed >= 0, ErrorKind::kInvalidInput, "--seed must be nonnegative");
    r.seed = static_cast<std::uint64_t>(o.seed);
  }
  dfoq::require(r.dim >= 0, ErrorKind::kInvalidInput, "--dim must be nonnegative");
  dfoq::require(r.jobs >= 1, ErrorKind::kInvalidInput, "--jobs must be positive");
  return r;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  dfoq::require(static_cast<bool>(out), ErrorKind::kInvalidInput, "cannot write '" + path + "'");
  out << text;
}

int cmd_model(const Resolved& r) {
  dfoq::require(!r.set.empty(), ErrorKind::kInvalidInput, "model needs --set");
  dfoq::require(r.format.empty() || r.format == "json", ErrorKind::kInvalidInput, "model output is JSON only");
  const dfoq::SetSpec set = dfoq::parse_set_spec(r.set);
  const dfoq::ModelSpec spec = dfoq::parse_model_spec(r.model);

  std::optional<dfoq::SampleFile> file;
  Eigen::Index n = r.dim;
  if (r.x0) {
    dfoq::require(n == 0 || n == r.x0->size(), ErrorKind::kInvalidInput, "--x0 length disagrees with --dim");
    n = r.x0->size();
  }
  if (set.kind == dfoq::SetSpec::Kind::kFile) {
    file = dfoq::read_sample_file(set.path);
    dfoq::require(!r.x0 || (*r.x0 - file->set.x0()).norm() == 0.0, ErrorKind::kInvalidInput,
                  "--x0 differs from the sample file's x0");
    n = file->set.dim();
  }
  if (n == 0) n = set.p;
  const dfoq::Vec x0 = file ? file->set.x0() : (r.x0 ? *r.x0 : dfoq::Vec(dfoq::Vec::Zero(n)));

  // Base frame: D for files, Dhalf for structured sets.
  dfoq::Mat base;
  bool structured = false;
  if (file) {
    base = file->set.D();
  } else if (set.kind == dfoq::SetSpec::Kind::kStructured) {
    dfoq::require(set.p <= n, ErrorKind::kInvalidInput, "structured:p needs p <= n");
    base = dfoq::Mat::Identity(n, n).leftCols(set.p);
    structured = true;
  } else {
    base = dfoq::random_unit_directions(n, set.p, set.seed != 0 ? set.seed : r.seed);
    structured = true;
  }

  json doc;
  if (spec.kind == dfoq::ModelSpec::Kind::kQS) {
    dfoq::require(!(file && file->values), ErrorKind::kInvalidInput,
                  "QS models evaluate f at their own points; use --function instead of stored values");
    const dfoq::TestFunction tf = dfoq::find_function(r.function, n);
    const dfoq::Oracle f = tf.oracle();
    const dfoq::QSSpec qs = dfoq::qs_preset(spec.preset, base);
    const dfoq::SampleSet y = qs.point_union(x0);
    const dfoq::QuadraticModel m = dfoq::build_qs(f, x0, qs);
    const dfoq::InterpolationCheck ic = dfoq::interpolation_check(m, f, y);
    doc = dfoq::model_to_json(m);
    doc["family"] = "QS";
    doc["preset"] = spec.preset;
    doc["diagnostics"] = {{"interpolates", ic.pass},
                          {"max_violation", ic.max_violation},
                          {"point_union_size", y.size() + 1},
                          {"evaluations", f.calls()}};
  } else {
    const dfoq::SampleSet y = structured ? dfoq::expand(dfoq::StructuredSet(x0, base)) : file->set;
    double f0 = 0.0;
    dfoq::Vec deltas(y.size());
    if (file && file->values) {
      f0 = *file->f0;
      deltas = file->values->array() - f0;
    } else {
      const dfoq::TestFunction tf = dfoq::find_function(r.function, n);
      f0 = tf.eval(x0);
      for (Eigen::Index i = 0; i < y.size(); ++i) deltas(i) = tf.eval(y.point(i)) - f0;
    }
    const bool mfn = spec.kind == dfoq::ModelSpec::Kind::kMFN;
    const dfoq::ModelSolution sol = mfn ? dfoq::solve_mfn(y, f0, deltas) : dfoq::solve_mn(y, f0, deltas);
    doc = dfoq::model_to_json(sol.model);
    doc["family"] = mfn ? "MFN" : "MN";
    doc["diagnostics"] = dfoq::diagnostics_to_json(sol.diagnostics);
    doc["diagnostics"]["poisedness"] = dfoq::poisedness_to_json(dfoq::poisedness(y, deltas));
    doc["diagnostics"]["tolerance"] = dfoq::residual_tolerance();
  }
  emit(doc.dump(2) + "\n", r.out);
  return kExitOk;
}

int cmd_sweep(const Resolved& r) {
  dfoq::SweepConfig cfg;
  cfg.function = r.function;
  cfg.x0 = r.x0;
  cfg.dim = r.dim;
  if (r.set.empty()) {
    const Eigen::Index n = r.x0 ? r.x0->size() : std::max<Eigen::Index>(r.dim, 1);
    cfg.set = dfoq::parse_set_spec("structured:" + std::to_string(n));
  } else {
    cfg.set = dfoq::parse_set_spec(r.set);
  }
  cfg.model = dfoq::parse_model_spec(r.model);
  cfg.deltas = dfoq::parse_delta_grid(r.deltas);
  cfg.samples = r.samples;
  cfg.jobs = r.jobs;
  cfg.seed = r.seed;
  const std::string format = r.format.empty() ? "csv" : r.format;
  dfoq::require(format == "csv" || format == "json", ErrorKind::kInvalidInput, "--format must be csv or json");

  const dfoq::SweepResult res = dfoq::run_sweep(cfg);
  emit(format == "csv" ? dfoq::sweep_csv(res) : dfoq::sweep_json(res, cfg).dump(2) + "\n", r.out);

  const dfoq::SweepSummary& s = res.summary;
  auto slope = [](const dfoq::SlopeCheck& c) {
    std::string t = c.slope ? dfoq::format_double(*c.slope) : std::string("n/a");
    if (c.asserted) t += c.pass ? " (asserted, ok)" : " (asserted, FAILED)";
    return t;
  };
  std::cerr << "slope err_f: " << slope(s.f) << "\n"
            << "slope err_g: " << slope(s.g) << "\n"
            << "slope err_dir_aligned: " << slope(s.aligned) << "\n"
            << "fully linear bounds: " << (s.fully_linear_applies ? "applied" : "not applicable") << "\n"
            << "all bounds hold: " << (s.all_bounds_hold ? "yes" : "no") << "\n"
            << "result: " << (s.pass ? "PASS" : "FAIL") << "\n";
  return s.pass ? kExitOk : kExitCheckFailed;
}

int cmd_verify(const std::string& suite) {
  const std::vector<dfoq::Check> checks = dfoq::run_verify_suite(suite);
  int failed = 0;
  for (const dfoq::Check& c : checks) {
    std::printf("%s  %s  [measured %.3g, tolerance %.3g]%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.measured,
                c.tolerance, c.detail.empty() ? "" : "  ", c.detail.c_str());
    failed += c.pass ? 0 : 1;
  }
  std::printf("%zu checks, %d failed\n", checks.size(), failed);
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON file with default settings; flags override it");
  cmd->add_option("--function", o.function, "test function name");
  cmd->add_option("--x0", o.x0, "center as comma-separated reals (default: origin)");
  cmd->add_option("--dim", o.dim, "dimension when neither --x0 nor a set file fixes it");
  cmd->add_option("--set", o.set, "sample set: <file> | structured:p | random:p[:seed]");
  cmd->add_option("--model", o.model, "mn | mfn | qs:<centred|adapted-<ell>|forward>");
  cmd->add_option("--out", o.out, "output path (default: stdout)");
  cmd->add_option("--format", o.format, "csv | json");
  cmd->add_option("--seed", o.seed, "seed for random sets without an explicit seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dfoq: quadratic models for derivative-free optimization"};
  app.require_subcommand(1);
  Options o;
  CLI::App* model = app.add_subcommand("model", "build one MN, MFN or QS model and print it as JSON");
  add_common(model, o);
  CLI::App* sweep = app.add_subcommand("sweep", "measure model errors against their bounds over a delta grid");
  add_common(sweep, o);
  sweep->add_option("--deltas", o.deltas, "start:factor:count (default 1:0.5:11)");
  sweep->add_option("--samples", o.samples, "ball samples per delta (default 512)");
  sweep->add_option("--jobs", o.jobs, "worker threads over delta values");
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", o.suite, "examples | relationships | bounds | all")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*model) return cmd_model(resolve(o, *model));
    if (*sweep) return cmd_sweep(resolve(o, *sweep));
    return cmd_verify(o.suite);
  } catch (const dfoq::Error& e) {
    std::cerr << "dfoq: " << e.what() << "\n";
    return e.kind() == ErrorKind::kInfeasible ? kExitInfeasible : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "dfoq: " << e.what() << "\n";
    return kExitUsage;
  }
}
