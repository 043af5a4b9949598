#include "medsmooth/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "medsmooth/kernels.hpp"
#include "medsmooth/pipeline.hpp"
#include "medsmooth/smoothing.hpp"

namespace medsmooth {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  double sigma = 0.25;
  std::size_t samples = 2000;
  double epsilon = 0.36;
  double alpha = 0.99999;
  double tau = 0.5;
  std::vector<double> objectness{kDefaultThresholds.begin(), kDefaultThresholds.end()};
  std::string sort = "location";
  std::string bin = "location+label";
  std::uint64_t seed = 0;
  std::string coverage = "binomial";
  std::string max_count = "possibly-present";
  std::string input;
  std::string offline;
  std::string out = ".";

  std::size_t scenes = 50;
  std::size_t image_size = 64;
  double gain = 1.0;
  double objectness_slope = 6.0;
  double drop_floor = 0.05;

  std::vector<double> epsilons{0.1, 0.25, 0.36, 0.5};

  std::string function = "step";
  double x_min = -2.0;
  double x_max = 2.0;
  std::size_t points = 81;
};

// Options whose presence on the command line matters.
struct Given {
  CLI::Option* sigma = nullptr;
  CLI::Option* samples = nullptr;
  CLI::Option* tau = nullptr;
  CLI::Option* max_count = nullptr;
};

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
}

SmoothingConfig make_config(const Options& o) {
  SmoothingConfig c;
  c.sigma = o.sigma;
  c.samples = o.samples;
  c.epsilon = o.epsilon;
  c.alpha = o.alpha;
  c.tau = o.tau;
  c.sort = parse_sort_mode(o.sort);
  c.bin = parse_bin_mode(o.bin);
  c.seed = o.seed;
  c.coverage = parse_coverage_formula(o.coverage);
  c.max_count = parse_max_count_rule(o.max_count);
  c.workers = kernels::default_workers();
  c.validate();
  for (double t : o.objectness) {
    if (!(t >= 0.0 && t <= 1.0)) throw InputError("objectness thresholds must lie in [0, 1]");
  }
  return c;
}

struct Workload {
  std::vector<WorkItem> items;
  std::string source;
  std::vector<std::string> failed;
};

Workload load_workload(const Options& o, const Given& given, SmoothingConfig& config) {
  Workload w;
  if (!o.offline.empty()) {
    auto run = load_offline_run(o.offline);
    check_run_parameters(run,
                         given.sigma->count() ? std::optional<double>(o.sigma) : std::nullopt,
                         given.samples->count() ? std::optional<std::size_t>(o.samples)
                                                : std::nullopt);
    config.sigma = run.manifest.sigma;
    config.samples = run.manifest.n;
    config.seed = run.manifest.seed;
    w.source = "offline:" + run.manifest.detector;
    for (const auto& f : run.failed) w.failed.push_back(f.id);
    w.items = items_from_offline(std::move(run), config);
    return w;
  }

  std::vector<SyntheticScene> scenes;
  if (!o.input.empty()) {
    scenes = parse_scenes(read_file(o.input));
  } else {
    SceneOptions so;
    so.width = so.height = o.image_size;
    so.max_side = std::min(so.max_side, static_cast<double>(o.image_size) / 2.0);
    so.min_side = std::min(so.min_side, so.max_side);
    scenes = generate_scenes(o.scenes, o.seed, so);
  }
  const SyntheticDetectorParams params{o.gain, o.objectness_slope, o.drop_floor};
  w.source = "synthetic";
  w.items = sample_scenes(scenes, params, config);
  return w;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string render_detections(const std::vector<WorkItem>& items, const SmoothingConfig& config,
                              std::span<const double> thresholds,
                              const std::vector<std::vector<std::vector<Detection>>>& dets) {
  json images = json::array();
  for (std::size_t i = 0; i < items.size(); ++i) {
    json levels = json::array();
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      json list = json::array();
      for (const auto& d : dets[t][i]) {
        list.push_back({{"x1", d.box.x1}, {"y1", d.box.y1}, {"x2", d.box.x2}, {"y2", d.box.y2},
                        {"label", d.label}, {"objectness", d.objectness}});
      }
      levels.push_back({{"objectness_threshold", thresholds[t]}, {"detections", list}});
    }
    images.push_back({{"id", items[i].id}, {"levels", levels}});
  }
  const json doc = {{"sigma", config.sigma},
                    {"samples", config.samples},
                    {"seed", config.seed},
                    {"sort", to_string(config.sort)},
                    {"bin", to_string(config.bin)},
                    {"images", images}};
  return doc.dump(1) + "\n";
}

int cmd_detect(const Options& o, const Given& given, std::ostream& out) {
  auto config = make_config(o);
  const auto w = load_workload(o, given, config);
  const auto dets = detect_items(w.items, config, o.objectness);
  fs::create_directories(o.out);
  write_file(fs::path(o.out) / "detections.json", render_detections(w.items, config, o.objectness, dets));
  std::size_t total = 0;
  for (const auto& per_image : dets.front()) total += per_image.size();
  out << "detect: " << w.items.size() << " images, " << total
      << " smoothed detections at threshold " << fmt(o.objectness.front()) << "\n";
  return kExitOk;
}

int cmd_certify(const Options& o, const Given& given, std::ostream& out) {
  auto config = make_config(o);
  const auto w = load_workload(o, given, config);
  auto report = certify_items(w.items, config, o.objectness, w.source);
  report.stats.failed_images = w.failed;
  fs::create_directories(o.out);
  write_file(fs::path(o.out) / "report.json", render_report(report));
  write_file(fs::path(o.out) / "pr.csv", render_pr_csv(report.ap.points));
  out << "certify: " << report.images.size() << " images, AP " << fmt(report.ap.ap_clean)
      << ", certified AP lower bound " << fmt(report.ap.ap_cert_lower) << "\n";
  return kExitOk;
}

int cmd_evaluate(const Options& o, const Given& given, std::ostream& out) {
  if (o.input.empty()) throw InputError("evaluate needs --input <certificate file>");
  auto report = parse_report(read_file(o.input));
  const double tau = given.tau->count() ? o.tau : report.config.tau;
  if (!(tau > 0.0 && tau <= 1.0)) throw InputError("tau must lie in (0, 1]");
  const auto rule = given.max_count->count() ? parse_max_count_rule(o.max_count)
                                             : report.config.max_count;
  const auto ap = evaluate_report(report, tau, rule);
  json pr = json::array();
  for (const auto& p : ap.points) {
    pr.push_back({{"threshold", p.threshold},
                  {"precision", p.precision},
                  {"recall", p.recall},
                  {"cert_precision", p.cert_precision},
                  {"cert_recall", p.cert_recall},
                  {"counts",
                   {{"certifiably_correct", p.counts.certifiably_correct},
                    {"ground_truth", p.counts.ground_truth},
                    {"max_predicted", p.counts.max_predicted},
                    {"clean_correct", p.counts.clean_correct},
                    {"clean_predicted", p.counts.clean_predicted}}}});
  }
  const json doc = {{"tau", tau},
                    {"max_count", to_string(rule)},
                    {"pr", pr},
                    {"ap_clean", ap.ap_clean},
                    {"ap_cert_lower", ap.ap_cert_lower}};
  fs::create_directories(o.out);
  write_file(fs::path(o.out) / "metrics.json", doc.dump(1) + "\n");
  write_file(fs::path(o.out) / "pr.csv", render_pr_csv(ap.points));
  out << "evaluate: AP " << fmt(ap.ap_clean) << ", certified AP lower bound "
      << fmt(ap.ap_cert_lower) << "\n";
  return kExitOk;
}

int cmd_sweep(const Options& o, const Given& given, std::ostream& out) {
  auto base = make_config(o);
  std::vector<double> eps = o.epsilons;
  if (eps.empty()) throw InputError("sweep needs at least one epsilon");
  std::sort(eps.begin(), eps.end());
  for (const double e : eps) {
    if (!(e >= 0.0)) throw InputError("epsilons must be >= 0");
  }
  const auto w = load_workload(o, given, base);

  json rows = json::array();
  std::ostringstream csv;
  csv << "epsilon,threshold,precision,recall,cert_precision,cert_recall,ap_clean,ap_cert_lower\n";
  for (const double e : eps) {
    SmoothingConfig config = base;
    config.epsilon = e;
    const auto report = certify_items(w.items, config, o.objectness, w.source);
    json pr = json::array();
    for (const auto& p : report.ap.points) {
      pr.push_back({{"threshold", p.threshold},
                    {"precision", p.precision},
                    {"recall", p.recall},
                    {"cert_precision", p.cert_precision},
                    {"cert_recall", p.cert_recall},
                    {"certifiably_correct", p.counts.certifiably_correct},
                    {"max_predicted", p.counts.max_predicted},
                    {"ground_truth", p.counts.ground_truth}});
      char buf[256];
      std::snprintf(buf, sizeof buf, "%.6g,%.4g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", e,
                    p.threshold, p.precision, p.recall, p.cert_precision, p.cert_recall,
                    report.ap.ap_clean, report.ap.ap_cert_lower);
      csv << buf;
    }
    rows.push_back({{"epsilon", e},
                    {"ap_clean", report.ap.ap_clean},
                    {"ap_cert_lower", report.ap.ap_cert_lower},
                    {"pr", pr}});
  }
  const json doc = {{"sigma", base.sigma},
                    {"samples", base.samples},
                    {"alpha", base.alpha},
                    {"tau", base.tau},
                    {"sort", to_string(base.sort)},
                    {"bin", to_string(base.bin)},
                    {"seed", base.seed},
                    {"source", w.source},
                    {"images", w.items.size()},
                    {"rows", rows}};
  fs::create_directories(o.out);
  write_file(fs::path(o.out) / "sweep.json", doc.dump(1) + "\n");
  write_file(fs::path(o.out) / "sweep.csv", csv.str());
  out << "sweep: " << eps.size() << " radii over " << w.items.size() << " images\n";
  return kExitOk;
}

struct NamedFunction {
  std::function<double(double)> fn;
  double lo;
  double hi;
};

NamedFunction base_function(const std::string& name) {
  if (name == "step") return {[](double x) { return x >= 0.0 ? 1.0 : 0.0; }, 0.0, 1.0};
  if (name == "staircase") {
    return {[](double x) { return std::clamp(std::floor(2.0 * x), -4.0, 4.0); }, -4.0, 4.0};
  }
  if (name == "ramp") return {[](double x) { return std::clamp(x, -1.0, 1.0); }, -1.0, 1.0};
  if (name == "sine") return {[](double x) { return std::sin(3.0 * x); }, -1.0, 1.0};
  throw InputError("unknown function '" + name + "' (step, staircase, ramp, sine)");
}

int cmd_compare(const Options& o, std::ostream& out) {
  if (!(o.sigma > 0.0)) throw InputError("sigma must be > 0");
  if (o.samples < 1) throw InputError("samples must be >= 1");
  if (o.points < 2 || !(o.x_max > o.x_min)) throw InputError("need --points >= 2 and x-max > x-min");
  const auto f = base_function(o.function);
  std::vector<double> grid(o.points);
  for (std::size_t i = 0; i < o.points; ++i) {
    grid[i] = o.x_min + (o.x_max - o.x_min) * static_cast<double>(i) /
                            static_cast<double>(o.points - 1);
  }
  const auto rows = compare_smoothing(f.fn, grid, o.sigma, o.samples, o.seed);
  const auto noise = gaussian_draws(o.sigma, o.samples, o.seed);
  const auto ranks = find_order_indices(o.samples, adjusted_percentiles(0.5, o.epsilon, o.sigma),
                                        o.alpha);

  std::ostringstream csv;
  csv << "x,base,mean,median,mean_lo,mean_hi,median_lo,median_hi\n";
  std::vector<double> values(o.samples);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < o.samples; ++i) values[i] = f.fn(r.x + noise[i]);
    const auto mb = mean_smoothing_bounds(std::clamp(r.mean, f.lo, f.hi), f.lo, f.hi, o.epsilon,
                                          o.sigma);
    const auto pb = bounds_at(SampleSet(values), ranks);
    char buf[320];
    std::snprintf(buf, sizeof buf, "%.6g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.x,
                  f.fn(r.x), r.mean, r.median, mb.first, mb.second, pb.lower, pb.upper);
    csv << buf;
  }
  fs::create_directories(o.out);
  write_file(fs::path(o.out) / "smoothing.csv", csv.str());
  out << "compare-smoothing: " << rows.size() << " grid points for '" << o.function << "'\n";
  return kExitOk;
}

void add_pipeline_flags(CLI::App& sub, Options& o, Given& g) {
  sub.option_defaults()->always_capture_default();
  g.sigma = sub.add_option("--sigma", o.sigma, "Gaussian noise std (images in [0,1])");
  g.samples = sub.add_option("--samples", o.samples, "Noise samples per image");
  sub.add_option("--epsilon", o.epsilon, "Certified l2 radius");
  sub.add_option("--alpha", o.alpha, "Confidence of each bound");
  g.tau = sub.add_option("--tau", o.tau, "IoU threshold for correctness");
  sub.add_option("--objectness", o.objectness, "Objectness threshold(s), comma separated")
      ->delimiter(',');
  sub.add_option("--sort", o.sort, "objectness | location");
  sub.add_option("--bin", o.bin, "none | label | location | location+label");
  sub.add_option("--seed", o.seed, "Noise and scene seed");
  sub.add_option("--coverage", o.coverage, "binomial | literal");
  g.max_count = sub.add_option("--max-count", o.max_count,
                               "possibly-present | certifiably-present");
  auto* input = sub.add_option("--input", o.input, "Scene file (JSON)");
  auto* offline = sub.add_option("--offline", o.offline, "Offline run directory or manifest");
  input->excludes(offline);
  sub.add_option("--out", o.out, "Output directory");
  sub.add_option("--scenes", o.scenes, "Number of generated scenes");
  sub.add_option("--image-size", o.image_size, "Side of generated scenes in pixels");
  sub.add_option("--gain", o.gain, "Synthetic detector box jitter gain");
  sub.add_option("--objectness-slope", o.objectness_slope, "Synthetic objectness loss per unit noise");
  sub.add_option("--drop-floor", o.drop_floor, "Synthetic detector drop threshold");
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Median smoothing certificates for black-box detectors", "medsmooth"};
  app.require_subcommand(1);
  Options o;
  Given given;

  auto* detect = app.add_subcommand("detect", "Smoothed detections only");
  auto* certify = app.add_subcommand("certify", "Certified boxes, PR table and AP");
  auto* evaluate = app.add_subcommand("evaluate", "Recompute metrics from a certificate file");
  auto* sweep = app.add_subcommand("sweep", "Certified metrics over several radii");
  auto* compare = app.add_subcommand("compare-smoothing", "Mean vs median smoothing curves");

  Given detect_given, certify_given, sweep_given;
  add_pipeline_flags(*detect, o, detect_given);
  add_pipeline_flags(*certify, o, certify_given);
  add_pipeline_flags(*sweep, o, sweep_given);
  sweep->add_option("--epsilons", o.epsilons, "Radii, comma separated")->delimiter(',');

  given.tau = evaluate->add_option("--tau", o.tau, "Override the IoU threshold");
  given.max_count = evaluate->add_option("--max-count", o.max_count, "Override the max-count rule");
  evaluate->add_option("--input", o.input, "Certificate file (report.json)")->required();
  evaluate->add_option("--out", o.out, "Output directory");

  compare->option_defaults()->always_capture_default();
  compare->add_option("--function", o.function, "step | staircase | ramp | sine");
  compare->add_option("--sigma", o.sigma, "Gaussian noise std");
  compare->add_option("--samples", o.samples, "Monte Carlo samples per point");
  compare->add_option("--epsilon", o.epsilon, "Radius for the bound columns");
  compare->add_option("--alpha", o.alpha, "Confidence for the median bounds");
  compare->add_option("--seed", o.seed, "Noise seed");
  compare->add_option("--x-min", o.x_min, "Grid start");
  compare->add_option("--x-max", o.x_max, "Grid end");
  compare->add_option("--points", o.points, "Grid points");
  compare->add_option("--out", o.out, "Output directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    int code = kExitOk;
    if (detect->parsed()) {
      code = cmd_detect(o, detect_given, out);
    } else if (certify->parsed()) {
      code = cmd_certify(o, certify_given, out);
    } else if (evaluate->parsed()) {
      code = cmd_evaluate(o, given, out);
    } else if (sweep->parsed()) {
      code = cmd_sweep(o, sweep_given, out);
    } else if (compare->parsed()) {
      code = cmd_compare(o, out);
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    err << "elapsed " << ms << " ms\n";
    return code;
  } catch (const RadiusTooLarge& e) {
    err << "error: " << e.what() << "\n";
    return kExitCertificationImpossible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace medsmooth
