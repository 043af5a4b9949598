#include "medsmooth/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace medsmooth {
namespace {

using nlohmann::json;

// JSON has no infinities; they travel as strings.
json ext(double v) {
  if (v == std::numeric_limits<double>::infinity()) return "inf";
  if (v == -std::numeric_limits<double>::infinity()) return "-inf";
  return v;
}

double unext(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("bad extended real: " + s);
  }
  return j.get<double>();
}

json box_array(const Box& b) { return json::array({ext(b.x1), ext(b.y1), ext(b.x2), ext(b.y2)}); }

Box box_from_array(const json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("box must be a 4-array");
  return Box{unext(j[0]), unext(j[1]), unext(j[2]), unext(j[3])};
}

json counts_json(const Counts& c) {
  return {{"certifiably_correct", c.certifiably_correct},
          {"ground_truth", c.ground_truth},
          {"max_predicted", c.max_predicted},
          {"clean_correct", c.clean_correct},
          {"clean_predicted", c.clean_predicted}};
}

Counts counts_from(const json& j) {
  Counts c;
  c.certifiably_correct = j.at("certifiably_correct").get<std::size_t>();
  c.ground_truth = j.at("ground_truth").get<std::size_t>();
  c.max_predicted = j.at("max_predicted").get<std::size_t>();
  c.clean_correct = j.at("clean_correct").get<std::size_t>();
  c.clean_predicted = j.at("clean_predicted").get<std::size_t>();
  return c;
}

json pr_json(const PRPoint& p) {
  return {{"threshold", p.threshold},         {"precision", p.precision},
          {"recall", p.recall},               {"cert_precision", p.cert_precision},
          {"cert_recall", p.cert_recall},     {"counts", counts_json(p.counts)}};
}

PRPoint pr_from(const json& j) {
  PRPoint p;
  p.threshold = j.at("threshold").get<double>();
  p.precision = j.at("precision").get<double>();
  p.recall = j.at("recall").get<double>();
  p.cert_precision = j.at("cert_precision").get<double>();
  p.cert_recall = j.at("cert_recall").get<double>();
  p.counts = counts_from(j.at("counts"));
  return p;
}

json config_json(const SmoothingConfig& c) {
  return {{"sigma", c.sigma},
          {"samples", c.samples},
          {"epsilon", c.epsilon},
          {"alpha", c.alpha},
          {"tau", c.tau},
          {"sort", to_string(c.sort)},
          {"bin", to_string(c.bin)},
          {"seed", c.seed},
          {"coverage", to_string(c.coverage)},
          {"max_count", to_string(c.max_count)}};
}

SmoothingConfig config_from(const json& j) {
  SmoothingConfig c;
  c.sigma = j.at("sigma").get<double>();
  c.samples = j.at("samples").get<std::size_t>();
  c.epsilon = j.at("epsilon").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.tau = j.at("tau").get<double>();
  c.sort = parse_sort_mode(j.at("sort").get<std::string>());
  c.bin = parse_bin_mode(j.at("bin").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.coverage = parse_coverage_formula(j.at("coverage").get<std::string>());
  c.max_count = parse_max_count_rule(j.at("max_count").get<std::string>());
  return c;
}

json gt_json(const GroundTruth& g) {
  return {{"box", box_array(g.box)}, {"label", g.label}};
}

json certified_box_json(const CertifiedBox& b) {
  json j = {{"bin", {{"label", b.bin.label}, {"cell", b.bin.cell}}},
            {"slot", b.slot},
            {"box", box_array(b.median.box)},
            {"label", b.median.label},
            {"objectness", b.median.objectness},
            {"lower", box_array(b.lower)},
            {"upper", box_array(b.upper)},
            {"label_lo", ext(b.label_lo)},
            {"label_hi", ext(b.label_hi)},
            {"certified_label", b.certified_label},
            {"reordered", b.reordered},
            {"matched_gt", b.matched_gt},
            {"certifiably_correct", b.certifiably_correct}};
  j["worst_iou"] = b.worst_iou_vs_gt ? json(*b.worst_iou_vs_gt) : json(nullptr);
  return j;
}

CertifiedBox certified_box_from(const json& j) {
  CertifiedBox b;
  b.bin = BinKey{j.at("bin").at("label").get<int>(), j.at("bin").at("cell").get<int>()};
  b.slot = j.at("slot").get<std::size_t>();
  b.median = Detection{box_from_array(j.at("box")), j.at("label").get<int>(),
                       j.at("objectness").get<double>()};
  b.lower = box_from_array(j.at("lower"));
  b.upper = box_from_array(j.at("upper"));
  b.label_lo = unext(j.at("label_lo"));
  b.label_hi = unext(j.at("label_hi"));
  b.certified_label = j.at("certified_label").get<bool>();
  b.reordered = j.value("reordered", false);
  b.matched_gt = j.value("matched_gt", -1);
  b.certifiably_correct = j.value("certifiably_correct", false);
  if (const auto w = j.find("worst_iou"); w != j.end() && w->is_number()) {
    b.worst_iou_vs_gt = w->get<double>();
  }
  return b;
}

}  // namespace

std::string_view to_string(CoverageFormula f) noexcept {
  return f == CoverageFormula::binomial_cdf ? "binomial" : "literal";
}

std::string_view to_string(MaxCountRule r) noexcept {
  return r == MaxCountRule::possibly_present ? "possibly-present" : "certifiably-present";
}

CoverageFormula parse_coverage_formula(std::string_view text) {
  if (text == "binomial") return CoverageFormula::binomial_cdf;
  if (text == "literal") return CoverageFormula::literal_sum;
  throw std::invalid_argument("unknown coverage formula: " + std::string(text));
}

MaxCountRule parse_max_count_rule(std::string_view text) {
  if (text == "possibly-present") return MaxCountRule::possibly_present;
  if (text == "certifiably-present") return MaxCountRule::certifiably_present;
  throw std::invalid_argument("unknown max-count rule: " + std::string(text));
}

APReport evaluate_report(CertificateReport& report, double tau, MaxCountRule rule) {
  std::vector<PRPoint> points;
  for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
    std::vector<ImageCertificate> level;
    for (auto& img : report.images) {
      if (img.levels.size() != report.thresholds.size()) {
        throw std::invalid_argument("image '" + img.id + "' lacks some threshold levels");
      }
      assess_certificate(img.levels[t], img.ground_truth, tau, rule);
      level.push_back(img.levels[t]);
    }
    points.push_back(certified_pr(report.thresholds[t], level));
  }
  return make_ap_report(std::move(points));
}

std::string render_report(const CertificateReport& r) {
  json images = json::array();
  for (const auto& img : r.images) {
    json gts = json::array();
    for (const auto& g : img.ground_truth) gts.push_back(gt_json(g));
    json levels = json::array();
    for (std::size_t t = 0; t < img.levels.size(); ++t) {
      const auto& lv = img.levels[t];
      json boxes = json::array();
      for (const auto& b : lv.boxes) boxes.push_back(certified_box_json(b));
      levels.push_back({{"objectness_threshold", r.thresholds.at(t)},
                        {"slots",
                         {{"total", lv.slots.total},
                          {"possibly_present", lv.slots.possibly_present},
                          {"certifiably_present", lv.slots.certifiably_present}}},
                        {"counts", counts_json(lv.counts)},
                        {"boxes", boxes}});
    }
    images.push_back({{"id", img.id},
                      {"width", img.size.width},
                      {"height", img.size.height},
                      {"ground_truth", gts},
                      {"levels", levels}});
  }
  json pr = json::array();
  for (const auto& p : r.ap.points) pr.push_back(pr_json(p));
  const json doc = {{"config", config_json(r.config)},
                    {"source", r.source},
                    {"thresholds", r.thresholds},
                    {"images", images},
                    {"pr", pr},
                    {"ap_clean", r.ap.ap_clean},
                    {"ap_cert_lower", r.ap.ap_cert_lower},
                    {"stats",
                     {{"images", r.stats.images},
                      {"detector_calls", r.stats.detector_calls},
                      {"failed_images", r.stats.failed_images}}}};
  return doc.dump(1) + "\n";
}

CertificateReport parse_report(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed certificate file: ") + e.what());
  }
  try {
    CertificateReport r;
    r.config = config_from(doc.at("config"));
    r.source = doc.value("source", std::string{});
    r.thresholds = doc.at("thresholds").get<std::vector<double>>();
    for (const auto& img : doc.at("images")) {
      ImageRecord rec;
      rec.id = img.at("id").get<std::string>();
      rec.size = ImageSize{img.at("width").get<double>(), img.at("height").get<double>()};
      for (const auto& g : img.at("ground_truth")) {
        rec.ground_truth.push_back({box_from_array(g.at("box")), g.at("label").get<int>()});
      }
      for (const auto& lv : img.at("levels")) {
        ImageCertificate c;
        c.slots.total = lv.at("slots").at("total").get<std::size_t>();
        c.slots.possibly_present = lv.at("slots").at("possibly_present").get<std::size_t>();
        c.slots.certifiably_present = lv.at("slots").at("certifiably_present").get<std::size_t>();
        c.counts = counts_from(lv.at("counts"));
        for (const auto& b : lv.at("boxes")) c.boxes.push_back(certified_box_from(b));
        rec.levels.push_back(std::move(c));
      }
      r.images.push_back(std::move(rec));
    }
    for (const auto& p : doc.at("pr")) r.ap.points.push_back(pr_from(p));
    r.ap.ap_clean = doc.at("ap_clean").get<double>();
    r.ap.ap_cert_lower = doc.at("ap_cert_lower").get<double>();
    const auto& st = doc.at("stats");
    r.stats.images = st.at("images").get<std::size_t>();
    r.stats.detector_calls = st.at("detector_calls").get<std::size_t>();
    r.stats.failed_images = st.at("failed_images").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("incomplete certificate file: ") + e.what());
  }
}

std::string render_pr_csv(const std::vector<PRPoint>& points) {
  std::ostringstream out;
  out << "threshold,precision,recall,cert_precision,cert_recall,certifiably_correct,"
         "ground_truth,max_predicted,clean_correct,clean_predicted\n";
  char buf[256];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.4g,%.10g,%.10g,%.10g,%.10g,%zu,%zu,%zu,%zu,%zu\n",
                  p.threshold, p.precision, p.recall, p.cert_precision, p.cert_recall,
                  p.counts.certifiably_correct, p.counts.ground_truth, p.counts.max_predicted,
                  p.counts.clean_correct, p.counts.clean_predicted);
    out << buf;
  }
  return out.str();
}

std::string render_scenes(const std::vector<SyntheticScene>& scenes) {
  json arr = json::array();
  for (const auto& s : scenes) {
    json objs = json::array();
    for (const auto& o : s.objects) {
      objs.push_back({{"x1", o.box.x1},   {"y1", o.box.y1},     {"x2", o.box.x2},
                      {"y2", o.box.y2},   {"label", o.label}, {"objectness", o.base_objectness}});
    }
    arr.push_back({{"id", s.id},
                   {"width", s.width},
                   {"height", s.height},
                   {"background", s.background},
                   {"objects", objs}});
  }
  return json{{"scenes", arr}}.dump(1) + "\n";
}

std::vector<SyntheticScene> parse_scenes(std::string_view text) {
  try {
    const json doc = json::parse(text);
    std::vector<SyntheticScene> scenes;
    for (const auto& s : doc.at("scenes")) {
      SyntheticScene scene;
      scene.id = s.at("id").get<std::uint64_t>();
      scene.width = s.at("width").get<std::size_t>();
      scene.height = s.at("height").get<std::size_t>();
      scene.background = s.value("background", 0.2);
      for (const auto& o : s.at("objects")) {
        SceneObject obj{Box{o.at("x1").get<double>(), o.at("y1").get<double>(),
                            o.at("x2").get<double>(), o.at("y2").get<double>()},
                        o.at("label").get<int>(), o.value("objectness", 1.0)};
        if (!obj.box.ordered() || obj.box.x1 < 0 || obj.box.y1 < 0 ||
            obj.box.x2 > static_cast<double>(scene.width) ||
            obj.box.y2 > static_cast<double>(scene.height)) {
          throw std::invalid_argument("scene " + std::to_string(scene.id) +
                                      ": object box outside the image");
        }
        scene.objects.push_back(obj);
      }
      scenes.push_back(std::move(scene));
    }
    return scenes;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed scene file: ") + e.what());
  }
}

}  // namespace medsmooth
