#include "medsmooth/offline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace medsmooth {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& msg) { throw OfflineRunError(msg); }

double number_field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) fail(where + ": missing numeric field '" + key + "'");
  return it->get<double>();
}

Box box_fields(const json& obj, const std::string& where) {
  Box b{number_field(obj, "x1", where), number_field(obj, "y1", where),
        number_field(obj, "x2", where), number_field(obj, "y2", where)};
  if (!b.finite()) fail(where + ": non-finite box coordinate");
  if (!b.ordered()) fail(where + ": box corners out of order");
  return b;
}

int label_field(const json& obj, const std::string& where) {
  const auto it = obj.find("label");
  if (it == obj.end() || !it->is_number_integer() || it->get<long long>() < 0) {
    fail(where + ": 'label' must be a non-negative integer");
  }
  return it->get<int>();
}

json box_json(const Box& b) { return {{"x1", b.x1}, {"y1", b.y1}, {"x2", b.x2}, {"y2", b.y2}}; }

}  // namespace

OfflineRun load_offline_run(const fs::path& path) {
  const fs::path dir = fs::is_directory(path) ? path : path.parent_path();
  const fs::path manifest_path = fs::is_directory(path) ? path / "manifest.json" : path;

  std::ifstream in(manifest_path);
  if (!in) fail("cannot open manifest " + manifest_path.string());
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    fail("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  if (!m.is_object()) fail("manifest must be a JSON object");

  OfflineRun run;
  const std::string where = "manifest";
  run.manifest.detector = m.value("detector", std::string{});
  run.manifest.sigma = number_field(m, "sigma", where);
  if (!(run.manifest.sigma > 0.0)) fail("manifest: sigma must be positive");
  const auto n_it = m.find("n");
  if (n_it == m.end() || !n_it->is_number_integer() || n_it->get<long long>() < 1) {
    fail("manifest: 'n' must be a positive integer");
  }
  run.manifest.n = n_it->get<std::size_t>();
  if (const auto s = m.find("seed"); s != m.end() && s->is_number_integer()) {
    run.manifest.seed = s->get<std::uint64_t>();
  }
  const auto images = m.find("images");
  if (images == m.end() || !images->is_array()) fail("manifest: 'images' must be an array");

  std::map<std::string, std::size_t> index;
  for (const auto& entry : *images) {
    OfflineImage img;
    if (entry.is_string()) {
      img.id = entry.get<std::string>();
    } else if (entry.is_object() && entry.contains("id") && entry["id"].is_string()) {
      img.id = entry["id"].get<std::string>();
      if (entry.contains("width") || entry.contains("height")) {
        img.size = ImageSize{number_field(entry, "width", "image " + img.id),
                             number_field(entry, "height", "image " + img.id)};
      }
      if (const auto gt = entry.find("ground_truth"); gt != entry.end()) {
        if (!gt->is_array()) fail("image " + img.id + ": 'ground_truth' must be an array");
        for (const auto& g : *gt) {
          img.ground_truth.push_back(
              {box_fields(g, "image " + img.id + " ground truth"),
               label_field(g, "image " + img.id + " ground truth")});
        }
      }
    } else {
      fail("manifest: image entries must be strings or objects with an 'id'");
    }
    if (index.count(img.id)) fail("manifest: duplicate image id '" + img.id + "'");
    index[img.id] = run.images.size();
    img.samples.resize(run.manifest.n);
    run.images.push_back(std::move(img));
  }
  if (const auto failed = m.find("failed"); failed != m.end() && failed->is_array()) {
    for (const auto& f : *failed) {
      if (f.is_object()) run.failed.push_back({f.value("id", std::string{}), f.value("reason", std::string{})});
    }
  }

  std::vector<fs::path> record_files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") record_files.push_back(e.path());
  }
  std::sort(record_files.begin(), record_files.end());

  std::vector<std::vector<bool>> seen(run.images.size(), std::vector<bool>(run.manifest.n, false));
  for (const auto& file : record_files) {
    std::ifstream rin(file);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(rin, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const std::string at = file.filename().string() + ":" + std::to_string(line_no);
      json rec;
      try {
        rec = json::parse(line);
      } catch (const json::exception& e) {
        fail(at + ": malformed record: " + e.what());
      }
      if (!rec.is_object() || !rec.contains("image_id") || !rec["image_id"].is_string()) {
        fail(at + ": record needs a string 'image_id'");
      }
      const std::string id = rec["image_id"].get<std::string>();
      const auto it = index.find(id);
      if (it == index.end()) fail(at + ": image '" + id + "' is not listed in the manifest");
      if (!rec.contains("sample_index") || !rec["sample_index"].is_number_integer()) {
        fail(at + ": record for image '" + id + "' needs an integer 'sample_index'");
      }
      const long long s = rec["sample_index"].get<long long>();
      if (s < 0 || static_cast<std::size_t>(s) >= run.manifest.n) {
        fail(at + ": image '" + id + "' sample " + std::to_string(s) + " outside [0, n)");
      }
      if (seen[it->second][static_cast<std::size_t>(s)]) {
        fail(at + ": duplicate record for image '" + id + "' sample " + std::to_string(s));
      }
      seen[it->second][static_cast<std::size_t>(s)] = true;

      auto& dets = run.images[it->second].samples[static_cast<std::size_t>(s)];
      const auto d = rec.find("detections");
      if (d != rec.end() && !d->is_array()) fail(at + ": 'detections' must be an array");
      if (d != rec.end()) {
        for (const auto& det : *d) {
          const std::string w = at + " (image '" + id + "' sample " + std::to_string(s) + ")";
          const double obj = number_field(det, "objectness", w);
          if (!(obj >= 0.0 && obj <= 1.0)) fail(w + ": objectness outside [0, 1]");
          dets.push_back({box_fields(det, w), label_field(det, w), obj});
        }
      }
    }
  }

  for (std::size_t i = 0; i < run.images.size(); ++i) {
    const auto missing = std::count(seen[i].begin(), seen[i].end(), false);
    if (missing > 0) {
      const auto first = std::find(seen[i].begin(), seen[i].end(), false) - seen[i].begin();
      fail("image '" + run.images[i].id + "' is missing " + std::to_string(missing) +
           " of " + std::to_string(run.manifest.n) + " samples (first missing: " +
           std::to_string(first) + ")");
    }
  }
  return run;
}

void write_offline_run(const OfflineRun& run, const fs::path& dir) {
  fs::create_directories(dir / "detections");
  json images = json::array();
  for (std::size_t i = 0; i < run.images.size(); ++i) {
    const auto& img = run.images[i];
    json entry = {{"id", img.id}};
    if (img.size) {
      entry["width"] = img.size->width;
      entry["height"] = img.size->height;
    }
    json gts = json::array();
    for (const auto& g : img.ground_truth) {
      auto gj = box_json(g.box);
      gj["label"] = g.label;
      gts.push_back(gj);
    }
    entry["ground_truth"] = gts;
    images.push_back(entry);

    std::ofstream out(dir / "detections" / ("image_" + std::to_string(i) + ".jsonl"));
    for (std::size_t s = 0; s < img.samples.size(); ++s) {
      json dets = json::array();
      for (const auto& d : img.samples[s]) {
        auto dj = box_json(d.box);
        dj["label"] = d.label;
        dj["objectness"] = d.objectness;
        dets.push_back(dj);
      }
      out << json{{"image_id", img.id}, {"sample_index", s}, {"detections", dets}}.dump() << '\n';
    }
  }
  json failed = json::array();
  for (const auto& f : run.failed) failed.push_back({{"id", f.id}, {"reason", f.reason}});
  const json manifest = {{"detector", run.manifest.detector}, {"sigma", run.manifest.sigma},
                         {"n", run.manifest.n},               {"seed", run.manifest.seed},
                         {"images", images},                  {"failed", failed}};
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
}

void check_run_parameters(const OfflineRun& run, std::optional<double> sigma,
                          std::optional<std::size_t> n) {
  if (sigma && std::abs(*sigma - run.manifest.sigma) > 1e-12 * std::max(1.0, *sigma)) {
    std::ostringstream msg;
    msg << "offline run was sampled with sigma " << run.manifest.sigma << " but sigma " << *sigma
        << " was requested";
    fail(msg.str());
  }
  if (n && *n != run.manifest.n) {
    fail("offline run has " + std::to_string(run.manifest.n) + " samples per image but " +
         std::to_string(*n) + " were requested");
  }
}

}  // namespace medsmooth
