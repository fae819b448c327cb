#include "stereoscope/serialize.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace stereoscope {

using nlohmann::json;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open for writing: " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad ") + what + " JSON: " + e.what());
  }
}

json rgb_to_json(const Rgb& c) { return json::array({c.r, c.g, c.b}); }

Rgb rgb_from_json(const json& j) {
  return {j.at(0).get<float>(), j.at(1).get<float>(), j.at(2).get<float>()};
}

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

// JSON has no infinity literal; +inf PSNR travels as the string "inf".
json finite_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

std::string rig_to_json(const CameraRig& rig) {
  json j{{"baseline_m", rig.baseline_m}, {"focal_px", rig.focal_px}, {"width", rig.width_px},
         {"height", rig.height_px},      {"cx", rig.cx},             {"cy", rig.cy},
         {"format", rig.is_converged() ? "converged" : "parallel"}};
  if (rig.is_converged()) j["convergence_m"] = rig.convergence_m();
  return j.dump(2) + "\n";
}

CameraRig rig_from_json(const std::string& text) {
  json j = parse(text, "rig");
  try {
    CameraRig rig;
    rig.baseline_m = j.at("baseline_m").get<double>();
    rig.focal_px = j.at("focal_px").get<double>();
    rig.width_px = j.at("width").get<int>();
    rig.height_px = j.at("height").get<int>();
    rig.cx = j.at("cx").get<double>();
    rig.cy = j.at("cy").get<double>();
    std::string format = j.at("format").get<std::string>();
    if (format == "parallel") {
      rig.format = ParallelFormat{};
    } else if (format == "converged") {
      rig.format = ConvergedFormat{j.at("convergence_m").get<double>()};
    } else {
      throw Error(ErrorKind::InvalidArgument, "rig format must be parallel or converged");
    }
    rig.validate();
    return rig;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad rig JSON: ") + e.what());
  }
}

CameraRig load_rig(const std::filesystem::path& path) { return rig_from_json(read_text(path)); }

void save_rig(const CameraRig& rig, const std::filesystem::path& path) {
  write_text(path, rig_to_json(rig));
}

std::string scene_to_json(const Scene& scene) {
  json prims = json::array();
  for (const Primitive& p : scene.primitives) {
    json shape;
    if (const auto* s = std::get_if<Sphere>(&p.shape)) {
      shape = {{"type", "sphere"}, {"center", vec3_to_json(s->center)}, {"radius", s->radius}};
    } else if (const auto* pl = std::get_if<PlaneShape>(&p.shape)) {
      shape = {{"type", "plane"}, {"point", vec3_to_json(pl->point)},
               {"normal", vec3_to_json(pl->normal)}};
    } else {
      const auto& q = std::get<Quad>(p.shape);
      shape = {{"type", "quad"},
               {"corner", vec3_to_json(q.corner)},
               {"edge_u", vec3_to_json(q.edge_u)},
               {"edge_v", vec3_to_json(q.edge_v)}};
    }
    json material;
    if (const auto* m = std::get_if<SolidColor>(&p.material)) {
      material = {{"type", "solid"}, {"rgb", rgb_to_json(m->rgb)}};
    } else if (const auto* c = std::get_if<CheckerTexture>(&p.material)) {
      material = {{"type", "checker"},
                  {"rgb_a", rgb_to_json(c->rgb_a)},
                  {"rgb_b", rgb_to_json(c->rgb_b)},
                  {"cell_m", c->cell_m}};
    } else {
      material = {{"type", "mirror"},
                  {"reflectivity", std::get<MirrorFinish>(p.material).reflectivity}};
    }
    prims.push_back({{"id", p.id}, {"shape", shape}, {"material", material}});
  }
  json j{{"background", rgb_to_json(scene.background)}, {"primitives", prims}};
  return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
  json j = parse(text, "scene");
  try {
    Scene scene;
    scene.background = rgb_from_json(j.at("background"));
    for (const json& pj : j.at("primitives")) {
      Primitive p;
      p.id = pj.at("id").get<int>();
      const json& shape = pj.at("shape");
      std::string st = shape.at("type").get<std::string>();
      if (st == "sphere") {
        p.shape = Sphere{vec3_from_json(shape.at("center")), shape.at("radius").get<double>()};
      } else if (st == "plane") {
        p.shape = PlaneShape{vec3_from_json(shape.at("point")), vec3_from_json(shape.at("normal"))};
      } else if (st == "quad") {
        p.shape = Quad{vec3_from_json(shape.at("corner")), vec3_from_json(shape.at("edge_u")),
                       vec3_from_json(shape.at("edge_v"))};
      } else {
        throw Error(ErrorKind::InvalidArgument, "unknown shape type: " + st);
      }
      const json& mat = pj.at("material");
      std::string mt = mat.at("type").get<std::string>();
      if (mt == "solid") {
        p.material = SolidColor{rgb_from_json(mat.at("rgb"))};
      } else if (mt == "checker") {
        p.material = CheckerTexture{rgb_from_json(mat.at("rgb_a")), rgb_from_json(mat.at("rgb_b")),
                                    mat.at("cell_m").get<double>()};
      } else if (mt == "mirror") {
        p.material = MirrorFinish{mat.at("reflectivity").get<double>()};
      } else {
        throw Error(ErrorKind::InvalidArgument, "unknown material type: " + mt);
      }
      scene.primitives.push_back(std::move(p));
    }
    scene.validate();
    return scene;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("bad scene JSON: ") + e.what());
  }
}

Scene load_scene(const std::filesystem::path& path) { return scene_from_json(read_text(path)); }

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  write_text(path, scene_to_json(scene));
}

std::string metric_report_to_json(const MetricReport& report) {
  json per = json::array();
  for (const FrameMetrics& f : report.per_frame)
    per.push_back({{"psnr_db", finite_or_inf(f.psnr_db)},
                   {"ssim", f.ssim},
                   {"ms_ssim", f.ms_ssim}});
  json j{{"psnr_db", finite_or_inf(report.psnr_db)},
         {"ssim", report.ssim},
         {"ms_ssim", report.ms_ssim},
         {"per_frame", per},
         {"valid_fraction", report.valid_fraction},
         {"ms_scales", report.ms_scales}};
  return j.dump(2) + "\n";
}

std::string format_verdict_to_json(const FormatVerdict& verdict) {
  json j{{"label", to_string(verdict.label)},
         {"stats",
          {{"pos_fraction", verdict.stats.pos_fraction},
           {"neg_fraction", verdict.stats.neg_fraction},
           {"disparity_variance_px2", verdict.stats.disparity_variance_px2},
           {"vertical_disparity_mean_px", verdict.stats.vertical_disparity_mean_px},
           {"confidence", verdict.stats.confidence}}}};
  return j.dump(2) + "\n";
}

std::string ambiguity_report_to_json(const AmbiguityReport& report) {
  json j{{"mirror_mae_px", report.mirror_mae_px},
         {"frame_mae_px", report.frame_mae_px},
         {"mirror_shift_px", report.mirror_shift_px},
         {"frame_shift_px", report.frame_shift_px},
         {"verdict", report.verdict}};
  return j.dump(2) + "\n";
}

}  // namespace stereoscope
