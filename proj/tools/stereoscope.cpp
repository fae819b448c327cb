#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "run_report.hpp"
#include "stereoscope/analysis.hpp"
#include "stereoscope/dwi.hpp"
#include "stereoscope/flow.hpp"
#include "stereoscope/image_io.hpp"
#include "stereoscope/metrics.hpp"
#include "stereoscope/parallel.hpp"
#include "stereoscope/pipeline.hpp"
#include "stereoscope/render.hpp"
#include "stereoscope/serialize.hpp"
#include "stereoscope/version.hpp"

using namespace stereoscope;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  int workers = 0;
  uint64_t seed = 0;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--workers", c.workers,
                  "worker threads (default: cores or STEREOSCOPE_WORKERS)");
  sub->add_option("--seed", c.seed, "seed for randomized paths");
  sub->add_flag("--quiet", c.quiet, "suppress log lines");
}

struct RunContext {
  cli::RunReport report;
  fs::path out_dir;
  int workers = 0;

  void input_file(const fs::path& p) {
    report.inputs.push_back({p.string(), cli::sha256_file(p)});
  }
  void input_dir(const fs::path& p) {
    report.inputs.push_back({p.string(), cli::sha256_dir(p)});
  }
  void output(const fs::path& p) { report.outputs.push_back(p.string()); }
};

fs::path require_file(const std::string& p) {
  if (!fs::is_regular_file(p))
    throw Error(ErrorKind::InvalidArgument, "input file not found: " + p);
  return p;
}

fs::path require_dir(const std::string& p) {
  if (!fs::is_directory(p))
    throw Error(ErrorKind::InvalidArgument, "input directory not found: " + p);
  return p;
}

fs::path make_out_dir(const std::string& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory: " + p);
  return p;
}

int execute(const std::string& name, const Common& c, const std::string& out_dir,
            const std::function<void(RunContext&)>& body) {
  RunContext ctx;
  ctx.report.command = name;
  ctx.report.version = kVersion;
  ctx.report.worker_count = resolve_workers(c.workers);
  ctx.workers = c.workers;
  auto start = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (!out_dir.empty()) ctx.out_dir = make_out_dir(out_dir);
    body(ctx);
  } catch (const Error& e) {
    ctx.report.error = e.what();
    code = e.exit_code();
  } catch (const fs::filesystem_error& e) {
    ctx.report.error = e.what();
    code = 4;
  } catch (const std::exception& e) {
    ctx.report.error = e.what();
    code = 3;
  }
  ctx.report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!ctx.out_dir.empty()) {
    // The on-disk report is an artifact: it omits wall_time_s so a rerun
    // stays byte-identical.
    ctx.report.outputs.push_back((ctx.out_dir / "report.json").string());
    std::ofstream f(ctx.out_dir / "report.json");
    if (f) f << ctx.report.to_json(false).dump(2) << "\n";
  }
  std::cout << ctx.report.to_json(true).dump(2) << std::endl;
  if (!c.quiet) {
    if (code == 0) {
      std::cerr << "[stereoscope] " << name << " ok\n";
    } else {
      std::cerr << "[stereoscope] " << name << " failed (" << code
                << "): " << ctx.report.error << "\n";
    }
  }
  return code;
}

std::vector<Mask> holes_to_valid(const std::vector<Mask>& holes) {
  std::vector<Mask> valid = holes;
  for (Mask& m : valid)
    for (auto& v : m.v) v = !v;
  return valid;
}

json rect_json(const CropRect& r) {
  return {{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stereoscope: stereo geometry, synthetic oracle, DWI baseline and "
               "video data pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  int exit_code = 0;

  // ---- render -------------------------------------------------------------
  auto* render_cmd = app.add_subcommand("render", "ray-trace a stereo pair with depth layers");
  static Common render_common;
  static std::string render_scene, render_rig, render_out;
  static bool render_demo = false;
  render_cmd->add_option("--scene", render_scene, "scene JSON (omit with --demo-mirror)");
  render_cmd->add_option("--rig", render_rig, "rig JSON")->required();
  render_cmd->add_option("--out", render_out, "output directory")->required();
  render_cmd->add_flag("--demo-mirror", render_demo, "use the built-in mirror demo scene");
  add_common(render_cmd, render_common);
  render_cmd->callback([&] {
    exit_code = execute("render", render_common, render_out, [&](RunContext& ctx) {
      CameraRig rig = load_rig(require_file(render_rig));
      ctx.input_file(render_rig);
      Scene scene;
      if (render_demo) {
        scene = make_mirror_demo_scene(rig);
      } else {
        if (render_scene.empty())
          throw Error(ErrorKind::InvalidArgument, "--scene or --demo-mirror required");
        scene = load_scene(require_file(render_scene));
        ctx.input_file(render_scene);
      }
      RenderOutput out = render_stereo(scene, rig, ctx.workers);
      write_png(ctx.out_dir / "left.png", out.left);
      write_png(ctx.out_dir / "right.png", out.right);
      write_pfm(ctx.out_dir / "depth_surface.pfm", out.layers_left.surface);
      write_pfm(ctx.out_dir / "depth_virtual.pfm", out.layers_left.virtual_depth);
      write_mask_png(ctx.out_dir / "mirror_mask.png", out.layers_left.mirror_mask);
      write_pfm(ctx.out_dir / "gt_disparity.pfm", out.gt_disparity_left);
      for (const char* name : {"left.png", "right.png", "depth_surface.pfm",
                               "depth_virtual.pfm", "mirror_mask.png", "gt_disparity.pfm"})
        ctx.output(ctx.out_dir / name);
      ctx.report.payload = {
          {"width", rig.width_px},
          {"height", rig.height_px},
          {"mirror_pixel_count", out.layers_left.mirror_mask.count_true()},
          {"gt_valid_fraction",
           static_cast<double>(out.gt_disparity_left.count_valid()) /
               (static_cast<double>(rig.width_px) * rig.height_px)}};
    });
  });

  // ---- convert-dwi --------------------------------------------------------
  auto* dwi_cmd = app.add_subcommand("convert-dwi", "depth-warp-inpaint a left clip");
  static Common dwi_common;
  static std::string dwi_left, dwi_depth, dwi_rig, dwi_out, dwi_fill = "horizontal";
  static std::vector<double> dwi_fill_rgb{0.5, 0.5, 0.5};
  dwi_cmd->add_option("--left", dwi_left, "left-eye clip directory")->required();
  dwi_cmd->add_option("--depth", dwi_depth, "depth sequence directory")->required();
  dwi_cmd->add_option("--rig", dwi_rig, "rig JSON")->required();
  dwi_cmd->add_option("--fill", dwi_fill, "hole fill: horizontal | constant")
      ->check(CLI::IsMember({"horizontal", "constant"}));
  dwi_cmd->add_option("--fill-rgb", dwi_fill_rgb, "constant fill color")
      ->expected(3)
      ->delimiter(',');
  dwi_cmd->add_option("--out", dwi_out, "output directory")->required();
  add_common(dwi_cmd, dwi_common);
  dwi_cmd->callback([&] {
    exit_code = execute("convert-dwi", dwi_common, dwi_out, [&](RunContext& ctx) {
      CameraRig rig = load_rig(require_file(dwi_rig));
      ctx.input_file(dwi_rig);
      Clip left = load_clip(require_dir(dwi_left));
      ctx.input_dir(dwi_left);
      std::vector<DepthMap> depths = load_depth_sequence(require_dir(dwi_depth));
      ctx.input_dir(dwi_depth);

      InpaintStrategy strategy;
      if (dwi_fill == "horizontal") {
        strategy = HorizontalExtend{};
      } else {
        strategy = ConstantFill{{static_cast<float>(dwi_fill_rgb[0]),
                                 static_cast<float>(dwi_fill_rgb[1]),
                                 static_cast<float>(dwi_fill_rgb[2])}};
      }
      std::vector<Mask> holes;
      Clip out = dwi_convert(left, depths, rig, strategy, ctx.workers, &holes);
      save_clip(out, ctx.out_dir);
      ctx.output(ctx.out_dir / "manifest.json");
      fs::path holes_dir = ctx.out_dir / "holes";
      fs::create_directories(holes_dir);
      double hole_sum = 0;
      for (size_t i = 0; i < holes.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%06zu.png", i);
        write_mask_png(holes_dir / name, holes[i]);
        hole_sum += static_cast<double>(holes[i].count_true()) /
                    (static_cast<double>(holes[i].width) * holes[i].height);
      }
      ctx.output(holes_dir);
      json payload{{"frames", out.frame_count()},
                   {"fill", dwi_fill},
                   {"hole_fraction_mean", holes.empty() ? 0.0 : hole_sum / holes.size()}};
      if (dwi_fill == "constant") payload["fill_rgb"] = dwi_fill_rgb;
      ctx.report.payload = payload;
    });
  });

  // ---- metrics ------------------------------------------------------------
  auto* metrics_cmd = app.add_subcommand("metrics", "PSNR/SSIM/MS-SSIM between two clips");
  static Common metrics_common;
  static std::string metrics_a, metrics_b, metrics_mask, metrics_out;
  static int metrics_scales = 0;
  metrics_cmd->add_option("--a", metrics_a, "first clip directory")->required();
  metrics_cmd->add_option("--b", metrics_b, "second clip directory")->required();
  metrics_cmd->add_option("--mask", metrics_mask, "hole-mask directory (nonzero = exclude)");
  metrics_cmd->add_option("--ms-scales", metrics_scales, "MS-SSIM scales (0 = auto)");
  metrics_cmd->add_option("--out", metrics_out, "optional report directory");
  add_common(metrics_cmd, metrics_common);
  metrics_cmd->callback([&] {
    exit_code = execute("metrics", metrics_common, metrics_out, [&](RunContext& ctx) {
      Clip a = load_clip(require_dir(metrics_a));
      ctx.input_dir(metrics_a);
      Clip b = load_clip(require_dir(metrics_b));
      ctx.input_dir(metrics_b);
      std::optional<std::vector<Mask>> valid;
      if (!metrics_mask.empty()) {
        require_dir(metrics_mask);
        ctx.input_dir(metrics_mask);
        std::vector<Mask> holes;
        for (int i = 0; i < a.frame_count(); ++i) {
          char name[32];
          std::snprintf(name, sizeof(name), "frame_%06d.png", i);
          holes.push_back(read_mask_png(fs::path(metrics_mask) / name));
        }
        valid = holes_to_valid(holes);
      }
      int scales = metrics_scales > 0 ? metrics_scales : max_ms_scales(a.width(), a.height());
      if (scales == 0)
        throw Error(ErrorKind::TooSmall, "frames too small for SSIM (min dimension 11)");
      MetricReport rep =
          clip_metrics(a, b, valid ? &*valid : nullptr, scales, ctx.workers);
      ctx.report.payload = json::parse(metric_report_to_json(rep));
    });
  });

  // ---- analyze ------------------------------------------------------------
  auto* analyze_cmd = app.add_subcommand("analyze", "classify the stereo format of a pair");
  static Common analyze_common;
  static std::string analyze_left, analyze_right, analyze_out;
  static int analyze_max_disp = 24;
  analyze_cmd->add_option("--left", analyze_left, "left clip directory")->required();
  analyze_cmd->add_option("--right", analyze_right, "right clip directory")->required();
  analyze_cmd->add_option("--max-disp", analyze_max_disp, "block-match search range");
  analyze_cmd->add_option("--out", analyze_out, "optional report directory");
  add_common(analyze_cmd, analyze_common);
  analyze_cmd->callback([&] {
    exit_code = execute("analyze", analyze_common, analyze_out, [&](RunContext& ctx) {
      Clip left = load_clip(require_dir(analyze_left));
      ctx.input_dir(analyze_left);
      Clip right = load_clip(require_dir(analyze_right));
      ctx.input_dir(analyze_right);
      ClassifyParams params;
      params.match.max_abs_disp = analyze_max_disp;
      FormatVerdict verdict = classify_format(left, right, params, ctx.workers);
      ctx.report.payload = json::parse(format_verdict_to_json(verdict));
    });
  });

  // ---- ambiguity ----------------------------------------------------------
  auto* amb_cmd = app.add_subcommand("ambiguity", "depth-ambiguity report on a mirror scene");
  static Common amb_common;
  static std::string amb_rig, amb_scene, amb_out;
  amb_cmd->add_option("--rig", amb_rig, "rig JSON")->required();
  amb_cmd->add_option("--scene", amb_scene, "scene JSON (default: mirror demo scene)");
  amb_cmd->add_option("--out", amb_out, "optional report directory");
  add_common(amb_cmd, amb_common);
  amb_cmd->callback([&] {
    exit_code = execute("ambiguity", amb_common, amb_out, [&](RunContext& ctx) {
      CameraRig rig = load_rig(require_file(amb_rig));
      ctx.input_file(amb_rig);
      Scene scene;
      if (amb_scene.empty()) {
        scene = make_mirror_demo_scene(rig);
      } else {
        scene = load_scene(require_file(amb_scene));
        ctx.input_file(amb_scene);
      }
      AmbiguityReport rep = ambiguity_report(scene, rig, ctx.workers);
      ctx.report.payload = json::parse(ambiguity_report_to_json(rep));
    });
  });

  // ---- sbs ----------------------------------------------------------------
  auto* sbs_cmd = app.add_subcommand("sbs", "split or join side-by-side clips");
  sbs_cmd->require_subcommand(1);
  auto* sbs_split = sbs_cmd->add_subcommand("split", "SBS clip -> left + right clips");
  static Common sbs_split_common;
  static std::string sbs_in, sbs_out_left, sbs_out_right;
  sbs_split->add_option("--in", sbs_in, "SBS clip directory")->required();
  sbs_split->add_option("--out-left", sbs_out_left, "left output directory")->required();
  sbs_split->add_option("--out-right", sbs_out_right, "right output directory")->required();
  add_common(sbs_split, sbs_split_common);
  sbs_split->callback([&] {
    exit_code = execute("sbs split", sbs_split_common, sbs_out_left, [&](RunContext& ctx) {
      Clip clip = load_clip(require_dir(sbs_in));
      ctx.input_dir(sbs_in);
      auto [left, right] = split_sbs_clip(clip);
      save_clip(left, ctx.out_dir);
      save_clip(right, make_out_dir(sbs_out_right));
      ctx.output(ctx.out_dir);
      ctx.output(sbs_out_right);
      ctx.report.payload = {{"frames", clip.frame_count()},
                            {"eye_width", left.width()},
                            {"eye_height", left.height()}};
    });
  });
  auto* sbs_join = sbs_cmd->add_subcommand("join", "left + right clips -> SBS clip");
  static Common sbs_join_common;
  static std::string sbs_left, sbs_right, sbs_join_out;
  sbs_join->add_option("--left", sbs_left, "left clip directory")->required();
  sbs_join->add_option("--right", sbs_right, "right clip directory")->required();
  sbs_join->add_option("--out", sbs_join_out, "output directory")->required();
  add_common(sbs_join, sbs_join_common);
  sbs_join->callback([&] {
    exit_code = execute("sbs join", sbs_join_common, sbs_join_out, [&](RunContext& ctx) {
      Clip left = load_clip(require_dir(sbs_left));
      ctx.input_dir(sbs_left);
      Clip right = load_clip(require_dir(sbs_right));
      ctx.input_dir(sbs_right);
      Clip joined = join_sbs_clip(left, right);
      save_clip(joined, ctx.out_dir);
      ctx.output(ctx.out_dir);
      ctx.report.payload = {{"frames", joined.frame_count()}, {"width", joined.width()}};
    });
  });

  // ---- crop-borders -------------------------------------------------------
  auto* crop_cmd = app.add_subcommand("crop-borders",
                                      "detect black borders on the left eye and crop both");
  static Common crop_common;
  static std::string crop_left, crop_right, crop_out_left, crop_out_right;
  static double crop_thresh = 8.0 / 255.0, crop_frac = 0.99;
  crop_cmd->add_option("--left", crop_left, "left clip directory")->required();
  crop_cmd->add_option("--right", crop_right, "right clip directory (same crop applied)");
  crop_cmd->add_option("--out-left", crop_out_left, "left output directory")->required();
  crop_cmd->add_option("--out-right", crop_out_right, "right output directory");
  crop_cmd->add_option("--luma-thresh", crop_thresh, "border luma threshold in [0,1]");
  crop_cmd->add_option("--frame-frac", crop_frac, "fraction of frames that must be black");
  add_common(crop_cmd, crop_common);
  crop_cmd->callback([&] {
    exit_code = execute("crop-borders", crop_common, crop_out_left, [&](RunContext& ctx) {
      if (crop_right.empty() != crop_out_right.empty())
        throw Error(ErrorKind::InvalidArgument, "--right and --out-right go together");
      Clip left = load_clip(require_dir(crop_left));
      ctx.input_dir(crop_left);
      CropRect rect = detect_black_borders(left, crop_thresh, crop_frac);
      save_clip(crop_clip(left, rect), ctx.out_dir);
      ctx.output(ctx.out_dir);
      if (!crop_right.empty()) {
        Clip right = load_clip(require_dir(crop_right));
        ctx.input_dir(crop_right);
        save_clip(crop_clip(right, rect), make_out_dir(crop_out_right));
        ctx.output(crop_out_right);
      }
      ctx.report.payload = {{"rect", rect_json(rect)},
                            {"cropped_width", rect.width()},
                            {"cropped_height", rect.height()}};
    });
  });

  // ---- cuts ---------------------------------------------------------------
  auto* cuts_cmd = app.add_subcommand("cuts", "detect shot boundaries");
  static Common cuts_common;
  static std::string cuts_in, cuts_out;
  static double cuts_threshold = 0.3;
  cuts_cmd->add_option("--in", cuts_in, "clip directory")->required();
  cuts_cmd->add_option("--threshold", cuts_threshold, "mean luma difference threshold");
  cuts_cmd->add_option("--out", cuts_out, "optional report directory");
  add_common(cuts_cmd, cuts_common);
  cuts_cmd->callback([&] {
    exit_code = execute("cuts", cuts_common, cuts_out, [&](RunContext& ctx) {
      Clip clip = load_clip(require_dir(cuts_in));
      ctx.input_dir(cuts_in);
      std::vector<int> cuts = detect_shot_cuts(clip, cuts_threshold);
      ctx.report.payload = {{"cuts", cuts}, {"threshold", cuts_threshold}};
    });
  });

  // ---- resample -----------------------------------------------------------
  auto* resample_cmd = app.add_subcommand("resample", "nearest-frame fps resampling");
  static Common resample_common;
  static std::string resample_in, resample_out;
  static double resample_fps_target = 16.0;
  resample_cmd->add_option("--in", resample_in, "clip directory")->required();
  resample_cmd->add_option("--fps", resample_fps_target, "target fps (default 16)");
  resample_cmd->add_option("--out", resample_out, "output directory")->required();
  add_common(resample_cmd, resample_common);
  resample_cmd->callback([&] {
    exit_code = execute("resample", resample_common, resample_out, [&](RunContext& ctx) {
      Clip clip = load_clip(require_dir(resample_in));
      ctx.input_dir(resample_in);
      Clip out = resample_fps(clip, resample_fps_target);
      save_clip(out, ctx.out_dir);
      ctx.output(ctx.out_dir);
      ctx.report.payload = {{"input_frames", clip.frame_count()},
                            {"output_frames", out.frame_count()},
                            {"fps", resample_fps_target}};
    });
  });

  // ---- segment ------------------------------------------------------------
  auto* segment_cmd = app.add_subcommand("segment", "fixed-length segmentation");
  static Common segment_common;
  static std::string segment_in, segment_out;
  static int segment_len = 81;
  static bool segment_keep_odd = true;
  segment_cmd->add_option("--in", segment_in, "clip directory")->required();
  segment_cmd->add_option("--len", segment_len, "segment length in frames (default 81)");
  segment_cmd->add_flag("--keep-odd,!--keep-all", segment_keep_odd,
                        "keep only odd-indexed segments (default on)");
  segment_cmd->add_option("--out", segment_out, "output directory")->required();
  add_common(segment_cmd, segment_common);
  segment_cmd->callback([&] {
    exit_code = execute("segment", segment_common, segment_out, [&](RunContext& ctx) {
      Clip clip = load_clip(require_dir(segment_in));
      ctx.input_dir(segment_in);
      std::vector<Clip> segments = segment_clips(clip, segment_len, segment_keep_odd);
      for (size_t i = 0; i < segments.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "seg_%03zu", i);
        save_clip(segments[i], ctx.out_dir / name);
        ctx.output(ctx.out_dir / name);
      }
      ctx.report.payload = {{"segments", segments.size()},
                            {"segment_length", segment_len},
                            {"keep_odd", segment_keep_odd}};
    });
  });

  // ---- flow-demo ----------------------------------------------------------
  auto* flow_cmd = app.add_subcommand("flow-demo", "trace the rectified-flow toy numerics");
  static Common flow_common;
  static std::string flow_out;
  static double flow_t0 = 0.001, flow_lambda = 0.5;
  static int flow_steps = 8, flow_samples = 16, flow_dim = 2;
  static bool flow_stratified = false;
  flow_cmd->add_option("--t0", flow_t0, "feed-forward timestep (default 0.001)");
  flow_cmd->add_option("--lambda", flow_lambda, "cycle weight (default 0.5)");
  flow_cmd->add_option("--steps", flow_steps, "Euler steps");
  flow_cmd->add_option("--samples", flow_samples, "t samples for the matching loss");
  flow_cmd->add_option("--dim", flow_dim, "state dimension");
  flow_cmd->add_flag("--stratified", flow_stratified, "jitter the t grid with --seed");
  flow_cmd->add_option("--out", flow_out, "optional report directory");
  add_common(flow_cmd, flow_common);
  flow_cmd->callback([&] {
    exit_code = execute("flow-demo", flow_common, flow_out, [&](RunContext& ctx) {
      using namespace stereoscope::flow;
      if (flow_dim < 1 || flow_dim > 64)
        throw Error(ErrorKind::InvalidArgument, "--dim must be in [1,64]");
      Vec z0(flow_dim), z1(flow_dim), shift(flow_dim);
      for (int i = 0; i < flow_dim; ++i) {
        z0[i] = 0.5 * std::sin(i + 1.0);
        z1[i] = 1.0 + 0.5 * std::cos(i + 1.0);
        shift[i] = 0.1 * (i + 1);
      }
      Vec truth(flow_dim);
      for (int i = 0; i < flow_dim; ++i) truth[i] = z1[i] - z0[i];
      VelocityField true_field = [&](const Vec&, double, DomainTag) { return truth; };
      VelocityField zero_field = [&](const Vec& z, double, DomainTag) {
        return Vec(z.size(), 0.0);
      };
      VelocityField fwd = [&](const Vec& z, double, DomainTag tag) {
        Vec out(z.size());
        double sign = tag == DomainTag::Parallel ? 1.0 : -1.0;
        for (size_t i = 0; i < z.size(); ++i) out[i] = z[i] + sign * shift[i];
        return out;
      };
      VelocityField bwd = [&](const Vec& z, double, DomainTag tag) {
        Vec out(z.size());
        double sign = tag == DomainTag::Parallel ? 1.0 : -1.0;
        for (size_t i = 0; i < z.size(); ++i) out[i] = z[i] - sign * shift[i];
        return out;
      };

      std::vector<double> ts = flow_stratified ? stratified_times(flow_samples, flow_common.seed)
                                               : uniform_times(flow_samples);
      json states = json::array();
      for (double t : ts) {
        FlowState s = lerp_path(z0, z1, t);
        states.push_back({{"t", t}, {"z", s.z}});
      }
      Vec z0_est = euler_integrate(true_field, z1, flow_steps, 1.0 / flow_steps);
      double euler_err = 0;
      for (int i = 0; i < flow_dim; ++i) euler_err = std::max(euler_err, std::abs(z0_est[i] - z0[i]));

      Vec z_r = fwd(z0, flow_t0, DomainTag::Parallel);
      CycleLosses cyc =
          cycle_objective(fwd, bwd, z0, z_r, flow_lambda, DomainTag::Parallel, flow_t0);

      ctx.report.payload = {
          {"t0", flow_t0},
          {"lambda", flow_lambda},
          {"dim", flow_dim},
          {"z0", z0},
          {"z1", z1},
          {"path_states", states},
          {"flow_match_loss_true_field", flow_match_loss(true_field, z0, z1, ts)},
          {"flow_match_loss_zero_field", flow_match_loss(zero_field, z0, z1, ts)},
          {"euler",
           {{"steps", flow_steps}, {"z0_estimate", z0_est}, {"max_abs_error", euler_err}}},
          {"feed_forward",
           {{"parallel", feed_forward_predict(fwd, z0, DomainTag::Parallel, flow_t0)},
            {"converged", feed_forward_predict(fwd, z0, DomainTag::Converged, flow_t0)}}},
          {"cycle", {{"recon", cyc.recon}, {"cycle", cyc.cycle}, {"total", cyc.total}}}};
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage errors
  }
  return exit_code;
}
