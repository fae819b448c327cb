#pragma once

#include <filesystem>
#include <string>

#include "stereoscope/analysis.hpp"
#include "stereoscope/dwi.hpp"
#include "stereoscope/geometry.hpp"
#include "stereoscope/metrics.hpp"
#include "stereoscope/scene.hpp"

namespace stereoscope {

// Rig JSON: {"baseline_m", "focal_px", "width", "height", "cx", "cy",
// "format": "parallel"|"converged", "convergence_m"}.
std::string rig_to_json(const CameraRig& rig);
CameraRig rig_from_json(const std::string& text);
CameraRig load_rig(const std::filesystem::path& path);
void save_rig(const CameraRig& rig, const std::filesystem::path& path);

std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);
Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

// +infinity PSNR serializes as the JSON string "inf".
std::string metric_report_to_json(const MetricReport& report);
std::string format_verdict_to_json(const FormatVerdict& verdict);
std::string ambiguity_report_to_json(const AmbiguityReport& report);

}  // namespace stereoscope
