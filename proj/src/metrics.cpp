#include "stereoscope/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "stereoscope/parallel.hpp"

namespace stereoscope {

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01, kK2 = 0.03, kL = 1.0;
constexpr double kC1 = (kK1 * kL) * (kK1 * kL);
constexpr double kC2 = (kK2 * kL) * (kK2 * kL);
constexpr std::array<double, 5> kMsWeights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

struct KahanSum {
  double sum = 0.0, c = 0.0;
  void add(double v) {
    double y = v - c;
    double t = sum + y;
    if (!std::isfinite(t)) {  // compensation is meaningless at +-inf
      sum = t;
      c = 0.0;
      return;
    }
    c = (t - sum) - y;
    sum = t;
  }
};

const std::array<double, kWin * kWin>& gaussian_window() {
  static const std::array<double, kWin * kWin> win = [] {
    std::array<double, kWin * kWin> w{};
    double total = 0;
    for (int j = 0; j < kWin; ++j) {
      for (int i = 0; i < kWin; ++i) {
        double dx = i - (kWin - 1) / 2.0, dy = j - (kWin - 1) / 2.0;
        w[j * kWin + i] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
        total += w[j * kWin + i];
      }
    }
    for (double& v : w) v /= total;
    return w;
  }();
  return win;
}

struct LumaImage {
  int width = 0, height = 0;
  std::vector<double> y;
  double at(int x, int yy) const { return y[static_cast<size_t>(yy) * width + x]; }
};

LumaImage to_luma(const Frame& f) {
  LumaImage img{f.width, f.height, {}};
  img.y.resize(f.pixel_count());
  for (int yy = 0; yy < f.height; ++yy)
    for (int x = 0; x < f.width; ++x) img.y[static_cast<size_t>(yy) * f.width + x] = luma(f, x, yy);
  return img;
}

void check_sizes(const Frame& a, const Frame& b, const Mask* valid) {
  if (!a.same_size(b)) throw Error(ErrorKind::SizeMismatch, "frame dimensions differ");
  if (valid && (valid->width != a.width || valid->height != a.height))
    throw Error(ErrorKind::SizeMismatch, "mask dimensions differ");
}

// Window means / contrast-structure terms over all fully-interior (and, with
// a mask, fully-valid) windows.
struct SsimSums {
  KahanSum luminance_x_structure;  // full SSIM term
  KahanSum contrast_structure;     // cs-only term, for MS-SSIM intermediate scales
  long windows = 0;
};

SsimSums ssim_sums(const LumaImage& a, const LumaImage& b, const Mask* valid) {
  if (a.width < kWin || a.height < kWin)
    throw Error(ErrorKind::TooSmall, "image smaller than the SSIM window");
  const auto& win = gaussian_window();
  SsimSums out;
  for (int y0 = 0; y0 + kWin <= a.height; ++y0) {
    for (int x0 = 0; x0 + kWin <= a.width; ++x0) {
      if (valid) {
        bool ok = true;
        for (int j = 0; j < kWin && ok; ++j)
          for (int i = 0; i < kWin && ok; ++i) ok = valid->at(x0 + i, y0 + j);
        if (!ok) continue;
      }
      double mx = 0, my = 0, mxx = 0, myy = 0, mxy = 0;
      for (int j = 0; j < kWin; ++j) {
        for (int i = 0; i < kWin; ++i) {
          double w = win[j * kWin + i];
          double px = a.at(x0 + i, y0 + j), py = b.at(x0 + i, y0 + j);
          mx += w * px;
          my += w * py;
          mxx += w * px * px;
          myy += w * py * py;
          mxy += w * px * py;
        }
      }
      double vx = mxx - mx * mx, vy = myy - my * my, cov = mxy - mx * my;
      double lum = (2 * mx * my + kC1) / (mx * mx + my * my + kC1);
      double cs = (2 * cov + kC2) / (vx + vy + kC2);
      out.luminance_x_structure.add(lum * cs);
      out.contrast_structure.add(cs);
      ++out.windows;
    }
  }
  if (out.windows == 0) throw Error(ErrorKind::EmptyMask, "no fully valid SSIM window");
  return out;
}

LumaImage downsample2(const LumaImage& img) {
  LumaImage out{img.width / 2, img.height / 2, {}};
  out.y.resize(static_cast<size_t>(out.width) * out.height);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.y[static_cast<size_t>(y) * out.width + x] =
          0.25 * (img.at(2 * x, 2 * y) + img.at(2 * x + 1, 2 * y) + img.at(2 * x, 2 * y + 1) +
                  img.at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

}  // namespace

double psnr(const Frame& a, const Frame& b, const Mask* valid) {
  check_sizes(a, b, valid);
  KahanSum se;
  size_t n = 0;
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      if (valid && !valid->at(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        double d = static_cast<double>(a.at(x, y, c)) - b.at(x, y, c);
        se.add(d * d);
      }
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorKind::EmptyMask, "no unmasked pixel");
  double mse = se.sum / (3.0 * n);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Frame& a, const Frame& b, const Mask* valid) {
  check_sizes(a, b, valid);
  SsimSums s = ssim_sums(to_luma(a), to_luma(b), valid);
  return s.luminance_x_structure.sum / s.windows;
}

int max_ms_scales(int width, int height) {
  int scales = 0;
  int w = width, h = height;
  while (scales < 5 && w >= kWin && h >= kWin) {
    ++scales;
    w /= 2;
    h /= 2;
  }
  return scales;
}

double ms_ssim(const Frame& a, const Frame& b, int scales) {
  check_sizes(a, b, nullptr);
  if (scales < 1 || scales > 5)
    throw Error(ErrorKind::InvalidArgument, "MS-SSIM supports 1..5 scales");
  if (max_ms_scales(a.width, a.height) < scales)
    throw Error(ErrorKind::TooSmall, "image too small for the requested scale count");

  // Published weights for 5 scales; renormalized prefix otherwise.
  std::array<double, 5> w = kMsWeights;
  if (scales < 5) {
    double total = 0;
    for (int i = 0; i < scales; ++i) total += kMsWeights[i];
    for (int i = 0; i < scales; ++i) w[i] = kMsWeights[i] / total;
  }

  LumaImage la = to_luma(a), lb = to_luma(b);
  double result = 1.0;
  for (int s = 0; s < scales; ++s) {
    SsimSums sums = ssim_sums(la, lb, nullptr);
    double term = (s == scales - 1) ? sums.luminance_x_structure.sum / sums.windows
                                    : sums.contrast_structure.sum / sums.windows;
    result *= std::pow(std::max(term, 0.0), w[s]);
    if (s + 1 < scales) {
      la = downsample2(la);
      lb = downsample2(lb);
    }
  }
  return result;
}

double disparity_mae(const DisparityMap& est, const DisparityMap& gt, const Mask* region) {
  if (est.width != gt.width || est.height != gt.height)
    throw Error(ErrorKind::SizeMismatch, "disparity map dimensions differ");
  if (region && (region->width != est.width || region->height != est.height))
    throw Error(ErrorKind::SizeMismatch, "region mask dimensions differ");
  KahanSum sum;
  size_t n = 0;
  for (int y = 0; y < est.height; ++y) {
    for (int x = 0; x < est.width; ++x) {
      if (!est.is_valid(x, y) || !gt.is_valid(x, y)) continue;
      if (region && !region->at(x, y)) continue;
      sum.add(std::abs(est.at(x, y) - gt.at(x, y)));
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorKind::EmptyOverlap, "no jointly valid disparity pixel");
  return sum.sum / n;
}

double cycle_residual(const Frame& left, const WarpFn& lr, const WarpFn& rl) {
  Mask all_valid(left.width, left.height, true);
  WarpResult there = lr(left, all_valid);
  Mask mid_valid = there.holes;
  for (auto& v : mid_valid.v) v = !v;
  WarpResult back = rl(there.image, mid_valid);

  KahanSum se;
  size_t n = 0;
  for (int y = 0; y < left.height; ++y) {
    for (int x = 0; x < left.width; ++x) {
      if (back.holes.at(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        double d = static_cast<double>(left.at(x, y, c)) - back.image.at(x, y, c);
        se.add(d * d);
      }
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorKind::EmptyOverlap, "no pixel survives the round trip");
  return se.sum / (3.0 * n);
}

double combined_loss(double recon_l2r, double recon_r2l, double cycle, double lambda) {
  if (recon_l2r < 0 || recon_r2l < 0 || cycle < 0 || lambda < 0)
    throw Error(ErrorKind::NegativeTerm, "loss terms must be non-negative");
  return recon_l2r + recon_r2l + lambda * cycle;
}

MetricReport clip_metrics(const Clip& a, const Clip& b, const std::vector<Mask>* valid_masks,
                          int ms_scales, int workers) {
  if (a.frames.empty() || b.frames.empty())
    throw Error(ErrorKind::EmptyClip, "metrics need at least one frame");
  if (a.frames.size() != b.frames.size())
    throw Error(ErrorKind::LengthMismatch, "clips have different frame counts");
  if (valid_masks && valid_masks->size() != a.frames.size())
    throw Error(ErrorKind::LengthMismatch, "one mask per frame required");
  if (max_ms_scales(a.width(), a.height()) < ms_scales)
    throw Error(ErrorKind::TooSmall, "frames too small for the requested MS-SSIM scales");

  const int n = static_cast<int>(a.frames.size());
  MetricReport report;
  report.ms_scales = ms_scales;
  report.per_frame.resize(n);
  std::vector<double> frac(n, 1.0);

  parallel_for(n, workers, [&](int i) {
    const Mask* m = valid_masks ? &(*valid_masks)[i] : nullptr;
    FrameMetrics fm;
    fm.psnr_db = psnr(a.frames[i], b.frames[i], m);
    fm.ssim = ssim(a.frames[i], b.frames[i], m);
    fm.ms_ssim = ms_ssim(a.frames[i], b.frames[i], ms_scales);
    report.per_frame[i] = fm;
    if (m) frac[i] = static_cast<double>(m->count_true()) / (static_cast<double>(m->width) * m->height);
  });

  KahanSum p, s, ms, f;
  for (int i = 0; i < n; ++i) {
    p.add(report.per_frame[i].psnr_db);
    s.add(report.per_frame[i].ssim);
    ms.add(report.per_frame[i].ms_ssim);
    f.add(frac[i]);
  }
  report.psnr_db = p.sum / n;
  report.ssim = s.sum / n;
  report.ms_ssim = ms.sum / n;
  report.valid_fraction = f.sum / n;
  return report;
}

}  // namespace stereoscope
