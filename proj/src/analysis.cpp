#include "stereoscope/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "stereoscope/parallel.hpp"

namespace stereoscope {

namespace {

std::vector<uint8_t> quantized_luma(const Frame& f) {
  std::vector<uint8_t> out(f.pixel_count());
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x)
      out[static_cast<size_t>(y) * f.width + x] =
          static_cast<uint8_t>(std::lround(std::clamp(luma(f, x, y), 0.0, 1.0) * 255.0));
  return out;
}

}  // namespace

DisparityMap block_match_disparity(const Frame& left, const Frame& right,
                                   const BlockMatchParams& params, int workers) {
  if (!left.same_size(right)) throw Error(ErrorKind::SizeMismatch, "frame dimensions differ");
  if (params.block < 1 || params.block % 2 == 0)
    throw Error(ErrorKind::InvalidArgument, "block size must be odd and >= 1");
  if (2 * params.max_abs_disp >= left.width)
    throw Error(ErrorKind::RangeTooLarge, "search range spans the whole frame");
  if (params.max_abs_disp < 0 || params.vertical_range < 0)
    throw Error(ErrorKind::InvalidArgument, "search ranges must be >= 0");

  const int w = left.width, h = left.height;
  const int hb = params.block / 2;
  const int vr = params.vertical_range;
  const long long block_px = static_cast<long long>(params.block) * params.block;
  // Texture gate threshold in quantized-luma variance units, scaled so it
  // compares against n*sum(x^2) - sum(x)^2 without division.
  const double var_gate = params.texture_min_variance * 255.0 * 255.0 *
                          static_cast<double>(block_px) * static_cast<double>(block_px);

  std::vector<uint8_t> la = quantized_luma(left), ra = quantized_luma(right);
  DisparityMap out(w, h);

  parallel_for(h, workers, [&](int y) {
    if (y - hb - vr < 0 || y + hb + vr >= h) return;
    std::vector<long long> costs(2 * params.max_abs_disp + 1);
    // Only pixels whose entire candidate window is in-bounds are matched;
    // a clipped window can leave the true match unevaluated while a texture
    // alias survives the ratio test.
    for (int x = hb + params.max_abs_disp; x + hb + params.max_abs_disp < w; ++x) {
      // texture gate on the left block
      long long sum = 0, sumsq = 0;
      for (int j = -hb; j <= hb; ++j) {
        const uint8_t* row = &la[static_cast<size_t>(y + j) * w];
        for (int i = -hb; i <= hb; ++i) {
          long long v = row[x + i];
          sum += v;
          sumsq += v * v;
        }
      }
      double variance_scaled = static_cast<double>(block_px * sumsq - sum * sum);
      if (variance_scaled <= var_gate) continue;

      for (int d = -params.max_abs_disp; d <= params.max_abs_disp; ++d) {
        int rx = x - d;
        long long best_sad = -1;
        for (int dy = -vr; dy <= vr; ++dy) {
          long long sad = 0;
          for (int j = -hb; j <= hb; ++j) {
            const uint8_t* lrow = &la[static_cast<size_t>(y + j) * w];
            const uint8_t* rrow = &ra[static_cast<size_t>(y + j + dy) * w];
            for (int i = -hb; i <= hb; ++i)
              sad += std::abs(static_cast<int>(lrow[x + i]) - static_cast<int>(rrow[rx + i]));
          }
          if (best_sad < 0 || sad < best_sad) best_sad = sad;
        }
        costs[d + params.max_abs_disp] = best_sad;
      }

      int best_idx = 0;
      for (int i = 1; i < static_cast<int>(costs.size()); ++i)
        if (costs[i] < costs[best_idx]) best_idx = i;
      long long second = -1;
      for (int i = 0; i < static_cast<int>(costs.size()); ++i) {
        if (std::abs(i - best_idx) <= 1) continue;
        if (second < 0 || costs[i] < second) second = costs[i];
      }
      // ratio test: best must beat the second-best clearly (integer compare
      // of best/second < ratio_max with ratio_max = p/q)
      if (second < 0) continue;
      long long num = std::llround(params.ratio_max * 1000.0);
      if (costs[best_idx] * 1000 >= second * num) continue;

      int d = best_idx - params.max_abs_disp;
      out.set(x, y, static_cast<double>(d));
    }
  });
  return out;
}

SignHistogram disparity_sign_histogram(const DisparityMap& d, double zero_band) {
  if (zero_band < 0) throw Error(ErrorKind::InvalidArgument, "zero_band must be >= 0");
  SignHistogram h;
  size_t total = static_cast<size_t>(d.width) * d.height;
  if (total == 0) {
    h.invalid = 1.0;
    return h;
  }
  size_t pos = 0, neg = 0, zero = 0, invalid = 0;
  for (int y = 0; y < d.height; ++y) {
    for (int x = 0; x < d.width; ++x) {
      if (!d.is_valid(x, y)) {
        ++invalid;
      } else if (d.at(x, y) > zero_band) {
        ++pos;
      } else if (d.at(x, y) < -zero_band) {
        ++neg;
      } else {
        ++zero;
      }
    }
  }
  h.pos = static_cast<double>(pos) / total;
  h.neg = static_cast<double>(neg) / total;
  h.zero = static_cast<double>(zero) / total;
  h.invalid = static_cast<double>(invalid) / total;
  return h;
}

const char* to_string(StereoFormatLabel label) {
  switch (label) {
    case StereoFormatLabel::Parallel: return "parallel";
    case StereoFormatLabel::Converged: return "converged";
    case StereoFormatLabel::PseudoStereo: return "pseudo_stereo";
    case StereoFormatLabel::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

FormatVerdict classify_format(const Clip& left, const Clip& right, const ClassifyParams& params,
                              int workers) {
  if (left.frames.empty() || right.frames.empty())
    throw Error(ErrorKind::EmptyClip, "classification needs at least one frame");
  if (left.frames.size() != right.frames.size())
    throw Error(ErrorKind::LengthMismatch, "clips have different frame counts");

  const int n = left.frame_count();
  const int stride = std::max(1, n / 8);

  // Block matching with a small vertical search so toed-in keystone does not
  // starve the matcher; the winning |dy| feeds the vertical statistic.
  BlockMatchParams match = params.match;
  long long count = 0, count_pos = 0, count_neg = 0;
  double sum = 0, sumsq = 0, sum_absdy = 0;

  for (int i = 0; i < n; i += stride) {
    DisparityMap disp = block_match_disparity(left.frames[i], right.frames[i], match, workers);
    // Recover the vertical offset of each accepted match by probing the
    // best row alignment of the matched blocks.
    const int hb = match.block / 2, vr = match.vertical_range;
    std::vector<uint8_t> la, ra;
    {
      la.reserve(left.frames[i].pixel_count());
      ra.reserve(left.frames[i].pixel_count());
      for (int y = 0; y < disp.height; ++y)
        for (int x = 0; x < disp.width; ++x) {
          la.push_back(static_cast<uint8_t>(
              std::lround(std::clamp(luma(left.frames[i], x, y), 0.0, 1.0) * 255.0)));
          ra.push_back(static_cast<uint8_t>(
              std::lround(std::clamp(luma(right.frames[i], x, y), 0.0, 1.0) * 255.0)));
        }
    }
    const int w = disp.width;
    for (int y = 0; y < disp.height; ++y) {
      for (int x = 0; x < disp.width; ++x) {
        if (!disp.is_valid(x, y)) continue;
        double d = disp.at(x, y);
        sum += d;
        sumsq += d * d;
        ++count;
        if (d > params.zero_band) ++count_pos;
        if (d < -params.zero_band) ++count_neg;
        int rx = x - static_cast<int>(d);
        long long best = -1;
        int best_dy = 0;
        for (int dy = -vr; dy <= vr; ++dy) {
          if (y + dy - hb < 0 || y + dy + hb >= disp.height) continue;
          long long sad = 0;
          for (int j = -hb; j <= hb; ++j)
            for (int ii = -hb; ii <= hb; ++ii)
              sad += std::abs(static_cast<int>(la[static_cast<size_t>(y + j) * w + x + ii]) -
                              static_cast<int>(ra[static_cast<size_t>(y + j + dy) * w + rx + ii]));
          if (best < 0 || sad < best) {
            best = sad;
            best_dy = dy;
          }
        }
        sum_absdy += std::abs(best_dy);
      }
    }
  }

  if (count < params.min_valid)
    throw Error(ErrorKind::InsufficientValidPixels, "too few matched pixels to classify");

  FormatVerdict verdict;
  FormatStats& st = verdict.stats;
  st.pos_fraction = static_cast<double>(count_pos) / count;
  st.neg_fraction = static_cast<double>(count_neg) / count;
  double mean = sum / count;
  st.disparity_variance_px2 = sumsq / count - mean * mean;
  st.vertical_disparity_mean_px = sum_absdy / count;

  const double minority = std::min(st.pos_fraction, st.neg_fraction);
  const double var = st.disparity_variance_px2;
  if (var < params.v_min && minority < params.s_min) {
    verdict.label = StereoFormatLabel::PseudoStereo;
    st.confidence = clamp01(std::min((params.v_min - var) / params.v_min,
                                     (params.s_min - minority) / params.s_min));
  } else if (st.pos_fraction >= params.s_min && st.neg_fraction >= params.s_min) {
    verdict.label = StereoFormatLabel::Converged;
    st.confidence = clamp01((minority - params.s_min) / params.s_min);
  } else if (var >= params.v_min && minority < params.s_min) {
    verdict.label = StereoFormatLabel::Parallel;
    st.confidence = clamp01(std::min((var - params.v_min) / params.v_min,
                                     (params.s_min - minority) / params.s_min));
  } else {
    verdict.label = StereoFormatLabel::Unknown;
    st.confidence = 0.0;
  }
  return verdict;
}

}  // namespace stereoscope
