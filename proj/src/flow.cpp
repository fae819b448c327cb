#include "stereoscope/flow.hpp"

#include <cmath>
#include <random>

namespace stereoscope::flow {

namespace {

void check_dims(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimMismatch, "vector dimensions differ");
}

double sq_norm_diff(const Vec& a, const Vec& b) {
  check_dims(a, b);
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

FlowState lerp_path(const Vec& z0, const Vec& z1, double t) {
  check_dims(z0, z1);
  if (t < 0 || t > 1) throw Error(ErrorKind::InvalidArgument, "t must lie in [0,1]");
  Vec z(z0.size());
  for (size_t i = 0; i < z.size(); ++i) z[i] = (1.0 - t) * z0[i] + t * z1[i];
  return {std::move(z), t};
}

double flow_match_loss(const VelocityField& field, const Vec& z0, const Vec& z1,
                       const std::vector<double>& t_samples, DomainTag tag) {
  check_dims(z0, z1);
  if (t_samples.empty()) throw Error(ErrorKind::InvalidArgument, "need at least one t sample");
  Vec target(z0.size());
  for (size_t i = 0; i < target.size(); ++i) target[i] = z1[i] - z0[i];
  double total = 0;
  for (double t : t_samples) {
    FlowState state = lerp_path(z0, z1, t);
    Vec v = field(state.z, t, tag);
    total += sq_norm_diff(v, target);
  }
  return total / static_cast<double>(t_samples.size());
}

Vec euler_integrate(const VelocityField& field, const Vec& z1, int steps, double eta,
                    DomainTag tag) {
  if (steps < 1 || !(eta > 0) || eta > 1 || std::abs(steps * eta - 1.0) > 1e-9)
    throw Error(ErrorKind::StepOverflow, "schedule must cover [1,0]: steps * eta == 1");
  Vec z = z1;
  double t = 1.0;
  for (int s = 0; s < steps; ++s) {
    Vec v = field(z, std::max(t, 0.0), tag);
    check_dims(v, z);
    for (size_t i = 0; i < z.size(); ++i) z[i] -= eta * v[i];
    t -= eta;
  }
  return z;
}

Vec feed_forward_predict(const VelocityField& field, const Vec& z_input, DomainTag tag,
                         double t0) {
  return field(z_input, t0, tag);
}

CycleLosses cycle_objective(const VelocityField& fwd, const VelocityField& bwd, const Vec& z_l,
                            const Vec& z_r, double lambda, DomainTag tag, double t0,
                            bool include_reverse_cycle) {
  check_dims(z_l, z_r);
  Vec z_r_hat = fwd(z_l, t0, tag);
  Vec z_l_hat = bwd(z_r, t0, tag);
  CycleLosses out;
  out.recon = sq_norm_diff(z_r_hat, z_r) + sq_norm_diff(z_l_hat, z_l);
  out.cycle = sq_norm_diff(z_l, bwd(z_r_hat, t0, tag));
  if (include_reverse_cycle) out.cycle += sq_norm_diff(z_r, fwd(z_l_hat, t0, tag));
  out.total = out.recon + lambda * out.cycle;
  return out;
}

std::vector<double> uniform_times(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "need at least one sample");
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = (i + 0.5) / n;
  return t;
}

std::vector<double> stratified_times(int n, uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "need at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = (i + u(rng)) / n;
  return t;
}

}  // namespace stereoscope::flow
