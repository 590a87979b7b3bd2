#include "graphmotion/losses.h"

#include <algorithm>
#include <cmath>

namespace gm::losses {

void GuidanceLossConfig::validate(int T) const {
  if (gli_threshold < 0) throw ValidationError("gli_threshold must be >= 0");
  if (gli_weight < 0 || proxemics_weight < 0 || contact_weight < 0)
    throw ValidationError("loss weights must be >= 0");
  if (aabb_padding < 0) throw ValidationError("aabb_padding must be >= 0");
  if (root_distance_min < 0) throw ValidationError("root_distance_min must be >= 0");
  if (!(tau > 0)) throw ValidationError("tau must be positive");
  for (const auto& [name, w] : {std::pair<const char*, Window>{"gli_window", gli_window},
                                {"proxemics_window", proxemics_window},
                                {"contact_window", contact_window}})
    if (w.lo < 0 || w.lo > w.hi || w.hi > T + 1)
      throw ValidationError(std::string(name) + " [" + std::to_string(w.lo) + "," +
                            std::to_string(w.hi) + ") must satisfy 0 <= lo <= hi <= " +
                            std::to_string(T + 1));
}

namespace {

// One smoothed axis-aligned face per axis and side. Weights follow a
// Boltzmann average so the derivative stays nonzero for every joint:
//   s = sum u_j x_j,  u_j = exp(+-x_j / tau) normalized
//   ds/dx_j = u_j (1 +- (x_j - s) / tau)
struct SoftBox {
  double hi[3], lo[3];
  std::vector<double> dhi[3], dlo[3];  // per joint
};

SoftBox soft_box(std::span<const Vec3> pose, double tau, double padding) {
  const int J = int(pose.size());
  SoftBox box;
  for (int ax = 0; ax < 3; ++ax) {
    box.dhi[ax].assign(J, 0.0);
    box.dlo[ax].assign(J, 0.0);
    double mx = pose[0][ax], mn = pose[0][ax];
    for (int j = 1; j < J; ++j) {
      mx = std::max(mx, pose[j][ax]);
      mn = std::min(mn, pose[j][ax]);
    }
    double wsum_hi = 0, wsum_lo = 0, s_hi = 0, s_lo = 0;
    std::vector<double> w_hi(J), w_lo(J);
    for (int j = 0; j < J; ++j) {
      w_hi[j] = std::exp((pose[j][ax] - mx) / tau);
      w_lo[j] = std::exp((mn - pose[j][ax]) / tau);
      wsum_hi += w_hi[j];
      wsum_lo += w_lo[j];
      s_hi += w_hi[j] * pose[j][ax];
      s_lo += w_lo[j] * pose[j][ax];
    }
    s_hi /= wsum_hi;
    s_lo /= wsum_lo;
    for (int j = 0; j < J; ++j) {
      const double u_hi = w_hi[j] / wsum_hi, u_lo = w_lo[j] / wsum_lo;
      box.dhi[ax][j] = u_hi * (1.0 + (pose[j][ax] - s_hi) / tau);
      box.dlo[ax][j] = u_lo * (1.0 - (pose[j][ax] - s_lo) / tau);
    }
    box.hi[ax] = s_hi + padding;
    box.lo[ax] = s_lo - padding;
  }
  return box;
}

// Overlap of the two smoothed boxes for one frame. Which box supplies each
// overlap face is a hard choice; exact ties get a zero subgradient.
double frame_overlap(std::span<const Vec3> pose_i, std::span<const Vec3> pose_j,
                     const GuidanceLossConfig& cfg, std::span<Vec3> grad_i,
                     std::span<Vec3> grad_j) {
  const SoftBox bi = soft_box(pose_i, cfg.tau, cfg.aabb_padding);
  const SoftBox bj = soft_box(pose_j, cfg.tau, cfg.aabb_padding);
  double len[3];
  int top_side[3], bot_side[3];  // 0 none (tie), 1 first box, 2 second box
  for (int ax = 0; ax < 3; ++ax) {
    double top, bot;
    if (bi.hi[ax] < bj.hi[ax])
      top = bi.hi[ax], top_side[ax] = 1;
    else if (bj.hi[ax] < bi.hi[ax])
      top = bj.hi[ax], top_side[ax] = 2;
    else
      top = bi.hi[ax], top_side[ax] = 0;
    if (bi.lo[ax] > bj.lo[ax])
      bot = bi.lo[ax], bot_side[ax] = 1;
    else if (bj.lo[ax] > bi.lo[ax])
      bot = bj.lo[ax], bot_side[ax] = 2;
    else
      bot = bi.lo[ax], bot_side[ax] = 0;
    len[ax] = top - bot;
    if (len[ax] <= 0.0) return 0.0;
  }
  const double vol = len[0] * len[1] * len[2];
  for (int ax = 0; ax < 3; ++ax) {
    const double others = len[(ax + 1) % 3] * len[(ax + 2) % 3];
    if (top_side[ax] == 1)
      for (size_t j = 0; j < pose_i.size(); ++j) grad_i[j][ax] += others * bi.dhi[ax][j];
    else if (top_side[ax] == 2)
      for (size_t j = 0; j < pose_j.size(); ++j) grad_j[j][ax] += others * bj.dhi[ax][j];
    if (bot_side[ax] == 1)
      for (size_t j = 0; j < pose_i.size(); ++j) grad_i[j][ax] -= others * bi.dlo[ax][j];
    else if (bot_side[ax] == 2)
      for (size_t j = 0; j < pose_j.size(); ++j) grad_j[j][ax] -= others * bj.dlo[ax][j];
  }
  return vol;
}

void check_pair_shapes(const MotionSequence& a, const MotionSequence& b,
                       const std::vector<char>& mask) {
  if (a.frames() != b.frames() || a.joints != b.joints)
    throw ValidationError("loss inputs must share frame and joint counts");
  if (!mask.empty() && int(mask.size()) != a.frames())
    throw ValidationError("mask length must match frame count");
}

bool selected(const std::vector<char>& mask, int f) { return mask.empty() || mask[f]; }

}  // namespace

PairLossResult pair_overlap_loss(const MotionSequence& motion_i, const MotionSequence& motion_j,
                                 const Skeleton& skeleton, const GuidanceLossConfig& cfg,
                                 const std::vector<char>& mask, bool with_root_term) {
  check_pair_shapes(motion_i, motion_j, mask);
  if (motion_i.joints != skeleton.joint_count())
    throw ValidationError("loss inputs do not match the skeleton");
  const int L = motion_i.frames(), J = motion_i.joints;
  PairLossResult out;
  out.grad_i.assign(size_t(L) * J, Vec3::Zero());
  out.grad_j.assign(size_t(L) * J, Vec3::Zero());
  for (int f = 0; f < L; ++f) {
    if (!selected(mask, f)) continue;
    std::span<Vec3> gi(out.grad_i.data() + size_t(f) * J, size_t(J));
    std::span<Vec3> gj(out.grad_j.data() + size_t(f) * J, size_t(J));
    out.value += frame_overlap(motion_i.pose(f), motion_j.pose(f), cfg, gi, gj);
    if (with_root_term && cfg.root_distance_min > 0) {
      const Vec3 r = motion_i.at(f, 0) - motion_j.at(f, 0);
      const double n = r.norm();
      if (n < cfg.root_distance_min) {
        out.value += cfg.root_distance_min - n;
        if (n > 1e-9) {
          gi[0] -= r / n;
          gj[0] += r / n;
        }
      }
    }
  }
  return out;
}

PairLossResult pair_gli_loss(const MotionSequence& motion_i, const MotionSequence& motion_j,
                             const Skeleton& skeleton, const GuidanceLossConfig& cfg,
                             const std::vector<char>& mask) {
  check_pair_shapes(motion_i, motion_j, mask);
  if (motion_i.joints != skeleton.joint_count())
    throw ValidationError("loss inputs do not match the skeleton");
  const int L = motion_i.frames(), J = motion_i.joints;
  PairLossResult out;
  out.grad_i.assign(size_t(L) * J, Vec3::Zero());
  out.grad_j.assign(size_t(L) * J, Vec3::Zero());
  if (L < 2) return out;

  std::vector<gli::GliMatrix> G(L);
  for (int f = 0; f < L; ++f) {
    G[f] = gli::pose_pair_gli(motion_i.pose(f), motion_j.pose(f), skeleton);
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) out.flags |= G[f].flags[a][b];
  }

  // coeff[f][a][b] is dLoss/dG[f][a][b]; active hinges at transition f push
  // +sign onto frame f and -sign onto frame f-1
  std::vector<std::array<std::array<double, 5>, 5>> coeff(
      L, std::array<std::array<double, 5>, 5>{});
  for (int f = 1; f < L; ++f) {
    if (!(selected(mask, f - 1) && selected(mask, f))) continue;
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) {
        const double d = G[f].value[a][b] - G[f - 1].value[a][b];
        const double excess = std::abs(d) - cfg.gli_threshold;
        if (excess > 0) {
          out.value += excess;
          const double s = d > 0 ? 1.0 : -1.0;
          coeff[f][a][b] += s;
          coeff[f - 1][a][b] -= s;
        }
      }
  }

  for (int f = 0; f < L; ++f) {
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) {
        const double c = coeff[f][a][b];
        if (c == 0.0) continue;
        const auto& ca = skeleton.chains[a];
        const auto& cb = skeleton.chains[b];
        for (size_t p = 0; p + 1 < ca.size(); ++p)
          for (size_t q = 0; q + 1 < cb.size(); ++q) {
            const auto grads = gli::segment_writhe_gradient(
                motion_i.at(f, ca[p]), motion_i.at(f, ca[p + 1]), motion_j.at(f, cb[q]),
                motion_j.at(f, cb[q + 1]));
            out.grad_i[size_t(f) * J + ca[p]] += c * grads[0];
            out.grad_i[size_t(f) * J + ca[p + 1]] += c * grads[1];
            out.grad_j[size_t(f) * J + cb[q]] += c * grads[2];
            out.grad_j[size_t(f) * J + cb[q + 1]] += c * grads[3];
          }
      }
  }
  return out;
}

namespace {
LossResult first_side(PairLossResult&& pair) {
  LossResult out;
  out.value = pair.value;
  out.grad = std::move(pair.grad_i);
  out.flags = pair.flags;
  return out;
}
}  // namespace

LossResult gli_loss(const MotionSequence& motion_i, const MotionSequence& motion_j,
                    const Skeleton& skeleton, const GuidanceLossConfig& cfg) {
  return first_side(pair_gli_loss(motion_i, motion_j, skeleton, cfg, {}));
}

LossResult proxemics_loss(const MotionSequence& motion_i, const MotionSequence& motion_k,
                          const Skeleton& skeleton, const GuidanceLossConfig& cfg) {
  return first_side(pair_overlap_loss(motion_i, motion_k, skeleton, cfg, {}, true));
}

LossResult simple_contact_loss(const MotionSequence& motion_i, const MotionSequence& motion_j,
                               const Skeleton& skeleton, const GuidanceLossConfig& cfg) {
  return first_side(pair_overlap_loss(motion_i, motion_j, skeleton, cfg, {}, false));
}

namespace {

double pair_grad_norm(const PairLossResult& r) {
  double sq = 0;
  for (const Vec3& v : r.grad_i) sq += v.squaredNorm();
  for (const Vec3& v : r.grad_j) sq += v.squaredNorm();
  return std::sqrt(sq);
}

void accumulate(std::vector<Vec3>& dst, const std::vector<Vec3>& src, double weight) {
  for (size_t k = 0; k < dst.size(); ++k) dst[k] += weight * src[k];
}

}  // namespace

GraphLossResult sum_graph_losses(const MultiPersonMotion& multi,
                                 const graph::PairwiseInteractionGraph& g,
                                 const Skeleton& skeleton, const GuidanceLossConfig& cfg,
                                 int timestep) {
  GraphLossResult out;
  const int C = int(g.characters.size());
  out.grads.resize(C);
  for (int i = 0; i < C; ++i) {
    const MotionSequence* m = multi.find(g.characters[i]);
    if (!m) throw ValidationError("motion missing for character " + g.characters[i]);
    out.grads[i].assign(m->data.size(), Vec3::Zero());
  }

  // character-index pair order keeps the floating point accumulation
  // independent of character names
  for (int i = 0; i < C; ++i) {
    for (int j = i + 1; j < C; ++j) {
      const std::string &a = g.characters[i], &b = g.characters[j];
      const bool a_scripted = g.is_scripted(a), b_scripted = g.is_scripted(b);
      if (a_scripted && b_scripted) continue;  // no gradient can flow
      const MotionSequence &ma = *multi.find(a), &mb = *multi.find(b);
      const std::vector<char> mask = graph::pair_connectivity(g, a, b);
      const bool any_connected = std::any_of(mask.begin(), mask.end(), [](char c) { return c; });
      const bool any_unconnected =
          std::any_of(mask.begin(), mask.end(), [](char c) { return !c; });

      auto emit = [&](const char* loss, const Window& window, auto&& eval) {
        if (!window.contains(timestep)) {
          out.records.push_back({timestep, a, b, loss, 0.0, 0.0, false});
          return;
        }
        const PairLossResult r = eval();
        out.records.push_back({timestep, a, b, loss, r.value, pair_grad_norm(r), true});
        const double w = loss == std::string("gli")          ? cfg.gli_weight
                         : loss == std::string("proxemics") ? cfg.proxemics_weight
                                                            : cfg.contact_weight;
        out.total += w * r.value;
        if (!a_scripted) accumulate(out.grads[i], r.grad_i, w);
        if (!b_scripted) accumulate(out.grads[j], r.grad_j, w);
      };

      if (any_connected && cfg.gli_weight > 0)
        emit("gli", cfg.gli_window,
             [&] { return pair_gli_loss(ma, mb, skeleton, cfg, mask); });
      if (any_connected && cfg.contact_weight > 0)
        emit("contact", cfg.contact_window,
             [&] { return pair_overlap_loss(ma, mb, skeleton, cfg, mask, false); });
      if (any_unconnected && cfg.proxemics_weight > 0) {
        std::vector<char> inv(mask.size());
        for (size_t k = 0; k < mask.size(); ++k) inv[k] = !mask[k];
        emit("proxemics", cfg.proxemics_window,
             [&] { return pair_overlap_loss(ma, mb, skeleton, cfg, inv, true); });
      }
    }
  }
  return out;
}

}  // namespace gm::losses
