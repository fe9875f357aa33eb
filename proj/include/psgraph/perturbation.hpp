#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "psgraph/community.hpp"
#include "psgraph/dp.hpp"
#include "psgraph/errors.hpp"
#include "psgraph/graph.hpp"
#include "psgraph/sym_matrix.hpp"

namespace psgraph {

// Sensitivities: one edge touches two node degrees, one community pair.
inline constexpr double kDegreeSensitivity = 2.0;
inline constexpr double kEdgeCountSensitivity = 1.0;

// Per-node degree split: d_in within the node's community, d_out across.
// Pre-noise, d_in[v] + d_out[v] equals the total degree of v.
struct DegreeProfile {
  DegreeVector d_in;
  DegreeVector d_out;
};

// K x K community-pair edge counts; the diagonal is unused (intra edges
// live in d_in).
using CommunityEdgeMatrix = SymMatrix;

// Noisy, consistency-processed information together with the budgets that
// produced it (the fusion weights are budget ratios).
struct PerturbedProfile {
  DegreeVector d_in_hat;
  DegreeVector d_out_hat;
  CommunityEdgeMatrix v_hat;
  double m_pert = 0.0;
  double eps_i = 0.0;
  double eps_i1 = 0.0;
  double eps_i2 = 0.0;
};

// Exact extraction of intra/inter degrees and the community-pair counts.
inline std::pair<DegreeProfile, CommunityEdgeMatrix> extract(
    const Snapshot& s, const CommunityPartition& part) {
  if (part.assignment.size() != s.num_nodes)
    throw ContractError("extract: partition does not cover the snapshot");

  DegreeProfile profile;
  profile.d_in.assign(s.num_nodes, 0.0);
  profile.d_out.assign(s.num_nodes, 0.0);
  CommunityEdgeMatrix v(part.num_communities);
  for (const auto& [x, y] : s.edges) {
    std::uint32_t a = part.assignment[x];
    std::uint32_t b = part.assignment[y];
    if (a == b) {
      profile.d_in[x] += 1.0;
      profile.d_in[y] += 1.0;
    } else {
      profile.d_out[x] += 1.0;
      profile.d_out[y] += 1.0;
      v.at(a, b) += 1.0;
    }
  }
  return {std::move(profile), std::move(v)};
}

// NormSub applied independently to d_in, d_out and the off-diagonal upper
// triangle of v_hat; all outputs non-negative.
inline PerturbedProfile consistency(PerturbedProfile p) {
  p.d_in_hat = normsub(p.d_in_hat);
  p.d_out_hat = normsub(p.d_out_hat);

  std::uint32_t k = p.v_hat.size();
  std::vector<double> tri;
  tri.reserve(k > 0 ? static_cast<std::size_t>(k) * (k - 1) / 2 : 0);
  for (std::uint32_t a = 0; a < k; ++a)
    for (std::uint32_t b = a + 1; b < k; ++b) tri.push_back(p.v_hat.at(a, b));
  tri = normsub(tri);
  std::size_t idx = 0;
  for (std::uint32_t a = 0; a < k; ++a)
    for (std::uint32_t b = a + 1; b < k; ++b) p.v_hat.at(a, b) = tri[idx++];
  return p;
}

// Noise injection per the phase-2 budget split: d_in carries the full eps_i
// (it touches only intra-community edges, disjoint from the other two),
// while d_out and V sequentially share it as eps_i1 + eps_i2. Consistency
// processing is applied before returning.
inline PerturbedProfile perturb(const DegreeProfile& profile,
                                const CommunityEdgeMatrix& v, double eps_i,
                                double eps_i1, NoiseSource& ns) {
  if (!(eps_i > 0.0)) throw ContractError("perturb: eps_i <= 0");
  if (!(eps_i1 > 0.0) || !(eps_i1 < eps_i))
    throw ContractError("perturb: need 0 < eps_i1 < eps_i");
  double eps_i2 = eps_i - eps_i1;

  PerturbedProfile out;
  out.eps_i = eps_i;
  out.eps_i1 = eps_i1;
  out.eps_i2 = eps_i2;
  out.d_in_hat.resize(profile.d_in.size());
  out.d_out_hat.resize(profile.d_out.size());
  for (std::size_t i = 0; i < profile.d_in.size(); ++i)
    out.d_in_hat[i] =
        laplace_perturb(profile.d_in[i], eps_i, kDegreeSensitivity, ns);
  for (std::size_t i = 0; i < profile.d_out.size(); ++i)
    out.d_out_hat[i] =
        laplace_perturb(profile.d_out[i], eps_i1, kDegreeSensitivity, ns);
  out.v_hat = CommunityEdgeMatrix(v.size());
  for (std::uint32_t a = 0; a < v.size(); ++a)
    for (std::uint32_t b = a + 1; b < v.size(); ++b)
      out.v_hat.at(a, b) =
          laplace_perturb(v.at(a, b), eps_i2, kEdgeCountSensitivity, ns);
  return consistency(std::move(out));
}

// Budget-weighted fusion with the previous timestamp's (already fused)
// profile. Applies only when the current partition was reused, and only to
// nodes present at both timestamps; new nodes keep their current values.
// The community-pair counts are never fused.
inline PerturbedProfile fuse(const PerturbedProfile& current,
                             const PerturbedProfile& previous, bool reused) {
  if (!reused) return current;
  if (previous.d_in_hat.size() > current.d_in_hat.size() ||
      previous.d_out_hat.size() > current.d_out_hat.size())
    throw ContractError("fuse: previous profile covers more nodes than current");

  double alpha1 = current.eps_i / (current.eps_i + previous.eps_i);
  double alpha2 = current.eps_i1 / (current.eps_i1 + previous.eps_i1);

  PerturbedProfile out = current;
  for (std::size_t i = 0; i < previous.d_in_hat.size(); ++i)
    out.d_in_hat[i] =
        alpha1 * current.d_in_hat[i] + (1.0 - alpha1) * previous.d_in_hat[i];
  for (std::size_t i = 0; i < previous.d_out_hat.size(); ++i)
    out.d_out_hat[i] =
        alpha2 * current.d_out_hat[i] + (1.0 - alpha2) * previous.d_out_hat[i];
  return out;
}

}  // namespace psgraph
