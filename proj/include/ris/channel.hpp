#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ris/model.hpp"
#include "ris/system_config.hpp"

namespace ris {

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Draws one realization: users uniform over config.user_region, i.i.d. CN(0,1)
// small-scale fading scaled by sqrt(pathloss) of the BS->RIS distance (h1) and
// of each RIS->user distance (row k of h2). Identical seeds give bitwise
// identical draws. The draw order is positions, h1 (column-major), h2.
template <typename Scalar = double>
ChannelRealization<Scalar> generate_channels(const SystemConfig& config, std::uint64_t seed) {
  const Eigen::Index m = config.bs_antennas;
  const Eigen::Index k = config.users;
  const Eigen::Index n = config.ris_elements;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(config.user_region.x_min, config.user_region.x_max);
  std::uniform_real_distribution<double> uy(config.user_region.y_min, config.user_region.y_max);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

  ChannelRealization<Scalar> ch;
  ch.user_positions.resize(static_cast<size_t>(k));
  for (auto& pos : ch.user_positions) {
    pos.x = ux(rng);
    pos.y = uy(rng);
  }

  auto draw = [&](double scale) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    return Complex<Scalar>(static_cast<Scalar>(scale * re), static_cast<Scalar>(scale * im));
  };

  const double g1 = std::sqrt(pathloss(config, distance(config.bs_pos, config.ris_pos)));
  ch.h1.resize(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) ch.h1(i, j) = draw(g1);

  ch.h2.resize(k, n);
  for (Eigen::Index u = 0; u < k; ++u) {
    const double g2 = std::sqrt(pathloss(config, distance(config.ris_pos, ch.user_positions[u])));
    for (Eigen::Index i = 0; i < n; ++i) ch.h2(u, i) = draw(g2);
  }
  return ch;
}

// FNV-1a over the raw channel coefficients; identifies a draw in result files.
template <typename Scalar>
std::uint64_t channel_hash(const ChannelRealization<Scalar>& ch) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  mix(ch.h1.data(), sizeof(Complex<Scalar>) * static_cast<size_t>(ch.h1.size()));
  mix(ch.h2.data(), sizeof(Complex<Scalar>) * static_cast<size_t>(ch.h2.size()));
  return h;
}

}  // namespace ris
