#include "fasim/optim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "fasim/errors.hpp"

namespace fasim {

namespace {

double norm2(const Eigen::VectorXcd& v) { return v.squaredNorm(); }

std::vector<ChannelVector> channels_for_positions(const Layout& layout, const RadioParams& params,
                                                  const std::vector<Point>& rxs,
                                                  std::span<const double> xs, double y0) {
  std::vector<ChannelVector> h(rxs.size());
  for (std::size_t k = 0; k < rxs.size(); ++k) {
    ChannelVector hk(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t j = 0; j < xs.size(); ++j)
      hk[static_cast<Eigen::Index>(j)] =
          channel_coefficient(layout, params, Point{xs[j], y0}, rxs[k]);
    h[k] = std::move(hk);
  }
  return h;
}

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    r = r * (n - i) / (i + 1);
    if (r > cap) return cap + 1;
  }
  return r;
}

}  // namespace

double BeamformingSet::total_power() const {
  double p = 0.0;
  for (const auto& w : vectors) p += norm2(w);
  return p;
}

double sinr(std::size_t k, const std::vector<ChannelVector>& channels, const BeamformingSet& beams,
            double sigma2, SinrConvention convention) {
  const std::size_t users = channels.size();
  if (beams.vectors.size() != users) throw std::invalid_argument("sinr: K mismatch");
  const double signal = std::norm(channels[k].dot(beams.vectors[k]));
  double interference = 0.0;
  for (std::size_t kk = 0; kk < users; ++kk) {
    if (kk == k) continue;
    if (convention == SinrConvention::Downlink)
      interference += std::norm(channels[k].dot(beams.vectors[kk]));
    else
      interference += std::norm(channels[kk].dot(beams.vectors[k]));
  }
  return signal / (interference + sigma2);
}

double sum_rate(const std::vector<ChannelVector>& channels, const BeamformingSet& beams,
                double sigma2, SinrConvention convention) {
  double rate = 0.0;
  for (std::size_t k = 0; k < channels.size(); ++k)
    rate += std::log2(1.0 + sinr(k, channels, beams, sigma2, convention));
  return rate;
}

ConstraintReport check_constraints(std::span<const double> thetas, const BeamformingSet& beams,
                                   const FasConstraints& c) {
  ConstraintReport report;
  auto fail = [&](ConstraintViolation v, const std::string& msg) {
    report.ok = false;
    report.violations.push_back(v);
    if (!report.detail.empty()) report.detail += "; ";
    report.detail += msg;
  };
  const double power = beams.total_power();
  if (power > c.p_max)
    fail(ConstraintViolation::PowerExceeded,
         "total power " + std::to_string(power) + " exceeds " + std::to_string(c.p_max));
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    if (thetas[j] < c.theta_l || thetas[j] > c.theta_r) {
      fail(ConstraintViolation::ThetaOutOfRange, "theta[" + std::to_string(j) + "] out of range");
      break;
    }
  }
  for (std::size_t j = 1; j < thetas.size(); ++j) {
    if (thetas[j] < thetas[j - 1]) {
      fail(ConstraintViolation::ThetaUnsorted, "thetas not sorted");
      break;
    }
  }
  for (std::size_t j = 1; j < thetas.size(); ++j) {
    if (std::abs(thetas[j] - thetas[j - 1]) < c.delta) {
      fail(ConstraintViolation::SeparationTooSmall, "adjacent separation below delta");
      break;
    }
  }
  return report;
}

WmmseResult wmmse(const std::vector<ChannelVector>& channels, double p_max, double sigma2,
                  int max_iters, double tol) {
  const std::size_t users = channels.size();
  if (users == 0) throw std::invalid_argument("wmmse: no channels");
  const Eigen::Index n = channels[0].size();
  if (static_cast<std::size_t>(n) < users)
    throw std::invalid_argument("wmmse: needs at least as many antennas as receivers");

  WmmseResult result;
  result.beams.vectors.resize(users);
  // Matched filters with an equal power split.
  for (std::size_t k = 0; k < users; ++k) {
    const double hn = channels[k].norm();
    if (hn == 0.0) throw std::domain_error("wmmse: zero channel for receiver " + std::to_string(k));
    result.beams.vectors[k] = channels[k] * (std::sqrt(p_max / static_cast<double>(users)) / hn);
  }

  std::vector<Complex> u(users);
  std::vector<double> v(users);
  double prev_rate = sum_rate(channels, result.beams, sigma2);
  result.rate_history.push_back(prev_rate);

  for (int iter = 0; iter < max_iters; ++iter) {
    // Receive scalars and MSE weights.
    for (std::size_t k = 0; k < users; ++k) {
      double denom = sigma2;
      for (std::size_t j = 0; j < users; ++j)
        denom += std::norm(channels[k].dot(result.beams.vectors[j]));
      const Complex b = channels[k].dot(result.beams.vectors[k]);
      u[k] = b / denom;
      const double mse = 1.0 - std::real(std::conj(u[k]) * b);
      v[k] = 1.0 / std::max(mse, 1e-14);
    }

    // Beamformers: w_k = v_k u_k (A + mu I)^{-1} h_k, mu >= 0 from the power
    // constraint by bisection.
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t k = 0; k < users; ++k)
      a += v[k] * std::norm(u[k]) * (channels[k] * channels[k].adjoint());

    auto beams_for_mu = [&](double mu) {
      std::vector<Eigen::VectorXcd> w(users);
      Eigen::MatrixXcd m = a + mu * Eigen::MatrixXcd::Identity(n, n);
      Eigen::LDLT<Eigen::MatrixXcd> ldlt(m);
      for (std::size_t k = 0; k < users; ++k)
        w[k] = v[k] * u[k] * ldlt.solve(channels[k]);
      return w;
    };
    auto power_of = [](const std::vector<Eigen::VectorXcd>& w) {
      double p = 0.0;
      for (const auto& wk : w) p += wk.squaredNorm();
      return p;
    };

    auto w0 = beams_for_mu(0.0);
    double p0 = power_of(w0);
    if (std::isfinite(p0) && p0 <= p_max) {
      result.beams.vectors = std::move(w0);
    } else {
      if (!std::isfinite(p0)) result.regularized = true;
      double lo = 0.0, hi = 1.0;
      while (power_of(beams_for_mu(hi)) > p_max) {
        hi *= 2.0;
        if (hi > 1e18) throw NumericError("wmmse: dual bisection failed to bracket");
      }
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (power_of(beams_for_mu(mid)) > p_max)
          lo = mid;
        else
          hi = mid;
      }
      result.beams.vectors = beams_for_mu(hi);
    }

    const double rate = sum_rate(channels, result.beams, sigma2);
    result.rate_history.push_back(rate);
    result.iterations = iter + 1;
    if (rate - prev_rate < tol && iter > 0) break;
    prev_rate = rate;
  }
  result.sum_rate = result.rate_history.back();
  return result;
}

GridSearchResult grid_search_positions(const Layout& layout, const RadioParams& params,
                                       const std::vector<Point>& rxs, int n_antennas,
                                       const FasLine& fas, const FasConstraints& c,
                                       double anchor_x, double grid_spacing, int grid_count,
                                       std::uint64_t cap, int workers) {
  if (n_antennas < 1 || n_antennas > grid_count)
    throw std::invalid_argument("grid search: need 1 <= antennas <= grid points");
  const std::uint64_t total =
      binomial_capped(static_cast<std::uint64_t>(grid_count), static_cast<std::uint64_t>(n_antennas), cap);
  if (total > cap)
    throw InfeasibleError(
        "grid search: combination count exceeds cap; reduce grid_count or antennas");

  // Materialize all combinations first so workers can split them evenly.
  std::vector<std::vector<int>> combos;
  combos.reserve(total);
  std::vector<int> idx(n_antennas);
  for (int i = 0; i < n_antennas; ++i) idx[i] = i;
  while (true) {
    combos.push_back(idx);
    int i = n_antennas - 1;
    while (i >= 0 && idx[i] == grid_count - n_antennas + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < n_antennas; ++j) idx[j] = idx[j - 1] + 1;
  }

  struct Best {
    double rate = -1.0;
    std::size_t combo = 0;
    WmmseResult wm;
  };
  auto evaluate_range = [&](std::size_t begin, std::size_t end, Best& best) {
    std::vector<double> xs(n_antennas);
    for (std::size_t ci = begin; ci < end; ++ci) {
      for (int j = 0; j < n_antennas; ++j) xs[j] = anchor_x + grid_spacing * combos[ci][j];
      const auto h = channels_for_positions(layout, params, rxs, xs, fas.y0);
      auto wm = wmmse(h, c.p_max, params.noise_power_w);
      if (wm.sum_rate > best.rate || (wm.sum_rate == best.rate && ci < best.combo)) {
        best.rate = wm.sum_rate;
        best.combo = ci;
        best.wm = std::move(wm);
      }
    }
  };

  const int nw = std::max(1, std::min<int>(workers, static_cast<int>(combos.size())));
  std::vector<Best> bests(nw);
  if (nw == 1) {
    evaluate_range(0, combos.size(), bests[0]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (combos.size() + nw - 1) / nw;
    for (int t = 0; t < nw; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(combos.size(), b + chunk);
      pool.emplace_back(evaluate_range, b, e, std::ref(bests[t]));
    }
    for (auto& th : pool) th.join();
  }
  Best best = bests[0];
  for (int t = 1; t < nw; ++t)
    if (bests[t].rate > best.rate || (bests[t].rate == best.rate && bests[t].combo < best.combo))
      best = bests[t];

  GridSearchResult result;
  result.combinations = combos.size();
  result.sum_rate = best.rate;
  result.beams = std::move(best.wm.beams);
  for (int j = 0; j < n_antennas; ++j) {
    const double x = anchor_x + grid_spacing * combos[best.combo][j];
    result.positions_x.push_back(x);
    result.thetas.push_back(position_to_theta(Point{x, fas.y0}, fas));
  }
  return result;
}

FixedPositionsResult wmmse_fixed_positions(const Layout& layout, const RadioParams& params,
                                           const std::vector<Point>& rxs, int n_antennas,
                                           const FasLine& fas, const FasConstraints& c,
                                           int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("wmmse_fixed_positions: samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> theta_dist(c.theta_l, c.theta_r);

  double sum = 0.0, sum_sq = 0.0;
  std::vector<double> thetas(n_antennas), xs(n_antennas);
  for (int s = 0; s < samples; ++s) {
    // Rejection-sample a feasible sorted tuple.
    for (int attempt = 0;; ++attempt) {
      for (int j = 0; j < n_antennas; ++j) thetas[j] = theta_dist(rng);
      std::sort(thetas.begin(), thetas.end());
      bool ok = true;
      for (int j = 1; j < n_antennas; ++j)
        if (thetas[j] - thetas[j - 1] < c.delta) ok = false;
      if (ok) break;
      if (attempt > 100000)
        throw std::domain_error("wmmse_fixed_positions: separation constraint too tight to sample");
    }
    for (int j = 0; j < n_antennas; ++j) xs[j] = theta_to_position(thetas[j], fas).x;
    const auto h = channels_for_positions(layout, params, rxs, xs, fas.y0);
    const double rate = wmmse(h, c.p_max, params.noise_power_w).sum_rate;
    sum += rate;
    sum_sq += rate * rate;
  }
  FixedPositionsResult result;
  result.samples = samples;
  result.mean_rate = sum / samples;
  result.stddev = samples > 1 ? std::sqrt(std::max(0.0, sum_sq / samples - result.mean_rate * result.mean_rate))
                              : 0.0;
  return result;
}

}  // namespace fasim
