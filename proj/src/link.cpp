#include "stardeploy/link.hpp"

#include <cmath>

#include "stardeploy/error.hpp"
#include "stardeploy/kernels.hpp"

namespace stardeploy {

double thermal_noise_watts(double bandwidth_hz, double noise_figure_db) {
  const double dbm = -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

void NoiseModel::validate() const {
  if (!(sigma2 > 0.0)) throw ConfigError("noise: sigma2 must be > 0");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("noise: bandwidth must be > 0");
  if (!(p_max > 0.0)) throw ConfigError("noise: p_max must be > 0");
}

CVector effective_channel(std::span<const cplx> h_bk, std::span<const cplx> h_rk,
                          const DiagonalMatrix& theta, const CMatrix& bs_ris) {
  if (bs_ris.cols() != h_bk.size()) throw_dimension("effective_channel: H_br columns", h_bk.size(), bs_ris.cols());
  if (bs_ris.rows() != h_rk.size()) throw_dimension("effective_channel: H_br rows", h_rk.size(), bs_ris.rows());
  if (theta.size() != h_rk.size()) throw_dimension("effective_channel: Theta size", h_rk.size(), theta.size());

  CVector eff(h_bk.begin(), h_bk.end());
  for (std::size_t n = 0; n < h_rk.size(); ++n) {
    const cplx coeff = h_rk[n] * theta.diag[n];
    if (coeff == cplx{}) continue;
    kernels::caxpy(coeff, bs_ris.row(n), eff);
  }
  return eff;
}

namespace {

std::vector<CVector> columns_of(const Beamformer& bf) {
  std::vector<CVector> cols(bf.users());
  for (std::size_t k = 0; k < bf.users(); ++k) cols[k] = bf.column(k);
  return cols;
}

double sinr_from_columns(std::size_t k, std::span<const CVector> cols, const CVector& eff,
                         double sigma2) {
  double signal = 0.0;
  double interference = 0.0;
  for (std::size_t u = 0; u < cols.size(); ++u) {
    const double p = std::norm(kernels::cdot(eff, cols[u]));
    if (u == k) {
      signal = p;
    } else {
      interference += p;
    }
  }
  return signal / (interference + sigma2);
}

}  // namespace

double sinr(std::size_t k, const Beamformer& bf, std::span<const CVector> effective,
            const NoiseModel& noise) {
  if (k >= effective.size() || k >= bf.users()) throw DimensionError("sinr: user index out of range");
  if (effective[k].size() != bf.antennas()) {
    throw_dimension("sinr: effective channel length", bf.antennas(), effective[k].size());
  }
  const auto cols = columns_of(bf);
  return sinr_from_columns(k, cols, effective[k], noise.sigma2);
}

double rate(double gamma, double bandwidth_hz) { return bandwidth_hz * std::log2(1.0 + gamma); }

std::vector<CVector> effective_channels(const ChannelRealization& ch, std::span<const Region> regions,
                                        const StarMatrices& mats) {
  const std::size_t k_users = ch.bs_users.cols();
  if (regions.size() != k_users) throw_dimension("effective_channels: regions", k_users, regions.size());
  if (ch.ris_users.cols() != k_users) throw_dimension("effective_channels: H_ru columns", k_users, ch.ris_users.cols());

  std::vector<CVector> out(k_users);
  for (std::size_t k = 0; k < k_users; ++k) {
    const CVector h_bk = ch.bs_users.column(k);
    const CVector h_rk = ch.ris_users.column(k);
    out[k] = effective_channel(h_bk, h_rk, select_theta(regions[k], mats), ch.bs_ris);
  }
  return out;
}

std::vector<double> user_rates(const ChannelRealization& ch, std::span<const Region> regions,
                               const StarMatrices& mats, const Beamformer& bf,
                               const NoiseModel& noise) {
  const auto eff = effective_channels(ch, regions, mats);
  if (bf.users() != eff.size()) throw_dimension("user_rates: beamformer columns", eff.size(), bf.users());
  if (bf.antennas() != ch.bs_users.rows()) throw_dimension("user_rates: beamformer rows", ch.bs_users.rows(), bf.antennas());

  const auto cols = columns_of(bf);
  std::vector<double> rates(eff.size());
  for (std::size_t k = 0; k < eff.size(); ++k) {
    rates[k] = rate(sinr_from_columns(k, cols, eff[k], noise.sigma2), noise.bandwidth_hz);
  }
  return rates;
}

double sum_rate(const ChannelRealization& ch, std::span<const Region> regions,
                const StarMatrices& mats, const Beamformer& bf, const NoiseModel& noise) {
  double total = 0.0;
  for (double r : user_rates(ch, regions, mats, bf, noise)) total += r;
  return total;
}

double sum_rate(const ChannelRealization& ch, std::span<const Region> regions,
                const StarElements& elements, const Beamformer& bf, const NoiseModel& noise) {
  return sum_rate(ch, regions, build_matrices(elements), bf, noise);
}

}  // namespace stardeploy
