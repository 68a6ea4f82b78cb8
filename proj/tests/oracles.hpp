#pragma once

// Reference computations written independently of the library code, plus the
// random generators used by the property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bciarm/eeg/signal.hpp"
#include "bciarm/kinematics/kinematics.hpp"

namespace oracle {

inline constexpr long double kPi = std::numbers::pi_v<long double>;

// Hann-windowed one-sided periodogram by direct O(N^2) summation in long
// double. Density units: uV^2/Hz.
inline std::vector<double> psd(std::span<const double> x, double fs) {
  const std::size_t n = x.size();
  std::vector<long double> w(n);
  long double w2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5L - 0.5L * std::cos(2 * kPi * static_cast<long double>(i) / static_cast<long double>(n));
    w2 += w[i] * w[i];
  }
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    long double re = 0, im = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const long double ang = -2 * kPi * static_cast<long double>(k * i % n) / static_cast<long double>(n);
      re += w[i] * x[i] * std::cos(ang);
      im += w[i] * x[i] * std::sin(ang);
    }
    const long double one_sided = (k == 0 || k == n / 2) ? 1 : 2;
    out[k] = static_cast<double>(one_sided * (re * re + im * im) / (fs * w2));
  }
  return out;
}

inline double band_sum(const std::vector<double>& density, double fs, double lo, double hi) {
  const double df = fs / static_cast<double>(2 * (density.size() - 1));
  long double s = 0;
  for (std::size_t k = 0; k < density.size(); ++k) {
    const double f = static_cast<double>(k) * df;
    if (f >= lo && f < hi) s += density[k];
  }
  return static_cast<double>(s);
}

struct Moments {
  double mean, variance, skewness, kurtosis, max, min;
};

// Two passes in long double.
inline Moments moments(std::span<const double> d) {
  const auto n = static_cast<long double>(d.size());
  long double sum = 0;
  for (double v : d) sum += v;
  const long double mu = sum / n;
  long double m2 = 0, m3 = 0, m4 = 0;
  for (double v : d) {
    const long double c = v - mu;
    m2 += c * c;
    m3 += c * c * c;
    m4 += c * c * c * c;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  Moments m{};
  m.mean = static_cast<double>(mu);
  m.variance = static_cast<double>(m2);
  m.skewness = m2 > 0 ? static_cast<double>(m3 / std::pow(m2, 1.5L)) : 0.0;
  m.kurtosis = m2 > 0 ? static_cast<double>(m4 / (m2 * m2)) : 0.0;
  m.max = *std::max_element(d.begin(), d.end());
  m.min = *std::min_element(d.begin(), d.end());
  return m;
}

inline Eigen::Matrix4d rot_x(double deg) {
  const double r = deg * std::numbers::pi / 180.0;
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(1, 1) = std::cos(r);
  m(1, 2) = -std::sin(r);
  m(2, 1) = std::sin(r);
  m(2, 2) = std::cos(r);
  return m;
}

inline Eigen::Matrix4d rot_z(double deg) {
  const double r = deg * std::numbers::pi / 180.0;
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 0) = std::cos(r);
  m(0, 1) = -std::sin(r);
  m(1, 0) = std::sin(r);
  m(1, 1) = std::cos(r);
  return m;
}

inline Eigen::Matrix4d trans(double x, double y, double z) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 3) = x;
  m(1, 3) = y;
  m(2, 3) = z;
  return m;
}

// The six elementary transforms for the arm, each built as
// RotX(alpha) * TransX(a) * TransZ(d) * RotZ(theta).
inline Eigen::Matrix4d fk_chain(const bciarm::kin::LinkLengths& L, const bciarm::kin::JointAngles& q) {
  auto link = [](double alpha, double a, double d, double theta) -> Eigen::Matrix4d {
    return rot_x(alpha) * trans(a, 0, 0) * trans(0, 0, d) * rot_z(theta);
  };
  return link(0, 0, L.l1, q[0]) * link(-90, 0, 0, q[1] - 90) * link(0, L.l2, 0, q[2]) *
         link(0, L.l3, 0, q[3]) * link(-90, 0, 0, q[4]) * link(0, 0, L.l4, 0);
}

// Position column from the A/B shorthand of the closed-form FK:
//   A = L2 S2 + L3 S23 + L4 C234,  B = L1 + L2 C2 + L3 C23 - L4 S234
//   p = (C1 A, S1 A, B)
inline Eigen::Vector3d fk_ab(const bciarm::kin::LinkLengths& L, const bciarm::kin::JointAngles& q) {
  const double k = std::numbers::pi / 180.0;
  const double t1 = q[0] * k, t2 = q[1] * k, t23 = (q[1] + q[2]) * k, t234 = (q[1] + q[2] + q[3]) * k;
  const double a = L.l2 * std::sin(t2) + L.l3 * std::sin(t23) + L.l4 * std::cos(t234);
  const double b = L.l1 + L.l2 * std::cos(t2) + L.l3 * std::cos(t23) - L.l4 * std::sin(t234);
  return {std::cos(t1) * a, std::sin(t1) * a, b};
}

inline std::vector<double> sine(std::size_t n, double hz, double amp = 1.0, double phase = 0.0,
                                 double fs = bciarm::eeg::kSampleRate) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amp * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs + phase);
  }
  return x;
}

inline double rms(std::span<const double> x) {
  long double s = 0;
  for (double v : x) s += static_cast<long double>(v) * v;
  return static_cast<double>(std::sqrt(s / static_cast<long double>(x.size())));
}

inline double rms_diff(std::span<const double> a, std::span<const double> b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i] - b[i]) * (a[i] - b[i]);
  return static_cast<double>(std::sqrt(s / static_cast<long double>(a.size())));
}

// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  long long integer(long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(rng_); }
  double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(rng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  std::vector<double> normals(std::size_t n, double sd = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = normal(sd);
    return v;
  }

  bciarm::eeg::EegEpoch noise_epoch(double sd = 10.0) {
    bciarm::eeg::EegEpoch e;
    for (auto& ch : e.data) {
      for (double& v : ch) v = normal(sd);
    }
    return e;
  }

  // Uniform joint angles inside the table's limits (theta6 stays 0).
  bciarm::kin::JointAngles angles(const bciarm::kin::DhTable& table) {
    bciarm::kin::JointAngles q;
    for (std::size_t i = 0; i < 5; ++i) {
      q[i] = uniform(table.limits()[i].min_deg, table.limits()[i].max_deg);
    }
    return q;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline bciarm::eeg::EegEpoch epoch_from(const std::vector<double>& channel_signal) {
  bciarm::eeg::EegEpoch e;
  for (auto& ch : e.data) std::copy_n(channel_signal.begin(), bciarm::eeg::kEpochSamples, ch.begin());
  return e;
}

}  // namespace oracle
