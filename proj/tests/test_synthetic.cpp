#include <cstring>
#include <set>

#include "bciarm/eeg/synthetic.hpp"
#include "bciarm/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bciarm;
using namespace bciarm::eeg;

namespace {

bool identical(const std::vector<EegSample>& a, const std::vector<EegSample>& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(EegSample)) == 0;
}

// Mean band power per channel over the epochs of a stream.
std::array<double, kChannels> mean_power(const std::vector<EegSample>& s, std::size_t band) {
  std::array<double, kChannels> acc{};
  const auto epochs = make_epochs(s);
  for (const auto& e : epochs) {
    const BandPower p = spectral_power(remove_dc(e));
    for (std::size_t c = 0; c < kChannels; ++c) acc[c] += p.at(band, c) / static_cast<double>(epochs.size());
  }
  return acc;
}

}  // namespace

TEST_SUITE("synthetic") {

TEST_CASE("identical seeds give bit-identical streams") {
  CHECK(identical(gen_synthetic(std::nullopt, Condition::Quiet, 2.0, 1),
                  gen_synthetic(std::nullopt, Condition::Quiet, 2.0, 1)));
  CHECK(identical(gen_synthetic(Command::Lift, Condition::Noisy, 10.0, 77),
                  gen_synthetic(Command::Lift, Condition::Noisy, 10.0, 77)));
  CHECK_FALSE(identical(gen_synthetic(std::nullopt, Condition::Quiet, 2.0, 1),
                        gen_synthetic(std::nullopt, Condition::Quiet, 2.0, 2)));
}

TEST_CASE("streams shorter than one epoch are refused") {
  CHECK_THROWS_AS(gen_synthetic(std::nullopt, Condition::Quiet, 1.9, 1), DomainError);
  CHECK(gen_synthetic(std::nullopt, Condition::Quiet, 2.0, 1).size() == 256);
}

TEST_CASE("timestamps run at 128 Hz") {
  const auto s = gen_synthetic(Command::Push, Condition::Quiet, 4.0, 3);
  REQUIRE(s.size() == 512);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i].t == static_cast<double>(i) / 128.0);
}

TEST_CASE("the noisy condition raises mean Beta power") {
  double quiet = 0, noisy = 0;
  const auto q = mean_power(gen_synthetic(std::nullopt, Condition::Quiet, 60.0, 5), 1);
  const auto n = mean_power(gen_synthetic(std::nullopt, Condition::Noisy, 60.0, 5), 1);
  for (std::size_t c = 0; c < kChannels; ++c) {
    quiet += q[c];
    noisy += n[c];
    CHECK(n[c] > q[c]);
  }
  CHECK(noisy > quiet);
}

TEST_CASE("commands desynchronise Alpha") {
  const auto rest = mean_power(gen_synthetic(std::nullopt, Condition::Quiet, 40.0, 9), 0);
  for (Command c : {Command::Push, Command::Pull, Command::Lift, Command::Drop}) {
    const auto cmd = mean_power(gen_synthetic(c, Condition::Quiet, 40.0, 9), 0);
    double r = 0, m = 0;
    for (std::size_t ch = 0; ch < kChannels; ++ch) {
      r += rest[ch];
      m += cmd[ch];
    }
    CHECK(m < r);
    // Strongest drop on the command's ERD channel.
    const auto mod = SyntheticEeg::modulation(c);
    const auto erd = static_cast<std::size_t>(
        std::max_element(mod.alpha_drop.begin(), mod.alpha_drop.end()) - mod.alpha_drop.begin());
    CHECK(cmd[erd] < 0.6 * rest[erd]);
  }
}

TEST_CASE("every command has its own channel signature") {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (Command c : kAllCommands) {
    const auto m = SyntheticEeg::modulation(c);
    const auto erd = static_cast<std::size_t>(std::max_element(m.alpha_drop.begin(), m.alpha_drop.end()) -
                                              m.alpha_drop.begin());
    const auto ers = static_cast<std::size_t>(std::max_element(m.beta_gain.begin(), m.beta_gain.end()) -
                                              m.beta_gain.begin());
    CHECK(erd != ers);
    seen.insert({erd, ers});
    for (std::size_t ch = 0; ch < kChannels; ++ch) {
      CHECK(m.alpha_drop[ch] > 0.0);
      CHECK(m.alpha_drop[ch] < 1.0);
      CHECK(m.beta_gain[ch] > 0.0);
    }
  }
  CHECK(seen.size() == kCommandCount);
  const auto rest = SyntheticEeg::modulation(std::nullopt);
  for (std::size_t ch = 0; ch < kChannels; ++ch) {
    CHECK(rest.alpha_drop[ch] == 0.0);
    CHECK(rest.beta_gain[ch] == 0.0);
  }
}

TEST_CASE("sessions carry one label per command block") {
  const auto s = gen_session({{Command::Push, 10.0}, {std::nullopt, 4.0}, {Command::Smile, 6.0}}, Condition::Quiet, 4);
  CHECK(s.samples.size() == 20 * 128);
  REQUIRE(s.labels.size() == 2);
  CHECK(s.labels[0].start_t == 0.0);
  CHECK(s.labels[0].end_t == 10.0);
  CHECK(s.labels[0].label == Command::Push);
  CHECK(s.labels[1].start_t == 14.0);
  CHECK(s.labels[1].end_t == 20.0);
  CHECK(s.labels[1].label == Command::Smile);
}

TEST_CASE("quiet part of a noisy stream matches the quiet stream") {
  // The high-Beta component comes from its own random stream, so the
  // difference between conditions is band-limited to 22-28 Hz.
  const auto q = gen_synthetic(Command::Drop, Condition::Quiet, 8.0, 21);
  const auto n = gen_synthetic(Command::Drop, Condition::Noisy, 8.0, 21);
  std::vector<double> diff(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) diff[i] = n[i].ch[0] - q[i].ch[0];
  const auto d = power_spectrum(std::span<const double>(diff).first(256));
  long double in = 0, out = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double f = static_cast<double>(k) * 0.5;
    (f >= 20.0 && f <= 30.0 ? in : out) += d[k];
  }
  CHECK(in > 0);
  CHECK(static_cast<double>(out / in) < 0.01);
}

}  // TEST_SUITE
