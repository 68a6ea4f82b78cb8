#include <chrono>
#include <map>

#include "bciarm/error.hpp"
#include "bciarm/service/server.hpp"
#include "doctest.h"
#include "json.hpp"
#include "ws_client.hpp"

using namespace bciarm;
using namespace bciarm::service;
using nlohmann::json;

namespace {

// Adds error collection on top of the plain client.
class Client : public wsclient::Client {
 public:
  using wsclient::Client::Client;

  // Reads until a state message satisfies `done`; error replies are
  // collected on the side.
  template <typename Pred>
  json read_state_until(Pred done, int max_messages = 100000) {
    for (int i = 0; i < max_messages; ++i) {
      json m = read_json();
      if (m.at("type") == "error") {
        errors.push_back(m);
        continue;
      }
      if (done(m)) return m;
    }
    FAIL("state never reached");
    return {};
  }

  std::vector<json> errors;
};

using wsclient::Running;

std::string command(std::string_view label, double strength) {
  return json{{"type", "command"}, {"name", label}, {"strength", strength}}.dump();
}

}  // namespace

TEST_SUITE("service-net") {

TEST_CASE("a new client receives the current state") {
  Running r(default_config());
  Client c(r.server.port());
  const json s = c.read_json();
  CHECK(s.at("type") == "state");
  CHECK(s.at("seq") == 0);
}

TEST_CASE("a busy port is a startup error") {
  Running r(default_config());
  Engine other(default_config());
  CHECK_THROWS_AS(Server(other, ServerOptions{"127.0.0.1", r.server.port(), false, false}), IoError);
  CHECK_THROWS_AS(Server(other, ServerOptions{"not-an-address", 0, false, false}), IoError);
}

TEST_CASE("gate decisions travel over the wire") {
  Running r(default_config());
  Client c(r.server.port());
  c.read_json();
  c.send(R"({"type":"set_threshold","value":0.9})");
  c.send(R"({"type":"command","name":"Push","source":"mental","strength":0.4})");
  const json s = c.read_state_until([](const json& m) { return !m.at("last").is_null(); });
  CHECK(c.errors.empty());
  CHECK(s.at("last").at("gate") == "below_threshold");
  for (const auto& j : s.at("joints")) CHECK(j.get<double>() == 90.0);
}

TEST_CASE("a malformed frame gets an error and the connection stays open") {
  Running r(default_config());
  Client c(r.server.port());
  c.read_json();
  c.send("{oops");
  const json err = c.read_json();
  CHECK(err.at("type") == "error");
  CHECK(err.at("seq_ref") == 1);
  CHECK(err.at("message") == "malformed JSON");
  c.send(R"({"type":"launch","seq":40})");
  c.read_state_until([&](const json&) { return !c.errors.empty(); });
  CHECK(c.errors[0].at("seq_ref") == 40);
  CHECK(c.errors[0].at("message") == "unknown message type 'launch'");
  c.send(command("MoveRight", 1.0));
  const json s = c.read_state_until([](const json& m) { return m.at("joints")[0].get<double>() == 180.0; });
  CHECK(s.at("last").at("gate") == "passed");
}

TEST_CASE("two clients see identical state payloads") {
  const Config cfg = default_config();
  const auto traj = pipeline::run_script(cfg.script("pick_and_place"), arm::make_arm(cfg.arm), cfg.binding());
  const std::uint64_t final_tick = traj.back().tick_count;

  Running r(cfg);
  Client a(r.server.port());
  Client b(r.server.port());
  a.read_json();
  b.read_json();
  a.send(R"({"type":"run_script","name":"pick_and_place"})");

  auto collect = [&](Client& c) {
    std::map<std::uint64_t, std::string> by_seq;
    while (true) {
      const std::string raw = c.read();
      const json m = json::parse(raw);
      REQUIRE(m.at("type") == "state");
      by_seq.emplace(m.at("seq").get<std::uint64_t>(), raw);
      if (m.at("tick").get<std::uint64_t>() >= final_tick) break;
    }
    return by_seq;
  };
  const auto sa = collect(a);
  const auto sb = collect(b);
  CHECK(sa.size() == final_tick);
  CHECK(sa == sb);

  // The terminal state matches the offline trajectory.
  const json last = json::parse(sa.rbegin()->second);
  for (std::size_t j = 0; j < arm::kServoCount; ++j) {
    CHECK(last.at("joints")[j].get<double>() == traj.back().joints[j].angle);
  }
  std::uint64_t prev = 0;
  for (const auto& [seq, _] : sa) {
    CHECK(seq == prev + 1);
    prev = seq;
  }
}

TEST_CASE("every label is accepted over the wire and moves its joint") {
  Config cfg = default_config();
  cfg.safety.cooldown_epochs = 0;
  Running r(cfg);
  Client c(r.server.port());
  json state = c.read_json();
  const arm::CommandBinding binding = cfg.binding();
  for (Command label : kAllCommands) {
    const auto joint = static_cast<std::size_t>(binding.at(label).joint);
    const double before = state.at("joints")[joint].get<double>();
    const double sign = binding.at(label).direction == arm::Direction::CW ? 1.0 : -1.0;
    const double want = std::clamp(before + sign * binding.at(label).step_deg, 0.0, 180.0);
    c.send(json{{"type", "command"},
                {"name", name(label)},
                {"source", name(source_of(label))},
                {"strength", 1.0}}
               .dump());
    state = c.read_state_until([&](const json& m) { return m.at("joints")[joint].get<double>() == want; });
    CHECK(state.at("last").at("label") == name(label));
    CHECK(state.at("last").at("gate") == "passed");
  }
  CHECK(c.errors.empty());
}

TEST_CASE("realtime mode ticks every 20 ms") {
  Running r(default_config(), true);
  Client c(r.server.port());
  c.read_json();
  const json first = c.read_json();
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t prev = first.at("seq").get<std::uint64_t>();
  for (int i = 0; i < 50; ++i) {
    const json m = c.read_json();
    CHECK(m.at("seq").get<std::uint64_t>() == prev + 1);
    prev = m.at("seq").get<std::uint64_t>();
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(elapsed > 0.9);
  CHECK(elapsed < 2.0);
}

}  // TEST_SUITE
