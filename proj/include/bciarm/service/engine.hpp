#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "bciarm/features/classifier.hpp"
#include "bciarm/pipeline/pipeline.hpp"
#include "bciarm/service/config.hpp"

namespace bciarm::service {

enum class Mode { Manual, Synthetic, Replay };

std::string_view mode_name(Mode m);

// The authoritative service state, free of any networking. The server calls
// handle() for each client frame in arrival order and advance() once per
// tick, then broadcasts what advance() returns.
class Engine {
 public:
  explicit Engine(Config cfg, std::shared_ptr<const features::CommandModel> model = nullptr);

  // Applies one client frame. Returns the error reply to send back to that
  // client when the frame is rejected; accepted frames show up in later
  // state messages. `fallback_ref` is used as seq_ref when the frame carries
  // no integer "seq" of its own.
  std::optional<std::string> handle(std::string_view frame, std::uint64_t fallback_ref);

  // One tick: next script activation, epoch decode on epoch boundaries, servo
  // motion. Returns the state message for the new seq.
  std::string advance();

  // State message for the current seq without advancing; sent to a client
  // when it connects.
  std::string snapshot() const;

  // Motion pending, a script running, or an epoch stream active.
  bool busy() const;

  Mode mode() const { return mode_; }
  std::uint64_t seq() const { return seq_; }
  const arm::ArmState& arm() const { return loop_.arm(); }
  const pipeline::ControlLoop& loop() const { return loop_; }
  const Config& config() const { return cfg_; }

 private:
  struct Message;  // parsed client frame

  void on_command(const Message& m);
  void on_set_threshold(const Message& m);
  void on_set_limits(const Message& m);
  void on_run_script(const Message& m);
  void on_set_mode(const Message& m);

  // Most recent gate decision, manual or decoded; `label` is empty for a
  // rejected epoch.
  struct Decision {
    std::optional<Command> label;
    double confidence{0.0};
    pipeline::GateDecision gate{pipeline::GateDecision::Passed};
  };

  Config cfg_;
  std::shared_ptr<const features::CommandModel> model_;
  pipeline::ControlLoop loop_;
  std::optional<Decision> last_;
  Mode mode_{Mode::Manual};
  std::unique_ptr<pipeline::EpochSource> source_;
  std::uint64_t ticks_since_epoch_{0};
  std::optional<pipeline::ScriptRunner> runner_;
  std::uint64_t seq_{0};
};

// Error reply: {"type":"error","seq_ref":n,"message":"..."}.
std::string error_reply(std::uint64_t seq_ref, std::string_view message);

}  // namespace bciarm::service
