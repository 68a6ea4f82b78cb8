#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bciarm/arm/arm.hpp"
#include "bciarm/eeg/labels.hpp"
#include "bciarm/eeg/signal.hpp"
#include "bciarm/eeg/synthetic.hpp"
#include "bciarm/error.hpp"
#include "bciarm/features/classifier.hpp"
#include "bciarm/kinematics/kinematics.hpp"
#include "bciarm/pipeline/pipeline.hpp"
#include "bciarm/service/config.hpp"
#include "bciarm/service/engine.hpp"
#include "bciarm/service/server.hpp"
#include "bciarm/text.hpp"

namespace {

using namespace bciarm;

enum Exit { kOk = 0, kUsage = 1, kDomain = 2, kIo = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numbers from the positional arguments, or from stdin when there are none.
std::vector<double> read_numbers(const std::vector<std::string>& args) {
  std::vector<std::string> tokens = args;
  if (tokens.empty()) {
    tokens.assign(std::istream_iterator<std::string>(std::cin), std::istream_iterator<std::string>());
  }
  std::vector<double> out;
  for (const std::string& t : tokens) {
    const auto v = text::parse_double(t);
    if (!v || !std::isfinite(*v)) throw UsageError("not a number: '" + t + "'");
    out.push_back(*v);
  }
  return out;
}

kin::JointAngles to_angles(const std::vector<double>& v, const char* what) {
  if (v.size() != 5 && v.size() != 6) throw UsageError(std::string(what) + " needs 5 or 6 joint angles");
  kin::JointAngles q;
  for (std::size_t i = 0; i < v.size(); ++i) q[i] = v[i];
  return q;
}

eeg::Condition parse_condition(const std::string& s) {
  if (s == "quiet") return eeg::Condition::Quiet;
  if (s == "noisy") return eeg::Condition::Noisy;
  throw UsageError("condition must be quiet or noisy");
}

std::optional<Command> parse_label_or_rest(const std::string& s) {
  if (s == "rest") return std::nullopt;
  const auto c = parse_command(s);
  if (!c) throw UsageError("unknown label '" + s + "'");
  return c;
}

// "Push:20, rest:10" -> blocks.
std::vector<eeg::SessionBlock> parse_schedule(const std::string& s) {
  std::vector<eeg::SessionBlock> blocks;
  for (std::string_view item : text::split(s, ',')) {
    item = text::trim(item);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw UsageError("schedule items look like 'Label:seconds'");
    const auto secs = text::parse_double(item.substr(colon + 1));
    if (!secs) throw UsageError("bad duration in '" + std::string(item) + "'");
    blocks.push_back({parse_label_or_rest(std::string(text::trim(item.substr(0, colon)))), *secs});
  }
  if (blocks.empty()) throw UsageError("empty schedule");
  return blocks;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << body)) throw IoError("cannot write " + path);
}

service::Config load_settings(const std::string& path) {
  if (path.empty()) return service::default_config();
  service::LoadedConfig loaded = service::load_config(path);
  for (const std::string& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
  return loaded.config;
}

kin::DhTable table_of(const service::Config& cfg) { return arm::make_arm(cfg.arm).table; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bci-arm: EEG-driven robotic arm control"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "INI configuration file");

  // fk
  auto* fk_cmd = app.add_subcommand("fk", "Forward kinematics: joint angles (deg) -> pose");
  std::vector<std::string> fk_args;
  fk_cmd->add_option("angles", fk_args, "theta1..theta5 [theta6]; read from stdin when omitted");

  // ik
  auto* ik_cmd = app.add_subcommand("ik", "Inverse kinematics: pose -> joint angles (deg)");
  std::vector<std::string> ik_args;
  std::string branch = "nearest";
  std::string current_text;
  ik_cmd->add_option("pose", ik_args, "x y z r00 r01 r02 r10 r11 r12 r20 r21 r22; stdin when omitted");
  ik_cmd->add_option("--branch", branch, "up, down or nearest")
      ->check(CLI::IsMember({"up", "down", "nearest"}));
  ik_cmd->add_option("--current", current_text, "current angles for --branch nearest (default all 0)");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic EEG session");
  std::string synth_command, synth_schedule, synth_condition = "quiet", synth_out, synth_labels;
  double synth_duration = 60.0;
  std::uint64_t synth_seed = 1;
  auto* opt_command = synth_cmd->add_option("--command", synth_command, "label or 'rest'");
  auto* opt_schedule = synth_cmd->add_option("--schedule", synth_schedule, "'Label:seconds, ...' blocks");
  opt_command->excludes(opt_schedule);
  synth_cmd->add_option("--condition", synth_condition, "quiet or noisy");
  synth_cmd->add_option("--duration", synth_duration, "seconds, with --command");
  synth_cmd->add_option("--seed", synth_seed, "generator seed");
  synth_cmd->add_option("--out", synth_out, "session file")->required();
  synth_cmd->add_option("--labels", synth_labels, "label track file");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a command model from a labelled session");
  std::string train_session, train_labels, train_out;
  train_cmd->add_option("--session", train_session, "session file")->required();
  train_cmd->add_option("--labels", train_labels, "label track")->required();
  train_cmd->add_option("--out", train_out, "model file")->required();

  // decode
  auto* decode_cmd = app.add_subcommand("decode", "Replay a session through the control pipeline");
  std::string decode_session, decode_model, decode_events, decode_labels;
  std::optional<double> decode_threshold;
  std::optional<std::uint32_t> decode_cooldown;
  decode_cmd->add_option("--session", decode_session, "session file")->required();
  decode_cmd->add_option("--model", decode_model, "model file")->required();
  decode_cmd->add_option("--events", decode_events, "event log to write");
  decode_cmd->add_option("--labels", decode_labels, "label track for scoring");
  decode_cmd->add_option("--threshold", decode_threshold, "confidence threshold override");
  decode_cmd->add_option("--cooldown", decode_cooldown, "cooldown epochs override");

  // script
  auto* script_cmd = app.add_subcommand("script", "Run a configured script offline");
  std::string script_name = "pick_and_place", script_trajectory;
  script_cmd->add_option("--name", script_name, "script name");
  script_cmd->add_option("--trajectory", script_trajectory, "write per-tick servo angles here");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the WebSocket control service");
  std::optional<std::uint16_t> serve_port;
  std::string serve_model, serve_address = "127.0.0.1";
  bool serve_no_realtime = false;
  serve_cmd->add_option("--port", serve_port, "TCP port (0 picks one)");
  serve_cmd->add_option("--address", serve_address, "listen address");
  serve_cmd->add_option("--model", serve_model, "model file for synthetic/replay modes");
  serve_cmd->add_flag("--no-realtime", serve_no_realtime, "simulation-time ticks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    const service::Config cfg = load_settings(config_path);

    if (*fk_cmd) {
      const kin::JointAngles q = to_angles(read_numbers(fk_args), "fk");
      std::cout << kin::format_pose(kin::fk(table_of(cfg), q)) << "\n";
      return kOk;
    }

    if (*ik_cmd) {
      const std::vector<double> v = read_numbers(ik_args);
      if (v.size() != 12) throw UsageError("ik needs 12 numbers: x y z and a row-major rotation");
      kin::Pose target;
      target.position = Eigen::Vector3d(v[0], v[1], v[2]);
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) target.rotation(r, c) = v[static_cast<std::size_t>(3 + 3 * r + c)];
      }
      kin::JointAngles current;
      if (!current_text.empty()) {
        std::vector<std::string> parts;
        for (std::string_view p : text::split(current_text, ' ')) {
          if (!text::trim(p).empty()) parts.emplace_back(text::trim(p));
        }
        current = to_angles(read_numbers(parts), "--current");
      }
      const kin::IkSolution sol = kin::ik(table_of(cfg), target, current);
      if (!sol.reachable) {
        std::cout << "unreachable\n";
        return kDomain;
      }
      const kin::JointAngles q = branch == "up"     ? sol.elbow_up
                                 : branch == "down" ? sol.elbow_down
                                                    : kin::select_branch(sol, current);
      std::cout << kin::format_angles(q) << "\n";
      return kOk;
    }

    if (*synth_cmd) {
      const eeg::Condition condition = parse_condition(synth_condition);
      std::vector<eeg::SessionBlock> blocks;
      if (!synth_schedule.empty()) {
        blocks = parse_schedule(synth_schedule);
      } else {
        if (synth_command.empty()) throw UsageError("synth needs --command or --schedule");
        blocks.push_back({parse_label_or_rest(synth_command), synth_duration});
      }
      const eeg::SyntheticSession session = eeg::gen_session(blocks, condition, synth_seed);
      eeg::save_session(synth_out, session.samples);
      if (!synth_labels.empty()) eeg::save_labels(synth_labels, session.labels);
      std::cout << session.samples.size() << " samples, " << session.labels.size() << " labelled blocks\n";
      return kOk;
    }

    if (*train_cmd) {
      const auto samples = eeg::load_session(train_session);
      const auto labels = eeg::load_labels(train_labels);
      const features::CommandModel model = pipeline::train_session(samples, labels, cfg.decode);
      features::save_model(train_out, model);
      for (const auto& r : model.references) std::cout << name(r.label) << ": " << r.epochs << " epochs\n";
      return kOk;
    }

    if (*decode_cmd) {
      const features::CommandModel model = features::load_model(decode_model);
      const auto samples = eeg::load_session(decode_session);
      pipeline::SafetyConfig safety = cfg.safety;
      if (decode_threshold) {
        if (!(*decode_threshold >= 0.0 && *decode_threshold <= 1.0)) throw UsageError("--threshold in [0, 1]");
        safety.confidence_threshold = *decode_threshold;
      }
      if (decode_cooldown) safety.cooldown_epochs = *decode_cooldown;
      auto source = pipeline::ReplaySource::from_samples(samples);
      const pipeline::PipelineResult result =
          pipeline::run_pipeline(source, model, safety, arm::make_arm(cfg.arm), cfg.binding(), cfg.decode);
      if (!decode_events.empty()) pipeline::record_events(result.events, decode_events);

      std::map<pipeline::GateDecision, std::size_t> gates;
      for (const auto& ev : result.events) ++gates[ev.gate];
      std::cout << "epochs " << result.events.size();
      for (auto g : {pipeline::GateDecision::Passed, pipeline::GateDecision::BelowThreshold,
                     pipeline::GateDecision::Cooldown, pipeline::GateDecision::RejectedEpoch}) {
        std::cout << " " << pipeline::gate_name(g) << " " << gates[g];
      }
      std::cout << "\n";

      if (!decode_labels.empty()) {
        const auto labels = eeg::load_labels(decode_labels);
        const double epoch_len = static_cast<double>(eeg::kEpochSamples) / eeg::kSampleRate;
        std::size_t labelled = 0, correct = 0, passed = 0;
        for (const auto& ev : result.events) {
          const auto hit = std::find_if(labels.begin(), labels.end(), [&](const eeg::LabelInterval& l) {
            return ev.start_t >= l.start_t - 1e-6 && ev.start_t + epoch_len <= l.end_t + 1e-6;
          });
          if (hit == labels.end()) continue;
          ++labelled;
          if (ev.predicted == hit->label) ++correct;
          if (ev.gate == pipeline::GateDecision::Passed) ++passed;
        }
        auto pct = [](std::size_t a, std::size_t b) { return b ? 100.0 * static_cast<double>(a) / b : 0.0; };
        std::cout << "labelled " << labelled << " accuracy " << text::format_double(pct(correct, labelled))
                  << "% pass_rate " << text::format_double(pct(passed, labelled)) << "%\n";
      }
      return kOk;
    }

    if (*script_cmd) {
      const pipeline::Script& script = cfg.script(script_name);
      const auto trajectory = pipeline::run_script(script, arm::make_arm(cfg.arm), cfg.binding());
      if (!script_trajectory.empty()) {
        std::string body = "# tick base shoulder elbow wrist_rot wrist_trans gripper\n";
        for (const auto& s : trajectory) {
          body += std::to_string(s.tick_count);
          for (const auto& j : s.joints) body += " " + text::format_double(j.angle);
          body += "\n";
        }
        write_file(script_trajectory, body);
      }
      const arm::ArmState& fin = trajectory.back();
      std::cout << "ticks " << fin.tick_count << "\njoints";
      for (const auto& j : fin.joints) std::cout << " " << text::format_double(j.angle);
      const Eigen::Vector3d p = fin.pose.position;
      std::cout << "\npose " << text::format_double(p.x()) << " " << text::format_double(p.y()) << " "
                << text::format_double(p.z()) << "\n";
      if (script.target) std::cout << "target_error_mm " << text::format_double((p - *script.target).norm()) << "\n";
      return kOk;
    }

    if (*serve_cmd) {
      std::shared_ptr<const features::CommandModel> model;
      const std::string model_path = serve_model.empty() ? cfg.service.model_path : serve_model;
      if (!model_path.empty()) model = std::make_shared<const features::CommandModel>(features::load_model(model_path));
      service::Engine engine(cfg, model);
      service::ServerOptions options;
      options.address = serve_address;
      options.port = serve_port.value_or(cfg.service.port);
      options.realtime = !serve_no_realtime;
      options.stop_on_signal = true;
      service::Server server(engine, options);
      std::cout << "listening on " << serve_address << ":" << server.port() << std::endl;
      server.run();
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}
