#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "bciarm/service/engine.hpp"

namespace bciarm::service {

struct ServerOptions {
  std::string address{"127.0.0.1"};
  std::uint16_t port{8765};  // 0 picks a free port
  // Wall-clock 20 ms ticks. When false, ticks run back to back while the
  // engine is busy, with at least one tick after every client message.
  bool realtime{true};
  bool stop_on_signal{false};  // SIGINT/SIGTERM end run()
};

// WebSocket front end for an Engine. Everything runs on the thread that
// calls run(); stop() may be called from any thread.
class Server {
 public:
  // Binds immediately; throws IoError when the port is taken.
  Server(Engine& engine, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const;
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bciarm::service
