#include "bciarm/service/server.hpp"

#include <chrono>
#include <deque>
#include <csignal>
#include <set>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "bciarm/error.hpp"

namespace bciarm::service {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

constexpr auto kTick = std::chrono::milliseconds(20);
constexpr std::size_t kMaxFrame = 64 * 1024;
constexpr std::size_t kMaxQueued = 4096;  // a client this far behind is dropped
constexpr int kMaxLagTicks = 5;           // beyond this the schedule restarts from now

}  // namespace

struct Server::Impl {
  class Session;

  Impl(Engine& e, ServerOptions o) : engine(e), options(std::move(o)), acceptor(ioc), timer(ioc), signals(ioc) {}

  void accept();
  void join(const std::shared_ptr<Session>& s);
  void leave(const std::shared_ptr<Session>& s);
  void on_message(const std::shared_ptr<Session>& s, std::string_view frame, std::uint64_t index);
  void broadcast(const std::string& state);
  void schedule_tick();
  void pump();

  Engine& engine;
  ServerOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor;
  net::steady_timer timer;
  net::signal_set signals;
  std::chrono::steady_clock::time_point next_tick;
  std::set<std::shared_ptr<Session>> sessions;
  bool pumping{false};
};

class Server::Impl::Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, Server::Impl& server) : ws_(std::move(socket)), server_(server) {}

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(kMaxFrame);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->server_.join(self);
      self->read();
    });
  }

  void send(std::shared_ptr<const std::string> payload) {
    if (closed_) return;
    if (queue_.size() >= kMaxQueued) {
      close();
      return;
    }
    queue_.push_back(std::move(payload));
    if (queue_.size() == 1) write();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().close(ignored);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->server_.leave(self);
        return;
      }
      const std::string frame = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->server_.on_message(self, frame, ++self->received_);
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->server_.leave(self);
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  Server::Impl& server_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  std::uint64_t received_{0};
  bool closed_{false};
};

void Server::Impl::accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<Session>(std::move(socket), *this)->start();
    accept();
  });
}

void Server::Impl::join(const std::shared_ptr<Session>& s) {
  sessions.insert(s);
  s->send(std::make_shared<const std::string>(engine.snapshot()));
}

void Server::Impl::leave(const std::shared_ptr<Session>& s) {
  s->close();
  sessions.erase(s);
}

void Server::Impl::on_message(const std::shared_ptr<Session>& s, std::string_view frame, std::uint64_t index) {
  if (auto reply = engine.handle(frame, index)) s->send(std::make_shared<const std::string>(std::move(*reply)));
  if (options.realtime) return;
  if (!pumping) {
    broadcast(engine.advance());
    pump();
  }
}

void Server::Impl::broadcast(const std::string& state) {
  const auto payload = std::make_shared<const std::string>(state);
  // send() may drop a lagging session, so iterate over a copy.
  const auto targets = sessions;
  for (const auto& s : targets) s->send(payload);
}

void Server::Impl::pump() {
  if (!engine.busy()) {
    pumping = false;
    return;
  }
  pumping = true;
  // Posting each tick lets queued client frames interleave with the run.
  net::post(ioc, [this] {
    broadcast(engine.advance());
    pump();
  });
}

void Server::Impl::schedule_tick() {
  next_tick += kTick;
  const auto now = std::chrono::steady_clock::now();
  if (now - next_tick > kMaxLagTicks * kTick) next_tick = now;
  timer.expires_at(next_tick);
  timer.async_wait([this](beast::error_code ec) {
    if (ec) return;
    broadcast(engine.advance());
    schedule_tick();
  });
}

Server::Server(Engine& engine, ServerOptions options) : impl_(std::make_unique<Impl>(engine, std::move(options))) {
  Impl& s = *impl_;
  try {
    const tcp::endpoint endpoint(net::ip::make_address(s.options.address), s.options.port);
    s.acceptor.open(endpoint.protocol());
    s.acceptor.set_option(net::socket_base::reuse_address(true));
    s.acceptor.bind(endpoint);
    s.acceptor.listen();
  } catch (const boost::system::system_error& e) {
    throw IoError("cannot listen on " + s.options.address + ":" + std::to_string(s.options.port) + ": " +
                  e.code().message());
  }
}

Server::~Server() = default;

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  Impl& s = *impl_;
  s.accept();
  if (s.options.stop_on_signal) {
    s.signals.add(SIGINT);
    s.signals.add(SIGTERM);
    s.signals.async_wait([this](beast::error_code ec, int) {
      if (!ec) stop();
    });
  }
  if (s.options.realtime) {
    s.next_tick = std::chrono::steady_clock::now();
    s.schedule_tick();
  }
  s.ioc.run();
  for (const auto& session : s.sessions) session->close();
  s.sessions.clear();
}

void Server::stop() {
  Impl& s = *impl_;
  net::post(s.ioc, [&s] {
    beast::error_code ignored;
    s.acceptor.close(ignored);
    s.timer.cancel();
    beast::error_code ignored2;
    s.signals.cancel(ignored2);
    s.ioc.stop();
  });
}

}  // namespace bciarm::service
