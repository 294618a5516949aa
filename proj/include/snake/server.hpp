#pragma once

// Line-delimited JSON protocol for steering sessions. Every message is one
// line {"type": ..., "seq": ..., "payload": {...}}.
//
//   client -> server: init {scene: <yaml> | preset: <name>}
//                     target {point: [..], timestamp: t}
//                     reset {}
//                     export {}
//   server -> client: state {...}, export {csv, targets}, error {code, message}
//
// Client seq numbers must increase; server seq numbers increase per
// connection.

#include "snake/steering.hpp"

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace snake {

class ProtocolHandler {
 public:
  /// One request line in, zero or more response lines out (without '\n').
  std::vector<std::string> handle(const std::string& line);
  bool has_session() const { return session_ != nullptr; }

 private:
  std::string error(const std::string& code, const std::string& message);
  std::uint64_t next_seq();

  std::unique_ptr<Session> session_;
  std::uint64_t idle_seq_ = 0;
  long long last_client_seq_ = -1;
};

/// Serialized state payload.
std::string state_message(const SessionState& s);

/// Local TCP server (127.0.0.1), one ProtocolHandler per connection.
class Server {
 public:
  /// port 0 picks a free port.
  explicit Server(int port = 0);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  int port() const { return port_; }
  /// Accept loop; returns after stop().
  void run();
  void stop();

 private:
  void serve(int fd);

  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::vector<int> clients_;
  std::vector<std::thread> threads_;
};

}  // namespace snake
