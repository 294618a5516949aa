#include "snake/server.hpp"

#include <json.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

namespace snake {

using nlohmann::json;

namespace {

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vec vec_from_json(const json& a) {
  if (!a.is_array()) throw PreconditionError("payload", "point must be an array of numbers");
  Vec v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw PreconditionError("payload", "point must be an array of numbers");
    v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  }
  return v;
}

json state_payload(const SessionState& s) {
  json p;
  p["dim"] = s.dim;
  json poly = json::array();
  for (const Vec& v : s.polyline) poly.push_back(to_json(v));
  p["polyline"] = std::move(poly);
  p["snout"] = to_json(s.snout);
  p["target"] = to_json(s.target);
  p["time"] = s.time;
  p["defect"] = s.defect;
  if (s.chart) {
    p["chart"] = {{"v", to_json(s.chart->v)}, {"theta", s.chart->theta}};
  } else {
    p["chart"] = nullptr;
  }
  p["steps"] = s.steps;
  p["loops"] = s.loops;
  p["clamped"] = s.clamped;
  p["degraded"] = s.degraded;
  p["bivalued"] = s.bivalued;
  p["ball_radius"] = s.ball_radius;
  p["status"] = s.status;
  return p;
}

std::string message(const std::string& type, std::uint64_t seq, json payload) {
  return json{{"type", type}, {"seq", seq}, {"payload", std::move(payload)}}.dump();
}

}  // namespace

std::string state_message(const SessionState& s) { return message("state", s.seq, state_payload(s)); }

std::uint64_t ProtocolHandler::next_seq() { return ++idle_seq_; }

std::string ProtocolHandler::error(const std::string& code, const std::string& text) {
  return message("error", next_seq(), json{{"code", code}, {"message", text}});
}

std::vector<std::string> ProtocolHandler::handle(const std::string& line) {
  json msg;
  try {
    msg = json::parse(line);
  } catch (const json::parse_error& e) {
    return {error("parse", e.what())};
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
    return {error("schema", "message needs a string 'type'")};
  }
  const std::string type = msg["type"];
  if (msg.contains("seq")) {
    if (!msg["seq"].is_number_integer()) return {error("schema", "'seq' must be an integer")};
    const long long seq = msg["seq"].get<long long>();
    if (seq <= last_client_seq_) return {error("out_of_order", "client seq must increase")};
    last_client_seq_ = seq;
  }
  const json payload = msg.value("payload", json::object());

  const auto state_reply = [&](SessionState s) {
    s.seq = next_seq();
    return state_message(s);
  };

  try {
    if (type == "init") {
      Scene scene;
      if (payload.contains("scene")) {
        scene = parse_scene(payload["scene"].get<std::string>());
      } else {
        scene = preset_scene(payload.value("preset", std::string("figure_a")));
      }
      session_ = std::make_unique<Session>(std::move(scene));
      return {state_reply(session_->state())};
    }
    if (!session_) return {error("no_session", "send init first")};
    if (type == "target") {
      if (!payload.contains("point")) return {error("payload", "target needs 'point'")};
      const Vec p = vec_from_json(payload["point"]);
      const double ts = payload.value("timestamp", 0.0);
      return {state_reply(session_->on_target(p, ts))};
    }
    if (type == "reset") return {state_reply(session_->reset())};
    if (type == "export") {
      json targets = json::array();
      for (const TargetRecord& r : session_->target_log()) {
        targets.push_back(json{{"point", to_json(r.point)}, {"timestamp", r.timestamp}});
      }
      return {message("export", next_seq(),
                      json{{"csv", session_->export_csv()}, {"targets", std::move(targets)}})};
    }
    return {error("unknown_type", "unknown message type '" + type + "'")};
  } catch (const PreconditionError& e) {
    return {error(e.code(), e.what())};
  } catch (const NumericalError& e) {
    return {error(e.code(), e.what())};
  } catch (const json::exception& e) {
    return {error("payload", e.what())};
  }
}

Server::Server(int port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw NumericalError("socket", std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
      ::listen(listen_fd_, 16) < 0) {
    const std::string what = std::strerror(errno);
    ::close(listen_fd_);
    throw NumericalError("socket", what);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Server::~Server() {
  stop();
  for (std::thread& t : threads_) {
    if (t.joinable()) t.join();
  }
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void Server::run() {
  while (!stopping_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    std::lock_guard<std::mutex> lock(mu_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    clients_.push_back(fd);
    threads_.emplace_back([this, fd] { serve(fd); });
  }
}

void Server::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  std::lock_guard<std::mutex> lock(mu_);
  for (int fd : clients_) ::shutdown(fd, SHUT_RDWR);
}

void Server::serve(int fd) {
  ProtocolHandler handler;
  std::string buffer;
  char chunk[4096];
  const auto send_all = [fd](const std::string& s) {
    std::size_t off = 0;
    while (off < s.size()) {
      const ssize_t n = ::send(fd, s.data() + off, s.size() - off, MSG_NOSIGNAL);
      if (n <= 0) return false;
      off += static_cast<std::size_t>(n);
    }
    return true;
  };
  bool open = true;
  while (open) {
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t eol;
    while ((eol = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, eol);
      buffer.erase(0, eol + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      for (const std::string& out : handler.handle(line)) {
        if (!send_all(out + "\n")) {
          open = false;
          break;
        }
      }
    }
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    clients_.erase(std::remove(clients_.begin(), clients_.end(), fd), clients_.end());
  }
  ::close(fd);
}

}  // namespace snake
