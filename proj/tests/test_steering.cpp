#include "snake/output.hpp"
#include "snake/server.hpp"
#include "snake/steering.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <sstream>

using namespace snake;
using nlohmann::json;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::vector<std::vector<double>> parse_csv(const std::string& csv) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

double max_csv_difference(const std::string& a, const std::string& b) {
  const auto ra = parse_csv(a), rb = parse_csv(b);
  if (ra.size() != rb.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    if (ra[i].size() != rb[i].size()) return INFINITY;
    for (std::size_t j = 0; j < ra[i].size(); ++j) worst = std::max(worst, std::abs(ra[i][j] - rb[i][j]));
  }
  return worst;
}

Scene drag_scene(const std::string& preset, const std::vector<std::vector<double>>& points) {
  Scene s = preset_scene(preset);
  s.curve = CurveSpec{};
  s.curve.kind = "drag";
  s.curve.points = points;
  s.curve.max_speed = 0.3;
  return s;
}

/// The `lift` command's CSV for a scene.
std::string batch_csv(const Scene& s) {
  const Configuration z = build_configuration(s);
  const Curve c = build_curve(s, z);
  if (z.dim() == 2) {
    const SU11LiftResult r = lift_su11(z, c, s.solver.options());
    return trajectory_csv(r.lift, c, &r.charts);
  }
  return trajectory_csv(horizontal_lift(z, c, s.solver.options()), c);
}

}  // namespace

TEST(Session, MatchesBatchLift) {
  for (const char* preset : {"figure_a", "polygon3"}) {
    const bool planar = std::string(preset) == "figure_a";
    const std::vector<std::vector<double>> pts =
        planar ? std::vector<std::vector<double>>{{2.1, 0.2}, {2.3, 0.1}, {2.0, 0.0}}
               : std::vector<std::vector<double>>{{0.2, 0.1, 0.0}, {0.1, -0.2, 0.1}, {0.0, 0.0, 0.0}};
    const Scene s = drag_scene(preset, pts);
    Session session(s);
    for (const auto& p : pts) {
      const SessionState st = session.on_target(Eigen::Map<const Vec>(p.data(), p.size()), 0.0);
      EXPECT_FALSE(st.degraded) << st.status;
      EXPECT_FALSE(st.clamped);
    }
    EXPECT_LT(max_csv_difference(session.export_csv(), batch_csv(s)), 1e-8) << preset;
    EXPECT_EQ(session.state().loops, 1);
  }
}

TEST(Session, ClampAndDuplicates) {
  Session session(preset_scene("figure_a"));
  EXPECT_NEAR(session.ball_radius(), std::numbers::pi, 1e-12);
  const SessionState a = session.on_target(v2(10.0, 0.0), 1.0);
  EXPECT_TRUE(a.clamped);
  EXPECT_NEAR(a.target.norm(), 0.99 * std::numbers::pi, 1e-12);
  const std::size_t steps = a.steps;
  const SessionState b = session.on_target(v2(10.0, 0.0), 2.0);
  EXPECT_EQ(b.steps, steps);
  EXPECT_EQ(session.knots().size(), 2u);
  EXPECT_EQ(session.target_log().size(), 2u);
  EXPECT_GT(b.seq, a.seq);
  EXPECT_THROW(session.on_target(Vec::Zero(3), 0.0), PreconditionError);
  const SessionState r = session.reset();
  EXPECT_EQ(r.steps, 0u);
  EXPECT_EQ(session.knots().size(), 1u);
  EXPECT_EQ(session.export_csv(), trajectory_csv_header(2));

  bool clamped = true;
  EXPECT_EQ(Session::clamp_target(v2(0.1, 0.0), 1.0, &clamped), v2(0.1, 0.0));
  EXPECT_FALSE(clamped);
}

TEST(Session, BivaluedMode) {
  Session session(preset_scene("bivalued"));
  EXPECT_TRUE(session.bivalued());
  const double r = 2.0 * std::numbers::sqrt2;
  const SessionState a = session.on_target(v2(0.0, 2.0), 0.0);
  EXPECT_TRUE(a.bivalued);
  EXPECT_FALSE(a.chart.has_value());
  EXPECT_LT(a.defect, 1e-12);
  const SessionState b = session.on_target(v2(5.0, 0.0), 0.0);
  EXPECT_NEAR(b.target.norm(), 0.99 * r, 1e-12);
  const std::string csv = session.export_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,gamma_1,gamma_2,p_1,p_2,q_1,q_2,fiber_error");
}

TEST(Session, RejectsSingularSnakes) {
  Scene s = preset_scene("polygon3");
  s.snake.values.resize(2);
  s.snake.lengths.resize(2);
  s.snake.recenter.clear();
  EXPECT_THROW(Session{s}, PreconditionError);
}

TEST(Protocol, Messages) {
  ProtocolHandler h;
  auto one = [&](const json& msg) {
    const auto out = h.handle(msg.dump());
    EXPECT_EQ(out.size(), 1u);
    return json::parse(out.at(0));
  };
  json r = one({{"type", "target"}, {"seq", 1}, {"payload", {{"point", {2.0, 0.1}}}}});
  EXPECT_EQ(r["type"], "error");
  EXPECT_EQ(r["payload"]["code"], "no_session");

  r = one({{"type", "init"}, {"seq", 2}, {"payload", {{"preset", "figure_a"}}}});
  EXPECT_EQ(r["type"], "state");
  EXPECT_EQ(r["payload"]["dim"], 2);
  EXPECT_EQ(r["payload"]["snout"].size(), 2u);
  const auto s0 = r["seq"].get<std::uint64_t>();

  r = one({{"type", "target"}, {"seq", 3}, {"payload", {{"point", {2.1, 0.1}}, {"timestamp", 0.5}}}});
  EXPECT_EQ(r["type"], "state");
  EXPECT_GT(r["seq"].get<std::uint64_t>(), s0);
  EXPECT_NEAR(r["payload"]["snout"][0].get<double>(), 2.1, 1e-9);
  EXPECT_FALSE(r["payload"]["chart"].is_null());

  r = one({{"type", "target"}, {"seq", 3}, {"payload", {{"point", {2.0, 0.0}}}}});
  EXPECT_EQ(r["payload"]["code"], "out_of_order");
  r = one({{"type", "target"}, {"seq", 4}, {"payload", {{"point", "x"}}}});
  EXPECT_EQ(r["payload"]["code"], "payload");
  r = one({{"type", "target"}, {"seq", 5}, {"payload", {{"point", {1.0, 2.0, 3.0}}}}});
  EXPECT_EQ(r["payload"]["code"], "dimension");
  r = one({{"type", "bogus"}, {"seq", 6}});
  EXPECT_EQ(r["payload"]["code"], "unknown_type");
  EXPECT_EQ(json::parse(h.handle("{nope").at(0))["payload"]["code"], "parse");

  r = one({{"type", "export"}, {"seq", 7}});
  EXPECT_EQ(r["type"], "export");
  EXPECT_EQ(r["payload"]["targets"].size(), 1u);  // rejected targets are not logged
  EXPECT_EQ(r["payload"]["csv"].get<std::string>().rfind("t,gamma_1", 0), 0u);

  r = one({{"type", "reset"}, {"seq", 8}});
  EXPECT_EQ(r["payload"]["steps"], 0);

  r = one({{"type", "init"}, {"seq", 9}, {"payload", {{"scene", serialize_scene(preset_scene("polygon3"))}}}});
  EXPECT_EQ(r["payload"]["dim"], 3);
  r = one({{"type", "init"}, {"seq", 10}, {"payload", {{"scene", "dimension: 0"}}}});
  EXPECT_EQ(r["payload"]["code"], "scene");
}

TEST(Protocol, SocketRoundTrip) {
  Server server(0);
  std::thread t([&] { server.run(); });
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(server.port()));
  ASSERT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)), 0);
  const std::string req =
      json{{"type", "init"}, {"seq", 1}, {"payload", {{"preset", "figure_a"}}}}.dump() + "\n" +
      json{{"type", "target"}, {"seq", 2}, {"payload", {{"point", {2.1, 0.1}}}}}.dump() + "\n";
  ASSERT_EQ(::send(fd, req.data(), req.size(), 0), static_cast<ssize_t>(req.size()));
  std::string got;
  char buf[4096];
  while (std::count(got.begin(), got.end(), '\n') < 2) {
    const ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
    ASSERT_GT(n, 0);
    got.append(buf, static_cast<std::size_t>(n));
  }
  ::close(fd);
  server.stop();
  t.join();
  std::istringstream in(got);
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  EXPECT_EQ(json::parse(l1)["type"], "state");
  const json s2 = json::parse(l2);
  EXPECT_EQ(s2["type"], "state");
  EXPECT_NEAR(s2["payload"]["snout"][1].get<double>(), 0.1, 1e-9);
}
