#include "gibbsnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace gibbsnet {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

ModulationTable::ModulationTable(std::vector<ModulationScheme> schemes) : schemes_(std::move(schemes)) {
  if (schemes_.empty()) throw Error("modulation table is empty");
  for (std::size_t i = 0; i < schemes_.size(); ++i) {
    const auto& s = schemes_[i];
    if (!(s.rate > 0.0) || !(s.min_sinr > 0.0))
      throw Error("modulation '" + s.name + "' needs positive rate and SINR threshold");
    if (i > 0) {
      const auto& prev = schemes_[i - 1];
      if (!(s.rate > prev.rate) || !(s.min_sinr > prev.min_sinr))
        throw Error("modulation table must be strictly increasing in rate and SINR ('" + prev.name + "' -> '" +
                    s.name + "')");
    }
  }
}

std::optional<std::size_t> ModulationTable::best_for(double gamma) const {
  // thresholds are sorted, so the answer is the last one not above gamma
  auto it = std::upper_bound(schemes_.begin(), schemes_.end(), gamma,
                             [](double g, const ModulationScheme& s) { return g < s.min_sinr; });
  if (it == schemes_.begin()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(schemes_.begin(), it) - 1);
}

ModulationTable ModulationTable::bpsk_qpsk() {
  return ModulationTable({{"BPSK", 1.0, 4.0}, {"QPSK", 2.0, 8.0}});
}

ModulationTable ModulationTable::ieee80211g(double slot_seconds, double packet_bits) {
  struct Row {
    double mbps;
    double db;
  };
  static constexpr Row rows[] = {{6, 6}, {9, 8}, {12, 9}, {18, 11}, {24, 17}, {36, 19}, {48, 24}, {54, 25}};
  std::vector<ModulationScheme> out;
  for (const auto& r : rows) {
    std::ostringstream name;
    name << r.mbps << "Mbps";
    out.push_back({name.str(), r.mbps * 1e6 * slot_seconds / packet_bits, db_to_linear(r.db)});
  }
  return ModulationTable(std::move(out));
}

double distance(Vec2 a, Vec2 b, Geometry geometry, double side) {
  double dx = std::abs(a.x - b.x);
  double dy = std::abs(a.y - b.y);
  if (geometry == Geometry::Torus) {
    dx = std::min(dx, side - dx);
    dy = std::min(dy, side - dy);
  }
  return std::hypot(dx, dy);
}

GainMatrix build_gain_matrix(std::span<const Vec2> positions, double path_loss_exponent, Geometry geometry,
                             double side) {
  if (geometry == Geometry::Torus && !(side > 0.0)) throw Error("torus side must be positive");
  const std::size_t n = positions.size();
  GainMatrix g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(positions[i], positions[j], geometry, side);
      if (!(d > 0.0)) throw Error("colocated nodes " + std::to_string(i) + " and " + std::to_string(j));
      const double gij = std::pow(d, -path_loss_exponent);
      g(i, j) = gij;
      g(j, i) = gij;
    }
  }
  return g;
}

Topology::Topology(std::vector<Node> nodes, std::vector<Link> links, GainMatrix gains, std::vector<double> pmax,
                   std::vector<double> noise, Geometry geometry, double side)
    : nodes_(std::move(nodes)),
      links_(std::move(links)),
      gains_(std::move(gains)),
      pmax_(std::move(pmax)),
      noise_(std::move(noise)),
      geometry_(geometry),
      side_(side) {
  const std::size_t n = nodes_.size();
  if (n == 0) throw Error("topology has no nodes");
  if (links_.empty()) throw Error("topology has no links");
  if (gains_.size() != n) throw Error("gain matrix size does not match node count");
  if (pmax_.size() != n || noise_.size() != n) throw Error("pmax/noise must have one entry per node");
  if (geometry_ == Geometry::Torus && !(side_ > 0.0)) throw Error("torus side must be positive");
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes_[i].id != static_cast<int>(i)) throw Error("node ids must be 0..n-1 in order");
    if (!(pmax_[i] > 0.0)) throw Error("pmax must be positive at node " + std::to_string(i));
    if (!(noise_[i] > 0.0)) throw Error("noise must be positive at node " + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !(gains_(i, j) > 0.0))
        throw Error("gain " + std::to_string(i) + "->" + std::to_string(j) + " must be positive");
  }
  roles_.assign(n, NodeRole::Idle);
  outgoing_.assign(n, {});
  for (std::size_t l = 0; l < links_.size(); ++l) {
    const Link& k = links_[l];
    if (k.id != static_cast<int>(l)) throw Error("link ids must be 0..n-1 in order");
    if (k.tx < 0 || k.rx < 0 || k.tx >= static_cast<int>(n) || k.rx >= static_cast<int>(n))
      throw Error("link " + std::to_string(l) + " references an unknown node");
    if (k.tx == k.rx) throw Error("link " + std::to_string(l) + " has tx == rx");
    auto& rtx = roles_[static_cast<std::size_t>(k.tx)];
    auto& rrx = roles_[static_cast<std::size_t>(k.rx)];
    if (rtx == NodeRole::Receiver || rrx == NodeRole::Transmitter)
      throw Error("node used as both transmitter and receiver (link " + std::to_string(l) + ")");
    rtx = NodeRole::Transmitter;
    rrx = NodeRole::Receiver;
    outgoing_[static_cast<std::size_t>(k.tx)].push_back(k.id);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!outgoing_[i].empty()) transmitters_.push_back(static_cast<int>(i));
}

double Topology::distance(int a, int b) const {
  return gibbsnet::distance(nodes_[static_cast<std::size_t>(a)].pos, nodes_[static_cast<std::size_t>(b)].pos,
                            geometry_, side_);
}

NeighborhoodMap compute_neighborhoods(const Topology& topo, double alpha) {
  if (!(alpha > 0.0)) throw Error("alpha must be positive");
  const std::size_t n = topo.num_nodes();
  NeighborhoodMap nb;
  nb.alpha = alpha;
  nb.adjacent.assign(n, std::vector<std::uint8_t>(n, 0));
  nb.within_two.assign(n, std::vector<std::uint8_t>(n, 0));
  nb.one_hop.assign(n, {});
  nb.two_hop.assign(n, {});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && std::max(topo.gains()(a, b), topo.gains()(b, a)) >= alpha) {
        nb.adjacent[a][b] = 1;
        nb.one_hop[a].push_back(static_cast<int>(b));
      }
  for (std::size_t a = 0; a < n; ++a) {
    for (int c : nb.one_hop[a]) {
      nb.within_two[a][static_cast<std::size_t>(c)] = 1;
      for (int b : nb.one_hop[static_cast<std::size_t>(c)]) {
        const auto ub = static_cast<std::size_t>(b);
        if (ub != a && !nb.adjacent[a][ub]) nb.within_two[a][ub] = 1;
      }
    }
    for (std::size_t b = 0; b < n; ++b)
      if (nb.within_two[a][b] && !nb.adjacent[a][b]) nb.two_hop[a].push_back(static_cast<int>(b));
  }

  const std::size_t L = topo.num_links();
  nb.xi.assign(L, 0.0);
  nb.noise_hat.assign(L, 0.0);
  nb.interferers.assign(L, {});
  nb.affected.assign(L, {});
  for (std::size_t l = 0; l < L; ++l) {
    const Link& ab = topo.links()[l];
    // worst case over non-neighbor transmitters: every one at full power
    double xi = 0.0;
    for (int x : topo.transmitters()) {
      if (x == ab.rx || nb.is_one_hop(ab.rx, x)) continue;
      xi += topo.pmax(x) * topo.gain(x, ab.rx);
    }
    nb.xi[l] = xi;
    nb.noise_hat[l] = topo.noise(ab.rx) + xi;
    for (const Link& xy : topo.links()) {
      if (xy.id != ab.id && nb.is_one_hop(ab.rx, xy.tx)) nb.interferers[l].push_back(xy.id);
      if (xy.id == ab.id || nb.is_one_hop(ab.tx, xy.rx)) nb.affected[l].push_back(xy.id);
    }
  }
  return nb;
}

double default_alpha() { return std::pow(100.0, -3.5); }

double calibrated_noise(double pmax, double link_length, double exponent, double top_sinr, double margin_db) {
  return pmax * std::pow(link_length, -exponent) / (top_sinr * db_to_linear(margin_db));
}

Topology ring_topology(const RingParams& p) {
  if (p.n_links < 3) throw Error("ring needs at least 3 links");
  if (!(p.link_length_m > 0.0)) throw Error("link length must be positive");
  const double phi = 2.0 * std::numbers::pi / p.n_links;
  const double h = p.station_split_m;
  // |tx_i - rx_i|^2 = 2R^2(1 - cos phi) + 2h^2(1 + cos phi)
  const double r2 = (p.link_length_m * p.link_length_m - 2.0 * h * h * (1.0 + std::cos(phi))) /
                    (2.0 * (1.0 - std::cos(phi)));
  if (!(r2 > h * h)) throw Error("station split too large for the ring");
  const double radius = std::sqrt(r2);

  std::vector<Node> nodes;
  std::vector<Link> links;
  std::vector<Vec2> pos;
  for (int i = 0; i < p.n_links; ++i) {
    const double at = i * phi;
    const double ar = (i + 1) * phi;
    const Vec2 tx{(radius + h) * std::cos(at), (radius + h) * std::sin(at)};
    const Vec2 rx{(radius - h) * std::cos(ar), (radius - h) * std::sin(ar)};
    const int tid = static_cast<int>(nodes.size());
    nodes.push_back({tid, tx, "t" + std::to_string(i)});
    nodes.push_back({tid + 1, rx, "r" + std::to_string(i)});
    pos.push_back(tx);
    pos.push_back(rx);
    links.push_back({i, tid, tid + 1});
  }
  GainMatrix g = build_gain_matrix(pos, p.path_loss_exponent, Geometry::Plane);
  const double noise = p.noise > 0.0 ? p.noise
                                     : calibrated_noise(p.pmax, p.link_length_m, p.path_loss_exponent,
                                                        ModulationTable::ieee80211g()[7].min_sinr);
  const std::size_t n = nodes.size();
  Topology topo(std::move(nodes), std::move(links), std::move(g), std::vector<double>(n, p.pmax),
                std::vector<double>(n, noise), Geometry::Plane);
  topo.carrier_sense_m = p.carrier_sense_m;
  topo.path_loss_exponent = p.path_loss_exponent;
  return topo;
}

Topology random_topology(const RandomParams& p) {
  if (p.n_links < 1) throw Error("random topology needs at least one link");
  if (!(p.area_side_m > 0.0) || !(p.link_length_m > 0.0)) throw Error("side and link length must be positive");
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> coord(0.0, p.area_side_m);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<Node> nodes;
  std::vector<Link> links;
  std::vector<Vec2> pos;
  auto wrap = [&](double v) {
    v = std::fmod(v, p.area_side_m);
    return v < 0.0 ? v + p.area_side_m : v;
  };
  for (int i = 0; i < p.n_links; ++i) {
    const Vec2 tx{coord(rng), coord(rng)};
    const double th = angle(rng);
    const Vec2 rx{wrap(tx.x + p.link_length_m * std::cos(th)), wrap(tx.y + p.link_length_m * std::sin(th))};
    const int tid = static_cast<int>(nodes.size());
    nodes.push_back({tid, tx, "t" + std::to_string(i)});
    nodes.push_back({tid + 1, rx, "r" + std::to_string(i)});
    pos.push_back(tx);
    pos.push_back(rx);
    links.push_back({i, tid, tid + 1});
  }
  GainMatrix g = build_gain_matrix(pos, p.path_loss_exponent, Geometry::Torus, p.area_side_m);
  const double noise = p.noise > 0.0 ? p.noise
                                     : calibrated_noise(p.pmax, p.link_length_m, p.path_loss_exponent,
                                                        ModulationTable::ieee80211g()[7].min_sinr);
  const std::size_t n = nodes.size();
  Topology topo(std::move(nodes), std::move(links), std::move(g), std::vector<double>(n, p.pmax),
                std::vector<double>(n, noise), Geometry::Torus, p.area_side_m);
  topo.carrier_sense_m = p.carrier_sense_m;
  topo.path_loss_exponent = p.path_loss_exponent;
  return topo;
}

Topology example_network() {
  // a b c d e f g h
  enum : int { A, B, C, D, E, F, G, H };
  const char* labels = "abcdefgh";
  const Vec2 where[] = {{0, 10}, {0, 0}, {10, 10}, {10, 0}, {20, 10}, {20, 0}, {40, 10}, {40, 0}};
  std::vector<Node> nodes;
  for (int i = 0; i < 8; ++i) nodes.push_back({i, where[i], std::string(1, labels[i])});
  GainMatrix g(8, 1e-18);
  for (int i = 0; i < 8; ++i) g(i, i) = 0.0;
  auto both = [&](int x, int y, double v) {
    g(x, y) = v;
    g(y, x) = v;
  };
  both(A, B, 1.0);
  both(C, D, 1.0);
  both(E, F, 1.0);
  both(G, H, 1.0);
  both(C, B, 0.25);
  both(C, F, 0.25);
  both(E, D, 0.25);
  both(A, D, 0.25);
  // a is a one-hop neighbor of c; h hangs off e and f so that g sits two hops from e
  both(A, C, 0.25);
  both(F, H, 0.2);
  both(E, H, 0.2);
  std::vector<Link> links = {{0, A, B}, {1, C, D}, {2, E, F}, {3, G, H}};
  return Topology(std::move(nodes), std::move(links), std::move(g), std::vector<double>(8, 40.0),
                  std::vector<double>(8, 1.0), Geometry::Plane);
}

std::string topology_csv(const Topology& topo) {
  std::ostringstream out;
  out.precision(17);
  out << "node_id,x,y,role\n";
  for (const Node& n : topo.nodes()) {
    const char* role = topo.role(n.id) == NodeRole::Transmitter ? "tx"
                       : topo.role(n.id) == NodeRole::Receiver  ? "rx"
                                                                : "idle";
    out << n.id << ',' << n.pos.x << ',' << n.pos.y << ',' << role << '\n';
  }
  return out.str();
}

}  // namespace gibbsnet
