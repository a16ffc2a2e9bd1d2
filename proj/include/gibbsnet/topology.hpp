#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gibbsnet {

/// Raised for malformed inputs (bad topology, bad config values, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class Geometry { Plane, Torus };

enum class NodeRole { Transmitter, Receiver, Idle };

struct Node {
  int id = 0;
  Vec2 pos;
  std::string label;
};

/// Directed link tx -> rx. Link ids are dense indices 0..n-1.
struct Link {
  int id = 0;
  int tx = 0;
  int rx = 0;
};

/// Square matrix of linear power gains, gain(from, to).
class GainMatrix {
 public:
  GainMatrix() = default;
  explicit GainMatrix(std::size_t n, double fill = 0.0) : n_(n), g_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t from, std::size_t to) const { return g_[from * n_ + to]; }
  double& operator()(std::size_t from, std::size_t to) { return g_[from * n_ + to]; }

 private:
  std::size_t n_ = 0;
  std::vector<double> g_;
};

struct ModulationScheme {
  std::string name;
  double rate = 0.0;      // packets per slot
  double min_sinr = 0.0;  // linear
};

/// Coding-modulation options sorted by rate. Construction enforces strict
/// monotonicity in both rate and SINR threshold.
class ModulationTable {
 public:
  ModulationTable() = default;
  explicit ModulationTable(std::vector<ModulationScheme> schemes);

  std::size_t size() const { return schemes_.size(); }
  const ModulationScheme& operator[](std::size_t i) const { return schemes_[i]; }
  const std::vector<ModulationScheme>& schemes() const { return schemes_; }
  double max_rate() const { return schemes_.back().rate; }

  /// Highest-rate scheme whose threshold is <= gamma, or nullopt.
  std::optional<std::size_t> best_for(double gamma) const;
  double rate_of(std::optional<std::size_t> scheme) const { return scheme ? schemes_[*scheme].rate : 0.0; }

  /// Two-scheme BPSK/QPSK table (rates 1, 2; SINR 4, 8).
  static ModulationTable bpsk_qpsk();
  /// 802.11g rates with default thresholds, converted for the given slot and packet size.
  static ModulationTable ieee80211g(double slot_seconds = 1e-3, double packet_bits = 12000.0);

 private:
  std::vector<ModulationScheme> schemes_;
};

double db_to_linear(double db);
double linear_to_db(double lin);

class Topology {
 public:
  Topology() = default;
  /// Validates every invariant; throws Error on violation.
  Topology(std::vector<Node> nodes, std::vector<Link> links, GainMatrix gains, std::vector<double> pmax,
           std::vector<double> noise, Geometry geometry = Geometry::Plane, double side = 0.0);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(int l) const { return links_[static_cast<std::size_t>(l)]; }
  std::size_t num_links() const { return links_.size(); }
  std::size_t num_nodes() const { return nodes_.size(); }

  double gain(int from, int to) const { return gains_(static_cast<std::size_t>(from), static_cast<std::size_t>(to)); }
  double link_gain(int l) const { return gain(link(l).tx, link(l).rx); }
  const GainMatrix& gains() const { return gains_; }
  double pmax(int node) const { return pmax_[static_cast<std::size_t>(node)]; }
  double link_pmax(int l) const { return pmax(link(l).tx); }
  double noise(int node) const { return noise_[static_cast<std::size_t>(node)]; }
  const std::vector<double>& pmax_all() const { return pmax_; }
  const std::vector<double>& noise_all() const { return noise_; }

  Geometry geometry() const { return geometry_; }
  double side() const { return side_; }
  NodeRole role(int node) const { return roles_[static_cast<std::size_t>(node)]; }

  /// Outgoing links of a node, ascending id.
  const std::vector<int>& outgoing(int node) const { return outgoing_[static_cast<std::size_t>(node)]; }
  /// Nodes with at least one outgoing link, ascending id.
  const std::vector<int>& transmitters() const { return transmitters_; }

  double distance(int a, int b) const;

  std::optional<double> carrier_sense_m;
  std::optional<double> path_loss_exponent;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  GainMatrix gains_;
  std::vector<double> pmax_;
  std::vector<double> noise_;
  Geometry geometry_ = Geometry::Plane;
  double side_ = 0.0;
  std::vector<NodeRole> roles_;
  std::vector<std::vector<int>> outgoing_;
  std::vector<int> transmitters_;
};

/// Euclidean distance, wrap-around on a torus of the given side.
double distance(Vec2 a, Vec2 b, Geometry geometry, double side);

/// gain(x -> b) = dist(x, b)^(-exponent); the diagonal is left at zero.
GainMatrix build_gain_matrix(std::span<const Vec2> positions, double path_loss_exponent, Geometry geometry,
                             double side = 0.0);

/// One-hop / two-hop neighbor sets and the non-neighbor interference bound.
struct NeighborhoodMap {
  double alpha = 0.0;
  std::vector<std::vector<int>> one_hop;  // per node, sorted
  std::vector<std::vector<int>> two_hop;  // per node, sorted
  std::vector<std::vector<std::uint8_t>> adjacent;  // one-hop adjacency matrix
  std::vector<std::vector<std::uint8_t>> within_two;  // one- or two-hop
  std::vector<double> xi;         // per link
  std::vector<double> noise_hat;  // per link: n_b + xi_ab

  /// Per link (ab): links (xy) != (ab) whose transmitter is a one-hop neighbor of b.
  std::vector<std::vector<int>> interferers;
  /// Per link (ab): links (xy) with y a one-hop neighbor of a, plus (ab) itself. Sorted.
  std::vector<std::vector<int>> affected;

  bool is_one_hop(int a, int b) const { return adjacent[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] != 0; }
  bool is_within_two_hops(int a, int b) const {
    return within_two[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] != 0;
  }
};

NeighborhoodMap compute_neighborhoods(const Topology& topo, double alpha);

/// Default one-hop gain threshold: 100 m at path-loss exponent 3.5.
double default_alpha();

/// Noise that gives a link of `link_length` at `pmax` a `margin_db` margin above `top_sinr`.
double calibrated_noise(double pmax, double link_length, double exponent, double top_sinr, double margin_db = 3.0);

struct RingParams {
  int n_links = 9;
  double link_length_m = 20.0;
  double carrier_sense_m = 40.0;
  double station_split_m = 1.0;
  double pmax = 100.0;
  double path_loss_exponent = 3.5;
  double noise = 0.0;  // <= 0 means calibrated against the 802.11g table
};

/// n_links stations on a circle with adjacent chord link_length. Station i hosts
/// the transmitter of link i (radially outward) and the receiver of link i-1
/// (radially inward). Every link has length exactly link_length.
Topology ring_topology(const RingParams& params);

struct RandomParams {
  int n_links = 200;
  double area_side_m = 1000.0;
  double link_length_m = 20.0;
  std::uint64_t seed = 1;
  double carrier_sense_m = 200.0;
  double pmax = 100.0;
  double path_loss_exponent = 3.5;
  double noise = 0.0;  // <= 0 means calibrated
};

/// Transmitters uniform on a torus, receivers at link_length in a uniform direction.
Topology random_topology(const RandomParams& params);

/// The four-link worked example (links ab, cd, ef, gh) with explicit gains,
/// unit noise and pmax 40. Gains absent from the example are set to 1e-18.
Topology example_network();
/// alpha used with example_network().
inline constexpr double kExampleAlpha = 0.1;

/// Topology as CSV rows "node_id,x,y,role".
std::string topology_csv(const Topology& topo);

}  // namespace gibbsnet
