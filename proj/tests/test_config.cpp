#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gibbsnet/config.hpp"

using namespace gibbsnet;

#ifndef GIBBSNET_PRESET_DIR
#error "GIBBSNET_PRESET_DIR must be defined"
#endif

namespace {

const char* kMinimal = R"(name: mini
topology:
  kind: ring
  n_links: 5
policies: [gibbs, csma]
gibbs:
  epsilon_per_power_unit: 0.02
  control_slots: 8
arrivals:
  kind: ring
  rho: {from: 0.1, to: 0.3, step: 0.05}
horizon_slots: 15000
seeds: [4, 5]
)";

const char* kArrivals = "arrivals:\n  kind: ring\n  rho: [0.1]\n";

int error_line(const std::string& text) {
  try {
    parse_config(text + kArrivals, "t.cfg");
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
  const auto cfg = parse_config(kMinimal, "mini.cfg");
  CHECK(cfg.name == "mini");
  CHECK(cfg.topology.kind == "ring");
  CHECK(cfg.topology.ring.n_links == 5);
  CHECK(cfg.policies == std::vector<std::string>{"gibbs", "csma"});
  CHECK(cfg.gibbs.epsilon == 0.02);
  CHECK(cfg.gibbs.control_slots == 8);
  CHECK(cfg.gibbs.super_slot == 50);
  CHECK(cfg.gibbs.k0_mode == K0Mode::Penalty);
  REQUIRE(cfg.arrivals.loads.size() == 5);
  CHECK(cfg.arrivals.loads[2] == doctest::Approx(0.2));
  CHECK(cfg.arrivals.loads[4] == doctest::Approx(0.3));
  CHECK(cfg.horizon_slots == 15000);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{4, 5});
  const auto net = build_network(cfg);
  CHECK(net.num_links() == 5);
  CHECK(net.table.size() == 8);
}

TEST_CASE("unknown keys and bad values report their line") {
  CHECK(error_line("name: x\nbogus: 1\n") == 2);
  CHECK(error_line("name: x\ntopology:\n  kind: ring\n  n_link: 9\n") == 4);
  CHECK(error_line("name: x\ngibbs:\n  epsilon_per_power_unit: -1\n") == 3);
  CHECK(error_line("name: x\ngibbs:\n  k0_mode: fancy\n") == 3);
  CHECK(error_line("name: x\npolicies: [gibbs, tdma]\n") > 0);
  CHECK(error_line("name: x\nhorizon_slots: 0\n") == 2);
  CHECK(error_line("name: [unterminated\n") >= 1);
  CHECK_THROWS_WITH_AS(parse_config(std::string("name: x\nbogus: 1\n") + kArrivals, "t.cfg"), doctest::Contains("t.cfg:2"), ConfigError);
}

TEST_CASE("config hash ignores output dir and tracks everything else") {
  const auto a = parse_config(kMinimal);
  auto b = parse_config(std::string(kMinimal) + "output_dir: /tmp/elsewhere\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  auto c = parse_config(std::string(kMinimal) + "warmup_fraction: 0.2\n");
  CHECK(config_hash(a) != config_hash(c));
  // the resolved YAML parses back to the same config
  const auto round = parse_config(resolved_config_yaml(a));
  CHECK(config_hash(round) == config_hash(a));
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("every shipped preset parses") {
  namespace fs = std::filesystem;
  int seen = 0;
  for (const auto& e : fs::directory_iterator(GIBBSNET_PRESET_DIR)) {
    if (e.path().extension() != ".cfg") continue;
    ++seen;
    const auto cfg = load_config(e.path());
    CHECK_MESSAGE(!cfg.name.empty(), e.path().string());
    CHECK_NOTHROW(build_network(cfg));
  }
  CHECK(seen >= 5);

  const auto ring = load_config(fs::path(GIBBSNET_PRESET_DIR) / "ring-paper.cfg");
  CHECK(ring.arrivals.loads.size() == 17);
  CHECK(ring.seeds.size() == 3);
  CHECK(ring.horizon_slots == 100000);
  CHECK(ring.policies.size() == 3);
}

TEST_CASE("custom modulation tables and topology files") {
  const auto cfg = parse_config(R"(name: custom
topology:
  kind: example
modulation:
  kind: custom
  schemes:
    - {name: lo, rate_packets_per_slot: 1, min_sinr_db: 3}
    - {name: hi, rate_packets_per_slot: 2, min_sinr_db: 9}
arrivals:
  kind: poisson
  lambda_packets_per_slot: [0.1]
)");
  const auto t = build_modulation_table(cfg.modulation);
  CHECK(t.size() == 2);
  CHECK(t[1].min_sinr == doctest::Approx(db_to_linear(9)));
  CHECK(error_line(R"(name: custom
modulation:
  kind: custom
  schemes:
    - {name: lo, rate_packets_per_slot: 2, min_sinr_db: 3}
    - {name: hi, rate_packets_per_slot: 1, min_sinr_db: 9}
)") > 0);

  const auto topo = example_network();
  const auto back = parse_topology_file(topology_to_yaml(topo));
  CHECK(back.num_links() == topo.num_links());
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) CHECK(back.gain(a, b) == topo.gain(a, b));
  CHECK(back.pmax_all() == topo.pmax_all());
  CHECK(back.noise_all() == topo.noise_all());
}
