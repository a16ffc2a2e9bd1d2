#include "gibbsnet/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace gibbsnet {

ConfigError::ConfigError(const std::string& source, int line, const std::string& what)
    : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what), line_(line) {}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

/// Map reader that records which keys were consumed so leftovers can be rejected.
class Section {
 public:
  Section(YAML::Node node, std::string source, std::string path)
      : node_(std::move(node)), source_(std::move(source)), path_(std::move(path)) {
    if (node_ && !node_.IsMap()) fail(node_, "expected a mapping");
  }

  bool has(const std::string& key) { return static_cast<bool>(raw(key)); }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    if (!node_) return YAML::Node(YAML::NodeType::Undefined);
    const YAML::Node& view = node_;
    return view[key];
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    YAML::Node n = raw(key);
    if (!n) return fallback;
    return as<T>(n, key);
  }

  template <typename T>
  T require(const std::string& key) {
    YAML::Node n = raw(key);
    if (!n) fail(node_, "missing required key '" + qualified(key) + "'");
    return as<T>(n, key);
  }

  template <typename T>
  T as(const YAML::Node& n, const std::string& key) {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, "bad value for '" + qualified(key) + "'");
    }
  }

  Section sub(const std::string& key) { return Section(raw(key), source_, qualified(key)); }

  void finish() {
    if (!node_) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(kv.first, "unknown key '" + qualified(key) + "'");
    }
  }

  [[noreturn]] void fail(const YAML::Node& n, const std::string& what) const {
    throw ConfigError(source_, line_of(n), what);
  }

  const std::string& source() const { return source_; }

 private:
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  YAML::Node node_;
  std::string source_;
  std::string path_;
  std::set<std::string> seen_;
};

YAML::Node load_yaml(const std::string& text, const std::string& source) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line + 1, e.msg);
  }
}

std::vector<double> parse_loads(Section& parent, const std::string& key) {
  YAML::Node n = parent.raw(key);
  if (!n) parent.fail(YAML::Node(), "missing required key 'arrivals." + key + "'");
  std::vector<double> out;
  if (n.IsSequence()) {
    for (const auto& v : n) out.push_back(parent.as<double>(v, key));
  } else if (n.IsMap()) {
    Section r(n, parent.source(), "arrivals." + key);
    const auto from = r.require<double>("from");
    const auto to = r.require<double>("to");
    const auto step = r.require<double>("step");
    r.finish();
    if (!(step > 0.0) || to < from) r.fail(n, "range needs step > 0 and to >= from");
    const auto count = static_cast<long>(std::floor((to - from) / step + 1e-9));
    // generated from integer multiples so 0.10 + 7*0.01 prints as 0.17
    for (long i = 0; i <= count; ++i) out.push_back(std::round((from + static_cast<double>(i) * step) * 1e9) / 1e9);
  } else {
    out.push_back(parent.as<double>(n, key));
  }
  if (out.empty()) parent.fail(n, "empty load list");
  for (double x : out)
    if (x < 0.0) parent.fail(n, "loads must be >= 0");
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  YAML::Node root = load_yaml(text, source_name);
  if (!root || root.IsNull()) throw ConfigError(source_name, 0, "empty config");
  Section top(root, source_name, "");
  ExperimentConfig cfg;
  cfg.source = source_name;
  cfg.name = top.get<std::string>("name", "experiment");

  {
    Section t = top.sub("topology");
    auto& ts = cfg.topology;
    ts.kind = t.get<std::string>("kind", "ring");
    ts.one_hop_range_m = t.get<double>("one_hop_range_m", 100.0);
    if (t.has("alpha_linear")) ts.alpha = t.require<double>("alpha_linear");
    if (ts.kind == "ring") {
      auto& r = ts.ring;
      r.n_links = t.get<int>("n_links", r.n_links);
      r.link_length_m = t.get<double>("link_length_m", r.link_length_m);
      r.carrier_sense_m = t.get<double>("carrier_sense_m", r.carrier_sense_m);
      r.station_split_m = t.get<double>("station_split_m", r.station_split_m);
      r.pmax = t.get<double>("pmax_mw", r.pmax);
      r.path_loss_exponent = t.get<double>("path_loss_exponent", r.path_loss_exponent);
      r.noise = t.get<double>("noise_mw", r.noise);
    } else if (ts.kind == "random") {
      auto& r = ts.random;
      r.n_links = t.get<int>("n_links", r.n_links);
      r.area_side_m = t.get<double>("area_side_m", r.area_side_m);
      r.link_length_m = t.get<double>("link_length_m", r.link_length_m);
      r.seed = t.get<std::uint64_t>("placement_seed", r.seed);
      r.carrier_sense_m = t.get<double>("carrier_sense_m", r.carrier_sense_m);
      r.pmax = t.get<double>("pmax_mw", r.pmax);
      r.path_loss_exponent = t.get<double>("path_loss_exponent", r.path_loss_exponent);
      r.noise = t.get<double>("noise_mw", r.noise);
    } else if (ts.kind == "file") {
      ts.file = t.require<std::string>("path");
    } else if (ts.kind != "example") {
      t.fail(t.raw("kind"), "topology.kind must be ring, random, example or file");
    }
    t.finish();
    if (!(ts.one_hop_range_m > 0.0)) t.fail(t.raw("one_hop_range_m"), "one_hop_range_m must be positive");
    if (ts.alpha && !(*ts.alpha > 0.0)) t.fail(t.raw("alpha_linear"), "alpha_linear must be positive");
  }

  {
    Section m = top.sub("modulation");
    auto& ms = cfg.modulation;
    ms.kind = m.get<std::string>("kind", ms.kind);
    ms.slot_s = m.get<double>("slot_s", ms.slot_s);
    ms.packet_bits = m.get<double>("packet_bits", ms.packet_bits);
    if (ms.kind == "custom") {
      YAML::Node list = m.raw("schemes");
      if (!list || !list.IsSequence()) m.fail(list, "modulation.schemes must be a list");
      for (const auto& s : list) {
        Section e(s, m.source(), "modulation.schemes[]");
        ModulationScheme sch;
        sch.name = e.get<std::string>("name", "m" + std::to_string(ms.custom.size()));
        sch.rate = e.require<double>("rate_packets_per_slot");
        sch.min_sinr = db_to_linear(e.require<double>("min_sinr_db"));
        e.finish();
        ms.custom.push_back(sch);
      }
    } else if (ms.kind != "ieee80211g" && ms.kind != "bpsk_qpsk") {
      m.fail(m.raw("kind"), "modulation.kind must be ieee80211g, bpsk_qpsk or custom");
    }
    m.finish();
    try {
      (void)build_modulation_table(ms);
    } catch (const Error& e) {
      m.fail(m.raw("kind"), e.what());
    }
  }

  if (top.has("policies")) {
    YAML::Node p = top.raw("policies");
    cfg.policies.clear();
    if (!p.IsSequence()) top.fail(p, "policies must be a list");
    for (const auto& v : p) {
      const auto name = top.as<std::string>(v, "policies");
      if (name != "gibbs" && name != "csma" && name != "qcsma") top.fail(v, "unknown policy '" + name + "'");
      cfg.policies.push_back(name);
    }
    if (cfg.policies.empty()) top.fail(p, "policies must not be empty");
  }

  {
    Section g = top.sub("gibbs");
    auto& gc = cfg.gibbs;
    gc.super_slot = g.get<int>("super_slot_slots", gc.super_slot);
    gc.control_slots = g.get<int>("control_slots", gc.control_slots);
    gc.epsilon = g.get<double>("epsilon_per_power_unit", gc.epsilon);
    const auto mode = g.get<std::string>("k0_mode", "penalty");
    if (mode == "penalty") gc.k0_mode = K0Mode::Penalty;
    else if (mode == "scaled") gc.k0_mode = K0Mode::Scaled;
    else if (mode == "theorem") gc.k0_mode = K0Mode::Theorem;
    else g.fail(g.raw("k0_mode"), "gibbs.k0_mode must be penalty, scaled or theorem");
    gc.power_fraction = g.get<double>("k0_power_fraction", gc.power_fraction);
    gc.kappa = g.get<double>("kappa", gc.kappa);
    if (g.has("k0")) gc.k0 = g.require<double>("k0");
    if (g.has("anneal_cap_slots")) gc.anneal_cap = g.require<int>("anneal_cap_slots");
    g.finish();
    if (gc.super_slot < 1) g.fail(g.raw("super_slot_slots"), "super_slot_slots must be >= 1");
    if (gc.control_slots < 1) g.fail(g.raw("control_slots"), "control_slots must be >= 1");
    if (!(gc.epsilon > 0.0)) g.fail(g.raw("epsilon_per_power_unit"), "epsilon must be positive");
    if (!(gc.power_fraction > 0.0)) g.fail(g.raw("k0_power_fraction"), "k0_power_fraction must be positive");
    if (!(gc.kappa > 0.0)) g.fail(g.raw("kappa"), "kappa must be positive");
    if (gc.k0 && !(*gc.k0 > 0.0)) g.fail(g.raw("k0"), "k0 must be positive");
    if (gc.anneal_cap && *gc.anneal_cap < 0) g.fail(g.raw("anneal_cap_slots"), "anneal_cap_slots must be >= 0");
  }

  {
    Section q = top.sub("qcsma");
    cfg.qcsma_control_slots = q.get<int>("control_slots", cfg.qcsma_control_slots);
    q.finish();
    if (cfg.qcsma_control_slots < 1) q.fail(q.raw("control_slots"), "control_slots must be >= 1");
  }
  if (top.has("sense_range_m")) cfg.sense_range_m = top.require<double>("sense_range_m");

  {
    Section a = top.sub("arrivals");
    cfg.arrivals.kind = a.get<std::string>("kind", "ring");
    if (cfg.arrivals.kind == "ring") {
      cfg.arrivals.loads = parse_loads(a, "rho");
      for (double r : cfg.arrivals.loads)
        if (r > 1.0) a.fail(a.raw("rho"), "rho must lie in [0, 1]");
    } else if (cfg.arrivals.kind == "poisson") {
      cfg.arrivals.loads = parse_loads(a, "lambda_packets_per_slot");
    } else {
      a.fail(a.raw("kind"), "arrivals.kind must be ring or poisson");
    }
    a.finish();
  }

  cfg.horizon_slots = top.get<long>("horizon_slots", cfg.horizon_slots);
  if (cfg.horizon_slots < 1) top.fail(top.raw("horizon_slots"), "horizon_slots must be >= 1");
  if (top.has("seeds")) {
    YAML::Node s = top.raw("seeds");
    cfg.seeds.clear();
    if (s.IsSequence()) {
      for (const auto& v : s) cfg.seeds.push_back(top.as<std::uint64_t>(v, "seeds"));
    } else {
      cfg.seeds.push_back(top.as<std::uint64_t>(s, "seeds"));
    }
    if (cfg.seeds.empty()) top.fail(s, "seeds must not be empty");
  }
  cfg.warmup_fraction = top.get<double>("warmup_fraction", cfg.warmup_fraction);
  if (cfg.warmup_fraction < 0.0 || cfg.warmup_fraction >= 1.0)
    top.fail(top.raw("warmup_fraction"), "warmup_fraction must lie in [0, 1)");
  {
    Section s = top.sub("stability");
    cfg.stability.max_slope = s.get<double>("max_slope_packets_per_slot", cfg.stability.max_slope);
    cfg.stability.min_r2 = s.get<double>("min_r2", cfg.stability.min_r2);
    cfg.stability.min_length = s.get<std::size_t>("min_series_slots", cfg.stability.min_length);
    s.finish();
  }
  cfg.output_dir = top.get<std::string>("output_dir", "");
  cfg.trace_super_slots = top.get<bool>("trace_super_slots", false);
  {
    Section o = top.sub("oracle");
    if (o.has("queues_packets")) {
      YAML::Node q = o.raw("queues_packets");
      if (!q.IsSequence()) o.fail(q, "oracle.queues_packets must be a list");
      for (const auto& v : q) cfg.oracle_queues.push_back(o.as<double>(v, "queues_packets"));
    }
    cfg.oracle_runs = o.get<int>("runs", cfg.oracle_runs);
    o.finish();
    if (cfg.oracle_runs < 1) o.fail(o.raw("runs"), "oracle.runs must be >= 1");
  }
  top.finish();

  if (cfg.topology.kind == "file" && cfg.topology.file.is_relative()) {
    const std::filesystem::path src(source_name);
    if (src.has_parent_path()) cfg.topology.file = src.parent_path() / cfg.topology.file;
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

namespace {

void emit_loads(YAML::Emitter& e, const std::vector<double>& xs) {
  e << YAML::Flow << YAML::BeginSeq;
  for (double x : xs) e << x;
  e << YAML::EndSeq;
}

}  // namespace

std::string resolved_config_yaml(const ExperimentConfig& cfg) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << cfg.name;
  e << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
  const auto& ts = cfg.topology;
  e << YAML::Key << "kind" << YAML::Value << ts.kind;
  e << YAML::Key << "one_hop_range_m" << YAML::Value << ts.one_hop_range_m;
  if (ts.alpha) e << YAML::Key << "alpha_linear" << YAML::Value << *ts.alpha;
  if (ts.kind == "ring") {
    const auto& r = ts.ring;
    e << YAML::Key << "n_links" << YAML::Value << r.n_links;
    e << YAML::Key << "link_length_m" << YAML::Value << r.link_length_m;
    e << YAML::Key << "carrier_sense_m" << YAML::Value << r.carrier_sense_m;
    e << YAML::Key << "station_split_m" << YAML::Value << r.station_split_m;
    e << YAML::Key << "pmax_mw" << YAML::Value << r.pmax;
    e << YAML::Key << "path_loss_exponent" << YAML::Value << r.path_loss_exponent;
    e << YAML::Key << "noise_mw" << YAML::Value << r.noise;
  } else if (ts.kind == "random") {
    const auto& r = ts.random;
    e << YAML::Key << "n_links" << YAML::Value << r.n_links;
    e << YAML::Key << "area_side_m" << YAML::Value << r.area_side_m;
    e << YAML::Key << "link_length_m" << YAML::Value << r.link_length_m;
    e << YAML::Key << "placement_seed" << YAML::Value << r.seed;
    e << YAML::Key << "carrier_sense_m" << YAML::Value << r.carrier_sense_m;
    e << YAML::Key << "pmax_mw" << YAML::Value << r.pmax;
    e << YAML::Key << "path_loss_exponent" << YAML::Value << r.path_loss_exponent;
    e << YAML::Key << "noise_mw" << YAML::Value << r.noise;
  } else if (ts.kind == "file") {
    e << YAML::Key << "path" << YAML::Value << ts.file.string();
  }
  e << YAML::EndMap;

  e << YAML::Key << "modulation" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << cfg.modulation.kind;
  e << YAML::Key << "slot_s" << YAML::Value << cfg.modulation.slot_s;
  e << YAML::Key << "packet_bits" << YAML::Value << cfg.modulation.packet_bits;
  if (cfg.modulation.kind == "custom") {
    e << YAML::Key << "schemes" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : cfg.modulation.custom)
      e << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << s.name << YAML::Key
        << "rate_packets_per_slot" << YAML::Value << s.rate << YAML::Key << "min_sinr_db" << YAML::Value
        << linear_to_db(s.min_sinr) << YAML::EndMap;
    e << YAML::EndSeq;
  }
  e << YAML::EndMap;

  e << YAML::Key << "policies" << YAML::Value << YAML::Flow << cfg.policies;
  const auto& g = cfg.gibbs;
  e << YAML::Key << "gibbs" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "super_slot_slots" << YAML::Value << g.super_slot;
  e << YAML::Key << "control_slots" << YAML::Value << g.control_slots;
  e << YAML::Key << "epsilon_per_power_unit" << YAML::Value << g.epsilon;
  const char* mode = g.k0_mode == K0Mode::Penalty ? "penalty" : g.k0_mode == K0Mode::Scaled ? "scaled" : "theorem";
  e << YAML::Key << "k0_mode" << YAML::Value << mode;
  e << YAML::Key << "k0_power_fraction" << YAML::Value << g.power_fraction;
  e << YAML::Key << "kappa" << YAML::Value << g.kappa;
  if (g.k0) e << YAML::Key << "k0" << YAML::Value << *g.k0;
  e << YAML::Key << "anneal_cap_slots" << YAML::Value << g.anneal_cap.value_or(g.super_slot);
  e << YAML::EndMap;
  e << YAML::Key << "qcsma" << YAML::Value << YAML::BeginMap << YAML::Key << "control_slots" << YAML::Value
    << cfg.qcsma_control_slots << YAML::EndMap;
  if (cfg.sense_range_m) e << YAML::Key << "sense_range_m" << YAML::Value << *cfg.sense_range_m;

  e << YAML::Key << "arrivals" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << cfg.arrivals.kind;
  e << YAML::Key << (cfg.arrivals.kind == "ring" ? "rho" : "lambda_packets_per_slot") << YAML::Value;
  emit_loads(e, cfg.arrivals.loads);
  e << YAML::EndMap;

  e << YAML::Key << "horizon_slots" << YAML::Value << cfg.horizon_slots;
  e << YAML::Key << "seeds" << YAML::Value << YAML::Flow << cfg.seeds;
  e << YAML::Key << "warmup_fraction" << YAML::Value << cfg.warmup_fraction;
  e << YAML::Key << "stability" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "max_slope_packets_per_slot" << YAML::Value << cfg.stability.max_slope;
  e << YAML::Key << "min_r2" << YAML::Value << cfg.stability.min_r2;
  e << YAML::Key << "min_series_slots" << YAML::Value << cfg.stability.min_length;
  e << YAML::EndMap;
  e << YAML::Key << "trace_super_slots" << YAML::Value << cfg.trace_super_slots;
  if (!cfg.oracle_queues.empty() || cfg.oracle_runs != 100) {
    e << YAML::Key << "oracle" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "queues_packets" << YAML::Value;
    emit_loads(e, cfg.oracle_queues);
    e << YAML::Key << "runs" << YAML::Value << cfg.oracle_runs;
    e << YAML::EndMap;
  }
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(resolved_config_yaml(cfg));
  return out.str();
}

ModulationTable build_modulation_table(const ModulationSpec& spec) {
  if (spec.kind == "bpsk_qpsk") return ModulationTable::bpsk_qpsk();
  if (spec.kind == "custom") return ModulationTable(spec.custom);
  if (!(spec.slot_s > 0.0) || !(spec.packet_bits > 0.0)) throw Error("slot_s and packet_bits must be positive");
  return ModulationTable::ieee80211g(spec.slot_s, spec.packet_bits);
}

Topology build_topology(const ExperimentConfig& cfg) {
  const auto& ts = cfg.topology;
  if (ts.kind == "ring") return ring_topology(ts.ring);
  if (ts.kind == "random") return random_topology(ts.random);
  if (ts.kind == "example") return example_network();
  std::ifstream in(ts.file);
  if (!in) throw ConfigError(ts.file.string(), 0, "cannot open topology file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_topology_file(ss.str(), ts.file.string());
}

double resolved_alpha(const ExperimentConfig& cfg, const Topology& topo) {
  if (cfg.topology.alpha) return *cfg.topology.alpha;
  if (cfg.topology.kind == "example") return kExampleAlpha;
  const double exponent = topo.path_loss_exponent.value_or(3.5);
  return std::pow(cfg.topology.one_hop_range_m, -exponent);
}

Network build_network(const ExperimentConfig& cfg) {
  Topology topo = build_topology(cfg);
  const double alpha = resolved_alpha(cfg, topo);
  return make_network(std::move(topo), alpha, build_modulation_table(cfg.modulation));
}

Topology parse_topology_file(const std::string& text, const std::string& source_name) {
  YAML::Node root = load_yaml(text, source_name);
  Section top(root, source_name, "");
  const auto geom = top.get<std::string>("geometry", "plane");
  if (geom != "plane" && geom != "torus") top.fail(top.raw("geometry"), "geometry must be plane or torus");
  const Geometry geometry = geom == "torus" ? Geometry::Torus : Geometry::Plane;
  const double side = top.get<double>("side_m", 0.0);

  std::vector<Node> nodes;
  YAML::Node ns = top.raw("nodes");
  if (!ns || !ns.IsSequence()) top.fail(ns, "nodes must be a list");
  for (const auto& n : ns) {
    Section s(n, source_name, "nodes[]");
    Node node;
    node.id = s.require<int>("id");
    node.pos = {s.get<double>("x_m", 0.0), s.get<double>("y_m", 0.0)};
    node.label = s.get<std::string>("label", "");
    s.finish();
    nodes.push_back(node);
  }
  std::vector<Link> links;
  YAML::Node ls = top.raw("links");
  if (!ls || !ls.IsSequence()) top.fail(ls, "links must be a list");
  for (const auto& l : ls) {
    Section s(l, source_name, "links[]");
    Link link;
    link.id = s.require<int>("id");
    link.tx = s.require<int>("tx");
    link.rx = s.require<int>("rx");
    s.finish();
    links.push_back(link);
  }
  const std::size_t nn = nodes.size();
  auto per_node = [&](const std::string& key, double fallback) {
    YAML::Node v = top.raw(key);
    std::vector<double> out(nn, fallback);
    if (!v) return out;
    if (v.IsSequence()) {
      if (v.size() != nn) top.fail(v, key + " needs one value per node");
      for (std::size_t i = 0; i < nn; ++i) out[i] = top.as<double>(v[i], key);
    } else {
      out.assign(nn, top.as<double>(v, key));
    }
    return out;
  };
  const auto pmax = per_node("pmax_mw", 100.0);
  const auto noise = per_node("noise_mw", 1.0);

  std::optional<double> exponent;
  if (top.has("path_loss_exponent")) exponent = top.require<double>("path_loss_exponent");
  GainMatrix gains;
  YAML::Node gm = top.raw("gains");
  if (gm) {
    if (!gm.IsSequence() || gm.size() != nn) top.fail(gm, "gains must be an n x n list of rows");
    gains = GainMatrix(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      if (!gm[i].IsSequence() || gm[i].size() != nn) top.fail(gm[i], "gain row has wrong length");
      for (std::size_t j = 0; j < nn; ++j) gains(i, j) = top.as<double>(gm[i][j], "gains");
    }
  } else {
    if (!exponent) top.fail(root, "either gains or path_loss_exponent is required");
    std::vector<Vec2> pos;
    for (const auto& n : nodes) pos.push_back(n.pos);
    try {
      gains = build_gain_matrix(pos, *exponent, geometry, side);
    } catch (const Error& e) {
      top.fail(ns, e.what());
    }
  }
  std::optional<double> sense;
  if (top.has("carrier_sense_m")) sense = top.require<double>("carrier_sense_m");
  top.finish();
  try {
    Topology topo(std::move(nodes), std::move(links), std::move(gains), pmax, noise, geometry, side);
    topo.carrier_sense_m = sense;
    topo.path_loss_exponent = exponent;
    return topo;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(source_name, 0, e.what());
  }
}

std::string topology_to_yaml(const Topology& topo) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "geometry" << YAML::Value << (topo.geometry() == Geometry::Torus ? "torus" : "plane");
  if (topo.geometry() == Geometry::Torus) e << YAML::Key << "side_m" << YAML::Value << topo.side();
  e << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
  for (const auto& n : topo.nodes())
    e << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << n.id << YAML::Key << "x_m"
      << YAML::Value << n.pos.x << YAML::Key << "y_m" << YAML::Value << n.pos.y << YAML::Key << "label"
      << YAML::Value << n.label << YAML::EndMap;
  e << YAML::EndSeq;
  e << YAML::Key << "links" << YAML::Value << YAML::BeginSeq;
  for (const auto& l : topo.links())
    e << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << l.id << YAML::Key << "tx"
      << YAML::Value << l.tx << YAML::Key << "rx" << YAML::Value << l.rx << YAML::EndMap;
  e << YAML::EndSeq;
  e << YAML::Key << "pmax_mw" << YAML::Value << YAML::Flow << topo.pmax_all();
  e << YAML::Key << "noise_mw" << YAML::Value << YAML::Flow << topo.noise_all();
  if (topo.path_loss_exponent) e << YAML::Key << "path_loss_exponent" << YAML::Value << *topo.path_loss_exponent;
  if (topo.carrier_sense_m) e << YAML::Key << "carrier_sense_m" << YAML::Value << *topo.carrier_sense_m;
  e << YAML::Key << "gains" << YAML::Value << YAML::BeginSeq;
  for (std::size_t i = 0; i < topo.num_nodes(); ++i) {
    std::vector<double> row(topo.num_nodes());
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = topo.gains()(i, j);
    e << YAML::Flow << row;
  }
  e << YAML::EndSeq;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string modulation_to_yaml(const ModulationTable& table) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap << YAML::Key << "kind" << YAML::Value << "custom";
  e << YAML::Key << "schemes" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : table.schemes())
    e << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << s.name << YAML::Key
      << "rate_packets_per_slot" << YAML::Value << s.rate << YAML::Key << "min_sinr_db" << YAML::Value
      << linear_to_db(s.min_sinr) << YAML::EndMap;
  e << YAML::EndSeq << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace gibbsnet
