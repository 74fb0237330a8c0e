#include "altmin/instance_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "altmin/errors.hpp"

namespace altmin {

using nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("instance: bad matrix");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw ConfigError("instance: ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  const NetworkProblem& np = inst.problem;
  json j;
  j["version"] = 1;
  j["M"] = np.M();
  json edges = json::array();
  for (int i = 0; i < np.M(); ++i)
    for (int k : np.net.neighbors[i])
      if (k > i) edges.push_back(json::array({i, k}));
  j["edges"] = std::move(edges);
  json dims = json::array();
  for (int i = 0; i < np.M(); ++i) dims.push_back(np.maps.block_dim(i));
  j["block_dims"] = std::move(dims);
  json agents = json::array();
  for (const auto& a : np.agents) {
    json ja;
    ja["H"] = matrix_to_json(a.f.H());
    ja["h"] = vector_to_json(a.f.h());
    ja["box_lower"] = vector_to_json(a.set.lower());
    ja["box_upper"] = vector_to_json(a.set.upper());
    agents.push_back(std::move(ja));
  }
  j["agents"] = std::move(agents);
  if (inst.meta) {
    json m;
    m["seed"] = inst.meta->seed;
    m["nx"] = inst.meta->nx;
    m["nu"] = inst.meta->nu;
    m["N"] = inst.meta->N;
    m["activation_scale"] = inst.meta->activation_scale;
    m["achieved_activation"] = inst.meta->achieved_activation;
    m["ridge_applied"] = inst.meta->ridge_applied;
    j["meta"] = std::move(m);
  }
  return j.dump(1);
}

Instance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("instance: invalid JSON: ") + e.what());
  }
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw ConfigError("instance: unsupported schema version");
  const int M = j.at("M").get<int>();
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  Network net = Network::from_edges(M, edges);

  std::vector<Eigen::Index> dims;
  for (const auto& d : j.at("block_dims")) dims.push_back(d.get<Eigen::Index>());

  std::vector<AgentProblem> agents;
  const auto& ja = j.at("agents");
  if (static_cast<int>(ja.size()) != M) throw ConfigError("instance: agent count mismatch");
  for (const auto& a : ja) {
    Eigen::MatrixXd H = matrix_from_json(a.at("H"));
    Eigen::VectorXd h = vector_from_json(a.at("h"));
    Eigen::VectorXd lo = vector_from_json(a.at("box_lower"));
    Eigen::VectorXd hi = vector_from_json(a.at("box_upper"));
    agents.push_back({QuadraticFn(std::move(H), std::move(h)),
                      ConvexSet::box(std::move(lo), std::move(hi))});
  }

  Instance inst{NetworkProblem(std::move(agents), std::move(net), std::move(dims)), std::nullopt};
  if (j.contains("meta")) {
    const auto& m = j["meta"];
    InstanceMeta meta;
    meta.seed = m.value("seed", 0ull);
    meta.nx = m.value("nx", 0);
    meta.nu = m.value("nu", 0);
    meta.N = m.value("N", 0);
    meta.activation_scale = m.value("activation_scale", 0.0);
    meta.achieved_activation = m.value("achieved_activation", -1.0);
    if (m.contains("ridge_applied")) {
      for (const auto& b : m["ridge_applied"]) meta.ridge_applied.push_back(b.get<bool>());
    }
    inst.meta = std::move(meta);
  }
  return inst;
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("instance: cannot open " + path.string() + " for writing");
  out << instance_to_json(inst) << "\n";
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("instance: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace altmin
