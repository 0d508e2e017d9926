#include "mnmf/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "mnmf/error.hpp"

namespace mnmf {

Network Network::from_edges(std::size_t n, const std::vector<Edge>& edges, bool undirected) {
  std::map<std::pair<std::size_t, std::size_t>, double> w;
  for (const Edge& e : edges) {
    if (e.source >= n || e.target >= n) throw std::invalid_argument("edge endpoint out of range");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw DataError("edge weights must be finite and nonnegative");
    }
    w[{e.source, e.target}] = e.weight;
    if (undirected) w[{e.target, e.source}] = e.weight;
  }
  Network g;
  g.out_.assign(n, {});
  g.in_.assign(n, {});
  g.out_weight_.assign(n, 0.0);
  g.in_weight_.assign(n, 0.0);
  for (const auto& [key, value] : w) {
    if (value == 0.0) continue;
    const auto [a, b] = key;
    g.out_[a].push_back({b, value});
    g.in_[b].push_back({a, value});
    g.out_weight_[a] += value;
    g.in_weight_[b] += value;
    ++g.edge_count_;
    if (value != 1.0 || a == b) g.simple_ = false;
  }
  // The map iterates in (source, target) order, so out-lists are sorted; the
  // in-lists are filled in source order and hence sorted too.
  for (std::size_t a = 0; a < n; ++a) {
    for (const Neighbor& nb : g.out_[a]) {
      const double back = g.weight(nb.node, a);
      if (back != nb.weight) g.symmetric_ = false;
      if (back == 0.0) g.bidirectional_ = false;
    }
  }
  g.simple_ = g.simple_ && g.symmetric_;
  return g;
}

double Network::weight(std::size_t a, std::size_t b) const {
  const auto& nb = out_[a];
  auto it = std::lower_bound(nb.begin(), nb.end(), b,
                             [](const Neighbor& x, std::size_t v) { return x.node < v; });
  return (it != nb.end() && it->node == b) ? it->weight : 0.0;
}

std::vector<Edge> Network::undirected_edges() const {
  std::vector<Edge> out;
  for (std::size_t a = 0; a < size(); ++a) {
    for (const Neighbor& nb : out_[a]) {
      if (nb.node >= a) out.push_back({a, nb.node, nb.weight});
    }
    for (const Neighbor& nb : in_[a]) {
      if (nb.node > a && weight(a, nb.node) == 0.0) out.push_back({a, nb.node, nb.weight});
    }
  }
  std::sort(out.begin(), out.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.source, x.target) < std::tie(y.source, y.target);
  });
  return out;
}

std::vector<Edge> Network::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t a = 0; a < size(); ++a) {
    for (const Neighbor& nb : out_[a]) out.push_back({a, nb.node, nb.weight});
  }
  return out;
}

void Network::set_labels(std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != size()) {
    throw std::invalid_argument("label count does not match node count");
  }
  labels_ = std::move(labels);
}

std::string Network::label(std::size_t v) const {
  return labels_.empty() ? std::to_string(v) : labels_[v];
}

Network read_edge_list(std::istream& in, bool undirected) {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  auto intern = [&](const std::string& s) {
    auto [it, inserted] = index.emplace(s, labels.size());
    if (inserted) labels.push_back(s);
    return it->second;
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string u, v, w, extra;
    if (!(ss >> u) || u.front() == '#') continue;
    if (!(ss >> v)) throw DataError("line " + std::to_string(lineno) + ": expected 'u v [w]'");
    double weight = 1.0;
    if (ss >> w) {
      try {
        std::size_t used = 0;
        weight = std::stod(w, &used);
        if (used != w.size()) throw std::invalid_argument(w);
      } catch (const std::exception&) {
        throw DataError("line " + std::to_string(lineno) + ": bad weight '" + w + "'");
      }
      if (!(weight >= 0.0) || !std::isfinite(weight)) {
        throw DataError("line " + std::to_string(lineno) + ": weight must be finite and nonnegative");
      }
      if (ss >> extra) throw DataError("line " + std::to_string(lineno) + ": trailing fields");
    }
    const std::size_t a = intern(u);
    const std::size_t b = intern(v);
    edges.push_back({a, b, weight});
  }
  if (labels.empty()) throw DataError("edge list contains no edges");
  Network g = Network::from_edges(labels.size(), edges, undirected);
  g.set_labels(std::move(labels));
  return g;
}

Network read_edge_list(const std::filesystem::path& path, bool undirected) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_edge_list(in, undirected);
}

void write_edge_list(std::ostream& out, const Network& g, bool undirected) {
  std::ostringstream buf;
  buf.precision(6);
  for (const Edge& e : undirected ? g.undirected_edges() : g.edges()) {
    buf << g.label(e.source) << ' ' << g.label(e.target) << ' ' << e.weight << '\n';
  }
  out << buf.str();
}

void write_edge_list(const std::filesystem::path& path, const Network& g, bool undirected) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_edge_list(out, g, undirected);
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace mnmf
