#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mnmf {

struct Edge {
  std::size_t source = 0;
  std::size_t target = 0;
  double weight = 1.0;
};

struct Neighbor {
  std::size_t node = 0;
  double weight = 0.0;
};

/// Immutable sparse weighted network on nodes 0..n−1. Out- and in-neighbour
/// lists are sorted by node index; zero weights are dropped and repeated
/// edges keep the last weight given.
class Network {
 public:
  Network() = default;
  static Network from_edges(std::size_t n, const std::vector<Edge>& edges,
                            bool undirected = false);

  std::size_t size() const { return out_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  /// A(a, b); zero when absent.
  double weight(std::size_t a, std::size_t b) const;
  const std::vector<Neighbor>& out_neighbors(std::size_t v) const { return out_[v]; }
  const std::vector<Neighbor>& in_neighbors(std::size_t v) const { return in_[v]; }
  double out_weight(std::size_t v) const { return out_weight_[v]; }
  double in_weight(std::size_t v) const { return in_weight_[v]; }

  bool is_symmetric() const { return symmetric_; }
  /// A(a,b) > 0 iff A(b,a) > 0.
  bool is_bidirectional() const { return bidirectional_; }
  /// Symmetric, binary, zero diagonal.
  bool is_simple() const { return simple_; }

  /// Each unordered pair {a, b} with A(a,b) > 0 or A(b,a) > 0 once, a <= b.
  std::vector<Edge> undirected_edges() const;
  std::vector<Edge> edges() const;

  /// Optional external labels from an edge-list file; defaults to indices.
  const std::vector<std::string>& labels() const { return labels_; }
  void set_labels(std::vector<std::string> labels);
  std::string label(std::size_t v) const;

 private:
  std::vector<std::vector<Neighbor>> out_;
  std::vector<std::vector<Neighbor>> in_;
  std::vector<double> out_weight_;
  std::vector<double> in_weight_;
  std::vector<std::string> labels_;
  std::size_t edge_count_ = 0;
  bool symmetric_ = true;
  bool bidirectional_ = true;
  bool simple_ = true;
};

/// Edge list "u v [w]" per line; '#' lines and blank lines are skipped.
/// Labels are interned in order of first appearance. With `undirected`
/// each line is inserted in both directions.
Network read_edge_list(std::istream& in, bool undirected);
Network read_edge_list(const std::filesystem::path& path, bool undirected);

/// One directed edge per line using labels; weights with 6 significant
/// digits. With `undirected` each unordered pair is written once.
void write_edge_list(std::ostream& out, const Network& g, bool undirected);
void write_edge_list(const std::filesystem::path& path, const Network& g, bool undirected);

}  // namespace mnmf
