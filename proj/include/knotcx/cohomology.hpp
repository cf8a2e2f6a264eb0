#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "knotcx/differential.hpp"
#include "knotcx/graph.hpp"
#include "knotcx/sparse_matrix.hpp"

namespace knotcx {

class NoCohomology : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Canonical basis of D^{k,l}, sorted by canonical encoding.
struct BasisTable {
  int k = 0;
  int l = 0;
  std::vector<Graph> graphs;
  std::map<Graph, int> index;

  int dim() const noexcept { return static_cast<int>(graphs.size()); }
  std::optional<int> find(const Graph& canonical) const;
};

/// Every valid canonical graph of order k and degree l with nonzero class.
/// `threads` = 0 uses the hardware concurrency. The result does not depend on
/// the thread count.
BasisTable enumerate_basis(int k, int l, unsigned threads = 0);

/// Largest degree with a possibly nonempty basis at order k.
int max_degree(int k);

/// Column j is delta(source.graphs[j]) in the coordinates of `target`.
SparseRationalMatrix delta_matrix(const BasisTable& source, const BasisTable& target,
                                  unsigned threads = 0);

SparseVector coordinates(const GraphVector& v, const BasisTable& basis);
GraphVector from_coordinates(const SparseVector& x, const BasisTable& basis);

struct BettiReport {
  int k = 0;
  int l = 0;
  int dim = 0;
  int rank_out = 0;  // rank of delta: D^{k,l} -> D^{k,l+1}
  int rank_in = 0;   // rank of delta: D^{k,l-1} -> D^{k,l}
  int betti = 0;
};

/// Memoizing front end over bases and delta matrices with an optional disk
/// cache. Thread-safe.
class Complex {
 public:
  struct Options {
    unsigned threads = 0;
    std::optional<std::filesystem::path> cache_dir;
  };

  Complex() = default;
  explicit Complex(Options options) : options_(std::move(options)) {}

  const BasisTable& basis(int k, int l);
  const SparseRationalMatrix& matrix(int k, int l);  // D^{k,l} -> D^{k,l+1}
  int rank(int k, int l);

  BettiReport betti(int k, int l);
  int betti_number(int k, int l) { return betti(k, l).betti; }
  /// Sum over l of (-1)^l dim D^{k,l}.
  long euler_characteristic(int k);

  /// Representatives of a basis of H^{k,l}, each scaled to coprime integers.
  /// Throws NoCohomology when H^{k,l} = 0.
  std::vector<GraphVector> kernel_representatives(int k, int l);

 private:
  Options options_;
  std::mutex mutex_;
  std::map<std::pair<int, int>, std::unique_ptr<BasisTable>> bases_;
  std::map<std::pair<int, int>, std::unique_ptr<SparseRationalMatrix>> matrices_;
  std::map<std::pair<int, int>, int> ranks_;
};

struct SparseSearchResult {
  /// Cocycles found, each nonzero in cohomology, supported on at most
  /// `max_support` graphs, with nonzero coefficient on the required graph,
  /// scaled to coprime integers.
  std::vector<GraphVector> representatives;
  std::size_t nodes_visited = 0;
  bool exhausted = false;  // search space fully explored within the node budget
};

/// Depth-first search over supports for sparse cocycle representatives of
/// nonzero classes in H^{k,l} that involve `required` (a canonical graph).
/// Supports grow by adding a graph that rebalances a row of delta in which the
/// current support has a single entry.
SparseSearchResult search_sparse_representatives(Complex& cx, int k, int l,
                                                 const Graph& required, int max_support,
                                                 std::size_t node_budget = 2'000'000);

/// Sorted absolute values of the coefficients.
std::vector<long> coefficient_multiset(const GraphVector& v);

/// Version tag mixed into cache keys; bump when enumeration or signs change.
inline constexpr const char* kCacheVersion = "knotcx-cache-v1";

/// Disk cache of bases and delta matrices. Files are plain text.
class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::optional<BasisTable> load_basis(int k, int l) const;
  void store_basis(const BasisTable& b) const;
  std::optional<SparseRationalMatrix> load_matrix(int k, int l) const;
  void store_matrix(int k, int l, const SparseRationalMatrix& m) const;

  struct Stat {
    std::size_t files = 0;
    std::uintmax_t bytes = 0;
  };
  Stat stat() const;
  std::size_t clear() const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path file(const std::string& kind, int k, int l) const;
  std::filesystem::path dir_;
};

}  // namespace knotcx
