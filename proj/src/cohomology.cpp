#include "knotcx/cohomology.hpp"

#include <fstream>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <sstream>

#include "knotcx/parallel.hpp"

namespace knotcx {

std::optional<int> BasisTable::find(const Graph& canonical) const {
  auto it = index.find(canonical);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

int max_degree(int k) { return k >= 1 ? 2 * k - 1 : -1; }

namespace {

// One unit of enumeration work: a fixed vertex split and a fixed sequence of
// required edge-ends per vertex.
struct DegreeJob {
  int vi = 0;
  int vf = 0;
  std::vector<int> ends;  // index 1..vi+vf
};

void degree_sequences(int vi, int vf, int excess, std::vector<DegreeJob>& out) {
  const int n = vi + vf;
  std::vector<int> ends(n + 1, 0);
  // Free vertices are interchangeable, so their excess is taken
  // non-increasing along labels.
  auto rec = [&](auto&& self, int v, int left) -> void {
    if (v > n) {
      if (left == 0) out.push_back({vi, vf, ends});
      return;
    }
    const bool interval = v <= vi;
    const int base = interval ? 1 : 3;
    int cap = left;
    if (!interval && v > vi + 1) cap = std::min(cap, ends[v - 1] - 3);
    // an interval vertex holds at most one loop plus one edge to each other vertex
    const int max_ends = (n - 1) + (interval ? 2 : 0);
    cap = std::min(cap, max_ends - base);
    for (int x = cap; x >= 0; --x) {
      ends[v] = base + x;
      self(self, v + 1, left - x);
    }
  };
  rec(rec, 1, excess);
}

class GraphGenerator {
 public:
  explicit GraphGenerator(const DegreeJob& job)
      : vi_(job.vi), vf_(job.vf), n_(job.vi + job.vf), rem_(job.ends) {}

  std::set<Graph> run() {
    visit(1);
    return std::move(found_);
  }

 private:
  void visit(int v) {
    if (v > n_) {
      emit();
      return;
    }
    if (rem_[v] == 0) {
      visit(v + 1);
      return;
    }
    if (v <= vi_ && rem_[v] >= 2 && (loops_.empty() || loops_.back().vertex != v)) {
      loops_.push_back({v, true});
      rem_[v] -= 2;
      choose_neighbours(v, v + 1);
      rem_[v] += 2;
      loops_.pop_back();
    }
    choose_neighbours(v, v + 1);
  }

  // Give vertex v its remaining ends as edges to distinct higher vertices.
  void choose_neighbours(int v, int from) {
    if (rem_[v] == 0) {
      visit(v + 1);
      return;
    }
    int available = 0;
    for (int w = from; w <= n_; ++w) available += rem_[w] > 0;
    if (available < rem_[v]) return;
    for (int w = from; w <= n_; ++w) {
      if (rem_[w] == 0) continue;
      edges_.push_back({v, w});
      --rem_[v];
      --rem_[w];
      choose_neighbours(v, w + 1);
      ++rem_[w];
      ++rem_[v];
      edges_.pop_back();
    }
  }

  void emit() {
    auto g = Graph::unchecked(vi_, vf_, edges_, loops_);
    if (!g.is_valid()) return;
    auto c = canonicalize(g);
    if (c.sign != 0) found_.insert(std::move(c.graph));
  }

  int vi_;
  int vf_;
  int n_;
  std::vector<int> rem_;
  std::vector<Edge> edges_;
  std::vector<Loop> loops_;
  std::set<Graph> found_;
};

}  // namespace

BasisTable enumerate_basis(int k, int l, unsigned threads) {
  BasisTable table;
  table.k = k;
  table.l = l;
  if (k < 0 || l < 0) return table;

  std::vector<DegreeJob> jobs;
  for (int vf = 0;; ++vf) {
    const int vi = 2 * k - vf - l;
    if (vi < 1) break;
    degree_sequences(vi, vf, l, jobs);
  }
  std::vector<std::set<Graph>> parts(jobs.size());
  parallel_for(jobs.size(), threads,
               [&](std::size_t i) { parts[i] = GraphGenerator(jobs[i]).run(); });
  std::set<Graph> all;
  for (auto& p : parts) all.merge(p);

  table.graphs.assign(all.begin(), all.end());
  for (int i = 0; i < table.dim(); ++i) table.index.emplace(table.graphs[i], i);
  return table;
}

SparseVector coordinates(const GraphVector& v, const BasisTable& basis) {
  SparseVector x;
  for (const auto& [g, q] : v.terms()) {
    auto idx = basis.find(g);
    if (!idx)
      throw std::logic_error("graph " + format_graph(g) + " missing from basis (" +
                             std::to_string(basis.k) + "," + std::to_string(basis.l) + ")");
    x.emplace(*idx, q);
  }
  return x;
}

GraphVector from_coordinates(const SparseVector& x, const BasisTable& basis) {
  GraphVector v;
  for (const auto& [i, q] : x) v.add_canonical(basis.graphs.at(i), q);
  return v;
}

SparseRationalMatrix delta_matrix(const BasisTable& source, const BasisTable& target,
                                  unsigned threads) {
  SparseRationalMatrix m(target.dim(), source.dim());
  std::vector<SparseVector> cols(source.dim());
  parallel_for(cols.size(), threads, [&](std::size_t j) {
    cols[j] = coordinates(delta(source.graphs[j]), target);
  });
  for (int j = 0; j < source.dim(); ++j)
    for (const auto& [i, q] : cols[j]) m.add(i, j, q);
  return m;
}

// ---------------------------------------------------------------------------
// Complex

const BasisTable& Complex::basis(int k, int l) {
  std::lock_guard lock(mutex_);
  auto key = std::make_pair(k, l);
  auto it = bases_.find(key);
  if (it != bases_.end()) return *it->second;

  std::optional<BasisTable> loaded;
  if (options_.cache_dir) loaded = DiskCache(*options_.cache_dir).load_basis(k, l);
  if (!loaded) {
    loaded = enumerate_basis(k, l, options_.threads);
    if (options_.cache_dir) DiskCache(*options_.cache_dir).store_basis(*loaded);
  }
  auto& slot = bases_[key];
  slot = std::make_unique<BasisTable>(std::move(*loaded));
  return *slot;
}

const SparseRationalMatrix& Complex::matrix(int k, int l) {
  {
    std::lock_guard lock(mutex_);
    auto it = matrices_.find({k, l});
    if (it != matrices_.end()) return *it->second;
  }
  const auto& src = basis(k, l);
  const auto& dst = basis(k, l + 1);

  std::optional<SparseRationalMatrix> loaded;
  if (options_.cache_dir) {
    loaded = DiskCache(*options_.cache_dir).load_matrix(k, l);
    if (loaded && (loaded->rows() != dst.dim() || loaded->cols() != src.dim()))
      loaded.reset();
    if (loaded && src.dim() > 0) {
      // Spot-check a few columns against a fresh computation.
      for (int j : {0, src.dim() / 2, src.dim() - 1}) {
        if (coordinates(delta(src.graphs[j]), dst) != loaded->column(j)) {
          loaded.reset();
          break;
        }
      }
    }
  }
  if (!loaded) {
    loaded = delta_matrix(src, dst, options_.threads);
    if (options_.cache_dir) DiskCache(*options_.cache_dir).store_matrix(k, l, *loaded);
  }
  std::lock_guard lock(mutex_);
  auto& slot = matrices_[{k, l}];
  if (!slot) slot = std::make_unique<SparseRationalMatrix>(std::move(*loaded));
  return *slot;
}

int Complex::rank(int k, int l) {
  if (l < 0) return 0;
  {
    std::lock_guard lock(mutex_);
    auto it = ranks_.find({k, l});
    if (it != ranks_.end()) return it->second;
  }
  const int r = matrix(k, l).rank();
  std::lock_guard lock(mutex_);
  ranks_[{k, l}] = r;
  return r;
}

BettiReport Complex::betti(int k, int l) {
  BettiReport rep;
  rep.k = k;
  rep.l = l;
  rep.dim = basis(k, l).dim();
  rep.rank_out = rep.dim == 0 ? 0 : rank(k, l);
  rep.rank_in = (l == 0 || rep.dim == 0) ? 0 : rank(k, l - 1);
  rep.betti = rep.dim - rep.rank_out - rep.rank_in;
  return rep;
}

long Complex::euler_characteristic(int k) {
  long chi = 0;
  for (int l = 0; l <= max_degree(k); ++l)
    chi += (l % 2 == 0 ? 1 : -1) * static_cast<long>(basis(k, l).dim());
  return chi;
}

std::vector<GraphVector> Complex::kernel_representatives(int k, int l) {
  const auto& b = basis(k, l);
  const auto kernel = matrix(k, l).kernel_basis();
  EchelonBasis image;
  if (l > 0) {
    const auto& in = matrix(k, l - 1);
    for (int j = 0; j < in.cols(); ++j)
      if (!in.column(j).empty()) image.insert(in.column(j));
  }
  EchelonBasis span = image;
  std::vector<GraphVector> reps;
  for (const auto& z : kernel) {
    if (!span.insert(z)) continue;
    reps.push_back(from_coordinates(primitive_integer(image.reduce(z)), b));
  }
  if (reps.empty())
    throw NoCohomology("H^{" + std::to_string(k) + "," + std::to_string(l) + "} is zero");
  return reps;
}

// ---------------------------------------------------------------------------
// Sparse representative search

std::vector<long> coefficient_multiset(const GraphVector& v) {
  std::vector<long> out;
  for (const auto& [g, q] : v.terms()) {
    mpq_class a = abs(q);
    out.push_back(a.get_den() == 1 ? a.get_num().get_si() : -1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SparseSearchResult search_sparse_representatives(Complex& cx, int k, int l,
                                                 const Graph& required, int max_support,
                                                 std::size_t node_budget) {
  SparseSearchResult result;
  const auto& b = cx.basis(k, l);
  const auto start = b.find(required);
  if (!start) return result;

  const auto& out = cx.matrix(k, l);
  const auto rows_of = out.transpose();  // column r of rows_of = row r of out
  EchelonBasis image;
  if (l > 0) {
    const auto& in = cx.matrix(k, l - 1);
    for (int j = 0; j < in.cols(); ++j)
      if (!in.column(j).empty()) image.insert(in.column(j));
  }

  std::set<std::vector<int>> visited;
  std::set<SparseVector> found;
  bool budget_hit = false;

  auto dfs = [&](auto&& self, std::vector<int> support) -> void {
    std::sort(support.begin(), support.end());
    if (!visited.insert(support).second) return;
    if (++result.nodes_visited > node_budget) {
      budget_hit = true;
      return;
    }
    // Null space of delta restricted to the support.
    const int m = static_cast<int>(support.size());
    SparseRationalMatrix sub(out.rows(), m);
    for (int c = 0; c < m; ++c)
      for (const auto& [r, q] : out.column(support[c])) sub.add(r, c, q);
    // Some kernel vector must involve the required graph and survive modulo
    // the image; a combination of two basis vectors suffices.
    std::vector<SparseVector> kernel;
    for (const auto& y : sub.kernel_basis()) {
      SparseVector x;
      for (const auto& [c, q] : y) x.emplace(support[c], q);
      kernel.push_back(std::move(x));
    }
    const SparseVector* with_start = nullptr;
    const SparseVector* outside = nullptr;
    for (const auto& x : kernel) {
      if (!with_start && x.count(*start)) with_start = &x;
      if (!outside && !image.reduce(x).empty()) outside = &x;
    }
    if (with_start && outside) {
      SparseVector x = *with_start;
      if (with_start != outside && image.reduce(x).empty()) {
        for (int t = 1; t <= 2; ++t) {
          SparseVector y = x;
          axpy(y, t, *outside);
          if (y.count(*start)) {
            x = std::move(y);
            break;
          }
        }
      }
      if (x.count(*start) && !image.reduce(x).empty()) found.insert(primitive_integer(x));
    }
    if (m >= max_support) return;

    // A vector with full support on a superset must rebalance every row in
    // which the current support has a single entry. Without such a row, any
    // column sharing a row with the support may be next.
    std::map<int, int> touch;
    for (int j : support)
      for (const auto& [r, q] : out.column(j)) ++touch[r];
    int best_row = -1;
    std::size_t best_branch = SIZE_MAX;
    for (const auto& [r, cnt] : touch) {
      if (cnt != 1) continue;
      std::size_t branch = 0;
      for (const auto& [j, q] : rows_of.column(r))
        branch += !std::binary_search(support.begin(), support.end(), j);
      if (branch < best_branch) {
        best_branch = branch;
        best_row = r;
      }
    }
    std::set<int> candidates;
    if (best_row >= 0) {
      for (const auto& [j, q] : rows_of.column(best_row)) candidates.insert(j);
    } else {
      for (const auto& [r, cnt] : touch)
        for (const auto& [j, q] : rows_of.column(r)) candidates.insert(j);
    }
    for (int j : candidates) {
      if (std::binary_search(support.begin(), support.end(), j)) continue;
      auto next = support;
      next.push_back(j);
      self(self, std::move(next));
      if (budget_hit) return;
    }
  };
  dfs(dfs, std::vector<int>{*start});

  result.exhausted = !budget_hit;
  for (const auto& x : found) result.representatives.push_back(from_coordinates(x, b));
  return result;
}

// ---------------------------------------------------------------------------
// DiskCache

std::filesystem::path DiskCache::file(const std::string& kind, int k, int l) const {
  return dir_ / (std::string(kCacheVersion) + "-" + kind + "-k" + std::to_string(k) + "-l" +
                 std::to_string(l) + ".txt");
}

std::optional<BasisTable> DiskCache::load_basis(int k, int l) const {
  std::ifstream in(file("basis", k, l));
  if (!in) return std::nullopt;
  std::string tag;
  int kk = 0, ll = 0;
  std::size_t count = 0;
  if (!(in >> tag >> kk >> ll >> count) || tag != kCacheVersion || kk != k || ll != l)
    return std::nullopt;
  BasisTable t;
  t.k = k;
  t.l = l;
  std::string line;
  try {
    for (std::size_t i = 0; i < count; ++i) {
      if (!(in >> line)) return std::nullopt;
      auto g = parse_graph(line);
      auto c = canonicalize(g);
      if (c.sign != 1 || !(c.graph == g)) return std::nullopt;
      t.graphs.push_back(std::move(g));
    }
  } catch (const GraphError&) {
    return std::nullopt;
  }
  if (!std::is_sorted(t.graphs.begin(), t.graphs.end())) return std::nullopt;
  for (int i = 0; i < t.dim(); ++i) t.index.emplace(t.graphs[i], i);
  return t;
}

void DiskCache::store_basis(const BasisTable& b) const {
  std::filesystem::create_directories(dir_);
  const auto path = file("basis", b.k, b.l);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << kCacheVersion << ' ' << b.k << ' ' << b.l << ' ' << b.graphs.size() << '\n';
    for (const auto& g : b.graphs) out << format_graph(g) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::optional<SparseRationalMatrix> DiskCache::load_matrix(int k, int l) const {
  std::ifstream in(file("delta", k, l));
  if (!in) return std::nullopt;
  std::string tag;
  int kk = 0, ll = 0, rows = 0, cols = 0;
  std::size_t nnz = 0;
  if (!(in >> tag >> kk >> ll >> rows >> cols >> nnz) || tag != kCacheVersion || kk != k ||
      ll != l)
    return std::nullopt;
  SparseRationalMatrix m(rows, cols);
  try {
    for (std::size_t i = 0; i < nnz; ++i) {
      int r = 0, c = 0;
      std::string q;
      if (!(in >> r >> c >> q)) return std::nullopt;
      m.add(r, c, parse_rational(q));
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return m;
}

void DiskCache::store_matrix(int k, int l, const SparseRationalMatrix& m) const {
  std::filesystem::create_directories(dir_);
  const auto path = file("delta", k, l);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << kCacheVersion << ' ' << k << ' ' << l << ' ' << m.rows() << ' ' << m.cols() << ' '
        << m.nonzeros() << '\n';
    for (int j = 0; j < m.cols(); ++j)
      for (const auto& [i, q] : m.column(j)) out << i << ' ' << j << ' ' << q.get_str() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

DiskCache::Stat DiskCache::stat() const {
  Stat s;
  if (!std::filesystem::exists(dir_)) return s;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename().string().rfind("knotcx-cache-", 0) != 0) continue;
    ++s.files;
    s.bytes += entry.file_size();
  }
  return s;
}

std::size_t DiskCache::clear() const {
  std::size_t removed = 0;
  if (!std::filesystem::exists(dir_)) return 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.is_regular_file() &&
        entry.path().filename().string().rfind("knotcx-cache-", 0) == 0) {
      std::filesystem::remove(entry.path());
      ++removed;
    }
  }
  return removed;
}

}  // namespace knotcx
