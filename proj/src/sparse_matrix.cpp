#include "knotcx/sparse_matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace knotcx {

void axpy(SparseVector& v, const mpq_class& q, const SparseVector& w) {
  if (q == 0) return;
  for (const auto& [i, x] : w) {
    auto [it, inserted] = v.try_emplace(i, q * x);
    if (!inserted) {
      it->second += q * x;
      if (it->second == 0) v.erase(it);
    }
  }
}

SparseVector primitive_integer(const SparseVector& v) {
  if (v.empty()) return v;
  mpz_class lcm_den = 1;
  for (const auto& [i, q] : v) lcm_den = lcm(lcm_den, mpz_class(q.get_den()));
  mpz_class g = 0;
  for (const auto& [i, q] : v) {
    mpz_class num = q.get_num() * (lcm_den / q.get_den());
    g = gcd(g, num);
  }
  mpq_class scale(lcm_den, g);
  scale.canonicalize();
  if (v.begin()->second < 0) scale = -scale;
  SparseVector out;
  for (const auto& [i, q] : v) out.emplace(i, q * scale);
  return out;
}

void SparseRationalMatrix::add(int row, int col, const mpq_class& value) {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_)
    throw std::out_of_range("SparseRationalMatrix::add index out of range");
  if (value == 0) return;
  auto& c = columns_[col];
  auto [it, inserted] = c.try_emplace(row, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0) c.erase(it);
  }
}

mpq_class SparseRationalMatrix::at(int row, int col) const {
  const auto& c = columns_.at(col);
  auto it = c.find(row);
  return it == c.end() ? mpq_class(0) : it->second;
}

std::size_t SparseRationalMatrix::nonzeros() const {
  std::size_t n = 0;
  for (const auto& c : columns_) n += c.size();
  return n;
}

SparseVector SparseRationalMatrix::apply(const SparseVector& x) const {
  SparseVector out;
  for (const auto& [j, q] : x) axpy(out, q, columns_.at(j));
  return out;
}

SparseRationalMatrix SparseRationalMatrix::multiply(const SparseRationalMatrix& rhs) const {
  if (cols_ != rhs.rows_)
    throw std::invalid_argument("SparseRationalMatrix::multiply shape mismatch");
  SparseRationalMatrix out(rows_, rhs.cols_);
  for (int j = 0; j < rhs.cols_; ++j) out.columns_[j] = apply(rhs.columns_[j]);
  return out;
}

SparseRationalMatrix SparseRationalMatrix::transpose() const {
  SparseRationalMatrix out(cols_, rows_);
  for (int j = 0; j < cols_; ++j)
    for (const auto& [i, q] : columns_[j]) out.columns_[i].emplace(j, q);
  return out;
}

SparseRationalMatrix SparseRationalMatrix::permuted(const std::vector<int>& row_perm,
                                                    const std::vector<int>& col_perm) const {
  SparseRationalMatrix out(rows_, cols_);
  for (int j = 0; j < cols_; ++j)
    for (const auto& [i, q] : columns_[j]) out.columns_[col_perm[j]].emplace(row_perm[i], q);
  return out;
}

SparseVector EchelonBasis::reduce(SparseVector v) const {
  // Eliminate leading entries in increasing index order; each step removes
  // the current leading index, so the loop terminates.
  auto it = v.begin();
  while (it != v.end()) {
    auto row = rows_.find(it->first);
    if (row == rows_.end()) {
      ++it;
      continue;
    }
    const int lead = it->first;
    const mpq_class q = -it->second;
    axpy(v, q, row->second);
    it = v.upper_bound(lead);
  }
  return v;
}

bool EchelonBasis::insert(SparseVector v) {
  // Only the leading entry needs to avoid existing pivots.
  while (!v.empty()) {
    auto row = rows_.find(v.begin()->first);
    if (row == rows_.end()) break;
    const mpq_class q = -v.begin()->second;
    axpy(v, q, row->second);
  }
  if (v.empty()) return false;
  const mpq_class lead = v.begin()->second;
  for (auto& [i, x] : v) x /= lead;
  const int key = v.begin()->first;
  rows_.emplace(key, std::move(v));
  return true;
}

int SparseRationalMatrix::rank() const {
  // Row space of the transpose: insert columns, shortest first to limit fill.
  std::vector<int> order(cols_);
  for (int j = 0; j < cols_; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return columns_[a].size() < columns_[b].size();
  });
  EchelonBasis basis;
  for (int j : order)
    if (!columns_[j].empty()) basis.insert(columns_[j]);
  return static_cast<int>(basis.dimension());
}

std::vector<SparseVector> SparseRationalMatrix::kernel_basis() const {
  // Reduced row echelon form of the rows.
  const auto t = transpose();  // columns of t are rows of *this
  EchelonBasis basis;
  for (int i = 0; i < rows_; ++i)
    if (!t.columns_[i].empty()) basis.insert(t.columns_[i]);

  // Back-substitute to full RREF.
  std::map<int, SparseVector> rref;
  for (auto it = basis.rows().rbegin(); it != basis.rows().rend(); ++it) {
    SparseVector r = it->second;
    for (auto e = std::next(r.begin()); e != r.end();) {
      auto p = rref.find(e->first);
      if (p == rref.end()) {
        ++e;
        continue;
      }
      const int idx = e->first;
      const mpq_class q = -e->second;
      axpy(r, q, p->second);
      e = r.upper_bound(idx);
    }
    rref.emplace(it->first, std::move(r));
  }

  std::vector<SparseVector> kernel;
  for (int f = 0; f < cols_; ++f) {
    if (rref.count(f)) continue;
    SparseVector x;
    x.emplace(f, 1);
    for (const auto& [p, row] : rref) {
      auto e = row.find(f);
      if (e != row.end()) x.emplace(p, -e->second);
    }
    kernel.push_back(std::move(x));
  }
  return kernel;
}

}  // namespace knotcx
