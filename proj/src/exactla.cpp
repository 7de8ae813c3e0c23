#include "cykit/exactla.hpp"

#include <algorithm>
#include <sstream>

namespace cykit::exactla {

void vec_add_scaled(SparseVec& dst, const Scalar& c, const SparseVec& src) {
  if (c.is_zero()) return;
  for (const auto& [j, v] : src) {
    auto it = dst.find(j);
    if (it == dst.end()) {
      dst.emplace(j, c * v);
    } else {
      it->second += c * v;
      if (it->second.is_zero()) dst.erase(it);
    }
  }
}

SparseMatrix SparseMatrix::identity(int n, FieldSpec f) {
  SparseMatrix m(n, n, f);
  for (int i = 0; i < n; ++i) m.set(i, i, Scalar::one(f));
  return m;
}

void SparseMatrix::set(int r, int c, const Scalar& v) {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw IntegrityError("matrix index out of range");
  if (v.field() != field_) throw IntegrityError("scalar field mismatch in matrix");
  if (v.is_zero())
    data_[r].erase(c);
  else
    data_[r][c] = v;
}

void SparseMatrix::add_to(int r, int c, const Scalar& v) {
  if (v.is_zero()) return;
  set(r, c, get(r, c) + v);
}

Scalar SparseMatrix::get(int r, int c) const {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw IntegrityError("matrix index out of range");
  auto it = data_[r].find(c);
  return it == data_[r].end() ? Scalar::zero(field_) : it->second;
}

int SparseMatrix::nnz() const {
  int n = 0;
  for (const auto& row : data_) n += static_cast<int>(row.size());
  return n;
}

bool SparseMatrix::is_zero() const { return nnz() == 0; }

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_, field_);
  for (int r = 0; r < rows_; ++r)
    for (const auto& [c, v] : data_[r]) t.data_[c][r] = v;
  return t;
}

SparseMatrix SparseMatrix::operator*(const SparseMatrix& o) const {
  if (cols_ != o.rows_) throw IntegrityError("matrix product shape mismatch");
  SparseMatrix out(rows_, o.cols_, field_);
  for (int r = 0; r < rows_; ++r)
    for (const auto& [k, v] : data_[r]) vec_add_scaled(out.data_[r], v, o.data_[k]);
  return out;
}

SparseMatrix SparseMatrix::operator+(const SparseMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw IntegrityError("matrix sum shape mismatch");
  SparseMatrix out = *this;
  for (int r = 0; r < rows_; ++r) vec_add_scaled(out.data_[r], Scalar::one(field_), o.data_[r]);
  return out;
}

SparseMatrix SparseMatrix::operator-(const SparseMatrix& o) const {
  return *this + o.scaled(-Scalar::one(field_));
}

SparseMatrix SparseMatrix::scaled(const Scalar& c) const {
  SparseMatrix out(rows_, cols_, field_);
  if (c.is_zero()) return out;
  for (int r = 0; r < rows_; ++r)
    for (const auto& [j, v] : data_[r]) out.data_[r][j] = c * v;
  return out;
}

SparseVec SparseMatrix::apply(const SparseVec& x) const {
  SparseVec out;
  for (int r = 0; r < rows_; ++r) {
    Scalar acc = Scalar::zero(field_);
    const SparseVec& row = data_[r];
    for (const auto& [j, v] : row) {
      auto it = x.find(j);
      if (it != x.end()) acc += v * it->second;
    }
    if (!acc.is_zero()) out[r] = acc;
  }
  return out;
}

bool SparseMatrix::operator==(const SparseMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) return false;
  return (*this - o).is_zero();
}

void SparseMatrix::insert_block(int r0, int c0, const SparseMatrix& o) {
  for (int r = 0; r < o.rows_; ++r)
    for (const auto& [c, v] : o.data_[r]) set(r0 + r, c0 + c, v);
}

std::string SparseMatrix::to_string() const {
  std::ostringstream os;
  for (int r = 0; r < rows_; ++r) {
    os << (r ? "\n" : "") << "[";
    for (int c = 0; c < cols_; ++c) os << (c ? " " : "") << get(r, c).to_string();
    os << "]";
  }
  return os.str();
}

namespace {

using IntRow = std::map<int, mpz_class>;

void strip_content(IntRow& row) {
  mpz_class g = 0;
  for (const auto& [c, v] : row) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  if (g == 0 || g == 1) return;
  for (auto& [c, v] : row) v /= g;
}

// Markowitz pivot choice among active rows: minimize (nnz(row)-1)*(nnz(col)-1),
// tie-break lowest row index, then lowest column index.
template <typename Rows>
std::pair<int, int> pick_pivot(const Rows& rows, const std::vector<bool>& active,
                               const std::vector<int>& colcount) {
  long best = -1;
  int br = -1, bc = -1;
  for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
    if (!active[r] || rows[r].empty()) continue;
    long rw = static_cast<long>(rows[r].size()) - 1;
    for (const auto& [c, v] : rows[r]) {
      long score = rw * (colcount[c] - 1);
      if (best < 0 || score < best || (score == best && (r < br || (r == br && c < bc)))) {
        best = score;
        br = r;
        bc = c;
      }
    }
  }
  return {br, bc};
}

// Fraction-free forward elimination over Q: rows are integer vectors (the
// input rows scaled by their denominator lcm), updates are cross-multiplied
// and content-stripped, so no rational arithmetic happens until the final
// reduction pass. Returns a basis of the row space.
std::vector<SparseVec> forward_rational(const SparseMatrix& m) {
  std::vector<IntRow> rows;
  rows.reserve(m.rows());
  for (int r = 0; r < m.rows(); ++r) {
    IntRow row;
    mpz_class l = 1;
    for (const auto& [c, v] : m.row(r))
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.rational().get_den().get_mpz_t());
    for (const auto& [c, v] : m.row(r)) {
      mpz_class num = v.rational().get_num() * (l / v.rational().get_den());
      row[c] = num;
    }
    strip_content(row);
    if (!row.empty()) rows.push_back(std::move(row));
  }

  std::vector<bool> active(rows.size(), true);
  auto colcounts = [&]() {
    std::vector<int> cc(m.cols(), 0);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
      if (active[r])
        for (const auto& [c, v] : rows[r]) ++cc[c];
    return cc;
  };

  std::vector<int> done;
  for (;;) {
    auto cc = colcounts();
    auto [pr, pc] = pick_pivot(rows, active, cc);
    if (pr < 0) break;
    const mpz_class piv = rows[pr][pc];
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (r == pr || !active[r]) continue;
      auto it = rows[r].find(pc);
      if (it == rows[r].end()) continue;
      mpz_class a = it->second;
      IntRow next;
      // next = piv*row_r - a*pivot_row, computed term by term
      for (const auto& [c, v] : rows[r]) next[c] = piv * v;
      for (const auto& [c, v] : rows[pr]) {
        auto jt = next.find(c);
        if (jt == next.end()) {
          next[c] = -a * v;
        } else {
          jt->second -= a * v;
          if (jt->second == 0) next.erase(jt);
        }
      }
      strip_content(next);
      rows[r] = std::move(next);
    }
    active[pr] = false;
    done.push_back(pr);
  }

  std::vector<SparseVec> basis;
  for (int r : done) {
    SparseVec row;
    for (const auto& [c, v] : rows[r]) row[c] = Scalar::of_rational(mpq_class(v));
    basis.push_back(std::move(row));
  }
  return basis;
}

// Straightforward field elimination for F_p with the same pivoting rule.
std::vector<SparseVec> forward_prime(const SparseMatrix& m) {
  std::vector<SparseVec> rows;
  for (int r = 0; r < m.rows(); ++r)
    if (!m.row(r).empty()) rows.push_back(m.row(r));
  std::vector<bool> active(rows.size(), true);
  std::vector<int> done;
  for (;;) {
    std::vector<int> cc(m.cols(), 0);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
      if (active[r])
        for (const auto& [c, v] : rows[r]) ++cc[c];
    auto [pr, pc] = pick_pivot(rows, active, cc);
    if (pr < 0) break;
    Scalar piv = rows[pr].at(pc);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (r == pr || !active[r]) continue;
      auto it = rows[r].find(pc);
      if (it == rows[r].end()) continue;
      Scalar f = -(it->second / piv);
      vec_add_scaled(rows[r], f, rows[pr]);
    }
    active[pr] = false;
    done.push_back(pr);
  }
  std::vector<SparseVec> basis;
  for (int r : done)
    if (!rows[r].empty()) basis.push_back(std::move(rows[r]));
  return basis;
}

int leading_col(const SparseVec& v) { return v.empty() ? -1 : v.begin()->first; }

// Canonicalize a row-space basis to the (unique) RREF.
Rref canonicalize(std::vector<SparseVec> rows, int cols) {
  std::vector<SparseVec> processed;
  while (!rows.empty()) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(rows.size()); ++i)
      if (leading_col(rows[i]) < leading_col(rows[best])) best = i;
    SparseVec piv = std::move(rows[best]);
    rows.erase(rows.begin() + best);
    int pc = leading_col(piv);
    Scalar lead = piv.at(pc);
    if (!lead.is_one()) {
      Scalar inv = lead.inverse();
      for (auto& [c, v] : piv) v = inv * v;
    }
    auto reduce = [&](SparseVec& r) {
      auto it = r.find(pc);
      if (it != r.end()) vec_add_scaled(r, -it->second, piv);
    };
    for (auto& r : rows) reduce(r);
    for (auto& r : processed) reduce(r);
    processed.push_back(std::move(piv));
    rows.erase(std::remove_if(rows.begin(), rows.end(),
                              [](const SparseVec& r) { return r.empty(); }),
               rows.end());
  }
  std::sort(processed.begin(), processed.end(),
            [](const SparseVec& a, const SparseVec& b) { return leading_col(a) < leading_col(b); });
  Rref out;
  out.cols = cols;
  out.rank = static_cast<int>(processed.size());
  for (auto& r : processed) out.pivot_cols.push_back(leading_col(r));
  out.rows = std::move(processed);
  return out;
}

}  // namespace

Rref rref(const SparseMatrix& m) {
  std::vector<SparseVec> basis = m.field().kind == FieldKind::Rational
                                     ? forward_rational(m)
                                     : forward_prime(m);
  return canonicalize(std::move(basis), m.cols());
}

int rank(const SparseMatrix& m) { return rref(m).rank; }

std::vector<SparseVec> kernel_basis(const SparseMatrix& m) {
  Rref r = rref(m);
  std::set<int> pivots(r.pivot_cols.begin(), r.pivot_cols.end());
  std::vector<SparseVec> out;
  FieldSpec f = m.field();
  for (int c = 0; c < m.cols(); ++c) {
    if (pivots.count(c)) continue;
    SparseVec x;
    x[c] = Scalar::one(f);
    for (int i = 0; i < r.rank; ++i) {
      auto it = r.rows[i].find(c);
      if (it != r.rows[i].end()) x[r.pivot_cols[i]] = -it->second;
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::optional<SparseVec> solve(const SparseMatrix& m, const SparseVec& b) {
  if (!b.empty() && b.rbegin()->first >= m.rows())
    throw IntegrityError("solve: rhs longer than matrix column height");
  SparseMatrix aug(m.rows(), m.cols() + 1, m.field());
  for (int r = 0; r < m.rows(); ++r)
    for (const auto& [c, v] : m.row(r)) aug.set(r, c, v);
  for (const auto& [r, v] : b) aug.set(r, m.cols(), v);
  Rref rr = rref(aug);
  SparseVec x;
  for (int i = 0; i < rr.rank; ++i) {
    if (rr.pivot_cols[i] == m.cols()) return std::nullopt;  // inconsistent
    auto it = rr.rows[i].find(m.cols());
    if (it != rr.rows[i].end()) x[rr.pivot_cols[i]] = it->second;
  }
  return x;
}

bool in_column_span(const SparseMatrix& m, const SparseVec& x) {
  return solve(m, x).has_value();
}

void GradedComplex::validate() const {
  for (const auto& [k, n] : dims)
    if (n < 0) throw IntegrityError("negative dimension in complex");
  for (const auto& [k, mk] : d) {
    if (mk.field() != field) throw IntegrityError("complex differential field mismatch");
    if (mk.rows() != dim(k + 1) || mk.cols() != dim(k))
      throw IntegrityError("differential shape mismatch at degree " + std::to_string(k));
  }
  for (const auto& [k, mk] : d) {
    const SparseMatrix* next = diff(k + 1);
    if (next && !((*next) * mk).is_zero())
      throw IntegrityError("d^2 != 0 between degrees " + std::to_string(k) + " and " +
                           std::to_string(k + 2));
  }
}

std::map<int, int> GradedComplex::homology_dims(std::set<int>* unreliable) const {
  std::map<int, int> h;
  std::map<int, int> ranks;
  auto rank_at = [&](int k) {
    auto it = ranks.find(k);
    if (it != ranks.end()) return it->second;
    const SparseMatrix* mk = diff(k);
    int r = mk ? rank(*mk) : 0;
    ranks[k] = r;
    return r;
  };
  for (int k = lo; k <= hi; ++k) {
    int n = dim(k);
    h[k] = n - rank_at(k) - rank_at(k - 1);
    if (h[k] < 0) throw IntegrityError("negative homology dimension; complex invalid");
  }
  if (unreliable) {
    if (truncated_below && lo <= hi) unreliable->insert(lo);
    if (truncated_above && lo <= hi) unreliable->insert(hi);
  }
  return h;
}

long long GradedComplex::euler_characteristic() const {
  long long chi = 0;
  for (const auto& [k, n] : dims) chi += (k % 2 == 0 ? 1 : -1) * static_cast<long long>(n);
  return chi;
}

GradedComplex GradedComplex::shifted(int m) const {
  GradedComplex out;
  out.lo = lo - m;
  out.hi = hi - m;
  out.field = field;
  out.truncated_below = truncated_below;
  out.truncated_above = truncated_above;
  for (const auto& [k, n] : dims) out.dims[k - m] = n;
  Scalar sign = Scalar::of_int(m % 2 == 0 ? 1 : -1, field);
  for (const auto& [k, mk] : d) out.d[k - m] = mk.scaled(sign);
  return out;
}

SparseMatrix ComplexMap::map_at(int k) const {
  auto it = maps.find(k);
  if (it != maps.end()) return it->second;
  return SparseMatrix(tgt->dim(k), src->dim(k), tgt->field);
}

void ComplexMap::check_chain_map() const {
  int lo = std::min(src->lo, tgt->lo), hi = std::max(src->hi, tgt->hi);
  for (int k = lo; k <= hi; ++k) {
    const SparseMatrix* ds = src->diff(k);
    const SparseMatrix* dt = tgt->diff(k);
    SparseMatrix lhs = dt ? (*dt) * map_at(k) : SparseMatrix(tgt->dim(k + 1), src->dim(k), tgt->field);
    SparseMatrix rhs = ds ? map_at(k + 1) * (*ds) : SparseMatrix(tgt->dim(k + 1), src->dim(k), tgt->field);
    if (!(lhs - rhs).is_zero())
      throw IntegrityError("chain-map identity fails at degree " + std::to_string(k));
  }
}

GradedComplex cone(const ComplexMap& f) {
  const GradedComplex& X = *f.src;
  const GradedComplex& Y = *f.tgt;
  if (X.field != Y.field) throw IntegrityError("cone: field mismatch");
  GradedComplex C;
  C.field = Y.field;
  C.lo = std::min(Y.lo, X.lo - 1);
  C.hi = std::max(Y.hi, X.hi - 1);
  C.truncated_below = X.truncated_below || Y.truncated_below;
  C.truncated_above = X.truncated_above || Y.truncated_above;
  for (int k = C.lo; k <= C.hi; ++k) {
    int n = Y.dim(k) + X.dim(k + 1);
    if (n) C.dims[k] = n;
  }
  Scalar minus = -Scalar::one(C.field);
  for (int k = C.lo; k <= C.hi; ++k) {
    int rows = Y.dim(k + 1) + X.dim(k + 2);
    int cols = Y.dim(k) + X.dim(k + 1);
    if (!rows || !cols) continue;
    SparseMatrix dk(rows, cols, C.field);
    if (const SparseMatrix* dY = Y.diff(k)) dk.insert_block(0, 0, *dY);
    dk.insert_block(0, Y.dim(k), f.map_at(k + 1));
    if (const SparseMatrix* dX = X.diff(k + 1)) dk.insert_block(Y.dim(k + 1), Y.dim(k), dX->scaled(minus));
    if (dk.nnz()) C.d[k] = std::move(dk);
  }
  return C;
}

GradedComplex direct_sum(const GradedComplex& a, const GradedComplex& b) {
  if (a.field != b.field) throw IntegrityError("direct sum: field mismatch");
  GradedComplex s;
  s.field = a.field;
  s.lo = std::min(a.lo, b.lo);
  s.hi = std::max(a.hi, b.hi);
  s.truncated_below = a.truncated_below || b.truncated_below;
  s.truncated_above = a.truncated_above || b.truncated_above;
  for (int k = s.lo; k <= s.hi; ++k) {
    int n = a.dim(k) + b.dim(k);
    if (n) s.dims[k] = n;
  }
  for (int k = s.lo; k <= s.hi; ++k) {
    int rows = a.dim(k + 1) + b.dim(k + 1), cols = a.dim(k) + b.dim(k);
    if (!rows || !cols) continue;
    SparseMatrix dk(rows, cols, s.field);
    if (const SparseMatrix* da = a.diff(k)) dk.insert_block(0, 0, *da);
    if (const SparseMatrix* db = b.diff(k)) dk.insert_block(a.dim(k + 1), a.dim(k), *db);
    if (dk.nnz()) s.d[k] = std::move(dk);
  }
  return s;
}

}  // namespace cykit::exactla
