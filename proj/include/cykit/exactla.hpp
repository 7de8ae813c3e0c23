#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cykit/scalar.hpp"

namespace cykit::exactla {

// Sparse vector: index -> nonzero scalar. Stored zeros are never kept.
using SparseVec = std::map<int, Scalar>;

void vec_add_scaled(SparseVec& dst, const Scalar& c, const SparseVec& src);

// Sparse matrix over an exact field, row-major.
class SparseMatrix {
 public:
  SparseMatrix() : rows_(0), cols_(0), field_(FieldSpec::rational()) {}
  SparseMatrix(int rows, int cols, FieldSpec field)
      : rows_(rows), cols_(cols), field_(field), data_(rows) {}

  static SparseMatrix identity(int n, FieldSpec f);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  FieldSpec field() const { return field_; }

  void set(int r, int c, const Scalar& v);
  void add_to(int r, int c, const Scalar& v);
  Scalar get(int r, int c) const;
  const SparseVec& row(int r) const { return data_[r]; }
  int nnz() const;
  bool is_zero() const;

  SparseMatrix transpose() const;
  SparseMatrix operator*(const SparseMatrix& o) const;
  SparseMatrix operator+(const SparseMatrix& o) const;
  SparseMatrix operator-(const SparseMatrix& o) const;
  SparseMatrix scaled(const Scalar& c) const;
  SparseVec apply(const SparseVec& x) const;  // matrix * column vector
  bool operator==(const SparseMatrix& o) const;

  // Block placement: copy o into this at offset (r0, c0).
  void insert_block(int r0, int c0, const SparseMatrix& o);

  std::string to_string() const;

 private:
  int rows_, cols_;
  FieldSpec field_;
  std::vector<SparseVec> data_;
};

// Canonical reduced row echelon form. Unique for a given row space, hence
// kernel bases and particular solutions are reproducible across runs.
struct Rref {
  int rank = 0;
  int cols = 0;
  std::vector<int> pivot_cols;           // ascending
  std::vector<SparseVec> rows;           // rows[i] has leading 1 at pivot_cols[i]
};

Rref rref(const SparseMatrix& m);

int rank(const SparseMatrix& m);
std::vector<SparseVec> kernel_basis(const SparseMatrix& m);
std::optional<SparseVec> solve(const SparseMatrix& m, const SparseVec& b);

// Is x in the column span of m?
bool in_column_span(const SparseMatrix& m, const SparseVec& x);

// Bounded cochain complex on a degree window. d[k] maps degree k to k+1 and
// has shape dims(k+1) x dims(k). Degrees outside [lo, hi] are zero unless the
// complex is flagged window-truncated on that side.
struct GradedComplex {
  int lo = 0, hi = -1;  // empty window when lo > hi
  std::map<int, int> dims;
  std::map<int, SparseMatrix> d;
  bool truncated_below = false;
  bool truncated_above = false;
  FieldSpec field = FieldSpec::rational();

  int dim(int k) const {
    auto it = dims.find(k);
    return it == dims.end() ? 0 : it->second;
  }
  const SparseMatrix* diff(int k) const {
    auto it = d.find(k);
    return it == d.end() ? nullptr : &it->second;
  }

  // Shape coherence and exact d(k+1) * d(k) == 0; throws IntegrityError.
  void validate() const;

  // dim H^k = dims(k) - rank d_k - rank d_{k-1}. Degrees whose value could be
  // affected by window truncation are reported in `unreliable`.
  std::map<int, int> homology_dims(std::set<int>* unreliable = nullptr) const;

  long long euler_characteristic() const;

  GradedComplex shifted(int m) const;  // X[m]: (X[m])^k = X^{k+m}, d -> (-1)^m d
};

// Degreewise map of complexes f: X -> Y (degree 0); maps[k]: X^k -> Y^k.
struct ComplexMap {
  const GradedComplex* src = nullptr;
  const GradedComplex* tgt = nullptr;
  std::map<int, SparseMatrix> maps;

  SparseMatrix map_at(int k) const;
  void check_chain_map() const;  // exact identity; throws IntegrityError
};

// cone(f) = Y (+) X[1] with d = [[d_Y, f], [0, -d_X]].
GradedComplex cone(const ComplexMap& f);

GradedComplex direct_sum(const GradedComplex& a, const GradedComplex& b);

}  // namespace cykit::exactla
