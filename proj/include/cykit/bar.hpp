#pragma once

#include "cykit/bimodule.hpp"

namespace cykit::dgcore {

struct BarOptions {
  // Windows for the *assembled* complexes the resolution will feed.
  Window degree_window;
  Window weight_window = Window::all();
  int max_tensor_length = 64;
  long generator_budget = 200000;
};

// Reduced normalized two-sided bar resolution of the diagonal bimodule:
// generators g[a_1|...|a_p] over composable non-identity basis monomials,
// within windows wide enough to assemble on the given ones.
FreeBimoduleComplex bar_resolution(const FiniteDgCategory& C, const BarOptions& opts);

// The augmentation Bar -> diagonal, g[]_x -> e_x.
GenValuedMap bar_augmentation(const FreeBimoduleComplex& bar);

// Standard two-term free bimodule resolution of the A_n path algebra diagonal.
FreeBimoduleComplex small_resolution_an(const FiniteDgCategory& An);
GenValuedMap small_resolution_augmentation(const FreeBimoduleComplex& R);

// For each bar generator, its tensor word as monomial ids (used by phi and by
// the comparison machinery); empty for p = 0 generators.
const std::vector<int>& bar_word(const FreeBimoduleComplex& bar, int gen);

// R (x)_{C^e} C: the contraction to a plain complex. Basis elements are
// (gen, r) with r a monomial right_obj(gen) -> left_obj(gen).
struct ContractedComplex {
  const FreeBimoduleComplex* R = nullptr;
  exactla::GradedComplex complex;
  std::map<int, std::vector<std::pair<int, int>>> elts;  // deg -> (gen, r)
  std::map<std::pair<int, int>, std::pair<int, int>> index;  // (gen, r) -> (deg, idx)

  int find(int deg, int gen, int r) const;
};

ContractedComplex contract(const FreeBimoduleComplex& R, const AssemblyOptions& opts);

// Chain map induced on contractions by a map of free complexes.
exactla::ComplexMap contract_map(const FreeBimoduleMap& f, const ContractedComplex& src,
                                 const ContractedComplex& tgt);

}  // namespace cykit::dgcore
