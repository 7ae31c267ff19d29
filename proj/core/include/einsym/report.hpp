#pragma once

// Machine-readable proof reports shared by the deduction and certification
// code. Every step records the constraints it used, the atoms it eliminated
// and a hash of its residual so that runs can be compared byte for byte.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "einsym/expr.hpp"

namespace einsym {

std::uint64_t fnv1a64(std::string_view text);
// 16 lowercase hex digits of fnv1a64 over the canonical text form.
std::string residual_hash(const Expr& residual);

struct ProofStep {
  std::string name;
  std::string paper_eq;  // equation label
  bool passed = false;
  std::vector<std::string> constraints_used;
  std::vector<std::string> atoms_eliminated;
  std::string residual_hash;
  std::string detail;
};

struct ProofReport {
  std::string title;
  int dim = 0;
  std::vector<ProofStep> steps;

  [[nodiscard]] bool passed() const;
  ProofStep& add(ProofStep step);
  // Appends every step of `other`, prefixing names with `prefix`.
  void append(const ProofReport& other, std::string_view prefix = {});
};

nlohmann::json to_json(const ProofStep& step);
nlohmann::json to_json(const ProofReport& report);
std::string index_label(const std::vector<int>& indices);

}  // namespace einsym
