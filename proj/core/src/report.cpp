#include "einsym/report.hpp"

#include <algorithm>
#include <cstdio>

#include "einsym/serialize.hpp"

namespace einsym {

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string residual_hash(const Expr& residual) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_text(residual))));
  return buf;
}

bool ProofReport::passed() const {
  return !steps.empty() && std::all_of(steps.begin(), steps.end(), [](const ProofStep& s) { return s.passed; });
}

ProofStep& ProofReport::add(ProofStep step) {
  steps.push_back(std::move(step));
  return steps.back();
}

void ProofReport::append(const ProofReport& other, std::string_view prefix) {
  for (ProofStep s : other.steps) {
    if (!prefix.empty()) s.name = std::string(prefix) + s.name;
    steps.push_back(std::move(s));
  }
}

nlohmann::json to_json(const ProofStep& step) {
  nlohmann::json j;
  j["name"] = step.name;
  j["paper_eq"] = step.paper_eq;
  j["status"] = step.passed ? "pass" : "fail";
  j["residual_hash"] = step.residual_hash;
  j["constraints_used"] = step.constraints_used;
  j["atoms_eliminated"] = step.atoms_eliminated;
  if (!step.detail.empty()) j["detail"] = step.detail;
  return j;
}

nlohmann::json to_json(const ProofReport& report) {
  nlohmann::json j;
  j["schema"] = 1;
  j["title"] = report.title;
  j["dim"] = report.dim;
  j["status"] = report.passed() ? "pass" : "fail";
  j["steps"] = nlohmann::json::array();
  for (const ProofStep& s : report.steps) j["steps"].push_back(to_json(s));
  return j;
}

std::string index_label(const std::vector<int>& indices) {
  std::string out = "(";
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(indices[i]);
  }
  return out + ")";
}

}  // namespace einsym
